"""Replay files: initial config plus per-step input bitmask pairs.

A replay re-simulates bit-exactly because the environment is deterministic;
the stored per-step state hashes double as an integrity check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .characters import CharacterSpec
from .engine import FightingEnv
from .types import buttons_from_mask, mask_from_buttons, ButtonVector

REPLAY_SPEC_VERSION = 1


@dataclass
class ReplayRecord:
    char_a: int
    char_b: int
    agent_side: str = "left"
    frames_per_step: int = 4
    round_frames: int = 5940
    steps: list[tuple[int, int]] = field(default_factory=list)  # (agent mask, opp mask)

    def add_step(self, a_agent: ButtonVector, a_opp: ButtonVector) -> None:
        self.steps.append((mask_from_buttons(a_agent), mask_from_buttons(a_opp)))

    def to_dict(self) -> dict:
        return {
            "spec_version": REPLAY_SPEC_VERSION,
            "char_a": self.char_a,
            "char_b": self.char_b,
            "agent_side": self.agent_side,
            "frames_per_step": self.frames_per_step,
            "round_frames": self.round_frames,
            "steps": [list(s) for s in self.steps],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))


def load_replay(path: str | Path) -> ReplayRecord:
    doc = json.loads(Path(path).read_text())
    if doc.get("spec_version") != REPLAY_SPEC_VERSION:
        raise ValueError(f"unsupported replay spec_version: {doc.get('spec_version')!r}")
    return ReplayRecord(
        char_a=doc["char_a"],
        char_b=doc["char_b"],
        agent_side=doc["agent_side"],
        frames_per_step=doc["frames_per_step"],
        round_frames=doc["round_frames"],
        steps=[(int(a), int(b)) for a, b in doc["steps"]],
    )


def run_replay(
    record: ReplayRecord, roster: Optional[Sequence[CharacterSpec]] = None
) -> tuple[object, list[str]]:
    """Re-simulate a replay; returns (final GameState, per-step state hashes)."""
    env = FightingEnv(
        roster=roster,
        frames_per_step=record.frames_per_step,
        round_frames=record.round_frames,
    )
    env.reset(record.char_a, record.char_b, record.agent_side)
    hashes: list[str] = []
    for ma, mo in record.steps:
        state, _, _, done = env.step(buttons_from_mask(ma), buttons_from_mask(mo))
        hashes.append(state.state_hash())
        if done:
            break
    return env.state, hashes
