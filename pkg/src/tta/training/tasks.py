"""Per-iteration task assignment and the append-only policy pool."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .config import HybridSchedule

POOL_MANIFEST = "pool.json"


@dataclass(frozen=True)
class PoolEntry:
    path: str
    iteration: int
    profile: str
    eval_summary: dict

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "iteration": self.iteration,
            "profile": self.profile,
            "eval_summary": self.eval_summary,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PoolEntry":
        return cls(d["path"], int(d["iteration"]), d["profile"], dict(d["eval_summary"]))


class PolicyPool:
    """Ordered collection of historical checkpoints. Append-only: entries
    are never replaced or dropped while the 'All' retention policy is in
    effect, so older selves stay reachable as opponents."""

    def __init__(self, root: Optional[Path] = None):
        self.root = Path(root) if root is not None else None
        self._entries: list[PoolEntry] = []

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> tuple[PoolEntry, ...]:
        return tuple(self._entries)

    def append(self, entry: PoolEntry) -> None:
        if any(e.path == entry.path for e in self._entries):
            raise ValueError(f"pool already holds {entry.path}")
        self._entries.append(entry)

    def sample(self, rng: np.random.Generator) -> PoolEntry:
        if not self._entries:
            raise IndexError("cannot sample from an empty pool")
        return self._entries[int(rng.integers(len(self._entries)))]

    def save(self) -> None:
        if self.root is None:
            raise ValueError("pool has no backing directory")
        self.root.mkdir(parents=True, exist_ok=True)
        target = self.root / POOL_MANIFEST
        tmp = target.with_suffix(".tmp")
        tmp.write_text(json.dumps([e.to_dict() for e in self._entries], indent=2) + "\n")
        os.replace(tmp, target)

    @classmethod
    def load(cls, root: Path) -> "PolicyPool":
        pool = cls(root)
        manifest = Path(root) / POOL_MANIFEST
        if manifest.exists():
            for d in json.loads(manifest.read_text()):
                pool._entries.append(PoolEntry.from_dict(d))
        return pool


@dataclass(frozen=True)
class TaskAssignment:
    mode: str  # "pve" | "self_play"
    opponent: Optional[PoolEntry]  # None for PvE
    pve_level: int
    characters: tuple[int, int]  # (agent, opponent)
    flipped: bool  # True: agent spawns on side 1


def assign_tasks(schedule: HybridSchedule, pool: PolicyPool,
                 rng: np.random.Generator, roster_size: int = 4) -> list[TaskAssignment]:
    """Exact task mix: round(ratio * num_envs) self-play environments when
    the pool is non-empty, the rest PvE; every env flips independently."""
    n_envs = schedule.num_envs
    n_self = schedule.self_play_count() if len(pool) > 0 else 0
    modes = ["self_play"] * n_self + ["pve"] * (n_envs - n_self)
    rng.shuffle(modes)
    tasks = []
    for mode in modes:
        opponent = pool.sample(rng) if mode == "self_play" else None
        tasks.append(
            TaskAssignment(
                mode=mode,
                opponent=opponent,
                pve_level=int(rng.integers(3)),
                characters=(
                    int(rng.integers(roster_size)),
                    int(rng.integers(roster_size)),
                ),
                flipped=bool(rng.random() < schedule.character_flip_rate),
            )
        )
    return tasks
