"""Match running and series statistics.

Matches in a series are independent, so they advance in lockstep groups:
per step the harness renders each live environment once and lets every
agent answer all of its pending (env, side) requests in one batch, which
keeps network-backed agents off the single-observation slow path.
Determinism: each match owns generators derived from (base_seed, match
index), so results never depend on group size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..env import FightingEnv, build_observations
from ..env.replay import ReplayRecord
from .agents import Agent

DEFAULT_LOCKSTEP = 16


@dataclass
class MatchStats:
    winner: Optional[object]  # 0 | 1 | "draw"
    special_moves: tuple[int, int]
    regular_attacks: tuple[int, int]
    projectiles_fired: tuple[int, int]
    mean_distance_norm: float
    round_frames: int
    steps: int
    character: int
    side_of_a: int
    replay: Optional[ReplayRecord] = None

    def winner_is_a(self) -> bool:
        return self.winner == self.side_of_a


@dataclass
class HeadToHeadReport:
    n_matches: int
    wins_a: int
    wins_b: int
    draws: int
    win_rate: float
    matches: list[MatchStats] = field(default_factory=list)


class _LiveMatch:
    def __init__(self, agent_a: Agent, agent_b: Agent, character: int, side_of_a: int,
                 seed: int, roster=None, round_frames: Optional[int] = None,
                 record_replay: bool = False):
        kwargs = {}
        if round_frames is not None:
            kwargs["round_frames"] = round_frames
        self.env = FightingEnv(roster=roster, **kwargs)
        # same character on both sides; side_of_a only decides who drives which half
        self.env.reset(character, character)
        self.character = character
        self.side_of_a = side_of_a
        self.agents = {side_of_a: agent_a, 1 - side_of_a: agent_b}
        ss = np.random.SeedSequence([seed, character, side_of_a])
        r0, r1 = ss.spawn(2)
        self.rngs = {0: np.random.default_rng(r0), 1: np.random.default_rng(r1)}
        self.steps = 0
        self.specials = [0, 0]
        self.regulars = [0, 0]
        self.projectiles = [0, 0]
        self.distance_sum = 0.0
        self.done = False
        self.replay = None
        if record_replay:
            self.replay = ReplayRecord(
                char_a=character, char_b=character, agent_side="left",
                frames_per_step=self.env.frames_per_step,
                round_frames=self.env.round_frames,
            )

    def step(self, buttons_by_side: dict[int, np.ndarray]) -> None:
        b0, b1 = buttons_by_side[0], buttons_by_side[1]
        _, _, info, done = self.env.step(b0, b1)
        if self.replay is not None:
            self.replay.add_step(b0, b1)
        for s in (0, 1):
            self.specials[s] += info[s].special_move_triggered
            self.regulars[s] += info[s].regular_attack_triggered
            self.projectiles[s] += info[s].projectile_triggered
        self.distance_sum += info[0].distance_norm
        self.steps += 1
        self.done = done

    def stats(self) -> MatchStats:
        return MatchStats(
            winner=self.env.state.winner,
            special_moves=(self.specials[0], self.specials[1]),
            regular_attacks=(self.regulars[0], self.regulars[1]),
            projectiles_fired=(self.projectiles[0], self.projectiles[1]),
            mean_distance_norm=self.distance_sum / max(1, self.steps),
            round_frames=self.env.state.frame_count,
            steps=self.steps,
            character=self.character,
            side_of_a=self.side_of_a,
            replay=self.replay,
        )


def _advance_group(group: list[_LiveMatch]) -> None:
    while any(not m.done for m in group):
        live = [m for m in group if not m.done]
        views = {id(m): build_observations(m.env) for m in live}
        requests_by_agent: dict[int, list] = {}
        agent_objs: dict[int, Agent] = {}
        order: list[tuple[int, int]] = []
        for m in live:
            for side in (0, 1):
                agent = m.agents[side]
                requests_by_agent.setdefault(id(agent), []).append(
                    (m.env, side, views[id(m)][side], m.rngs[side])
                )
                agent_objs[id(agent)] = agent
                order.append((id(m), side))
        answers: dict[tuple[int, int], np.ndarray] = {}
        for agent_id, requests in requests_by_agent.items():
            buttons = agent_objs[agent_id].act_batch(requests)
            for (env, side, _, _), b in zip(requests, buttons):
                answers[(id(env), side)] = b
        for m in live:
            m.step({0: answers[(id(m.env), 0)], 1: answers[(id(m.env), 1)]})


def run_match(agent_a: Agent, agent_b: Agent, character: int, seed: int,
              side_of_a: int = 0, roster=None, round_frames: Optional[int] = None,
              record_replay: bool = False) -> MatchStats:
    match = _LiveMatch(agent_a, agent_b, character, side_of_a, seed,
                       roster=roster, round_frames=round_frames,
                       record_replay=record_replay)
    _advance_group([match])
    return match.stats()


def run_series(agent_a: Agent, agent_b: Agent, roster_chars: Sequence[int],
               matches_per_pairing: int, seed: int = 0, roster=None,
               round_frames: Optional[int] = None,
               lockstep: int = DEFAULT_LOCKSTEP) -> HeadToHeadReport:
    """Mirror-match series: both sides play the same character each match;
    agent_a's spawn side alternates so assignment stays balanced within 1."""
    plan = []
    idx = 0
    for char in roster_chars:
        for _ in range(matches_per_pairing):
            plan.append((char, idx % 2, idx))
            idx += 1
    matches = [
        _LiveMatch(agent_a, agent_b, char, side_of_a, seed + 7919 * match_idx,
                   roster=roster, round_frames=round_frames)
        for char, side_of_a, match_idx in plan
    ]
    for start in range(0, len(matches), max(1, lockstep)):
        _advance_group(matches[start:start + max(1, lockstep)])
    all_stats = [m.stats() for m in matches]
    wins_a = sum(1 for s in all_stats if s.winner == s.side_of_a)
    wins_b = sum(1 for s in all_stats if s.winner == 1 - s.side_of_a)
    draws = sum(1 for s in all_stats if s.winner == "draw")
    return HeadToHeadReport(
        n_matches=len(all_stats),
        wins_a=wins_a,
        wins_b=wins_b,
        draws=draws,
        win_rate=wins_a / max(1, len(all_stats)),
        matches=all_stats,
    )


def _agent_rounds(agent: Agent, opponent_set: Sequence[Agent], n_rounds: int,
                  roster_chars: Sequence[int], seed: int, roster=None,
                  round_frames: Optional[int] = None,
                  lockstep: int = DEFAULT_LOCKSTEP) -> list[MatchStats]:
    matches = []
    for i in range(n_rounds):
        opponent = opponent_set[i % len(opponent_set)]
        char = roster_chars[i % len(roster_chars)]
        matches.append(
            _LiveMatch(agent, opponent, char, i % 2, seed + 104729 * i,
                       roster=roster, round_frames=round_frames)
        )
    for start in range(0, len(matches), max(1, lockstep)):
        _advance_group(matches[start:start + max(1, lockstep)])
    return [m.stats() for m in matches]


def special_moves_per_round(agent: Agent, opponent_set: Sequence[Agent], n_rounds: int,
                            roster_chars: Sequence[int] = (0, 1, 2, 3), seed: int = 0,
                            roster=None, round_frames: Optional[int] = None) -> float:
    stats = _agent_rounds(agent, opponent_set, n_rounds, roster_chars, seed,
                          roster=roster, round_frames=round_frames)
    return float(np.mean([s.special_moves[s.side_of_a] for s in stats]))


def behavior_metrics(agent: Agent, opponent_set: Sequence[Agent], n_rounds: int,
                     roster_chars: Sequence[int] = (0, 1, 2, 3), seed: int = 0,
                     roster=None, round_frames: Optional[int] = None) -> dict:
    stats = _agent_rounds(agent, opponent_set, n_rounds, roster_chars, seed,
                          roster=roster, round_frames=round_frames)
    return {
        "mean_distance_norm": float(np.mean([s.mean_distance_norm for s in stats])),
        "projectiles_per_match": float(np.mean([s.projectiles_fired[s.side_of_a] for s in stats])),
        "special_moves_per_round": float(np.mean([s.special_moves[s.side_of_a] for s in stats])),
        "win_rate": float(np.mean([1.0 if s.winner == s.side_of_a else 0.0 for s in stats])),
    }
