"""Player record kept by the session manager.

PlayingData serializes to a fixed key set consumed verbatim by the opponent
selection prompt; the literal key "player's_feedback" (apostrophe included)
is part of that contract. Raw running sums ride along unserialized so that
incrementally updated averages equal a full recomputation from the stored
match records, not a re-parse of the rounded display strings.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional

from ..archive import AGENT_TYPES

WINNERS = ("player", "agent", "draw")


@dataclass(frozen=True)
class OpponentInfo:
    type: str
    character: str
    model_path: str
    difficulty: str

    def to_dict(self) -> dict:
        return {
            "type": self.type,
            "character": self.character,
            "model_path": self.model_path,
            "difficulty": self.difficulty,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OpponentInfo":
        return cls(
            type=d["type"],
            character=d["character"],
            model_path=d["model_path"],
            difficulty=d["difficulty"],
        )

    @classmethod
    def empty(cls) -> "OpponentInfo":
        return cls(type="", character="", model_path="", difficulty="")


@dataclass
class MatchRecord:
    opponent: OpponentInfo
    player_character: str
    winner: str
    score: int
    special_moves: tuple[int, int]
    regular_attacks: tuple[int, int]
    projectiles: tuple[int, int]
    mean_distance_norm: float
    steps: int
    round_frames: int
    started_at: float = field(default_factory=time.time)
    finished_at: float = 0.0
    feedback: str = ""
    replay: Optional[dict] = None

    def __post_init__(self):
        if self.winner not in WINNERS:
            raise ValueError(f"winner must be one of {WINNERS}, got {self.winner!r}")
        if not 0 <= self.score <= 100:
            raise ValueError(f"score must be in [0, 100], got {self.score}")

    def to_dict(self) -> dict:
        return {
            "opponent": self.opponent.to_dict(),
            "player_character": self.player_character,
            "winner": self.winner,
            "score": self.score,
            "special_moves": list(self.special_moves),
            "regular_attacks": list(self.regular_attacks),
            "projectiles": list(self.projectiles),
            "mean_distance_norm": self.mean_distance_norm,
            "steps": self.steps,
            "round_frames": self.round_frames,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "feedback": self.feedback,
            "replay": self.replay,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MatchRecord":
        return cls(
            opponent=OpponentInfo.from_dict(d["opponent"]),
            player_character=d["player_character"],
            winner=d["winner"],
            score=int(d["score"]),
            special_moves=tuple(d["special_moves"]),
            regular_attacks=tuple(d["regular_attacks"]),
            projectiles=tuple(d["projectiles"]),
            mean_distance_norm=float(d["mean_distance_norm"]),
            steps=int(d["steps"]),
            round_frames=int(d["round_frames"]),
            started_at=float(d["started_at"]),
            finished_at=float(d["finished_at"]),
            feedback=d["feedback"],
            replay=d.get("replay"),
        )


@dataclass
class PlayingData:
    current_character: str
    total_matches: int = 0
    total_wins: int = 0
    total_losses: int = 0
    current_win_streak: int = 0
    current_loss_streak: int = 0
    score_sum: int = 0
    special_moves_sum: int = 0
    faced_agents_times: dict = field(default_factory=dict)
    faced_characters_times: dict = field(default_factory=dict)
    the_last_opponents: OpponentInfo = field(default_factory=OpponentInfo.empty)
    feedback: str = ""

    @property
    def win_rate(self) -> float:
        return self.total_wins / max(1, self.total_matches)

    @property
    def average_score(self) -> float:
        return self.score_sum / max(1, self.total_matches)

    @property
    def average_special_moves(self) -> float:
        return self.special_moves_sum / max(1, self.total_matches)

    def to_dict(self) -> dict:
        """The exact key set the selection prompt and the HTTP surface emit."""
        return {
            "current_character": self.current_character,
            "total_matches": self.total_matches,
            "win_rate": self.win_rate,
            "total_wins": self.total_wins,
            "total_losses": self.total_losses,
            "current_win_streak": self.current_win_streak,
            "current_loss_streak": self.current_loss_streak,
            "average_score_per_match": f"{round(self.average_score)}/100",
            "average_special_moves_per_match": self.average_special_moves,
            "faced_agents_times": dict(self.faced_agents_times),
            "faced_characters_times": dict(self.faced_characters_times),
            "the_last_opponents": self.the_last_opponents.to_dict(),
            "player's_feedback": self.feedback,
        }

    def dump(self) -> dict:
        """Lossless internal form for persistence (keeps the raw sums)."""
        return {
            "current_character": self.current_character,
            "total_matches": self.total_matches,
            "total_wins": self.total_wins,
            "total_losses": self.total_losses,
            "current_win_streak": self.current_win_streak,
            "current_loss_streak": self.current_loss_streak,
            "score_sum": self.score_sum,
            "special_moves_sum": self.special_moves_sum,
            "faced_agents_times": dict(self.faced_agents_times),
            "faced_characters_times": dict(self.faced_characters_times),
            "the_last_opponents": self.the_last_opponents.to_dict(),
            "feedback": self.feedback,
        }

    @classmethod
    def restore(cls, d: dict) -> "PlayingData":
        return cls(
            current_character=d["current_character"],
            total_matches=int(d["total_matches"]),
            total_wins=int(d["total_wins"]),
            total_losses=int(d["total_losses"]),
            current_win_streak=int(d["current_win_streak"]),
            current_loss_streak=int(d["current_loss_streak"]),
            score_sum=int(d["score_sum"]),
            special_moves_sum=int(d["special_moves_sum"]),
            faced_agents_times=dict(d["faced_agents_times"]),
            faced_characters_times=dict(d["faced_characters_times"]),
            the_last_opponents=OpponentInfo.from_dict(d["the_last_opponents"]),
            feedback=d["feedback"],
        )


def new_playing_data(character: str, roster_names: list[str]) -> PlayingData:
    """Zeroed record: every agent type and every roster character appears in
    the faced maps from the start, so consumers see the full key space."""
    return PlayingData(
        current_character=character,
        faced_agents_times={t: 0 for t in AGENT_TYPES},
        faced_characters_times={name: 0 for name in roster_names},
    )


def update_playing_data(data: PlayingData, record: MatchRecord) -> PlayingData:
    """Fold one finished match into the record. Pure; returns a new value.

    A draw counts as a played match and breaks both streaks. The averages
    advance through raw sums, so folding records one at a time agrees
    exactly with recomputing over the whole history.
    """
    wins = data.total_wins + (record.winner == "player")
    losses = data.total_losses + (record.winner == "agent")
    if record.winner == "player":
        win_streak, loss_streak = data.current_win_streak + 1, 0
    elif record.winner == "agent":
        win_streak, loss_streak = 0, data.current_loss_streak + 1
    else:
        win_streak, loss_streak = 0, 0
    faced_agents = dict(data.faced_agents_times)
    faced_agents[record.opponent.type] = faced_agents.get(record.opponent.type, 0) + 1
    faced_chars = dict(data.faced_characters_times)
    faced_chars[record.opponent.character] = faced_chars.get(record.opponent.character, 0) + 1
    return replace(
        data,
        total_matches=data.total_matches + 1,
        total_wins=wins,
        total_losses=losses,
        current_win_streak=win_streak,
        current_loss_streak=loss_streak,
        score_sum=data.score_sum + record.score,
        special_moves_sum=data.special_moves_sum + record.special_moves[0],
        faced_agents_times=faced_agents,
        faced_characters_times=faced_chars,
        the_last_opponents=record.opponent,
        feedback=record.feedback,
    )
