"""Modularized reward composition.

Fifteen scalar terms combine one side's per-step info into a shaped reward:
HP-differential terms, event bonuses, a signed distance term, and a cost
block that enters negatively. Seven built-in profiles give one named style
each; files with exactly the fifteen keys load as custom profiles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .env.types import SideInfo

TERM_FIELDS = (
    "reward_scale",
    "raw_reward_coefficient",
    "special_move_bonus",
    "projectile_bonus",
    "distance_bonus",
    "special_move_reward",
    "projectile_reward",
    "distance_reward",
    "in_air_reward",
    "time_reward",
    "cost_coefficient",
    "special_move_cost",
    "regular_attack_cost",
    "jump_cost",
    "vulnerable_frame_cost",
)


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class RewardTerms:
    reward_scale: float
    raw_reward_coefficient: float
    special_move_bonus: float
    projectile_bonus: float
    distance_bonus: float
    special_move_reward: float
    projectile_reward: float
    distance_reward: float
    in_air_reward: float
    time_reward: float
    cost_coefficient: float
    special_move_cost: float
    regular_attack_cost: float
    jump_cost: float
    vulnerable_frame_cost: float

    def __post_init__(self):
        if self.reward_scale == 0:
            raise ProfileError("reward_scale must be nonzero")

    @classmethod
    def from_dict(cls, d: dict) -> "RewardTerms":
        keys = set(d)
        expected = set(TERM_FIELDS)
        if keys != expected:
            missing = sorted(expected - keys)
            extra = sorted(keys - expected)
            raise ProfileError(f"profile keys mismatch: missing={missing} extra={extra}")
        return cls(**{k: float(d[k]) for k in TERM_FIELDS})

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in TERM_FIELDS}


@dataclass
class RewardBreakdown:
    """Unscaled per-component values; total applies reward_scale with
    cost_total entering negatively."""

    hp_raw: float = 0.0
    hp_special_bonus: float = 0.0
    hp_projectile_bonus: float = 0.0
    hp_distance_bonus: float = 0.0
    event_special: float = 0.0
    event_projectile: float = 0.0
    distance: float = 0.0
    in_air: float = 0.0
    time: float = 0.0
    cost_total: float = 0.0
    total: float = 0.0

    def component_sum(self) -> float:
        return (
            self.hp_raw
            + self.hp_special_bonus
            + self.hp_projectile_bonus
            + self.hp_distance_bonus
            + self.event_special
            + self.event_projectile
            + self.distance
            + self.in_air
            + self.time
            - self.cost_total
        )


def compute(info: SideInfo, terms: RewardTerms) -> tuple[float, RewardBreakdown]:
    """Reward for one side's step, with the per-component breakdown."""
    b = RewardBreakdown()
    b.hp_raw = terms.raw_reward_coefficient * (info.damage_dealt - info.damage_taken)
    b.hp_special_bonus = terms.special_move_bonus * info.damage_dealt_special
    b.hp_projectile_bonus = terms.projectile_bonus * info.damage_dealt_projectile
    b.hp_distance_bonus = terms.distance_bonus * info.distance_norm * info.damage_dealt
    b.event_special = terms.special_move_reward * (1.0 if info.special_move_triggered else 0.0)
    b.event_projectile = terms.projectile_reward * (1.0 if info.projectile_triggered else 0.0)
    b.distance = terms.distance_reward * (2.0 * info.distance_norm - 1.0)
    b.in_air = terms.in_air_reward * (1.0 if info.in_air else 0.0)
    b.time = terms.time_reward
    costs = (
        terms.special_move_cost * (1.0 if info.special_move_triggered else 0.0)
        + terms.regular_attack_cost * (1.0 if info.regular_attack_triggered else 0.0)
        + terms.jump_cost * (1.0 if info.jump_triggered else 0.0)
        + terms.vulnerable_frame_cost * info.vulnerable_frames
    )
    b.cost_total = terms.cost_coefficient * costs
    b.total = terms.reward_scale * b.component_sum()
    return b.total, b


# Appendix table, column per style. Field order matches TERM_FIELDS.
_P = {
    "default": (0.001, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    "special_move": (0.001, 1.0, 3.0, 1.0, 2.0, 10.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.05),
    "defensive": (0.001, 1.0, 1.0, 1.0, 0.0, 0.0, 10.0, 0.02, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    "air": (0.001, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.05, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    "newbie": (0.001, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 30.0, 0.0, 0.0, 0.0),
    "coward": (0.001, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.2, 0.0, 0.0, 3.0, 5.0, 1.0, 0.0, 0.0),
    "key_spamming": (0.001, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0, -3.0, 2.0, 0.0, 0.0),
}
# Aggressive style: default profile driven toward close range. Not one of the
# seven table styles; used by the archive's aggressive_type.
_P["aggressive"] = (0.001, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, -0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

BUILTIN_PROFILES: dict[str, RewardTerms] = {
    name: RewardTerms(**dict(zip(TERM_FIELDS, vals))) for name, vals in _P.items()
}
TABLE_PROFILES = ("default", "special_move", "defensive", "air", "newbie", "coward", "key_spamming")


def load_profile(name_or_path: str | Path) -> RewardTerms:
    """Resolve a built-in profile name or read a profile file."""
    name = str(name_or_path)
    if name in BUILTIN_PROFILES:
        return BUILTIN_PROFILES[name]
    path = Path(name_or_path)
    if not path.exists():
        raise ProfileError(f"unknown profile: {name!r} (builtins: {', '.join(sorted(BUILTIN_PROFILES))})")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ProfileError(f"malformed profile file {path}: {e}") from e
    if not isinstance(doc, dict):
        raise ProfileError(f"profile file {path} must hold a flat object")
    return RewardTerms.from_dict(doc)


def save_profile(terms: RewardTerms, path: str | Path) -> None:
    Path(path).write_text(json.dumps(terms.to_dict(), indent=2) + "\n")


def profile_names() -> list[str]:
    return sorted(BUILTIN_PROFILES)
