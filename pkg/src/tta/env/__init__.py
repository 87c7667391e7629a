"""Deterministic fighting-game environment."""

from .characters import (
    DIR_BACK,
    DIR_DOWN,
    DIR_FORWARD,
    DIR_UP,
    CharacterSpec,
    NormalAttack,
    RosterError,
    SpecialMove,
    load_roster,
    roster_names,
    write_roster,
)
from .engine import (
    ARENA_WIDTH,
    FRAMES_PER_STEP,
    ROUND_FRAMES_MAX,
    FightingEnv,
    RoundOverError,
    mirror_state,
)
from .motion import MOTION_WINDOW, CommandBuffer, detect_special, direction_code
from .observe import (
    HISTORY_STEPS,
    N_SCALARS,
    Observation,
    build_observation,
    build_observations,
)
from .render import IMAGE_SIZE, render
from .replay import ReplayRecord, load_replay, run_replay
from .types import (
    ATTACK_SLOTS,
    BUTTONS,
    N_BUTTONS,
    NEUTRAL,
    ButtonVector,
    FighterState,
    GameState,
    Projectile,
    SideInfo,
    Status,
    StepInfo,
    buttons_from_mask,
    mask_from_buttons,
    mirror_buttons,
)

__all__ = [
    "ARENA_WIDTH",
    "ATTACK_SLOTS",
    "BUTTONS",
    "ButtonVector",
    "CharacterSpec",
    "CommandBuffer",
    "DIR_BACK",
    "DIR_DOWN",
    "DIR_FORWARD",
    "DIR_UP",
    "FRAMES_PER_STEP",
    "FighterState",
    "FightingEnv",
    "GameState",
    "HISTORY_STEPS",
    "IMAGE_SIZE",
    "MOTION_WINDOW",
    "N_BUTTONS",
    "N_SCALARS",
    "NEUTRAL",
    "NormalAttack",
    "Observation",
    "Projectile",
    "ROUND_FRAMES_MAX",
    "ReplayRecord",
    "RosterError",
    "RoundOverError",
    "SideInfo",
    "SpecialMove",
    "Status",
    "StepInfo",
    "buttons_from_mask",
    "build_observation",
    "build_observations",
    "detect_special",
    "direction_code",
    "load_replay",
    "load_roster",
    "mask_from_buttons",
    "mirror_buttons",
    "mirror_state",
    "render",
    "roster_names",
    "run_replay",
    "write_roster",
]
