"""Core state types for the fighting environment.

All positions/velocities are kept as dyadic floats (multiples of 1/256) so
that frame updates incur no floating-point rounding.  This is what makes the
mirror-symmetry and replay-determinism guarantees exact rather than
approximate.
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

# Button slot order. START/SELECT are accepted but masked before simulation.
BUTTONS = ("UP", "DOWN", "LEFT", "RIGHT", "LP", "MP", "HP", "LK", "MK", "HK", "START", "SELECT")
N_BUTTONS = 12
B_UP, B_DOWN, B_LEFT, B_RIGHT = 0, 1, 2, 3
B_LP, B_MP, B_HP, B_LK, B_MK, B_HK = 4, 5, 6, 7, 8, 9
B_START, B_SELECT = 10, 11
PUNCH_SLOTS = (B_LP, B_MP, B_HP)
KICK_SLOTS = (B_LK, B_MK, B_HK)
ATTACK_SLOTS = PUNCH_SLOTS + KICK_SLOTS

ButtonVector = tuple[bool, ...]  # length 12, slot order as in BUTTONS

NEUTRAL: ButtonVector = tuple(False for _ in range(N_BUTTONS))


def buttons_from_mask(mask: int) -> ButtonVector:
    if not 0 <= mask < (1 << N_BUTTONS):
        raise ValueError(f"button mask out of range: {mask}")
    return tuple(bool(mask >> i & 1) for i in range(N_BUTTONS))


def mask_from_buttons(buttons: ButtonVector) -> int:
    if len(buttons) != N_BUTTONS:
        raise ValueError(f"expected {N_BUTTONS} buttons, got {len(buttons)}")
    return sum(1 << i for i, b in enumerate(buttons) if b)


def mask_system_buttons(buttons: ButtonVector) -> ButtonVector:
    """Zero the START/SELECT slots; game logic never sees them."""
    if len(buttons) != N_BUTTONS:
        raise ValueError(f"expected {N_BUTTONS} buttons, got {len(buttons)}")
    return tuple(bool(b) and i not in (B_START, B_SELECT) for i, b in enumerate(buttons))


def mirror_buttons(buttons: ButtonVector) -> ButtonVector:
    """Swap LEFT/RIGHT, the input half of the side-mirror transform."""
    out = list(buttons)
    out[B_LEFT], out[B_RIGHT] = out[B_RIGHT], out[B_LEFT]
    return tuple(out)


class Status(Enum):
    IDLE = 0
    WALKING = 1
    CROUCHING = 2
    JUMPING = 3
    ATTACKING = 4
    BLOCKING = 5
    HITSTUN = 6
    STUNNED = 7
    SPECIAL_RECOVERY = 8


N_STATUSES = len(Status)

# Statuses during which the player has no control over the character.
VULNERABLE_STATUSES = frozenset({Status.HITSTUN, Status.STUNNED, Status.SPECIAL_RECOVERY})


@dataclass
class FighterState:
    character_id: int
    hp: int
    x: float
    y: float
    vx: float
    vy: float
    facing: int  # +1 faces right, -1 faces left
    status: Status = Status.IDLE
    status_frames_left: int = 0
    invincible_frames_left: int = 0
    charge_counter: int = 0
    # Attack bookkeeping (engine internals, part of the deterministic state).
    attack_kind: Optional[str] = None  # "normal" | "special"
    attack_ref: Optional[str] = None  # button name or special move id
    attack_frame: int = 0
    attack_hit: bool = False

    def copy(self) -> "FighterState":
        return replace(self)

    def airborne(self) -> bool:
        return self.y > 0.0

    def pack(self) -> bytes:
        return struct.pack(
            "<iiddddiiiii",
            self.character_id,
            self.hp,
            self.x,
            self.y,
            self.vx,
            self.vy,
            self.facing,
            self.status.value,
            self.status_frames_left,
            self.invincible_frames_left,
            self.charge_counter,
        ) + struct.pack(
            "<ii?",
            {"normal": 1, "special": 2}.get(self.attack_kind or "", 0),
            self.attack_frame,
            self.attack_hit,
        ) + (self.attack_ref or "").encode()


@dataclass
class Projectile:
    owner: int  # side index
    x: float
    y: float
    vx: float
    damage: int
    active: bool = True

    def copy(self) -> "Projectile":
        return replace(self)

    def pack(self) -> bytes:
        return struct.pack("<iddd i?", self.owner, self.x, self.y, self.vx, self.damage, self.active)


@dataclass
class GameState:
    fighters: list[FighterState]
    projectiles: list[Projectile]
    round_frames_left: int
    frame_count: int = 0
    done: bool = False
    winner: Optional[object] = None  # None | side index | "draw"

    def copy(self) -> "GameState":
        return GameState(
            fighters=[f.copy() for f in self.fighters],
            projectiles=[p.copy() for p in self.projectiles],
            round_frames_left=self.round_frames_left,
            frame_count=self.frame_count,
            done=self.done,
            winner=self.winner,
        )

    def state_hash(self) -> str:
        h = hashlib.sha256()
        for f in self.fighters:
            h.update(f.pack())
        h.update(struct.pack("<i", len(self.projectiles)))
        for p in self.projectiles:
            h.update(p.pack())
        winner_code = {None: 0, 0: 1, 1: 2, "draw": 3}[self.winner]
        h.update(struct.pack("<iii?", self.round_frames_left, self.frame_count, winner_code, self.done))
        return h.hexdigest()


@dataclass
class SideInfo:
    """Per-side slice of the step info record."""

    damage_dealt: int = 0
    damage_taken: int = 0
    damage_dealt_special: int = 0
    damage_dealt_projectile: int = 0
    special_move_triggered: bool = False
    projectile_triggered: bool = False
    regular_attack_triggered: bool = False
    jump_triggered: bool = False
    in_air: bool = False
    vulnerable_frames: int = 0
    distance_norm: float = 0.0
    round_over: bool = False
    won: Optional[bool] = None


@dataclass
class StepInfo:
    sides: tuple[SideInfo, SideInfo] = field(default_factory=lambda: (SideInfo(), SideInfo()))

    def __getitem__(self, side: int) -> SideInfo:
        return self.sides[side]
