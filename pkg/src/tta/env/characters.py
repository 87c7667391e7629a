"""Character roster: frame data, special-move motions, roster file IO.

The roster ships as a versioned JSON document so adding characters is a data
change.  Combat numbers (damage, frame counts, speeds) are artifact constants;
speeds and impulses must stay dyadic (multiples of 1/256) to preserve exact
simulation arithmetic.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

ROSTER_SPEC_VERSION = 1

# Relative direction bits used by motion patterns and the command buffer.
DIR_UP = 1
DIR_DOWN = 2
DIR_BACK = 4
DIR_FORWARD = 8

_DIR_NAMES = {"UP": DIR_UP, "DOWN": DIR_DOWN, "BACK": DIR_BACK, "FORWARD": DIR_FORWARD}


def parse_direction(name: str) -> int:
    """Parse e.g. "DOWN" or "DOWN+FORWARD" into a direction bitmask."""
    bits = 0
    for part in name.split("+"):
        part = part.strip().upper()
        if part not in _DIR_NAMES:
            raise ValueError(f"unknown direction component: {part!r}")
        bits |= _DIR_NAMES[part]
    return bits


def direction_name(bits: int) -> str:
    parts = [n for n, b in _DIR_NAMES.items() if bits & b]
    return "+".join(parts) if parts else "NEUTRAL"


@dataclass(frozen=True)
class NormalAttack:
    button: str  # LP/MP/HP/LK/MK/HK
    startup: int
    active: int
    recovery: int
    damage: int
    reach: float

    def total_frames(self) -> int:
        return self.startup + self.active + self.recovery


@dataclass(frozen=True)
class SpecialMove:
    move_id: str
    motion: tuple[int, ...]  # ordered direction requirements; empty for charge moves
    trigger: str  # "punch" | "kick"
    damage: int
    startup: int
    active: int
    recovery_frames: int  # helpless after the active window ends
    reach: float
    invincibility_frames: int = 0
    spawns_projectile: bool = False
    projectile_speed: float = 0.0
    charge_frames: int = 0  # > 0 marks a charge motion (hold BACK, then FORWARD+trigger)
    unblockable: bool = False

    def is_charge(self) -> bool:
        return self.charge_frames > 0


@dataclass(frozen=True)
class CharacterSpec:
    character_id: int
    name: str
    max_hp: int
    walk_speed: float
    jump_impulse: float
    normals: tuple[NormalAttack, ...]
    specials: tuple[SpecialMove, ...]

    def normal_for(self, button: str) -> Optional[NormalAttack]:
        for n in self.normals:
            if n.button == button:
                return n
        return None


class RosterError(ValueError):
    pass


def _normals(damage_scale: int = 0, reach_scale: float = 0.0) -> list[dict]:
    base = [
        ("LP", 3, 3, 6, 5, 28.0),
        ("MP", 5, 3, 9, 8, 30.0),
        ("HP", 7, 4, 14, 12, 32.0),
        ("LK", 4, 3, 7, 5, 32.0),
        ("MK", 6, 3, 10, 8, 34.0),
        ("HK", 8, 4, 15, 12, 38.0),
    ]
    return [
        {
            "button": b,
            "startup": s,
            "active": a,
            "recovery": r,
            "damage": d + damage_scale,
            "reach": reach + reach_scale,
        }
        for b, s, a, r, d, reach in base
    ]


# The four archetypes: quarter-circle projectile, dragon-punch anti-air,
# charge, and grappler.  Motions are short on purpose: two direction stages
# plus a rising-edge trigger is executable by both humans and the recurrent
# policy, while still requiring a temporally ordered input sequence.
BUILTIN_ROSTER: dict = {
    "spec_version": ROSTER_SPEC_VERSION,
    "characters": [
        {
            "character_id": 0,
            "name": "Kazan",
            "max_hp": 176,
            "walk_speed": 1.75,
            "jump_impulse": 7.0,
            "normals": _normals(),
            "specials": [
                {
                    "move_id": "flame_wave",
                    "motion": ["DOWN", "FORWARD"],
                    "trigger": "punch",
                    "damage": 12,
                    "startup": 10,
                    "active": 2,
                    "recovery_frames": 22,
                    "reach": 0.0,
                    "spawns_projectile": True,
                    "projectile_speed": 3.0,
                }
            ],
        },
        {
            "character_id": 1,
            "name": "Riko",
            "max_hp": 176,
            "walk_speed": 2.0,
            "jump_impulse": 7.5,
            "normals": _normals(reach_scale=-2.0),
            "specials": [
                {
                    "move_id": "sky_piercer",
                    "motion": ["FORWARD", "DOWN"],
                    "trigger": "punch",
                    "damage": 16,
                    "startup": 4,
                    "active": 10,
                    "recovery_frames": 26,
                    "reach": 30.0,
                    "invincibility_frames": 10,
                }
            ],
        },
        {
            "character_id": 2,
            "name": "Volt",
            "max_hp": 176,
            "walk_speed": 1.5,
            "jump_impulse": 7.0,
            "normals": _normals(damage_scale=1),
            "specials": [
                {
                    "move_id": "arc_bolt",
                    "motion": ["FORWARD"],
                    "trigger": "punch",
                    "damage": 14,
                    "startup": 8,
                    "active": 2,
                    "recovery_frames": 16,
                    "reach": 0.0,
                    "spawns_projectile": True,
                    "projectile_speed": 4.0,
                    "charge_frames": 45,
                }
            ],
        },
        {
            "character_id": 3,
            "name": "Gorn",
            "max_hp": 176,
            "walk_speed": 1.25,
            "jump_impulse": 6.5,
            "normals": _normals(damage_scale=2, reach_scale=-4.0),
            "specials": [
                {
                    "move_id": "vice_grip",
                    "motion": ["FORWARD", "BACK"],
                    "trigger": "punch",
                    "damage": 22,
                    "startup": 5,
                    "active": 4,
                    "recovery_frames": 30,
                    "reach": 22.0,
                    "unblockable": True,
                }
            ],
        },
    ],
}


def _special_from_dict(d: dict) -> SpecialMove:
    motion = tuple(parse_direction(m) for m in d.get("motion", []))
    sm = SpecialMove(
        move_id=d["move_id"],
        motion=motion,
        trigger=d["trigger"],
        damage=int(d["damage"]),
        startup=int(d["startup"]),
        active=int(d["active"]),
        recovery_frames=int(d["recovery_frames"]),
        reach=float(d.get("reach", 0.0)),
        invincibility_frames=int(d.get("invincibility_frames", 0)),
        spawns_projectile=bool(d.get("spawns_projectile", False)),
        projectile_speed=float(d.get("projectile_speed", 0.0)),
        charge_frames=int(d.get("charge_frames", 0)),
        unblockable=bool(d.get("unblockable", False)),
    )
    if sm.recovery_frames < 1:
        raise RosterError(f"{sm.move_id}: special moves must have recovery_frames >= 1")
    if sm.damage <= 0:
        raise RosterError(f"{sm.move_id}: damage must be positive")
    if sm.charge_frames < 0 or (d.get("charge_frames") is not None and sm.is_charge() and sm.charge_frames < 1):
        raise RosterError(f"{sm.move_id}: charge_frames must be >= 1 for charge motions")
    if sm.trigger not in ("punch", "kick"):
        raise RosterError(f"{sm.move_id}: trigger must be 'punch' or 'kick'")
    return sm


def _character_from_dict(d: dict) -> CharacterSpec:
    normals = tuple(
        NormalAttack(
            button=n["button"],
            startup=int(n["startup"]),
            active=int(n["active"]),
            recovery=int(n["recovery"]),
            damage=int(n["damage"]),
            reach=float(n["reach"]),
        )
        for n in d["normals"]
    )
    return CharacterSpec(
        character_id=int(d["character_id"]),
        name=d["name"],
        max_hp=int(d["max_hp"]),
        walk_speed=float(d["walk_speed"]),
        jump_impulse=float(d["jump_impulse"]),
        normals=normals,
        specials=tuple(_special_from_dict(s) for s in d.get("specials", [])),
    )


def roster_from_dict(doc: dict) -> list[CharacterSpec]:
    if doc.get("spec_version") != ROSTER_SPEC_VERSION:
        raise RosterError(f"unsupported roster spec_version: {doc.get('spec_version')!r}")
    chars = [_character_from_dict(c) for c in doc["characters"]]
    ids = [c.character_id for c in chars]
    if ids != list(range(len(chars))):
        raise RosterError(f"character ids must be 0..{len(chars) - 1} in order, got {ids}")
    return chars


def load_roster(path: Optional[str | Path] = None) -> list[CharacterSpec]:
    """Load the character roster; the built-in roster when no path is given."""
    if path is None:
        return roster_from_dict(BUILTIN_ROSTER)
    with open(path, encoding="utf-8") as fh:
        return roster_from_dict(json.load(fh))


def write_roster(path: str | Path) -> None:
    Path(path).write_text(json.dumps(BUILTIN_ROSTER, indent=2) + "\n", encoding="utf-8")


def roster_names(roster: Optional[list[CharacterSpec]] = None) -> list[str]:
    return [c.name for c in (roster or load_roster())]
