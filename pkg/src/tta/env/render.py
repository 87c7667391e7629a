"""84x84 state rasterizer.

Pixel spans are computed with integer arithmetic over 1/256 arena units using
closed intervals on both sides, so a horizontally mirrored state renders to
the exact column-flipped image with channels 0/1 exchanged. Channel 0 holds
side 0's body and attack arm, channel 1 side 1's, and channel 2 the
projectiles (side-coded intensity) plus the HUD (hp bars and round timer).
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .characters import CharacterSpec, load_roster
from .types import GameState, Status

IMAGE_SIZE = 84
UNIT = 256  # sub-unit scale; every coordinate is a multiple of 1/256

ARENA_UNITS = 400 * UNIT
VIEW_HEIGHT_UNITS = 180 * UNIT

BODY_HALF_W = 12 * UNIT
BODY_HEIGHT = 56 * UNIT
CROUCH_HEIGHT = 36 * UNIT
ARM_HEIGHT_LO = 24 * UNIT
ARM_HEIGHT_HI = 34 * UNIT
PROJ_HALF = 6 * UNIT

# Intensity levels are dyadic so float32 storage represents them exactly and
# equality-based level swaps in the mirror map are safe.
BODY_LEVEL = 1.0
ARM_LEVEL = 0.75
PROJ_LEVELS = (0.875, 0.4375)  # by owning side; opposing projectiles never overlap
HP_BAR_LEVEL = 1.0
TIMER_LEVEL = 0.625

HP_BAR_ROWS = (2, 5)  # inclusive row span
HP_BAR_COLS = 39  # cells per side
TIMER_ROWS = (8, 10)
TIMER_HALF_MAX = 40
TIMER_FULL_FRAMES = 5940

_default_roster: Optional[list[CharacterSpec]] = None


def _roster() -> list[CharacterSpec]:
    global _default_roster
    if _default_roster is None:
        _default_roster = load_roster()
    return _default_roster


def _units(v: float) -> int:
    return int(v * UNIT)


def _span(a: int, b: int, total_units: int) -> tuple[int, int]:
    """Closed pixel range [lo, hi] covered by the closed unit interval [a, b]
    mapped over total_units; empty when lo > hi. The closed/closed convention
    is what makes mirrored spans land on mirrored pixels exactly."""
    if b < a:
        return 1, 0
    n = IMAGE_SIZE
    lo = max(0, -(-(n * a) // total_units) - 1)
    hi = min(n - 1, (n * b) // total_units)
    return lo, hi


def _col_span(a: int, b: int) -> tuple[int, int]:
    return _span(a, b, ARENA_UNITS)


def _row_span(a: int, b: int) -> tuple[int, int]:
    """Rows for the vertical unit interval [a, b] measured from the floor;
    row 83 is the bottom of the image."""
    lo, hi = _span(a, b, VIEW_HEIGHT_UNITS)
    if lo > hi:
        return 1, 0
    return IMAGE_SIZE - 1 - hi, IMAGE_SIZE - 1 - lo


def _paint(channel: np.ndarray, rows: tuple[int, int], cols: tuple[int, int], level: float) -> None:
    r0, r1 = rows
    c0, c1 = cols
    if r0 > r1 or c0 > c1:
        return
    region = channel[r0 : r1 + 1, c0 : c1 + 1]
    np.maximum(region, level, out=region)


def _attack_reach(state: GameState, side: int, roster: Sequence[CharacterSpec]) -> Optional[float]:
    f = state.fighters[side]
    if f.attack_kind is None:
        return None
    spec = roster[f.character_id]
    if f.attack_kind == "normal":
        attack = spec.normal_for(f.attack_ref or "")
        if attack is None:
            return None
        if not attack.startup <= f.attack_frame < attack.startup + attack.active:
            return None
        return attack.reach
    for m in spec.specials:
        if m.move_id == f.attack_ref:
            if m.spawns_projectile or m.reach <= 0:
                return None
            if not m.startup <= f.attack_frame < m.startup + m.active:
                return None
            return m.reach
    return None


def render(state: GameState, roster: Optional[Sequence[CharacterSpec]] = None) -> np.ndarray:
    """Deterministic 3x84x84 float32 image of a game state, values in [0,1]."""
    if roster is None:
        roster = _roster()
    img = np.zeros((3, IMAGE_SIZE, IMAGE_SIZE), dtype=np.float32)

    for side, f in enumerate(state.fighters):
        x = _units(f.x)
        y = _units(f.y)
        height = CROUCH_HEIGHT if f.status is Status.CROUCHING else BODY_HEIGHT
        cols = _col_span(x - BODY_HALF_W, x + BODY_HALF_W)
        rows = _row_span(y, y + height)
        _paint(img[side], rows, cols, BODY_LEVEL)

        reach = _attack_reach(state, side, roster)
        if reach is not None:
            r = _units(reach)
            if f.facing > 0:
                arm = _col_span(x + BODY_HALF_W, x + r)
            else:
                arm = _col_span(x - r, x - BODY_HALF_W)
            arm_rows = _row_span(y + ARM_HEIGHT_LO, y + ARM_HEIGHT_HI)
            _paint(img[side], arm_rows, arm, ARM_LEVEL)

    for p in state.projectiles:
        if not p.active:
            continue
        x = _units(p.x)
        y = _units(p.y)
        cols = _col_span(x - PROJ_HALF, x + PROJ_HALF)
        rows = _row_span(y - PROJ_HALF, y + PROJ_HALF)
        _paint(img[2], rows, cols, PROJ_LEVELS[p.owner])

    r0, r1 = HP_BAR_ROWS
    for side, f in enumerate(state.fighters):
        max_hp = roster[f.character_id].max_hp
        n = (f.hp * HP_BAR_COLS + max_hp - 1) // max_hp if f.hp > 0 else 0
        if n <= 0:
            continue
        if side == 0:
            c0, c1 = 2, 2 + n - 1
        else:
            c0, c1 = IMAGE_SIZE - 1 - 2 - (n - 1), IMAGE_SIZE - 1 - 2
        _paint(img[2], (r0, r1), (c0, c1), HP_BAR_LEVEL)

    # Timer half-width shrinks with the clock; symmetric about the center seam.
    w = 0
    if state.round_frames_left > 0:
        w = min(TIMER_HALF_MAX, state.round_frames_left * TIMER_HALF_MAX // TIMER_FULL_FRAMES)
    mid_l = IMAGE_SIZE // 2 - 1
    mid_r = IMAGE_SIZE // 2
    _paint(img[2], TIMER_ROWS, (mid_l - w, mid_r + w), TIMER_LEVEL)

    return img


def mirror_image(img: np.ndarray) -> np.ndarray:
    """The image the mirrored state must render to: columns flipped, body
    channels exchanged, projectile intensity levels swapped."""
    out = img[:, :, ::-1].copy()
    out[[0, 1]] = out[[1, 0]]
    ch2 = out[2]
    a, b = PROJ_LEVELS
    mask_a = ch2 == a
    mask_b = ch2 == b
    ch2[mask_a] = b
    ch2[mask_b] = a
    return out
