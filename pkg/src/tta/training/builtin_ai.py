"""Deterministic scripted opponent for PvE training tasks.

A pure function of the game state: approach when far, attack in reach,
block a share of incoming attacks, and run a per-character input macro
that lands the character's special move. All branching keys off
frame_count, so identical states always produce identical buttons.
"""

from __future__ import annotations

import numpy as np

from ..env.characters import BUILTIN_ROSTER, CharacterSpec, SpecialMove
from ..env.engine import FRAMES_PER_STEP
from ..env.types import (
    B_DOWN,
    B_LEFT,
    B_LP,
    B_MK,
    B_MP,
    B_RIGHT,
    B_UP,
    BUTTONS,
    N_BUTTONS,
    GameState,
    Status,
)
from ..env.characters import DIR_BACK, DIR_DOWN, DIR_FORWARD, DIR_UP

CONTROLLABLE = {Status.IDLE, Status.WALKING, Status.CROUCHING, Status.BLOCKING}
MACRO_PERIODS = (64, 40, 28)  # steps between special attempts per level
WIND_DOWN_STEPS = 8  # idle tail before each macro window; outlasts any normal
SPECIAL_RANGE = 120.0
CHARGE_READY = 48
ATTACK_CYCLE = (B_LP, B_MK, B_MP, B_LP)


def _dir_buttons(code: int, forward_btn: int, back_btn: int) -> list[int]:
    out = []
    if code & DIR_UP:
        out.append(B_UP)
    if code & DIR_DOWN:
        out.append(B_DOWN)
    if code & DIR_FORWARD:
        out.append(forward_btn)
    if code & DIR_BACK:
        out.append(back_btn)
    return out


def _motion_macro(move: SpecialMove, trigger_btn: int) -> list[list[int]]:
    """Decision-step script: hold each motion direction one step, then the
    trigger together with the final direction. Codes are relative; the
    caller maps FORWARD/BACK onto LEFT/RIGHT."""
    steps = [[("dir", code)] for code in move.motion]
    steps.append([("dir", move.motion[-1]), ("btn", trigger_btn)])
    return steps


def builtin_ai_policy(state: GameState, side: int, roster: dict | None = None,
                      level: int = 1) -> np.ndarray:
    roster = roster or BUILTIN_ROSTER
    level = min(max(level, 0), len(MACRO_PERIODS) - 1)
    me = state.fighters[side]
    opp = state.fighters[1 - side]
    spec: CharacterSpec = roster[me.character_id]
    buttons = np.zeros(N_BUTTONS, dtype=np.uint8)
    if me.status not in CONTROLLABLE or state.done:
        return buttons

    forward_btn = B_RIGHT if opp.x >= me.x else B_LEFT
    back_btn = B_LEFT if forward_btn == B_RIGHT else B_RIGHT
    dx = abs(opp.x - me.x)
    step_idx = state.frame_count // FRAMES_PER_STEP
    period = MACRO_PERIODS[level]
    phase = step_idx % period

    move = spec.specials[0] if spec.specials else None
    if move is not None and move.is_charge():
        # hold back until charged, then release forward with the trigger;
        # staying on BACK once charging has begun rides out the retreat
        # drift, otherwise the counter resets the moment range reopens
        if me.charge_counter >= CHARGE_READY:
            buttons[forward_btn] = 1
            buttons[B_LP] = 1
            return buttons
        if dx <= SPECIAL_RANGE or me.charge_counter > 0:
            buttons[back_btn] = 1
            return buttons
    elif move is not None:
        macro = _motion_macro(move, B_LP)
        if phase < len(macro) and dx <= SPECIAL_RANGE:
            for kind, val in macro[phase]:
                if kind == "dir":
                    for b in _dir_buttons(val, forward_btn, back_btn):
                        buttons[b] = 1
                else:
                    buttons[val] = 1
            return buttons
        if phase >= period - WIND_DOWN_STEPS:
            # let any running attack finish so the next macro window starts
            # from a controllable state; close distance if badly out of range
            if dx > 100.0:
                buttons[forward_btn] = 1
            return buttons

    opp_attacking = opp.attack_kind is not None and opp.status == Status.ATTACKING
    if opp_attacking and dx <= 80.0:
        # level k blocks k+1 of every 4 threat windows
        if step_idx % 4 < level + 1:
            buttons[back_btn] = 1
            buttons[B_DOWN] = 1
            return buttons

    in_reach = [n for n in spec.normals if dx <= n.reach - 1.0]
    if in_reach:
        cycle_name = BUTTONS[ATTACK_CYCLE[step_idx % len(ATTACK_CYCLE)]]
        chosen = next((n for n in in_reach if n.button == cycle_name), None)
        if chosen is None:
            chosen = max(in_reach, key=lambda n: n.reach)
        buttons[BUTTONS.index(chosen.button)] = 1
        return buttons

    buttons[forward_btn] = 1
    return buttons
