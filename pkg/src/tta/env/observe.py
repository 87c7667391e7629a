"""Observation assembly: image, scalar vector, and action history.

Scalars are egocentric so a mirrored matchup produces identical vectors on
the opposite side: positions are measured from the observer's own wall and
signed quantities are flipped for side 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .render import mirror_image, render
from .types import B_LEFT, B_RIGHT, N_BUTTONS, N_STATUSES

N_SCALARS = 35
HISTORY_STEPS = 100
CHAR_ONE_HOT = 4  # scalar layout is sized for the four-character roster
ARENA_WIDTH = 400.0
VIEW_HEIGHT = 180.0

MIRROR_COLUMNS = list(range(N_BUTTONS))
MIRROR_COLUMNS[B_LEFT], MIRROR_COLUMNS[B_RIGHT] = B_RIGHT, B_LEFT


@dataclass
class Observation:
    image: np.ndarray  # float32 (3, 84, 84)
    scalars: np.ndarray  # float32 (N_SCALARS,)
    action_history: np.ndarray  # float32 (HISTORY_STEPS, N_BUTTONS), oldest first
    history_len: int  # populated leading rows; the rest is start-of-episode padding


def _scalars(env, side: int) -> np.ndarray:
    st = env.state
    me = st.fighters[side]
    opp = st.fighters[1 - side]
    ego = 1.0 if side == 0 else -1.0
    v = np.zeros(N_SCALARS, dtype=np.float32)
    v[me.status.value] = 1.0
    v[N_STATUSES + opp.status.value] = 1.0
    base = 2 * N_STATUSES
    v[base + min(me.character_id, CHAR_ONE_HOT - 1)] = 1.0
    v[base + CHAR_ONE_HOT + min(opp.character_id, CHAR_ONE_HOT - 1)] = 1.0
    k = base + 2 * CHAR_ONE_HOT
    v[k + 0] = me.hp / env.roster[me.character_id].max_hp
    v[k + 1] = opp.hp / env.roster[opp.character_id].max_hp
    own_wall = me.x if side == 0 else ARENA_WIDTH - me.x
    opp_from_own_wall = opp.x if side == 0 else ARENA_WIDTH - opp.x
    v[k + 2] = own_wall / ARENA_WIDTH
    v[k + 3] = opp_from_own_wall / ARENA_WIDTH
    v[k + 4] = me.y / VIEW_HEIGHT
    v[k + 5] = opp.y / VIEW_HEIGHT
    v[k + 6] = (opp.x - me.x) / ARENA_WIDTH * ego
    v[k + 7] = me.facing * ego
    v[k + 8] = st.round_frames_left / env.round_frames
    return v


def _history(env, side: int) -> tuple[np.ndarray, int]:
    entries = env.history_arrays(side)
    hist = np.zeros((HISTORY_STEPS, N_BUTTONS), dtype=np.float32)
    for row, buttons in enumerate(entries):
        for b, on in enumerate(buttons):
            if on:
                hist[row, b] = 1.0
    return hist, len(entries)


def build_observation(env, side: int, image: np.ndarray) -> Observation:
    hist, length = _history(env, side)
    return Observation(
        image=image,
        scalars=_scalars(env, side),
        action_history=hist,
        history_len=length,
    )


def build_observations(env) -> tuple[Observation, Observation]:
    image = render(env.state, env.roster)
    return build_observation(env, 0, image), build_observation(env, 1, image)


def egocentric(obs: Observation, side: int) -> Observation:
    """Side-1 observations mirrored into side-0 frame of reference.

    The arena is exactly mirror-symmetric, so a side-1 player seeing the
    mirrored image and LEFT/RIGHT-swapped history is in the identical
    position as a side-0 player of the flipped matchup. A policy consuming
    egocentric views therefore plays both sides with one set of weights;
    its LEFT/RIGHT outputs must be swapped back before stepping side 1.
    """
    if side == 0:
        return obs
    hist = obs.action_history[:, MIRROR_COLUMNS]
    return Observation(
        image=mirror_image(obs.image),
        scalars=obs.scalars,
        action_history=np.ascontiguousarray(hist),
        history_len=obs.history_len,
    )
