"""Command-motion input parsing.

One entry per simulation frame goes into a per-fighter CommandBuffer: the
frame index, the relative direction code (FORWARD means toward the opponent),
and the set of button slots that went down on that frame. Special moves match
a direction pattern against the buffered window and must be terminated by a
trigger button rising edge on the current frame.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional, Sequence

from .characters import DIR_BACK, DIR_DOWN, DIR_FORWARD, DIR_UP, CharacterSpec
from .types import (
    B_DOWN,
    B_LEFT,
    B_RIGHT,
    B_UP,
    KICK_SLOTS,
    PUNCH_SLOTS,
    ButtonVector,
)

MOTION_WINDOW = 20
BUFFER_CAPACITY = 128


def direction_code(buttons: ButtonVector, facing: int) -> int:
    """Relative direction bitmask for one frame of input.

    Opposing cardinal presses cancel (neutral) so the code is unambiguous and
    the left/right mirror map preserves it exactly.
    """
    code = 0
    up, down = buttons[B_UP], buttons[B_DOWN]
    left, right = buttons[B_LEFT], buttons[B_RIGHT]
    if up and not down:
        code |= DIR_UP
    elif down and not up:
        code |= DIR_DOWN
    if left != right:
        toward_right = right
        forward = toward_right if facing > 0 else not toward_right
        code |= DIR_FORWARD if forward else DIR_BACK
    return code


def newly_pressed(prev: ButtonVector, cur: ButtonVector) -> frozenset[int]:
    """Slots with a rising edge between two consecutive frames."""
    return frozenset(i for i in range(len(cur)) if cur[i] and not prev[i])


class CommandBuffer:
    """Fixed-capacity ring of (frame, direction code, newly-pressed slots)."""

    def __init__(self, capacity: int = BUFFER_CAPACITY) -> None:
        if capacity < MOTION_WINDOW:
            raise ValueError("capacity below motion window")
        self.capacity = capacity
        self._entries: deque[tuple[int, int, frozenset[int]]] = deque(maxlen=capacity)

    def push(self, frame: int, code: int, pressed: frozenset[int]) -> None:
        if self._entries and frame <= self._entries[-1][0]:
            raise ValueError("frame indices must be strictly increasing")
        self._entries.append((frame, code, pressed))

    def window(self, current_frame: int, span: int = MOTION_WINDOW) -> list[tuple[int, int, frozenset[int]]]:
        lo = current_frame - span + 1
        return [e for e in self._entries if lo <= e[0] <= current_frame]

    def clear(self) -> None:
        self._entries.clear()

    def __len__(self) -> int:
        return len(self._entries)

    def last(self) -> Optional[tuple[int, int, frozenset[int]]]:
        return self._entries[-1] if self._entries else None


def collapse_runs(entries: Iterable[tuple[int, int, frozenset[int]]]) -> list[int]:
    """Collapse consecutive equal direction codes into one run each."""
    runs: list[int] = []
    for _, code, _ in entries:
        if not runs or runs[-1] != code:
            runs.append(code)
    return runs


def match_pattern(runs: Sequence[int], pattern: Sequence[int]) -> bool:
    """True iff pattern elements appear in order, each contained in a distinct
    later run. Containment: a run satisfies an element when it includes all of
    the element's direction bits, so DOWN+FORWARD counts for either DOWN or
    FORWARD."""
    i = 0
    for code in runs:
        if i < len(pattern) and code & pattern[i] == pattern[i]:
            i += 1
    return i == len(pattern)


def _trigger_slots(trigger: str) -> tuple[int, ...]:
    return PUNCH_SLOTS if trigger == "punch" else KICK_SLOTS


def detect_special(
    buffer: CommandBuffer,
    spec: CharacterSpec,
    current_frame: int,
    charge_counter: int = 0,
    span: int = MOTION_WINDOW,
) -> Optional[str]:
    """Return the first declared special whose motion completed this frame.

    The trigger button must be newly pressed on current_frame (held does not
    count); the direction pattern must appear in order inside the window
    ending at current_frame; charge motions additionally need charge_counter
    at or past the move's threshold.
    """
    last = buffer.last()
    if last is None or last[0] != current_frame:
        return None
    pressed = last[2]
    entries = buffer.window(current_frame, span)
    runs = collapse_runs(entries)
    for move in spec.specials:
        if not any(s in pressed for s in _trigger_slots(move.trigger)):
            continue
        if move.is_charge():
            if charge_counter < move.charge_frames:
                continue
            if not match_pattern(runs, move.motion):
                continue
            return move.move_id
        if match_pattern(runs, move.motion):
            return move.move_id
    return None
