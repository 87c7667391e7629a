"""Evaluation agents sharing one stateless act interface.

Agents never carry state between steps: recurrent context is re-read from
the environment's own action history, so a single agent object can serve
many concurrent matches. Randomness comes from per-match generators the
harness passes in, keeping results independent of match grouping.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
import torch

from ..env import mirror_buttons
from ..env.types import N_BUTTONS
from ..env.observe import Observation, egocentric
from ..policy import PolicyNet, batch_observations, sample_action
from ..training.builtin_ai import builtin_ai_policy

ActRequest = tuple[object, int, Observation, np.random.Generator]


class Agent:
    name = "agent"

    def act(self, env, side: int, view: Observation, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def act_batch(self, requests: Sequence[ActRequest]) -> list[np.ndarray]:
        return [self.act(env, side, view, rng) for env, side, view, rng in requests]


class NoopAgent(Agent):
    name = "noop"

    def act(self, env, side, view, rng):
        return np.zeros(N_BUTTONS, dtype=np.uint8)


class RandomAgent(Agent):
    """Uniform multi-binary policy: every button is a fair coin."""

    name = "random"

    def act(self, env, side, view, rng):
        return (rng.random(12) < 0.5).astype(np.uint8)


class BuiltinAgent(Agent):
    def __init__(self, level: int = 1):
        self.level = level
        self.name = f"builtin_l{level}"

    def act(self, env, side, view, rng):
        return builtin_ai_policy(env.state, side, env.roster, self.level)


class MacroAgent(Agent):
    """Replays a fixed button script indexed by the episode step counter,
    then stays neutral. Scripts are written in side-0 terms and mirrored
    for side 1."""

    name = "macro"

    def __init__(self, script: Sequence[np.ndarray]):
        self.script = [np.asarray(s, dtype=np.uint8) for s in script]

    def act(self, env, side, view, rng):
        step_idx = env.state.frame_count // env.frames_per_step
        if step_idx < len(self.script):
            buttons = self.script[step_idx]
            return mirror_buttons(buttons) if side == 1 else buttons.copy()
        return np.zeros(N_BUTTONS, dtype=np.uint8)


class PolicyAgent(Agent):
    """Trained network acting from egocentric views; samples each button
    from its Bernoulli probability (greedy=True thresholds at 0.5)."""

    def __init__(self, net: PolicyNet, name: str = "policy", greedy: bool = False):
        net.eval()
        self.net = net
        self.name = name
        self.greedy = greedy

    def _views(self, requests):
        return [egocentric(view, side) for _, side, view, _ in requests]

    def act_batch(self, requests: Sequence[ActRequest]) -> list[np.ndarray]:
        views = self._views(requests)
        images, scalars, history, lengths = batch_observations(views)
        with torch.no_grad():
            probs, _ = self.net(images, scalars, history, lengths)
        probs_np = probs.numpy().astype(np.float64)
        out = []
        for row, (_, side, _, rng) in enumerate(requests):
            if self.greedy:
                buttons = (probs_np[row] >= 0.5).astype(np.uint8)
            else:
                buttons, _ = sample_action(probs_np[row], rng)
            out.append(mirror_buttons(buttons) if side == 1 else buttons)
        return out

    def act(self, env, side, view, rng):
        return self.act_batch([(env, side, view, rng)])[0]


class HistoryAblatedAgent(PolicyAgent):
    """Recurrent branch ablated: the history is presented as empty, so the
    network's decision rests on the frame and scalars alone."""

    def __init__(self, net: PolicyNet, name: str = "history_ablated", greedy: bool = False):
        super().__init__(net, name=name, greedy=greedy)

    def _views(self, requests):
        views = []
        for _, side, view, _ in requests:
            ego = egocentric(view, side)
            views.append(
                Observation(
                    image=ego.image,
                    scalars=ego.scalars,
                    action_history=np.zeros_like(ego.action_history),
                    history_len=0,
                )
            )
        return views
