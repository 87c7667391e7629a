"""Parallel-environment rollout collection with GAE.

Each runner owns one environment plus its opponent (scripted AI for PvE,
a sampled historical checkpoint for self-play). The learner always
consumes egocentric views, so one set of weights plays either spawn side;
LEFT/RIGHT outputs are swapped back before stepping a side-1 agent.

Frames are stored as exact sixteenths in uint8: every painted intensity
is a multiple of 1/16, so encode/decode is lossless.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import torch

from ..env import FightingEnv, build_observations, mirror_buttons
from ..env.observe import Observation, egocentric
from ..policy import PolicyNet, batch_observations, load_checkpoint, sample_action
from ..rewards import RewardTerms, compute
from .builtin_ai import builtin_ai_policy
from .tasks import PolicyPool, TaskAssignment

IMG_SCALE = 16  # all rendered intensities are multiples of 1/16


def encode_frames(images: np.ndarray) -> np.ndarray:
    return np.round(images * IMG_SCALE).astype(np.uint8)


def decode_frames(stored: torch.Tensor) -> torch.Tensor:
    return stored.float() / IMG_SCALE


class OpponentCache:
    """Loads pool checkpoints at most once per training run."""

    def __init__(self):
        self._nets: dict[str, PolicyNet] = {}

    def get(self, path: str) -> PolicyNet:
        if path not in self._nets:
            net, _ = load_checkpoint(path)
            net.eval()
            self._nets[path] = net
        return self._nets[path]


class EnvRunner:
    def __init__(self, assignment: TaskAssignment, reward_terms: RewardTerms,
                 pool: PolicyPool, cache: OpponentCache, rng: np.random.Generator,
                 roster=None, round_frames: Optional[int] = None):
        self.assignment = assignment
        self.terms = reward_terms
        self.pool = pool
        self.cache = cache
        self.rng = rng
        kwargs = {}
        if round_frames is not None:
            kwargs["round_frames"] = round_frames
        self.env = FightingEnv(roster=roster, **kwargs)
        self.agent_idx = 1 if assignment.flipped else 0
        self.opp_idx = 1 - self.agent_idx
        self.opp_net: Optional[PolicyNet] = None
        self.episode_return = 0.0
        self.finished_returns: list[float] = []
        self._first_episode = True
        self._reset()

    def _reset(self) -> None:
        agent_char, opp_char = self.assignment.characters
        if self.assignment.flipped:
            self.env.reset(opp_char, agent_char, "right")
        else:
            self.env.reset(agent_char, opp_char, "left")
        if self.assignment.mode == "self_play":
            # first episode honors the assigned opponent; later episodes
            # resample so one iteration sweeps many historical selves
            entry = self.assignment.opponent
            if not self._first_episode or entry is None:
                entry = self.pool.sample(self.rng)
            self.opp_net = self.cache.get(entry.path)
        self._first_episode = False
        self.episode_return = 0.0

    def views(self) -> tuple[Observation, Optional[Observation]]:
        o0, o1 = build_observations(self.env)
        pair = (o0, o1)
        agent_view = egocentric(pair[self.agent_idx], self.agent_idx)
        opp_view = None
        if self.opp_net is not None:
            opp_view = egocentric(pair[self.opp_idx], self.opp_idx)
        return agent_view, opp_view

    def opp_buttons_builtin(self) -> np.ndarray:
        if self.assignment.mode != "pve":
            raise RuntimeError("builtin opponent requested for a self-play task")
        return builtin_ai_policy(
            self.env.state, self.opp_idx, self.env.roster, self.assignment.pve_level
        )

    def step(self, agent_buttons: np.ndarray, opp_buttons: np.ndarray) -> tuple[float, bool]:
        a = mirror_buttons(agent_buttons) if self.agent_idx == 1 else agent_buttons
        _, _, info, done = self.env.step(a, opp_buttons)
        reward, _ = compute(info[self.agent_idx], self.terms)
        self.episode_return += reward
        if done:
            self.finished_returns.append(self.episode_return)
            self._reset()
        return reward, done


@dataclass
class RolloutBuffer:
    images: np.ndarray  # uint8 (T, E, 3, 84, 84), sixteenths
    scalars: np.ndarray  # float32 (T, E, 35)
    history: np.ndarray  # uint8 (T, E, 100, 12)
    history_len: np.ndarray  # int64 (T, E)
    actions: np.ndarray  # uint8 (T, E, 12)
    log_probs: np.ndarray  # float64 (T, E)
    values: np.ndarray  # float32 (T, E)
    rewards: np.ndarray  # float32 (T, E)
    dones: np.ndarray  # bool (T, E)
    advantages: np.ndarray  # float32 (T, E)
    returns: np.ndarray  # float32 (T, E)

    @classmethod
    def allocate(cls, n_steps: int, n_envs: int) -> "RolloutBuffer":
        shape = (n_steps, n_envs)
        return cls(
            images=np.zeros(shape + (3, 84, 84), dtype=np.uint8),
            scalars=np.zeros(shape + (35,), dtype=np.float32),
            history=np.zeros(shape + (100, 12), dtype=np.uint8),
            history_len=np.zeros(shape, dtype=np.int64),
            actions=np.zeros(shape + (12,), dtype=np.uint8),
            log_probs=np.zeros(shape, dtype=np.float64),
            values=np.zeros(shape, dtype=np.float32),
            rewards=np.zeros(shape, dtype=np.float32),
            dones=np.zeros(shape, dtype=bool),
            advantages=np.zeros(shape, dtype=np.float32),
            returns=np.zeros(shape, dtype=np.float32),
        )

    def __len__(self) -> int:
        return self.rewards.size

    def compute_gae(self, last_values: np.ndarray, gamma: float, lam: float) -> None:
        """Backward GAE sweep. dones[t] means the episode ended at step t,
        so nothing propagates across the following reset."""
        n_steps = self.rewards.shape[0]
        next_adv = np.zeros_like(last_values, dtype=np.float64)
        next_values = last_values.astype(np.float64)
        for t in range(n_steps - 1, -1, -1):
            nonterminal = 1.0 - self.dones[t].astype(np.float64)
            delta = self.rewards[t] + gamma * next_values * nonterminal - self.values[t]
            next_adv = delta + gamma * lam * nonterminal * next_adv
            self.advantages[t] = next_adv
            next_values = self.values[t].astype(np.float64)
        self.returns[:] = self.advantages + self.values

    def flat_indices(self) -> np.ndarray:
        return np.arange(len(self))

    def gather(self, idx: np.ndarray):
        t, e = np.unravel_index(idx, self.rewards.shape)
        images = decode_frames(torch.from_numpy(self.images[t, e]))
        scalars = torch.from_numpy(self.scalars[t, e])
        history = torch.from_numpy(self.history[t, e]).float()
        lengths = torch.from_numpy(self.history_len[t, e])
        actions = torch.from_numpy(self.actions[t, e]).float()
        old_log_probs = torch.from_numpy(self.log_probs[t, e]).float()
        advantages = torch.from_numpy(self.advantages[t, e])
        returns = torch.from_numpy(self.returns[t, e])
        return images, scalars, history, lengths, actions, old_log_probs, advantages, returns


def collect_rollouts(policy: PolicyNet, runners: Sequence[EnvRunner], n_steps: int,
                     rng: np.random.Generator, gamma: float, lam: float) -> RolloutBuffer:
    policy.eval()
    n_envs = len(runners)
    buf = RolloutBuffer.allocate(n_steps, n_envs)
    for t in range(n_steps):
        agent_views = []
        opp_groups: dict[int, list[tuple[int, Observation]]] = {}
        nets_by_id: dict[int, PolicyNet] = {}
        for i, runner in enumerate(runners):
            av, ov = runner.views()
            agent_views.append(av)
            if ov is not None:
                net = runner.opp_net
                opp_groups.setdefault(id(net), []).append((i, ov))
                nets_by_id[id(net)] = net

        images, scalars, history, lengths = batch_observations(agent_views)
        with torch.no_grad():
            probs, values = policy(images, scalars, history, lengths)
        probs_np = probs.numpy().astype(np.float64)

        opp_buttons: dict[int, np.ndarray] = {}
        for net_id, members in opp_groups.items():
            net = nets_by_id[net_id]
            oi, os_, oh, ol = batch_observations([ov for _, ov in members])
            with torch.no_grad():
                oprobs, _ = net(oi, os_, oh, ol)
            oprobs_np = oprobs.numpy().astype(np.float64)
            for row, (i, _) in enumerate(members):
                runner = runners[i]
                raw, _ = sample_action(oprobs_np[row], runner.rng)
                if runner.opp_idx == 1:
                    raw = mirror_buttons(raw)
                opp_buttons[i] = raw

        for i, runner in enumerate(runners):
            buttons, lp = sample_action(probs_np[i], rng)
            ob = opp_buttons.get(i)
            if ob is None:
                ob = (runner.opp_buttons_builtin() if runner.assignment.mode == "pve"
                      else np.zeros(12, dtype=np.uint8))
            reward, done = runner.step(buttons, ob)
            av = agent_views[i]
            buf.images[t, i] = encode_frames(av.image)
            buf.scalars[t, i] = av.scalars
            buf.history[t, i] = av.action_history.astype(np.uint8)
            buf.history_len[t, i] = av.history_len
            buf.actions[t, i] = buttons
            buf.log_probs[t, i] = lp
            buf.values[t, i] = float(values[i])
            buf.rewards[t, i] = reward
            buf.dones[t, i] = done

    final_views = [runner.views()[0] for runner in runners]
    images, scalars, history, lengths = batch_observations(final_views)
    with torch.no_grad():
        _, last_values = policy(images, scalars, history, lengths)
    buf.compute_gae(last_values.numpy(), gamma, lam)
    return buf
