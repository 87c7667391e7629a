"""Actor-critic network: CNN over the frame, LSTM over the action history,
scalar concatenation, and twin MLP heads emitting 12 Bernoulli button
probabilities and a value estimate.

The LSTM re-reads the rolling history buffer each decision; no hidden state
is carried between steps. history_len masks pre-episode padding so empty
slots cannot influence the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import torch
import torch.nn as nn
from torch.nn.utils.rnn import pack_padded_sequence

from ..env.observe import Observation

IMAGE_SHAPE = (3, 84, 84)
N_BUTTONS = 12
HISTORY_STEPS = 100
SMALL_CNN_DIM = 256
RESNET_CNN_DIM = 512
PROB_EPS = 1e-6  # keeps sigmoid outputs strictly inside (0, 1) in float32
# Fresh policies press each button with this probability. A coin-flip prior
# holds ~6 of 12 buttons every step, which keeps the fighter locked in attack
# recovery and makes early exploration incoherent; a sparse prior leaves the
# fighter controllable most steps so movement and attacks register.
ACTOR_PRESS_PRIOR = 0.15


@dataclass(frozen=True)
class PolicySpec:
    cnn_arch: str = "small"
    cnn_feature_dim: int = SMALL_CNN_DIM
    scalar_dim: int = 35
    rnn_input_dim: int = N_BUTTONS
    rnn_hidden_dim: int = 128
    rnn_num_layers: int = 2
    rnn_dropout: float = 0.1
    actor_layers: tuple = (512, 256, 128, 128)
    critic_layers: tuple = (512, 256, 128, 128)
    history_length: int = HISTORY_STEPS
    n_buttons: int = N_BUTTONS
    image_shape: tuple = IMAGE_SHAPE

    def __post_init__(self):
        if self.cnn_arch not in ("small", "resnet18"):
            raise ValueError(f"unknown cnn_arch {self.cnn_arch!r}")
        if self.rnn_input_dim != self.n_buttons:
            raise ValueError("rnn input dim must equal the button count")

    @classmethod
    def small(cls) -> "PolicySpec":
        return cls()

    @classmethod
    def resnet18(cls) -> "PolicySpec":
        return cls(cnn_arch="resnet18", cnn_feature_dim=RESNET_CNN_DIM)

    def to_dict(self) -> dict:
        return {
            "cnn_arch": self.cnn_arch,
            "cnn_feature_dim": self.cnn_feature_dim,
            "scalar_dim": self.scalar_dim,
            "rnn_input_dim": self.rnn_input_dim,
            "rnn_hidden_dim": self.rnn_hidden_dim,
            "rnn_num_layers": self.rnn_num_layers,
            "rnn_dropout": self.rnn_dropout,
            "actor_layers": list(self.actor_layers),
            "critic_layers": list(self.critic_layers),
            "history_length": self.history_length,
            "n_buttons": self.n_buttons,
            "image_shape": list(self.image_shape),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolicySpec":
        return cls(
            cnn_arch=d["cnn_arch"],
            cnn_feature_dim=int(d["cnn_feature_dim"]),
            scalar_dim=int(d["scalar_dim"]),
            rnn_input_dim=int(d["rnn_input_dim"]),
            rnn_hidden_dim=int(d["rnn_hidden_dim"]),
            rnn_num_layers=int(d["rnn_num_layers"]),
            rnn_dropout=float(d["rnn_dropout"]),
            actor_layers=tuple(d["actor_layers"]),
            critic_layers=tuple(d["critic_layers"]),
            history_length=int(d["history_length"]),
            n_buttons=int(d["n_buttons"]),
            image_shape=tuple(d["image_shape"]),
        )


@dataclass
class ForwardOutput:
    action_probs: np.ndarray
    value: float


def _orthogonal(layer: nn.Module, gain: float) -> nn.Module:
    nn.init.orthogonal_(layer.weight, gain=gain)
    if layer.bias is not None:
        nn.init.constant_(layer.bias, 0.0)
    return layer


class SmallCNN(nn.Module):
    """Three-conv extractor sized for 84x84 frames."""

    def __init__(self, out_dim: int):
        super().__init__()
        self.net = nn.Sequential(
            _orthogonal(nn.Conv2d(3, 32, kernel_size=8, stride=4), math.sqrt(2)),
            nn.ReLU(),
            _orthogonal(nn.Conv2d(32, 64, kernel_size=4, stride=2), math.sqrt(2)),
            nn.ReLU(),
            _orthogonal(nn.Conv2d(64, 64, kernel_size=3, stride=1), math.sqrt(2)),
            nn.ReLU(),
            nn.Flatten(),
            _orthogonal(nn.Linear(64 * 7 * 7, out_dim), math.sqrt(2)),
            nn.ReLU(),
        )

    def forward(self, x):
        return self.net(x)


def _make_cnn(spec: PolicySpec) -> nn.Module:
    if spec.cnn_arch == "small":
        return SmallCNN(spec.cnn_feature_dim)
    from torchvision.models import resnet18

    net = resnet18(weights=None)
    if spec.cnn_feature_dim == RESNET_CNN_DIM:
        net.fc = nn.Identity()
    else:
        net.fc = _orthogonal(nn.Linear(RESNET_CNN_DIM, spec.cnn_feature_dim), math.sqrt(2))
    return net


def _make_head(in_dim: int, layers: Sequence[int], out_dim: int, out_gain: float) -> nn.Sequential:
    mods: list[nn.Module] = []
    prev = in_dim
    for width in layers:
        mods.append(_orthogonal(nn.Linear(prev, width), math.sqrt(2)))
        mods.append(nn.Tanh())
        prev = width
    mods.append(_orthogonal(nn.Linear(prev, out_dim), out_gain))
    return nn.Sequential(*mods)


class PolicyNet(nn.Module):
    def __init__(self, spec: Optional[PolicySpec] = None):
        super().__init__()
        self.spec = spec or PolicySpec.small()
        s = self.spec
        self.cnn = _make_cnn(s)
        self.rnn = nn.LSTM(
            input_size=s.rnn_input_dim,
            hidden_size=s.rnn_hidden_dim,
            num_layers=s.rnn_num_layers,
            dropout=s.rnn_dropout,
            batch_first=True,
        )
        trunk_dim = s.cnn_feature_dim + s.rnn_hidden_dim + s.scalar_dim
        # small output gain keeps initial probabilities near the press prior
        self.actor = _make_head(trunk_dim, s.actor_layers, s.n_buttons, 0.01)
        nn.init.constant_(
            self.actor[-1].bias,
            math.log(ACTOR_PRESS_PRIOR / (1.0 - ACTOR_PRESS_PRIOR)),
        )
        self.critic = _make_head(trunk_dim, s.critic_layers, 1, 1.0)

    def _history_feature(self, history: torch.Tensor, history_len: torch.Tensor) -> torch.Tensor:
        batch = history.shape[0]
        lengths = history_len.to(torch.int64).cpu()
        clamped = lengths.clamp(min=1)
        packed = pack_padded_sequence(history, clamped, batch_first=True, enforce_sorted=False)
        _, (h_n, _) = self.rnn(packed)
        feat = h_n[-1]
        empty = (lengths == 0).to(feat.device)
        if bool(empty.any()):
            feat = feat * (~empty).unsqueeze(1).to(feat.dtype)
        return feat.reshape(batch, self.spec.rnn_hidden_dim)

    def trunk(self, images: torch.Tensor, scalars: torch.Tensor,
              history: torch.Tensor, history_len: torch.Tensor) -> torch.Tensor:
        if images.shape[1:] != torch.Size(self.spec.image_shape):
            raise ValueError(f"image shape {tuple(images.shape[1:])} != {self.spec.image_shape}")
        if scalars.shape[1] != self.spec.scalar_dim:
            raise ValueError(f"scalar dim {scalars.shape[1]} != {self.spec.scalar_dim}")
        img_feat = self.cnn(images)
        hist_feat = self._history_feature(history, history_len)
        return torch.cat([img_feat, hist_feat, scalars], dim=1)

    def forward(self, images, scalars, history, history_len):
        z = self.trunk(images, scalars, history, history_len)
        logits = self.actor(z)
        probs = torch.sigmoid(logits).clamp(PROB_EPS, 1.0 - PROB_EPS)
        value = self.critic(z).squeeze(-1)
        return probs, value

    @torch.no_grad()
    def forward_obs(self, obs: Observation) -> ForwardOutput:
        was_training = self.training
        self.eval()
        try:
            images, scalars, history, lengths = batch_observations([obs])
            probs, value = self(images, scalars, history, lengths)
        finally:
            if was_training:
                self.train()
        return ForwardOutput(
            action_probs=probs[0].numpy().astype(np.float64),
            value=float(value[0]),
        )

    def evaluate_actions(self, images, scalars, history, history_len, actions):
        probs, values = self(images, scalars, history, history_len)
        a = actions.to(probs.dtype)
        log_probs = (a * torch.log(probs) + (1.0 - a) * torch.log1p(-probs)).sum(dim=1)
        entropies = -(probs * torch.log(probs) + (1.0 - probs) * torch.log1p(-probs)).sum(dim=1)
        return log_probs, values, entropies


def make_policy(spec: Optional[PolicySpec] = None, seed: Optional[int] = None) -> PolicyNet:
    """Build a policy; a seed makes the fresh parameters reproducible."""
    if seed is None:
        return PolicyNet(spec)
    with torch.random.fork_rng():
        torch.manual_seed(seed)
        return PolicyNet(spec)


def action_log_prob(probs: np.ndarray, buttons: np.ndarray) -> float:
    p = np.clip(np.asarray(probs, dtype=np.float64), PROB_EPS, 1.0 - PROB_EPS)
    b = np.asarray(buttons, dtype=np.float64)
    return float(np.sum(b * np.log(p) + (1.0 - b) * np.log1p(-p)))


def bernoulli_entropy(probs: np.ndarray) -> float:
    p = np.clip(np.asarray(probs, dtype=np.float64), PROB_EPS, 1.0 - PROB_EPS)
    return float(-np.sum(p * np.log(p) + (1.0 - p) * np.log1p(-p)))


def sample_action(probs: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Draw each button independently; joint log-prob factorizes per button."""
    p = np.asarray(probs, dtype=np.float64)
    buttons = (rng.random(p.shape[0]) < p).astype(np.uint8)
    return buttons, action_log_prob(p, buttons)


def batch_observations(obs_list: Sequence[Observation]):
    images = torch.from_numpy(np.stack([o.image for o in obs_list])).float()
    scalars = torch.from_numpy(np.stack([o.scalars for o in obs_list])).float()
    history = torch.from_numpy(np.stack([o.action_history for o in obs_list])).float()
    lengths = torch.tensor([o.history_len for o in obs_list], dtype=torch.int64)
    return images, scalars, history, lengths
