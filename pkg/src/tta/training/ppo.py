"""Clipped-surrogate PPO update over a collected rollout."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from ..policy import PolicyNet
from .config import PPOConfig
from .rollout import RolloutBuffer

ADV_EPS = 1e-8


class TrainingDivergence(RuntimeError):
    pass


@dataclass
class TrainStats:
    policy_loss: float
    value_loss: float
    entropy: float
    clip_fraction: float
    approx_kl: float
    lr: float


def ppo_update(policy: PolicyNet, buffer: RolloutBuffer, config: PPOConfig,
               optimizer: torch.optim.Optimizer, progress: float,
               rng: np.random.Generator) -> TrainStats:
    """One update pass: epochs_per_update shuffles through the buffer in
    batch_size minibatches. progress positions the linear lr schedule."""
    lr = config.lr_at(progress)
    for group in optimizer.param_groups:
        group["lr"] = lr

    policy.train()
    stats = {"policy_loss": [], "value_loss": [], "entropy": [], "clip_fraction": [], "approx_kl": []}
    n = len(buffer)
    for _ in range(config.epochs_per_update):
        order = rng.permutation(n)
        for start in range(0, n - config.batch_size + 1, config.batch_size):
            idx = order[start:start + config.batch_size]
            (images, scalars, history, lengths, actions,
             old_log_probs, advantages, returns) = buffer.gather(idx)
            adv = (advantages - advantages.mean()) / (advantages.std() + ADV_EPS)

            log_probs, values, entropies = policy.evaluate_actions(
                images, scalars, history, lengths, actions
            )
            ratio = torch.exp(log_probs - old_log_probs)
            clipped = torch.clamp(ratio, 1.0 - config.clip_range, 1.0 + config.clip_range)
            policy_loss = -torch.min(ratio * adv, clipped * adv).mean()
            value_loss = torch.mean((values - returns) ** 2)
            entropy = entropies.mean()
            loss = policy_loss + config.vf_coef * value_loss - config.ent_coef * entropy

            if not torch.isfinite(loss):
                raise TrainingDivergence(
                    f"non-finite loss: policy={float(policy_loss.detach())} "
                    f"value={float(value_loss.detach())} entropy={float(entropy.detach())} lr={lr}"
                )
            optimizer.zero_grad(set_to_none=True)
            loss.backward()
            torch.nn.utils.clip_grad_norm_(policy.parameters(), config.max_grad_norm)
            optimizer.step()

            with torch.no_grad():
                stats["policy_loss"].append(float(policy_loss))
                stats["value_loss"].append(float(value_loss))
                stats["entropy"].append(float(entropy))
                stats["clip_fraction"].append(float((torch.abs(ratio - 1.0) > config.clip_range).float().mean()))
                stats["approx_kl"].append(float((old_log_probs - log_probs).mean()))

    return TrainStats(
        policy_loss=float(np.mean(stats["policy_loss"])),
        value_loss=float(np.mean(stats["value_loss"])),
        entropy=float(np.mean(stats["entropy"])),
        clip_fraction=float(np.mean(stats["clip_fraction"])),
        approx_kl=float(np.mean(stats["approx_kl"])),
        lr=lr,
    )
