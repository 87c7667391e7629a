from .network import (
    ACTOR_PRESS_PRIOR,
    ForwardOutput,
    PolicyNet,
    PolicySpec,
    action_log_prob,
    batch_observations,
    bernoulli_entropy,
    make_policy,
    sample_action,
)
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint

__all__ = [
    "ACTOR_PRESS_PRIOR",
    "ForwardOutput",
    "PolicyNet",
    "PolicySpec",
    "action_log_prob",
    "batch_observations",
    "bernoulli_entropy",
    "make_policy",
    "sample_action",
    "CheckpointError",
    "load_checkpoint",
    "save_checkpoint",
]
