"""Hybrid PvE / self-play training: schedules, rollouts, PPO, scripted opponents."""

from .builtin_ai import builtin_ai_policy
from .config import (
    DESK_STEPS_PER_ITERATION,
    FULL_SCALE_STEPS_PER_ITERATION,
    HybridSchedule,
    PPOConfig,
)
from .loop import train
from .ppo import TrainingDivergence, TrainStats, ppo_update
from .rollout import (
    EnvRunner,
    OpponentCache,
    RolloutBuffer,
    collect_rollouts,
    decode_frames,
    encode_frames,
)
from .tasks import PolicyPool, PoolEntry, TaskAssignment, assign_tasks

__all__ = [
    "DESK_STEPS_PER_ITERATION",
    "FULL_SCALE_STEPS_PER_ITERATION",
    "EnvRunner",
    "HybridSchedule",
    "OpponentCache",
    "PPOConfig",
    "PolicyPool",
    "PoolEntry",
    "RolloutBuffer",
    "TaskAssignment",
    "TrainStats",
    "TrainingDivergence",
    "assign_tasks",
    "builtin_ai_policy",
    "collect_rollouts",
    "decode_frames",
    "encode_frames",
    "ppo_update",
    "train",
]
