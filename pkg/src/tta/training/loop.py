"""Hybrid training loop: PvE + self-play task mix, PPO updates, and the
append-only policy pool with a JSON run manifest."""

from __future__ import annotations

import json
import os
import time
from pathlib import Path
from typing import Optional

import numpy as np
import torch

from ..policy import PolicySpec, load_checkpoint, make_policy, save_checkpoint
from ..rewards import load_profile
from .config import HybridSchedule, PPOConfig
from .ppo import ppo_update
from .rollout import EnvRunner, OpponentCache, collect_rollouts
from .tasks import PolicyPool, PoolEntry, assign_tasks

MANIFEST_NAME = "manifest.json"
EVAL_MATCHES_PER_CHAR = 2


def _write_json_atomic(path: Path, doc: dict) -> None:
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(doc, indent=2) + "\n")
    os.replace(tmp, path)


def _eval_checkpoint(policy, seed: int, roster_size: int = 4) -> dict:
    """Quick win-rate probe vs the scripted AI, used for pool naming and
    archive difficulty scoring. A second probe vs a uniform-random opponent
    tracks basic competence independently of the scripted AI's strength."""
    # deferred: tta.eval imports this package for its agent wrappers
    from ..eval.agents import BuiltinAgent, PolicyAgent, RandomAgent
    from ..eval.harness import run_series

    agent = PolicyAgent(policy, name="candidate")
    chars = list(range(roster_size))
    report = run_series(
        agent, BuiltinAgent(level=1), chars,
        matches_per_pairing=EVAL_MATCHES_PER_CHAR, seed=seed,
    )
    vs_random = run_series(
        agent, RandomAgent(), chars,
        matches_per_pairing=EVAL_MATCHES_PER_CHAR, seed=seed + 1,
    )
    specials = float(np.mean([m.special_moves[m.side_of_a] for m in report.matches]))
    distance = float(np.mean([m.mean_distance_norm for m in report.matches]))
    return {
        "win_rate_vs_builtin": report.win_rate,
        "win_rate_vs_random": vs_random.win_rate,
        "matches": report.n_matches,
        "special_moves_per_round": specials,
        "mean_distance_norm": distance,
    }


def train(profile_name: str, schedule: HybridSchedule, ppo_config: PPOConfig,
          total_iterations: int, out_dir: str | Path, seed: int = 0,
          cnn_arch: str = "small", resume: bool = False,
          round_frames: Optional[int] = None, log=print) -> PolicyPool:
    out = Path(out_dir)
    pool_dir = out / "pool"
    out.mkdir(parents=True, exist_ok=True)
    terms = load_profile(profile_name)
    spec = PolicySpec.resnet18() if cnn_arch == "resnet18" else PolicySpec.small()

    manifest_path = out / MANIFEST_NAME
    start_iteration = 0
    history: list[dict] = []
    if resume and manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
        history = manifest["iterations"]
        start_iteration = len(history)
        pool = PolicyPool.load(pool_dir)
        if len(pool) != start_iteration:
            raise RuntimeError(
                f"manifest records {start_iteration} iterations but pool holds {len(pool)}"
            )
    else:
        pool = PolicyPool(pool_dir)

    if start_iteration > 0:
        policy, _ = load_checkpoint(pool.entries[-1].path, expected_spec=spec)
        log(f"resumed from {pool.entries[-1].path}")
    else:
        policy = make_policy(spec, seed=seed)
    optimizer = torch.optim.Adam(policy.parameters(), lr=ppo_config.lr_initial)

    steps_per_rollout = ppo_config.n_steps * schedule.num_envs
    rollouts_per_iteration = max(1, schedule.steps_per_iteration // steps_per_rollout)
    total_rollouts = total_iterations * rollouts_per_iteration
    cache = OpponentCache()

    for iteration in range(start_iteration, total_iterations):
        iter_seed = np.random.SeedSequence([seed, iteration])
        children = iter_seed.spawn(3 + schedule.num_envs)
        task_rng = np.random.default_rng(children[0])
        sample_rng = np.random.default_rng(children[1])
        shuffle_rng = np.random.default_rng(children[2])
        env_rngs = [np.random.default_rng(c) for c in children[3:]]

        tasks = assign_tasks(schedule, pool, task_rng)
        runners = [
            EnvRunner(task, terms, pool, cache, env_rngs[i], round_frames=round_frames)
            for i, task in enumerate(tasks)
        ]
        n_self = sum(1 for t in tasks if t.mode == "self_play")
        log(f"iteration {iteration}: {n_self} self-play / {len(tasks) - n_self} PvE")

        t_start = time.perf_counter()
        for k in range(rollouts_per_iteration):
            buf = collect_rollouts(
                policy, runners, ppo_config.n_steps, sample_rng,
                ppo_config.discount_gamma, ppo_config.gae_lambda,
            )
            global_rollout = iteration * rollouts_per_iteration + k
            progress = global_rollout / max(1, total_rollouts - 1)
            stats = ppo_update(policy, buf, ppo_config, optimizer, progress, shuffle_rng)
            ep_returns = [r for runner in runners for r in runner.finished_returns]
            for runner in runners:
                runner.finished_returns.clear()
            mean_ret = float(np.mean(ep_returns)) if ep_returns else float("nan")
            log(
                f"  rollout {k + 1}/{rollouts_per_iteration}: "
                f"loss_pi={stats.policy_loss:+.4f} loss_v={stats.value_loss:.6f} "
                f"ent={stats.entropy:.3f} clip={stats.clip_fraction:.3f} "
                f"lr={stats.lr:.2e} ep_ret={mean_ret:+.4f}"
            )

        eval_summary = _eval_checkpoint(policy, seed=seed * 1000 + iteration)
        win = round(eval_summary["win_rate_vs_builtin"], 2)
        ckpt_path = pool_dir / f"{iteration + 1}_{win}.ckpt"
        save_checkpoint(ckpt_path, policy, extra={
            "profile": profile_name,
            "iteration": iteration + 1,
            "eval_summary": eval_summary,
        })
        pool.append(PoolEntry(
            path=str(ckpt_path),
            iteration=iteration + 1,
            profile=profile_name,
            eval_summary=eval_summary,
        ))
        pool.save()

        history.append({
            "iteration": iteration,
            "tasks": {"self_play": n_self, "pve": len(tasks) - n_self},
            "eval": eval_summary,
            "seconds": round(time.perf_counter() - t_start, 1),
            "checkpoint": str(ckpt_path),
        })
        _write_json_atomic(manifest_path, {
            "profile": profile_name,
            "seed": seed,
            "cnn_arch": cnn_arch,
            "ppo_config": ppo_config.to_dict(),
            # discount_gamma 0.99 with clip_range 0.1 is a deliberate reading
            # of an ambiguous source table; both stay configurable
            "schedule": schedule.to_dict(),
            "total_iterations": total_iterations,
            "iterations": history,
        })
        log(
            f"iteration {iteration} done: win_rate={eval_summary['win_rate_vs_builtin']:.2f} "
            f"vs_random={eval_summary['win_rate_vs_random']:.2f} "
            f"specials/round={eval_summary['special_moves_per_round']:.2f} "
            f"dist={eval_summary['mean_distance_norm']:.3f} -> {ckpt_path.name}"
        )

    return pool
