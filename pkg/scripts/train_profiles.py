"""Sequentially train the behaviour profiles used by the bundled archive.

Run from the repository root:

    python3 scripts/train_profiles.py
"""

import sys
import time
from pathlib import Path

from tta.training import HybridSchedule, PPOConfig, train

PROFILES = ("default", "special_move", "coward")
OUT_ROOT = Path("/root/pkg/artifacts")
ITERATIONS = 4


def main() -> int:
    sched = HybridSchedule()
    cfg = PPOConfig()
    for profile in PROFILES:
        out = OUT_ROOT / profile
        t0 = time.perf_counter()
        print(f"=== {profile} -> {out} ===", flush=True)

        def log(msg, _p=profile):
            print(f"[{_p}] {msg}", flush=True)

        train(profile, sched, cfg, total_iterations=ITERATIONS, out_dir=out,
              seed=PROFILES.index(profile) + 1, resume=True, log=log)
        print(f"=== {profile} finished in {time.perf_counter() - t0:.0f}s ===", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
