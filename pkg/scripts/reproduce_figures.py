"""Write every preset's CSV into an output directory."""

import argparse
import logging
import time
from pathlib import Path

from lismodes.experiment import PRESETS, run_preset


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", default="figures", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--only", nargs="*", choices=list(PRESETS), help="subset of presets")
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name in args.only or PRESETS:
        t0 = time.perf_counter()
        n = run_preset(name, args.out_dir / f"{name}.csv", seed=args.seed, workers=args.workers)
        print(f"{name}: {n} rows in {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
