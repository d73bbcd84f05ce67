"""Approach of the isotropic-to-square gain to the 1/3 limit.

For a centered broadside square of side ``a`` at distance ``d`` the gain
falls short of 1/3 by roughly sqrt(2) d / (pi a) once a >> d, which the
last column compares against.
"""

import argparse
import math

import numpy as np

from lismodes import Surface, gain_exact, gain_friis
from lismodes.linkbudget import GAIN_LIMIT


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--ratios", type=float, nargs="+", default=[0.02, 0.1, 0.5, 1, 2, 10, 50, 200, 300, 1000, 2000])
    p.add_argument("--tol", type=float, default=1e-9)
    args = p.parse_args()

    # missing outer part of the infinite-plane integral, per unit d/a
    tail = math.sqrt(2) / math.pi
    print("a/d,gain,gain_db,friis,gain/friis,deficit_to_1/3,tail_estimate")
    for r in args.ratios:
        rep = gain_exact(Surface.square(r, (0, 0, 1.0)), np.zeros(3), [1.0, 0.0, 0.0], quad_tol=args.tol)
        g = rep.gain_exact
        f = gain_friis(r * r, 1.0)
        print(f"{r:g},{g:.10f},{rep.gain_exact_db:.4f},{f:.6g},{g / f:.6f},{GAIN_LIMIT - g:.3e},{tail / r:.3e}")


if __name__ == "__main__":
    main()
