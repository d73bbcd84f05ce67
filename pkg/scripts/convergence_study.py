"""Mesh-refinement study of the leading singular values and the mode count.

Equal parallel squares of side 10 wavelengths at 28 GHz, meshed at
lambda/2, lambda/3 and lambda/4, for several separations.
"""

import argparse

import numpy as np

from lismodes import Surface, Wave, assemble_coupling_matrix, build_mesh, count_modes, mode_spectrum, n_paraxial


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--freq", type=float, default=28e9)
    p.add_argument("--side-lambda", type=float, default=10.0)
    p.add_argument("--d-lambda", type=float, nargs="+", default=[20, 30, 50, 100])
    p.add_argument("--top", type=int, default=5)
    args = p.parse_args()

    wave = Wave(args.freq)
    lam = wave.wavelength
    side = args.side_lambda * lam
    tx = Surface.square(side)
    print("d/lambda,frac,points,N_counted,N_paraxial," + ",".join(f"sigma_{i + 1}" for i in range(args.top)))
    for m in args.d_lambda:
        rx = Surface.square(side, (0, 0, m * lam))
        ref = None
        for frac in (1 / 2, 1 / 3, 1 / 4):
            mt, mr = build_mesh(tx, frac * lam), build_mesh(rx, frac * lam)
            spec = mode_spectrum(assemble_coupling_matrix(mt, mr, wave), 200, compute_vectors=False)
            top = spec.sigmas[: args.top]
            ref = top if ref is None else ref
            print(
                f"{m:g},{frac:.3f},{len(mt)},{count_modes(spec)},{n_paraxial(side**2, side**2, wave, m * lam):.3f},"
                + ",".join(f"{s:.6e}" for s in top)
            )
        print(f"# d={m:g} lambda: max relative change lambda/2 -> lambda/4 = {np.max(np.abs(ref / top - 1)):.4%}")


if __name__ == "__main__":
    main()
