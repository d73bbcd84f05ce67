"""Channel power gain from an isotropic, polarized transmitter to a receiving surface.

The exact gain integrates spherical spreading, the projected local area
and the polarization mismatch over the aperture. Friis is the
small-aperture baseline and 1/3 the infinite-surface limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from lismodes.errors import GeometryError, InvalidArgument, InvalidUse
from lismodes.geometry import Surface
from lismodes.modes import ModeSpectrum
from lismodes.quadrature import integrate_rectangles

GAIN_LIMIT = 1.0 / 3.0


def to_db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 else -math.inf


@dataclass(frozen=True)
class GainReport:
    gain_exact: float
    gain_friis: float
    d: float
    A_R: float
    quadrature_error_estimate: float
    gain_limit: float = GAIN_LIMIT

    @property
    def gain_exact_db(self) -> float:
        return to_db(self.gain_exact)

    @property
    def gain_friis_db(self) -> float:
        return to_db(self.gain_friis)

    @property
    def gain_limit_db(self) -> float:
        return to_db(self.gain_limit)


def gain_friis(A_R: float, d: float) -> float:
    """Isotropic-transmitter Friis gain A_R / (4 pi d^2)."""
    if not (d > 0 and A_R > 0):
        raise InvalidArgument("A_R and d must be positive")
    return A_R / (4.0 * math.pi * d * d)


def gain_integrand(surface: Surface, tx_pos, tx_polarization):
    """Return ``f(u, v)`` giving the power density collected at local point (u, v)."""
    c, bu, bv, n = surface.center, surface.basis_u, surface.basis_v, surface.normal
    tx = np.asarray(tx_pos, dtype=float)
    e = np.asarray(tx_polarization, dtype=float)
    # r = c + u bu + v bv - tx, expanded on the surface frame
    o = c - tx
    o_u, o_v, o_n = o @ bu, o @ bv, o @ n
    e_u, e_v = e @ bu, e @ bv
    e_o = e @ o

    def f(u, v):
        ru = o_u + u
        rv = o_v + v
        r2 = ru * ru + rv * rv + o_n * o_n
        er = e_o + u * e_u + v * e_v  # e . r
        cos_proj = abs(o_n) / np.sqrt(r2)
        pol = 1.0 - er * er / r2
        return cos_proj * pol / (4.0 * math.pi * r2)

    return f


def gain_exact(
    surface: Surface,
    tx_pos,
    tx_polarization,
    quad_tol: float = 1e-8,
) -> GainReport:
    """Collected fraction of an isotropic source's power over ``surface``.

    Integrates ``|n.r_hat| (1 - (e.r_hat)^2) / (4 pi r^2)`` adaptively to
    relative tolerance ``quad_tol``. No wavelength appears, so the result
    is frequency independent.
    """
    if not (0 < quad_tol <= 1e-2):
        raise InvalidArgument(f"quad_tol must be in (0, 1e-2], got {quad_tol}")
    e = np.asarray(tx_polarization, dtype=float)
    if e.shape != (3,) or abs(np.linalg.norm(e) - 1.0) > 1e-9:
        raise InvalidArgument("tx_polarization must be a unit 3-vector")
    tx = np.asarray(tx_pos, dtype=float)
    if tx.shape != (3,) or not np.all(np.isfinite(tx)):
        raise InvalidArgument("tx_pos must be a finite 3-vector")

    tu, tv, th = surface.local_coords(tx)
    hu, hv = 0.5 * surface.len_u, 0.5 * surface.len_v
    inside = abs(tu) <= hu and abs(tv) <= hv
    if abs(th) <= 1e-12 * max(1.0, surface.size):
        if inside:
            raise GeometryError("transmitter lies on the receiving aperture")
        gain, err = 0.0, 0.0  # grazing: no projected area anywhere
    else:
        # split at the foot of the perpendicular so the peak sits on panel corners
        us = sorted({-hu, hu} | ({tu} if -hu < tu < hu else set()))
        vs = sorted({-hv, hv} | ({tv} if -hv < tv < hv else set()))
        panels = [(a, b, c, d) for a, b in zip(us, us[1:]) for c, d in zip(vs, vs[1:])]
        f = gain_integrand(surface, tx, e)
        gain, err = integrate_rectangles(f, panels, quad_tol)
    d = float(np.linalg.norm(tx - surface.center))
    return GainReport(
        gain_exact=gain,
        gain_friis=gain_friis(surface.area, d),
        d=d,
        A_R=surface.area,
        quadrature_error_estimate=err / gain if gain else 0.0,
    )


def gain_from_modes(spectrum: ModeSpectrum) -> float:
    """Total coupling energy, sum of sigma_n^2, of the scalar-kernel operator.

    This is a relative figure under the kernel normalization, not a
    calibrated isotropic-antenna gain. A truncated spectrum needs its tail
    energy (known when the spectrum records the source matrix's norm).
    """
    tail = spectrum.tail_energy
    if tail is None:
        raise InvalidUse("truncated spectrum without a tail bound")
    return math.fsum(spectrum.sigma2) + tail
