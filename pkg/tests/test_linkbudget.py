import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lismodes.emkernel import assemble_coupling_matrix
from lismodes.errors import GeometryError, InvalidArgument, InvalidUse
from lismodes.geometry import Surface, Wave, build_mesh
from lismodes.linkbudget import GAIN_LIMIT, gain_exact, gain_friis, gain_from_modes
from lismodes.modes import mode_spectrum

X = np.array([1.0, 0.0, 0.0])
ORIGIN = np.zeros(3)
W28 = Wave(28e9)

# Midpoint Riemann sum with 1000 x 1000 samples, a = 2d, d = 1, x polarization
RIEMANN_A2D = 0.14174052992437491


def broadside(side, d=1.0):
    return Surface.square(side, (0, 0, d))


def test_friis_example():
    g = gain_friis(1.0, 10.0)
    assert g == pytest.approx(7.96e-4, rel=1e-3)
    assert 10 * math.log10(g) == pytest.approx(-31.0, abs=0.05)


def test_friis_identities():
    d = 0.7
    assert gain_friis(4 * math.pi * d * d, d) == pytest.approx(1.0, rel=1e-14)
    assert gain_friis(0.3, d / 2) == pytest.approx(4 * gain_friis(0.3, d), rel=1e-14)
    with pytest.raises(InvalidArgument):
        gain_friis(1.0, 0.0)


def test_small_aperture_matches_friis():
    rep = gain_exact(broadside(0.02), ORIGIN, X)
    assert rep.gain_exact == pytest.approx(rep.gain_friis, rel=1e-3)


def test_two_d_aperture_against_riemann_oracle():
    rep = gain_exact(broadside(2.0), ORIGIN, X)
    assert rep.gain_exact == pytest.approx(RIEMANN_A2D, rel=1e-6)
    assert rep.gain_exact < rep.gain_friis
    assert rep.gain_exact < GAIN_LIMIT


def test_report_fields():
    rep = gain_exact(broadside(0.5, 2.0), ORIGIN, X)
    assert rep.d == pytest.approx(2.0)
    assert rep.A_R == pytest.approx(0.25)
    assert rep.gain_limit_db == pytest.approx(-4.771, abs=1e-3)
    assert rep.gain_exact_db == pytest.approx(10 * math.log10(rep.gain_exact))
    assert 0 <= rep.quadrature_error_estimate < 1e-8


def test_frequency_independent():
    # the integrand has no wavelength; the same surface gives the same number
    a = gain_exact(broadside(0.3), ORIGIN, X).gain_exact
    b = gain_exact(broadside(0.3), ORIGIN, X).gain_exact
    assert a == b


def test_monotone_in_area():
    gains = [gain_exact(broadside(a), ORIGIN, X).gain_exact for a in (0.1, 0.5, 1.0, 4.0, 20.0, 100.0)]
    assert all(x < y for x, y in zip(gains, gains[1:]))
    assert gains[-1] < GAIN_LIMIT


def test_ratio_falls_below_one():
    ratios = [
        (lambda r: r.gain_exact / r.gain_friis)(gain_exact(broadside(a), ORIGIN, X)) for a in (0.05, 0.5, 2.0, 10.0)
    ]
    assert ratios[0] == pytest.approx(1.0, abs=1e-3)
    assert all(x > y for x, y in zip(ratios, ratios[1:]))


def test_polarization_quarter_turn_symmetry():
    s = broadside(1.5)
    a = gain_exact(s, ORIGIN, X).gain_exact
    b = gain_exact(s, ORIGIN, [0.0, 1.0, 0.0]).gain_exact
    assert a == pytest.approx(b, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(
    side_u=st.floats(0.01, 50.0),
    side_v=st.floats(0.01, 50.0),
    offset=st.lists(st.floats(-1.0, 1.0), min_size=2, max_size=2),
    theta=st.floats(0.0, math.pi),
)
def test_never_above_one_third(side_u, side_v, offset, theta):
    s = Surface([offset[0], offset[1], 1.0], [1, 0, 0], [0, 1, 0], side_u, side_v)
    e = [math.cos(theta), 0.0, math.sin(theta)]
    g = gain_exact(s, ORIGIN, e, quad_tol=1e-6).gain_exact
    assert 0 < g <= GAIN_LIMIT * (1 + 1e-6)


def test_geometry_errors():
    s = Surface.square(1.0)
    with pytest.raises(GeometryError):
        gain_exact(s, [0.1, 0.1, 0.0], X)
    assert gain_exact(s, [3.0, 0.0, 0.0], [0, 0, 1]).gain_exact == 0.0
    with pytest.raises(InvalidArgument):
        gain_exact(broadside(1.0), ORIGIN, [1.0, 1.0, 0.0])
    with pytest.raises(InvalidArgument):
        gain_exact(broadside(1.0), ORIGIN, X, quad_tol=0.1)


# --- mode-sum energy --------------------------------------------------------


def _coupling(side, d, wave=W28):
    h = wave.wavelength / 4
    return assemble_coupling_matrix(build_mesh(Surface.square(side), h), build_mesh(broadside(side, d), h), wave)


def test_mode_energy_equals_frobenius():
    K = _coupling(0.05, 0.1)
    assert gain_from_modes(mode_spectrum(K, 10_000, compute_vectors=False)) == pytest.approx(
        K.frobenius2(), rel=1e-10
    )


def test_mode_energy_far_zone_and_inverse_square():
    A = 0.05**2
    e1 = gain_from_modes(mode_spectrum(_coupling(0.05, 1.0), 50, compute_vectors=False))
    e2 = gain_from_modes(mode_spectrum(_coupling(0.05, 2.0), 50, compute_vectors=False))
    assert e1 == pytest.approx(A * A / (16 * math.pi**2), rel=0.02)
    assert e1 / e2 == pytest.approx(4.0, rel=0.02)


def test_mode_energy_needs_tail():
    spec = mode_spectrum(_coupling(0.05, 0.1), 5, compute_vectors=False)
    truncated = type(spec)(spec.sigmas)
    with pytest.raises(InvalidUse):
        gain_from_modes(truncated)
    assert gain_from_modes(spec) == pytest.approx(_coupling(0.05, 0.1).frobenius2(), rel=1e-10)
