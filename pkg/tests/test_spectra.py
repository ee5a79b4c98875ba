import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq

from qsingular.errors import TrackingAmbiguityError
from qsingular.singularity import SingularityParams, build_characteristic_matrix
from qsingular.spectra import (
    ANTISYMMETRIC,
    SYMMETRIC,
    OscillatorParams,
    WellParams,
    calogero_lambdas,
    calogero_spectrum,
    channel_momenta,
    finite_difference_oracle,
    line_bound_determinant,
    line_bound_states,
    scale_invariant_well_state,
    torus_loop,
    track_levels_along_loop,
    well_spectrum,
    well_spectrum_parity_invariant,
)
from qsingular.anholonomy import level_anholonomy_shift

PI = math.pi


def well(tp, tm, mu=PI / 2, nu=0.0, l=1.0, L0=1.0):
    return WellParams(l, SingularityParams(tp, tm, mu, nu, L0))


def test_free_well_ladder():
    lv = well_spectrum(well(0.0, PI), 6)[:8]
    ks = [v.momentum_k for v in lv]
    assert ks == pytest.approx([n * PI / 2 for n in range(1, 9)], rel=1e-12)
    assert [v.parity for v in lv[:4]] == [SYMMETRIC, ANTISYMMETRIC, SYMMETRIC, ANTISYMMETRIC]


def test_dirichlet_point_doubly_degenerate():
    lv = well_spectrum(well(PI, PI), 4)
    e = np.array([v.energy for v in lv])
    assert np.allclose(e[0::2], e[1::2])
    assert [v.momentum_k for v in lv[0::2]] == pytest.approx([n * PI for n in range(1, 5)])


@pytest.mark.parametrize("th", [0.3, 1.2, 2.5, 4.0])
def test_self_dual_degeneracy(th):
    lv = well_spectrum(well(th, th), 5)
    e = np.array([v.energy for v in lv])
    assert np.allclose(e[0::2], e[1::2], rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("tm", [0.0, 0.9, 2.0])
def test_symmetric_dirichlet_channel(tm):
    ks = channel_momenta(PI, 1.0, 1.0, 5)
    assert ks == pytest.approx([n * PI for n in range(1, 6)])
    sym = [v for v in well_spectrum(well(PI, tm), 5) if v.parity == SYMMETRIC]
    assert [v.momentum_k for v in sym] == pytest.approx([n * PI for n in range(1, 6)])


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 2 * PI - 0.01), st.floats(0.3, 3.0), st.floats(0.2, 2.0))
def test_channel_momenta_solve_the_condition(theta, L0, l):
    # oracle: brentq on the plain tangent form, one root per branch
    moms = channel_momenta(theta, L0, l, 4)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    for m in moms:
        if m > 0:
            assert abs(L0 * c * math.cos(m * l) * m - s * math.sin(m * l)) < 1e-9 * max(1, m)
        elif m < 0:
            kap = -m
            assert abs(L0 * c * kap * math.cosh(kap * l) - s * math.sinh(kap * l)) < 1e-8 * math.cosh(kap * l) * max(1, kap)
    assert all(b > a for a, b in zip(moms, moms[1:]))


def test_channel_momenta_against_brentq_branch():
    theta, L0, l = 1.0, 1.0, 1.0
    f = lambda k: L0 * math.cos(theta / 2) * k * math.cos(k * l) - math.sin(theta / 2) * math.sin(k * l)
    expected = [brentq(f, m * PI + 1e-9, (m + 0.5) * PI) for m in range(1, 4)]
    got = [m for m in channel_momenta(theta, L0, l, 4) if m > 0]
    assert got[-3:] == pytest.approx(expected, rel=1e-12)


def test_bound_level_below_scale_length():
    # 1/L = tan(1.4) > 1/l gives one negative-energy level with kappa coth(kappa l) = 1/L
    moms = channel_momenta(2.8, 1.0, 1.0, 3)
    assert moms[0] < 0
    kap = -moms[0]
    assert kap / math.tanh(kap) == pytest.approx(math.tan(1.4), rel=1e-12)


def test_duality_swaps_channels():
    a = well_spectrum(well(0.7, 2.1), 5)
    b = well_spectrum(well(2.1, 0.7), 5)
    assert [v.energy for v in a] == pytest.approx([v.energy for v in b])
    assert {v.parity for v in a if abs(v.energy - a[0].energy) < 1e-12} != {
        v.parity for v in b if abs(v.energy - a[0].energy) < 1e-12
    }


def test_parity_invariant_guard():
    with pytest.raises(ValueError):
        well_spectrum_parity_invariant(well(0.5, 1.5, mu=0.3, nu=0.2), 3)
    assert len(well_spectrum_parity_invariant(well(0.5, 1.5), 3)) == 6


@pytest.mark.parametrize("p", [
    SingularityParams(2.0, PI, PI / 2, 0.0),
    SingularityParams(1.0, 2.5, 0.4, 1.3, 0.7),
    SingularityParams(PI / 2, PI / 2, 0.0, 0.0),
])
def test_line_bound_states(p):
    U = build_characteristic_matrix(p)
    lv = line_bound_states(p)
    for v in lv:
        assert abs(line_bound_determinant(U, p.L0, v.momentum_k)) < 1e-10
        assert v.energy == pytest.approx(-v.momentum_k**2 / 2)


def test_line_bound_examples():
    assert line_bound_states(SingularityParams(0.0, PI, PI / 2, 0.0)) == []
    lv = line_bound_states(SingularityParams(PI / 2, PI / 2, 0.0, 0.0))
    assert [v.momentum_k for v in lv] == pytest.approx([1.0, 1.0])


def test_scale_invariant_state_normalised():
    for n in (1, 2, 5):
        s = scale_invariant_well_state(0.8, 1.1, 1.0, n)
        right = quad(lambda x: abs(s(x)) ** 2, 0, 1, epsabs=1e-13)[0]
        left = quad(lambda x: abs(s(x)) ** 2, -1, 0, epsabs=1e-13)[0]
        assert right + left == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("a", [0.6, 0.75, 0.9])
def test_calogero_closed_forms(a):
    o = OscillatorParams.from_a(a)
    for inv_L, c in ((0.0, o.c2), (math.inf, o.c1)):
        scanned = calogero_lambdas(o, inv_L, 5, analytic=False)
        assert scanned == pytest.approx([2 * n + c for n in range(5)], abs=1e-10)


def test_calogero_harmonic_limit():
    o = OscillatorParams.from_a(0.5)
    lv = calogero_spectrum(o, math.inf, 0.0, 5)
    assert [v.energy for v in lv] == pytest.approx([n + 0.5 for n in range(10)])


def test_calogero_dirichlet_degenerate():
    lv = calogero_spectrum(OscillatorParams.from_a(0.75), 0.0, 0.0, 4)
    e = np.array([v.energy for v in lv])
    assert np.allclose(e[0::2], e[1::2])
    assert e[0::2] == pytest.approx([2 * n + 1.75 for n in range(4)])


def test_calogero_finite_L_interlaces():
    o = OscillatorParams.from_a(0.75)
    lo, hi = [2 * n + o.c2 for n in range(6)], [2 * n + o.c1 for n in range(6)]
    # attractive side: one root below c2, the rest between consecutive closed-form ladders
    lam = calogero_lambdas(o, 0.5, 5)
    assert lam[0] < lo[0]
    for n, x in enumerate(lam[1:], start=1):
        assert hi[n - 1] < x < lo[n]
    lam = calogero_lambdas(o, -0.5, 5)
    for n, x in enumerate(lam):
        assert lo[n] < x < hi[n]


def test_oscillator_validation():
    with pytest.raises(ValueError):
        OscillatorParams.from_a(1.0)
    with pytest.raises(ValueError):
        OscillatorParams(g=0.5)


@pytest.mark.parametrize("tp, tm, mu, nu", [(0.0, PI, PI / 2, 0.0), (1.0, 2.0, PI / 2, 0.0), (1.0, 2.0, 0.7, 3.0)])
def test_fd_oracle_second_order(tp, tm, mu, nu):
    w = well(tp, tm, mu, nu)
    ex = [v.energy for v in well_spectrum(w, 5)[:5]]
    e1 = [v.energy for v in finite_difference_oracle(w, 2000, 5)]
    e2 = [v.energy for v in finite_difference_oracle(w, 4000, 5)]
    for a, b, c in zip(ex, e1, e2):
        r1, r2 = abs(b - a) / abs(a), abs(c - a) / abs(a)
        assert r2 < 1e-5
        assert math.log2(r1 / r2) == pytest.approx(2.0, abs=0.2)


def test_fd_oracle_channel_labels():
    w = well(1.0, 2.0)
    ex = well_spectrum(w, 3)[:4]
    fd = finite_difference_oracle(w, 4000, 4)
    assert [v.parity for v in fd] == [v.parity for v in ex]


def test_tracking_shifted_loop():
    r = track_levels_along_loop(torus_loop("shifted", 401), well(0.0, PI), 6, 2000)
    assert r.shifts.count(None) == 2
    assert level_anholonomy_shift(r) == 2
    rr = track_levels_along_loop(torus_loop("shifted", 401, reverse=True), well(0.0, PI), 6, 2000)
    assert rr.shifts == [-2] * 6


def test_tracking_constant_loop():
    r = track_levels_along_loop(torus_loop("constant", 50), well(0.0, PI), 4, 20)
    assert r.shifts == [0, 0, 0, 0]


def test_tracking_validation():
    with pytest.raises(ValueError):
        track_levels_along_loop([[0.0, 0.0], [1.0, 0.0]], well(0.0, PI), 3, 10)
    with pytest.raises(ValueError):
        torus_loop("spiral")
    with pytest.raises(TrackingAmbiguityError):
        track_levels_along_loop(torus_loop("shifted", 401), well(0.0, PI), 6, 3, max_refine=0)
