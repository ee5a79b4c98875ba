import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from qsingular import specfun
from qsingular.errors import PoleError, TooManyRootsError


@pytest.mark.parametrize("x, expected", [(0.5, math.sqrt(math.pi)), (5.0, 24.0), (-0.5, -2 * math.sqrt(math.pi))])
def test_gamma_examples(x, expected):
    assert specfun.gamma(x) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
def test_gamma_poles(x):
    with pytest.raises(PoleError):
        specfun.gamma(x)


def test_rgamma_vanishes_at_poles():
    assert specfun.rgamma(-3.0) == 0.0
    assert specfun.rgamma(2.5) == pytest.approx(1 / special.gamma(2.5), rel=1e-13)


@pytest.mark.parametrize("x", np.linspace(-49.7, 49.9, 97))
def test_gamma_against_scipy(x):
    assert specfun.gamma(float(x)) == pytest.approx(special.gamma(x), rel=1e-12)


@settings(max_examples=1000, deadline=None)
@given(st.floats(0.1, 20.0))
def test_gamma_recurrence(x):
    assert specfun.gamma(x + 1) / (x * specfun.gamma(x)) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("args, expected", [((0.3, 1.7, 0.0), 1.0), ((1, 1, 1), math.e), ((-1, 2, 1), 0.5)])
def test_kummer_examples(args, expected):
    assert specfun.kummer_m(*args) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize(
    "alpha, gam, z",
    [(0.3, 1.75, 5.0), (-4.6, 1.25, 30.0), (2.2, 0.25, 80.0), (-20.3, 1.75, 150.0), (-0.6, 1.25, 199.0), (0.5, 3.5, -40.0), (2.2, 0.25, -199.0), (-4.6, 1.25, -30.0)],
)
def test_kummer_against_mpmath(alpha, gam, z):
    ref = float(mpmath.hyp1f1(alpha, gam, z))
    assert specfun.kummer_m(alpha, gam, z) == pytest.approx(ref, rel=1e-10)


def test_kummer_parameter_pole():
    with pytest.raises(PoleError):
        specfun.kummer_m(0.5, -2.0, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3.0, 3.0), st.floats(0.3, 4.0), st.floats(0.1, 20.0))
def test_kummer_derivative_identity(alpha, gam, z):
    h = 1e-6
    fd = (specfun.kummer_m(alpha, gam, z + h) - specfun.kummer_m(alpha, gam, z - h)) / (2 * h)
    exact = alpha / gam * specfun.kummer_m(alpha + 1, gam + 1, z)
    assert fd == pytest.approx(exact, rel=1e-5, abs=1e-7 * max(1.0, abs(specfun.kummer_m(alpha, gam, z))))


def test_laguerre_against_scipy():
    z = np.linspace(0, 30, 7)
    for n in (0, 1, 5, 12):
        assert np.allclose(specfun.laguerre(n, 0.75, z), special.eval_genlaguerre(n, 0.75, z), rtol=1e-11, atol=1e-12)


def test_find_roots_cos():
    roots = specfun.find_roots(math.cos, specfun.RootScanConfig(0, 4, 0.1))
    assert roots == pytest.approx([math.pi / 2], abs=1e-10)


def test_find_roots_sin():
    roots = specfun.find_roots(lambda k: math.sin(k), specfun.RootScanConfig(0.5, 7, 0.1))
    assert roots == pytest.approx([math.pi, 2 * math.pi], abs=1e-10)


def test_find_roots_tan_k_equals_k():
    # independent oracle: brentq on the same residual
    from scipy.optimize import brentq

    f = lambda k: k * math.cos(k) - math.sin(k)
    roots = specfun.find_roots(f, specfun.RootScanConfig(0.1, 8, 0.05))
    expected = [brentq(f, 4.0, 4.6, xtol=1e-14), brentq(f, 7.5, 7.8, xtol=1e-14)]
    assert roots == pytest.approx(expected, abs=1e-10)
    assert roots == pytest.approx([4.4934095, 7.7252518], abs=1e-7)


def test_find_roots_skips_poles():
    roots = specfun.find_roots(lambda x: math.tan(x), specfun.RootScanConfig(0.5, 6.0, 0.01))
    assert roots == pytest.approx([math.pi], abs=1e-10)


def test_find_roots_empty_and_limit():
    assert specfun.find_roots(lambda x: x * x + 1, specfun.RootScanConfig(-2, 2, 0.1)) == []
    with pytest.raises(TooManyRootsError):
        specfun.find_roots(math.sin, specfun.RootScanConfig(0.1, 100, 0.1, max_roots=5))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=5, unique=True))
def test_find_roots_polynomial(rts):
    rts = sorted(rts)
    if any(b - a < 0.05 for a, b in zip(rts, rts[1:])):
        return
    f = lambda x: np.prod([np.asarray(x) - r for r in rts], axis=0)
    cfg = specfun.RootScanConfig(-5.013, 5.017, 0.01, refine_tolerance=1e-11)
    found = specfun.find_roots(f, cfg)
    assert len(found) == len(rts)
    assert np.allclose(found, rts, atol=1e-10)


def test_config_validation():
    with pytest.raises(ValueError):
        specfun.RootScanConfig(1, 0, 0.1)
    with pytest.raises(ValueError):
        specfun.RootScanConfig(0, 1, 0.0)
