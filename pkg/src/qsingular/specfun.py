"""Gamma function, Kummer's confluent hypergeometric function and a root scanner.

Everything here is written against the Python float type; the scanner
additionally accepts vectorised callables for speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, PoleError, TooManyRootsError

__all__ = [
    "gamma",
    "lgamma",
    "rgamma",
    "kummer_m",
    "laguerre",
    "RootScanConfig",
    "find_roots",
]

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _sin_pi(x: float) -> float:
    # reduce to the nearest integer: x - n is exact, keeping relative precision near poles
    n = round(x)
    s = math.sin(math.pi * (x - n))
    return -s if n % 2 else s


def _lanczos_sum(z: float) -> tuple[float, float]:
    """Return (series A(z), t) for Gamma(z + 1) = sqrt(2 pi) t^(z+1/2) e^-t A."""
    a = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        a += _LANCZOS_COEF[i] / (z + i)
    return a, z + _LANCZOS_G + 0.5


def gamma(x: float) -> float:
    """Gamma function of a real argument.

    Raises
    ------
    PoleError
        If ``x`` is zero or a negative integer.
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"Gamma has a pole at x={x}")
    if x < 0.5:
        return math.pi / (_sin_pi(x) * gamma(1.0 - x))
    if x == math.floor(x) and x <= 171:
        return float(math.prod(range(1, int(x))))
    z = x - 1.0
    a, t = _lanczos_sum(z)
    # split the power to postpone overflow for large x
    half = t ** ((z + 0.5) / 2.0)
    return _SQRT_2PI * half * (half * math.exp(-t)) * a


def lgamma(x: float) -> float:
    """log|Gamma(x)|."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"Gamma has a pole at x={x}")
    if x < 0.5:
        return math.log(math.pi / abs(_sin_pi(x))) - lgamma(1.0 - x)
    z = x - 1.0
    a, t = _lanczos_sum(z)
    return _LOG_SQRT_2PI + (z + 0.5) * math.log(t) - t + math.log(a)


def rgamma(x: float) -> float:
    """Reciprocal Gamma function 1/Gamma(x), entire; zero at the poles of Gamma."""
    x = float(x)
    if _is_nonpositive_integer(x):
        return 0.0
    if x > 170.0:
        return math.exp(-lgamma(x))
    return 1.0 / gamma(x)


def laguerre(n: int, alpha: float, z):
    """Generalised Laguerre polynomial L_n^(alpha)(z) by upward recurrence.

    Works elementwise on numpy arrays.
    """
    z = np.asarray(z, dtype=float)
    prev = np.zeros_like(z)
    cur = np.ones_like(z)
    for k in range(n):
        nxt = ((2 * k + 1 + alpha - z) * cur - (k + alpha) * prev) / (k + 1)
        prev, cur = cur, nxt
    return cur if cur.ndim else float(cur)


def _pochhammer_ratio_factorial(n: int, c: float) -> float:
    """n! / (c)_n, computed without overflow."""
    if c > 0:
        return math.exp(lgamma(n + 1.0) + lgamma(c) - lgamma(c + n))
    out = 1.0
    for k in range(n):
        out *= (k + 1) / (c + k)
    return out


def _kummer_series(a: float, c: float, z: float, max_terms: int) -> float:
    term = 1.0
    total = 1.0
    for k in range(max_terms):
        term *= (a + k) / ((c + k) * (k + 1)) * z
        total += term
        if term == 0.0:
            return total
        # only stop once past the turning point of the term sequence
        if k > abs(a) and abs(term) < 1e-17 * abs(total):
            return total
    raise ConvergenceError(
        f"1F1({a}; {c}; {z}) series did not converge in {max_terms} terms"
    )


def kummer_m(alpha: float, gamma_param: float, z: float, max_terms: int = 20000) -> float:
    """Kummer's confluent hypergeometric function 1F1(alpha; gamma; z).

    Terminating cases (``alpha`` a non-positive integer) go through the
    Laguerre recurrence, which stays accurate for high degree where the raw
    power series cancels catastrophically.  Negative ``z`` is mapped to a
    positive argument with Kummer's transformation
    ``M(a, c, z) = e^z M(c - a, c, -z)``.

    Parameters
    ----------
    alpha, gamma_param : float
        Numerator and denominator parameters.
    z : float
        Argument, ``|z| <= 200``.
    """
    a, c, z = float(alpha), float(gamma_param), float(z)
    if _is_nonpositive_integer(c):
        raise PoleError(f"1F1 undefined for gamma={c}")
    if abs(z) > 200.0:
        raise ValueError(f"|z|={abs(z)} outside the supported domain |z| <= 200")
    if z == 0.0:
        return 1.0
    if _is_nonpositive_integer(a):
        n = int(-a)
        if n == 0:
            return 1.0
        return laguerre(n, c - 1.0, z) * _pochhammer_ratio_factorial(n, c)
    if z < 0.0:
        return math.exp(z) * kummer_m(c - a, c, -z, max_terms)
    return _kummer_series(a, c, z, max_terms)


@dataclass(frozen=True)
class RootScanConfig:
    lower: float
    upper: float
    scan_step: float
    refine_tolerance: float = 1e-12
    max_roots: int = 1000
    blowup: float = 1e8

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("lower must be < upper")
        if self.scan_step <= 0 or self.refine_tolerance <= 0:
            raise ValueError("scan_step and refine_tolerance must be positive")
        if self.max_roots < 1:
            raise ValueError("max_roots must be a positive integer")


def _evaluate_grid(f: Callable, xs: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(f(xs), dtype=float)
        if vals.shape == xs.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([f(float(x)) for x in xs], dtype=float)


def _bisect(f: Callable, a: float, b: float, fa: float, tol: float) -> float:
    for _ in range(200):
        if b - a <= tol:
            break
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def find_roots(f: Callable[[float], float], config: RootScanConfig) -> list[float]:
    """All simple roots of ``f`` on ``[lower, upper]``, ascending.

    The interval is sampled every ``scan_step``; each sign change is refined
    by bisection.  Sign changes where ``|f|`` exceeds ``config.blowup`` on
    both ends, or where the refined point still has a huge residual, are
    treated as poles and dropped.
    """
    cfg = config
    n = int(math.ceil((cfg.upper - cfg.lower) / cfg.scan_step))
    xs = cfg.lower + cfg.scan_step * np.arange(n + 1)
    xs[-1] = cfg.upper
    fs = _evaluate_grid(f, xs)

    roots: list[float] = []
    for i in range(n + 1):
        if fs[i] == 0.0:
            if not roots or xs[i] - roots[-1] > 0.5 * cfg.scan_step:
                roots.append(float(xs[i]))
            continue
        if i == n or fs[i + 1] == 0.0:
            continue
        if not np.isfinite(fs[i]) or not np.isfinite(fs[i + 1]):
            continue
        if (fs[i] > 0) == (fs[i + 1] > 0):
            continue
        if abs(fs[i]) > cfg.blowup and abs(fs[i + 1]) > cfg.blowup:
            continue
        r = _bisect(f, float(xs[i]), float(xs[i + 1]), float(fs[i]), cfg.refine_tolerance)
        if abs(f(r)) > cfg.blowup:
            continue
        roots.append(r)
        if len(roots) > cfg.max_roots:
            raise TooManyRootsError(f"more than {cfg.max_roots} roots in [{cfg.lower}, {cfg.upper}]")
    return roots

