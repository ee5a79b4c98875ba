"""Statistical force on a partition wall.

A box ``[-l, l]`` is split by a wall at the origin that is Neumann on one side
(``+``, levels ``e_n = (n - 1/2)^2``) and Dirichlet on the other (``-``,
levels ``e_n = n^2``), in units of ``E = (hbar^2/2m)(pi/l)^2``.  Each side holds
``N`` particles at dimensionless temperature ``t = kT/E``.  The one-sided
forces are ``F = (2E/l) sum_n e_n N_n`` and the net force is
``Delta F = F^- - F^+``, which tends to ``(3/4) N (2E/l)`` for bosons at ``t -> 0``.

All quantities below are dimensionless (``l/(2E)`` times forces) unless noted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import expit

from .errors import ConvergenceError

BOSE, FERMI = "bose", "fermi"
PLUS, MINUS = "plus", "minus"
METHODS = ("exact", "low_t", "linear", "integral", "poisson", "asymptotic")
_CUTOFF = 40.0  # exponent beyond which occupations are below e^{-40} of the ground term


@dataclass(frozen=True)
class GasConfig:
    N: int
    statistics: str = BOSE
    t: float = 1.0
    half_width_l: float = 1.0
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")
        if self.statistics not in (BOSE, FERMI):
            raise ValueError("statistics must be 'bose' or 'fermi'")
        if not (self.t > 0 and math.isfinite(self.t)):
            raise ValueError("t must be positive and finite")
        if self.half_width_l <= 0:
            raise ValueError("half_width_l must be positive")

    @property
    def energy_unit(self) -> float:
        return self.hbar**2 / (2 * self.mass) * (math.pi / self.half_width_l) ** 2

    @property
    def force_unit(self) -> float:
        """2E/l, converting dimensionless forces to physical ones."""
        return 2 * self.energy_unit / self.half_width_l

    def at(self, t: float) -> "GasConfig":
        return replace(self, t=t)


@dataclass(frozen=True)
class ForcePoint:
    """Forces are physical (units of 2E/l applied); ``dimensionless_delta_F`` is (l/2E) Delta F."""

    t: float
    alpha_plus: float
    alpha_minus: float
    F_plus: float
    F_minus: float
    delta_F: float
    dimensionless_delta_F: float
    method: str = "exact"
    force_unit: float = 1.0

    @property
    def F_plus_dimless(self) -> float:
        return self.F_plus / self.force_unit

    @property
    def F_minus_dimless(self) -> float:
        return self.F_minus / self.force_unit

    def csv_row(self) -> tuple:
        return (self.t, self.alpha_plus, self.alpha_minus, self.F_plus_dimless,
                self.F_minus_dimless, self.dimensionless_delta_F, self.method)


CSV_COLUMNS = ("t", "alpha_plus", "alpha_minus", "F_plus_dimless", "F_minus_dimless",
               "delta_F_dimless", "method")


def level(n, side: str):
    n = np.asarray(n, dtype=float)
    return (n - 0.5) ** 2 if side == PLUS else n * n


def _e1(side: str) -> float:
    return 0.25 if side == PLUS else 1.0


def _levels_up_to(t: float, side: str, shift: float) -> np.ndarray:
    """e_n for n = 1.. while e_n/t stays below shift + cutoff."""
    n_max = int(math.sqrt(t * (_CUTOFF + max(shift, 0.0)))) + 3
    return level(np.arange(1, n_max + 1), side)


# ---------------------------------------------------------------------------
# Chemical potential


def occupations(alpha: float, t: float, side: str, statistics: str) -> tuple[np.ndarray, np.ndarray]:
    """(e_n, N_n) with the sum truncated where N_n < e^{-40} of the leading term."""
    if statistics == BOSE:
        e = _levels_up_to(t, side, -_e1(side) / t)
        x = alpha + e / t
        if np.any(x <= 0):
            raise ValueError("bose occupations need alpha > -e_1/t")
        with np.errstate(over="ignore"):
            return e, 1.0 / np.expm1(x)
    e = _levels_up_to(t, side, -alpha)
    return e, expit(-(alpha + e / t))


def _bose_count(delta: float, t: float, side: str) -> float:
    """sum_n N_n with alpha = delta - e_1/t (delta > 0), written to keep precision at small t."""
    e = _levels_up_to(t, side, 0.0)
    with np.errstate(over="ignore"):
        return float(np.sum(1.0 / np.expm1(delta + (e - e[0]) / t)))


def solve_alpha(N: int, t: float, side: str, statistics: str) -> float:
    """alpha with sum_n N_n(alpha) = N, the sum being monotone decreasing in alpha."""
    if t <= 0:
        raise ValueError("t must be positive")
    if side not in (PLUS, MINUS):
        raise ValueError("side must be 'plus' or 'minus'")
    e1 = _e1(side)
    if statistics == BOSE:
        # delta = alpha + e1/t in (0, inf); search in log(delta)
        g = lambda s: _bose_count(math.exp(s), t, side) / N - 1.0
        lo, hi = math.log(1e-3 / N), 1.0
        while g(lo) < 0:
            lo -= 5.0
        while g(hi) > 0:
            hi += 5.0
        s = brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
        return math.exp(s) - e1 / t
    if statistics != FERMI:
        raise ValueError("statistics must be 'bose' or 'fermi'")
    count = lambda a: float(np.sum(occupations(a, t, side, FERMI)[1]))
    g = lambda a: count(a) / N - 1.0
    # the N-th level sits near the Fermi edge
    a0 = -level(N, side) / t
    lo, hi = a0 - 10.0, a0 + 10.0
    while g(lo) < 0:
        lo -= 2 * (hi - lo)
    while g(hi) > 0:
        hi += 2 * (hi - lo)
    return brentq(g, lo, hi, xtol=1e-14 * max(1.0, abs(a0)), rtol=4 * np.finfo(float).eps, maxiter=500)


def particle_count(alpha: float, t: float, side: str, statistics: str) -> float:
    if statistics == BOSE:
        return _bose_count(alpha + _e1(side) / t, t, side)
    return float(np.sum(occupations(alpha, t, side, statistics)[1]))


def side_force(alpha: float, t: float, side: str, statistics: str) -> float:
    """Dimensionless one-sided force sum_n e_n N_n."""
    if statistics == BOSE:
        e = _levels_up_to(t, side, 0.0)
        with np.errstate(over="ignore"):
            occ = 1.0 / np.expm1(alpha + e[0] / t + (e - e[0]) / t)
        return float(np.sum(e * occ))
    e, occ = occupations(alpha, t, side, statistics)
    return float(np.sum(e * occ))


def _point(cfg: GasConfig, a_plus: float, a_minus: float, f_plus: float, f_minus: float,
           method: str) -> ForcePoint:
    u = cfg.force_unit
    d = f_minus - f_plus
    return ForcePoint(cfg.t, a_plus, a_minus, f_plus * u, f_minus * u, d * u, d, method, u)


def _delta_point(cfg: GasConfig, d: float, method: str,
                 a_plus: float = math.nan, a_minus: float = math.nan) -> ForcePoint:
    """Point for approximations that give Delta F without one-sided forces."""
    return ForcePoint(cfg.t, a_plus, a_minus, math.nan, math.nan, d * cfg.force_unit, d, method,
                      cfg.force_unit)


def exact_net_force(cfg: GasConfig) -> ForcePoint:
    a_p = solve_alpha(cfg.N, cfg.t, PLUS, cfg.statistics)
    a_m = solve_alpha(cfg.N, cfg.t, MINUS, cfg.statistics)
    f_p = side_force(a_p, cfg.t, PLUS, cfg.statistics)
    f_m = side_force(a_m, cfg.t, MINUS, cfg.statistics)
    return _point(cfg, a_p, a_m, f_p, f_m, "exact")


# ---------------------------------------------------------------------------
# Approximations


def low_t_delta(N: int, t: float) -> float:
    """(3/4) N + 3 e^{-3/t} - 2 e^{-2/t}: ground and first excited levels only."""
    return 0.75 * N + 3 * math.exp(-3 / t) - 2 * math.exp(-2 / t)


def linear_delta(N: int, t: float) -> float:
    """(3/4) N - t/(e - 1)^2."""
    return 0.75 * N - t / (math.e - 1) ** 2


def integral_count(alpha: float, t: float, side: str) -> float:
    """Right-hand side of the integral-approximation particle count for one side.

    ``A`` is arctan for alpha > 0 and arctanh for alpha < 0; values outside
    the domain of arctanh come back as nan.
    """
    e1, e2 = level(1, side), level(2, side)
    b = abs(alpha)
    head = 1.0 / (alpha + e1 / t) + 0.5 / (alpha + e2 / t) - 0.75
    head -= (math.sqrt((2 - alpha) * t) - math.sqrt(e2)) / 2
    if alpha == 0.0:
        # limit sqrt(t/b) [A(sqrt(bt/e2)) - A(sqrt(b/(2-alpha)))] as b -> 0
        return head + t / math.sqrt(e2) - math.sqrt(t / 2)
    A = math.atan if alpha > 0 else _atanh_or_nan
    return head + math.sqrt(t / b) * (A(math.sqrt(b * t / e2)) - A(math.sqrt(b / (2 - alpha))))


def _atanh_or_nan(x: float) -> float:
    return math.atanh(x) if x < 1.0 else math.nan


def solve_integral_alpha(N: int, t: float, side: str, samples: int = 4000) -> float:
    """Root of the integral-approximation count in the regime |alpha| < 1.

    Scans ``(max(-1, -e_1/t), 1)`` for a sign change between finite values and
    refines it with Brent's method.

    Raises
    ------
    ConvergenceError
        If no bracketed root exists in that window.
    """
    e1 = float(level(1, side))
    lo = max(-1.0, -e1 / t)
    grid = lo + (1.0 - lo) * (np.arange(1, samples) / samples)
    f = lambda a: integral_count(a, t, side) - N
    vals = np.array([f(a) for a in grid])
    for i in range(len(grid) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if np.isfinite(v0) and np.isfinite(v1) and v0 * v1 < 0 and max(abs(v0), abs(v1)) < 1e3:
            return brentq(f, grid[i], grid[i + 1], xtol=1e-15, maxiter=200)
    raise ConvergenceError(f"no root of the integral count for N={N}, t={t}, side={side} with |alpha| < 1")


def integral_delta(N: int, t: float) -> tuple[float, float, float]:
    """(Delta F, alpha+, alpha-) from the integral approximation."""
    a_p = solve_integral_alpha(N, t, PLUS)
    a_m = solve_integral_alpha(N, t, MINUS)
    d = (N * t + 35.0 / 96.0 * math.sqrt(math.pi) * t**1.5) * (a_p - a_m)
    d += (math.sqrt(level(1, PLUS)) - math.sqrt(level(1, MINUS))) * t
    return d, a_p, a_m


def _sigma(side: str) -> float:
    return 0.0 if side == PLUS else 1.0


def _stat_sign(statistics: str, k: int) -> float:
    return 1.0 if statistics == BOSE or k % 2 == 1 else -1.0


def theta_bracket(k: int, t: float, side: str, m_max: int = 10) -> float:
    """-sigma/2 + sqrt(pi t/(4k)) sum_m (-+1)^m e^{-pi^2 t m^2/k}: the Poisson form of sum_n e^{-k e_n/t}."""
    m = np.arange(-m_max, m_max + 1)
    sign = (-1.0) ** np.abs(m) if side == PLUS else np.ones_like(m, dtype=float)
    s = float(np.sum(sign * np.exp(-math.pi**2 * t * m * m / k)))
    return -_sigma(side) / 2 + math.sqrt(math.pi * t / (4 * k)) * s


def theta_force_bracket(k: int, t: float, side: str, m_max: int = 10) -> float:
    """sqrt(pi t^3/(16 k^3)) sum_m (-+1)^m (1 - 2 pi^2 t m^2/k) e^{-pi^2 t m^2/k}."""
    m = np.arange(-m_max, m_max + 1)
    sign = (-1.0) ** np.abs(m) if side == PLUS else np.ones_like(m, dtype=float)
    x = math.pi**2 * t * m * m / k
    s = float(np.sum(sign * (1 - 2 * x) * np.exp(-x)))
    return math.sqrt(math.pi * t**3 / (16 * k**3)) * s


def direct_level_sum(k: int, t: float, side: str) -> float:
    """sum_{n >= 1} e^{-k e_n/t}."""
    e = _levels_up_to(t / k, side, 0.0)
    return float(np.sum(np.exp(-k * e / t)))


def poisson_count(q: float, t: float, side: str, statistics: str = BOSE,
                  k_max: int = 40, m_max: int = 10) -> float:
    """N from the fugacity q via the Poisson-summed series."""
    return sum(_stat_sign(statistics, k) * q**k * theta_bracket(k, t, side, m_max) for k in range(1, k_max + 1))


def poisson_force(q: float, t: float, side: str, statistics: str = BOSE,
                  k_max: int = 40, m_max: int = 10) -> float:
    return sum(_stat_sign(statistics, k) * q**k * theta_force_bracket(k, t, side, m_max)
               for k in range(1, k_max + 1))


def direct_count(q: float, t: float, side: str, statistics: str = BOSE) -> float:
    """sum_n N_n at fugacity q = e^{-alpha}, summed over levels directly."""
    e = _levels_up_to(t, side, max(0.0, math.log(q)) if q > 0 else 0.0)
    z = q * np.exp(-e / t)
    return float(np.sum(z / (1 - z) if statistics == BOSE else z / (1 + z)))


def q_seed(N: int, t: float, side: str, corrected: bool = False) -> float:
    """High-temperature fugacity 2N/sqrt(pi t) + 2N(sigma - s)/(pi t) + O(t^{-3/2}).

    With ``corrected=False`` ``s = sqrt(2N)``; inverting
    ``N = (sqrt(pi t)/2)(q + q^2/sqrt(2) + ...) - sigma q/2`` gives
    ``s = sqrt(2) N`` instead, which ``corrected=True`` selects.
    """
    s = math.sqrt(2.0) * N if corrected else math.sqrt(2.0 * N)
    return 2 * N / math.sqrt(math.pi * t) + 2 * N * (_sigma(side) - s) / (math.pi * t)


def solve_poisson_q(N: int, t: float, side: str, statistics: str = BOSE,
                    k_max: int = 40, m_max: int = 10) -> float:
    """Fugacity from the Poisson-summed count, bracketed in (0, e^{e_1/t}) for bosons."""
    e1 = float(level(1, side))
    # the series in q e^{-e_1/t} converges only below 1
    hi = math.exp(min(e1 / t, 700.0)) * (1 - 1e-12)
    f = lambda q: poisson_count(q, t, side, statistics, k_max, m_max) - N
    if f(hi) < 0:
        raise ConvergenceError("Poisson series cannot reach N: truncation too short for this temperature")
    return brentq(f, 1e-300, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def asymptotic_delta(N: int, t: float) -> float:
    """(N/2) sqrt(t/pi)."""
    return 0.5 * N * math.sqrt(t / math.pi)


def approx_net_force(cfg: GasConfig, method: str, k_max: int = 40, m_max: int = 10) -> ForcePoint:
    """Approximate net force by one of low_t, linear, integral, poisson, asymptotic."""
    N, t = cfg.N, cfg.t
    if method not in METHODS or method == "exact":
        if method == "exact":
            return exact_net_force(cfg)
        raise ValueError(f"unknown method {method!r}")
    if cfg.statistics == FERMI and method not in ("asymptotic", "poisson"):
        raise ValueError(f"method {method!r} is derived for bosons only")
    if method == "low_t":
        return _delta_point(cfg, low_t_delta(N, t), method)
    if method == "linear":
        return _delta_point(cfg, linear_delta(N, t), method)
    if method == "asymptotic":
        return _delta_point(cfg, asymptotic_delta(N, t), method)
    if method == "integral":
        d, a_p, a_m = integral_delta(N, t)
        return _delta_point(cfg, d, method, a_p, a_m)
    q_p = solve_poisson_q(N, t, PLUS, cfg.statistics, k_max, m_max)
    q_m = solve_poisson_q(N, t, MINUS, cfg.statistics, k_max, m_max)
    f_p = poisson_force(q_p, t, PLUS, cfg.statistics, k_max, m_max)
    f_m = poisson_force(q_m, t, MINUS, cfg.statistics, k_max, m_max)
    return _point(cfg, -math.log(q_p), -math.log(q_m), f_p, f_m, "poisson")


def force_curve(cfg: GasConfig, t_values: Sequence[float], method: str = "exact") -> list[ForcePoint]:
    """One ForcePoint per temperature, in input order."""
    ts = [float(t) for t in t_values]
    if any(t <= 0 for t in ts):
        raise ValueError("temperatures must be positive")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("temperatures must be strictly ascending")
    return [approx_net_force(cfg.at(t), method) for t in ts]


@dataclass(frozen=True)
class ForceMinimum:
    t_min: float
    delta_F_min: float


def default_min_range(cfg: GasConfig) -> tuple[float, float]:
    """[1, 10 N] for bosons, [1, 10 N^2] for fermions (their minimum scales as N^2)."""
    return (1.0, 10.0 * cfg.N) if cfg.statistics == BOSE else (1.0, 10.0 * cfg.N**2)


def find_force_minimum(cfg: GasConfig, t_range: Optional[tuple[float, float]] = None,
                       coarse: int = 60, rtol: float = 1e-3) -> ForceMinimum:
    """Minimum of the exact net force: coarse log scan, then golden section in log t."""
    lo, hi = t_range or default_min_range(cfg)
    if not 0 < lo < hi:
        raise ValueError("t_range must satisfy 0 < lo < hi")
    f = lambda s: exact_net_force(cfg.at(math.exp(s))).dimensionless_delta_F
    s_grid = np.linspace(math.log(lo), math.log(hi), coarse)
    vals = np.array([f(s) for s in s_grid])
    i = int(np.argmin(vals))
    if i == 0 or i == coarse - 1:
        return ForceMinimum(float(math.exp(s_grid[i])), float(vals[i]))
    res = minimize_scalar(f, bracket=(s_grid[i - 1], s_grid[i], s_grid[i + 1]), method="golden",
                          options={"xtol": rtol / max(1.0, abs(s_grid[i]))})
    return ForceMinimum(float(math.exp(res.x)), float(res.fun))
