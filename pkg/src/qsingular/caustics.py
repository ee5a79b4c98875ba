"""Oscillator with an inverse-square core: eigenbasis, evolution, currents, copying.

The potential is ``m w^2 x^2/2 + g/x^2`` on both sides of a singularity at
the origin.  In ``y = sqrt(m w/hbar) x`` and ``u = y^2`` the two local
solutions on ``x > 0`` are

    phi1 = y^{c1 - 1/2} e^{-u/2} M((c1 - lam)/2, c1; u)    (~ y^{1/2 + a})
    phi2 = y^{c2 - 1/2} e^{-u/2} M((c2 - lam)/2, c2; u)    (~ y^{1/2 - a})

with ``c1,2 = 1 +- a``.  Modes of a parity-invariant singularity are even
(channel ``plus``) or odd (channel ``minus``) extensions of the decaying
combination fixed by the channel's scale length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, special

from . import specfun
from .errors import ConvergenceError
from .spectra import OscillatorParams, calogero_lambdas

PLUS, MINUS = "plus", "minus"
Y_MAX = 36.0  # beyond this e^{-y^2/2} underflows before the polynomial growth is absorbed


def _check_y(y):
    if np.any(np.abs(y) > Y_MAX):
        raise ValueError(f"mode evaluation supported for |y| <= {Y_MAX}")


def oscillator_mode(o: OscillatorParams, series: int, lambda_n: float,
                    parity: str = "half") -> Callable[[np.ndarray], np.ndarray]:
    """Unnormalised local solution phi^(series) at lam = lambda_n as a function of x.

    ``parity`` selects the extension to ``x < 0``: ``"half"`` (zero there),
    ``"even"`` or ``"odd"``.  Uses :func:`specfun.kummer_m`.
    """
    if series not in (1, 2):
        raise ValueError("series must be 1 or 2")
    if parity not in ("half", "even", "odd"):
        raise ValueError("parity must be 'half', 'even' or 'odd'")
    c = o.c1 if series == 1 else o.c2
    alpha = (c - lambda_n) / 2.0

    def f(x):
        x = np.asarray(x, dtype=float)
        y = o.y(np.abs(x))
        _check_y(y)
        u = y * y
        with np.errstate(divide="ignore"):
            core = np.array([specfun.kummer_m(alpha, c, float(v)) for v in np.ravel(u)]).reshape(u.shape)
            val = np.where(y > 0, y ** (c - 0.5), 0.0 if c > 0.5 else (1.0 if c == 0.5 else np.inf)) * np.exp(-u / 2) * core
        if parity == "half":
            return np.where(x > 0, val, 0.0)
        if parity == "odd":
            return np.sign(x) * val
        return val

    return f


# ---------------------------------------------------------------------------
# Normalised modes


def _ladder_values(o: OscillatorParams, c: float, n_max: int, y: np.ndarray):
    """Normalised half-line ladder functions and y-derivatives for n = 0..n_max.

    Returns arrays (n_max+1, len(y)) of ``f_n(y)`` and ``df_n/dy`` where
    ``f_n = s^{1/2} sqrt(n!/Gamma(n+c)) y^{c-1/2} e^{-u/2} L_n^{(c-1)}(u)``
    is normalised on the full line after even/odd extension.
    """
    y = np.asarray(y, dtype=float)
    _check_y(y)
    alpha = c - 1.0
    u = y * y
    s_half = math.sqrt(o.inverse_length)
    vals = np.empty((n_max + 1, y.size))
    ders = np.empty((n_max + 1, y.size))
    prev = np.zeros_like(y)
    cur = np.full_like(y, 1.0 / math.sqrt(specfun.gamma(c)))
    # the derivative is infinite at y = 0 (and the c2 ladder itself); let it propagate
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        pref = s_half * y ** (c - 0.5) * np.exp(-u / 2)
        pref_d = s_half * y ** (c - 1.5) * np.exp(-u / 2)
        for n in range(n_max + 1):
            vals[n] = pref * cur
            # y d/dy [y^{c-1/2} e^{-u/2} l_n(u)] = y^{c-1/2} e^{-u/2} [(c - 1/2 - u + 2n) l_n - 2 sqrt(n(n+alpha)) l_{n-1}]
            ders[n] = pref_d * ((c - 0.5 - u + 2 * n) * cur - 2 * math.sqrt(n * (n + alpha)) * prev)
            nxt = ((2 * n + alpha + 1 - u) * cur - math.sqrt(n * (n + alpha)) * prev) / math.sqrt((n + 1) * (n + alpha + 1))
            prev, cur = cur, nxt
    return vals, ders


def _ladder_leading(o: OscillatorParams, c: float, n: int) -> float:
    """Coefficient of y^{c-1/2} in the normalised ladder function f_n."""
    return math.sqrt(o.inverse_length) * math.exp(0.5 * (specfun.lgamma(n + c) - specfun.lgamma(n + 1.0))) / specfun.gamma(c)


def _tricomi_by_kummer(a: float, c: float, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """U(a, c; u) from the two Kummer M solutions, and the cancellation ratio of the terms."""
    with np.errstate(all="ignore"):
        t1 = special.gamma(1 - c) * special.rgamma(a - c + 1) * special.hyp1f1(a, c, u)
        t2 = special.gamma(c - 1) * special.rgamma(a) * u ** (1 - c) * special.hyp1f1(a - c + 1, 2 - c, u)
        s = t1 + t2
        return s, (np.abs(t1) + np.abs(t2)) / np.abs(s)


def _tricomi_by_laguerre(a: float, c: float, u: np.ndarray, nodes: int = 80) -> np.ndarray:
    """U(a, c; u) for a > 0 from its Laplace integral by generalised Gauss-Laguerre (good for u >= 2)."""
    s, w = special.roots_genlaguerre(nodes, a - 1)
    return u ** (-a) * special.rgamma(a) * (((1 + s[None, :] / u[:, None]) ** (c - a - 1)) @ w)


def _tricomi_u(a: float, c: float, u: np.ndarray) -> np.ndarray:
    """Tricomi U(a, c; u) for non-integer c.

    For a > 0 and u >= 2 the Laplace integral is used (scipy is slow there).
    Otherwise scipy's value where finite; where it is not, the Kummer
    connection formula when its two terms do not cancel badly, and mpmath
    as the last resort.
    """
    u = np.asarray(u, dtype=float)
    if a > 0:
        far = u >= 2.0
        vals = np.empty_like(u)
        vals[far] = _tricomi_by_laguerre(a, c, u[far])
        vals[~far] = special.hyperu(a, c, u[~far])
    else:
        vals = np.asarray(special.hyperu(a, c, u), dtype=float)
    bad = ~np.isfinite(vals) & (u > 0)
    if not np.any(bad):
        return vals
    vals = vals.copy()
    alt, ratio = _tricomi_by_kummer(a, c, u[bad])
    ok = np.isfinite(alt) & (ratio < 1e4)
    idx = np.flatnonzero(bad)
    vals[idx[ok]] = alt[ok]
    if not np.all(ok):
        import mpmath

        vals[idx[~ok]] = [float(mpmath.hyperu(a, c, float(v))) for v in u[idx[~ok]]]
    return vals


def _decaying(o: OscillatorParams, lam: float, y):
    """e^{-u/2} y^{c1-1/2} U((c1-lam)/2, c1; u): the solution decaying at infinity."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    u = y * y
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.exp(-u / 2) * y ** (o.c1 - 0.5) * _tricomi_u((o.c1 - lam) / 2, o.c1, u)


def _decaying_derivative(o: OscillatorParams, lam: float, y):
    """d/dy of :func:`_decaying`, using U'(a, c; u) = -a U(a+1, c+1; u)."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    u = y * y
    a = (o.c1 - lam) / 2
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        base = np.exp(-u / 2) * y ** (o.c1 - 0.5)
        return base * (((o.c1 - 0.5) / y - y) * _tricomi_u(a, o.c1, u)
                       - 2 * y * a * _tricomi_u(a + 1, o.c1 + 1, u))


@dataclass(frozen=True)
class Mode:
    """One eigenmode.

    ``series`` is 1 or 2 on the closed-form ladders ``lam = 2n + c1`` and
    ``2n + c2`` and 0 for modes found by root scanning.  ``lead1`` and
    ``lead2`` are the coefficients of ``y^{1/2+a}`` and ``y^{1/2-a}`` of the
    normalised function near ``x = +0``.
    """

    channel: str
    series: int
    n: int
    lam: float
    energy: float
    lead1: float
    lead2: float
    norm: float = 1.0

    @property
    def parity(self) -> str:
        return "even" if self.channel == PLUS else "odd"


@dataclass
class ModeBasis:
    """Eigenbasis for a parity-invariant singularity with scale lengths (L+, L-).

    The ``plus`` channel holds even modes, the ``minus`` channel odd ones.
    At the free point (L+ = inf, L- = 0) these are the two closed-form
    ladders with energies (2n + 1 - a) hbar w and (2n + 1 + a) hbar w.
    """

    oscillator: OscillatorParams
    L_plus: float
    L_minus: float
    modes: list[Mode] = field(default_factory=list)

    @classmethod
    def build(cls, o: OscillatorParams, L_plus: float, L_minus: float, n_max: int) -> "ModeBasis":
        """Modes n = 0..n_max in each channel."""
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        modes: list[Mode] = []
        for channel, L in ((PLUS, L_plus), (MINUS, L_minus)):
            inv_L = math.inf if L == 0 else (0.0 if math.isinf(L) else 1.0 / L)
            lams = calogero_lambdas(o, inv_L, n_max + 1)
            for n, lam in enumerate(lams):
                e = lam * o.hbar * o.omega
                if inv_L == 0.0:
                    modes.append(Mode(channel, 2, n, lam, e, 0.0, _ladder_leading(o, o.c2, n)))
                elif math.isinf(inv_L):
                    modes.append(Mode(channel, 1, n, lam, e, _ladder_leading(o, o.c1, n), 0.0))
                else:
                    modes.append(_general_mode(o, channel, n, lam))
        return cls(o, L_plus, L_minus, modes)

    @classmethod
    def free_point(cls, o: OscillatorParams, n_max: int) -> "ModeBasis":
        return cls.build(o, math.inf, 0.0, n_max)

    def __len__(self) -> int:
        return len(self.modes)

    @property
    def energies(self) -> np.ndarray:
        return np.array([m.energy for m in self.modes])

    def _half_values(self, y: np.ndarray):
        """(values, y-derivatives) of every mode on y > 0, shape (len(modes), len(y))."""
        o = self.oscillator
        vals = np.empty((len(self.modes), y.size))
        ders = np.empty_like(vals)
        ladders = {}
        for c, key in ((o.c1, 1), (o.c2, 2)):
            idx = [i for i, m in enumerate(self.modes) if m.series == key]
            if idx:
                n_top = max(self.modes[i].n for i in idx)
                ladders[key] = _ladder_values(o, c, n_top, y)
        for i, m in enumerate(self.modes):
            if m.series:
                v, d = ladders[m.series]
                vals[i], ders[i] = v[m.n], d[m.n]
            else:
                vals[i] = m.norm * _decaying(o, m.lam, y)
                ders[i] = m.norm * _decaying_derivative(o, m.lam, y)
        return vals, ders

    def evaluate(self, x, derivative: bool = False):
        """Mode values (and x-derivatives) at points x, shape (len(modes), len(x))."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = self.oscillator.y(np.abs(x))
        vals, ders = self._half_values(y)
        odd = np.array([m.channel == MINUS for m in self.modes])[:, None]
        sgn = np.sign(x)[None, :]
        vals = np.where(odd, sgn * vals, vals)
        if not derivative:
            return vals
        s = self.oscillator.inverse_length
        # even: d/dx f(|x|) = sign(x) f'; odd: d/dx sign(x) f(|x|) = f'
        ders = s * np.where(odd, ders, sgn * ders)
        return vals, ders


def _general_mode(o: OscillatorParams, channel: str, n: int, lam: float) -> Mode:
    """Normalised decaying solution for a root lam off both ladders."""
    a = o.a
    # leading coefficients of the Tricomi solution: Gamma(-a)/Gamma((c2-lam)/2) and Gamma(a)/Gamma((c1-lam)/2)
    l1 = specfun.gamma(-a) * specfun.rgamma((o.c2 - lam) / 2)
    l2 = specfun.gamma(a) * specfun.rgamma((o.c1 - lam) / 2)
    q = 1.0 / (2.0 - 2.0 * a)
    # y = t^q removes the y^{1-2a} endpoint singularity of the density
    dens = lambda t: float(_decaying(o, lam, t**q)[0] ** 2) * q * t ** (q - 1)
    t_hi = (12.0 + math.sqrt(max(lam, 0.0) * 2)) ** (1.0 / q)
    half, _ = integrate.quad(dens, 0.0, t_hi, limit=400, epsabs=0.0, epsrel=1e-10)
    norm2 = 2.0 * half / o.inverse_length
    norm = 1.0 / math.sqrt(norm2)
    return Mode(channel, 0, n, lam, lam * o.hbar * o.omega, norm * l1, norm * l2, norm)


def orthonormality_defect(basis: ModeBasis, count: Optional[int] = None, panels: int = 60,
                          order: int = 40) -> float:
    """max |<m_i, m_j> - delta_ij| over the first ``count`` modes per channel.

    Composite Gauss-Legendre in ``t`` with ``y = t^q``, ``q = 1/(2 - 2a)``,
    which makes the ``y^{1-2a}`` endpoint behaviour smooth.
    """
    o = basis.oscillator
    q = 1.0 / (2.0 - 2.0 * o.a)
    sel = [i for i, m in enumerate(basis.modes) if count is None or m.n < count]
    lam_top = max(basis.modes[i].lam for i in sel)
    y_hi = min(Y_MAX, math.sqrt(2 * lam_top) + 12.0)
    t_hi = y_hi ** (1.0 / q)
    g, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, t_hi, panels + 1)
    t = ((edges[:-1, None] + edges[1:, None]) / 2 + (edges[1:, None] - edges[:-1, None]) / 2 * g[None, :]).ravel()
    wt = ((edges[1:, None] - edges[:-1, None]) / 2 * w[None, :]).ravel()
    y = t**q
    jac = q * t ** (q - 1) / o.inverse_length
    vals, _ = basis._half_values(y)
    vals = vals[sel]
    gram = 2.0 * (vals * (wt * jac)[None, :]) @ vals.T
    chans = np.array([basis.modes[i].channel for i in sel])
    gram[chans[:, None] != chans[None, :]] = 0.0  # opposite parity: zero on the full line
    return float(np.max(np.abs(gram - np.eye(len(sel)))))


# ---------------------------------------------------------------------------
# Expansion and evolution


@dataclass(frozen=True)
class StateExpansion:
    coefficients: np.ndarray
    truncation_n_max: int
    residual: float = 0.0

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))


def _max_wavenumber(basis: ModeBasis) -> float:
    lam = max(m.lam for m in basis.modes)
    return basis.oscillator.inverse_length * math.sqrt(2.0 * max(lam, 0.5))


def _trapezoid_weights(x: np.ndarray) -> np.ndarray:
    w = np.zeros_like(x)
    dx = np.diff(x)
    w[:-1] += dx / 2
    w[1:] += dx / 2
    return w


def expand_state(x, f, basis: ModeBasis) -> StateExpansion:
    """Coefficients <mode, f> by trapezoid quadrature of samples on a grid.

    The reported residual is the L2 one, ``sqrt(1 - sum|c|^2 / ||f||^2)``.

    Nodes at ``x = 0`` get zero weight (modes of the ``c2`` ladder diverge
    there integrably).  The grid must have at least eight points per
    wavelength of the most oscillatory retained mode.
    """
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=complex)
    if x.shape != f.shape or x.ndim != 1:
        raise ValueError("x and f must be 1-D arrays of equal length")
    if np.any(np.diff(x) <= 0):
        raise ValueError("grid must be strictly increasing")
    h = float(np.max(np.diff(x)))
    if h > 2 * math.pi / (8 * _max_wavenumber(basis)):
        raise ValueError(f"grid spacing {h:.3g} under-resolves the highest mode")
    w = _trapezoid_weights(x)
    w[x == 0.0] = 0.0
    modes = basis.evaluate(np.where(x == 0.0, 1e-300, x))
    modes[:, x == 0.0] = 0.0
    coef = modes @ (w * f)
    # Bessel: ||f - Pf||^2 = ||f||^2 - sum |c|^2; the pointwise reconstruction is
    # useless near x = 0 where the c2 ladder diverges
    f_norm2 = float(np.sum(w * np.abs(f) ** 2))
    res = math.sqrt(max(0.0, 1.0 - float(np.sum(np.abs(coef) ** 2)) / f_norm2)) if f_norm2 > 0 else 0.0
    n_max = max(m.n for m in basis.modes)
    return StateExpansion(coef, n_max, res)


def expand_function(f: Callable[[np.ndarray], np.ndarray], basis: ModeBasis, x_lo: float, x_hi: float,
                    panels: int = 400, order: int = 16) -> StateExpansion:
    """Coefficients of a callable profile supported in [x_lo, x_hi] by composite Gauss-Legendre.

    The residual is measured on the same nodes.
    """
    if not x_lo < x_hi:
        raise ValueError("x_lo must be < x_hi")
    g, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(x_lo, x_hi, panels + 1)
    if x_lo < 0 < x_hi:
        edges = np.union1d(edges, [0.0])
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    xs = (mid[:, None] + half[:, None] * g[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    if float(np.max(2 * half)) / order * 2 > 2 * math.pi / (8 * _max_wavenumber(basis)):
        raise ValueError("quadrature panels under-resolve the highest mode")
    fx = np.asarray(f(xs), dtype=complex)
    modes = basis.evaluate(xs)
    coef = modes @ (ws * fx)
    recon = coef @ modes
    f_norm = math.sqrt(float(np.sum(ws * np.abs(fx) ** 2)))
    res = math.sqrt(float(np.sum(ws * np.abs(fx - recon) ** 2))) / f_norm if f_norm > 0 else 0.0
    return StateExpansion(coef, max(m.n for m in basis.modes), res)


def propagate(e: StateExpansion, basis: ModeBasis, T: float) -> StateExpansion:
    """Multiply each coefficient by exp(-i E_n T / hbar)."""
    phase = np.exp(-1j * basis.energies * T / basis.oscillator.hbar)
    return StateExpansion(e.coefficients * phase, e.truncation_n_max, e.residual)


def wavefunction(e: StateExpansion, basis: ModeBasis, x) -> np.ndarray:
    return e.coefficients @ basis.evaluate(x)


# ---------------------------------------------------------------------------
# Caustics and copying


@dataclass(frozen=True)
class CausticWeights:
    return_amp: complex
    mirror_amp: complex


def caustic_weights(a: float, k: int) -> CausticWeights:
    """Amplitudes (-1)^k cos(a k pi) and i (-1)^k sin(a k pi) of the caustic-time propagator."""
    if not 0.5 <= a <= 1.0:
        raise ValueError("a must lie in [1/2, 1]")
    if k < 1:
        raise ValueError("k must be a positive integer")
    sgn = -1.0 if k % 2 else 1.0
    return CausticWeights(complex(sgn * math.cos(a * k * math.pi)), 1j * sgn * math.sin(a * k * math.pi))


def gaussian_profile(x0: float, sigma: float) -> Callable[[np.ndarray], np.ndarray]:
    """Normalised Gaussian with |f|^2 of standard deviation sigma, cut to x > 0."""
    amp = (2 * math.pi * sigma**2) ** -0.25

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, amp * np.exp(-((x - x0) ** 2) / (4 * sigma**2)), 0.0)

    return f


@dataclass(frozen=True)
class CopyResult:
    measured_return_weight: float
    measured_mirror_weight: float
    leakage: float
    predicted_return_weight: float
    predicted_mirror_weight: float
    expansion_residual: float
    window: tuple[float, float]


def _profile_window(f, s: float, pad_sigmas: float) -> tuple[float, float, float, float]:
    """(mean, rms width, lo, hi) of |f|^2 on x > 0, with the window mean +- pad_sigmas * rms."""
    xs = np.linspace(0.0, Y_MAX / s, 20001)
    dens = np.abs(np.asarray(f(xs), dtype=complex)) ** 2
    w = _trapezoid_weights(xs)
    mass = float(np.sum(w * dens))
    if mass <= 0:
        raise ValueError("profile vanishes on x > 0")
    mean = float(np.sum(w * dens * xs)) / mass
    rms = math.sqrt(float(np.sum(w * dens * (xs - mean) ** 2)) / mass)
    return mean, rms, max(0.0, mean - pad_sigmas * rms), mean + pad_sigmas * rms


def copy_simulation(f: Callable[[np.ndarray], np.ndarray], basis: ModeBasis, k: int,
                    pad_sigmas: float = 6.0, max_residual: float = 1e-3) -> CopyResult:
    """Evolve a profile on x > 0 for T = k pi / w and project onto its window and the mirror window.

    The window is the profile's mean +- ``pad_sigmas`` rms widths of ``|f|^2``
    (its +-3 sigma support padded by 3 sigma), clipped to x > 0.
    """
    o = basis.oscillator
    _, _, lo, hi = _profile_window(f, o.inverse_length, pad_sigmas)
    e = expand_function(f, basis, lo, hi)
    if e.residual > max_residual:
        raise ConvergenceError(f"expansion residual {e.residual:.3g} exceeds {max_residual}")
    ev = propagate(e, basis, k * math.pi / o.omega)
    g, w = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(lo, hi, 401)
    mid, half = (edges[:-1] + edges[1:]) / 2, (edges[1:] - edges[:-1]) / 2
    xs = (mid[:, None] + half[:, None] * g[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    f_norm2 = float(np.sum(ws * np.abs(np.asarray(f(xs), dtype=complex)) ** 2))
    ret = float(np.sum(ws * np.abs(wavefunction(ev, basis, xs)) ** 2)) / f_norm2
    mir = float(np.sum(ws * np.abs(wavefunction(ev, basis, -xs)) ** 2)) / f_norm2
    cw = caustic_weights(o.a, k)
    return CopyResult(ret, mir, 1.0 - ret - mir, abs(cw.return_amp) ** 2, abs(cw.mirror_amp) ** 2,
                      e.residual, (lo, hi))


# ---------------------------------------------------------------------------
# Current through the singularity


@dataclass(frozen=True)
class CurrentResult:
    j_plus: float
    j_minus: float
    closed_form: float


def _correction_powers(a: float, count: int) -> list[float]:
    powers = set()
    for k in range(1, count + 2):
        for p in (2 * k, 2 * k - 2 * a, 2 * k + 2 * a):
            if p > 1e-12:
                powers.add(round(p, 12))
    return sorted(powers)[:count]


def _limit_fit(eps: np.ndarray, vals: np.ndarray, powers: Sequence[float]) -> float:
    A = np.column_stack([np.ones_like(eps)] + [eps**p for p in powers])
    scale = np.max(np.abs(A), axis=0)
    sol, *_ = np.linalg.lstsq(A / scale, vals, rcond=None)
    return float(sol[0] / scale[0])


def singularity_current(e: StateExpansion, basis: ModeBasis, t: float,
                        eps0: float = 1e-2, levels: int = 12, n_powers: int = 5) -> CurrentResult:
    """Probability current j = (hbar/m) Im(psi* psi') at x -> +0 and x -> -0 at time t.

    Each one-sided limit is a least-squares fit of ``j(+-eps)`` on
    ``eps = eps0 2^{-i}`` to a constant plus the correction powers
    ``eps^{2k}``, ``eps^{2k +- 2a}`` that the local solutions produce.
    ``closed_form`` is ``-(2 a hbar s / m) Im(conj(S1) S2)`` from the
    leading coefficients ``S1, S2`` of ``y^{1/2+a}``, ``y^{1/2-a}``.
    """
    o = basis.oscillator
    ev = propagate(e, basis, t)
    c = ev.coefficients
    eps = eps0 * 0.5 ** np.arange(levels)
    powers = _correction_powers(o.a, n_powers)
    out = []
    for side in (1.0, -1.0):
        x = side * eps
        vals, ders = basis.evaluate(x, derivative=True)
        psi = c @ vals
        dpsi = c @ ders
        j = o.hbar / o.mass * np.imag(np.conj(psi) * dpsi)
        out.append(_limit_fit(eps, j, powers))
    lead1 = np.array([m.lead1 for m in basis.modes])
    lead2 = np.array([m.lead2 for m in basis.modes])
    S1, S2 = c @ lead1, c @ lead2
    closed = -2 * o.a * o.hbar * o.inverse_length / o.mass * float(np.imag(np.conj(S1) * S2))
    return CurrentResult(out[0], out[1], closed)
