"""Spectra of the three solvable settings.

* the free line with a point singularity (bound states only),
* the infinite well ``[-l, l]`` with Dirichlet walls and a singularity at the centre,
* the harmonic oscillator with an inverse-square core, ``V = m w^2 x^2/2 + g/x^2``.

Plus continuation of well levels along a closed loop on the spectral torus.

In the well, ``Psi`` and ``Psi'`` are both proportional to the amplitude pair
``(A, B)`` of ``sin k(l - |x|)`` on the two sides, so the connection condition
forces ``(A, B)`` to be an eigenvector of ``U``.  Each eigenphase ``theta``
then gives the channel equation ``k L0 cot(kl) = tan(theta/2)``, which is
solved in the pole-free form ``k L0 cos(kl) cos(theta/2) - sin(kl) sin(theta/2) = 0``
(divided by ``k`` to remove the spurious root at ``k = 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from . import specfun
from .errors import TrackingAmbiguityError
from .singularity import (
    SIGMA0,
    CharacteristicMatrix,
    SingularityParams,
    build_characteristic_matrix,
    classify,
    inverse_scale_length,
)

SYMMETRIC, ANTISYMMETRIC, NO_PARITY = "symmetric", "antisymmetric", "none"
PLUS, MINUS, NO_SERIES = "plus", "minus", "none"


@dataclass(frozen=True)
class Level:
    """One eigenvalue.

    ``momentum_k`` is ``k >= 0`` for scattering-type levels and ``kappa`` for
    bound (negative-energy) levels, which carry ``bound=True``; oscillator
    levels have no momentum and store ``None``.
    """

    index: int
    momentum_k: Optional[float]
    energy: float
    parity: str = NO_PARITY
    series: str = NO_SERIES
    bound: bool = False

    @property
    def signed_momentum(self) -> float:
        """k for ordinary levels, -kappa for bound ones (continuous through E = 0)."""
        return -self.momentum_k if self.bound else self.momentum_k


@dataclass(frozen=True)
class WellParams:
    half_width_l: float
    singularity: SingularityParams
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not self.half_width_l > 0:
            raise ValueError("half_width_l must be positive")

    @property
    def L0(self) -> float:
        return self.singularity.L0

    @property
    def matrix(self) -> CharacteristicMatrix:
        return build_characteristic_matrix(self.singularity)

    def energy(self, k: float, bound: bool = False) -> float:
        e = self.hbar**2 * k**2 / (2.0 * self.mass)
        return -e if bound else e


def _channel_residual(theta: float, L0: float, l: float):
    c, s = math.cos(theta / 2), math.sin(theta / 2)

    def r(k):
        k = np.asarray(k, dtype=float)
        kl = k * l
        # np.sinc(x) = sin(pi x)/(pi x)
        return L0 * c * np.cos(kl) - l * s * np.sinc(kl / math.pi)

    return r


def _bound_kappa(theta: float, L0: float, l: float) -> Optional[float]:
    """kappa of the negative-energy level of one channel, if any (needs 0 < L(theta) < l)."""
    inv_L = inverse_scale_length(theta, L0)
    if not math.isfinite(inv_L) or inv_L <= 1.0 / l:
        return None
    # kappa coth(kappa l) increases monotonically from 1/l at 0; kappa <= 1/L
    def h(kappa):
        x = kappa * l
        coth = 1.0 / math.tanh(x) if x > 1e-8 else 1.0 / x + x / 3.0
        return kappa * coth - inv_L

    lo, hi = 1e-12 / l, inv_L + 1.0 / l
    if h(lo) >= 0:
        return 0.0
    return brentq(h, lo, hi, xtol=1e-15 * hi, rtol=1e-15, maxiter=500)


def channel_momenta(theta: float, L0: float, l: float, count: int) -> list[float]:
    """Lowest ``count`` signed momenta of one eigen-channel (negative = bound, -kappa).

    ``k L0 cot(kl)`` is monotone on every branch ``kl in (m pi, (m+1) pi)``, so
    each branch ``m >= 1`` holds exactly one root and branch 0 holds one iff
    ``1/L(theta) < 1/l``; otherwise the channel has a bound level instead
    (or a zero-energy level at equality).  Every root is bracketed and
    refined with Brent's method.
    """
    inv_L = inverse_scale_length(theta, L0)
    out: list[float] = []
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if math.isinf(inv_L):
        # Dirichlet channel: sin(kl) = 0
        return [m * math.pi / l for m in range(1, count + 1)]

    def r(k):
        x = k * l
        return L0 * c * math.cos(x) - l * s * (math.sin(x) / x if x != 0 else 1.0)

    m0 = 1
    if inv_L > 1.0 / l:
        out.append(-_bound_kappa(theta, L0, l))
    elif inv_L == 1.0 / l:
        out.append(0.0)
    else:
        m0 = 0
    m = m0
    while len(out) < count:
        a, b = m * math.pi / l, (m + 1) * math.pi / l
        if m == 0:
            a = 1e-300
        out.append(brentq(r, a, b, xtol=1e-15 * b, rtol=1e-15, maxiter=200))
        m += 1
    return out[:count]


def _eigen_channels(U: CharacteristicMatrix, p: SingularityParams) -> list[tuple[float, str, str]]:
    """(theta, parity label, series label) for both eigen-channels of U."""
    cls = classify(U)
    if cls.parity_invariant:
        v_sym = np.array([1.0, 1.0]) / math.sqrt(2)
        v_anti = np.array([1.0, -1.0]) / math.sqrt(2)
        th_s = float(np.angle(v_sym @ U.u @ v_sym)) % (2 * math.pi)
        th_a = float(np.angle(v_anti @ U.u @ v_anti)) % (2 * math.pi)
        return [(th_s, SYMMETRIC, PLUS), (th_a, ANTISYMMETRIC, MINUS)]
    return [(p.theta_plus, NO_PARITY, PLUS), (p.theta_minus, NO_PARITY, MINUS)]


def _levels_from_channels(w: WellParams, chans, count: int) -> list[Level]:
    l, L0 = w.half_width_l, w.L0
    raw = []
    for theta, parity, series in chans:
        for s in channel_momenta(theta, L0, l, count):
            bound = s < 0
            raw.append((w.energy(abs(s), bound), abs(s), parity, series, bound))
    # degenerate pairs: the plus series first
    raw.sort(key=lambda r: (r[0], r[3] != PLUS))
    return [Level(i, k, e, par, ser, b) for i, (e, k, par, ser, b) in enumerate(raw)]


def well_spectrum(w: WellParams, count: int) -> list[Level]:
    """Lowest ``count`` levels of each eigen-channel of the centre singularity, merged.

    For parity-invariant singularities the channels are labelled symmetric
    (eigenphase on (1, 1)) and antisymmetric (eigenphase on (1, -1)).
    """
    if count < 1:
        raise ValueError("count must be positive")
    U = w.matrix
    return _levels_from_channels(w, _eigen_channels(U, w.singularity), count)


def well_spectrum_parity_invariant(w: WellParams, count: int) -> list[Level]:
    if not classify(w.matrix).parity_invariant:
        raise ValueError("singularity is not parity invariant (sigma1 U sigma1 != U)")
    return well_spectrum(w, count)


def line_bound_states(p: SingularityParams, hbar: float = 1.0, mass: float = 1.0) -> list[Level]:
    """Bound states of the free line with the singularity at the origin.

    Inserting ``A e^{-kappa x}`` / ``B e^{kappa x}`` gives ``Psi' = -kappa Psi``,
    so ``det[(U - I) - i L0 kappa (U + I)] = 0`` factorises over the
    eigen-channels of ``U`` into ``sin(theta/2) - L0 kappa cos(theta/2) = 0``,
    i.e. ``kappa = 1/L(theta)``; only ``kappa > 0`` is normalisable.
    """
    U = build_characteristic_matrix(p)
    levels = []
    for theta, parity, series in _eigen_channels(U, p):
        inv_L = inverse_scale_length(theta, p.L0)
        if math.isfinite(inv_L) and inv_L > 0:
            kappa = inv_L
            levels.append((-(hbar * kappa) ** 2 / (2 * mass), kappa, parity, series))
    levels.sort()
    return [Level(i, k, e, par, ser, True) for i, (e, k, par, ser) in enumerate(levels)]


def line_bound_determinant(U: CharacteristicMatrix, L0: float, kappa: float) -> complex:
    """det[(U - I) - i L0 kappa (U + I)], vanishing at line bound states."""
    return complex(np.linalg.det((U.u - SIGMA0) - 1j * L0 * kappa * (U.u + SIGMA0)))


# ---------------------------------------------------------------------------
# Scale-invariant well states (Berry-phase states)


@dataclass(frozen=True)
class WellState:
    k: float
    l: float
    amp_right: complex
    amp_left: complex

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k, l = self.k, self.l
        right = self.amp_right * np.sin(k * (x - l)) * (x > 0)
        left = self.amp_left * np.sin(k * (x + l)) * (x < 0)
        return right + left

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        k, l = self.k, self.l
        right = self.amp_right * k * np.cos(k * (x - l)) * (x > 0)
        left = self.amp_left * k * np.cos(k * (x + l)) * (x < 0)
        return right + left

    def boundary_limits(self) -> tuple[complex, complex, complex, complex]:
        """psi(+0), psi(-0), psi'(+0), psi'(-0)."""
        k, l = self.k, self.l
        return (
            self.amp_right * math.sin(-k * l),
            self.amp_left * math.sin(k * l),
            self.amp_right * k * math.cos(-k * l),
            self.amp_left * k * math.cos(k * l),
        )


def scale_invariant_well_state(mu: float, nu: float, l: float, n: int) -> WellState:
    """psi_n = c+(mu) xi_n^+ + c-(mu) e^{i nu} xi_n^-, normalised, k_n = (n - 1/2) pi / (2l).

    ``xi^+-(x) = l^{-1/2} sin k_n (x -+ l)`` on ``+-x > 0`` and
    ``c+-(mu) = cos(mu/2) -+ sin(mu/2)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    k = (n - 0.5) * math.pi / (2 * l)
    c_plus = math.cos(mu / 2) - math.sin(mu / 2)
    c_minus = math.cos(mu / 2) + math.sin(mu / 2)
    # integral of sin^2 k(x - l) over one half, per unit amplitude^2
    half = 0.5 * l - math.sin(2 * k * l) / (4 * k)
    norm = math.sqrt((c_plus**2 + c_minus**2) * half / l)
    a_r = c_plus / math.sqrt(l) / norm
    a_l = c_minus * np.exp(1j * nu) / math.sqrt(l) / norm
    return WellState(k, l, complex(a_r), complex(a_l))


# ---------------------------------------------------------------------------
# Oscillator with inverse-square core


@dataclass(frozen=True)
class OscillatorParams:
    omega: float = 1.0
    g: float = 0.0
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if self.omega <= 0 or self.hbar <= 0 or self.mass <= 0:
            raise ValueError("omega, hbar and mass must be positive")
        g_max = 3 * self.hbar**2 / (8 * self.mass)
        # g = 0 is the harmonic limit a = 1/2, kept as a closed end of the range
        if not 0.0 <= self.g < g_max:
            raise ValueError(f"g={self.g} outside [0, 3 hbar^2/(8m)) = [0, {g_max})")

    @classmethod
    def from_a(cls, a: float, omega: float = 1.0, hbar: float = 1.0, mass: float = 1.0) -> "OscillatorParams":
        """Parameters with a = (1/2) sqrt(1 + 8 m g / hbar^2) prescribed."""
        if not 0.5 <= a < 1.0:
            raise ValueError(f"a={a} outside [1/2, 1)")
        g = (4 * a * a - 1) * hbar**2 / (8 * mass)
        return cls(omega, g, hbar, mass)

    @property
    def a(self) -> float:
        return 0.5 * math.sqrt(1 + 8 * self.mass * self.g / self.hbar**2)

    @property
    def c1(self) -> float:
        return 1 + self.a

    @property
    def c2(self) -> float:
        return 1 - self.a

    @property
    def inverse_length(self) -> float:
        """sqrt(m omega / hbar); y = inverse_length * x."""
        return math.sqrt(self.mass * self.omega / self.hbar)

    def y(self, x):
        return self.inverse_length * np.asarray(x, dtype=float)

    def lam(self, energy: float) -> float:
        return energy / (self.hbar * self.omega)


def calogero_condition_constant(o: OscillatorParams) -> float:
    """sqrt(m w/hbar) Gamma(c2) / ((c1 - c2) Gamma(c1)), the prefactor of the spectral condition."""
    return o.inverse_length * specfun.gamma(o.c2) / ((o.c1 - o.c2) * specfun.gamma(o.c1))


def calogero_residual(o: OscillatorParams, inv_L: float) -> Callable[[float], float]:
    """Continuous, bounded form of the Gamma-ratio spectral condition.

    ``C Gamma((c1-lam)/2) / Gamma((c2-lam)/2) = 1/L`` is multiplied through by
    ``1/Gamma((c1-lam)/2)`` and normalised by a positive envelope so neither
    poles nor factorial growth reach the root scanner.
    """
    C = calogero_condition_constant(o)
    c1, c2 = o.c1, o.c2

    if math.isinf(inv_L):
        return lambda lam: specfun.rgamma((c1 - lam) / 2)
    if inv_L == 0.0:
        return lambda lam: specfun.rgamma((c2 - lam) / 2)

    def r(lam):
        r2 = specfun.rgamma((c2 - lam) / 2)
        r1 = specfun.rgamma((c1 - lam) / 2)
        env = abs(C * r2) + abs(inv_L * r1)
        return (C * r2 - inv_L * r1) / env

    return r


def calogero_lambdas(o: OscillatorParams, inv_L: float, count: int, analytic: bool = True) -> list[float]:
    """Lowest ``count`` roots lam = E/(hbar w) of the spectral condition for one channel.

    ``inv_L = 0`` and ``inv_L = inf`` have the closed forms ``2n + c2`` and
    ``2n + c1``; ``analytic=False`` root-scans them anyway.
    """
    c1, c2 = o.c1, o.c2
    if analytic and inv_L == 0.0:
        return [2 * n + c2 for n in range(count)]
    if analytic and math.isinf(inv_L):
        return [2 * n + c1 for n in range(count)]
    lower = c2 - 1.0
    if math.isfinite(inv_L) and inv_L > 0:
        # large-|lam| behaviour C (|lam|/2)^a locates the lowest root
        C = calogero_condition_constant(o)
        lower = min(lower, -2.0 * (2.0 * inv_L / C) ** (1.0 / o.a) - 2.0)
    upper = c1 + 2.0 * count + 1.0
    cfg = specfun.RootScanConfig(lower, upper, scan_step=0.01, refine_tolerance=1e-13, max_roots=count + 8)
    roots = specfun.find_roots(calogero_residual(o, inv_L), cfg)
    return roots[:count]


def calogero_spectrum(o: OscillatorParams, L_plus: float, L_minus: float, count: int,
                      analytic: bool = True) -> list[Level]:
    """Two series of levels, one per channel, from the scale lengths L(theta+-).

    ``L = inf`` (Neumann-like) and ``L = 0`` (Dirichlet-like) are the special cases.
    """
    if count < 1:
        raise ValueError("count must be positive")
    levels = []
    for L, series in ((L_plus, PLUS), (L_minus, MINUS)):
        inv_L = math.inf if L == 0 else (0.0 if math.isinf(L) else 1.0 / L)
        for lam in calogero_lambdas(o, inv_L, count, analytic):
            levels.append((lam * o.hbar * o.omega, series))
    levels.sort()
    return [Level(i, None, e, NO_PARITY, s) for i, (e, s) in enumerate(levels)]


# ---------------------------------------------------------------------------
# Level continuation along loops on the spectral torus


@dataclass
class TrackingResult:
    """Per-level trajectories of signed momenta along a torus loop.

    ``shifts[i]`` is ``initial_index - final_index`` of tracked level ``i``
    in the merged energy ordering (positive = moved down), or ``None`` if
    the level escaped to ``E -> -inf`` on the way.
    """

    thetas: np.ndarray
    trajectories: list[list[float]]
    channels: list[int]
    initial_indices: list[int]
    final_indices: list[Optional[int]]
    start_spectrum: np.ndarray
    end_spectrum: np.ndarray
    refinements: int = 0

    @property
    def shifts(self) -> list[Optional[int]]:
        return [None if f is None else i - f for i, f in zip(self.initial_indices, self.final_indices)]

    @property
    def permutation(self) -> list[Optional[int]]:
        return self.shifts


def _signed_to_energy(s):
    s = np.asarray(s, dtype=float)
    return np.sign(s) * s * s


def _spectrum_at(theta_pair, L0, l, count):
    return [np.array(channel_momenta(th, L0, l, count)) for th in theta_pair]


def _merged_energies(chan_moms) -> list[tuple[float, int, int]]:
    """Sorted (energy, channel, position) over both channels."""
    items = []
    for c, moms in enumerate(chan_moms):
        for j, s in enumerate(moms):
            items.append((float(_signed_to_energy(s)), c, j))
    items.sort()
    return items


def _match(prev: float, cands: np.ndarray, rel_ambiguity: float):
    """Nearest candidate to ``prev``; flags whether the continuation is ambiguous."""
    d = np.abs(cands - prev)
    order = np.argsort(d)
    best = int(order[0])
    if len(cands) < 2:
        return best, False
    spacing = np.min(np.abs(np.delete(cands, best) - cands[best]))
    too_far = d[best] > 0.5 * spacing
    close_call = d[order[1]] - d[best] < rel_ambiguity * spacing
    return best, bool(too_far or close_call)


def track_levels_along_loop(
    loop_points: Sequence[Sequence[float]],
    well: WellParams,
    n_levels: int,
    steps: int,
    max_refine: int = 14,
    escape_factor: float = 10.0,
) -> TrackingResult:
    """Continue the lowest ``n_levels`` well levels around a closed loop in (theta+, theta-).

    The loop polyline is resampled to ``steps`` equal-parameter segments.  Levels
    are continued by nearest match within their eigen-channel (levels of one
    channel never cross); a step is halved whenever a match moves more than
    half the local spacing or two candidates are within 10% of the spacing of
    each other.  Bound levels whose kappa exceeds ``escape_factor`` times the
    highest tracked momentum are recorded as escaped to ``-inf``.
    """
    pts = np.asarray(loop_points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("loop must be a sequence of (theta_plus, theta_minus) pairs")
    closure = np.abs(np.remainder(pts[-1] - pts[0] + math.pi, 2 * math.pi) - math.pi)
    if np.max(closure) > 1e-9:
        raise ValueError("loop is not closed on the torus")
    if steps < 1 or n_levels < 1:
        raise ValueError("steps and n_levels must be positive")
    if not classify(well.matrix).parity_invariant:
        raise ValueError("level tracking is implemented for parity-invariant well singularities")

    l, L0 = well.half_width_l, well.L0
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    arclen = np.concatenate([[0.0], np.cumsum(seg)])
    if arclen[-1] == 0:
        arclen = np.linspace(0.0, 1.0, len(pts))

    def point_at(t):
        s = t * arclen[-1]
        return (np.interp(s, arclen, pts[:, 0]), np.interp(s, arclen, pts[:, 1]))

    n_cand = n_levels + 4
    chans0 = _spectrum_at(point_at(0.0), L0, l, n_cand)
    merged0 = _merged_energies(chans0)[:n_levels]
    channels = [c for _, c, _ in merged0]
    current = [float(chans0[c][j]) for _, c, j in merged0]
    trajectories = [[v] for v in current]
    alive = [True] * n_levels
    k_top = max(abs(v) for v in current) + math.pi / l
    kappa_escape = escape_factor * k_top

    t_grid = np.linspace(0.0, 1.0, steps + 1)
    thetas = [point_at(0.0)]
    refinements = 0

    def advance(t0, t1, depth):
        nonlocal refinements
        cands = _spectrum_at(point_at(t1), L0, l, n_cand)
        proposal = list(current)
        ambiguous = False
        taken: dict[tuple[int, int], int] = {}
        for i in range(n_levels):
            if not alive[i]:
                continue
            c = channels[i]
            if current[i] < -kappa_escape:
                alive[i] = False
                continue
            best, amb = _match(current[i], cands[c], 0.1)
            key = (c, best)
            if key in taken:
                amb = True
            taken[key] = i
            ambiguous |= amb
            proposal[i] = float(cands[c][best])
        if ambiguous:
            if depth >= max_refine:
                raise TrackingAmbiguityError(
                    f"ambiguous level continuation near t={t1:.6g}; increase steps"
                )
            refinements += 1
            tm = 0.5 * (t0 + t1)
            advance(t0, tm, depth + 1)
            advance(tm, t1, depth + 1)
            return
        for i in range(n_levels):
            if alive[i]:
                current[i] = proposal[i]

    for t0, t1 in zip(t_grid[:-1], t_grid[1:]):
        advance(t0, t1, 0)
        thetas.append(point_at(t1))
        for i in range(n_levels):
            trajectories[i].append(current[i] if alive[i] else -math.inf)

    chans_end = _spectrum_at(point_at(1.0), L0, l, n_cand + 2)
    merged_end = _merged_energies(chans_end)
    final = []
    for i in range(n_levels):
        if not alive[i]:
            final.append(None)
            continue
        pos = int(np.argmin(np.abs(chans_end[channels[i]] - current[i])))
        rank = next(r for r, (_, c, j) in enumerate(merged_end) if c == channels[i] and j == pos)
        final.append(rank)

    start_e = np.array([e for e, _, _ in _merged_energies(chans0)])[:n_levels]
    end_e = np.array([e for e, _, _ in merged_end])[:n_levels]
    return TrackingResult(
        thetas=np.array(thetas),
        trajectories=trajectories,
        channels=channels,
        initial_indices=list(range(n_levels)),
        final_indices=final,
        start_spectrum=start_e,
        end_spectrum=end_e,
        refinements=refinements,
    )


def torus_loop(kind: str, points: int = 401, turns: int = 1, reverse: bool = False,
               theta0: float = 0.0) -> np.ndarray:
    """Standard loops on the spectral torus.

    ``"self_dual"``: (theta, theta); ``"shifted"``: (theta, theta + pi);
    ``"constant"``: the single point (theta0, theta0 + pi) repeated.
    """
    th = np.linspace(0.0, 2 * math.pi * turns, points)
    if reverse:
        th = th[::-1]
    if kind == "self_dual":
        pts = np.column_stack([th + theta0, th + theta0])
    elif kind == "shifted":
        pts = np.column_stack([th + theta0, th + theta0 + math.pi])
    elif kind == "constant":
        pts = np.tile([theta0, theta0 + math.pi], (points, 1))
    else:
        raise ValueError(f"unknown loop kind {kind!r}")
    return pts


# ---------------------------------------------------------------------------
# Finite-difference oracle


def _oracle_boundary_block(U: CharacteristicMatrix, L0: float):
    """Free boundary directions and the boundary quadratic form restricted to them.

    The connection condition splits over the eigenvectors ``v_j`` of ``U``:
    Dirichlet directions (eigenphase pi) constrain ``v_j^dagger Psi = 0``, the
    others give ``v_j^dagger Psi' = -(tan(theta_j/2)/L0) v_j^dagger Psi``, which
    enters the energy form as ``Psi^dagger K Psi``.
    """
    w, vecs = np.linalg.eig(U.u)
    # orthonormalise (needed for degenerate eigenvalues)
    q, _ = np.linalg.qr(vecs)
    free, k_diag = [], []
    for j in range(2):
        lam = complex(q[:, j].conj() @ U.u @ q[:, j])
        theta = float(np.angle(lam))
        if abs(lam + 1) < 1e-12:
            continue
        free.append(q[:, j])
        k_diag.append(-math.tan(theta / 2) / L0)
    return free, k_diag


def finite_difference_oracle(well: WellParams, grid_points: int, n_levels: int,
                             with_vectors: bool = False):
    """Lowest levels of the discretised well, independent of the root finder.

    Vertex-centred grid with ``grid_points // 2`` intervals per side, linear
    elements with lumped mass (half mass at the two boundary nodes at
    ``x = +-0``), and the connection condition imposed through the energy
    form ``int |psi'|^2 + Psi^dagger K Psi`` with Dirichlet directions removed.
    This is the ghost-point Robin scheme and converges at second order.
    Ordering the unknowns as ``(psi(-l+h) ... psi(-0), psi(+0) ... psi(l-h))``
    keeps the matrix tridiagonal; its phases are gauged away so a real
    symmetric tridiagonal solver applies.
    """
    from scipy.linalg import eigh_tridiagonal

    if grid_points < 200:
        raise ValueError("grid_points must be >= 200")
    U = well.matrix
    cls = classify(U)
    l, L0 = well.half_width_l, well.L0
    M = grid_points // 2
    h = l / M
    free, k_diag = _oracle_boundary_block(U, L0)

    # interior chains: left nodes -(M-1)h..-h, right nodes h..(M-1)h
    n_in = M - 1
    diag_in = np.full(n_in, 2.0 / h)
    off_in = np.full(n_in - 1, -1.0 / h)
    mass_in = np.full(n_in, h)

    # boundary dofs: Psi = sum_j t_j free_j; row couples to u_1 (right) via Psi[0], w_1 via Psi[1]
    nb = len(free)
    if nb == 2:
        # keep the nodes psi(-0), psi(+0) themselves; K in that basis
        K = sum(kd * np.outer(v, v.conj()) for v, kd in zip(free, k_diag))
        bdiag = np.array([1.0 / h + K[1, 1].real, 1.0 / h + K[0, 0].real])
        bmass = np.array([h / 2, h / 2])
        b_off = [K[1, 0]]  # between psi(-0) and psi(+0)
        b_to_left = [-1.0 / h]
        b_to_right = [-1.0 / h]
    elif nb == 1:
        v = free[0]
        bdiag = np.array([(abs(v[0]) ** 2 + abs(v[1]) ** 2) / h + k_diag[0]])
        bmass = np.array([h / 2])
        b_off = []
        b_to_left = [-v[1] / h]
        b_to_right = [-v[0] / h]
    else:
        bdiag = np.zeros(0)
        bmass = np.zeros(0)
        b_off, b_to_left, b_to_right = [], [], []

    # assemble diagonal, off-diagonal (complex) and mass in the chain ordering
    diag = np.concatenate([diag_in, bdiag, diag_in])
    mass = np.concatenate([mass_in, bmass, mass_in])
    off = list(off_in)
    if nb:
        off.append(b_to_left[0])
        off.extend(b_off)
        off.append(np.conj(b_to_right[-1]))
    else:
        off.append(0.0)  # two decoupled halves
    off.extend(off_in)
    off = np.asarray(off, dtype=complex)

    # diagonal gauge D with D_{i+1} = D_i conj(o_i)/|o_i| makes every off-diagonal |o_i|
    mag = np.abs(off)
    phase = np.ones(len(diag), dtype=complex)
    for i, o in enumerate(off):
        phase[i + 1] = phase[i] * (np.conj(o) / abs(o) if abs(o) > 0 else 1.0)
    sm = np.sqrt(mass)
    d = diag / mass
    e = mag / (sm[:-1] * sm[1:])
    want = min(n_levels, len(d)) - 1
    if with_vectors or cls.parity_invariant:
        vals, vecs = eigh_tridiagonal(d, e, select="i", select_range=(0, want))
        vecs = (phase[:, None] * vecs) / sm[:, None]
    else:
        vals = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, want))
        vecs = None

    levels = []
    for i, lam in enumerate(vals):
        bound = lam < 0
        k = math.sqrt(abs(lam))
        parity = NO_PARITY
        if cls.parity_invariant and vecs is not None:
            parity = _oracle_parity(vecs[:, i], n_in, nb)
        levels.append(Level(i, k, well.hbar**2 * lam / (2 * well.mass), parity, NO_SERIES, bound))
    if with_vectors:
        return levels, vecs
    return levels


def _oracle_parity(vec: np.ndarray, n_in: int, nb: int) -> str:
    left = vec[:n_in][::-1]
    right = vec[n_in + nb:]
    overlap = np.vdot(left, right)
    norm = np.vdot(left, left).real + np.vdot(right, right).real
    if norm == 0 or abs(overlap) < 0.25 * norm:
        return NO_PARITY
    # overall phase of the eigenvector is arbitrary; overlap sign is not
    return SYMMETRIC if overlap.real > 0 else ANTISYMMETRIC
