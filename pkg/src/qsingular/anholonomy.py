"""Berry phase on the isospectral sphere and level anholonomy on the spectral torus.

Eigenstates of scale-invariant singularities carry the connection
``A = -(1/2)(1 + sin mu) d nu`` and the curvature ``F = -(1/2) cos mu dmu dnu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .errors import NotAnholonomyError
from .spectra import TrackingResult

SPHERE, TORUS = "sphere", "torus"
_MAX_DNU = math.pi / 50


def _wrap_pi(x):
    """Reduce into (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y == -math.pi else y + 0.0


@dataclass(frozen=True)
class LoopPath:
    """Polyline in (mu, nu) on the sphere or (theta+, theta-) on the torus."""

    points: tuple[tuple[float, float], ...]
    space: str = SPHERE

    def __post_init__(self):
        if self.space not in (SPHERE, TORUS):
            raise ValueError(f"space must be {SPHERE!r} or {TORUS!r}")
        pts = tuple((float(a), float(b)) for a, b in self.points)
        if not pts:
            raise ValueError("a loop needs at least one point")
        if not all(math.isfinite(a) and math.isfinite(b) for a, b in pts):
            raise ValueError("loop points must be finite")
        if self.space == SPHERE and any(not 0.0 <= a <= math.pi for a, _ in pts):
            raise ValueError("mu must lie in [0, pi]")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_array(cls, arr, space: str = SPHERE) -> "LoopPath":
        return cls(tuple(map(tuple, np.asarray(arr, dtype=float))), space)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=float)

    @property
    def closed(self) -> bool:
        (a0, b0), (a1, b1) = self.points[0], self.points[-1]
        if self.space == SPHERE:
            # mu is a polar angle, not periodic
            return abs(a1 - a0) < 1e-12 and abs(_wrap_pi(b1 - b0)) < 1e-9
        return abs(_wrap_pi(a1 - a0)) < 1e-9 and abs(_wrap_pi(b1 - b0)) < 1e-9

    def reversed(self) -> "LoopPath":
        return LoopPath(self.points[::-1], self.space)

    def __add__(self, other: "LoopPath") -> "LoopPath":
        """Concatenation; ``other`` must start where ``self`` ends."""
        if other.space != self.space:
            raise ValueError("cannot join loops from different spaces")
        if np.max(np.abs(np.array(self.points[-1]) - np.array(other.points[0]))) > 1e-12:
            raise ValueError("paths do not join")
        return LoopPath(self.points + other.points[1:], self.space)


def constant_mu_loop(mu: float, nu_start: float = 0.0, nu_end: float = 2 * math.pi,
                     points: int = 201) -> LoopPath:
    nu = np.linspace(nu_start, nu_end, points)
    return LoopPath.from_array(np.column_stack([np.full(points, mu), nu]), SPHERE)


def berry_connection(mu: float) -> float:
    """d nu coefficient of A."""
    return -(1.0 + math.sin(mu)) / 2.0


def berry_curvature(mu: float) -> float:
    """dmu ^ dnu coefficient of F = dA."""
    return -math.cos(mu) / 2.0


@dataclass(frozen=True)
class BerryPhase:
    raw: float
    reduced: float


def _resample(pts: np.ndarray, max_dnu: float) -> np.ndarray:
    out = [pts[0]]
    for p, q in zip(pts[:-1], pts[1:]):
        n = max(1, int(math.ceil(abs(q[1] - p[1]) / max_dnu)))
        for j in range(1, n + 1):
            out.append(p + (q - p) * (j / n))
    return np.array(out)


def line_integral(path: LoopPath) -> float:
    """Trapezoid integral of A along an open or closed sphere path."""
    if path.space != SPHERE:
        raise ValueError("the Berry connection lives on the isospectral sphere")
    pts = _resample(path.array, _MAX_DNU)
    mu, nu = pts[:, 0], pts[:, 1]
    a = -(1.0 + np.sin(mu)) / 2.0
    return float(np.sum(0.5 * (a[1:] + a[:-1]) * np.diff(nu)))


def berry_phase_loop(loop: LoopPath) -> BerryPhase:
    """gamma(C) = closed integral of A, raw and reduced into (-pi, pi]."""
    if not loop.closed:
        raise ValueError("loop is not closed")
    raw = line_integral(loop)
    return BerryPhase(raw, _wrap_pi(raw))


def _circle_mu(loop: LoopPath) -> tuple[float, float]:
    arr = loop.array
    if np.ptp(arr[:, 0]) > 1e-12:
        raise ValueError("Stokes check supports constant-mu circles only")
    span = arr[-1, 1] - arr[0, 1]
    if abs(abs(span) - 2 * math.pi) > 1e-9 or np.any(np.diff(arr[:, 1]) * span < 0):
        raise ValueError("Stokes check needs a monotone full turn in nu")
    return float(arr[0, 0]), float(span)


def stokes_residual(loop_a: LoopPath, loop_b: LoopPath, band_mesh: int) -> float:
    """|(gamma_b - gamma_a) - flux of F through the band between two circles|.

    The flux uses midpoint quadrature on a ``band_mesh x band_mesh`` grid.
    """
    if band_mesh < 1:
        raise ValueError("band_mesh must be positive")
    mu_a, span_a = _circle_mu(loop_a)
    mu_b, span_b = _circle_mu(loop_b)
    if span_a != span_b and abs(span_a - span_b) > 1e-9:
        raise ValueError("circles must be traversed in the same direction")
    if mu_a > mu_b:
        raise ValueError("expected mu_a <= mu_b")
    lhs = berry_phase_loop(loop_b).raw - berry_phase_loop(loop_a).raw
    dmu = (mu_b - mu_a) / band_mesh
    dnu = span_a / band_mesh
    mu_mid = mu_a + dmu * (np.arange(band_mesh) + 0.5)
    # F does not depend on nu, but the nu sum is kept so the rule is the plain 2-D midpoint rule
    flux = float(np.sum(np.outer(-np.cos(mu_mid) / 2.0, np.ones(band_mesh))) * dmu * dnu)
    return abs(lhs - flux)


def level_anholonomy_shift(result: TrackingResult, set_tol: float = 1e-8) -> int:
    """Common index shift of the tracked levels (positive = moved down).

    Levels that escape to ``E -> -inf`` during the cycle have no final index
    and are excluded; all remaining levels must agree.

    Raises
    ------
    NotAnholonomyError
        If the spectrum does not return to itself or the shift is not uniform.
    """
    start, end = np.asarray(result.start_spectrum), np.asarray(result.end_spectrum)
    scale = np.maximum(1.0, np.abs(start))
    if start.shape != end.shape or np.max(np.abs(start - end) / scale) > set_tol:
        raise NotAnholonomyError("the level set is not restored after the cycle")
    shifts = [s for s in result.shifts if s is not None]
    if not shifts:
        raise NotAnholonomyError("every tracked level escaped")
    if len(set(shifts)) != 1:
        mapping = {i: s for i, s in zip(result.initial_indices, result.shifts)}
        raise NotAnholonomyError(f"non-uniform level shift: {mapping}")
    return shifts[0]
