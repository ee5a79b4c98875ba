"""U(2) characteristic matrices of a point singularity on the line.

Conventions
-----------
Boundary vectors are ordered ``Psi = (psi(+0), psi(-0))`` and
``Psi' = (psi'(+0), -psi'(-0))``.  The matrix is parametrised as
``U = V^-1 D V`` with ``D = diag(e^{i theta_plus}, e^{i theta_minus})`` and
``V = exp(i mu sigma_2 / 2) exp(i nu sigma_3 / 2)``.

Infinite scale lengths and couplings are returned as ``math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConvergenceError

TWO_PI = 2.0 * math.pi

SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)

_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class SingularityParams:
    theta_plus: float
    theta_minus: float
    mu: float
    nu: float
    L0: float = 1.0

    def __post_init__(self):
        if self.L0 == 0 or not math.isfinite(self.L0):
            raise ValueError("L0 must be a finite nonzero length")
        for name in ("theta_plus", "theta_minus", "nu"):
            v = getattr(self, name)
            if not 0.0 <= v < TWO_PI + _ANGLE_TOL:
                raise ValueError(f"{name}={v} outside [0, 2pi)")
        if not -_ANGLE_TOL <= self.mu <= math.pi + _ANGLE_TOL:
            raise ValueError(f"mu={self.mu} outside [0, pi]")

    @classmethod
    def wrapped(cls, theta_plus, theta_minus, mu=math.pi / 2, nu=0.0, L0=1.0):
        """Build from arbitrary real angles, reducing the periodic ones mod 2pi."""
        return cls(theta_plus % TWO_PI, theta_minus % TWO_PI, mu, nu % TWO_PI, L0)


@dataclass(frozen=True)
class CharacteristicMatrix:
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        if u.shape != (2, 2):
            raise ValueError("characteristic matrix must be 2x2")
        object.__setattr__(self, "u", u)

    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(self.u.conj().T @ self.u - SIGMA0)))

    def check_unitary(self, tol: float = 1e-10) -> None:
        d = self.unitarity_defect()
        if d > tol:
            raise ValueError(f"matrix is not unitary (defect {d:.3g})")


@dataclass(frozen=True)
class BoundaryVectors:
    psi: np.ndarray
    psi_prime: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex).reshape(2)
        dpsi = np.asarray(self.psi_prime, dtype=complex).reshape(2)
        if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(dpsi))):
            raise ValueError("boundary vectors must be finite")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "psi_prime", dpsi)

    @classmethod
    def from_limits(cls, psi_plus, psi_minus, dpsi_plus, dpsi_minus):
        """From one-sided limits psi(+-0), psi'(+-0) of an ordinary wave function."""
        return cls([psi_plus, psi_minus], [dpsi_plus, -dpsi_minus])


def isospectral_rotation(mu: float, nu: float) -> np.ndarray:
    """The matrix V = exp(i mu sigma_2/2) exp(i nu sigma_3/2)."""
    c, s = math.cos(mu / 2), math.sin(mu / 2)
    rot_mu = np.array([[c, s], [-s, c]], dtype=complex)
    rot_nu = np.diag([np.exp(0.5j * nu), np.exp(-0.5j * nu)])
    return rot_mu @ rot_nu


def build_characteristic_matrix(p: SingularityParams) -> CharacteristicMatrix:
    v = isospectral_rotation(p.mu, p.nu)
    d = np.diag([np.exp(1j * p.theta_plus), np.exp(1j * p.theta_minus)])
    return CharacteristicMatrix(v.conj().T @ d @ v)


def parity_invariant_matrix(theta_plus: float, theta_minus: float) -> CharacteristicMatrix:
    """U(theta+, theta-) = exp(i(theta+ P+ + theta- P-)), P+- = (1 +- sigma_1)/2."""
    p_plus = 0.5 * (SIGMA0 + SIGMA1)
    p_minus = 0.5 * (SIGMA0 - SIGMA1)
    return CharacteristicMatrix(np.exp(1j * theta_plus) * p_plus + np.exp(1j * theta_minus) * p_minus)


def _phase(z: complex) -> float:
    return float(np.angle(z)) % TWO_PI


def decompose_characteristic_matrix(U: CharacteristicMatrix, L0: float = 1.0) -> SingularityParams:
    """Invert :func:`build_characteristic_matrix`.

    Gauge choices: degenerate eigenvalues give ``mu = nu = 0``; otherwise the
    eigenvector labelled "+" is the one whose relative phase ``nu`` falls in
    ``[0, pi)`` once its first component is made real and non-negative (the
    swap of labels maps ``nu -> nu + pi``, so exactly one qualifies).  For
    diagonal ``U`` the (1, 0) direction is "+".
    """
    U.check_unitary()
    u = U.u
    evals, evecs = np.linalg.eig(u)
    thetas = [_phase(e) for e in evals]
    if abs(evals[0] - evals[1]) < 1e-10:
        th = _phase(0.5 * (evals[0] + evals[1]))
        return SingularityParams(th, th, 0.0, 0.0, L0)

    candidates = []
    for j in range(2):
        v = evecs[:, j] / np.linalg.norm(evecs[:, j])
        if abs(v[0]) > 1e-14:
            v = v * np.exp(-1j * np.angle(v[0]))
        else:
            v = v * np.exp(-1j * np.angle(v[1]))
        a, b = abs(v[0]), abs(v[1])
        mu = 2.0 * math.atan2(b, a)
        if a < 1e-13 or b < 1e-13:
            nu = 0.0
        else:
            nu = (float(np.angle(v[1])) - float(np.angle(v[0]))) % TWO_PI
        candidates.append((mu, nu, thetas[j], a))

    def is_plus(c):
        mu, nu, _, a = c
        if mu < 1e-12:
            return True
        if mu > math.pi - 1e-12:
            return False
        return nu < math.pi - 1e-13 or nu > TWO_PI - 1e-13

    plus = [c for c in candidates if is_plus(c)]
    chosen = plus[0] if len(plus) == 1 else min(candidates, key=lambda c: c[2])
    other = candidates[1] if chosen is candidates[0] else candidates[0]
    mu, nu = chosen[0], chosen[1]
    if mu < 1e-12 or mu > math.pi - 1e-12:
        nu = 0.0
    nu = 0.0 if nu >= TWO_PI - 1e-13 else nu
    return SingularityParams(chosen[2], other[2], min(max(mu, 0.0), math.pi), nu, L0)


def connection_residual(U: CharacteristicMatrix, L0: float, b: BoundaryVectors) -> np.ndarray:
    """(U - I) Psi + i L0 (U + I) Psi'; zero iff the connection condition holds."""
    u = U.u
    return (u - SIGMA0) @ b.psi + 1j * L0 * (u + SIGMA0) @ b.psi_prime


def connection_constraints(U: CharacteristicMatrix, L0: float) -> np.ndarray:
    """The 2x4 matrix C with C @ (Psi, Psi') = 0 expressing the connection condition."""
    u = U.u
    return np.hstack([u - SIGMA0, 1j * L0 * (u + SIGMA0)])


def probability_current(psi: complex, dpsi: complex, hbar: float = 1.0, mass: float = 1.0) -> float:
    """j = -(i hbar / 2m)((psi*)' psi - psi* psi') = (hbar/m) Im(psi* psi')."""
    return float(hbar / mass * np.imag(np.conj(psi) * dpsi))


def boundary_currents(b: BoundaryVectors, hbar: float = 1.0, mass: float = 1.0) -> tuple[float, float]:
    """Currents j(+0), j(-0) for a state with the given boundary vectors."""
    j_plus = probability_current(b.psi[0], b.psi_prime[0], hbar, mass)
    j_minus = probability_current(b.psi[1], -b.psi_prime[1], hbar, mass)
    return j_plus, j_minus


_TRANSFORMS = {
    "parity": SIGMA1,
    "half_reflection": SIGMA3,
    "product_Q": SIGMA2,
}


def symmetry_transform(U: CharacteristicMatrix, which: str) -> CharacteristicMatrix:
    """Conjugate U by sigma_1 (parity), sigma_3 (half reflection) or sigma_2 (Q = iPR)."""
    try:
        s = _TRANSFORMS[which]
    except KeyError:
        raise ValueError(f"unknown transform {which!r}; expected one of {sorted(_TRANSFORMS)}") from None
    return CharacteristicMatrix(s @ U.u @ s)


@dataclass(frozen=True)
class Classification:
    separated: bool
    parity_invariant: bool
    scale_invariant: bool
    self_dual: bool


def classify(U: CharacteristicMatrix, tol: float = 1e-10) -> Classification:
    U.check_unitary()
    u = U.u
    separated = abs(u[0, 1]) < tol and abs(u[1, 0]) < tol
    parity = float(np.max(np.abs(SIGMA1 @ u @ SIGMA1 - u))) < tol
    evals = np.linalg.eigvals(u)
    scale = (
        min(abs(evals[0] - 1), abs(evals[1] - 1)) < tol
        and min(abs(evals[0] + 1), abs(evals[1] + 1)) < tol
    )
    self_dual = abs(evals[0] - evals[1]) < tol
    return Classification(bool(separated), bool(parity), bool(scale), bool(self_dual))


def _near_multiple_of_two_pi(theta: float) -> bool:
    r = math.remainder(theta, TWO_PI)
    return abs(r) < _ANGLE_TOL


def scale_length(theta: float, L0: float = 1.0) -> float:
    """L(theta) = L0 cot(theta/2); ``inf`` at theta = 0 (Neumann), 0 at theta = pi (Dirichlet)."""
    if _near_multiple_of_two_pi(theta):
        return math.inf
    if _near_multiple_of_two_pi(theta - math.pi):
        return 0.0
    return L0 / math.tan(theta / 2)


def inverse_scale_length(theta: float, L0: float = 1.0) -> float:
    """1/L(theta) = tan(theta/2)/L0; ``inf`` at the Dirichlet point."""
    if _near_multiple_of_two_pi(theta - math.pi):
        return math.inf
    if _near_multiple_of_two_pi(theta):
        return 0.0
    return math.tan(theta / 2) / L0


def coupling_constants(theta_plus: float, theta_minus: float) -> tuple[float, float]:
    """(g+, g-) = (tan(theta+/2), cot(theta-/2)); both vanish at the free point."""
    if _near_multiple_of_two_pi(theta_plus - math.pi):
        g_plus = math.inf
    elif _near_multiple_of_two_pi(theta_plus):
        g_plus = 0.0
    else:
        g_plus = math.tan(theta_plus / 2)
    if _near_multiple_of_two_pi(theta_minus):
        g_minus = math.inf
    elif _near_multiple_of_two_pi(theta_minus - math.pi):
        g_minus = 0.0
    else:
        g_minus = 1.0 / math.tan(theta_minus / 2)
    return g_plus, g_minus


def _richardson(values: list[complex], ratio: float) -> list[complex]:
    """Neville/Richardson table for samples at eps_k = eps_0 / ratio^k; returns diagonal."""
    table = [list(values)]
    diag = [values[0]]
    for order in range(1, len(values)):
        prev = table[-1]
        fac = ratio**order
        row = [(fac * prev[i + 1] - prev[i]) / (fac - 1) for i in range(len(prev) - 1)]
        table.append(row)
        diag.append(row[-1])
    return diag


def _limit(sample: Callable[[float], complex], eps0: float, levels: int, tol: float) -> complex:
    vals = [sample(eps0 / 2**k) for k in range(levels)]
    diag = _richardson(vals, 2.0)
    scale = max(1.0, max(abs(v) for v in vals))
    best = diag[-1]
    if abs(diag[-1] - diag[-2]) > tol * scale and abs(vals[-1] - vals[-2]) > tol * scale:
        raise ConvergenceError(
            f"Wronskian limit did not converge (last corrections {abs(diag[-1] - diag[-2]):.3g})"
        )
    return complex(best)


def wronskian(f, df, g, dg, x) -> complex:
    """W[f, g](x) = f(x) g'(x) - g(x) f'(x)."""
    return f(x) * dg(x) - g(x) * df(x)


def wronskian_boundary_vectors(
    psi: Callable,
    dpsi: Callable,
    phi1: Callable,
    dphi1: Callable,
    phi2: Callable,
    dphi2: Callable,
    epsilon: float = 1e-2,
    levels: int = 8,
    tol: float = 1e-6,
) -> BoundaryVectors:
    """Generalised boundary vectors from Wronskians with two reference states.

    ``Psi = (W[psi, phi1](+0), W[psi, phi1](-0))`` and
    ``Psi' = (W[psi, phi2](+0), -W[psi, phi2](-0))`` where
    ``W[f, g] = f g' - g f'``.  Each one-sided limit is extrapolated from the
    samples ``x = +-epsilon / 2^k``.
    """

    def side(g, dg, sign):
        return _limit(lambda e: wronskian(psi, dpsi, g, dg, sign * e), epsilon, levels, tol)

    w1p, w1m = side(phi1, dphi1, 1.0), side(phi1, dphi1, -1.0)
    w2p, w2m = side(phi2, dphi2, 1.0), side(phi2, dphi2, -1.0)
    return BoundaryVectors([w1p, w1m], [w2p, -w2m])


def state_satisfying(U: CharacteristicMatrix, L0: float, rng: Optional[np.random.Generator] = None) -> BoundaryVectors:
    """A random pair (Psi, Psi') obeying the connection condition of ``U``."""
    rng = rng or np.random.default_rng()
    c = connection_constraints(U, L0)
    _, _, vh = np.linalg.svd(c)
    null = vh[2:].conj().T
    coeff = rng.normal(size=2) + 1j * rng.normal(size=2)
    vec = null @ coeff
    return BoundaryVectors(vec[:2], vec[2:])
