"""Supercharges on the two-component (folded) half line.

A wave function on the line with a singularity at the origin is folded into
``Psi(x) = (psi(x), psi(-x))`` on ``x > 0``.  The supercharges are

    Q = -i lam d/dx (x) sigma_a + 1 (x) sigma_b,    |a| = 1,  a . b = 0,

with ``lam = hbar / (2 sqrt(m))``.  Squaring gives
``Q^2 = -lam^2 d^2/dx^2 + |b|^2``, i.e. ``2 Q^2 = H + 2|b|^2`` with
``H = -(hbar^2/2m) d^2/dx^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .singularity import (
    SIGMA1,
    SIGMA2,
    SIGMA3,
    CharacteristicMatrix,
    SingularityParams,
    build_characteristic_matrix,
    BoundaryVectors,
    connection_residual,
    isospectral_rotation,
    scale_length,
)
from .spectra import Level

_PAULI = (SIGMA1, SIGMA2, SIGMA3)


def pauli_dot(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v[0] * SIGMA1 + v[1] * SIGMA2 + v[2] * SIGMA3


def _rotation_vector(W: np.ndarray, v) -> np.ndarray:
    """Real 3-vector w with W^dagger sigma_v W = sigma_w."""
    m = W.conj().T @ pauli_dot(v) @ W
    return np.array([0.5 * np.trace(m @ s).real for s in _PAULI])


@dataclass(frozen=True)
class SuperchargeParams:
    """Q = -i lam d/dx sigma_a + sigma_b.

    ``alpha``, ``c``, ``theta`` and ``V`` are filled in for members of the
    family built by :func:`supercharge_family` and are ``None`` otherwise.
    """

    a_vec: tuple[float, float, float]
    b_vec: tuple[float, float, float]
    lambda_const: float = 0.5
    alpha: Optional[float] = None
    c: Optional[float] = None
    theta: Optional[float] = None
    V: Optional[np.ndarray] = field(default=None, compare=False)
    check: bool = True

    def __post_init__(self):
        a = np.asarray(self.a_vec, dtype=float)
        b = np.asarray(self.b_vec, dtype=float)
        if a.shape != (3,) or b.shape != (3,):
            raise ValueError("a_vec and b_vec must be 3-vectors")
        if self.lambda_const <= 0:
            raise ValueError("lambda_const must be positive")
        if self.check:
            if abs(np.linalg.norm(a) - 1) > 1e-12:
                raise ValueError("|a| must be 1")
            if abs(a @ b) > 1e-12 * max(1.0, np.linalg.norm(b)):
                raise ValueError("a . b must vanish")
        object.__setattr__(self, "a_vec", tuple(float(x) for x in a))
        object.__setattr__(self, "b_vec", tuple(float(x) for x in b))

    @property
    def sigma_a(self) -> np.ndarray:
        return pauli_dot(self.a_vec)

    @property
    def sigma_b(self) -> np.ndarray:
        return pauli_dot(self.b_vec)

    @property
    def b_norm2(self) -> float:
        return float(np.dot(self.b_vec, self.b_vec))


def lambda_from_units(hbar: float = 1.0, mass: float = 1.0) -> float:
    return hbar / (2.0 * math.sqrt(mass))


def supercharge_family(alpha: float, c: float, theta: float, mu: float, nu: float,
                       lambda_const: float = 0.5, L0: float = 1.0) -> SuperchargeParams:
    """Q = V^{-1} q(alpha, c; theta) V for U = V^{-1} diag(e^{i theta}, -1) V.

    ``q = -i lam d/dx R(sigma1) + [-(lam/L(theta)) R(sigma2) + c sigma3]`` where
    ``R(s) = e^{-i alpha sigma3/2} s e^{i alpha sigma3/2}``.
    """
    if math.isclose(math.remainder(theta, 2 * math.pi), 0.0, abs_tol=1e-14):
        raise ValueError("theta must differ from 0")
    L = scale_length(theta, L0)
    inv_L = 0.0 if math.isinf(L) else (math.inf if L == 0 else 1.0 / L)
    if math.isinf(inv_L):
        raise ValueError("theta = pi makes both eigenvalues -1; no supercharge of this form")
    a_d = np.array([math.cos(alpha), math.sin(alpha), 0.0])
    perp = np.array([-math.sin(alpha), math.cos(alpha), 0.0])
    b_d = -lambda_const * inv_L * perp + np.array([0.0, 0.0, c])
    V = isospectral_rotation(mu, nu)
    return SuperchargeParams(
        tuple(_rotation_vector(V, a_d)),
        tuple(_rotation_vector(V, b_d)),
        lambda_const,
        alpha=alpha,
        c=c,
        theta=theta,
        V=V,
    )


def susy_matrix(theta: float, mu: float, nu: float) -> CharacteristicMatrix:
    """U = V^{-1} diag(e^{i theta}, -1) V."""
    return build_characteristic_matrix(SingularityParams(theta % (2 * math.pi), math.pi, mu, nu))


# ---------------------------------------------------------------------------
# Two-component states


Func = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TwoComponentState:
    """(psi_plus, psi_minus) on (0, length] with optional analytic derivatives.

    ``derivs_plus[j]`` is the j-th derivative of ``psi_plus`` (index 0 is the
    function itself); missing orders fall back to central differences with
    step ``1e-5 * length``.
    """

    derivs_plus: tuple[Func, ...]
    derivs_minus: tuple[Func, ...]
    length: float = 1.0

    @classmethod
    def from_functions(cls, psi_plus: Func, psi_minus: Func, length: float = 1.0):
        return cls((psi_plus,), (psi_minus,), length)

    @property
    def analytic_order(self) -> int:
        return min(len(self.derivs_plus), len(self.derivs_minus)) - 1

    def _component(self, funcs, x, order):
        if order < len(funcs):
            return np.asarray(funcs[order](x), dtype=complex)
        h = 1e-5 * self.length
        top = len(funcs) - 1
        need = order - top
        f = funcs[top]
        if need == 1:
            return (np.asarray(f(x + h)) - np.asarray(f(x - h))) / (2 * h)
        if need == 2:
            return (np.asarray(f(x + h)) - 2 * np.asarray(f(x)) + np.asarray(f(x - h))) / h**2
        # higher orders by nesting first differences
        g = lambda y: self._component(funcs, y, order - 1)
        return (g(x + h) - g(x - h)) / (2 * h)

    def evaluate(self, x, order: int = 0) -> np.ndarray:
        """Array of shape (2, len(x)) with the requested derivative."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.vstack([
            self._component(self.derivs_plus, x, order),
            self._component(self.derivs_minus, x, order),
        ])

    def boundary_vectors(self, x0: float = 0.0) -> BoundaryVectors:
        """(Psi, Psi') at the singularity: psi_-'(+0) equals -psi'(-0) of the unfolded function."""
        v = self.evaluate([x0])[:, 0]
        d = self.evaluate([x0], 1)[:, 0]
        return BoundaryVectors(v, d)


def zero_state(length: float = 1.0) -> TwoComponentState:
    z = lambda x: np.zeros_like(np.asarray(x, dtype=float), dtype=complex)
    return TwoComponentState((z, z, z, z), (z, z, z, z), length)


def matrix_state(M: np.ndarray, s: TwoComponentState) -> TwoComponentState:
    """x -> M Psi(x) for a constant 2x2 matrix."""
    M = np.asarray(M, dtype=complex)
    n = s.analytic_order + 1

    def comp(row, j):
        return lambda x: M[row, 0] * s.evaluate(x, j)[0] + M[row, 1] * s.evaluate(x, j)[1]

    return TwoComponentState(
        tuple(comp(0, j) for j in range(n)),
        tuple(comp(1, j) for j in range(n)),
        s.length,
    )


def apply_supercharge(q: SuperchargeParams, s: TwoComponentState) -> TwoComponentState:
    """Q Psi; the image keeps one analytic derivative order less than the input."""
    A = q.sigma_a
    B = q.sigma_b
    lam = q.lambda_const
    n = max(1, s.analytic_order)

    def comp(row, j):
        def f(x):
            d1 = s.evaluate(x, j + 1)
            d0 = s.evaluate(x, j)
            return -1j * lam * (A[row] @ d1) + B[row] @ d0
        return f

    return TwoComponentState(
        tuple(comp(0, j) for j in range(n)),
        tuple(comp(1, j) for j in range(n)),
        s.length,
    )


def susy_algebra_residual(q: SuperchargeParams, s: TwoComponentState, sample_grid: int,
                          shift_coefficient: float = 2.0, hbar_sq_over_2m: Optional[float] = None) -> float:
    """max |2 Q^2 Psi - (H Psi + shift |b|^2 Psi)| / max |H Psi| over a grid on (0, length].

    ``shift_coefficient = 2`` is the identity that follows from squaring Q;
    ``1`` reproduces the form ``2Q^2 = H + |b|^2`` for comparison.
    ``H = -2 lam^2 d^2/dx^2`` unless ``hbar_sq_over_2m`` is given.
    """
    if sample_grid < 2:
        raise ValueError("sample_grid must be >= 2")
    lam = q.lambda_const
    kin = 2 * lam**2 if hbar_sq_over_2m is None else hbar_sq_over_2m
    x = np.linspace(s.length / sample_grid, s.length, sample_grid)
    qq = apply_supercharge(q, apply_supercharge(q, s))
    lhs = 2 * qq.evaluate(x)
    h_psi = -kin * s.evaluate(x, 2)
    rhs = h_psi + shift_coefficient * q.b_norm2 * s.evaluate(x)
    scale = np.max(np.abs(h_psi))
    if scale == 0:
        scale = max(np.max(np.abs(rhs)), 1.0)
    return float(np.max(np.abs(lhs - rhs)) / scale)


@dataclass(frozen=True)
class PreservationResult:
    state_ok: bool
    image_ok: bool
    state_residual: float
    image_residual: float


def _relative_residual(U: CharacteristicMatrix, L0: float, b: BoundaryVectors) -> float:
    r = connection_residual(U, L0, b)
    scale = max(1.0, float(np.linalg.norm(b.psi) + abs(L0) * np.linalg.norm(b.psi_prime)))
    return float(np.linalg.norm(r)) / scale


def condition_preservation_check(U: CharacteristicMatrix, q: SuperchargeParams, s: TwoComponentState,
                                 L0: float = 1.0, state_tol: float = 1e-8,
                                 image_tol: float = 1e-6) -> PreservationResult:
    """Whether Psi and Q Psi both obey the connection condition of ``U`` at x = +0."""
    r_state = _relative_residual(U, L0, s.boundary_vectors())
    r_image = _relative_residual(U, L0, apply_supercharge(q, s).boundary_vectors())
    return PreservationResult(r_state <= state_tol, r_image <= image_tol, r_state, r_image)


def _robin_ladder(L: float, k: float, amp: complex = 1.0):
    """Derivatives of the energy-k^2 solution with phi + L phi' = 0 at the origin."""
    if L == 0:
        a, b = 0.0, 1.0
    elif math.isinf(L):
        a, b = 1.0, 0.0
    else:
        a, b = 1.0, -1.0 / (k * L)
    return tuple(
        (lambda x, j=j: amp * k**j * (a * np.cos(k * np.asarray(x) + j * math.pi / 2)
                                      + b * np.sin(k * np.asarray(x) + j * math.pi / 2)))
        for j in range(5)
    )


def eigenstate_for(theta: float, mu: float, nu: float, k: float, beta: complex = 1.0,
                   L0: float = 1.0, length: float = 1.0,
                   theta_minus: float = math.pi) -> TwoComponentState:
    """Energy-k^2 state obeying U = V^{-1} diag(e^{i theta}, e^{i theta_minus}) V at the origin.

    In the eigenbasis each component is the Robin solution ``cos kx - sin(kx)/(kL)``
    of its channel (``sin kx`` for Dirichlet), the second one scaled by ``beta``;
    the state is ``V^{-1}`` of that.
    """
    base = TwoComponentState(
        _robin_ladder(scale_length(theta, L0), k),
        _robin_ladder(scale_length(theta_minus, L0), k, beta),
        length,
    )
    V = isospectral_rotation(mu, nu)
    return matrix_state(V.conj().T, base)


# ---------------------------------------------------------------------------
# N = 1 well


@dataclass(frozen=True)
class SusyWellLevel:
    level: Level
    n: int
    k: float
    state: TwoComponentState


def n1_supercharge(nu: float, lambda_const: float = 0.5) -> SuperchargeParams:
    """b = 0 supercharge whose sigma_a maps the N = 1 well states to multiples of themselves."""
    return SuperchargeParams((-math.sin(nu), math.cos(nu), 0.0), (0.0, 0.0, 0.0), lambda_const)


def n1_state(mu: float, nu: float, l: float, k: float) -> TwoComponentState:
    """N (-e^{-i nu} cos k(x-l), sin k(x-l)) with N = l^{-1/2}."""
    N = 1.0 / math.sqrt(l)
    ph = -np.exp(-1j * nu)
    cos_d = tuple((lambda x, j=j: N * ph * k**j * np.cos(k * (np.asarray(x) - l) + j * math.pi / 2)) for j in range(5))
    sin_d = tuple((lambda x, j=j: N * k**j * np.sin(k * (np.asarray(x) - l) + j * math.pi / 2)) for j in range(5))
    return TwoComponentState(cos_d, sin_d, l)


def n1_boundary_residual(mu: float, nu: float, s: TwoComponentState) -> float:
    """Largest violation of the two-component connection condition at x = +0.

    ``e^{i nu} psi_+ sin(mu/2) - cos(mu/2) psi_- = 0`` and
    ``e^{i nu} psi_+' cos(mu/2) + sin(mu/2) psi_-' = 0`` (multiplied through
    to stay finite at mu = 0, pi).
    """
    p = s.evaluate([0.0])[:, 0]
    d = s.evaluate([0.0], 1)[:, 0]
    cm, sm = math.cos(mu / 2), math.sin(mu / 2)
    e = np.exp(1j * nu)
    return float(max(abs(e * p[0] * sm - cm * p[1]), abs(e * d[0] * cm + sm * d[1])))


def n1_susy_well_spectrum(mu: float, nu: float, l: float, n_range: tuple[int, int],
                          hbar: float = 1.0, mass: float = 1.0) -> list[SusyWellLevel]:
    """Levels k_n = (n pi + mu/2)/l for integer n in ``n_range`` (inclusive), k_n != 0.

    Both signs of n are admitted: the states for k and -k are independent,
    which is where the degeneracies at mu = 0 and mu = pi come from.
    """
    n_lo, n_hi = n_range
    if n_lo > n_hi:
        raise ValueError("empty n_range")
    if l <= 0:
        raise ValueError("l must be positive")
    raw = []
    for n in range(n_lo, n_hi + 1):
        k = (n * math.pi + mu / 2) / l
        if k == 0.0:
            continue
        raw.append((hbar**2 * k * k / (2 * mass), n, k))
    raw.sort(key=lambda r: (r[0], r[1]))
    return [
        SusyWellLevel(Level(i, abs(k), e), n, k, n1_state(mu, nu, l, k))
        for i, (e, n, k) in enumerate(raw)
    ]
