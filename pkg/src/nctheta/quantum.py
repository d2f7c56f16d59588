"""Quantum theta functions ``Theta_D`` and ``Theta_{D,c}`` as elements of
``S(D)``, the scalar identities behind their closed forms, quantum translation
operators and the functional-equation check.

Notation: for a phase point ``h = (h1, h2)``, ``h_ = T h1 + h2`` and
``h_* = conj(T) h1 + h2``; ``Y = Im T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .heisenberg import theta_vector
from .lattice import (
    ComplexStructure,
    Lattice,
    LatticePoint,
    PhasePoint,
    as_phase_point,
    as_structure,
    complexify_many,
    hermitian_H_many,
    symplectic_pairing_many,
)
from .twisted import AnalyticElement, inner_product_D


@dataclass(frozen=True, eq=False)
class QuantumThetaParams:
    """Complex structure, constant shift ``c`` (zero for Manin's case) and lattice."""

    T: ComplexStructure
    c: np.ndarray = None
    D: Lattice = None

    def __post_init__(self):
        T = as_structure(self.T)
        n = T.n
        c = np.zeros(n, dtype=complex) if self.c is None else np.atleast_1d(np.asarray(self.c, dtype=complex))
        if c.shape != (n,):
            raise DimensionMismatch(f"c must have shape ({n},), got {c.shape}")
        c.setflags(write=False)
        D = Lattice.standard(n) if self.D is None else self.D
        if D.n != n:
            raise DimensionMismatch(f"lattice dimension {D.n} does not match T ({n})")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "D", D)

    @property
    def n(self) -> int:
        return self.T.n

    @property
    def normalization(self) -> float:
        """``sqrt(2^n det Im T)``."""
        return float(np.sqrt(2.0**self.n * np.linalg.det(self.T.im)))

    @property
    def x_constant(self) -> float:
        """``2 (Im c)^T (Im T)^{-1} (Im c)``."""
        s = self.c.imag
        return float(2.0 * s @ self.T.im_inv @ s)


def _phase_rows(x, n: int) -> np.ndarray:
    if isinstance(x, (PhasePoint, LatticePoint, tuple)):
        return as_phase_point(x).vector[None, :]
    X = np.asarray(x, dtype=float)
    X = np.atleast_2d(X)
    if X.shape[-1] != 2 * n:
        raise DimensionMismatch(f"phase vectors must have length {2 * n}")
    return X


def H_c_many(G: np.ndarray, params: QuantumThetaParams) -> np.ndarray:
    """Diagonal ``H_c(g, g)`` for stacked phase vectors:
    ``(g_ - 2i Im c)^T Y^{-1} (g_* - 2i Im c) + 4i g1^T Re c``."""
    T, c = params.T, params.c
    k = 2j * c.imag
    gu = complexify_many(G, T) - k
    gs = complexify_many(G, T, conjugate=True) - k
    return np.sum((gu @ T.im_inv) * gs, axis=-1) + 4j * (G[..., : T.n] @ c.real)


def H_c(g, params: QuantumThetaParams) -> complex:
    """``H_c(g, g)``; only the diagonal is defined."""
    return complex(H_c_many(_phase_rows(g, params.n), params)[0])


def X_many(G: np.ndarray, Hs: np.ndarray, params: QuantumThetaParams) -> np.ndarray:
    return hermitian_H_many(G, Hs, params.T) + params.x_constant


def X_pairing(g, h, params: QuantumThetaParams) -> complex:
    """``X(g, h) = H(g, h) + 2 (Im c)^T (Im T)^{-1} (Im c)``."""
    G = _phase_rows(g, params.n)
    Hs = _phase_rows(h, params.n)
    return complex(X_many(G, Hs, params)[0])


# ---------------------------------------------------------------------------
# Three independent forms of the coefficient exponent
# ---------------------------------------------------------------------------


def q_form(x, T) -> complex:
    """``q(x) = 2 x^T (Im T) x`` (``x`` may be complex)."""
    T = as_structure(T)
    x = np.asarray(x, dtype=complex)
    return complex(2.0 * x @ T.im @ x)


def lambda_hc(h, T, c=None) -> np.ndarray:
    """Completing-the-square shift ``(i/2) Y^{-1} (h_* - 2i Im c)``."""
    T = as_structure(T)
    h = as_phase_point(h)
    c = np.zeros(T.n) if c is None else np.asarray(c, dtype=complex)
    hs = T.T.conj() @ h.x1 + h.x2
    return 0.5j * T.im_inv @ (hs - 2j * c.imag)


def l_hc(x, h, T, c=None) -> complex:
    """Linear part ``2i x^T (h_* - 2i Im c)``."""
    T = as_structure(T)
    h = as_phase_point(h)
    c = np.zeros(T.n) if c is None else np.asarray(c, dtype=complex)
    hs = T.T.conj() @ h.x1 + h.x2
    return complex(2j * np.asarray(x, dtype=complex) @ (hs - 2j * c.imag))


def C_tilde_hc(h, T, c=None) -> complex:
    """Constant part ``i h1^T (conj(T) h1 + h2 + 2 conj(c))``."""
    T = as_structure(T)
    h = as_phase_point(h)
    c = np.zeros(T.n) if c is None else np.asarray(c, dtype=complex)
    return complex(1j * h.x1 @ (T.T.conj() @ h.x1 + h.x2 + 2 * c.conj()))


def coefficient_identity_defect(h, T) -> float:
    """``|C~_h - q(lambda_h) - H(h, h)/2|`` for ``c = 0``."""
    T = as_structure(T)
    h = as_phase_point(h)
    half_H = 0.5 * hermitian_H_many(h.vector, h.vector, T)
    return float(abs(C_tilde_hc(h, T) - q_form(lambda_hc(h, T), T) - half_H))


def shifted_coefficient_identity_defect(h, params: QuantumThetaParams) -> float:
    """``|C~_{h,c} - q(lambda_{h,c}) - H_c(h, h)/2|``."""
    T, c = params.T, params.c
    h = as_phase_point(h)
    lhs = C_tilde_hc(h, T, c) - q_form(lambda_hc(h, T, c), T)
    return float(abs(lhs - 0.5 * H_c(h, params)))


def completing_square_defect(x, h, params: QuantumThetaParams) -> float:
    """``|q(x) + l_{h,c}(x) - q(x + lambda) + q(lambda)|``."""
    T, c = params.T, params.c
    lam = lambda_hc(h, T, c)
    x = np.asarray(x, dtype=float)
    return float(abs(q_form(x, T) + l_hc(x, h, T, c) - q_form(x + lam, T) + q_form(lam, T)))


def log_coefficient_printed(Hs: np.ndarray, params: QuantumThetaParams) -> np.ndarray:
    """Exponent in the expanded printed form
    ``-pi [ (h_ - 2i Im c)^T Y^{-1} (h_* - 2i Im c) / 2 + 2i h1^T Re c ]``."""
    T, c = params.T, params.c
    k = 2j * c.imag
    hu = complexify_many(Hs, T) - k
    hs = complexify_many(Hs, T, conjugate=True) - k
    quad = np.sum((hu @ T.im_inv) * hs, axis=-1)
    return -np.pi * (0.5 * quad + 2j * (Hs[..., : T.n] @ c.real))


# ---------------------------------------------------------------------------
# Quantum theta functions
# ---------------------------------------------------------------------------


def shifted_theta(params: QuantumThetaParams, radius: int) -> AnalyticElement:
    """``Theta_{D,c} = sum_h exp(-pi/2 H_c(h, h)) e(h)``."""
    D = params.D

    def log_coef(C):
        return -0.5 * np.pi * H_c_many(D.embed(C), params)

    return AnalyticElement(D, log_coef, radius)


def manin_theta(params: QuantumThetaParams, radius: int) -> AnalyticElement:
    """``Theta_D = sum_h exp(-pi/2 H(h, h)) e(h)``; requires ``c = 0``."""
    if np.any(params.c != 0):
        raise ValueError("manin_theta is the c = 0 case; use shifted_theta")
    D, T = params.D, params.T

    def log_coef(C):
        E = D.embed(C)
        return -0.5 * np.pi * hermitian_H_many(E, E, T)

    return AnalyticElement(D, log_coef, radius)


def normalization_defect(params: QuantumThetaParams, radius: int) -> float:
    """Max over the ball of
    ``|sqrt(2^n det Im T) <f_{T,c}, pi_h f_{T,c}> - exp(-pi/2 H_c(h, h))|``.

    The left side comes from the closed-form Gaussian integrals, the right
    side from the ``H_c`` formula.
    """
    f = theta_vector(params.T, params.c)
    ip = inner_product_D(f, f, params.D, radius)
    theta = shifted_theta(params, radius)
    C = params.D.ball(radius)
    expected = np.exp(theta.log_at(C))
    got = np.array([ip[tuple(k.tolist())] for k in C]) * params.normalization
    return float(np.max(np.abs(got - expected)))


def _coords_of(g, D: Lattice) -> np.ndarray:
    """Integer coordinates of ``g``: a lattice/phase point, an integer array of
    coordinates, or a float array read as a phase vector."""
    if isinstance(g, (LatticePoint, PhasePoint)):
        return np.array(D.locate(g).coords, dtype=np.int64)
    arr = np.asarray(g)
    if arr.dtype.kind in "iu":
        if arr.shape != (2 * D.n,):
            raise DimensionMismatch(f"expected {2 * D.n} coordinates, got {arr.shape}")
        return arr.astype(np.int64)
    return np.array(D.locate(PhasePoint.from_vector(arr)).coords, dtype=np.int64)


def quantum_translate(g, theta: AnalyticElement, params: QuantumThetaParams) -> AnalyticElement:
    """Apply ``x_{g,c}^*``: ``e(h) -> exp(-pi X(g, h)) e(h)`` (``X = H`` when ``c = 0``).

    ``g`` is a lattice point, a phase point on ``D``, or integer coordinates.
    """
    D = params.D
    gE = D.embed([_coords_of(g, D)])[0]
    base = theta.log_coefficient

    def log_coef(C):
        C = np.atleast_2d(C)
        return base(C) - np.pi * X_many(gE, D.embed(C), params)

    return AnalyticElement(D, log_coef, theta.radius)


def _wrapped_log_gap(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = a - b
    im = np.angle(np.exp(1j * d.imag))
    return np.abs(d.real + 1j * im)


def functional_equation_defect(g, params: QuantumThetaParams, radius: int) -> float:
    """Max log-coefficient gap between ``C_{g,c} e(g) x_{g,c}^*(Theta_{D,c})``
    and ``Theta_{D,c}`` (imaginary part taken mod ``2 pi``).

    Points ``g + h`` with ``|h| <= radius - |g|`` are compared, where the
    translated truncation is complete.
    """
    D = params.D
    gc = _coords_of(g, D)
    reach = int(np.max(np.abs(gc), initial=0))
    if radius < reach:
        raise ValueError("radius must be at least |g|_inf")
    theta = shifted_theta(params, radius)
    gE = D.embed([gc])[0]
    log_C = -0.5 * np.pi * H_c_many(gE[None, :], params)[0]
    lhs = quantum_translate(gc, theta, params).left_multiply_delta(gc, log_C)
    targets = D.ball(radius - reach) + gc
    return float(np.max(_wrapped_log_gap(lhs.log_at(targets), theta.log_at(targets))))


def functional_exponent_defect(g, h, params: QuantumThetaParams) -> float:
    """Scalar identity behind the functional equation:
    ``-pi/2 H_c(g,g) - pi/2 H_c(h,h) - pi X(g,h) + pi i Im H(g,h) = -pi/2 H_c(g+h, g+h)``."""
    G = _phase_rows(g, params.n)
    Hs = _phase_rows(h, params.n)
    lhs = (
        -0.5 * np.pi * H_c_many(G, params)
        - 0.5 * np.pi * H_c_many(Hs, params)
        - np.pi * X_many(G, Hs, params)
        + 1j * np.pi * hermitian_H_many(G, Hs, params.T).imag
    )
    rhs = -0.5 * np.pi * H_c_many(G + Hs, params)
    return float(np.max(np.abs(lhs - rhs)))


def cocycle_H_link_defect(g, h, T) -> float:
    """``|alpha(g, h) - exp(pi i Im H(g, h))|``."""
    T = as_structure(T)
    G = _phase_rows(g, T.n)
    Hs = _phase_rows(h, T.n)
    a = np.exp(1j * np.pi * symplectic_pairing_many(G, Hs))
    b = np.exp(1j * np.pi * hermitian_H_many(G, Hs, T).imag)
    return float(np.max(np.abs(a - b)))
