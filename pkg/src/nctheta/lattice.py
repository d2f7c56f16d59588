"""Phase-space geometry: complex structures, lattices, the symplectic form,
the cocycle and the Hermitian pairing ``H``.

Phase space is ``R^n x R^n`` with points ``x = (x1, x2)``.  Everything here is
an immutable value; functions are pure.

Vectorized helpers (``*_many``) take stacked phase vectors of shape
``(m, 2n)`` with the position block first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    DimensionMismatch,
    ImNotPositiveDefinite,
    IrrationalBasis,
    NotSymmetric,
    PointNotInLattice,
    ValidationError,
)

SYMMETRY_TOL = 1e-12
PD_RATIO = 1e-9
DET_TOL = 1e-12
RATIONAL_TOL = 1e-9
MAX_DENOMINATOR = 10**6


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Complex structures
# ---------------------------------------------------------------------------


def check_symmetric_pd(A: np.ndarray, what: str = "T") -> None:
    """Raise unless ``A`` is square, symmetric and has positive-definite
    imaginary part (smallest eigenvalue above ``PD_RATIO`` times the largest)."""
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{what} has non-finite entries")
    asym = np.max(np.abs(A - A.T)) if A.size else 0.0
    if asym > SYMMETRY_TOL:
        raise NotSymmetric(f"{what} is not symmetric (max asymmetry {asym:.3g})")
    Y = A.imag
    Y = 0.5 * (Y + Y.T)
    try:
        np.linalg.cholesky(Y)
    except np.linalg.LinAlgError:
        raise ImNotPositiveDefinite(f"Im {what} is not positive definite") from None
    ev = np.linalg.eigvalsh(Y)
    if ev[0] <= PD_RATIO * ev[-1]:
        raise ImNotPositiveDefinite(
            f"Im {what} is too close to singular (eigenvalues {ev[0]:.3g} .. {ev[-1]:.3g})"
        )


@dataclass(frozen=True, eq=False)
class ComplexStructure:
    """Symmetric complex ``n x n`` matrix with positive-definite imaginary part."""

    T: np.ndarray

    def __post_init__(self):
        T = np.array(self.T, dtype=complex)
        if T.ndim == 0:
            T = T.reshape(1, 1)
        check_symmetric_pd(T)
        # symmetrize away sub-tolerance noise so downstream algebra is exact
        T = 0.5 * (T + T.T)
        object.__setattr__(self, "T", _frozen(T, complex))
        Y = T.imag
        object.__setattr__(self, "_im_inv", _frozen(np.linalg.inv(Y), float))

    @property
    def n(self) -> int:
        return self.T.shape[0]

    @property
    def im(self) -> np.ndarray:
        return self.T.imag

    @property
    def im_inv(self) -> np.ndarray:
        """``(Im T)^{-1}``."""
        return self._im_inv

    def __repr__(self):
        return f"ComplexStructure(T={self.T.tolist()!r})"


def validate_structure(T_raw) -> ComplexStructure:
    """Validate a raw matrix as a complex structure.

    Raises
    ------
    NotSymmetric, ImNotPositiveDefinite, DimensionMismatch
    """
    return ComplexStructure(np.asarray(T_raw, dtype=complex))


def as_structure(T) -> ComplexStructure:
    if isinstance(T, ComplexStructure):
        return T
    return validate_structure(T)


# ---------------------------------------------------------------------------
# Phase points
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """A point ``(x1, x2)`` of ``R^n x R^n``."""

    x1: np.ndarray
    x2: np.ndarray

    def __post_init__(self):
        x1 = np.atleast_1d(np.asarray(self.x1, dtype=float))
        x2 = np.atleast_1d(np.asarray(self.x2, dtype=float))
        if x1.shape != x2.shape or x1.ndim != 1:
            raise DimensionMismatch(f"x1 and x2 shapes differ: {x1.shape} vs {x2.shape}")
        if not (np.all(np.isfinite(x1)) and np.all(np.isfinite(x2))):
            raise ValidationError("phase point has non-finite entries")
        object.__setattr__(self, "x1", _frozen(x1, float))
        object.__setattr__(self, "x2", _frozen(x2, float))

    @classmethod
    def from_vector(cls, v) -> PhasePoint:
        v = np.asarray(v, dtype=float)
        if v.ndim != 1 or v.size % 2:
            raise DimensionMismatch(f"phase vector must have even length, got {v.shape}")
        n = v.size // 2
        return cls(v[:n], v[n:])

    @classmethod
    def zero(cls, n: int) -> PhasePoint:
        return cls(np.zeros(n), np.zeros(n))

    @property
    def n(self) -> int:
        return self.x1.size

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.x1, self.x2])

    def __add__(self, other: PhasePoint) -> PhasePoint:
        _same_n(self, other)
        return PhasePoint(self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: PhasePoint) -> PhasePoint:
        _same_n(self, other)
        return PhasePoint(self.x1 - other.x1, self.x2 - other.x2)

    def __neg__(self) -> PhasePoint:
        return PhasePoint(-self.x1, -self.x2)

    def __mul__(self, k: float) -> PhasePoint:
        return PhasePoint(k * self.x1, k * self.x2)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PhasePoint):
            return NotImplemented
        return np.array_equal(self.x1, other.x1) and np.array_equal(self.x2, other.x2)

    def __hash__(self):
        return hash((self.x1.tobytes(), self.x2.tobytes()))

    def __repr__(self):
        return f"PhasePoint(x1={self.x1.tolist()}, x2={self.x2.tolist()})"


def as_phase_point(x) -> PhasePoint:
    if isinstance(x, PhasePoint):
        return x
    if isinstance(x, LatticePoint):
        return x.embedded
    if isinstance(x, tuple) and len(x) == 2:
        return PhasePoint(x[0], x[1])
    return PhasePoint.from_vector(x)


def _same_n(x: PhasePoint, y: PhasePoint) -> None:
    if x.n != y.n:
        raise DimensionMismatch(f"dimension mismatch: {x.n} vs {y.n}")


# ---------------------------------------------------------------------------
# Symplectic form and cocycle
# ---------------------------------------------------------------------------


def symplectic_pairing(x, y) -> float:
    """``x1.y2 - y1.x2``."""
    x, y = as_phase_point(x), as_phase_point(y)
    _same_n(x, y)
    return float(x.x1 @ y.x2 - y.x1 @ x.x2)


def symplectic_pairing_many(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Row-wise symplectic pairing of stacked phase vectors (broadcasting)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    n = X.shape[-1] // 2
    return np.sum(X[..., :n] * Y[..., n:], axis=-1) - np.sum(Y[..., :n] * X[..., n:], axis=-1)


def cocycle_alpha(x, y) -> complex:
    """The bicharacter ``exp(pi i (x1.y2 - y1.x2))``."""
    return complex(np.exp(1j * np.pi * symplectic_pairing(x, y)))


def cocycle_alpha_many(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return np.exp(1j * np.pi * symplectic_pairing_many(X, Y))


@lru_cache(maxsize=None)
def standard_symplectic(n: int) -> np.ndarray:
    """``J`` with ``x^T J y = x1.y2 - y1.x2``."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    J.setflags(write=False)
    return J


# ---------------------------------------------------------------------------
# Lattices
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def integer_ball(dim: int, radius: int) -> np.ndarray:
    """All integer vectors with ``|k|_inf <= radius`` in lexicographic order.

    This is the one enumeration order used by every lattice sum in the package.
    """
    if radius < 0:
        raise ValidationError("radius must be non-negative")
    r = range(-radius, radius + 1)
    pts = np.array(list(itertools.product(r, repeat=dim)), dtype=np.int64).reshape(-1, dim)
    pts.setflags(write=False)
    return pts


@dataclass(frozen=True)
class LatticePoint:
    """Integer coordinates together with the embedded phase point."""

    coords: tuple
    embedded: PhasePoint

    @property
    def h1(self) -> np.ndarray:
        return self.embedded.x1

    @property
    def h2(self) -> np.ndarray:
        return self.embedded.x2


@dataclass(frozen=True, eq=False)
class Lattice:
    """``D = basis . Z^{2n}``; columns of ``basis`` are the generators."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] % 2:
            raise DimensionMismatch(f"lattice basis must be 2n x 2n, got {B.shape}")
        if not np.all(np.isfinite(B)):
            raise ValidationError("lattice basis has non-finite entries")
        if abs(np.linalg.det(B)) <= DET_TOL:
            raise ValidationError("lattice basis is singular")
        object.__setattr__(self, "basis", _frozen(B, float))
        object.__setattr__(self, "_inv", _frozen(np.linalg.inv(B), float))
        n = B.shape[0] // 2
        object.__setattr__(self, "_gram", _frozen(B.T @ standard_symplectic(n) @ B, float))

    @classmethod
    def standard(cls, n: int) -> Lattice:
        """``Z^n x Z^n``."""
        return cls(np.eye(2 * n))

    @property
    def n(self) -> int:
        return self.basis.shape[0] // 2

    @property
    def covolume(self) -> float:
        return abs(float(np.linalg.det(self.basis)))

    def embed(self, coords) -> np.ndarray:
        """Phase vectors (shape ``(m, 2n)``) for integer coordinates ``(m, 2n)``."""
        C = np.asarray(coords, dtype=float)
        return C @ self.basis.T

    def cocycle_many(self, C1, C2) -> np.ndarray:
        """``alpha`` between lattice points given by integer coordinates (broadcasting).

        The pairing is formed as ``c1^T (B^T J B) c2`` and reduced mod 2 before
        exponentiating, which keeps the phase accurate for large coordinates.
        """
        C1 = np.asarray(C1, dtype=float)
        C2 = np.asarray(C2, dtype=float)
        omega = np.sum((C1 @ self._gram) * C2, axis=-1)
        return np.exp(1j * np.pi * np.remainder(omega, 2.0))

    def point(self, coords) -> LatticePoint:
        c = tuple(int(v) for v in coords)
        if len(c) != 2 * self.n:
            raise DimensionMismatch(f"expected {2 * self.n} coordinates, got {len(c)}")
        return LatticePoint(c, PhasePoint.from_vector(self.basis @ np.array(c, dtype=float)))

    def locate(self, x) -> LatticePoint:
        """The lattice point at phase point ``x``; raises if ``x`` is off-lattice."""
        if isinstance(x, LatticePoint):
            x = x.embedded
        x = as_phase_point(x)
        if x.n != self.n:
            raise DimensionMismatch(f"dimension mismatch: {x.n} vs {self.n}")
        c = self._inv @ x.vector
        k = np.rint(c)
        if np.max(np.abs(c - k), initial=0.0) > 1e-9:
            raise PointNotInLattice(f"{x!r} is not a lattice point")
        return self.point(k.astype(np.int64))

    def ball(self, radius: int) -> np.ndarray:
        """Integer coordinates of the L-infinity ball, in enumeration order."""
        return integer_ball(2 * self.n, radius)

    def same_as(self, other: Lattice, tol: float = 1e-9) -> bool:
        """True if both bases generate the same subgroup."""
        if self.n != other.n:
            return False
        M = self._inv @ other.basis
        K = np.rint(M)
        return bool(np.max(np.abs(M - K)) < tol and abs(abs(np.linalg.det(K)) - 1) < tol)

    def __repr__(self):
        return f"Lattice(basis={self.basis.tolist()!r})"


def _rationalize(x: float) -> Fraction:
    fr = Fraction(x).limit_denominator(MAX_DENOMINATOR)
    if abs(float(fr) - x) > RATIONAL_TOL:
        raise IrrationalBasis(f"entry {x!r} is not within {RATIONAL_TOL} of a rational")
    return fr


def dual_lattice(D: Lattice) -> Lattice:
    """The commutant lattice ``{z : w1.z2 - z1.w2 in Z for all w in D}``.

    Only rational bases are accepted.  The basis is ``(B^T J)^{-1}``, rounded to
    nearby rationals and re-checked exactly.
    """
    n = D.n
    Bq = [[_rationalize(v) for v in row] for row in D.basis]
    J = standard_symplectic(n)
    dual = np.linalg.inv(D.basis.T @ J)
    Zq = [[_rationalize(v) for v in row] for row in dual]
    # exact check: B^T J Z must be an integer matrix
    Jq = [[Fraction(int(v)) for v in row] for row in J]
    BtJ = [[sum(Bq[k][i] * Jq[k][j] for k in range(2 * n)) for j in range(2 * n)]
           for i in range(2 * n)]
    for i in range(2 * n):
        for j in range(2 * n):
            v = sum(BtJ[i][k] * Zq[k][j] for k in range(2 * n))
            if v.denominator != 1:
                raise IrrationalBasis("dual basis does not pair integrally; basis not rational enough")
    return Lattice(np.array([[float(v) for v in row] for row in Zq]))


# ---------------------------------------------------------------------------
# Complexification and H
# ---------------------------------------------------------------------------


def complexify(x, T) -> np.ndarray:
    """``T x1 + x2``."""
    x = as_phase_point(x)
    T = as_structure(T)
    if x.n != T.n:
        raise DimensionMismatch(f"dimension mismatch: {x.n} vs {T.n}")
    return T.T @ x.x1 + x.x2


def complexify_many(X: np.ndarray, T: ComplexStructure, conjugate: bool = False) -> np.ndarray:
    """Row-wise ``T x1 + x2`` (or ``conj(T) x1 + x2``) for stacked phase vectors."""
    n = T.n
    M = T.T.conj() if conjugate else T.T
    X = np.asarray(X, dtype=float)
    return X[..., :n] @ M.T + X[..., n:]


def hermitian_H(g, h, T) -> complex:
    """``(T g1 + g2)^T (Im T)^{-1} (conj(T) h1 + h2)``."""
    g, h = as_phase_point(g), as_phase_point(h)
    T = as_structure(T)
    _same_n(g, h)
    if g.n != T.n:
        raise DimensionMismatch(f"dimension mismatch: {g.n} vs {T.n}")
    gu = T.T @ g.x1 + g.x2
    hs = T.T.conj() @ h.x1 + h.x2
    return complex(gu @ T.im_inv @ hs)


def hermitian_H_many(G: np.ndarray, Hs: np.ndarray, T: ComplexStructure) -> np.ndarray:
    """Broadcast ``H`` over stacked phase vectors."""
    gu = complexify_many(G, T)
    hs = complexify_many(Hs, T, conjugate=True)
    return np.sum((gu @ T.im_inv) * hs, axis=-1)
