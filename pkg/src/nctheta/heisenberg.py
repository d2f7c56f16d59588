"""The module ``S(R^n)`` realised by exact Gaussians, the Heisenberg
representation acting on them, constant-curvature connections and theta
vectors.

A :class:`GaussianVector` is ``exp(s + pi i x^T A x + 2 pi i b^T x)``.  The
set is closed under ``pi_y`` and every identity in this module is checked by
exact coefficient algebra plus pointwise evaluation at fixed probe points.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Union

import numpy as np
from scipy.stats import qmc

from .errors import DimensionMismatch, IndexOutOfRange, NotProportional
from .lattice import (
    ComplexStructure,
    as_phase_point,
    as_structure,
    check_symmetric_pd,
    cocycle_alpha,
    validate_structure,
)

N_PROBES = 20
PROBE_HALFWIDTH = 2.0


@lru_cache(maxsize=None)
def probe_points(n: int) -> np.ndarray:
    """20 fixed Halton points in ``[-2, 2]^n`` (the first, all-zero point is skipped)."""
    pts = qmc.Halton(d=n, scramble=False).random(N_PROBES + 1)[1:]
    pts = PROBE_HALFWIDTH * (2.0 * pts - 1.0)
    pts.setflags(write=False)
    return pts


def _vec(v, n: int, what: str) -> np.ndarray:
    a = np.atleast_1d(np.asarray(v, dtype=complex))
    if a.shape != (n,):
        raise DimensionMismatch(f"{what} must have shape ({n},), got {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class GaussianVector:
    """``exp(s + pi i x^T A x + 2 pi i b^T x)`` on ``R^n``.

    ``A`` must be symmetric with positive-definite imaginary part, which is
    what places the function in ``S(R^n)``.  Use :meth:`unchecked` only for
    deliberately degenerate inputs (e.g. pure chirps in oracle tests).
    """

    A: np.ndarray
    b: np.ndarray
    s: complex = 0.0

    def __post_init__(self):
        A = np.array(self.A, dtype=complex)
        if A.ndim == 0:
            A = A.reshape(1, 1)
        check_symmetric_pd(A, "A")
        self._store(0.5 * (A + A.T), self.b, self.s)

    def _store(self, A, b, s):
        A = np.array(A, dtype=complex)
        A.setflags(write=False)
        b = _vec(b, A.shape[0], "b")
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "s", complex(s))

    @classmethod
    def unchecked(cls, A, b, s=0.0) -> GaussianVector:
        """Build without the Schwartz-class check."""
        obj = object.__new__(cls)
        A = np.array(A, dtype=complex)
        if A.ndim == 0:
            A = A.reshape(1, 1)
        obj._store(A, b, s)
        return obj

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def __call__(self, x) -> np.ndarray | complex:
        return evaluate(self, x)

    def scaled(self, factor: complex) -> GaussianVector:
        """``factor * f`` (absorbed into the log-prefactor)."""
        return GaussianVector.unchecked(self.A, self.b, self.s + np.log(complex(factor)))

    def __repr__(self):
        return f"GaussianVector(A={self.A.tolist()}, b={self.b.tolist()}, s={self.s})"


def evaluate(f: GaussianVector, x) -> np.ndarray | complex:
    """Pointwise value; ``x`` has shape ``(n,)`` or ``(m, n)``."""
    X = np.asarray(x, dtype=float)
    single = X.ndim <= 1
    X = X.reshape(-1, f.n)
    quad = np.einsum("mi,ij,mj->m", X, f.A, X)
    val = np.exp(f.s + 1j * np.pi * quad + 2j * np.pi * (X @ f.b))
    return complex(val[0]) if single else val


def evaluate_sum(terms: Iterable[GaussianVector], x) -> np.ndarray | complex:
    """Evaluate a formal sum of Gaussians."""
    terms = list(terms)
    if not terms:
        X = np.asarray(x, dtype=float)
        return 0j if X.ndim <= 1 else np.zeros(X.shape[0], dtype=complex)
    total = evaluate(terms[0], x)
    for t in terms[1:]:
        total = total + evaluate(t, x)
    return total


def pi_act(y, f: GaussianVector) -> GaussianVector:
    """Heisenberg action ``(pi_y f)(x) = exp(2 pi i x.y2 + pi i y1.y2) f(x + y1)``.

    Exact: ``A`` is unchanged, ``b -> b + A y1 + y2`` and
    ``s -> s + pi i y1.A.y1 + 2 pi i b.y1 + pi i y1.y2``.
    """
    y = as_phase_point(y)
    if y.n != f.n:
        raise DimensionMismatch(f"dimension mismatch: {y.n} vs {f.n}")
    y1, y2 = y.x1, y.x2
    b = f.b + f.A @ y1 + y2
    s = f.s + 1j * np.pi * (y1 @ f.A @ y1) + 2j * np.pi * (f.b @ y1) + 1j * np.pi * (y1 @ y2)
    return GaussianVector.unchecked(f.A, b, s)


def pi_act_batch(Y: np.ndarray, f: GaussianVector) -> tuple[np.ndarray, np.ndarray]:
    """Linear coefficients ``(m, n)`` and log-prefactors ``(m,)`` of ``pi_y f``
    for each row ``y`` of ``Y``; ``A`` is shared and unchanged."""
    Y = np.asarray(Y, dtype=float).reshape(-1, 2 * f.n)
    y1, y2 = Y[:, : f.n], Y[:, f.n :]
    B = f.b + y1 @ f.A.T + y2
    S = (
        f.s
        + 1j * np.pi * np.einsum("mi,ij,mj->m", y1, f.A, y1)
        + 2j * np.pi * (y1 @ f.b)
        + 1j * np.pi * np.sum(y1 * y2, axis=1)
    )
    return B, S


def pi_adjoint(z, f: GaussianVector) -> GaussianVector:
    """``pi_z^*`` (Hilbert-space adjoint).  ``pi`` is unitary and
    ``pi_z pi_{-z} = alpha(z, -z) = 1``, so this is exactly ``pi_{-z}``."""
    return pi_act(-as_phase_point(z), f)


def composition_defect(x, y, f: GaussianVector) -> float:
    """Max over probes of ``|pi_x pi_y f - alpha(x, y) pi_{x+y} f|``."""
    x, y = as_phase_point(x), as_phase_point(y)
    P = probe_points(f.n)
    lhs = evaluate(pi_act(x, pi_act(y, f)), P)
    rhs = cocycle_alpha(x, y) * evaluate(pi_act(x + y, f), P)
    return float(np.max(np.abs(lhs - rhs)))


def commutation_defect(x, y, f: GaussianVector) -> float:
    """Max over probes of ``|pi_x pi_y f - alpha(x,y) conj(alpha(y,x)) pi_y pi_x f|``."""
    x, y = as_phase_point(x), as_phase_point(y)
    P = probe_points(f.n)
    lhs = evaluate(pi_act(x, pi_act(y, f)), P)
    phase = cocycle_alpha(x, y) * np.conj(cocycle_alpha(y, x))
    rhs = phase * evaluate(pi_act(y, pi_act(x, f)), P)
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# Polynomial x Gaussian, connections and curvature
# ---------------------------------------------------------------------------

Monomial = tuple  # exponent tuple of length n


@dataclass(frozen=True)
class PolyGaussian:
    """``p(x) * f(x)`` with ``p`` a sparse polynomial ``{exponents: coeff}``."""

    poly: dict
    f: GaussianVector

    @classmethod
    def lift(cls, f: GaussianVector) -> PolyGaussian:
        return cls({(0,) * f.n: 1.0 + 0j}, f)

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self.poly), default=0)

    def linear_part(self) -> tuple[np.ndarray, complex]:
        """``(u, v)`` with ``p(x) = u.x + v``; raises if ``p`` has higher degree."""
        n = self.f.n
        u = np.zeros(n, dtype=complex)
        v = 0j
        for m, c in self.poly.items():
            d = sum(m)
            if d == 0:
                v += c
            elif d == 1:
                u[m.index(1)] += c
            elif c != 0:
                raise ValueError("polynomial has degree > 1")
        return u, v

    def poly_values(self, x) -> np.ndarray:
        X = np.asarray(x, dtype=float).reshape(-1, self.f.n)
        out = np.zeros(X.shape[0], dtype=complex)
        for m, c in self.poly.items():
            out += c * np.prod(X ** np.array(m), axis=1)
        return out

    def evaluate(self, x) -> np.ndarray | complex:
        X = np.asarray(x, dtype=float)
        vals = self.poly_values(X) * np.atleast_1d(evaluate(self.f, X.reshape(-1, self.f.n)))
        return complex(vals[0]) if X.ndim <= 1 else vals

    def times_coordinate(self, alpha: int, factor: complex = 1.0) -> PolyGaussian:
        out: dict = {}
        for m, c in self.poly.items():
            m2 = list(m)
            m2[alpha] += 1
            _acc(out, tuple(m2), factor * c)
        return PolyGaussian(out, self.f)

    def derivative(self, alpha: int) -> PolyGaussian:
        """Exact ``d/dx_alpha`` using ``df/dx_alpha = 2 pi i (A x + b)_alpha f``."""
        out: dict = {}
        n = self.f.n
        for m, c in self.poly.items():
            if m[alpha] > 0:
                m2 = list(m)
                m2[alpha] -= 1
                _acc(out, tuple(m2), c * m[alpha])
            # c * x^m * 2 pi i (sum_beta A[alpha, beta] x_beta + b_alpha)
            _acc(out, m, c * 2j * np.pi * self.f.b[alpha])
            for beta in range(n):
                if self.f.A[alpha, beta] != 0:
                    m2 = list(m)
                    m2[beta] += 1
                    _acc(out, tuple(m2), c * 2j * np.pi * self.f.A[alpha, beta])
        return PolyGaussian(out, self.f)

    def __add__(self, other: PolyGaussian) -> PolyGaussian:
        if other.f is not self.f:
            raise ValueError("can only add PolyGaussians sharing the same Gaussian factor")
        out = dict(self.poly)
        for m, c in other.poly.items():
            _acc(out, m, c)
        return PolyGaussian(out, self.f)

    def __sub__(self, other: PolyGaussian) -> PolyGaussian:
        return self + other.scaled(-1.0)

    def scaled(self, k: complex) -> PolyGaussian:
        return PolyGaussian({m: k * c for m, c in self.poly.items()}, self.f)


def _acc(d: dict, key, val) -> None:
    d[key] = d.get(key, 0j) + val


@dataclass(frozen=True, eq=False)
class ConnectionSpec:
    """Curvature constants ``sigma`` and complex-structure block ``tau``.

    The connection is ``(d/dx_alpha, -2 pi i sigma_alpha x_alpha)`` and the
    holomorphic directions are ``t = (1, tau)``.
    """

    sigma: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        sigma = np.atleast_1d(np.asarray(self.sigma, dtype=float))
        tau = np.array(self.tau, dtype=complex)
        if tau.ndim == 0:
            tau = tau.reshape(1, 1)
        n = sigma.size
        if tau.shape != (n, n):
            raise DimensionMismatch(f"tau must be {n}x{n}, got {tau.shape}")
        sigma.setflags(write=False)
        tau.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "tau", tau)

    @property
    def n(self) -> int:
        return self.sigma.size

    @property
    def t(self) -> np.ndarray:
        """The ``n x 2n`` matrix ``(1, tau)``."""
        return np.hstack([np.eye(self.n), self.tau])


def build_T(spec: ConnectionSpec) -> ComplexStructure:
    """``T[a, b] = tau[a, b] * sigma[b]``, validated."""
    return validate_structure(spec.tau * spec.sigma[np.newaxis, :])


FunctionLike = Union[GaussianVector, PolyGaussian]


def _as_poly(f: FunctionLike) -> PolyGaussian:
    return PolyGaussian.lift(f) if isinstance(f, GaussianVector) else f


def connection_apply(j: int, spec: ConnectionSpec, f):
    """Apply ``nabla_j`` (0-based, ``0 <= j < 2n``).

    ``j < n`` is ``d/dx_j``; ``j = n + a`` is multiplication by
    ``-2 pi i sigma_a x_a``.  ``f`` may be a Gaussian, a :class:`PolyGaussian`,
    or a sequence of them (a formal sum, mapped termwise).
    """
    if isinstance(f, (list, tuple)):
        return [connection_apply(j, spec, term) for term in f]
    p = _as_poly(f)
    n = spec.n
    if p.f.n != n:
        raise DimensionMismatch(f"dimension mismatch: {p.f.n} vs {n}")
    if not 0 <= j < 2 * n:
        raise IndexOutOfRange(f"connection index {j} outside [0, {2 * n})")
    if j < n:
        return p.derivative(j)
    a = j - n
    return p.times_coordinate(a, -2j * np.pi * spec.sigma[a])


def holomorphic_connection_apply(alpha: int, spec: ConnectionSpec, f) -> PolyGaussian:
    """``sum_j t[alpha, j] nabla_j f`` with ``t = (1, tau)``."""
    n = spec.n
    if not 0 <= alpha < n:
        raise IndexOutOfRange(f"holomorphic index {alpha} outside [0, {n})")
    t = spec.t
    p = _as_poly(f)
    out = PolyGaussian({}, p.f)
    for j in range(2 * n):
        if t[alpha, j] != 0:
            out = out + connection_apply(j, spec, p).scaled(t[alpha, j])
    return out


def commutator(j: int, k: int, spec: ConnectionSpec, f) -> PolyGaussian:
    """``[nabla_j, nabla_k] f`` as an exact polynomial times ``f``."""
    p = _as_poly(f)
    return connection_apply(j, spec, connection_apply(k, spec, p)) - connection_apply(
        k, spec, connection_apply(j, spec, p)
    )


def _scalar_of(pg: PolyGaussian, tol: float = 1e-12) -> complex:
    lam = 0j
    scale = max((abs(c) for c in pg.poly.values()), default=0.0)
    for m, c in pg.poly.items():
        if sum(m) == 0:
            lam += c
        elif abs(c) > tol * max(scale, 1.0):
            raise NotProportional(f"commutator has x-dependent term {m}: {c}")
    return lam


def curvature_entry(j: int, k: int, spec: ConnectionSpec, f) -> complex:
    """``lambda`` with ``[nabla_j, nabla_k] f = lambda f``."""
    return _scalar_of(commutator(j, k, spec, f))


def curvature_scalar(alpha: int, spec: ConnectionSpec, f) -> complex:
    """Curvature in the ``(alpha, n + alpha)`` plane; evaluates to ``-2 pi i sigma_alpha``."""
    if not 0 <= alpha < spec.n:
        raise IndexOutOfRange(f"alpha {alpha} outside [0, {spec.n})")
    return curvature_entry(alpha, spec.n + alpha, spec, f)


def curvature_matrix(spec: ConnectionSpec, f) -> np.ndarray:
    d = 2 * spec.n
    F = np.zeros((d, d), dtype=complex)
    for j in range(d):
        for k in range(d):
            if j != k:
                F[j, k] = curvature_entry(j, k, spec, f)
    return F


# ---------------------------------------------------------------------------
# Theta vectors and holomorphicity
# ---------------------------------------------------------------------------


def theta_vector(T, c=None) -> GaussianVector:
    """``f_c(x) = exp(pi i x^T T x + 2 pi i c^T x)``."""
    T = as_structure(T)
    c = np.zeros(T.n, dtype=complex) if c is None else _vec(c, T.n, "c")
    return GaussianVector(T.T, c, 0.0)


def _central_difference(f: GaussianVector, alpha: int, X: np.ndarray, step: float) -> np.ndarray:
    e = np.zeros(f.n)
    e[alpha] = step
    return (evaluate(f, X + e) - evaluate(f, X - e)) / (2 * step)


def holomorphic_residual(T, c, f: GaussianVector, step: float | None = None) -> float:
    """Max over ``alpha`` and the probes of
    ``|(d_alpha - 2 pi i (T x)_alpha - 2 pi i c_alpha) f|``.

    The derivative is exact unless ``step`` is given, in which case a central
    difference with that step is used instead.
    """
    T = as_structure(T)
    c = _vec(c, T.n, "c")
    if f.n != T.n:
        raise DimensionMismatch(f"dimension mismatch: {f.n} vs {T.n}")
    P = probe_points(T.n)
    fx = evaluate(f, P)
    worst = 0.0
    for alpha in range(T.n):
        if step is None:
            deriv = 2j * np.pi * (P @ f.A[alpha] + f.b[alpha]) * fx
        else:
            deriv = _central_difference(f, alpha, P, step)
        resid = deriv - 2j * np.pi * (P @ T.T[alpha] + c[alpha]) * fx
        worst = max(worst, float(np.max(np.abs(resid))))
    return worst
