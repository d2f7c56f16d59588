"""The twisted group algebra ``S(D)``: delta generators with cocycle
multiplication, algebra-valued inner products in closed form, the module
action, and a brute-force quadrature oracle for the Gaussian pairing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy.integrate import simpson

from .errors import DimensionMismatch, LatticeMismatch, NotIntegrable, PointNotInLattice
from .heisenberg import (
    GaussianVector,
    evaluate,
    pi_act,
    pi_act_batch,
    pi_adjoint,
    probe_points,
)
from .lattice import (
    Lattice,
    LatticePoint,
    PhasePoint,
    dual_lattice,
    symplectic_pairing_many,
)

UNDERFLOW = 1e-300


def _lattice_compatible(a: Lattice, b: Lattice) -> bool:
    return a is b or (a.n == b.n and np.array_equal(a.basis, b.basis))


class TwistedElement:
    """Finitely supported ``Phi = sum_w Phi(w) e(w)`` over a lattice.

    Keys are integer coordinate tuples; coefficients below ``1e-300`` in
    modulus are dropped.  Instances are treated as immutable.
    """

    __slots__ = ("lattice", "_coef")

    def __init__(self, lattice: Lattice, coefficients: Mapping | None = None):
        self.lattice = lattice
        dim = 2 * lattice.n
        coef = {}
        for k, v in (coefficients or {}).items():
            key = tuple(int(t) for t in (k.coords if isinstance(k, LatticePoint) else k))
            if len(key) != dim:
                raise DimensionMismatch(f"key {key} does not have {dim} coordinates")
            v = complex(v)
            if abs(v) >= UNDERFLOW:
                coef[key] = coef.get(key, 0j) + v
        self._coef = coef

    @property
    def coefficients(self) -> dict:
        return dict(self._coef)

    @property
    def support(self) -> list:
        return sorted(self._coef)

    def __getitem__(self, key) -> complex:
        if isinstance(key, LatticePoint):
            key = key.coords
        return self._coef.get(tuple(key), 0j)

    def __len__(self):
        return len(self._coef)

    def items(self):
        return sorted(self._coef.items())

    def __add__(self, other: TwistedElement) -> TwistedElement:
        _check_same(self, other)
        out = dict(self._coef)
        for k, v in other._coef.items():
            out[k] = out.get(k, 0j) + v
        return TwistedElement(self.lattice, out)

    def __sub__(self, other: TwistedElement) -> TwistedElement:
        return self + other.scale(-1)

    def scale(self, k: complex) -> TwistedElement:
        return TwistedElement(self.lattice, {w: k * v for w, v in self._coef.items()})

    def __rmul__(self, k):
        if isinstance(k, (int, float, complex, np.number)):
            return self.scale(k)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, TwistedElement):
            return multiply(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        return NotImplemented

    def max_difference(self, other: TwistedElement, keys: Iterable | None = None) -> float:
        """Max coefficient-wise ``|self - other|`` over ``keys`` (default: union of supports)."""
        _check_same(self, other)
        if keys is None:
            keys = set(self._coef) | set(other._coef)
        return max((abs(self[k] - other[k]) for k in keys), default=0.0)

    def to_json(self) -> list:
        """``[{coords, re, im}, ...]`` sorted in enumeration order."""
        return [{"coords": list(k), "re": v.real, "im": v.imag} for k, v in self.items()]

    @classmethod
    def from_json(cls, lattice: Lattice, data) -> TwistedElement:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(lattice, {tuple(d["coords"]): complex(d["re"], d["im"]) for d in data})

    def __eq__(self, other):
        if not isinstance(other, TwistedElement):
            return NotImplemented
        return _lattice_compatible(self.lattice, other.lattice) and self._coef == other._coef

    def __repr__(self):
        return f"TwistedElement(support={len(self._coef)})"


def _check_same(a: TwistedElement, b: TwistedElement) -> None:
    if not _lattice_compatible(a.lattice, b.lattice):
        raise LatticeMismatch("elements live on different lattices")


def delta(w, D: Lattice) -> TwistedElement:
    """The generator ``e(w)``; ``w`` may be a lattice point, integer coords,
    or a phase point lying on ``D``."""
    if isinstance(w, LatticePoint):
        if len(w.coords) != 2 * D.n or not np.allclose(
            D.embed([w.coords])[0], w.embedded.vector, atol=1e-12
        ):
            raise PointNotInLattice(f"{w!r} does not belong to this lattice")
        key = w.coords
    elif isinstance(w, PhasePoint):
        key = D.locate(w).coords
    else:
        arr = np.asarray(w)
        if arr.dtype.kind not in "iu":
            if not np.allclose(arr, np.rint(arr)):
                raise PointNotInLattice(f"non-integer coordinates {w!r}")
        key = tuple(int(v) for v in np.rint(arr))
        if len(key) != 2 * D.n:
            raise DimensionMismatch(f"expected {2 * D.n} coordinates")
    return TwistedElement(D, {key: 1.0})


def multiply(phi: TwistedElement, psi: TwistedElement) -> TwistedElement:
    """Twisted convolution ``sum phi(w1) psi(w2) alpha(w1, w2) e(w1 + w2)``."""
    _check_same(phi, psi)
    D = phi.lattice
    if not len(phi) or not len(psi):
        return TwistedElement(D)
    k1, v1 = zip(*phi.items())
    k2, v2 = zip(*psi.items())
    K1 = np.array(k1, dtype=np.int64)
    K2 = np.array(k2, dtype=np.int64)
    phase = D.cocycle_many(K1[:, None, :], K2[None, :, :])
    prod = np.outer(np.array(v1), np.array(v2)) * phase
    out: dict = {}
    for i, a in enumerate(K1):
        for j, b in enumerate(K2):
            key = tuple((a + b).tolist())
            out[key] = out.get(key, 0j) + prod[i, j]
    return TwistedElement(D, out)


# ---------------------------------------------------------------------------
# Gaussian pairing: closed form and quadrature oracle
# ---------------------------------------------------------------------------


def _combined_form(f: GaussianVector, g: GaussianVector):
    """``f * conj(g) = exp(const - pi x^T M x + 2 pi v^T x)``."""
    if f.n != g.n:
        raise DimensionMismatch(f"dimension mismatch: {f.n} vs {g.n}")
    M = _quadratic_part(f.A, g.A)
    v = 1j * (f.b - g.b.conj())
    const = f.s + np.conj(g.s)
    return M, v, const


def _quadratic_part(Af: np.ndarray, Ag: np.ndarray) -> np.ndarray:
    M = -1j * (Af - Ag.conj())
    ReM = 0.5 * (M.real + M.real.T)
    ev = np.linalg.eigvalsh(ReM)
    if ev[0] <= 1e-12 * max(ev[-1], 1.0):
        raise NotIntegrable("combined quadratic form has no positive-definite real part")
    return M


def _gaussian_integral(M: np.ndarray, v: np.ndarray, const) -> np.ndarray:
    """``exp(const) det(M)^{-1/2} exp(pi v^T M^{-1} v)``, batched over rows of ``v``."""
    lam = np.linalg.eigvals(M)
    log_det_half = 0.5 * np.sum(np.log(lam))
    W = np.linalg.solve(M, np.atleast_2d(v).T).T
    quad = np.sum(np.atleast_2d(v) * W, axis=-1)
    return np.exp(const - log_det_half + np.pi * quad)


def gaussian_pairing(f: GaussianVector, g: GaussianVector) -> complex:
    """Closed form of ``<f, g> = int f(x) conj(g(x)) dx``.

    Uses ``int exp(-pi x^T M x + 2 pi v^T x) dx = det(M)^{-1/2} exp(pi v^T M^{-1} v)``
    with the principal square root taken eigenvalue by eigenvalue.  Since
    ``Re M`` is positive definite the eigenvalues lie in the right half-plane.
    """
    M, v, const = _combined_form(f, g)
    return complex(_gaussian_integral(M, v, const)[0])


def quadrature_pairing(
    f: GaussianVector, g: GaussianVector, box_halfwidth: float = 6.0, points_per_dim: int = 4096
) -> complex:
    """Tensor-product Simpson rule for ``<f, g>`` on ``[-box, box]^n``.

    Independent of :func:`gaussian_pairing`; error is ``O(h^4)`` plus the
    Gaussian tail outside the box.
    """
    _combined_form(f, g)
    n = f.n
    x = np.linspace(-box_halfwidth, box_halfwidth, points_per_dim)
    grids = np.meshgrid(*([x] * n), indexing="ij")
    X = np.stack([G.ravel() for G in grids], axis=1)
    vals = (evaluate(f, X) * np.conj(evaluate(g, X))).reshape((points_per_dim,) * n)
    for _ in range(n):
        vals = simpson(vals, x=x, axis=-1)
    return complex(vals)


# ---------------------------------------------------------------------------
# Algebra-valued inner products and actions
# ---------------------------------------------------------------------------


def _pairings_over(f, g, L: Lattice, radius: int, conj_order: bool) -> dict:
    """``<f, pi_w g>`` (or ``<pi_w g, f>``) for every ``w`` in the ball, in one batch."""
    if f.n != g.n or L.n != f.n:
        raise DimensionMismatch("dimension mismatch between vectors and lattice")
    C = L.ball(radius)
    B, S = pi_act_batch(L.embed(C), g)
    if conj_order:
        M = _quadratic_part(g.A, f.A)
        vals = _gaussian_integral(M, 1j * (B - f.b.conj()), S + np.conj(f.s))
    else:
        M = _quadratic_part(f.A, g.A)
        vals = _gaussian_integral(M, 1j * (f.b - B.conj()), f.s + np.conj(S))
    return {tuple(k): v for k, v in zip(C.tolist(), vals)}


def inner_product_D(f: GaussianVector, g: GaussianVector, D: Lattice, radius: int) -> TwistedElement:
    """``_D<f, g> = sum_w <f, pi_w g> e(w)`` over the radius ball."""
    return TwistedElement(D, _pairings_over(f, g, D, radius, conj_order=False))


def inner_product_Dperp(
    f: GaussianVector, g: GaussianVector, Dperp: Lattice, radius: int
) -> TwistedElement:
    """``<f, g>_{D-perp}`` with coefficient ``<pi_z g, f>`` at ``z``."""
    return TwistedElement(Dperp, _pairings_over(f, g, Dperp, radius, conj_order=True))


def module_action(phi: TwistedElement, f: GaussianVector) -> list[GaussianVector]:
    """``pi(Phi) f`` as the formal sum ``[Phi(w) pi_w f, ...]``."""
    D = phi.lattice
    terms = []
    for key, val in phi.items():
        w = PhasePoint.from_vector(D.embed([key])[0])
        terms.append(pi_act(w, f).scaled(val))
    return terms


def right_action(f: GaussianVector, omega: TwistedElement) -> list[GaussianVector]:
    """``f Omega = sum_z (pi_z^* f) Omega(z)`` as a formal sum."""
    L = omega.lattice
    terms = []
    for key, val in omega.items():
        z = PhasePoint.from_vector(L.embed([key])[0])
        terms.append(pi_adjoint(z, f).scaled(val))
    return terms


def compatibility_defect(
    phi: TwistedElement, f: GaussianVector, g: GaussianVector, D: Lattice, radius: int
) -> float:
    """Max coefficient gap between ``_D<Phi f, g>`` and ``Phi * _D<f, g>``.

    Compared on the ball of radius ``radius - max|supp Phi|``, where the
    truncated convolution is complete.
    """
    if not _lattice_compatible(phi.lattice, D):
        raise LatticeMismatch("phi is not an element of S(D)")
    reach = max((max(abs(c) for c in k) for k in phi.support), default=0)
    inner = radius - reach
    if inner < 0:
        raise ValueError("radius smaller than the support of phi")
    lhs: dict = {}
    for t in module_action(phi, f):
        for key, v in _pairings_over(t, g, D, inner, conj_order=False).items():
            lhs[key] = lhs.get(key, 0j) + v
    rhs = multiply(phi, inner_product_D(f, g, D, radius))
    return max(abs(lhs[k] - rhs[k]) for k in lhs)


def _action_values(omega: TwistedElement, f: GaussianVector, P: np.ndarray, adjoint: bool) -> np.ndarray:
    """Pointwise ``sum_w omega(w) (pi_w f)(x)`` (``pi_w^*`` if ``adjoint``), batched."""
    if not len(omega):
        return np.zeros(P.shape[0], dtype=complex)
    keys, vals = zip(*omega.items())
    E = omega.lattice.embed(np.array(keys))
    B, S = pi_act_batch(-E if adjoint else E, f)
    quad = np.einsum("pi,ij,pj->p", P, f.A, P)
    expo = S[:, None] + 1j * np.pi * quad[None, :] + 2j * np.pi * (B @ P.T)
    return np.array(vals) @ np.exp(expo)


def associativity_defect(
    f: GaussianVector,
    g: GaussianVector,
    h: GaussianVector,
    D: Lattice,
    radius: int,
    probes: np.ndarray | None = None,
) -> float:
    """Max over probes of ``|pi(_D<f, g>) h - f <g, h>_{D-perp}|``, both sides
    truncated to the same radius in their own lattice coordinates.

    The ``D-perp`` sum carries the Haar weight ``1 / covol(D)``; it is 1 for
    unimodular lattices such as ``Z^n x Z^n``.
    """
    Dperp = dual_lattice(D)
    P = probe_points(f.n) if probes is None else np.atleast_2d(probes)
    lhs = _action_values(inner_product_D(f, g, D, radius), h, P, adjoint=False)
    rhs = _action_values(inner_product_Dperp(g, h, Dperp, radius), f, P, adjoint=True) / D.covolume
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# Elements with full-lattice support
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalyticElement:
    """Element of (completed) ``S(D)`` given by log-coefficients.

    ``log_coefficient`` maps an ``(m, 2n)`` integer coordinate array to ``m``
    complex logs.  Working in log space keeps comparisons immune to underflow.
    """

    lattice: Lattice
    log_coefficient: Callable[[np.ndarray], np.ndarray]
    radius: int

    def log_at(self, coords) -> np.ndarray:
        C = np.atleast_2d(np.asarray(coords, dtype=np.int64))
        return np.asarray(self.log_coefficient(C), dtype=complex)

    def coefficient(self, coords) -> complex:
        return complex(np.exp(self.log_at([coords])[0]))

    def materialize(self, radius: int | None = None) -> TwistedElement:
        R = self.radius if radius is None else radius
        C = self.lattice.ball(R)
        vals = np.exp(self.log_at(C))
        return TwistedElement(self.lattice, {tuple(k.tolist()): v for k, v in zip(C, vals)})

    def left_multiply_delta(self, g_coords, log_scale: complex = 0.0) -> AnalyticElement:
        """``exp(log_scale) e(g) * self`` using the cocycle of the lattice."""
        g = np.asarray(g_coords, dtype=np.int64)
        D = self.lattice
        gE = D.embed([g])[0]
        base = self.log_coefficient

        def log_coef(C):
            C = np.atleast_2d(C)
            src = C - g
            return log_scale + base(src) + 1j * np.pi * symplectic_pairing_many(gE, D.embed(src))

        return AnalyticElement(D, log_coef, self.radius)
