"""Classical theta series, Gaussian seeds, the lattice-periodized transform
``f~`` and the kq (Zak) transform.

All lattice sums run over the L-infinity ball of ``Z^n`` in the fixed
lexicographic order from :func:`nctheta.lattice.integer_ball`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotOneDimensional, ValidationError
from .heisenberg import GaussianVector, evaluate
from .lattice import ComplexStructure, as_structure, integer_ball

DEFAULT_RADIUS = {1: 12, 2: 8}


@dataclass(frozen=True)
class TruncationPolicy:
    """L-infinity radius of a truncated lattice sum."""

    radius: int

    def __post_init__(self):
        if int(self.radius) != self.radius or self.radius < 1:
            raise ValidationError(f"truncation radius must be an integer >= 1, got {self.radius}")

    @classmethod
    def default(cls, n: int) -> TruncationPolicy:
        return cls(DEFAULT_RADIUS.get(n, 6))


def _policy(trunc, n: int) -> TruncationPolicy:
    if trunc is None:
        return TruncationPolicy.default(n)
    if isinstance(trunc, TruncationPolicy):
        return trunc
    return TruncationPolicy(int(trunc))


def _cvec(v, n: int, what: str) -> np.ndarray:
    a = np.atleast_1d(np.asarray(v, dtype=complex))
    if a.shape != (n,):
        raise DimensionMismatch(f"{what} must have shape ({n},), got {a.shape}")
    return a


def _theta_terms(z: np.ndarray, T: ComplexStructure, K: np.ndarray) -> np.ndarray:
    quad = np.einsum("mi,ij,mj->m", K, T.T, K)
    return np.exp(1j * np.pi * (quad + 2 * (K @ z)))


def theta_with_tail(z, T, trunc=None) -> tuple[complex, float]:
    """Truncated ``sum_k exp(pi i (k^T T k + 2 k^T z))`` and a tail estimate.

    The tail estimate is the sum of term moduli over the two shells just
    outside the radius.
    """
    T = as_structure(T)
    z = _cvec(z, T.n, "z")
    R = _policy(trunc, T.n).radius
    value = complex(np.sum(_theta_terms(z, T, integer_ball(T.n, R).astype(float))))
    outer = integer_ball(T.n, R + 2)
    shell = outer[np.max(np.abs(outer), axis=1) > R].astype(float)
    tail = float(np.sum(np.abs(_theta_terms(z, T, shell))))
    return value, tail


def theta(z, T, trunc=None) -> complex:
    """Riemann theta function truncated to an L-infinity ball."""
    return theta_with_tail(z, T, trunc)[0]


def gaussian(T, c, x) -> np.ndarray | complex:
    """``f_{T,c}(x) = exp(pi i (x^T T x + 2 c^T x))``; ``x`` is ``(n,)`` or ``(m, n)``."""
    T = as_structure(T)
    c = _cvec(c, T.n, "c")
    return evaluate(GaussianVector.unchecked(T.T, c), x)


def ftilde(T, c, rho, sigma, trunc=None) -> complex:
    """``sum_k exp(-2 pi i rho.k) f_{T,c}(sigma + k)``."""
    T = as_structure(T)
    c = _cvec(c, T.n, "c")
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    if rho.shape != (T.n,) or sigma.shape != (T.n,):
        raise DimensionMismatch("rho and sigma must be real n-vectors")
    K = integer_ball(T.n, _policy(trunc, T.n).radius).astype(float)
    vals = np.exp(-2j * np.pi * (K @ rho)) * gaussian(T, c, sigma + K)
    return complex(np.sum(vals))


def kq_transform(psi: GaussianVector, a: float, k: float, q: float, trunc=None) -> complex:
    """Zak transform ``C(k, q) = sqrt(a / 2 pi) sum_l exp(i k a l) psi(q - l a)``.

    ``k`` and ``q`` are not reduced to a fundamental cell.  The ``radius``
    window over ``l`` is centred where ``|psi(q - l a)|`` peaks, so the
    truncation error does not grow with ``|q|``.
    """
    if psi.n != 1:
        raise NotOneDimensional(f"kq transform needs n = 1, got n = {psi.n}")
    if not a > 0:
        raise ValidationError(f"lattice constant must be positive, got {a}")
    peak = -psi.b[0].imag / psi.A[0, 0].imag
    centre = np.rint((q - peak) / a)
    L = centre + integer_ball(1, _policy(trunc, 1).radius)[:, 0].astype(float)
    vals = np.exp(1j * k * a * L) * evaluate(psi, (q - L * a)[:, None])
    return complex(np.sqrt(a / (2 * np.pi)) * np.sum(vals))


def quasi_periodicity_factor(z, T, m) -> complex:
    """``exp(-pi i m^T T m - 2 pi i m^T z)``, the multiplier for ``z -> z + T m``."""
    T = as_structure(T)
    z = _cvec(z, T.n, "z")
    m = np.atleast_1d(np.asarray(m, dtype=float))
    return complex(np.exp(-1j * np.pi * (m @ T.T @ m) - 2j * np.pi * (m @ z)))
