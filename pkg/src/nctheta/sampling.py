"""Random inputs with guaranteed validity margins, for sweeps and tests."""

from __future__ import annotations

import numpy as np

from .heisenberg import GaussianVector
from .lattice import ComplexStructure, PhasePoint


def random_structure(rng: np.random.Generator, n: int) -> ComplexStructure:
    """``T = S + iQ``: ``S`` symmetric with U(-1, 1) entries, ``Q = L L^T + 0.3 I``."""
    S = rng.uniform(-1, 1, (n, n))
    S = np.triu(S) + np.triu(S, 1).T
    L = rng.uniform(-1, 1, (n, n))
    Q = L @ L.T + 0.3 * np.eye(n)
    return ComplexStructure(S + 1j * Q)


def random_shift(rng: np.random.Generator, n: int, scale: float = 0.5) -> np.ndarray:
    return rng.uniform(-scale, scale, n) + 1j * rng.uniform(-scale, scale, n)


def random_phase_point(rng: np.random.Generator, n: int, scale: float = 1.0) -> PhasePoint:
    return PhasePoint(rng.uniform(-scale, scale, n), rng.uniform(-scale, scale, n))


def random_gaussian(rng: np.random.Generator, n: int) -> GaussianVector:
    """A Gaussian with ``Im A`` eigenvalues in roughly ``[0.3, 1.3 n]`` and a
    modest linear term, so it is well resolved on ``[-6, 6]^n``."""
    T = random_structure(rng, n)
    b = rng.uniform(-1, 1, n) + 1j * rng.uniform(-0.3, 0.3, n)
    s = rng.uniform(-0.5, 0.5) + 1j * rng.uniform(-np.pi, np.pi)
    return GaussianVector(T.T, b, s)


def random_lattice_coords(rng: np.random.Generator, n: int, reach: int) -> np.ndarray:
    return rng.integers(-reach, reach + 1, 2 * n)
