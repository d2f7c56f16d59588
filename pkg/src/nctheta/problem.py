"""Problem files: JSON with complex numbers written as ``[re, im]``."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classical import DEFAULT_RADIUS
from .lattice import ComplexStructure, Lattice, validate_structure


class ProblemParseError(ValueError):
    """The file is not valid JSON or does not have the expected shape."""


def parse_complex(v) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(t, (int, float)) and not isinstance(t, bool) for t in v
    ):
        return complex(v[0], v[1])
    raise ProblemParseError(f"expected a number or [re, im], got {v!r}")


def parse_complex_vector(v) -> np.ndarray:
    if not isinstance(v, list):
        raise ProblemParseError(f"expected a list of complex numbers, got {v!r}")
    return np.array([parse_complex(x) for x in v], dtype=complex)


def parse_complex_matrix(v) -> np.ndarray:
    if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
        raise ProblemParseError("matrix must be a list of rows")
    rows = [parse_complex_vector(r) for r in v]
    if len({len(r) for r in rows}) > 1:
        raise ProblemParseError("ragged matrix")
    return np.array(rows, dtype=complex)


def complex_to_json(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    n: int
    T: ComplexStructure
    c: np.ndarray
    lattice: Lattice
    radius: int
    seed: int

    def canonical(self) -> dict:
        """JSON-ready dict; also the input to report digests."""
        return {
            "n": self.n,
            "T": [[complex_to_json(v) for v in row] for row in self.T.T],
            "c": [complex_to_json(v) for v in self.c],
            "lattice_basis": self.lattice.basis.tolist(),
            "radius": self.radius,
            "seed": self.seed,
        }


def problem_from_dict(data) -> ProblemSpec:
    """Parse (``ProblemParseError``) then validate (``ValidationError``)."""
    if not isinstance(data, dict):
        raise ProblemParseError("problem must be a JSON object")
    if "n" not in data or "T" not in data:
        raise ProblemParseError("problem needs at least 'n' and 'T'")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemParseError(f"'n' must be a positive integer, got {n!r}")
    T_raw = parse_complex_matrix(data["T"])
    if T_raw.shape != (n, n):
        raise ProblemParseError(f"'T' must be {n}x{n}, got {T_raw.shape}")
    c = parse_complex_vector(data["c"]) if "c" in data else np.zeros(n, dtype=complex)
    if c.shape != (n,):
        raise ProblemParseError(f"'c' must have length {n}")
    basis = data.get("lattice_basis")
    if basis is not None:
        try:
            basis = np.array(basis, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ProblemParseError(f"bad lattice_basis: {exc}") from None
        if basis.shape != (2 * n, 2 * n):
            raise ProblemParseError(f"'lattice_basis' must be {2 * n}x{2 * n}")
    radius = data.get("radius", DEFAULT_RADIUS.get(n, 6))
    seed = data.get("seed", 0)
    for name, v in (("radius", radius), ("seed", seed)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ProblemParseError(f"'{name}' must be a non-negative integer")
    if seed >= 2**64:
        raise ProblemParseError("'seed' must fit in 64 bits")
    if radius < 1:
        raise ProblemParseError("'radius' must be >= 1")

    T = validate_structure(T_raw)
    D = Lattice.standard(n) if basis is None else Lattice(basis)
    return ProblemSpec(n, T, c, D, radius, seed)


def load_problem(path) -> ProblemSpec:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ProblemParseError(str(exc)) from None
    return problem_from_dict(data)
