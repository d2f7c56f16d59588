"""Verification batteries run by ``nctheta verify``.

Each check computes a maximum defect for one identity on the problem's
parameters plus seeded random samples, and passes iff the defect is below its
tolerance.  Suites run in a fixed order; every check draws from its own
random stream derived from ``(seed, check name)``, so results do not depend on
which checks ran before it.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import classical, heisenberg, quantum, twisted
from .lattice import Lattice, PhasePoint, dual_lattice, symplectic_pairing
from .problem import ProblemSpec
from .sampling import (
    random_gaussian,
    random_lattice_coords,
    random_phase_point,
    random_structure,
)

SUITES = ("classical", "heisenberg", "algebra", "quantum")


@dataclass(frozen=True)
class VerificationReport:
    check_name: str
    params_digest: str
    max_defect: float
    tolerance: float
    # ``pass`` is a keyword, hence the trailing underscore; serialized as "pass"
    pass_: bool
    runtime_ms: float

    def to_json(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("pass_")
        return {k: d[k] for k in ("check_name", "params_digest", "max_defect", "tolerance", "pass", "runtime_ms")}


@dataclass(frozen=True)
class Check:
    name: str
    suite: str
    tolerance: float
    run: Callable[[ProblemSpec, np.random.Generator], float]


_REGISTRY: list[Check] = []


def check(suite: str, tolerance: float):
    def deco(fn):
        _REGISTRY.append(Check(f"{suite}.{fn.__name__}", suite, tolerance, fn))
        return fn

    return deco


def checks_for(suite: str) -> list[Check]:
    if suite == "all":
        return [c for s in SUITES for c in _REGISTRY if c.suite == s]
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    return [c for c in _REGISTRY if c.suite == suite]


# ---------------------------------------------------------------------------
# classical
# ---------------------------------------------------------------------------


@check("classical", 1e-12)
def theta_radius_convergence(p, rng):
    z = np.zeros(p.n)
    ref = classical.theta(z, p.T, 2 * p.radius + 10)
    return abs(classical.theta(z, p.T, p.radius) - ref)


@check("classical", 1e-13)
def theta_tail_bound(p, rng):
    return classical.theta_with_tail(np.zeros(p.n), p.T, p.radius)[1]


@check("classical", 1e-12)
def theta_integer_periodicity(p, rng):
    worst = 0.0
    for _ in range(10):
        z = rng.uniform(-0.5, 0.5, p.n) + 1j * rng.uniform(-0.3, 0.3, p.n)
        base = classical.theta(z, p.T, p.radius)
        for j in range(p.n):
            e = np.zeros(p.n)
            e[j] = 1.0
            worst = max(worst, abs(classical.theta(z + e, p.T, p.radius) - base))
    return worst


@check("classical", 1e-8)
def theta_quasi_periodicity(p, rng):
    """Relative defect of ``theta(z + T m) = exp(-pi i m.T.m - 2 pi i m.z) theta(z)``."""
    worst = 0.0
    for _ in range(10):
        z = rng.uniform(-0.5, 0.5, p.n) + 1j * rng.uniform(-0.3, 0.3, p.n)
        m = rng.integers(-2, 3, p.n)
        base = classical.theta(z, p.T, p.radius)
        lhs = classical.theta(z + p.T.T @ m, p.T, p.radius)
        rhs = classical.quasi_periodicity_factor(z, p.T, m) * base
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return worst


@check("classical", 1e-12)
def theta_even(p, rng):
    worst = 0.0
    for _ in range(10):
        z = rng.uniform(-0.5, 0.5, p.n) + 1j * rng.uniform(-0.3, 0.3, p.n)
        worst = max(worst, abs(classical.theta(-z, p.T, p.radius) - classical.theta(z, p.T, p.radius)))
    return worst


@check("classical", 1e-10)
def ftilde_transform(p, rng):
    worst = 0.0
    for _ in range(20):
        rho = rng.uniform(-0.5, 0.5, p.n)
        sigma = rng.uniform(-0.5, 0.5, p.n)
        lhs = classical.ftilde(p.T, p.c, rho, sigma, p.radius)
        pref = np.exp(1j * np.pi * (sigma @ p.T.T @ sigma + 2 * p.c @ sigma))
        rhs = pref * classical.theta(p.T.T @ sigma - rho + p.c, p.T, p.radius)
        worst = max(worst, abs(lhs - rhs))
    return worst


@check("classical", 1e-10)
def kq_periodicity(p, rng):
    psi = heisenberg.theta_vector([[p.T.T[0, 0]]], [p.c[0]])
    worst = 0.0
    for _ in range(20):
        a = rng.uniform(0.5, 2.0)
        k, q = rng.uniform(-np.pi, np.pi), rng.uniform(-1, 1)
        R = int(np.ceil(10 / a)) + 5
        base = classical.kq_transform(psi, a, k, q, R)
        d1 = abs(classical.kq_transform(psi, a, k + 2 * np.pi / a, q, R) - base)
        d2 = abs(classical.kq_transform(psi, a, k, q + a, R) - np.exp(1j * k * a) * base)
        worst = max(worst, d1, d2)
    return worst


# ---------------------------------------------------------------------------
# heisenberg
# ---------------------------------------------------------------------------


@check("heisenberg", 1e-10)
def representation_law(p, rng):
    worst = 0.0
    for _ in range(50):
        f = random_gaussian(rng, p.n)
        x, y = random_phase_point(rng, p.n), random_phase_point(rng, p.n)
        worst = max(worst, heisenberg.composition_defect(x, y, f))
    return worst


@check("heisenberg", 1e-10)
def commutation_relation(p, rng):
    worst = 0.0
    for _ in range(50):
        f = random_gaussian(rng, p.n)
        x, y = random_phase_point(rng, p.n), random_phase_point(rng, p.n)
        worst = max(worst, heisenberg.commutation_defect(x, y, f))
    return worst


@check("heisenberg", 1e-12)
def pi_act_pointwise(p, rng):
    """Symbolic ``pi_y f`` against the defining pointwise formula."""
    P = heisenberg.probe_points(p.n)
    worst = 0.0
    for _ in range(20):
        f = random_gaussian(rng, p.n)
        y = random_phase_point(rng, p.n)
        lhs = heisenberg.evaluate(heisenberg.pi_act(y, f), P)
        rhs = np.exp(2j * np.pi * (P @ y.x2) + 1j * np.pi * (y.x1 @ y.x2)) * heisenberg.evaluate(f, P + y.x1)
        scale = np.maximum(1.0, np.abs(rhs))
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / scale)))
    return worst


@check("heisenberg", 1e-12)
def theta_vector_holomorphic(p, rng):
    return heisenberg.holomorphic_residual(p.T, p.c, heisenberg.theta_vector(p.T, p.c))


@check("heisenberg", 0.4)
def finite_difference_order(p, rng):
    """``|ratio - 4|`` for central-difference residuals at steps 1e-2 and 5e-3."""
    f = heisenberg.theta_vector(p.T, p.c)
    r1 = heisenberg.holomorphic_residual(p.T, p.c, f, step=1e-2)
    r2 = heisenberg.holomorphic_residual(p.T, p.c, f, step=5e-3)
    return abs(r1 / r2 - 4.0)


@check("heisenberg", 1e-12)
def constant_curvature(p, rng):
    """Curvature is ``-2 pi i sigma_a`` on the (a, n+a) planes and zero elsewhere."""
    sigma = rng.uniform(0.5, 2.0, p.n)
    spec = heisenberg.ConnectionSpec(sigma, p.T.T / sigma[np.newaxis, :])
    worst = 0.0
    for _ in range(3):
        F = heisenberg.curvature_matrix(spec, random_gaussian(rng, p.n))
        expected = np.zeros_like(F)
        for a in range(p.n):
            expected[a, p.n + a] = -2j * np.pi * sigma[a]
            expected[p.n + a, a] = 2j * np.pi * sigma[a]
        worst = max(worst, float(np.max(np.abs(F - expected))))
    return worst


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------


def _random_element(rng, D: Lattice, size: int, reach: int = 2) -> twisted.TwistedElement:
    coef = {}
    for _ in range(size):
        key = tuple(random_lattice_coords(rng, D.n, reach).tolist())
        coef[key] = complex(rng.normal(), rng.normal())
    return twisted.TwistedElement(D, coef)


@check("algebra", 1e-12)
def multiplication_associative(p, rng):
    D = p.lattice
    worst = 0.0
    for _ in range(10):
        a, b, c = (_random_element(rng, D, 5) for _ in range(3))
        worst = max(worst, ((a * b) * c).max_difference(a * (b * c)))
    return worst


@check("algebra", 1e-12)
def dual_lattice_integrality(p, rng):
    Dp = dual_lattice(p.lattice)
    B, Z = p.lattice.basis, Dp.basis
    worst = 0.0
    for i in range(B.shape[1]):
        for j in range(Z.shape[1]):
            v = symplectic_pairing(B[:, i], Z[:, j])
            worst = max(worst, abs(v - round(v)))
    return worst


@check("algebra", 1e-6)
def pairing_quadrature_oracle(p, rng):
    """Relative gap between closed-form and Simpson pairings (n = 1 pairs)."""
    worst = 0.0
    for _ in range(20):
        f, g = random_gaussian(rng, 1), random_gaussian(rng, 1)
        exact = twisted.gaussian_pairing(f, g)
        quad = twisted.quadrature_pairing(f, g, 6.0, 4096)
        worst = max(worst, abs(exact - quad) / abs(exact))
    return worst


@check("algebra", 1e-10)
def compatibility(p, rng):
    f = heisenberg.theta_vector(p.T, p.c)
    g = random_gaussian(rng, p.n)
    phi = _random_element(rng, p.lattice, 3, reach=1)
    return twisted.compatibility_defect(phi, f, g, p.lattice, 6)


@check("algebra", 1e-6)
def associativity(p, rng):
    f = heisenberg.theta_vector(p.T, p.c)
    return twisted.associativity_defect(f, f, f, p.lattice, 8)


# ---------------------------------------------------------------------------
# quantum
# ---------------------------------------------------------------------------


def _params(p: ProblemSpec, c=None) -> quantum.QuantumThetaParams:
    return quantum.QuantumThetaParams(p.T, p.c if c is None else c, p.lattice)


@check("quantum", 1e-12)
def coefficient_identity(p, rng):
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 3))
        T = random_structure(rng, n)
        h = random_phase_point(rng, n, 3.0)
        worst = max(worst, quantum.coefficient_identity_defect(h, T))
    return worst


@check("quantum", 1e-12)
def shifted_coefficient_identity(p, rng):
    params = _params(p)
    worst = 0.0
    for key in p.lattice.ball(2):
        h = PhasePoint.from_vector(p.lattice.embed([key])[0])
        worst = max(worst, quantum.shifted_coefficient_identity_defect(h, params))
    return worst


@check("quantum", 1e-12)
def cocycle_H_link(p, rng):
    worst = 0.0
    for _ in range(100):
        g = p.lattice.embed([random_lattice_coords(rng, p.n, 3)])
        h = p.lattice.embed([random_lattice_coords(rng, p.n, 3)])
        worst = max(worst, quantum.cocycle_H_link_defect(g, h, p.T))
    return worst


@check("quantum", 1e-12)
def printed_forms_agree(p, rng):
    params = _params(p)
    E = p.lattice.embed(p.lattice.ball(min(p.radius, 4) if p.n == 1 else 2))
    a = quantum.log_coefficient_printed(E, params)
    b = -0.5 * np.pi * quantum.H_c_many(E, params)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


@check("quantum", 1e-12)
def exponent_identity(p, rng):
    params = _params(p)
    worst = 0.0
    for _ in range(50):
        g = p.lattice.embed([random_lattice_coords(rng, p.n, 3)])
        h = p.lattice.embed([random_lattice_coords(rng, p.n, 3)])
        scale = max(1.0, abs(quantum.H_c(g + h, params)))
        worst = max(worst, quantum.functional_exponent_defect(g, h, params) / scale)
    return worst


@check("quantum", 1e-12)
def manin_reduction(p, rng):
    params = _params(p, np.zeros(p.n))
    C = p.lattice.ball(2)
    a = quantum.manin_theta(params, 2).log_at(C)
    b = quantum.shifted_theta(params, 2).log_at(C)
    return float(np.max(np.abs(a - b)))


@check("quantum", 1e-10)
def normalization(p, rng):
    return quantum.normalization_defect(_params(p), 4 if p.n <= 2 else 2)


@check("quantum", 1e-10)
def functional_equation(p, rng):
    radius = 5 if p.n <= 2 else 3
    worst = 0.0
    for c in (np.zeros(p.n), p.c):
        params = _params(p, c)
        for _ in range(5):
            g = random_lattice_coords(rng, p.n, 2)
            worst = max(worst, quantum.functional_equation_defect(g, params, radius))
    return worst


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------


def _digest(problem: ProblemSpec, name: str) -> str:
    payload = json.dumps({"check": name, **problem.canonical()}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def run_check(chk: Check, problem: ProblemSpec, tolerance_scale: float = 1.0) -> VerificationReport:
    rng = np.random.default_rng([problem.seed, zlib.crc32(chk.name.encode())])
    t0 = time.perf_counter()
    defect = float(chk.run(problem, rng))
    ms = (time.perf_counter() - t0) * 1e3
    tol = chk.tolerance * tolerance_scale
    return VerificationReport(chk.name, _digest(problem, chk.name), defect, tol, bool(defect < tol), ms)


def run_suite(problem: ProblemSpec, suite: str = "all", tolerance_scale: float = 1.0) -> list[VerificationReport]:
    """Run a suite; report order is the suite definition order."""
    chks = checks_for(suite)
    threads = int(os.environ.get("NCTHETA_THREADS", "1") or 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda c: run_check(c, problem, tolerance_scale), chks))
    return [run_check(c, problem, tolerance_scale) for c in chks]
