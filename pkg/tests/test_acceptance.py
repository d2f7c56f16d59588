"""Acceptance criteria 1-11, each at its stated tolerance and runtime limit.

Every test records a one-line PASS/FAIL summary (printed at the end of the
session by the hook in conftest.py) before asserting.
"""

import json
import time

import numpy as np

from conftest import ACCEPTANCE_RESULTS
from nctheta import (
    GaussianVector,
    Lattice,
    QuantumThetaParams,
    ftilde,
    functional_equation_defect,
    gaussian_pairing,
    holomorphic_residual,
    kq_transform,
    normalization_defect,
    quadrature_pairing,
    theta,
    theta_vector,
)
from nctheta.cli import main
from nctheta.heisenberg import commutation_defect, composition_defect
from nctheta.quantum import coefficient_identity_defect, cocycle_H_link_defect
from nctheta.sampling import random_gaussian, random_phase_point, random_shift, random_structure
from nctheta.twisted import TwistedElement, associativity_defect, compatibility_defect


class Criterion:
    """Times the body and records ``defect < tol`` and ``runtime < limit``."""

    def __init__(self, number, title, limit_s=None):
        self.number, self.title, self.limit = number, title, limit_s
        self.checks = []

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def check(self, label, value, tol):
        self.checks.append((label, float(value), tol, bool(value < tol)))

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        ok = exc_type is None and all(c[3] for c in self.checks)
        timing = f"{elapsed:.2f}s"
        if self.limit is not None:
            ok = ok and elapsed < self.limit
            timing += f" (limit {self.limit:g}s)"
        detail = "; ".join(f"{lbl} {val:.2e} < {tol:g}" for lbl, val, tol, _ in self.checks)
        if exc_type is not None:
            detail = f"error: {exc_type.__name__}: {exc}"
        line = f"criterion {self.number:>2} {'PASS' if ok else 'FAIL'}  {self.title}: {detail}  [{timing}]"
        ACCEPTANCE_RESULTS[self.number] = line
        print(line)
        if exc_type is None:
            for lbl, val, tol, passed in self.checks:
                assert passed, f"{lbl}: {val} >= {tol}"
            if self.limit is not None:
                assert elapsed < self.limit, f"runtime {elapsed:.2f}s exceeds {self.limit}s"
        return False


def test_criterion_01_classical_theta_self_consistency():
    with Criterion(1, "theta radius 10 vs radius-30 oracle", 1.0) as c:
        c.check("n=1", abs(theta([0], [[1j]], 10) - theta([0], [[1j]], 30)), 1e-12)
        T2 = 1j * np.eye(2)
        c.check("n=2", abs(theta([0, 0], T2, 10) - theta([0, 0], T2, 30)), 1e-12)


def test_criterion_02_transform_identity():
    r = np.random.default_rng(2)
    with Criterion(2, "ftilde vs shifted theta, 100 samples", 5.0) as c:
        worst = 0.0
        for i in range(100):
            n = 1 + i % 2
            T = random_structure(r, n)
            cc = random_shift(r, n)
            rho, sigma = r.uniform(-0.5, 0.5, n), r.uniform(-0.5, 0.5, n)
            lhs = ftilde(T, cc, rho, sigma)
            pref = np.exp(1j * np.pi * (sigma @ T.T @ sigma + 2 * cc @ sigma))
            worst = max(worst, abs(lhs - pref * theta(T.T @ sigma - rho + cc, T)))
        c.check("max defect", worst, 1e-10)


def test_criterion_03_kq_periodicities():
    r = np.random.default_rng(3)
    with Criterion(3, "kq periodicities, 100 samples", 2.0) as c:
        w1 = w2 = 0.0
        for _ in range(100):
            T = random_structure(r, 1)
            psi = GaussianVector(T.T, [r.uniform(-0.5, 0.5) + 1j * r.uniform(-0.2, 0.2)])
            a = r.uniform(0.5, 2.0)
            k, q = r.uniform(-4, 4, 2)
            C = kq_transform(psi, a, k, q)
            w1 = max(w1, abs(kq_transform(psi, a, k + 2 * np.pi / a, q) - C))
            w2 = max(w2, abs(kq_transform(psi, a, k, q + a) - np.exp(1j * k * a) * C))
        c.check("k-period", w1, 1e-10)
        c.check("q-period", w2, 1e-10)


def test_criterion_04_heisenberg_law():
    r = np.random.default_rng(4)
    with Criterion(4, "composition and commutation, 50 triples", 1.0) as c:
        comp = comm = 0.0
        for i in range(50):
            n = 1 + i % 2
            f = random_gaussian(r, n)
            x, y = random_phase_point(r, n), random_phase_point(r, n)
            comp = max(comp, composition_defect(x, y, f))
            comm = max(comm, commutation_defect(x, y, f))
        c.check("composition", comp, 1e-10)
        c.check("commutation", comm, 1e-10)


def test_criterion_05_holomorphicity():
    r = np.random.default_rng(5)
    with Criterion(5, "theta vector residual and O(eps^2) differences", 1.0) as c:
        worst = 0.0
        ratios = []
        for n in (1, 2):
            T = random_structure(r, n)
            cc = random_shift(r, n)
            f = theta_vector(T, cc)
            worst = max(worst, holomorphic_residual(T, cc, f))
            eps = 1e-2
            ratios.append(holomorphic_residual(T, cc, f, eps) / holomorphic_residual(T, cc, f, eps / 2))
        c.check("symbolic residual", worst, 1e-12)
        c.check("|ratio - 4|", max(abs(q - 4) for q in ratios), 0.4)


def test_criterion_06_gaussian_integral_oracle():
    r = np.random.default_rng(6)
    with Criterion(6, "closed form vs quadrature, 20 pairs", 10.0) as c:
        worst = 0.0
        for _ in range(20):
            f, g = random_gaussian(r, 1), random_gaussian(r, 1)
            exact = gaussian_pairing(f, g)
            worst = max(worst, abs(quadrature_pairing(f, g, 6.0, 4096) - exact) / abs(exact))
        c.check("relative error", worst, 1e-6)


def test_criterion_07_proof_chain():
    r = np.random.default_rng(7)
    with Criterion(7, "coefficient identity and cocycle-H link, 100 each", 1.0) as c:
        coef = link = 0.0
        for i in range(100):
            n = 1 + i % 2
            T = random_structure(r, n)
            coef = max(coef, coefficient_identity_defect(random_phase_point(r, n, 3.0), T))
            D = Lattice.standard(n)
            g, h = (D.point(r.integers(-4, 5, 2 * n)).embedded for _ in range(2))
            link = max(link, cocycle_H_link_defect(g, h, T))
        c.check("coefficient identity", coef, 1e-12)
        c.check("cocycle-H link", link, 1e-12)


def test_criterion_08_normalization():
    r = np.random.default_rng(8)
    cases = [
        QuantumThetaParams([[1j]]),
        QuantumThetaParams([[1j]], [0.3 + 0.2j]),
        QuantumThetaParams(random_structure(r, 2), random_shift(r, 2)),
    ]
    with Criterion(8, "normalization, radius 4", 10.0) as c:
        for label, p in zip(("T=i c=0", "T=i c=0.3+0.2i", "random n=2"), cases):
            c.check(label, normalization_defect(p, 4), 1e-10)


def test_criterion_09_functional_equations():
    r = np.random.default_rng(9)
    with Criterion(9, "functional equations, 20 samples, radius 5", 10.0) as c:
        plain = shifted = 0.0
        for i in range(20):
            n = 1 + i % 2
            T = random_structure(r, n)
            zero_c = i % 4 < 2
            p = QuantumThetaParams(T, None if zero_c else random_shift(r, n))
            g = r.integers(-2, 3, 2 * n)
            d = functional_equation_defect(g, p, 5)
            if zero_c:
                plain = max(plain, d)
            else:
                shifted = max(shifted, d)
        c.check("c=0", plain, 1e-10)
        c.check("c!=0", shifted, 1e-10)


def test_criterion_10_rieffel_relations():
    r = np.random.default_rng(10)
    D = Lattice.standard(1)
    with Criterion(10, "compatibility and associativity, n=1, D=Z^2", 30.0) as c:
        f = theta_vector([[1j]], [0.3 + 0.1j])
        compat = 0.0
        for _ in range(5):
            keys = [tuple(r.integers(-2, 3, 2).tolist()) for _ in range(3)]
            phi = TwistedElement(D, {k: complex(*r.normal(size=2)) for k in keys})
            compat = max(compat, compatibility_defect(phi, f, f, D, 8))
        c.check("compatibility", compat, 1e-10)
        f0 = theta_vector([[1j]])
        c.check("associativity r=8", associativity_defect(f0, f0, f0, D, 8), 1e-6)
        # T = i is already at roundoff by radius 4; a wider Gaussian shows the convergence
        wide = theta_vector([[0.2j]])
        d = [associativity_defect(wide, wide, wide, D, R) for R in (4, 6, 8)]
        c.check("monotone 4>6>8 (0 = yes)", 0.0 if d[0] > d[1] > d[2] else 1.0, 0.5)
        c.check("associativity r=8, T=0.2i", d[2], 1e-6)


def test_criterion_11_determinism(tmp_path, capsys):
    problem = tmp_path / "p.json"
    problem.write_text(json.dumps({"n": 1, "T": [[[0.2, 1.1]]], "c": [[0.1, 0.2]], "seed": 987654321}))
    runs = []
    with Criterion(11, "verify byte-reproducible (runtime_ms excluded)") as c:
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert main(["verify", str(problem), "--out", str(out)]) == 0
            reports = json.loads(out.read_text())
            for rep in reports:
                rep.pop("runtime_ms")
            runs.append(json.dumps(reports).encode())
        c.check("differing bytes", 0.0 if runs[0] == runs[1] else 1.0, 0.5)
