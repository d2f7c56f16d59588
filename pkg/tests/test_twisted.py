import json

import numpy as np
import pytest
from hypothesis import given

from conftest import gaussians, seeds
from nctheta import (
    GaussianVector,
    Lattice,
    PhasePoint,
    PointNotInLattice,
    TwistedElement,
    delta,
    dual_lattice,
    gaussian_pairing,
    inner_product_D,
    inner_product_Dperp,
    multiply,
    quadrature_pairing,
    theta_vector,
)
from nctheta.errors import LatticeMismatch, NotIntegrable
from nctheta.heisenberg import evaluate, evaluate_sum, pi_act, probe_points
from nctheta.sampling import random_gaussian, random_lattice_coords, random_structure
from nctheta.twisted import associativity_defect, compatibility_defect, module_action, right_action

Z2 = Lattice.standard(1)
# Frozen with mpmath.quad at 30 digits: int exp(-pi x^2) exp(-pi (x+1)^2) dx.
C10 = 0.14699305810781040039


def _random_element(r, D, size, reach=2):
    coef = {tuple(random_lattice_coords(r, D.n, reach).tolist()): complex(*r.normal(size=2)) for _ in range(size)}
    return TwistedElement(D, coef)


# -- elements and multiplication ---------------------------------------------


def test_small_coefficients_are_dropped():
    e = TwistedElement(Z2, {(0, 0): 1.0, (1, 0): 1e-301})
    assert e.support == [(0, 0)]


def test_delta_rejects_off_lattice_points():
    with pytest.raises(PointNotInLattice):
        delta(PhasePoint.from_vector([0.5, 0.0]), Z2)
    D = Lattice(np.diag([2.0, 1.0]))
    with pytest.raises(PointNotInLattice):
        delta(Z2.point((1, 0)), D)


def test_delta_zero_is_unit(rng):
    phi = _random_element(rng, Z2, 5)
    one = delta((0, 0), Z2)
    assert (one * phi).max_difference(phi) == 0
    assert (phi * one).max_difference(phi) == 0


def test_delta_inverse():
    w = (2, -1)
    assert (delta(w, Z2) * delta((-2, 1), Z2)).max_difference(delta((0, 0), Z2)) < 1e-15


def test_delta_product_carries_cocycle():
    lhs = delta((1, 0), Z2) * delta((0, 1), Z2)
    assert abs(lhs[(1, 1)] + 1) < 1e-15 and len(lhs) == 1
    rhs = delta((0, 1), Z2) * delta((1, 0), Z2)
    assert abs(rhs[(1, 1)] + 1) < 1e-15


def test_delta_product_general_lattice(rng):
    D = Lattice(np.array([[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 1, 0.5], [0, 0, 0, 1]], dtype=float))
    for _ in range(10):
        w1, w2 = rng.integers(-3, 4, 4), rng.integers(-3, 4, 4)
        prod = delta(w1, D) * delta(w2, D)
        x, y = D.point(w1).embedded, D.point(w2).embedded
        expected = np.exp(1j * np.pi * (x.x1 @ y.x2 - y.x1 @ x.x2))
        assert abs(prod[tuple(w1 + w2)] - expected) < 1e-12


def test_multiply_rejects_mismatched_lattices():
    with pytest.raises(LatticeMismatch):
        multiply(delta((0, 0), Z2), delta((0, 0), Lattice(np.diag([2.0, 1.0]))))


@given(seeds)
def test_multiplication_is_associative(seed):
    r = np.random.default_rng(seed)
    D = Z2 if r.integers(2) else Lattice(np.diag([1.0, 2.0, 1.0, 0.5]))
    a, b, c = (_random_element(r, D, 5) for _ in range(3))
    assert ((a * b) * c).max_difference(a * (b * c)) < 1e-12


def test_multiplication_support_bound(rng):
    a, b = _random_element(rng, Z2, 4), _random_element(rng, Z2, 5)
    assert len(a * b) <= len(a) * len(b)


def test_json_round_trip(rng):
    a = _random_element(rng, Z2, 6)
    text = json.dumps(a.to_json())
    assert TwistedElement.from_json(Z2, text) == a
    coords = [d["coords"] for d in a.to_json()]
    assert coords == sorted(coords)


# -- Gaussian pairing ---------------------------------------------------------


def test_pairing_standard_gaussian():
    f = theta_vector([[1j]])
    assert abs(gaussian_pairing(f, f) - 2**-0.5) < 1e-15


def test_quadrature_standard_gaussian():
    f = theta_vector([[1j]])
    assert abs(quadrature_pairing(f, f, 6, 4096) - 0.7071067811865) < 1e-9


def test_pure_chirp_is_not_integrable():
    chirp = GaussianVector.unchecked([[1.0]], [0.0])
    with pytest.raises(NotIntegrable):
        gaussian_pairing(chirp, chirp)
    with pytest.raises(NotIntegrable):
        quadrature_pairing(chirp, chirp)


@given(gaussians())
def test_pairing_norm_is_positive(f):
    v = gaussian_pairing(f, f)
    assert abs(v.imag) < 1e-12 * abs(v) and v.real > 0


@given(gaussians(n=2), seeds)
def test_pairing_conjugate_symmetric(f, seed):
    g = random_gaussian(np.random.default_rng(seed), 2)
    a, b = gaussian_pairing(f, g), gaussian_pairing(g, f)
    assert abs(a - np.conj(b)) < 1e-12 * max(1, abs(a))


@given(gaussians(n=1), seeds)
def test_pairing_matches_quadrature(f, seed):
    g = random_gaussian(np.random.default_rng(seed), 1)
    exact = gaussian_pairing(f, g)
    assert abs(quadrature_pairing(f, g) - exact) <= 1e-6 * abs(exact)


def test_pairing_two_dimensional_matches_quadrature():
    r = np.random.default_rng(5)
    f, g = random_gaussian(r, 2), random_gaussian(r, 2)
    exact = gaussian_pairing(f, g)
    assert abs(quadrature_pairing(f, g, 6, 512) - exact) <= 1e-6 * abs(exact)


# -- algebra-valued inner products -------------------------------------------


def test_inner_product_coefficients_for_standard_gaussian():
    f = theta_vector([[1j]])
    ip = inner_product_D(f, f, Z2, 3)
    assert abs(ip[(0, 0)] - 2**-0.5) < 1e-15
    assert abs(ip[(1, 0)] - C10) < 1e-15
    assert abs(ip[(1, 0)] - 2**-0.5 * np.exp(-np.pi / 2)) < 1e-15
    assert abs(ip[(1, 0)] - quadrature_pairing(f, pi_act(PhasePoint.from_vector([1.0, 0.0]), f))) < 1e-9


@given(gaussians(), seeds)
def test_inner_product_matches_pointwise_pairings(f, seed):
    r = np.random.default_rng(seed)
    g = random_gaussian(r, f.n)
    D = Lattice.standard(f.n)
    ip = inner_product_D(f, g, D, 2)
    for key in [tuple(random_lattice_coords(r, f.n, 2).tolist()) for _ in range(5)]:
        w = D.point(key).embedded
        assert abs(ip[key] - gaussian_pairing(f, pi_act(w, g))) < 1e-12


@given(gaussians())
def test_self_inner_product_modulus_is_even(f):
    D = Lattice.standard(f.n)
    ip = inner_product_D(f, f, D, 2)
    for key, v in ip.items():
        assert abs(abs(v) - abs(ip[tuple(-k for k in key)])) < 1e-12 * max(1, abs(v))


def test_rapid_decay_for_imaginary_modulus():
    f = theta_vector([[1j]])
    ip = inner_product_D(f, f, Z2, 5)
    keys = np.array(ip.support)
    r2 = np.sum(keys**2, axis=1).astype(float)
    logs = np.log(np.abs([ip[tuple(k)] for k in keys]))
    slope, intercept = np.polyfit(r2, logs, 1)
    pred = slope * r2 + intercept
    r_squared = 1 - np.sum((logs - pred) ** 2) / np.sum((logs - logs.mean()) ** 2)
    assert slope < 0 and r_squared > 0.999


@given(seeds)
def test_rapid_decay_along_rays(seed):
    # log|c(k d)| is exactly quadratic in k for any modulus; fit along rays
    r = np.random.default_rng(seed)
    T = random_structure(r, 1)
    f = theta_vector(T, r.uniform(-0.5, 0.5, 1) + 0.2j)
    ip = inner_product_D(f, f, Z2, 6)
    for d in [(1, 0), (0, 1), (1, 1), (1, -1)]:
        vals = np.abs([ip[(k * d[0], k * d[1])] for k in range(7)])
        ks = np.flatnonzero(vals)  # far coefficients may underflow and be dropped
        assert ks.size >= 3
        logs = np.log(vals[ks])
        A = np.vstack([ks**2, ks, np.ones_like(ks)]).T
        coef, *_ = np.linalg.lstsq(A, logs, rcond=None)
        assert coef[0] < 0
        assert np.max(np.abs(A @ coef - logs)) < 1e-8


def test_dperp_coefficient_at_origin():
    r = np.random.default_rng(1)
    f, g = random_gaussian(r, 1), random_gaussian(r, 1)
    ip = inner_product_Dperp(f, g, dual_lattice(Z2), 1)
    assert abs(ip[(0, 0)] - gaussian_pairing(g, f)) < 1e-14


def test_dperp_self_dual_magnitudes():
    f = theta_vector([[1j]])
    Dp = dual_lattice(Z2)
    a, b = inner_product_D(f, f, Z2, 3), inner_product_Dperp(f, f, Dp, 3)
    assert a.support == b.support
    for k in a.support:
        assert abs(abs(a[k]) - abs(b[k])) < 1e-15


# -- module action ------------------------------------------------------------


def test_module_action_basics():
    f = theta_vector([[0.3 + 1j]], [0.1])
    X = probe_points(1)
    assert np.max(np.abs(evaluate_sum(module_action(delta((0, 0), Z2), f), X) - evaluate(f, X))) == 0
    w = Z2.point((2, -1)).embedded
    assert np.max(np.abs(evaluate_sum(module_action(delta((2, -1), Z2), f), X) - evaluate(pi_act(w, f), X))) < 1e-15


def test_module_action_linear(rng):
    f = theta_vector([[0.3 + 1j]], [0.1])
    X = probe_points(1)
    a, b = _random_element(rng, Z2, 3), _random_element(rng, Z2, 4)
    lhs = evaluate_sum(module_action(a + b.scale(2.5 - 1j), f), X)
    rhs = evaluate_sum(module_action(a, f), X) + (2.5 - 1j) * evaluate_sum(module_action(b, f), X)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_right_action_uses_adjoint():
    f = theta_vector([[1j]])
    X = probe_points(1)
    terms = right_action(f, delta((1, 2), Z2))
    expected = evaluate(pi_act(PhasePoint.from_vector([-1.0, -2.0]), f), X)
    assert np.max(np.abs(evaluate_sum(terms, X) - expected)) < 1e-15


# -- compatibility and associativity -----------------------------------------


def test_compatibility_trivial():
    f = theta_vector([[1j]])
    assert compatibility_defect(delta((0, 0), Z2), f, f, Z2, 6) < 1e-15


@given(seeds)
def test_compatibility_single_shift(seed):
    r = np.random.default_rng(seed)
    f, g = random_gaussian(r, 1), random_gaussian(r, 1)
    w = tuple(random_lattice_coords(r, 1, 2).tolist())
    assert compatibility_defect(delta(w, Z2), f, g, Z2, 6) < 1e-10


def test_compatibility_three_point_support(rng):
    f = theta_vector([[1j]], [0.3 + 0.1j])
    for _ in range(5):
        phi = _random_element(rng, Z2, 3)
        assert compatibility_defect(phi, f, f, Z2, 6) < 1e-10


def test_compatibility_on_non_unimodular_lattice(rng):
    D = Lattice(np.diag([2.0, 1.0]))
    f = theta_vector([[0.4 + 0.9j]], [0.2 + 0.1j])
    phi = _random_element(rng, D, 3)
    assert compatibility_defect(phi, f, f, D, 6) < 1e-10


def test_associativity_standard():
    f = theta_vector([[1j]])
    assert associativity_defect(f, f, f, Z2, 8) < 1e-6


def test_associativity_improves_with_radius():
    # a wide Gaussian keeps the truncation error above roundoff at radius 4
    f = theta_vector([[0.2j]])
    d4, d8 = associativity_defect(f, f, f, Z2, 4), associativity_defect(f, f, f, Z2, 8)
    assert d4 > d8 and d8 < 1e-6


def test_associativity_scales_bilinearly():
    f = theta_vector([[0.2j]])
    d = associativity_defect(f, f, f, Z2, 4)
    d2 = associativity_defect(f.scaled(2), f, f, Z2, 4)
    assert d2 <= 2 * d * (1 + 1e-9)


@pytest.mark.parametrize(
    "basis",
    [np.diag([2.0, 1.0]), np.array([[1.0, 1.0], [0.0, 2.0]]), np.array([[1.0, 0.0], [0.5, 0.5]])],
)
def test_associativity_non_unimodular(basis):
    D = Lattice(basis)
    f = theta_vector([[0.3 + 1.1j]], [0.1 + 0.05j])
    g = random_gaussian(np.random.default_rng(2), 1)
    assert associativity_defect(f, g, f, D, 8) < 1e-6


def test_associativity_two_dimensional():
    D = Lattice(np.array([[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 1, 0.5], [0, 0, 0, 1]], dtype=float))
    T = [[0.3 + 1.2j, 0.1 + 0.2j], [0.1 + 0.2j, -0.4 + 0.9j]]
    f = theta_vector(T, [0.3 + 0.2j, -0.1 + 0.4j])
    assert associativity_defect(f, f, f, D, 8) < 1e-6
