import math
import warnings

import numpy as np
import pytest
from conftest import polys, random_poly
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from besovball import (
    CapabilityError,
    HoloPoly,
    MixedPoly,
    NormSpec,
    WeightError,
    build_radial_rule,
    build_sphere_rule,
    dilate,
    gauss_jacobi01,
    grid_values,
    hardy_norm,
    mixed_norm,
    phi_seminorm,
    radial_power,
    sphere_mean,
)


def moment(alpha):
    N = len(alpha)
    return math.factorial(N - 1) * np.prod([math.factorial(a) for a in alpha]) / math.factorial(N - 1 + sum(alpha))


def integrate_rule(rule, fn):
    z = rule.nodes
    return complex(np.sum(rule.weights * fn(z)))


# --- Gauss-Jacobi -----------------------------------------------------------


@pytest.mark.parametrize("a,b", [(0.0, 0.0), (-0.5, 1.0), (2.3, -0.7), (0.4, 3.0)])
def test_gauss_jacobi_against_adaptive_quadrature(a, b):
    x, w = gauss_jacobi01(12, a, b)
    g = lambda t: np.cos(3 * t) + t ** 5  # noqa: E731
    ref = integrate.quad(lambda t: g(t) * t ** a * (1 - t) ** b, 0, 1, limit=200)[0]
    assert abs(w @ g(x) - ref) < 1e-9


# --- sphere rules -------------------------------------------------------------


def test_circle_moments():
    rule = build_sphere_rule(1, 10)
    for k in range(0, 11):
        val = integrate_rule(rule, lambda z: z[:, 0] ** k)
        assert abs(val - (1.0 if k == 0 else 0.0)) < 1e-14


def test_two_ball_second_moment_and_symmetry():
    rule = build_sphere_rule(2, 4)
    assert abs(integrate_rule(rule, lambda z: np.abs(z[:, 0]) ** 2) - 0.5) < 1e-12
    assert abs(integrate_rule(rule, lambda z: z[:, 0] * np.conj(z[:, 1]))) < 1e-12
    # independent Monte Carlo estimate of the same moment
    g = np.random.default_rng(0).standard_normal((400_000, 4))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    mc = np.mean(g[:, 0] ** 2 + g[:, 1] ** 2)
    assert abs(mc - 0.5) < 5e-3


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_rule_exact_on_mixed_monomials(dim):
    d = 6
    rule = build_sphere_rule(dim, d)
    assert np.allclose(np.linalg.norm(rule.nodes, axis=1), 1, atol=1e-14)
    assert abs(rule.weights.sum() - 1) < 1e-14
    rng = np.random.default_rng(dim)
    for _ in range(25):
        a = rng.multinomial(rng.integers(0, d // 2 + 1), [1 / dim] * dim)
        b = a.copy() if rng.random() < 0.5 else rng.multinomial(a.sum(), [1 / dim] * dim)
        if a.sum() + b.sum() > d:
            continue
        val = integrate_rule(rule, lambda z: np.prod(z ** a * np.conj(z) ** b, axis=1))
        expected = moment(tuple(a)) if np.array_equal(a, b) else 0.0
        assert abs(val - expected) < 1e-12


def test_rule_dimension_limit():
    with pytest.raises(CapabilityError):
        build_sphere_rule(5, 4)


def test_rule_serialization_round_trip():
    rule = build_sphere_rule(2, 6)
    doc = rule.to_dict()
    assert doc["exactDegree"] == 6 and len(doc["nodes"]) == len(doc["weights"])
    back = type(rule).from_dict(doc)
    assert back.size == rule.size and np.allclose(back.weights, rule.weights)


# --- integral means ------------------------------------------------------------


def test_sphere_mean_examples():
    c = HoloPoly.constant(2, 3 - 4j, 3)
    for p in (1, 2, 3.5, math.inf):
        assert sphere_mean(c, 0.4, p) == pytest.approx(5.0, abs=1e-12)
    for k in (1, 4, 9):
        f = HoloPoly.monomial((k,))
        for p in (1, 2, 3.5, math.inf):
            assert sphere_mean(f, 0.7, p) == pytest.approx(0.7 ** k, abs=1e-12)
            assert hardy_norm(f, p) == pytest.approx(1.0, abs=1e-12)
    z1 = HoloPoly.monomial((1, 0))
    assert sphere_mean(z1, 0.6, 2) == pytest.approx(0.6 / math.sqrt(2), abs=1e-12)


def test_mixed_poly_mean():
    # |z_1|^2 on S_2 has mean 1/2; as a MixedPoly z_1 conj(z_1)
    g = MixedPoly.from_terms(2, {((1, 0), (1, 0)): 1.0})
    rule = build_sphere_rule(2, 8, 2)
    assert sphere_mean(g, 1.0, 1, rule) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("dim", [1, 2, 3])
@pytest.mark.parametrize("D", [1, 7, 16, 32])
def test_parseval_consistency(dim, D):
    if dim == 3 and D == 32:
        D = 24  # keeps the N = 3 grid at desk size; still exercises the same rule family
    f = random_poly(np.random.default_rng(D + 100 * dim), dim, D)
    rule = build_sphere_rule(dim, 2 * D)
    assert abs(hardy_norm(f, 2, rule) - f.h2_norm()) < 1e-10 * max(1.0, f.h2_norm())


@pytest.mark.parametrize("dim", [2, 3])
@pytest.mark.parametrize("p", [2, 4])
def test_slice_integration(dim, p):
    # M_p^p equals the average over slice circles {e^(i theta) zeta} of one-variable means
    D = 5 if dim == 2 else 3
    f = random_poly(np.random.default_rng(7), dim, D)
    rule = build_sphere_rule(dim, p * D)
    r = 0.9
    M = 2 * (p * D + 1)
    theta = 2 * np.pi * np.arange(M) / M
    zeta = rule.nodes
    vals = f.evaluate((r * zeta[:, None, :] * np.exp(1j * theta)[None, :, None]).reshape(-1, dim))
    circle = (np.abs(vals.reshape(len(zeta), M)) ** p).mean(axis=1)
    assert abs(circle @ rule.weights - sphere_mean(f, r, p, rule) ** p) < 1e-10


@settings(max_examples=25)
@given(polys(dims=(1, 2, 3), max_degree=8), st.sampled_from([1.0, 2.0, 3.0, math.inf]))
def test_means_increase_with_radius(f, p):
    r = np.linspace(0, 1, 41)
    M = sphere_mean(f, r, p)
    assert np.all(np.diff(M) >= -1e-10 * max(1.0, M.max()))


# --- mixed norms ------------------------------------------------------------------


def test_mixed_norm_zero_and_divergence():
    assert mixed_norm(HoloPoly.zeros(2, 3), NormSpec(2, 2, 0.5)) == 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert math.isinf(mixed_norm(HoloPoly.monomial((1, 0)), NormSpec(2, 2, -0.1)))


@pytest.mark.parametrize("k,alpha", [(1, 0.5), (4, 0.25), (10, 1.5)])
def test_mixed_norm_sup_closed_form(k, alpha):
    f = HoloPoly.monomial((k,))
    r = math.sqrt(k / (k + 2 * alpha))
    expected = (1 - r * r) ** alpha * r ** k
    assert mixed_norm(f, NormSpec(2, math.inf, alpha)) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("dim,p,alpha", [(1, 2.0, 1.0), (2, 2.0, 0.75), (2, 3.0, 0.5)])
def test_mixed_norm_matches_volume_integral(dim, p, alpha):
    f = random_poly(np.random.default_rng(3), dim, 4)
    rng = np.random.default_rng(11)
    n = 1_000_000
    g = rng.standard_normal((n, 2 * dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    zeta = g[:, :dim] + 1j * g[:, dim:]
    rad = rng.random(n) ** (1 / (2 * dim))  # uniform in the ball, normalized volume
    z = zeta * rad[:, None]
    vals = np.abs(f.evaluate(z)) ** p * (1 - rad ** 2) ** (p * alpha - 1)
    mc = vals.mean() ** (1 / p)
    assert mixed_norm(f, NormSpec(p, p, alpha)) == pytest.approx(mc, rel=0.01)


def test_radial_refinement_converges():
    f = random_poly(np.random.default_rng(5), 1, 64, decay=1.0)
    for q, alpha in ((2.0, 0.5), (1.0, 0.3), (3.0, 1.2)):
        spec = NormSpec(2.0, q, alpha)
        a = mixed_norm(f, spec, n_radial=48)
        b = mixed_norm(f, spec, n_radial=96)
        assert abs(a / b - 1) < 1e-3


@given(polys(dims=(1, 2), max_degree=6), st.floats(0.05, 1.0))
def test_dilation_decreases_mixed_norm(f, rho):
    spec = NormSpec(2.0, 2.0, 0.5)
    assert mixed_norm(dilate(f, rho), spec) <= mixed_norm(f, spec) * (1 + 1e-12) + 1e-15


def test_radial_rule_nodes_inside():
    rule = build_radial_rule(3, 0.4, 20)
    assert np.all((rule.nodes > 0) & (rule.nodes < 1)) and np.all(np.diff(rule.nodes) > 0)
    # the weights integrate 1 to the normalized volume of the ball for exponent 0
    assert build_radial_rule(2, 0.0, 10).integrate(np.ones(10)) == pytest.approx(1.0, abs=1e-13)


# --- phi functional ---------------------------------------------------------------


def test_phi_seminorm_against_adaptive_quadrature():
    f = random_poly(np.random.default_rng(9), 1, 12)
    n, q, b = 1, 2.0, 0.5
    phi = lambda t: np.asarray(t, dtype=float) ** b  # noqa: E731
    g = radial_power(f, n)
    h2 = g.homogeneous_norms() ** 2

    def integrand(r):
        M = math.sqrt(sum(h * r ** (2 * k) for k, h in enumerate(h2)))
        return (M * (1 - r) ** n / (1 - r) ** b) ** q / (1 - r)

    ref = integrate.quad(integrand, 0, 1, limit=400, epsabs=1e-13)[0] ** (1 / q)
    assert phi_seminorm(f, NormSpec(2.0, q, 1.0, phi=phi, n=n)) == pytest.approx(ref, rel=1e-6)


def test_phi_seminorm_sup_form():
    # f = z: M(r, R f) = r, sup_r r (1 - r) / (1 - r)^(1/2) = sup r sqrt(1 - r) at r = 2/3
    f = HoloPoly.monomial((1,))
    phi = lambda t: np.asarray(t, dtype=float) ** 0.5  # noqa: E731
    expected = (2 / 3) * math.sqrt(1 / 3)
    assert phi_seminorm(f, NormSpec(2.0, math.inf, 1.0, phi=phi, n=1)) == pytest.approx(expected, rel=1e-9)


def test_phi_seminorm_zero_and_bad_weight():
    phi = lambda t: np.asarray(t, dtype=float)  # noqa: E731
    assert phi_seminorm(HoloPoly.zeros(1, 3), NormSpec(2, 2, 1.0, phi=phi, n=1)) == 0.0
    with pytest.raises(WeightError):
        phi_seminorm(HoloPoly.monomial((2,)), NormSpec(2, 2, 1.0, phi=lambda t: -np.ones_like(t), n=1))


def test_phi_seminorm_lacunary_self_convergence():
    phi = lambda t: np.asarray(t, dtype=float) * (1 - np.log(np.asarray(t, dtype=float)))  # noqa: E731
    spec = NormSpec(2.0, math.inf, 1.0, phi=phi, n=1)
    vals = []
    for top in (10, 11):
        D = 2 ** top
        f = HoloPoly.from_terms(1, {(2 ** nu,): 2.0 ** -nu for nu in range(top + 1)}, max_degree=D)
        vals.append(phi_seminorm(f, spec))
    assert np.isfinite(vals).all()
    assert abs(vals[1] / vals[0] - 1) < 0.02


def test_grid_values_shape():
    f = random_poly(np.random.default_rng(1), 2, 3)
    rule = build_sphere_rule(2, 6)
    v = grid_values(f, rule, [0.5, 1.0])
    assert v.shape == (1, 2, len(rule.simplex_weights), rule.torus_size)
    assert np.allclose(v[0, 1].ravel(), f.evaluate(rule.nodes), atol=1e-12)
