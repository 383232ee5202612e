import math

import numpy as np
import pytest
from conftest import polys, random_poly
from hypothesis import given
from hypothesis import strategies as st

from besovball import (
    DyadicNormSpec,
    HoloPoly,
    MultiplierSpec,
    RangeError,
    apply_multiplier,
    best_approx_general,
    best_approx_l2,
    block_norms,
    block_project,
    build_block_basis,
    build_sphere_rule,
    dyadic_norm,
    hadamard,
    hardy_norm,
    lq_norm,
    psi,
    sequence_tail_bound,
    smooth_cutoff,
)


# ---------------------------------------------------------------------------
# cutoff and block basis


def test_cutoff_plateaus_and_monotone():
    t = np.linspace(0, 3, 3001)
    w = smooth_cutoff(t)
    assert np.all(w[t <= 1] == 1.0)
    assert np.all(w[t >= 2] == 0.0)
    assert np.all((w >= 0) & (w <= 1))
    assert np.all(np.diff(w) <= 0)


def test_psi_support():
    t = np.linspace(0, 5, 5001)
    v = psi(t)
    assert np.all(v[(t <= 1) | (t >= 4)] == 0)
    assert psi(2.0) == 1.0


@pytest.mark.parametrize("D", [1, 2, 3, 7, 8, 16, 40, 100])
def test_partition_of_unity(D):
    B = build_block_basis(D)
    assert np.array_equal(B.weights.sum(axis=0), np.ones(D + 1))


@pytest.mark.parametrize("D", [2, 3, 5, 16, 33, 64, 100])
def test_block_count(D):
    assert build_block_basis(D).max_block + 1 == math.ceil(math.log2(D)) + 1


def test_block_basis_rejects_degree_zero():
    with pytest.raises(RangeError):
        build_block_basis(0)


def test_block_peak_value():
    B = build_block_basis(64)
    for nu in range(1, 7):
        assert B.weights[nu, 2 ** nu] == 1.0


def test_blocks_at_four():
    B = build_block_basis(16)
    col = B.weights[:, 4]
    assert col[2] + col[3] == 1.0
    assert np.all(col[[0, 1, 4]] == 0)


def test_block_supports():
    B = build_block_basis(128)
    assert list(B.support(0)) == [0, 1]
    for nu in range(1, B.max_block + 1):
        s = B.support(nu)
        assert s.min() >= 2 ** (nu - 1) and s.max() < 2 ** (nu + 1)


def test_sharp_basis():
    B = build_block_basis(20, sharp=True)
    assert list(B.support(0)) == [0]
    for nu in range(1, B.max_block + 1):
        assert list(B.support(nu)) == list(range(2 ** (nu - 1), min(2 ** nu, 21)))
    assert np.array_equal(B.weights.sum(axis=0), np.ones(21))


# ---------------------------------------------------------------------------
# projections


def test_project_monomial():
    f = HoloPoly.monomial((4, 0))
    B = build_block_basis(4)
    for nu in range(B.max_block + 1):
        g = block_project(f, nu, B)
        assert g.coeffs.get((4, 0), 0) == pytest.approx(psi(4 / 2 ** (nu - 1)) if nu else 0.0)


def test_reconstruction_degree_40(rng):
    f = random_poly(rng, 2, 40)
    B = build_block_basis(40)
    total = HoloPoly.zeros(2, 40)
    for nu in range(B.max_block + 1):
        total = total + block_project(f, nu, B)
    assert total.max_abs_diff(f) <= 1e-13


def test_neighborhood_reproduces_block(rng):
    f = random_poly(rng, 2, 40)
    B = build_block_basis(40)
    for nu in range(B.max_block + 1):
        g = block_project(f, nu, B)
        assert hadamard(B.neighborhood(nu), g).max_abs_diff(g) <= 1e-14


def test_project_beyond_last_block_is_zero():
    f = HoloPoly.monomial((3,))
    assert block_project(f, 10).is_zero()


@given(polys(dims=(1, 2, 3), max_degree=12))
def test_reconstruction_property(f):
    B = build_block_basis(max(f.max_degree, 1))
    parts = [block_project(f, nu, B) for nu in range(B.max_block + 1)]
    total = parts[0]
    for g in parts[1:]:
        total = total + g
    assert total.allclose(f, atol=1e-13)


def test_block_boundedness_family():
    """``||W_nu f||_p <= C ||f||_p`` with a small observed ``C``."""
    rng = np.random.default_rng(3)
    B = build_block_basis(16)
    worst = 0.0
    for _ in range(200):
        f = random_poly(rng, 2, 16, decay=rng.uniform(0, 2))
        worst = max(worst, block_norms(f, 2.0, B).max() / f.h2_norm())
    assert worst <= 1.0 + 1e-12
    rule = build_sphere_rule(2, 16, 2)
    for p in (1.0, 4.0, math.inf):
        ratios = []
        for _ in range(15):
            f = random_poly(rng, 2, 16, decay=rng.uniform(0, 2))
            ratios.append(block_norms(f, p, B, rule).max() / hardy_norm(f, p, rule))
        assert max(ratios) <= 10


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0, -1.0])
def test_radial_power_window_on_blocks(rng, s):
    B = build_block_basis(64)
    lo, hi = 2.0 ** (-abs(s) - 1), 2.0 ** (abs(s) + 1)
    for _ in range(20):
        f = random_poly(rng, 1, 64)
        g = apply_multiplier(f, MultiplierSpec.radial_power(s))
        for nu in range(2, B.max_block + 1):
            num = block_project(g, nu, B).h2_norm()
            den = 2.0 ** (nu * s) * block_project(f, nu, B).h2_norm()
            assert lo <= num / den <= hi


# ---------------------------------------------------------------------------
# dyadic norm


def test_dyadic_zero():
    assert dyadic_norm(HoloPoly.zeros(2, 8), DyadicNormSpec(2, 2, 1)) == 0.0


@pytest.mark.parametrize("nu,beta", [(2, 0.5), (3, -1.0), (4, 1.5)])
def test_dyadic_single_block(nu, beta):
    f = HoloPoly.monomial((2 ** nu, 0))
    val = dyadic_norm(f, DyadicNormSpec(2.0, 2.0, beta))
    ref = 2.0 ** (-nu * beta) * f.h2_norm()
    assert ref / 2 <= val <= 2 * ref


def test_dyadic_q_inf_is_max(rng):
    f = random_poly(rng, 2, 30)
    beta = 0.7
    norms = block_norms(f, 2.0)
    w = 2.0 ** (-np.arange(len(norms)) * beta) * norms
    assert dyadic_norm(f, DyadicNormSpec(2.0, math.inf, beta)) == pytest.approx(w.max(), rel=1e-15)
    assert dyadic_norm(f, DyadicNormSpec(2.0, 3.0, beta)) == pytest.approx(np.sum(w ** 3) ** (1 / 3), rel=1e-14)


def test_lq_norm_edge_cases():
    assert lq_norm([], 2) == 0.0
    assert lq_norm([3, -4], 2) == pytest.approx(5)
    assert lq_norm([3, -4], math.inf) == 4


# ---------------------------------------------------------------------------
# best approximation


def test_best_l2_trivial(rng):
    f = random_poly(rng, 2, 6)
    E, P = best_approx_l2(f, 6)
    assert E == 0 and P == f


def test_best_l2_circle():
    f = HoloPoly.from_terms(1, {(1,): 1, (5,): 1})
    E, P = best_approx_l2(f, 2)
    assert E == pytest.approx(1, abs=1e-15)
    assert P.allclose(HoloPoly.monomial((1,), max_degree=5))


def test_best_l2_ball():
    E, _ = best_approx_l2(HoloPoly.monomial((3, 0)), 2)
    assert E == pytest.approx(0.5, abs=1e-15)
    rule = build_sphere_rule(2, 8)
    assert hardy_norm(HoloPoly.monomial((3, 0)), 2.0, rule) == pytest.approx(0.5, abs=1e-13)


def test_best_l2_negative_degree():
    with pytest.raises(RangeError):
        best_approx_l2(HoloPoly.monomial((1,)), -1)


def test_best_l2_optimality():
    rng = np.random.default_rng(11)
    for _ in range(50):
        dim = int(rng.integers(1, 4))
        D = int(rng.integers(2, 9))
        nu = int(rng.integers(0, D))
        f = random_poly(rng, dim, D)
        E, P = best_approx_l2(f, nu)
        Pp = random_poly(rng, dim, nu).with_max_degree(D) * 0.1 + P
        assert (f - Pp).h2_norm() >= E - 1e-14


@pytest.mark.parametrize("m,nu", [(3, 0), (4, 2), (6, 5)])
def test_best_general_monomial_sup(m, nu):
    f = HoloPoly.monomial((m,))
    br = best_approx_general(f, nu, math.inf)
    assert br.lower - 1e-3 <= 1.0 <= br.upper + 1e-3
    assert br.upper == pytest.approx(1.0, abs=1e-3)
    assert br.lower <= br.upper


def test_best_general_in_space_is_zero(rng):
    f = random_poly(rng, 2, 4)
    br = best_approx_general(f, 4, 4.0)
    assert (br.upper, br.lower) == (0.0, 0.0)
    assert br.converged


@pytest.mark.parametrize("p", [1.0, 4.0, math.inf])
def test_best_general_bracket_and_tail_sum(rng, p):
    f = random_poly(rng, 2, 16, decay=1.0)
    B = build_block_basis(16)
    rule = build_sphere_rule(2, 32, 2)
    norms = block_norms(f, p, B, rule)
    for m in (1, 2, 3):
        nu = 2 ** m
        br = best_approx_general(f, nu, p, rule, budget=20, basis=B)
        assert 0 <= br.lower <= br.upper
        # approximating by Q_m f gives the tail of block norms from m on
        assert br.upper <= norms[m:].sum() * (1 + 1e-12)
        upper, lower, P = br
        assert P.dim == f.dim


def test_best_general_budget_exhausted():
    rng = np.random.default_rng(5)
    f = random_poly(rng, 2, 10)
    br = best_approx_general(f, 3, 1.0, budget=1, rtol=1e-12)
    assert not br.converged
    assert br.lower <= br.upper


# ---------------------------------------------------------------------------
# dyadic tail lemma


def test_tail_bound_example():
    assert sequence_tail_bound([1, 0, 0], 1.0, 1.0) == pytest.approx((2.0, 4.0))


def test_tail_bound_zero():
    assert sequence_tail_bound(np.zeros(5), 0.5, 2.0) == (0.0, 0.0)


def test_tail_bound_alpha_range():
    with pytest.raises(RangeError):
        sequence_tail_bound([1.0], 0.0, 2.0)


def test_tail_bound_random(rng):
    for _ in range(50):
        s = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        lhs, rhs = sequence_tail_bound(s, 0.5, 2.0)
        assert lhs <= rhs


@given(
    st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False), max_size=15),
    st.floats(0.05, 4.0),
    st.sampled_from([1.0, 2.0, 3.5, math.inf]),
)
def test_tail_bound_property(s, alpha, q):
    lhs, rhs = sequence_tail_bound(s, alpha, q)
    assert lhs <= rhs * (1 + 1e-12) + 1e-300
