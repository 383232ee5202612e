import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from besovball import HoloPoly, monomial_basis

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_poly(rng, dim, max_degree, zero_constant=False, decay=0.0):
    """Random complex coefficients, optionally damped by ``(1 + k)^-decay`` per degree."""
    basis = monomial_basis(dim, max_degree)
    coef = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
    coef *= (1.0 + basis.degrees) ** (-decay)
    if zero_constant:
        coef[0] = 0
    return HoloPoly(dim, max_degree, coef)


def random_points(rng, dim, count, radius=0.95):
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z * radius * rng.random((count, 1)) ** (1 / (2 * dim))


def random_unitary(rng, dim):
    A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(A)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


@st.composite
def polys(draw, dims=(1, 2, 3), max_degree=8, zero_constant=False):
    dim = draw(st.sampled_from(dims))
    D = draw(st.integers(0 if not zero_constant else 1, max_degree))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_poly(np.random.default_rng(seed), dim, D, zero_constant)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
