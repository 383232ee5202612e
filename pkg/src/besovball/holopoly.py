"""Truncated homogeneous expansions of holomorphic functions on the unit ball.

A :class:`HoloPoly` stores the coefficients of a polynomial in ``N`` complex
variables of total degree at most ``D`` as one dense complex vector, laid out
in graded order: all degree-0 terms, then degree 1, and so on.  Within a
degree, multi-indices are listed in descending lexicographic order, so for
``N = 2`` degree 2 reads ``z1^2, z1 z2, z2^2``.  Slicing a degree block is
O(size of the block) and truncation to a lower degree is a prefix slice.

A :class:`MixedPoly` is a sparse polynomial in ``z`` and ``conj(z)``; it is
what tangential derivatives produce.

Coordinate indices in this module are 0-based.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy import special

from .errors import (
    DegreeRangeError,
    IdentityFailureError,
    InvalidMultiplierError,
    InvertibilityError,
    RangeError,
    ShapeError,
)

__all__ = [
    "MonomialBasis",
    "monomial_basis",
    "HoloPoly",
    "MixedPoly",
    "MultiplierSpec",
    "TangentialOp",
    "homogeneous_part",
    "apply_multiplier",
    "radial_power",
    "radial_derivative_inverse",
    "hadamard",
    "compose_linear",
    "linear_action",
    "dilate",
    "partial_derivative",
    "derivative",
    "gradient_norm",
    "tangential_ops",
    "tangential_apply",
    "tangential_compositions",
    "tangential_gradient_value",
    "radial_apply",
    "solve_radial_identity_constants",
]


def _exponents_of_degree(dim: int, k: int) -> list[tuple[int, ...]]:
    if dim == 1:
        return [(k,)]
    out = []
    for first in range(k, -1, -1):
        for rest in _exponents_of_degree(dim - 1, k - first):
            out.append((first,) + rest)
    return out


class MonomialBasis:
    """Graded enumeration of the multi-indices with ``|alpha| <= max_degree``."""

    def __init__(self, dim: int, max_degree: int):
        if dim < 1:
            raise ShapeError(f"dimension must be positive, got {dim}")
        if max_degree < 0:
            raise DegreeRangeError(f"max degree must be nonnegative, got {max_degree}")
        self.dim = dim
        self.max_degree = max_degree
        exps = []
        offsets = [0]
        for k in range(max_degree + 1):
            block = _exponents_of_degree(dim, k)
            exps.extend(block)
            offsets.append(offsets[-1] + len(block))
        self.exponents = np.array(exps, dtype=np.int64).reshape(-1, dim)
        self.exponents.flags.writeable = False
        self.offsets = np.array(offsets, dtype=np.int64)
        self.degrees = self.exponents.sum(axis=1)
        self.size = len(exps)
        self.index = {alpha: i for i, alpha in enumerate(exps)}
        # sigma-moments  int |zeta^alpha|^2 dsigma = (N-1)! alpha! / (N-1+|alpha|)!
        lg = (
            math.lgamma(dim)
            + special.gammaln(self.exponents + 1).sum(axis=1)
            - special.gammaln(dim + self.degrees)
        )
        self.moments = np.exp(lg)
        self._mult_tables: dict[int, np.ndarray] = {}

    def block(self, k: int) -> slice:
        return slice(int(self.offsets[k]), int(self.offsets[k + 1]))

    def block_size(self, k: int) -> int:
        return int(self.offsets[k + 1] - self.offsets[k])

    def mult_table(self, k: int) -> np.ndarray:
        """Local indices in degree ``k+1`` of ``alpha + e_i``; shape ``(dim, n_k)``."""
        if k not in self._mult_tables:
            big = monomial_basis(self.dim, max(k + 1, self.max_degree))
            lo = int(big.offsets[k + 1])
            block = big.exponents[big.block(k)]
            table = np.empty((self.dim, len(block)), dtype=np.int64)
            for i in range(self.dim):
                shifted = block.copy()
                shifted[:, i] += 1
                table[i] = [big.index[tuple(a)] - lo for a in shifted]
            self._mult_tables[k] = table
        return self._mult_tables[k]


@lru_cache(maxsize=64)
def monomial_basis(dim: int, max_degree: int) -> MonomialBasis:
    return MonomialBasis(dim, max_degree)


def _as_alpha(alpha, dim: int) -> tuple[int, ...]:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != dim or any(a < 0 for a in alpha):
        raise ShapeError(f"multi-index {alpha} is not valid in dimension {dim}")
    return alpha


class HoloPoly:
    """Polynomial ``sum_alpha c_alpha z^alpha`` on ``C^N`` with ``|alpha| <= D``.

    Instances are treated as immutable; every operation returns a new object.

    Parameters
    ----------
    dim : int
        Number of complex variables ``N``.
    max_degree : int
        Truncation degree ``D``.
    coef : array_like, optional
        Dense coefficient vector in the graded order of ``monomial_basis``.
    """

    __slots__ = ("dim", "max_degree", "coef", "basis")

    def __init__(self, dim: int, max_degree: int, coef=None):
        self.basis = monomial_basis(dim, max_degree)
        self.dim = dim
        self.max_degree = max_degree
        if coef is None:
            coef = np.zeros(self.basis.size, dtype=complex)
        coef = np.array(coef, dtype=complex)
        if coef.shape != (self.basis.size,):
            raise ShapeError(
                f"expected {self.basis.size} coefficients for N={dim}, D={max_degree}, got {coef.shape}"
            )
        coef.flags.writeable = False
        self.coef = coef

    # -- construction -----------------------------------------------------
    @classmethod
    def zeros(cls, dim: int, max_degree: int) -> "HoloPoly":
        return cls(dim, max_degree)

    @classmethod
    def from_terms(cls, dim: int, terms: Mapping, max_degree: int | None = None) -> "HoloPoly":
        alphas = [_as_alpha(a, dim) for a in terms]
        top = max((sum(a) for a in alphas), default=0)
        if max_degree is None:
            max_degree = top
        elif top > max_degree:
            raise DegreeRangeError(f"term of degree {top} exceeds max degree {max_degree}")
        basis = monomial_basis(dim, max_degree)
        coef = np.zeros(basis.size, dtype=complex)
        for alpha, c in zip(alphas, terms.values()):
            coef[basis.index[alpha]] += c
        return cls(dim, max_degree, coef)

    @classmethod
    def monomial(cls, alpha: Sequence[int], coeff: complex = 1.0, max_degree: int | None = None) -> "HoloPoly":
        alpha = tuple(alpha)
        return cls.from_terms(len(alpha), {alpha: coeff}, max_degree)

    @classmethod
    def constant(cls, dim: int, value: complex, max_degree: int = 0) -> "HoloPoly":
        return cls.from_terms(dim, {(0,) * dim: value}, max_degree)

    # -- views ----------------------------------------------------------------
    @property
    def coeffs(self) -> dict[tuple[int, ...], complex]:
        """Sparse map of the nonzero coefficients, keyed by multi-index."""
        nz = np.flatnonzero(self.coef)
        ex = self.basis.exponents
        return {tuple(int(a) for a in ex[i]): complex(self.coef[i]) for i in nz}

    def block(self, k: int) -> np.ndarray:
        return self.coef[self.basis.block(k)]

    @property
    def degree(self) -> int:
        """Actual total degree (-1 for the zero polynomial)."""
        nz = np.flatnonzero(self.coef)
        return int(self.basis.degrees[nz[-1]]) if len(nz) else -1

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coef) <= tol))

    def with_max_degree(self, max_degree: int) -> "HoloPoly":
        """Re-embed with a different truncation degree (dropping higher terms)."""
        basis = monomial_basis(self.dim, max_degree)
        if max_degree <= self.max_degree:
            return HoloPoly(self.dim, max_degree, self.coef[: basis.size])
        coef = np.zeros(basis.size, dtype=complex)
        coef[: self.basis.size] = self.coef
        return HoloPoly(self.dim, max_degree, coef)

    def truncate(self, degree: int) -> "HoloPoly":
        """Keep terms of degree ``<= degree`` but keep ``max_degree``."""
        coef = self.coef.copy()
        if degree < self.max_degree:
            coef[self.basis.offsets[max(degree, -1) + 1]:] = 0
        return HoloPoly(self.dim, self.max_degree, coef)

    def _scaled_by_degree(self, lam) -> "HoloPoly":
        lam = np.asarray(lam)
        return HoloPoly(self.dim, self.max_degree, self.coef * lam[self.basis.degrees])

    # -- arithmetic -------------------------------------------------------------
    def _aligned(self, other: "HoloPoly"):
        if other.dim != self.dim:
            raise ShapeError(f"dimension mismatch: {self.dim} vs {other.dim}")
        D = max(self.max_degree, other.max_degree)
        return self.with_max_degree(D).coef, other.with_max_degree(D).coef, D

    def __add__(self, other):
        if not isinstance(other, HoloPoly):
            return self + HoloPoly.constant(self.dim, other, self.max_degree)
        a, b, D = self._aligned(other)
        return HoloPoly(self.dim, D, a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return HoloPoly(self.dim, self.max_degree, -self.coef)

    def __mul__(self, scalar):
        if isinstance(scalar, HoloPoly):
            return NotImplemented
        return HoloPoly(self.dim, self.max_degree, self.coef * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / complex(scalar))

    def __eq__(self, other):
        if not isinstance(other, HoloPoly) or other.dim != self.dim:
            return NotImplemented
        a, b, _ = self._aligned(other)
        return bool(np.array_equal(a, b))

    __hash__ = None

    def allclose(self, other: "HoloPoly", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        a, b, _ = self._aligned(other)
        return bool(np.allclose(a, b, atol=atol, rtol=rtol))

    def max_abs_diff(self, other: "HoloPoly") -> float:
        a, b, _ = self._aligned(other)
        return float(np.max(np.abs(a - b), initial=0.0))

    # -- evaluation -------------------------------------------------------------
    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z):
        """Evaluate at one point of shape ``(N,)`` or at points of shape ``(P, N)``."""
        z = np.asarray(z, dtype=complex)
        single = z.ndim == 1
        pts = z.reshape(-1, self.dim)
        ex = self.basis.exponents
        out = np.empty(len(pts), dtype=complex)
        chunk = max(1, 2_000_000 // max(self.basis.size, 1))
        powers = np.arange(self.max_degree + 1)
        for lo in range(0, len(pts), chunk):
            p = pts[lo: lo + chunk]
            vals = np.ones((len(p), self.basis.size), dtype=complex)
            for j in range(self.dim):
                pw = p[:, j, None] ** powers[None, :]
                vals *= pw[:, ex[:, j]]
            out[lo: lo + chunk] = vals @ self.coef
        return out[0] if single else out

    def h2_norm(self) -> float:
        """Hardy ``H^2`` norm from the sphere moments of the monomials."""
        return float(np.sqrt(np.sum(np.abs(self.coef) ** 2 * self.basis.moments)))

    def homogeneous_norms(self) -> np.ndarray:
        """``||f_k||_2`` for ``k = 0..D``."""
        w = np.abs(self.coef) ** 2 * self.basis.moments
        return np.sqrt(np.add.reduceat(w, self.basis.offsets[:-1]))

    # -- serialization ------------------------------------------------------------
    def to_dict(self) -> dict:
        ex = self.basis.exponents
        terms = [
            {"alpha": [int(a) for a in ex[i]], "re": float(self.coef[i].real), "im": float(self.coef[i].imag)}
            for i in np.flatnonzero(self.coef)
        ]
        return {"dim": self.dim, "maxDegree": self.max_degree, "terms": terms}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "HoloPoly":
        dim, D = int(doc["dim"]), int(doc["maxDegree"])
        terms = {}
        for t in doc["terms"]:
            alpha = tuple(t["alpha"])
            terms[alpha] = terms.get(alpha, 0) + complex(t.get("re", 0.0), t.get("im", 0.0))
        return cls.from_terms(dim, terms, D)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "HoloPoly":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        terms = self.coeffs
        if len(terms) > 6:
            return f"HoloPoly(N={self.dim}, D={self.max_degree}, {len(terms)} terms)"
        body = " + ".join(f"({c:.6g})*z^{list(a)}" for a, c in terms.items()) or "0"
        return f"HoloPoly(N={self.dim}, D={self.max_degree}: {body})"


# ---------------------------------------------------------------------------
# multipliers


@dataclass(frozen=True)
class MultiplierSpec:
    """Degree-wise multiplier ``f_k -> lambda_k f_k``.

    Use the factories :meth:`radial_power`, :meth:`gamma_ratio` and
    :meth:`custom`.  With ``drop_constant=False`` a radial power passes the
    constant term through unchanged instead of annihilating it.
    """

    kind: str
    s: complex = 0.0
    t: float = 0.0
    values: tuple = ()
    drop_constant: bool = True

    @classmethod
    def radial_power(cls, s: complex, drop_constant: bool = True) -> "MultiplierSpec":
        return cls("radialPower", s=s, drop_constant=drop_constant)

    @classmethod
    def gamma_ratio(cls, s: float, t: float) -> "MultiplierSpec":
        return cls("gammaRatio", s=s, t=t, drop_constant=False)

    @classmethod
    def custom(cls, values: Iterable[complex]) -> "MultiplierSpec":
        return cls("custom", values=tuple(complex(v) for v in values), drop_constant=False)

    def validate(self, dim: int) -> None:
        if self.kind == "gammaRatio":
            for a in (dim + self.s, dim + self.s + self.t):
                if float(a).is_integer() and a < 0:
                    raise InvalidMultiplierError(
                        f"gamma-ratio multiplier has a pole: N+s={dim + self.s}, N+s+t={dim + self.s + self.t}"
                    )
        elif self.kind not in ("radialPower", "custom"):
            raise InvalidMultiplierError(f"unknown multiplier kind {self.kind!r}")

    def sequence(self, max_degree: int, dim: int) -> np.ndarray:
        """The values ``lambda_0..lambda_D``."""
        self.validate(dim)
        k = np.arange(max_degree + 1)
        if self.kind == "radialPower":
            lam = np.zeros(max_degree + 1, dtype=complex)
            lam[1:] = np.exp(complex(self.s) * np.log(k[1:]))
            lam[0] = 0.0 if self.drop_constant else 1.0
            return lam
        if self.kind == "gammaRatio":
            a = dim + 1 + self.s
            return (special.poch(a + self.t, k) / special.poch(a, k)).astype(complex)
        lam = np.zeros(max_degree + 1, dtype=complex)
        n = min(len(self.values), max_degree + 1)
        lam[:n] = self.values[:n]
        return lam


def homogeneous_part(f: HoloPoly, k: int) -> HoloPoly:
    """Degree-``k`` terms of ``f`` (same dimension and truncation degree)."""
    if not 0 <= k <= f.max_degree:
        raise DegreeRangeError(f"degree {k} outside 0..{f.max_degree}")
    coef = np.zeros_like(f.coef)
    sl = f.basis.block(k)
    coef[sl] = f.coef[sl]
    return HoloPoly(f.dim, f.max_degree, coef)


def apply_multiplier(f: HoloPoly, m: MultiplierSpec) -> HoloPoly:
    return f._scaled_by_degree(m.sequence(f.max_degree, f.dim))


def radial_power(f: HoloPoly, s: complex) -> HoloPoly:
    """``R^s f = sum_{k>=1} k^s f_k``."""
    return apply_multiplier(f, MultiplierSpec.radial_power(s))


def radial_derivative_inverse(f: HoloPoly, s: float, tol: float = 0.0) -> HoloPoly:
    """``R^{-s} f``; requires a vanishing constant term."""
    if abs(f.coef[0]) > tol:
        raise InvertibilityError("R^s is not invertible on functions with f(0) != 0")
    return apply_multiplier(f, MultiplierSpec.radial_power(-s))


def hadamard(g, f: HoloPoly) -> HoloPoly:
    """Hadamard product ``sum_k g_hat(k) f_k``; missing entries of ``g`` count as 0."""
    g = np.asarray(g, dtype=complex).ravel()
    lam = np.zeros(f.max_degree + 1, dtype=complex)
    n = min(len(g), f.max_degree + 1)
    lam[:n] = g[:n]
    return f._scaled_by_degree(lam)


def dilate(f: HoloPoly, rho: float) -> HoloPoly:
    """``f_rho(z) = f(rho z)``."""
    if not 0 < rho <= 1:
        raise RangeError(f"dilation factor must lie in (0, 1], got {rho}")
    return f._scaled_by_degree(float(rho) ** np.arange(f.max_degree + 1))


# ---------------------------------------------------------------------------
# composition with linear maps


def linear_action(U, dim: int, max_degree: int) -> list[np.ndarray]:
    """Matrices of ``p -> p(U z)`` on each space of homogeneous polynomials.

    Entry ``k`` has shape ``(n_k, n_k)``; its column for the multi-index
    ``alpha`` holds the coefficients of ``(Uz)^alpha``.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (dim, dim):
        raise ShapeError(f"expected a {dim}x{dim} matrix, got {U.shape}")
    basis = monomial_basis(dim, max_degree)
    mats = [np.ones((1, 1), dtype=complex)]
    for k in range(max_degree):
        nxt = basis.exponents[basis.block(k + 1)]
        js = np.argmax(nxt > 0, axis=1)
        lo = int(basis.offsets[k])
        parent = nxt.copy()
        parent[np.arange(len(nxt)), js] -= 1
        parents = np.array([basis.index[tuple(a)] - lo for a in parent])
        prev = mats[-1][:, parents]
        table = basis.mult_table(k)
        S = np.zeros((len(nxt), len(nxt)), dtype=complex)
        for i in range(dim):
            S[table[i], :] += prev * U[js, i][None, :]
        mats.append(S)
    return mats


def compose_linear(f: HoloPoly, U, action: list[np.ndarray] | None = None) -> HoloPoly:
    """``f(Uz)`` computed exactly in coefficient space."""
    if action is None:
        action = linear_action(U, f.dim, f.max_degree)
    coef = np.empty_like(f.coef)
    for k in range(f.max_degree + 1):
        sl = f.basis.block(k)
        coef[sl] = action[k] @ f.coef[sl]
    return HoloPoly(f.dim, f.max_degree, coef)


# ---------------------------------------------------------------------------
# derivatives


def derivative(f: HoloPoly, orders: Sequence[int]) -> HoloPoly:
    """Holomorphic partial derivative ``d^orders f`` as a HoloPoly."""
    orders = np.asarray(_as_alpha(orders, f.dim))
    ex = f.basis.exponents
    keep = np.all(ex >= orders, axis=1) & (f.coef != 0)
    coef = np.zeros_like(f.coef)
    idx = np.flatnonzero(keep)
    if len(idx):
        factor = np.exp(special.gammaln(ex[idx] + 1) - special.gammaln(ex[idx] - orders + 1)).prod(axis=1)
        targets = [f.basis.index[tuple(a)] for a in ex[idx] - orders]
        coef[targets] = f.coef[idx] * factor
    return HoloPoly(f.dim, f.max_degree, coef)


@dataclass
class MixedPoly:
    """Sparse polynomial ``sum c_{alpha,beta} z^alpha conj(z)^beta``."""

    dim: int
    terms: dict = field(default_factory=dict)

    @classmethod
    def from_holo(cls, f: HoloPoly) -> "MixedPoly":
        zero = (0,) * f.dim
        return cls(f.dim, {(a, zero): c for a, c in f.coeffs.items()})

    @classmethod
    def from_terms(cls, dim: int, terms: Mapping) -> "MixedPoly":
        out: dict = {}
        for (a, b), c in terms.items():
            key = (_as_alpha(a, dim), _as_alpha(b, dim))
            out[key] = out.get(key, 0) + complex(c)
        return cls(dim, {k: v for k, v in out.items() if v != 0})

    def _new(self, terms: dict) -> "MixedPoly":
        return MixedPoly(self.dim, {k: v for k, v in terms.items() if v != 0})

    @property
    def is_holomorphic(self) -> bool:
        return all(not any(b) for (_, b) in self.terms)

    @property
    def max_degree(self) -> int:
        return max((sum(a) + sum(b) for a, b in self.terms), default=0)

    def to_holo(self, max_degree: int | None = None) -> HoloPoly:
        if not self.is_holomorphic:
            raise ShapeError("polynomial depends on conj(z)")
        return HoloPoly.from_terms(self.dim, {a: c for (a, _), c in self.terms.items()}, max_degree)

    def __add__(self, other: "MixedPoly") -> "MixedPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return self._new(out)

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return self._new({k: v * scalar for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, MixedPoly):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def allclose(self, other: "MixedPoly", atol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) <= atol for k in keys)

    def diff(self, j: int, conjugate: bool = False) -> "MixedPoly":
        side = 1 if conjugate else 0
        out: dict = {}
        for key, c in self.terms.items():
            e = key[side]
            if e[j] == 0:
                continue
            e2 = e[:j] + (e[j] - 1,) + e[j + 1:]
            new = (e2, key[1]) if side == 0 else (key[0], e2)
            out[new] = out.get(new, 0) + c * e[j]
        return self._new(out)

    def times_var(self, i: int, conjugate: bool = False) -> "MixedPoly":
        side = 1 if conjugate else 0
        out = {}
        for key, c in self.terms.items():
            e = key[side]
            e2 = e[:i] + (e[i] + 1,) + e[i + 1:]
            out[(e2, key[1]) if side == 0 else (key[0], e2)] = c
        return self._new(out)

    def arrays(self):
        """Exponent arrays ``(alpha, beta)`` and the coefficient vector."""
        keys = list(self.terms)
        if not keys:
            z = np.zeros((0, self.dim), dtype=np.int64)
            return z, z, np.zeros(0, dtype=complex)
        A = np.array([k[0] for k in keys], dtype=np.int64)
        B = np.array([k[1] for k in keys], dtype=np.int64)
        return A, B, np.array([self.terms[k] for k in keys], dtype=complex)

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        single = z.ndim == 1
        pts = z.reshape(-1, self.dim)
        A, B, C = self.arrays()
        vals = np.ones((len(pts), len(C)), dtype=complex)
        for j in range(self.dim):
            vals *= pts[:, j, None] ** A[None, :, j] * np.conj(pts[:, j, None]) ** B[None, :, j]
        out = vals @ C
        return out[0] if single else out

    __call__ = evaluate


def partial_derivative(f: HoloPoly | MixedPoly, j: int, conjugate: bool = False) -> MixedPoly:
    """``d/dz_j`` (or ``d/dconj(z_j)``) as a MixedPoly."""
    if isinstance(f, HoloPoly):
        if not 0 <= j < f.dim:
            raise ShapeError(f"coordinate {j} outside 0..{f.dim - 1}")
        f = MixedPoly.from_holo(f)
    return f.diff(j, conjugate)


def gradient_norm(f: HoloPoly, s: int, z) -> np.ndarray | float:
    """``nabla_s(f)(z)``: l2 norm over all ordered ``s``-tuples of partials."""
    if s < 1:
        raise RangeError("gradient order must be >= 1")
    z = np.asarray(z, dtype=complex)
    total = np.zeros(z.reshape(-1, f.dim).shape[0])
    for combo in itertools.combinations_with_replacement(range(f.dim), s):
        orders = np.bincount(combo, minlength=f.dim)
        mult = math.factorial(s) / np.prod([math.factorial(o) for o in orders])
        total += mult * np.abs(derivative(f, orders).evaluate(z.reshape(-1, f.dim))) ** 2
    out = np.sqrt(total)
    return float(out[0]) if z.ndim == 1 else out


# ---------------------------------------------------------------------------
# tangential operators


class TangentialOp(NamedTuple):
    """``T_{i,j} = conj(z_i) d_j - conj(z_j) d_i``; ``conj(T)_{i,j} = z_i dbar_j - z_j dbar_i``."""

    i: int
    j: int
    conjugate: bool = False

    def apply(self, f: MixedPoly) -> MixedPoly:
        i, j = self.i, self.j
        if self.conjugate:
            return f.diff(j, True).times_var(i) - f.diff(i, True).times_var(j)
        return f.diff(j).times_var(i, True) - f.diff(i).times_var(j, True)

    @property
    def bar(self) -> "TangentialOp":
        return TangentialOp(self.i, self.j, not self.conjugate)


def tangential_ops(dim: int, plus: bool = False) -> list[TangentialOp]:
    """Single factors: ordered pairs ``i != j``, plus their conjugates if ``plus``."""
    ops = [TangentialOp(i, j) for i in range(dim) for j in range(dim) if i != j]
    if plus:
        ops += [op.bar for op in ops]
    return ops


def _as_mixed(f) -> MixedPoly:
    return MixedPoly.from_holo(f) if isinstance(f, HoloPoly) else f


def tangential_apply(f: HoloPoly | MixedPoly, ops: Sequence[TangentialOp]) -> MixedPoly:
    """Apply the operator product ``ops[0] ops[1] ... ops[-1]`` (rightmost acts first)."""
    g = _as_mixed(f)
    for op in reversed(ops):
        g = op.apply(g)
    return g


def radial_apply(f: HoloPoly | MixedPoly) -> MixedPoly:
    """``R = sum z_j d/dz_j`` acting on a mixed polynomial."""
    g = _as_mixed(f)
    return g._new({k: v * sum(k[0]) for k, v in g.terms.items()})


def tangential_compositions(f: HoloPoly | MixedPoly, k: int, plus: bool = False):
    """Yield ``(ops, T_ops f)`` for every length-``k`` word over the factor set."""
    g = _as_mixed(f)
    factors = tangential_ops(g.dim, plus)
    # memoize on suffixes: T_1 (T_2 ... T_k f)
    level = {(): g}
    for _ in range(k):
        level = {(op,) + word: op.apply(val) for word, val in level.items() for op in factors}
    yield from sorted(level.items())


def tangential_gradient_value(f: HoloPoly, k: int, plus: bool, z):
    """``sum_delta |T_delta f(z)|`` over ``C_k`` (or ``C_k^+`` when ``plus``)."""
    z = np.asarray(z, dtype=complex)
    total = np.zeros(z.reshape(-1, f.dim).shape[0])
    for _, g in tangential_compositions(f, k, plus):
        total += np.abs(g.evaluate(z.reshape(-1, f.dim)))
    return float(total[0]) if z.ndim == 1 else total


@lru_cache(maxsize=32)
def solve_radial_identity_constants(k: int, dim: int, test_degree: int | None = None,
                                    tol: float = 1e-10) -> tuple[float, ...]:
    """Constants ``d_0..d_k`` with ``sum_j d_j R^{k-j} f = sum_delta conj(T)_delta T_delta f``.

    ``R^0`` is the identity.  The system is assembled on every monomial of
    degree ``<= test_degree`` (default ``2k + 4``) and solved by least squares.

    Raises
    ------
    IdentityFailureError
        If the least-squares residual exceeds ``tol``.
    """
    if k < 1 or dim < 2:
        raise RangeError("need k >= 1 and N >= 2")
    if test_degree is None:
        test_degree = 2 * k + 4
    basis = monomial_basis(dim, test_degree)
    words = [w for w, _ in tangential_compositions(MixedPoly(dim, {}), k)]
    rows, rhs = [], []
    for alpha in map(tuple, basis.exponents):
        m = sum(alpha)
        g = MixedPoly.from_holo(HoloPoly.monomial(alpha))
        total = MixedPoly(dim, {})
        for word in words:
            total = total + tangential_apply(g, [op.bar for op in word] + list(word))
        if not total.is_holomorphic:
            raise IdentityFailureError("conj(T)T image is not holomorphic")
        keys = set(total.terms) | {(alpha, (0,) * dim)}
        for key in sorted(keys):
            coeff = [float(m ** (k - j)) if key[0] == alpha and j < k else float(key[0] == alpha) for j in range(k + 1)]
            rows.append(coeff)
            rhs.append(total.terms.get(key, 0.0))
    A = np.array(rows)
    b = np.array(rhs, dtype=complex)
    d, *_ = np.linalg.lstsq(A, b, rcond=None)
    scale = max(1.0, float(np.max(np.abs(b))))
    resid = float(np.max(np.abs(A @ d - b))) / scale
    if resid > tol or np.max(np.abs(d.imag)) > tol * scale:
        raise IdentityFailureError(f"radial identity residual {resid:.3e} exceeds {tol:g}")
    return tuple(float(x) for x in d.real)
