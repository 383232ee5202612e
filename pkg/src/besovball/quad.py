"""Sphere and radial quadrature, integral means and mixed norms.

Sphere integrals use a product rule.  A point of ``S_N`` is written as
``zeta_j = sqrt(x_j) exp(i theta_j)`` where ``x`` lies on the standard simplex
(uniformly distributed under the normalized surface measure) and the angles
are independent and uniform.  The angles get an equispaced torus grid, so the
values of a polynomial on the whole grid come out of one inverse FFT per
simplex node; the simplex gets a collapsed-coordinate Gauss-Jacobi rule.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, sparse, special

from .errors import CapabilityError, RangeError, ShapeError, WeightError
from .holopoly import HoloPoly, MixedPoly, radial_power

__all__ = [
    "SphereRule",
    "RadialRule",
    "NormSpec",
    "build_sphere_rule",
    "sphere_rule_for",
    "build_radial_rule",
    "gauss_jacobi01",
    "grid_values",
    "reduce_means",
    "combined_means",
    "sphere_mean",
    "hardy_norm",
    "mixed_norm",
    "mixed_norm_profile",
    "phi_seminorm",
    "integrate_dt_over_t",
    "sup_over_radius",
]

MAX_DIM = 4


def gauss_jacobi01(n: int, a: float = 0.0, b: float = 0.0):
    """Nodes/weights on (0, 1) for the weight ``t^a (1-t)^b``."""
    x, w = special.roots_jacobi(n, b, a)
    t = (1 + x) / 2
    w = w / 2 ** (a + b + 1)
    order = np.argsort(t)
    return t[order], w[order]


@dataclass(frozen=True)
class SphereRule:
    """Product quadrature for the normalized measure on ``S_N``.

    Attributes
    ----------
    dim : int
    exact_degree : int
        Monomials ``zeta^alpha conj(zeta)^beta`` with ``|alpha|+|beta| <= exact_degree``
        are integrated exactly.
    torus_points : int
        Equispaced angles per coordinate.
    simplex_nodes, simplex_weights : ndarray
        Nodes ``x`` on the simplex (shape ``(X, N)``) and weights summing to 1.
    """

    dim: int
    exact_degree: int
    torus_points: int
    simplex_nodes: np.ndarray
    simplex_weights: np.ndarray

    @property
    def torus_size(self) -> int:
        return self.torus_points ** self.dim

    @property
    def size(self) -> int:
        return len(self.simplex_weights) * self.torus_size

    @property
    def nodes(self) -> np.ndarray:
        """Explicit nodes, shape ``(size, N)``; simplex-major, torus in C order."""
        M, N = self.torus_points, self.dim
        theta = 2 * np.pi * np.arange(M) / M
        grids = np.meshgrid(*([theta] * N), indexing="ij")
        phase = np.exp(1j * np.stack([g.ravel() for g in grids], axis=1))
        amp = np.sqrt(self.simplex_nodes)
        return (amp[:, None, :] * phase[None, :, :]).reshape(-1, N)

    @property
    def weights(self) -> np.ndarray:
        return np.repeat(self.simplex_weights / self.torus_size, self.torus_size)

    def to_dict(self) -> dict:
        nodes = self.nodes
        return {
            "dim": self.dim,
            "exactDegree": self.exact_degree,
            "torusPoints": self.torus_points,
            "nodes": [[[float(c.real), float(c.imag)] for c in row] for row in nodes],
            "weights": [float(w) for w in self.weights],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SphereRule":
        dim, d = int(doc["dim"]), int(doc["exactDegree"])
        base = build_sphere_rule(dim, d)
        M = int(doc.get("torusPoints", base.torus_points))
        rule = base if M == base.torus_points else _with_torus(base, M)
        if "weights" in doc and len(doc["weights"]) != rule.size:
            raise ShapeError("serialized rule does not match its declared parameters")
        return rule


def _with_torus(rule: SphereRule, M: int) -> SphereRule:
    return SphereRule(rule.dim, rule.exact_degree, M, rule.simplex_nodes, rule.simplex_weights)


@lru_cache(maxsize=64)
def build_sphere_rule(dim: int, exact_degree: int, oversample: int = 1) -> SphereRule:
    """Quadrature on ``S_N`` exact for ``zeta^alpha conj(zeta)^beta``, ``|alpha|+|beta| <= d``.

    ``N = 1`` gets ``2m`` equispaced points with ``m = d + 1``.  For ``N >= 2``
    the torus factor has ``d + 1`` angles per coordinate and the simplex
    factor is a stick-breaking Gauss-Jacobi product exact to degree
    ``d // 2`` in ``x``.  ``oversample`` multiplies the number of angles (for
    non-polynomial integrands such as ``|f|^p``).
    """
    if dim < 1:
        raise ShapeError("dimension must be positive")
    if dim > MAX_DIM:
        raise CapabilityError(f"sphere rules are limited to N <= {MAX_DIM}")
    if exact_degree < 0:
        raise RangeError("exact degree must be nonnegative")
    if dim == 1:
        M = 2 * (exact_degree + 1) * oversample
        return SphereRule(1, exact_degree, M, np.ones((1, 1)), np.ones(1))
    M = (exact_degree + 1) * oversample
    n = (exact_degree // 2) // 2 + 1
    us, ws = [], []
    for i in range(dim - 1):
        u, w = gauss_jacobi01(n, 0.0, dim - 2 - i)
        us.append(u)
        ws.append(w / w.sum())
    grids = np.meshgrid(*us, indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    W = np.ones(len(U))
    for g in np.meshgrid(*ws, indexing="ij"):
        W = W * g.ravel()
    x = np.empty((len(U), dim))
    rest = np.ones(len(U))
    for i in range(dim - 1):
        x[:, i] = rest * U[:, i]
        rest = rest * (1 - U[:, i])
    x[:, -1] = rest
    return SphereRule(dim, exact_degree, M, x, W / W.sum())


def sphere_rule_for(f, p: float = 2.0) -> SphereRule:
    """Default rule for ``f``: exact for ``|f|^2``, angles doubled when ``p != 2``."""
    D = f.max_degree
    return build_sphere_rule(f.dim, 2 * D, 1 if p == 2 else 2)


def _terms(poly):
    if isinstance(poly, HoloPoly):
        A = poly.basis.exponents
        return A, np.zeros_like(A), poly.coef[None, :]
    if isinstance(poly, MixedPoly):
        A, B, C = poly.arrays()
        return A, B, C[None, :]
    polys = list(poly)
    if not polys:
        raise ShapeError("empty family")
    first = polys[0]
    if not all(isinstance(g, HoloPoly) and g.dim == first.dim and g.max_degree == first.max_degree for g in polys):
        raise ShapeError("a family must consist of HoloPolys with equal N and D")
    A = first.basis.exponents
    return A, np.zeros_like(A), np.stack([g.coef for g in polys])


class _GridEvaluator:
    """Row-chunked evaluation of polynomials on a sphere rule's grid.

    Rows enumerate ``(function, radius, simplex node)`` in C order; each row
    holds the ``M**N`` torus values.
    """

    def __init__(self, poly, rule: SphereRule, radii):
        A, B, C = _terms(poly)
        N = rule.dim
        if A.shape[1] != N:
            raise ShapeError(f"polynomial has N={A.shape[1]}, rule has N={N}")
        self.rule = rule
        self.radii = np.atleast_1d(np.asarray(radii, dtype=float))
        M = rule.torus_points
        self.shape = (C.shape[0], len(self.radii), len(rule.simplex_weights))
        self.rows = int(np.prod(self.shape))
        self.width = M ** N
        self.C = C
        self.empty = A.shape[0] == 0
        if self.empty:
            return
        deg = (A + B).sum(axis=1)
        with np.errstate(divide="ignore"):
            logx = np.log(rule.simplex_nodes)
        half = (A + B) / 2.0
        self.xpow = np.exp(np.where(half > 0, logx[:, None, :] * half[None, :, :], 0.0).sum(axis=2))
        self.rpow = self.radii[:, None] ** deg[None, :]
        T = A.shape[0]
        flat = np.ravel_multi_index(tuple(((A - B) % M).T), (M,) * N)
        self.scatter_t = sparse.csr_matrix((np.ones(T), (flat, np.arange(T))), shape=(self.width, T))

    def chunk_rows(self, max_elements: int = 2 ** 22) -> int:
        return max(1, max_elements // self.width)

    def values(self, lo: int, hi: int) -> np.ndarray:
        if self.empty:
            return np.zeros((hi - lo, self.width), dtype=complex)
        f, r, x = np.unravel_index(np.arange(lo, hi), self.shape)
        amp = self.C[f] * self.rpow[r] * self.xpow[x]
        block = np.asarray((self.scatter_t @ amp.T).T)
        N, M = self.rule.dim, self.rule.torus_points
        block = block.reshape((-1,) + (M,) * N)
        vals = np.fft.ifftn(block, axes=tuple(range(1, N + 1))) * self.width
        return vals.reshape(-1, self.width)


def grid_values(poly, rule: SphereRule, radii) -> np.ndarray:
    """Values of ``poly(r zeta)`` on the rule grid.

    ``poly`` is a HoloPoly, a MixedPoly, or a list of HoloPolys sharing ``N``
    and ``D``.  Returns an array of shape ``(F, R, X, M**N)``: functions,
    radii, simplex nodes, torus nodes.
    """
    ev = _GridEvaluator(poly, rule, radii)
    return ev.values(0, ev.rows).reshape(ev.shape + (ev.width,))


def reduce_means(values: np.ndarray, rule: SphereRule, p: float) -> np.ndarray:
    """``M_p`` from grid values of shape ``(..., X, M**N)`` (absolute values allowed)."""
    a = np.abs(values)
    if math.isinf(p):
        return a.max(axis=(-2, -1))
    inner = (a ** p).mean(axis=-1)
    return (inner @ rule.simplex_weights) ** (1.0 / p)


def _row_stat(a: np.ndarray, p: float) -> np.ndarray:
    return a.max(axis=-1) if math.isinf(p) else (a ** p).mean(axis=-1)


def _finish(stats: np.ndarray, shape, rule: SphereRule, p: float) -> np.ndarray:
    stats = stats.reshape(shape)
    if math.isinf(p):
        return stats.max(axis=-1)
    return (stats @ rule.simplex_weights) ** (1.0 / p)


def combined_means(polys: Sequence, rule: SphereRule, radii, p: float,
                   combine: Callable | None = None) -> np.ndarray:
    """``M_p(r, combine(g_1, ..., g_m))`` for pointwise combinations of polynomials.

    ``combine`` receives the complex grid values of each polynomial and must
    return nonnegative reals; the default is ``abs`` of a single polynomial.
    Returns an array over ``radii``.
    """
    _check_p(p)
    if combine is None:
        combine = lambda v: np.abs(v)  # noqa: E731
    evs = [_GridEvaluator(g, rule, radii) for g in polys]
    rows = evs[0].rows
    stats = np.empty(rows)
    step = max(1, evs[0].chunk_rows() // max(1, len(evs)))
    for lo in range(0, rows, step):
        hi = min(rows, lo + step)
        stats[lo:hi] = _row_stat(combine(*[ev.values(lo, hi) for ev in evs]), p)
    return _finish(stats, evs[0].shape, rule, p)[0]


def sphere_mean(f, r, p: float, rule: SphereRule | None = None):
    """Integral mean ``M_p(r, f)``; ``r`` may be a scalar or an array.

    ``f`` is a HoloPoly, a MixedPoly or a list of equally shaped HoloPolys
    (in which case the leading output axis runs over the list).
    """
    _check_p(p)
    if rule is None:
        rule = sphere_rule_for(f if isinstance(f, (HoloPoly, MixedPoly)) else f[0], p)
    scalar = np.ndim(r) == 0
    ev = _GridEvaluator(f, rule, r)
    stats = np.empty(ev.rows)
    step = ev.chunk_rows()
    for lo in range(0, ev.rows, step):
        hi = min(ev.rows, lo + step)
        stats[lo:hi] = _row_stat(np.abs(ev.values(lo, hi)), p)
    means = _finish(stats, ev.shape, rule, p)
    single = isinstance(f, (HoloPoly, MixedPoly))
    if single:
        means = means[0]
    if scalar:
        means = means[..., 0]
        return float(means) if single else means
    return means


def hardy_norm(f, p: float, rule: SphereRule | None = None):
    """``||f||_p``; for a polynomial the supremum over ``r`` is attained at ``r = 1``."""
    return sphere_mean(f, 1.0, p, rule)


def _check_p(p: float) -> None:
    if not (p >= 1):
        raise RangeError(f"exponent must lie in [1, inf], got {p}")


# ---------------------------------------------------------------------------
# radial integrals


@dataclass(frozen=True)
class RadialRule:
    """Nodes ``r_i`` in (0, 1) and weights for ``2N int_0^1 g(r) (1-r^2)^a r^(2N-1) dr``."""

    nodes: np.ndarray
    weights: np.ndarray
    dim: int
    exponent: float

    @property
    def tag(self) -> str:
        return f"bergman(N={self.dim}, a={self.exponent:g})"

    def integrate(self, values) -> float:
        return float(np.asarray(values) @ self.weights)


@lru_cache(maxsize=256)
def build_radial_rule(dim: int, exponent: float, n: int = 32) -> RadialRule:
    """Gauss-Jacobi rule in ``u = 1 - r^2`` for the weight ``(1-r^2)^exponent r^(2N-1)``.

    With ``u = 1 - r^2`` the integral becomes ``N int_0^1 g u^exponent (1-u)^(N-1) du``.
    """
    if exponent <= -1:
        raise RangeError(f"radial weight exponent must exceed -1, got {exponent}")
    u, w = gauss_jacobi01(n, exponent, dim - 1)
    r = np.sqrt(1 - u)
    order = np.argsort(r)
    return RadialRule(r[order], dim * w[order], dim, float(exponent))


@dataclass(frozen=True)
class NormSpec:
    """Selects ``||.||_{p,q,alpha}``, or the phi-weighted functional when ``phi`` is set.

    ``phi`` must be a vectorized callable on (0, 1]; ``n`` is the order of the
    radial derivative used by the phi functional.
    """

    p: float = 2.0
    q: float = 2.0
    alpha: float = 1.0
    phi: Callable | None = None
    n: int = 0

    def __post_init__(self):
        _check_p(self.p)
        if not self.q >= 1:
            raise RangeError(f"q must lie in [1, inf], got {self.q}")


def sup_over_radius(fn: Callable, lo: float = 0.0, t_min: float = 1e-8, n_grid: int = 80) -> tuple[float, float]:
    """Maximize ``fn(r)`` on ``[lo, 1)``: log grid in ``1 - r``, then golden section.

    Returns ``(max value, argmax)``.
    """
    t = np.unique(np.concatenate([np.geomspace(t_min, 1 - lo, n_grid), np.linspace(0, 1 - lo, n_grid // 4)[1:]]))
    r = np.sort(1 - t)
    vals = np.asarray(fn(r), dtype=float)
    i = int(np.argmax(vals))
    best, arg = float(vals[i]), float(r[i])
    if 0 < i < len(r) - 1:
        res = optimize.minimize_scalar(lambda x: -float(np.asarray(fn(np.array([x])))[0]),
                                       bracket=(r[i - 1], r[i], r[i + 1]), method="golden",
                                       options={"xtol": 1e-10})
        if res.success and r[i - 1] <= res.x <= r[i + 1] and -res.fun > best:
            best, arg = float(-res.fun), float(res.x)
    return best, arg


def mixed_norm_profile(mean_fn: Callable, p: float, q: float, alpha: float, dim: int,
                       n_radial: int = 32) -> float:
    """``||.||_{p,q,alpha}`` of a function given through its radial profile ``r -> M_p(r)``."""
    if math.isinf(q):
        if alpha < 0:
            return math.inf
        return sup_over_radius(lambda r: (1 - r * r) ** alpha * mean_fn(r))[0]
    if alpha <= 0:
        warnings.warn("non-integrable radial weight (alpha <= 0); returning inf", RuntimeWarning)
        return math.inf
    rule = build_radial_rule(dim, q * alpha - 1, n_radial)
    vals = np.asarray(mean_fn(rule.nodes), dtype=float)
    return rule.integrate(vals ** q) ** (1.0 / q)


def mixed_norm(f, spec: NormSpec, sphere_rule: SphereRule | None = None, n_radial: int | None = None) -> float:
    """Mixed norm ``(2N int_0^1 M_p^q(r,f) (1-r^2)^(q alpha - 1) r^(2N-1) dr)^(1/q)``.

    For ``q = inf`` this is ``sup_r (1-r^2)^alpha M_p(r, f)``.  A nonzero
    ``f`` with ``alpha <= 0`` and finite ``q`` gives ``inf``.
    """
    if f.is_zero():
        return 0.0
    if sphere_rule is None:
        sphere_rule = sphere_rule_for(f, spec.p)
    if n_radial is None:
        n_radial = max(32, f.max_degree // 2 + 16)
    return mixed_norm_profile(lambda r: sphere_mean(f, r, spec.p, sphere_rule), spec.p, spec.q,
                              spec.alpha, f.dim, n_radial)


def integrate_dt_over_t(h: Callable, t_floor: float = 1e-150, panel_nodes: int = 16) -> float:
    """``int_0^1 h(t) dt / t`` via ``t = exp(-s)`` and geometric Gauss-Legendre panels in ``s``."""
    s_max = -math.log(t_floor)
    edges = [0.0, 0.25, 0.5, 1.0]
    while edges[-1] < s_max:
        edges.append(min(2 * edges[-1], s_max))
    x, w = np.polynomial.legendre.leggauss(panel_nodes)
    s_all, w_all = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        s_all.append((b - a) / 2 * x + (a + b) / 2)
        w_all.append((b - a) / 2 * w)
    s = np.concatenate(s_all)
    return float(np.asarray(h(np.exp(-s)), dtype=float) @ np.concatenate(w_all))


def _profile_cached(mean_fn: Callable) -> Callable:
    """Wrap a radial profile so that radii rounding to 1.0 share one evaluation."""

    def fn(r):
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        uniq, inv = np.unique(r, return_inverse=True)
        out.ravel()[:] = np.asarray(mean_fn(uniq))[inv.ravel()]
        return out

    return fn


def phi_seminorm(f: HoloPoly, spec: NormSpec, sphere_rule: SphereRule | None = None) -> float:
    """phi-weighted growth functional of ``R^n f``.

    ``q < inf``: ``int_0^1 (M_p(r, R^n f) (1-r)^n / phi(1-r))^q dr/(1-r)``.
    ``q = inf``: ``sup_r M_p(r, R^n f) (1-r)^n / phi(1-r)``.
    """
    if spec.phi is None:
        raise WeightError("NormSpec has no phi weight")
    if f.is_zero():
        return 0.0
    g = radial_power(f, spec.n) if spec.n else f
    if sphere_rule is None:
        sphere_rule = sphere_rule_for(g, spec.p)
    prof = _profile_cached(lambda r: sphere_mean(g, r, spec.p, sphere_rule))
    phi, n, q = spec.phi, spec.n, spec.q

    def ratio(t):
        ph = np.asarray(phi(t), dtype=float)
        if np.any(~(ph > 0)):
            raise WeightError("phi must be positive on (0, 1]")
        return prof(1 - t) * t ** n / ph

    if math.isinf(q):
        return sup_over_radius(lambda r: ratio(1 - r))[0]
    return integrate_dt_over_t(lambda t: ratio(t) ** q) ** (1.0 / q)
