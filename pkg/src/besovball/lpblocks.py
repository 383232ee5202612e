"""Littlewood-Paley blocks, dyadic Besov norms and best polynomial approximation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import RangeError
from .holopoly import HoloPoly, hadamard, monomial_basis
from .quad import SphereRule, build_sphere_rule, hardy_norm, sphere_rule_for

__all__ = [
    "smooth_cutoff",
    "psi",
    "BlockBasis",
    "DyadicNormSpec",
    "build_block_basis",
    "block_project",
    "block_norms",
    "dyadic_norm",
    "lq_norm",
    "best_approx_l2",
    "best_approx_general",
    "ApproxBracket",
    "sequence_tail_bound",
]


def _h(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_cutoff(t):
    """C-infinity cutoff: 1 on ``t <= 1``, 0 on ``t >= 2``, monotone in between."""
    t = np.asarray(t, dtype=float)
    a, b = _h(2 - t), _h(t - 1)
    with np.errstate(invalid="ignore"):
        mid = a / (a + b)
    return np.where(t <= 1, 1.0, np.where(t >= 2, 0.0, mid))


def psi(t, cutoff: Callable = smooth_cutoff):
    """``psi(t) = omega(t/2) - omega(t)``, supported in ``(1, 4)``."""
    t = np.asarray(t, dtype=float)
    return cutoff(t / 2) - cutoff(t)


@dataclass(frozen=True)
class BlockBasis:
    """Per-block multiplier sequences ``w_nu(k)``, ``k = 0..max_degree``.

    ``weights[nu]`` is ``psi(k / 2^(nu-1))`` for ``nu >= 1`` and the indicator of
    ``{0, 1}`` for ``nu = 0``.  With ``sharp=True`` the blocks are the
    indicator sequences of ``V_0 = 1`` and ``V_nu = sum_{2^(nu-1) <= k < 2^nu} z^k``.
    """

    max_degree: int
    weights: np.ndarray
    sharp: bool = False

    @property
    def max_block(self) -> int:
        return self.weights.shape[0] - 1

    def support(self, nu: int) -> np.ndarray:
        return np.flatnonzero(self.weights[nu])

    def partial_sum(self, nu: int) -> np.ndarray:
        """Multiplier of ``Q_nu = W_0 + ... + W_(nu-1)``."""
        return self.weights[:nu].sum(axis=0)

    def neighborhood(self, nu: int) -> np.ndarray:
        """Multiplier of ``W_(nu-1) + W_nu + W_(nu+1)`` (``W_(-1) = 0``)."""
        lo, hi = max(nu - 1, 0), min(nu + 2, self.weights.shape[0])
        return self.weights[lo:hi].sum(axis=0)


@dataclass(frozen=True)
class DyadicNormSpec:
    p: float = 2.0
    q: float = 2.0
    beta: float = 0.0


def build_block_basis(max_degree: int, sharp: bool = False, cutoff: Callable = smooth_cutoff) -> BlockBasis:
    """Blocks ``nu = 0..ceil(log2 D)+1``; blocks whose support starts above ``D`` are dropped."""
    if max_degree < 1:
        raise RangeError("block basis needs max degree >= 1")
    V = math.ceil(math.log2(max_degree)) + 1
    k = np.arange(max_degree + 1)
    rows = []
    if sharp:
        rows.append((k == 0).astype(float))
        for nu in range(1, V + 1):
            rows.append(((k >= 2 ** (nu - 1)) & (k < 2 ** nu)).astype(float))
    else:
        rows.append((k <= 1).astype(float))
        for nu in range(1, V + 1):
            rows.append(psi(k / 2.0 ** (nu - 1), cutoff))
    W = np.array(rows)
    while W.shape[0] > 1 and not W[-1].any():
        W = W[:-1]
    return BlockBasis(max_degree, W, sharp)


def block_project(f: HoloPoly, nu: int, basis: BlockBasis | None = None) -> HoloPoly:
    """``W_nu * f``."""
    if basis is None:
        basis = build_block_basis(max(f.max_degree, 1))
    if nu > basis.max_block:
        return HoloPoly.zeros(f.dim, f.max_degree)
    return hadamard(basis.weights[nu], f)


def _norm_fn(p: float, rule: SphereRule | None) -> Callable[[HoloPoly], float]:
    if p == 2 and rule is None:
        return lambda g: g.h2_norm()
    return lambda g: hardy_norm(g, p, rule if rule is not None else sphere_rule_for(g, p))


def block_norms(f: HoloPoly, p: float = 2.0, basis: BlockBasis | None = None,
                rule: SphereRule | None = None) -> np.ndarray:
    """``||W_nu * f||_p`` for every block.

    With ``rule=None`` and ``p = 2`` the exact moment formula is used;
    otherwise sphere quadrature.
    """
    if basis is None:
        basis = build_block_basis(max(f.max_degree, 1))
    if p != 2 and rule is None:
        rule = sphere_rule_for(f, p)
    norm = _norm_fn(p, rule)
    return np.array([norm(block_project(f, nu, basis)) for nu in range(basis.max_block + 1)])


def lq_norm(seq, q: float) -> float:
    seq = np.abs(np.asarray(seq, dtype=float))
    if len(seq) == 0:
        return 0.0
    if math.isinf(q):
        return float(seq.max())
    return float(np.sum(seq ** q) ** (1.0 / q))


def dyadic_norm(f: HoloPoly, spec: DyadicNormSpec, basis: BlockBasis | None = None,
                rule: SphereRule | None = None) -> float:
    """``|| {2^(-nu beta) ||W_nu * f||_p} ||_{l^q}``."""
    norms = block_norms(f, spec.p, basis, rule)
    nu = np.arange(len(norms))
    return lq_norm(2.0 ** (-nu * spec.beta) * norms, spec.q)


# ---------------------------------------------------------------------------
# best approximation


def best_approx_l2(f: HoloPoly, nu: int) -> tuple[float, HoloPoly]:
    """``E_nu(f)_2`` and its minimizer, the truncation to degree ``<= nu``.

    Homogeneous monomials are orthogonal on the sphere, so the tail norm is
    the exact infimum.
    """
    if nu < 0:
        raise RangeError("approximation degree must be nonnegative")
    P = f.truncate(nu)
    tail = np.abs(f.coef - P.coef) ** 2 * f.basis.moments
    return float(np.sqrt(tail.sum())), P


@dataclass(frozen=True)
class ApproxBracket:
    upper: float
    lower: float
    P: HoloPoly
    converged: bool
    iterations: int

    def __iter__(self):
        return iter((self.upper, self.lower, self.P))


def _lp(values, weights, p):
    a = np.abs(values)
    if math.isinf(p):
        return float(a.max())
    return float((weights @ a ** p) ** (1.0 / p))


def best_approx_general(f: HoloPoly, nu: int, p: float, rule: SphereRule | None = None,
                        budget: int = 200, rtol: float = 1e-3, basis: BlockBasis | None = None) -> ApproxBracket:
    """Two-sided bracket for ``E_nu(f)_p`` on a sphere rule.

    The upper bound is the best of: the plain truncation, the smoothed
    partial sum ``Q_m * f`` with ``2^m - 1 <= nu``, and an iteratively
    reweighted least-squares fit (Lawson-type updates for ``p = inf``).
    The lower bound comes from duality: any ``h`` orthogonal to the
    polynomials of degree ``<= nu`` gives ``|<f, h>| / ||h||_p'``.  Probes are
    the least-squares residual of ``f`` and the dual element of the current
    best error, both projected off the low-degree polynomials.
    """
    if nu < 0:
        raise RangeError("approximation degree must be nonnegative")
    if rule is None:
        rule = build_sphere_rule(f.dim, 2 * f.max_degree, 2)
    if nu >= f.max_degree or f.truncate(nu) == f:
        return ApproxBracket(0.0, 0.0, f.truncate(nu), True, 0)
    pts, w = rule.nodes, rule.weights
    fv = f.evaluate(pts)
    low_basis = monomial_basis(f.dim, nu)
    ex = low_basis.exponents
    V = np.ones((len(pts), low_basis.size), dtype=complex)
    for j in range(f.dim):
        V *= pts[:, j, None] ** ex[None, :, j]

    def err_of(c):
        return fv - V @ c

    candidates = [f.truncate(nu).with_max_degree(nu).coef]
    if basis is None:
        basis = build_block_basis(max(f.max_degree, 1))
    m = int(math.floor(math.log2(nu + 1)))
    if m >= 1:
        Q = hadamard(basis.partial_sum(m), f)
        candidates.append(Q.with_max_degree(nu).coef)
    best_c = min(candidates, key=lambda c: _lp(err_of(c), w, p))
    best = _lp(err_of(best_c), w, p)

    sw = np.sqrt(w)
    rw = np.ones_like(w)
    e = err_of(best_c)
    it = 0
    lower = 0.0
    for it in range(1, budget + 1):
        a = np.abs(e)
        if math.isinf(p):
            rw = rw * (a / max(a.max(), 1e-300))
            rw = rw / rw.sum() * len(rw)
        else:
            rw = np.maximum(a, 1e-12 * max(a.max(), 1e-300)) ** (p - 2)
        sc = sw * np.sqrt(rw)
        c, *_ = np.linalg.lstsq(V * sc[:, None], fv * sc, rcond=None)
        e = err_of(c)
        val = _lp(e, w, p)
        if val < best:
            best, best_c = val, c
        if it % 10 == 0 or it == budget:
            lower = max(lower, _dual_lower(f, nu, p, err_of(best_c), V, w, fv))
            if best - lower <= rtol * best:
                break
    lower = max(lower, _dual_lower(f, nu, p, err_of(best_c), V, w, fv))
    P = HoloPoly(f.dim, nu, best_c).with_max_degree(f.max_degree)
    return ApproxBracket(float(best), float(min(lower, best)), P, bool(best - lower <= rtol * best), it)


def _dual_lower(f: HoloPoly, nu: int, p: float, e, V, w, fv) -> float:
    q = 1.0 if math.isinf(p) else (math.inf if p == 1 else p / (p - 1))
    probes = []
    pts_vals = fv - V @ np.linalg.lstsq(V * np.sqrt(w)[:, None], fv * np.sqrt(w), rcond=None)[0]
    probes.append(pts_vals)
    a = np.abs(e)
    if math.isinf(p):
        h0 = np.where(a >= a.max() * (1 - 1e-6), np.exp(1j * np.angle(e)), 0)
        probes.append(h0 * (a / a.max()) ** 64)
        probes.append(np.exp(1j * np.angle(e)) * (a / a.max()) ** 16)
    else:
        probes.append(np.exp(1j * np.angle(e)) * a ** (p - 1))
    G = V.conj().T @ (w[:, None] * V)
    best = 0.0
    for h in probes:
        # remove the P_nu component in the discrete inner product
        coef = np.linalg.solve(G, V.conj().T @ (w * h))
        h = h - V @ coef
        den = _lp(h, w, q)
        if den > 0:
            best = max(best, abs(np.sum(w * fv * np.conj(h))) / den)
    return best


def sequence_tail_bound(s, alpha: float, q: float) -> tuple[float, float]:
    """Both sides of the dyadic tail lemma for an eventually-zero sequence.

    ``lhs = || {2^(nu alpha) s_(nu-1)}_(nu>=1) ||_q`` and
    ``rhs = (1 - 2^-alpha)^-1 || {2^(nu alpha) |s_(nu-1) - s_nu|}_(nu>=1) ||_q``.
    """
    if alpha <= 0:
        raise RangeError("alpha must be positive")
    s = np.asarray(s, dtype=complex)
    s = np.concatenate([s, [0.0]])
    nu = np.arange(1, len(s))
    lhs = lq_norm(2.0 ** (nu * alpha) * np.abs(s[:-1]), q)
    rhs = lq_norm(2.0 ** (nu * alpha) * np.abs(s[:-1] - s[1:]), q) / (1 - 2.0 ** (-alpha))
    return lhs, rhs
