"""Registry of verifiable statements.

Each entry pairs a left and a right functional.  ``evaluate(f, params)``
returns ``(lhs, rhs, extra)``; for statements quantified over a grid
(radii, ``delta`` values, blocks) the pair at the worst ratio is returned.

Kinds
-----
equivalence
    ``lhs ~ rhs``: the ratio window across a family must be stable.
inequality
    ``lhs <= C rhs``: the empirical ``C`` must be finite and stable.
constant-free
    ``lhs <= bound * rhs`` with an explicit ``bound``; must hold outright.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import ConfigurationError
from ..holopoly import (
    TangentialOp,
    dilate,
    gradient_norm,
    radial_apply,
    radial_power,
)
from ..lpblocks import block_norms, build_block_basis, sequence_tail_bound
from ..moduli import modulus_dial, modulus_estimate
from ..quad import NormSpec, build_sphere_rule, gauss_jacobi01, phi_seminorm, sphere_mean
from . import functionals as F

__all__ = ["CheckSpec", "REGISTRY", "get_check", "registered_ids", "TINY"]

TINY = 1e-12


@dataclass(frozen=True)
class CheckSpec:
    id: str
    anchor: str
    kind: str
    defaults: dict
    evaluate: Callable
    validate: Callable | None = None
    uses_modulus: bool = False
    bound: float = 1.0
    min_dim: int = 1
    description: str = ""
    tags: tuple = field(default_factory=tuple)

    def resolve(self, params: dict | None, dim: int) -> dict:
        """Merge ``params`` over the defaults and validate hypotheses."""
        params = dict(params or {})
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ConfigurationError(f"{self.id}: unknown parameters {sorted(unknown)}; "
                                     f"accepted: {sorted(self.defaults)}")
        merged = {**self.defaults, **params}
        for key in ("p", "q"):
            if key in merged:
                merged[key] = _as_exponent(merged[key], f"{self.id}: {key}")
        if dim < self.min_dim:
            raise ConfigurationError(f"{self.id}: needs N >= {self.min_dim}, got N={dim}")
        if self.validate is not None:
            self.validate(merged, dim)
        return merged


def _as_exponent(v, what: str) -> float:
    if isinstance(v, str) and v.lower() in ("inf", "infinity"):
        return math.inf
    try:
        v = float(v)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{what} must be a number or 'inf'") from None
    if not v >= 1:
        raise ConfigurationError(f"{what} must lie in [1, inf], got {v}")
    return v


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigurationError(msg)


def _int_param(params, key, lo=1):
    v = params[key]
    _require(float(v) == int(v) and int(v) >= lo, f"{key} must be an integer >= {lo}, got {v}")
    return int(v)


def _radii(lo: float, n: int = 12, gap: float = 1e-3) -> np.ndarray:
    return np.sort(1 - np.geomspace(gap, 1 - lo, n))


def _deltas(n: int = 8, lo: float = 1e-2, hi: float = 0.9) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def _worst(lhs, rhs, grid=None, key="at") -> tuple[float, float, dict]:
    """Pair with the largest ratio; a vanishing right side with a nonzero left side wins."""
    lhs = np.atleast_1d(np.asarray(lhs, dtype=float))
    rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
    bad = (rhs <= TINY) & (lhs > TINY)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(rhs > TINY, lhs / np.where(rhs > TINY, rhs, 1.0), 0.0)
        i = int(np.argmax(ratio))
    extra = {} if grid is None else {key: float(np.atleast_1d(grid)[i])}
    return float(lhs[i]), float(rhs[i]), extra


# ---------------------------------------------------------------------------
# validators


def _v_besov(params, dim):
    _require(params["alpha"] > 0, "alpha must be positive")


def _v_alpha_lt_n(params, dim):
    n = _int_param(params, "n")
    _require(0 < params["alpha"] < n, f"need 0 < alpha < n, got alpha={params['alpha']}, n={n}")


def _v_s_gt_alpha(params, dim):
    _v_besov(params, dim)
    for key in ("s", "s2"):
        if key in params:
            _require(params[key] > params["alpha"], f"need {key} > alpha, got {key}={params[key]}, alpha={params['alpha']}")


def _v_multiplier(params, dim):
    _v_s_gt_alpha(params, dim)
    _require(params["t"] > params["alpha"], f"need t > alpha, got t={params['t']}, alpha={params['alpha']}")


def _v_tangential(params, dim):
    _v_s_gt_alpha(params, dim)
    k = _int_param(params, "k")
    _require(k > 2 * params["alpha"], f"need k > 2 alpha, got k={k}, alpha={params['alpha']}")


def _v_n(params, dim):
    _int_param(params, "n")


def _v_s_int(params, dim):
    _int_param(params, "s")


def _v_a(params, dim):
    _int_param(params, "n")
    _require(params["a"] > -1, f"need a > -1, got {params['a']}")
    _require(not math.isinf(params["q"]), "q must be finite")


def _v_q_finite(params, dim):
    _v_alpha_lt_n(params, dim)
    _require(not math.isinf(params["q"]), "q must be finite")


def _v_hardy1d(params, dim):
    _require(params["alpha"] > 0 and params["beta"] > 0, "need alpha > 0 and beta > 0")
    _require(not math.isinf(params["p"]), "p must be finite")


def _v_phi(params, dim):
    n = _int_param(params, "n")
    _require(0 < params["alpha"] < n, f"need 0 < alpha < n, got alpha={params['alpha']}, n={n}")
    F.check_phi_monotone(F.parse_phi(params["phi"]), params["alpha"])


def _v_window(params, dim):
    _require(params["p"] == 2, "the block multiplier window is exact only for p = 2")


def _v_tail(params, dim):
    _require(params["alpha"] > 0, "alpha must be positive")


# ---------------------------------------------------------------------------
# equivalences


def _lam(f, P, s=None):
    return F.lambda_seminorm(f, P["p"], P["q"], P["alpha"], P["s"] if s is None else s)


def _e_rotation(f, P):
    return _lam(f, P, P["n"]), F.delta_functional(f, P["n"], P["p"], P["q"], P["alpha"]), {}


def _e_modulus(kind):
    def ev(f, P):
        rhs = F.omega_functional(f, P["n"], P["p"], P["q"], P["alpha"], kind, P["budget"], P["seed"],
                                 bool(P["metric"]))
        return _lam(f, P, P["n"]), rhs, {}
    return ev


def _e_dyadic(f, P):
    lhs = abs(complex(f.coef[0])) + _lam(f, P)
    return lhs, F.besov_dyadic_norm(f, P["p"], P["q"], -P["alpha"]), {}


def _e_s_independence(f, P):
    return _lam(f, P, P["s"]), _lam(f, P, P["s2"]), {}


def _multiplier_sequence(t: float, D: int) -> np.ndarray:
    k = np.arange(D + 1, dtype=float)
    lam = np.zeros(D + 1)
    lam[1:] = k[1:] ** t * (1 + 1 / k[1:])
    return lam


def _e_multiplier(f, P):
    lam = _multiplier_sequence(P["t"], f.max_degree)
    lhs = F.multiplier_mixed_norm(f, lam, P["p"], P["q"], P["t"] - P["alpha"])
    return lhs, _lam(f, P), {}


def _e_best_approx(f, P):
    return F.approx_functional(f, P["p"], P["q"], P["alpha"]), _lam(f, P), {}


def _e_tangential(plus):
    def ev(f, P):
        k = int(P["k"])
        prof = lambda r: F.tangential_means(f, k, r, P["p"], plus)  # noqa: E731
        lhs = F.mixed_from_profile(prof, P["p"], P["q"], k / 2 - P["alpha"], f.dim, f.max_degree)
        return lhs, _lam(f, P), {}
    return ev


# ---------------------------------------------------------------------------
# inequalities


def _i_radial_by_gradient(f, P):
    s = int(P["s"])
    r = _radii(0.05)
    lhs = F.means(radial_power(f, s), r, P["p"])
    const = sum(gradient_norm(f, k, np.zeros(f.dim)) for k in range(1, s))
    rhs = const + F.gradient_means(f, s, r, P["p"])
    return _worst(lhs, rhs, r, "r")


def _i_gradient_means(f, P):
    r = _radii(0.25)
    return _worst(F.gradient_means(f, 1, r, P["p"]), F.means(radial_power(f, 1), r, P["p"]), r, "r")


def _i_gradient_hardy(f, P):
    n = int(P["n"])
    return F.gradient_means(f, n, 1.0, P["p"]), F.means(radial_power(f, n), 1.0, P["p"]), {}


def _i_gradient_integral(f, P):
    n, p, q, alpha = int(P["n"]), P["p"], P["q"], P["alpha"]
    a = q * (n - alpha) - 1
    lhs = F.power_weight_integral(lambda u: F.gradient_means(f, n, 1 - u, p) ** q, 1.0, a, 32) ** (1 / q)
    rhs = F.delta_functional(f, n, p, q, alpha)
    return lhs, rhs, {"doublingK": 2.0 ** abs(a)}


def _i_gradient_pointwise(f, P):
    n, p = int(P["n"]), P["p"]
    r = _radii(0.05)
    lhs = F.gradient_means(f, n, r, p)
    rhs = np.array([(1 - ri) ** (-n - 1) * F.power_weight_integral(lambda t: F.delta_norms(f, n, t, p), 1 - ri, 0.0)
                    for ri in r])
    return _worst(lhs, rhs, r, "r")


def _i_modulus_plus_tail(f, P):
    n, p = int(P["n"]), P["p"]
    d = _deltas()
    g = radial_power(f, n)
    lhs = [e.value for e in modulus_dial(f, d, n, p, "plus", P["budget"], P["seed"], bool(P["metric"]))]
    rhs = [F.power_weight_integral(lambda u: F.means(g, 1 - u, p), di, n - 1) for di in d]
    return _worst(lhs, rhs, d, "delta")


def _i_modulus_plus_dilated(f, P):
    n, p = int(P["n"]), P["p"]
    d = _deltas()
    g = radial_power(f, n)
    lhs = [modulus_estimate(dilate(f, 1 - di), di, n, p, "plus", P["budget"], P["seed"], bool(P["metric"])).value
           for di in d]
    rhs = [di ** n * F.means(g, 1 - di, p) for di in d]
    return _worst(lhs, rhs, d, "delta")


_OPS_WEIGHT = {"R": 1.0, "T": 0.5, "Tb": 0.5}


def _apply_word(g, word):
    for tok in reversed(word):
        if tok == "R":
            g = radial_apply(g)
        else:
            g = TangentialOp(0, 1, tok == "Tb").apply(g)
    return g


def _operator_pairs(dim):
    if dim == 1:
        xs, ys = [("R",), ("R", "R")], [(), ("R",)]
    else:
        xs = [("R",), ("T",), ("Tb",), ("R", "T"), ("T", "T")]
        ys = [(), ("R",), ("T",)]
    return [(x, y) for x in xs for y in ys]


def _i_weighted_operators(f, P):
    from ..holopoly import MixedPoly

    p = P["p"]
    r = _radii(0.5, 8)
    rbar = r + (1 - r) / 4
    rule = build_sphere_rule(f.dim, 2 * (f.max_degree + 4), 1 if p == 2 else 2)
    best = (0.0, 1.0, {})
    best_ratio = -1.0
    base = MixedPoly.from_holo(f)
    for x, y in _operator_pairs(f.dim):
        m = sum(_OPS_WEIGHT[t] for t in x)
        Y = _apply_word(base, y)
        XY = _apply_word(Y, x)
        lhs = sphere_mean(XY, r, p, rule) if XY.terms else np.zeros_like(r)
        rhs = (1 - r) ** (-m) * (sphere_mean(Y, rbar, p, rule) if Y.terms else np.zeros_like(r))
        cand = _worst(lhs, rhs, r, "r")
        ratio = math.inf if cand[1] <= TINY and cand[0] > TINY else (cand[0] / cand[1] if cand[1] > TINY else 0.0)
        if ratio > best_ratio:
            best_ratio = ratio
            best = (cand[0], cand[1], {**cand[2], "X": "".join(x) or "I", "Y": "".join(y) or "I", "m": m})
    return best


def _profile_pieces(f):
    """Piecewise-constant profile: value ``||W_j f||_2`` on ``[1 - 2^-j, 1 - 2^-(j+1))``."""
    vals = block_norms(f, 2.0, build_block_basis(max(f.max_degree, 1)))
    edges = 1 - 2.0 ** -np.arange(len(vals) + 1)
    return vals, edges


def _i_hardy_1d(f, P):
    alpha, beta, p = P["alpha"], P["beta"], P["p"]
    vals, edges = _profile_pieces(f)
    a, b = edges[:-1], edges[1:]

    def inner(r):
        r = np.asarray(r, dtype=float)[:, None]
        hi = np.clip(r - a[None, :], 0, None) ** beta - np.clip(r - b[None, :], 0, None) ** beta
        return (hi @ vals) / beta

    x, w = np.polynomial.legendre.leggauss(32)
    lhs = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        rr = (hi - lo) / 2 * x + (hi + lo) / 2
        lhs += (hi - lo) / 2 * float(w @ ((1 - rr) ** (alpha - 1) * inner(rr) ** p))
    top = edges[-1]
    u, wu = gauss_jacobi01(32, alpha - 1, 0.0)
    lhs += (1 - top) ** alpha * float(wu @ inner(1 - (1 - top) * u) ** p)
    e = alpha + beta * p
    rhs = float(np.sum(vals ** p * ((1 - a) ** e - (1 - b) ** e) / e))
    return lhs ** (1 / p), rhs ** (1 / p), {"pieces": int(len(vals))}


def _diff_integrand(f, n, p, q):
    return lambda t: (F.delta_norms(f, n, t, p) / t ** n) ** q


def _i_radial_tail(f, P):
    n, p, q, a = int(P["n"]), P["p"], P["q"], P["a"]
    g = radial_power(f, n)
    r = _radii(0.05, 10)
    lhs = [F.power_weight_integral(lambda u: F.means(g, 1 - u, p) ** q, 1 - ri, a) ** (1 / q) for ri in r]
    rhs = [F.power_weight_integral(_diff_integrand(f, n, p, q), 1 - ri, a) ** (1 / q) for ri in r]
    return _worst(lhs, rhs, r, "r")


def _i_radial_pointwise(f, P):
    n, p, q, a = int(P["n"]), P["p"], P["q"], P["a"]
    g = radial_power(f, n)
    r = _radii(0.05, 10)
    lhs = F.means(g, r, p)
    rhs = [((1 - ri) ** (-a - 1) * F.power_weight_integral(_diff_integrand(f, n, p, q), 1 - ri, a)) ** (1 / q)
           for ri in r]
    return _worst(lhs, rhs, r, "r")


def _i_dilation_tail(f, P):
    n, p = int(P["n"]), P["p"]
    g = radial_power(f, n)
    r = _radii(0.25, 8, 1e-2)
    lhs = [modulus_estimate(f - dilate(f, ri), 1 - ri, n, p, "plus", P["budget"], P["seed"], bool(P["metric"])).value
           for ri in r]
    rhs = [F.power_weight_integral(lambda u: F.means(g, 1 - u, p), 1 - ri, n - 1) for ri in r]
    return _worst(lhs, rhs, r, "r")


def _i_dilation_means(f, P):
    n, p = int(P["n"]), P["p"]
    g = radial_power(f, n)
    r = _radii(0.25, 8, 1e-2)
    lhs = [modulus_estimate(dilate(f, ri), 1 - ri, n, p, "plus", P["budget"], P["seed"], bool(P["metric"])).value
           for ri in r]
    rhs = [(1 - ri) ** n * F.means(g, 1 - (1 - ri) / 2 ** n, p) for ri in r]
    return _worst(lhs, rhs, r, "r")


def _i_hardy_by_integral(f, P):
    n, p = int(P["n"]), P["p"]
    g = radial_power(f, n)
    K = F.power_weight_integral(lambda u: F.means(g, 1 - u, p), 1.0, n - 1, 32)
    return F.means(f, 1.0, p), abs(complex(f.coef[0])) + K, {"K": K}


def _i_phi_inclusion(f, P):
    n, p, q = int(P["n"]), P["p"], P["q"]
    phi = F.parse_phi(P["phi"])
    lhs = F.omega_functional(f, n, p, q, 0.0, "plus", P["budget"], P["seed"], bool(P["metric"]), weight=phi)
    rhs = phi_seminorm(f, NormSpec(p, q, 1.0, phi=phi, n=n))
    return lhs, rhs, {}


# ---------------------------------------------------------------------------
# constant-free


def _c_radial_first_second(f, P):
    return F.means(radial_power(f, 1), 1.0, P["p"]), F.means(radial_power(f, 2), 1.0, P["p"]), {}


def _c_nesting(f, P):
    n, p = int(P["n"]), P["p"]
    d = _deltas(6)
    cols = {k: np.array([e.value for e in modulus_dial(f, d, n, p, k, P["budget"], P["seed"], bool(P["metric"]))])
            for k in ("minus", "unitary", "plus")}
    lhs = np.concatenate([cols["minus"], cols["unitary"]])
    rhs = np.concatenate([cols["unitary"], cols["plus"]])
    return _worst(lhs, rhs, np.concatenate([d, d]), "delta")


def _c_tail_sequence(f, P):
    norms = block_norms(f, P["p"])
    s = np.cumsum(norms[::-1])[::-1]
    lhs, rhs = sequence_tail_bound(s, P["alpha"], P["q"])
    return lhs, rhs, {}


def _c_triangle(f, P):
    return F.means(f, 1.0, P["p"]), float(np.sum(block_norms(f, P["p"]))), {}


def _c_window(f, P):
    s = P["s"]
    basis = build_block_basis(max(f.max_degree, 1))
    a = block_norms(radial_power(f, s), 2.0, basis)
    b = block_norms(f, 2.0, basis)
    nu = np.arange(len(a))
    keep = (nu >= 2) & (b > TINY)
    if not keep.any():
        return 0.0, 1.0, {"minRatio": None, "maxRatio": None}
    ratio = a[keep] / (2.0 ** (nu[keep] * s) * b[keep])
    lim = 2.0 ** (abs(s) + 1)
    worst = float(max((ratio / lim).max(), (1 / (lim * ratio)).max()))
    return worst, 1.0, {"minRatio": float(ratio.min()), "maxRatio": float(ratio.max())}


def _c_monotone(f, P):
    r = np.linspace(0, 1, 41)
    M = np.asarray(F.means(f, r, P["p"]))
    lhs, rhs = M[:-1], M[1:]
    i = int(np.argmax(np.where(rhs > TINY, lhs / np.where(rhs > TINY, rhs, 1), 0)))
    return float(lhs[i]), float(rhs[i]), {"r": float(r[i])}


# ---------------------------------------------------------------------------
# registry

_BESOV = {"p": 2.0, "q": 2.0, "alpha": 0.5}
_MOD = {"budget": 8, "seed": 0, "metric": False}

_SPECS = [
    # equivalences
    CheckSpec("besov-dyadic", "|f(0)| + ||R^s f||_{p,q,s-alpha} ~ ||{2^(nu alpha) ||W_nu*f||_p}||_{l^q}, s > alpha",
              "equivalence", {**_BESOV, "s": 1.0}, _e_dyadic, _v_s_gt_alpha),
    CheckSpec("besov-s-independence", "||R^s f||_{p,q,s-alpha} ~ ||R^s2 f||_{p,q,s2-alpha} for s, s2 > alpha",
              "equivalence", {**_BESOV, "s": 1.0, "s2": 2.0}, _e_s_independence, _v_s_gt_alpha),
    CheckSpec("besov-rotation-differences",
              "||R^n f||_{p,q,n-alpha} ~ (int_0^1 [||Delta^n_t f||_p / t^alpha]^q dt/t)^(1/q), 0 < alpha < n",
              "equivalence", {**_BESOV, "n": 1}, _e_rotation, _v_alpha_lt_n),
    CheckSpec("besov-modulus-minus",
              "||R^n f||_{p,q,n-alpha} ~ (int_0^1 [omega^-_n(delta,f)_p / delta^alpha]^q d delta/delta)^(1/q)",
              "equivalence", {**_BESOV, "n": 1, **_MOD}, _e_modulus("minus"), _v_alpha_lt_n, uses_modulus=True),
    CheckSpec("besov-modulus-unitary",
              "||R^n f||_{p,q,n-alpha} ~ (int_0^1 [omega_n(delta,f)_p / delta^alpha]^q d delta/delta)^(1/q)",
              "equivalence", {**_BESOV, "n": 1, **_MOD}, _e_modulus("unitary"), _v_alpha_lt_n, uses_modulus=True),
    CheckSpec("besov-modulus-plus",
              "||R^n f||_{p,q,n-alpha} ~ (int_0^1 [omega^+_n(delta,f)_p / delta^alpha]^q d delta/delta)^(1/q)",
              "equivalence", {**_BESOV, "n": 1, **_MOD}, _e_modulus("plus"), _v_alpha_lt_n, uses_modulus=True),
    CheckSpec("besov-multiplier",
              "||T f||_{p,q,t-alpha} ~ ||R^s f||_{p,q,s-alpha}, T f_k = k^t (1 + 1/k) f_k, t > alpha",
              "equivalence", {**_BESOV, "s": 1.0, "t": 1.5}, _e_multiplier, _v_multiplier),
    CheckSpec("besov-best-approximation",
              "||{2^(nu alpha) E_{2^nu}(f)_p}||_{l^q} ~ ||R^s f||_{p,q,s-alpha}",
              "equivalence", {**_BESOV, "s": 1.0}, _e_best_approx, _v_s_gt_alpha),
    CheckSpec("besov-tangential",
              "||nabla^k_T f||_{p,q,k/2-alpha} ~ ||R^s f||_{p,q,s-alpha}, k > 2 alpha (C_k words)",
              "equivalence", {"p": 2.0, "q": 2.0, "alpha": 0.75, "s": 1.0, "k": 2}, _e_tangential(False),
              _v_tangential, min_dim=2),
    CheckSpec("besov-tangential-plus",
              "||nabla^k_{T+} f||_{p,q,k/2-alpha} ~ ||R^s f||_{p,q,s-alpha}, k > 2 alpha (C_k^+ words)",
              "equivalence", {"p": 2.0, "q": 2.0, "alpha": 0.75, "s": 1.0, "k": 2}, _e_tangential(True),
              _v_tangential, min_dim=2),
    # inequalities
    CheckSpec("radial-by-gradient", "M_p(r, R^s f) <= C sum_{k<s} nabla_k(f)(0) + M_p(r, nabla_s f)",
              "inequality", {"p": 2.0, "s": 2}, _i_radial_by_gradient, _v_s_int),
    CheckSpec("gradient-by-radial-means", "M_p(r, nabla f) <= C M_p(r, R f), 1/4 < r < 1",
              "inequality", {"p": 2.0}, _i_gradient_means),
    CheckSpec("gradient-by-radial-hardy", "||nabla_n f||_p <= C ||R^n f||_p",
              "inequality", {"p": 2.0, "n": 2}, _i_gradient_hardy, _v_n),
    CheckSpec("gradient-means-by-differences",
              "int_0^1 M_p^q(r, nabla_n f) psi(1-r) dr <= C int_0^1 [t^-n ||Delta^n_t f||_p]^q psi(t) dt, "
              "psi(t) = t^(q(n-alpha)-1)",
              "inequality", {**_BESOV, "n": 1}, _i_gradient_integral, _v_q_finite),
    CheckSpec("gradient-pointwise-by-differences",
              "M_p(r, nabla_n f) <= C (1-r)^(-n-1) int_0^(1-r) ||Delta^n_t f||_p dt",
              "inequality", {"p": 2.0, "n": 1}, _i_gradient_pointwise, _v_n),
    CheckSpec("modulus-plus-by-radial-tail",
              "omega^+_n(delta, f)_p <= C int_(1-delta)^1 M_p(r, R^n f) (1-r)^(n-1) dr",
              "inequality", {"p": 2.0, "n": 1, **_MOD}, _i_modulus_plus_tail, _v_n, uses_modulus=True),
    CheckSpec("modulus-plus-dilated",
              "omega^+_n(delta, f_(1-delta))_p <= C delta^n M_p(1-delta, R^n f)",
              "inequality", {"p": 2.0, "n": 1, **_MOD}, _i_modulus_plus_dilated, _v_n, uses_modulus=True),
    CheckSpec("weighted-operator-means",
              "M_p(r, XY f) <= C (1-r)^-m M_p(r + (1-r)/4, Y f), m = weight of X (R: 1, T, Tbar: 1/2)",
              "inequality", {"p": 2.0}, _i_weighted_operators),
    CheckSpec("hardy-type-1d",
              "int_0^1 (1-r)^(alpha-1) (int_0^r (r-t)^(beta-1) F(t) dt)^p dr <= C int_0^1 (1-r)^(alpha+beta p-1) F(r)^p dr",
              "inequality", {"alpha": 1.0, "beta": 1.0, "p": 2.0}, _i_hardy_1d, _v_hardy1d),
    CheckSpec("radial-tail-by-differences",
              "int_r^1 M_p^q(rho, R^n f)(1-rho)^a d rho <= C int_0^(1-r) [t^-n ||Delta^n_t f||_p]^q t^a dt, a > -1",
              "inequality", {"p": 2.0, "q": 2.0, "n": 1, "a": 0.0}, _i_radial_tail, _v_a),
    CheckSpec("radial-means-by-differences",
              "M_p(r, R^n f) <= C {(1-r)^(-a-1) int_0^(1-r) [t^-n ||Delta^n_t f||_p]^q t^a dt}^(1/q)",
              "inequality", {"p": 2.0, "q": 2.0, "n": 1, "a": 0.0}, _i_radial_pointwise, _v_a),
    CheckSpec("difference-of-dilation-tail",
              "||Delta^n_U (f - f_r)||_p <= C int_r^1 (1-s)^(n-1) M_p(s, R^n f) ds, ||U - I|| < 1 - r",
              "inequality", {"p": 2.0, "n": 1, **_MOD}, _i_dilation_tail, _v_n, uses_modulus=True),
    CheckSpec("difference-means-dilation",
              "M_p(r, Delta^n_U f) <= C (1-r)^n M_p(1 - (1-r)/2^n, R^n f), ||U - I|| < 1 - r",
              "inequality", {"p": 2.0, "n": 1, **_MOD}, _i_dilation_means, _v_n, uses_modulus=True),
    CheckSpec("hardy-by-radial-integral",
              "||f||_p <= C (|f(0)| + K), K = int_0^1 (1-r)^(n-1) M_p(r, R^n f) dr",
              "inequality", {"p": 2.0, "n": 1}, _i_hardy_by_integral, _v_n),
    CheckSpec("phi-inclusion",
              "(int_0^1 [omega^+_n(t,f)_p / phi(t)]^q dt/t)^(1/q) <= C (int_0^1 [M_p(r, R^n f)(1-r)^n / phi(1-r)]^q dr/(1-r))^(1/q), "
              "phi(x)/x^alpha increasing",
              "inequality", {"p": 2.0, "q": 2.0, "n": 1, "alpha": 0.25, "phi": "power:0.5", **_MOD},
              _i_phi_inclusion, _v_phi, uses_modulus=True, tags=("chain",)),
    # constant-free
    CheckSpec("radial-first-by-second", "||R f||_p <= ||R^2 f||_p",
              "constant-free", {"p": 2.0}, _c_radial_first_second),
    CheckSpec("modulus-nesting", "omega^-_n(delta,f)_p <= omega_n(delta,f)_p <= omega^+_n(delta,f)_p",
              "constant-free", {"p": 2.0, "n": 1, **_MOD}, _c_nesting, _v_n, uses_modulus=True),
    CheckSpec("tail-sequence-bound",
              "||{2^(nu alpha) s_(nu-1)}||_{l^q} <= (1 - 2^-alpha)^-1 ||{2^(nu alpha) |s_(nu-1) - s_nu|}||_{l^q}, "
              "s_nu = sum_(k >= nu) ||W_k*f||_p",
              "constant-free", {"p": 2.0, "q": 2.0, "alpha": 0.5}, _c_tail_sequence, _v_tail),
    CheckSpec("block-triangle", "||f||_p <= sum_nu ||W_nu*f||_p",
              "constant-free", {"p": 2.0}, _c_triangle, tags=("chain",)),
    CheckSpec("block-multiplier-window",
              "2^(-|s|-1) <= ||W_nu*R^s f||_2 / (2^(nu s) ||W_nu*f||_2) <= 2^(|s|+1), nu >= 2",
              "constant-free", {"p": 2.0, "s": 1.0}, _c_window, _v_window),
    CheckSpec("monotone-means", "r -> M_p(r, f) is nondecreasing",
              "constant-free", {"p": 2.0}, _c_monotone, bound=1.0 + 1e-10),
]

REGISTRY: dict[str, CheckSpec] = {c.id: c for c in _SPECS}


def registered_ids() -> list[str]:
    return list(REGISTRY)


def get_check(check_id: str) -> CheckSpec:
    try:
        return REGISTRY[check_id]
    except KeyError:
        raise ConfigurationError(f"unknown check id {check_id!r}; registered: {', '.join(REGISTRY)}") from None
