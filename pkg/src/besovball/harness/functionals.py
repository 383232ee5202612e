"""Scalar functionals of a polynomial used on either side of the registered checks.

For ``p = 2`` and holomorphic integrands the integral means are computed
from the coefficient moments; every other case goes through sphere
quadrature.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable

import numpy as np
from scipy import optimize

from ..errors import ConfigurationError, WeightError
from ..holopoly import HoloPoly, derivative, radial_power, tangential_compositions
from ..lpblocks import DyadicNormSpec, best_approx_general, best_approx_l2, dyadic_norm, lq_norm
from ..moduli import modulus_dial, poly_norms, rotation_difference
from ..quad import (
    build_sphere_rule,
    combined_means,
    gauss_jacobi01,
    integrate_dt_over_t,
    mixed_norm_profile,
    sphere_mean,
    sphere_rule_for,
)

__all__ = [
    "means",
    "gradient_means",
    "tangential_means",
    "mixed_from_profile",
    "lambda_seminorm",
    "multiplier_mixed_norm",
    "delta_norms",
    "delta_functional",
    "omega_functional",
    "approx_sequence",
    "approx_functional",
    "power_weight_integral",
    "sup_on_unit_interval",
    "parse_phi",
    "check_phi_monotone",
    "besov_dyadic_norm",
]


def _scalar_or_array(r, out):
    out = np.asarray(out, dtype=float)
    return float(out) if np.ndim(r) == 0 else out


def means(g: HoloPoly, r, p: float, rule=None):
    """``M_p(r, g)``; exact for ``p = 2`` when no rule is forced."""
    r_arr = np.asarray(r, dtype=float)
    if p == 2 and rule is None:
        h = g.homogeneous_norms() ** 2
        k = np.arange(len(h))
        return _scalar_or_array(r, np.sqrt(r_arr[..., None] ** (2 * k) @ h))
    if rule is None:
        rule = sphere_rule_for(g, p)
    return sphere_mean(g, r_arr, p, rule) if np.ndim(r) else float(sphere_mean(g, float(r), p, rule))


def _derivative_terms(f: HoloPoly, n: int):
    out = []
    for combo in itertools.combinations_with_replacement(range(f.dim), n):
        orders = np.bincount(combo, minlength=f.dim)
        mult = math.factorial(n) / np.prod([math.factorial(o) for o in orders])
        out.append((mult, derivative(f, orders)))
    return out


def gradient_means(f: HoloPoly, n: int, r, p: float, rule=None):
    """``M_p(r, nabla_n f)`` where ``nabla_n f`` is the l2 norm of all order-``n`` partials."""
    terms = _derivative_terms(f, n)
    if p == 2 and rule is None:
        tot = sum(m * np.asarray(means(g, r, 2.0)) ** 2 for m, g in terms)
        return _scalar_or_array(r, np.sqrt(tot))
    if rule is None:
        rule = build_sphere_rule(f.dim, 2 * f.max_degree, 2)
    mults = np.array([m for m, _ in terms])

    def combine(*vals):
        return np.sqrt(sum(m * np.abs(v) ** 2 for m, v in zip(mults, vals)))

    out = combined_means([g for _, g in terms], rule, np.atleast_1d(r), p, combine)
    return _scalar_or_array(r, out if np.ndim(r) else out[0])


def _distinct_up_to_sign(polys):
    """Group mixed polynomials equal up to a global sign; returns ``(polys, counts)``."""
    keys, reps, counts = {}, [], []
    for g in polys:
        items = sorted(g.terms.items())
        lead = items[0][1]
        sign = -1.0 if (lead.real, lead.imag) < (0.0, 0.0) else 1.0
        key = tuple((k, complex(round((sign * v).real, 12), round((sign * v).imag, 12))) for k, v in items)
        if key in keys:
            counts[keys[key]] += 1
        else:
            keys[key] = len(reps)
            reps.append(g)
            counts.append(1)
    return reps, np.array(counts, dtype=float)


def tangential_means(f: HoloPoly, k: int, r, p: float, plus: bool = False, rule=None):
    """``M_p(r, nabla^k_T f)`` with ``nabla^k_T f = sum_delta |T_delta f|`` (``C_k^+`` if ``plus``).

    Words whose images agree up to sign are merged with multiplicity.
    """
    if f.dim < 2:
        raise ConfigurationError("tangential derivatives need N >= 2")
    polys = [g for _, g in tangential_compositions(f, k, plus)]
    polys = [g for g in polys if g.terms]
    if not polys:
        return _scalar_or_array(r, np.zeros(np.shape(r)))
    polys, counts = _distinct_up_to_sign(polys)
    if rule is None:
        # a single |g|^2 is a polynomial: the plain rule is exact for p = 2
        over = 1 if (p == 2 and len(polys) == 1) else 2
        rule = build_sphere_rule(f.dim, 2 * (f.max_degree + k), over)

    def combine(*vals):
        return sum(c * np.abs(v) for c, v in zip(counts, vals))

    out = combined_means(polys, rule, np.atleast_1d(r), p, combine)
    return _scalar_or_array(r, out if np.ndim(r) else out[0])


def _n_radial(D: int) -> int:
    return max(24, D // 2 + 16)


def mixed_from_profile(profile: Callable, p: float, q: float, alpha: float, dim: int, max_degree: int) -> float:
    """``|| . ||_{p,q,alpha}`` of a function given by its radial profile."""
    return mixed_norm_profile(profile, p, q, alpha, dim, _n_radial(max_degree))


def lambda_seminorm(f: HoloPoly, p: float, q: float, alpha: float, s: float, rule=None) -> float:
    """``||R^s f||_{p,q,s-alpha}``."""
    g = radial_power(f, s)
    if g.is_zero():
        return 0.0
    return mixed_from_profile(lambda r: means(g, r, p, rule), p, q, s - alpha, f.dim, f.max_degree)


def multiplier_mixed_norm(f: HoloPoly, lam, p: float, q: float, alpha: float, rule=None) -> float:
    """``||T f||_{p,q,alpha}`` for the coefficient multiplier ``lam_k``."""
    g = f._scaled_by_degree(np.asarray(lam)[: f.max_degree + 1])
    if g.is_zero():
        return 0.0
    return mixed_from_profile(lambda r: means(g, r, p, rule), p, q, alpha, f.dim, f.max_degree)


def besov_dyadic_norm(f: HoloPoly, p: float, q: float, beta: float, rule=None) -> float:
    return dyadic_norm(f, DyadicNormSpec(p, q, beta), rule=rule)


# ---------------------------------------------------------------------------
# rotation differences and moduli


def delta_norms(f: HoloPoly, n: int, ts, p: float, rule=None) -> np.ndarray:
    """``||Delta^n_t f||_p`` for an array of ``t``."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if p == 2 and rule is None:
        h = f.homogeneous_norms() ** 2
        k = np.arange(len(h))
        mult = np.abs(2 * np.sin(np.outer(ts, k) / 2)) ** (2 * n)
        return np.sqrt(mult @ h)
    return poly_norms([rotation_difference(f, t, n) for t in ts], p, rule or sphere_rule_for(f, p))


def sup_on_unit_interval(fn: Callable, t_min: float = 1e-8, n_grid: int = 120) -> float:
    """``sup_{0 < t <= 1} fn(t)`` on a log grid refined by bounded minimization."""
    t = np.geomspace(t_min, 1.0, n_grid)
    vals = np.asarray(fn(t), dtype=float)
    i = int(np.argmax(vals))
    best = float(vals[i])
    if 0 < i < len(t) - 1:
        res = optimize.minimize_scalar(lambda x: -float(np.asarray(fn(np.array([x])))[0]),
                                       bounds=(t[i - 1], t[i + 1]), method="bounded",
                                       options={"xatol": 1e-12})
        best = max(best, float(-res.fun))
    return best


def delta_functional(f: HoloPoly, n: int, p: float, q: float, alpha: float, rule=None) -> float:
    """``(int_0^1 [||Delta^n_t f||_p / t^alpha]^q dt/t)^(1/q)``, or the sup for ``q = inf``."""
    h = lambda t: delta_norms(f, n, t, p, rule) / t ** alpha  # noqa: E731
    if math.isinf(q):
        return sup_on_unit_interval(h)
    return integrate_dt_over_t(lambda t: h(t) ** q) ** (1.0 / q)


def _log_gauss(delta_min: float, n_nodes: int):
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    a, b = math.log(delta_min), 0.0
    s = (b - a) / 2 * x + (a + b) / 2
    return np.exp(s), (b - a) / 2 * w


def omega_functional(f: HoloPoly, n: int, p: float, q: float, alpha: float, kind: str = "unitary",
                     budget: int = 8, seed: int = 0, metric: bool = False, n_nodes: int = 12,
                     delta_min: float = 1e-3, rule=None, weight: Callable | None = None) -> float:
    """``(int_0^1 [omega_n^kind(delta, f)_p / w(delta)]^q d delta/delta)^(1/q)``.

    ``w(delta) = delta^alpha`` unless ``weight`` is given.  The integral over
    ``[delta_min, 1]`` uses Gauss-Legendre nodes in ``log delta``; below
    ``delta_min`` the modulus is extended as ``omega(delta_min) (delta/delta_min)^n``,
    the exact small-``delta`` order of a polynomial.  ``q = inf`` takes the
    maximum over the nodes.
    """
    if weight is None:
        weight = lambda d: np.asarray(d, dtype=float) ** alpha  # noqa: E731
    nodes, w = _log_gauss(delta_min, n_nodes)
    grid = np.concatenate([[delta_min], nodes])
    ests = modulus_dial(f, grid, n, p, kind, budget, seed, metric, rule)
    om = np.array([e.value for e in ests])
    vals = om / weight(grid)
    if math.isinf(q):
        return float(vals.max())
    om0 = om[0]
    tail = integrate_dt_over_t(lambda u: (om0 * u ** n / weight(delta_min * u)) ** q)
    return float((w @ vals[1:] ** q + tail) ** (1.0 / q))


# ---------------------------------------------------------------------------
# best approximation


def approx_sequence(f: HoloPoly, p: float, rule=None, budget: int = 60) -> np.ndarray:
    """``E_{2^nu}(f)_p`` for ``nu = 0, 1, ...`` while ``2^nu < max_degree``.

    ``p = 2`` is exact; otherwise the upper end of the bracket is used.
    """
    out = []
    nu = 0
    while 2 ** nu < f.max_degree:
        if p == 2:
            out.append(best_approx_l2(f, 2 ** nu)[0])
        else:
            out.append(best_approx_general(f, 2 ** nu, p, rule, budget=budget).upper)
        nu += 1
    return np.array(out)


def approx_functional(f: HoloPoly, p: float, q: float, alpha: float, rule=None) -> float:
    """``|| {2^(nu alpha) E_{2^nu}(f)_p}_nu ||_{l^q}``."""
    E = approx_sequence(f, p, rule)
    return lq_norm(2.0 ** (alpha * np.arange(len(E))) * E, q)


# ---------------------------------------------------------------------------
# one-dimensional integrals and weights


def power_weight_integral(fn: Callable, T: float, a: float, n: int = 24) -> float:
    """``int_0^T fn(u) u^a du`` by Gauss-Jacobi (``a > -1``)."""
    if T <= 0:
        return 0.0
    x, w = gauss_jacobi01(n, a, 0.0)
    return float(T ** (a + 1) * (w @ np.asarray(fn(T * x), dtype=float)))


def parse_phi(spec) -> Callable:
    """Weight ``phi`` from a spec string.

    ``"power:b"`` gives ``t^b``; ``"powerlog:b:c"`` gives ``t^b (1 + log(1/t))^c``.
    Callables pass through.
    """
    if callable(spec):
        return spec
    parts = str(spec).split(":")
    try:
        if parts[0] == "power" and len(parts) == 2:
            b = float(parts[1])
            return lambda t: np.asarray(t, dtype=float) ** b
        if parts[0] == "powerlog" and len(parts) == 3:
            b, c = float(parts[1]), float(parts[2])
            return lambda t: np.asarray(t, dtype=float) ** b * (1 - np.log(np.asarray(t, dtype=float))) ** c
    except ValueError:
        pass
    raise ConfigurationError(f"unrecognized phi spec {spec!r}; use 'power:b' or 'powerlog:b:c'")


def check_phi_monotone(phi: Callable, alpha: float, n_grid: int = 400) -> None:
    """Require ``phi > 0`` and ``x -> phi(x)/x^alpha`` nondecreasing on a grid of (0, 1]."""
    x = np.geomspace(1e-6, 1.0, n_grid)
    v = np.asarray(phi(x), dtype=float)
    if np.any(~(v > 0)):
        raise WeightError("phi must be positive on (0, 1]")
    ratio = v / x ** alpha
    if np.any(np.diff(ratio) < -1e-12 * np.abs(ratio[1:])):
        raise ConfigurationError(f"phi(x)/x^{alpha:g} is not increasing on (0, 1]")
