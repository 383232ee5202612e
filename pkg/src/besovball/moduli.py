"""Difference operators and sampled moduli of smoothness.

Three moduli are estimated from below by maximizing ``||Delta^n_U f||_p``
over nested transform sets:

* ``minus``: scalar rotations ``e^{it} I``; the supremum over ``t`` is
  solved as a 1-D optimization;
* ``unitary``: the minus candidates plus seeded unitaries ``exp(i tau H)``;
* ``plus``: the unitary candidates plus seeded contractions.

Every estimate is therefore ordered ``minus <= unitary <= plus``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import linalg, optimize

from .errors import RangeError, ShapeError
from .holopoly import HoloPoly, linear_action
from .quad import SphereRule, sphere_mean, sphere_rule_for

__all__ = [
    "KINDS",
    "ModulusEstimate",
    "rotation_difference",
    "transform_difference",
    "transform_difference_recursive",
    "poly_norms",
    "rotation_max_angle",
    "sample_unitaries",
    "sample_contractions",
    "modulus_estimate",
    "modulus_dial",
    "modulus_table",
    "write_modulus_csv",
    "hardy_sobolev_check",
]

KINDS = ("minus", "unitary", "plus")


@dataclass(frozen=True)
class ModulusEstimate:
    """Sampled lower bound for one modulus at one ``delta``."""

    value: float
    kind: str
    delta: float
    n: int
    p: float
    samples: int
    witness: str = ""
    extra: dict = field(default_factory=dict, compare=False, repr=False)


# ---------------------------------------------------------------------------
# difference operators


def rotation_difference(f: HoloPoly, t: float, n: int) -> HoloPoly:
    """``Delta^n_t f``: the degree-``k`` part is multiplied by ``(e^{ikt} - 1)^n``."""
    if n < 1:
        raise RangeError("difference order must be >= 1")
    k = np.arange(f.max_degree + 1)
    # e^{ikt} - 1 without cancellation for small t
    return f._scaled_by_degree((2j * np.sin(k * t / 2) * np.exp(0.5j * k * t)) ** n)


def _check_matrix(U, dim: int) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.shape != (dim, dim):
        raise ShapeError(f"expected a {dim}x{dim} matrix, got {U.shape}")
    return U


def transform_difference(f: HoloPoly, U, n: int, action: list[np.ndarray] | None = None) -> HoloPoly:
    """``Delta^n_U f = sum_j binom(n, j) (-1)^(n-j) f o U^j``.

    Composition with ``U^j`` acts on each homogeneous block as the ``j``-th
    power of the block matrix ``S_k`` of ``f -> f o U``, so the sum equals
    ``(S_k - I)^n`` applied blockwise.
    """
    if n < 1:
        raise RangeError("difference order must be >= 1")
    U = _check_matrix(U, f.dim)
    if action is None:
        action = linear_action(U, f.dim, f.max_degree)
    coef = np.empty_like(f.coef)
    for k in range(f.max_degree + 1):
        sl = f.basis.block(k)
        c = f.coef[sl]
        for _ in range(n):
            c = action[k] @ c - c
        coef[sl] = c
    return HoloPoly(f.dim, f.max_degree, coef)


def transform_difference_recursive(f: HoloPoly, U, n: int) -> HoloPoly:
    """Reference path: ``Delta^1_U (Delta^(n-1)_U f)`` with explicit compositions."""
    from .holopoly import compose_linear

    U = _check_matrix(U, f.dim)
    g = f
    for _ in range(n):
        g = compose_linear(g, U) - g
    return g


def poly_norms(polys: Sequence[HoloPoly], p: float, rule: SphereRule | None = None) -> np.ndarray:
    """``||g||_p`` for a list of equally shaped polynomials.

    ``p = 2`` without an explicit rule uses the exact moment formula.
    """
    polys = list(polys)
    if not polys:
        return np.zeros(0)
    if p == 2 and rule is None:
        return np.array([g.h2_norm() for g in polys])
    if rule is None:
        rule = sphere_rule_for(polys[0], p)
    out = []
    step = 64
    for i in range(0, len(polys), step):
        out.append(np.atleast_1d(sphere_mean(polys[i:i + step], 1.0, p, rule)))
    return np.concatenate(out)


# ---------------------------------------------------------------------------
# transform samplers


def rotation_max_angle(delta: float, metric: bool = False) -> float:
    """Largest admissible ``|t|`` for the minus kind.

    The default is the raw constraint ``|t| < delta``; with ``metric=True``
    the constraint is ``||e^{it} I - I|| = 2|sin(t/2)| < delta``.
    """
    if metric:
        return 2 * math.asin(min(delta, 2.0) / 2)
    return min(delta, math.pi)


def _random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    H = (A + A.conj().T) / 2
    return H / np.linalg.norm(H, 2)


def sample_unitaries(dim: int, delta: float, budget: int, seed: int) -> list[np.ndarray]:
    """Seeded unitaries ``exp(i tau H)`` with ``||U - I|| < delta``.

    Sample ``i`` depends only on ``(seed, i)``, so a larger budget extends
    the list without changing its prefix.  ``H`` is Hermitian with operator
    norm 1, hence ``||U - I|| = 2 sin(tau/2)``; ``tau`` is drawn with density
    skewed toward its upper limit.
    """
    tau_max = 2 * math.asin(min(delta, 2.0) / 2)
    out = []
    for i in range(budget):
        rng = np.random.default_rng([seed, 0, i])
        H = _random_hermitian(rng, dim)
        u = rng.random() ** 0.25
        out.append(linalg.expm(1j * u * tau_max * (1 - 1e-12) * H))
    return out


def sample_contractions(dim: int, delta: float, budget: int, seed: int) -> list[np.ndarray]:
    """Seeded contractions ``A`` with ``||A - I|| < delta``.

    Alternates two shapes: scaled unitaries ``rho exp(i tau H)`` with ``tau``
    limited so that ``|rho e^{i tau} - 1| < delta``, and ``I + s (V D - I)``
    with ``V`` unitary and ``D`` a diagonal contraction, where ``s`` enforces
    the distance bound (a convex combination of contractions stays one).
    """
    d = min(delta, 2.0)
    out = []
    for i in range(budget):
        rng = np.random.default_rng([seed, 1, i])
        H = _random_hermitian(rng, dim)
        if i % 2 == 0:
            rho = 1 - rng.random() * min(d, 1.0) * (1 - 1e-9)
            c = (rho * rho + 1 - d * d) / (2 * rho)
            tau_max = math.acos(max(-1.0, min(1.0, c)))
            tau = rng.random() ** 0.5 * tau_max * (1 - 1e-9)
            A = rho * linalg.expm(1j * tau * H)
        else:
            V = linalg.expm(1j * math.pi * rng.random() * H)
            D = np.diag(1 - rng.random(dim) * min(d, 1.0))
            B = V @ D
            dist = np.linalg.norm(B - np.eye(dim), 2)
            s = min(1.0, 0.999 * d / dist) if dist > 0 else 1.0
            A = np.eye(dim) + s * (B - np.eye(dim))
        out.append(A)
    return out


# ---------------------------------------------------------------------------
# estimators


def _minus_sup(f: HoloPoly, t_max: float, n: int, p: float, rule, n_grid: int) -> tuple[float, float]:
    ts = np.linspace(-t_max, t_max, 2 * n_grid + 1)
    vals = poly_norms([rotation_difference(f, t, n) for t in ts], p, rule)
    i = int(np.argmax(vals))
    best, arg = float(vals[i]), float(ts[i])
    if 0 < i < len(ts) - 1:
        fn = lambda t: -float(poly_norms([rotation_difference(f, t, n)], p, rule)[0])  # noqa: E731
        res = optimize.minimize_scalar(fn, bounds=(ts[i - 1], ts[i + 1]), method="bounded",
                                       options={"xatol": 1e-12})
        if -res.fun > best:
            best, arg = float(-res.fun), float(res.x)
    return best, arg


@lru_cache(maxsize=256)
def _sample_set(family: str, dim: int, max_degree: int, delta: float, budget: int, seed: int):
    sampler = sample_unitaries if family == "unitary" else sample_contractions
    mats = sampler(dim, delta, budget, seed)
    return mats, [linear_action(U, dim, max_degree) for U in mats]


def _best_of(f: HoloPoly, family: str, delta: float, budget: int, seed: int, n: int, p: float,
             rule) -> tuple[float, int, list]:
    mats, actions = _sample_set(family, f.dim, f.max_degree, float(delta), budget, seed)
    diffs = [transform_difference(f, U, n, A) for U, A in zip(mats, actions)]
    vals = poly_norms(diffs, p, rule)
    i = int(np.argmax(vals))
    return float(vals[i]), i, mats


def _fmt_matrix(A: np.ndarray) -> str:
    return np.array2string(np.round(A, 6), separator=",", max_line_width=10 ** 6).replace("\n", "")


def modulus_estimate(f: HoloPoly, delta: float, n: int = 1, p: float = 2.0, kind: str = "unitary",
                     budget: int = 16, seed: int = 0, metric: bool = False,
                     rule: SphereRule | None = None, n_grid: int = 32) -> ModulusEstimate:
    """Lower bound for ``omega_n^kind(delta, f)_p``.

    Parameters
    ----------
    delta : float
        Radius of the transform neighborhood; values ``>= 2`` are clamped.
    kind : {"minus", "unitary", "plus"}
    budget : int
        Number of random transforms per sampled family.
    metric : bool
        Use ``2|sin(t/2)| < delta`` instead of ``|t| < delta`` for rotations.
    """
    if kind not in KINDS:
        raise RangeError(f"kind must be one of {KINDS}, got {kind!r}")
    if not delta > 0:
        raise RangeError("delta must be positive")
    if budget < 1:
        raise RangeError("budget must be >= 1")
    if n < 1:
        raise RangeError("difference order must be >= 1")
    if delta >= 2:
        warnings.warn("delta >= 2 clamped: ||U - I|| <= 2 for every unitary U", RuntimeWarning)
        delta = 2.0
    if f.truncate(0) == f:
        return ModulusEstimate(0.0, kind, delta, n, p, 0, "constant")

    t_max = rotation_max_angle(delta, metric)
    best, t_arg = _minus_sup(f, t_max, n, p, rule, n_grid)
    witness = f"rotation t={t_arg:.12g}"
    samples = 2 * n_grid + 1
    if kind in ("unitary", "plus"):
        val, i, mats = _best_of(f, "unitary", delta, budget, seed, n, p, rule)
        samples += len(mats)
        if val > best:
            best, witness = val, f"unitary #{i} {_fmt_matrix(mats[i])}"
    if kind == "plus":
        val, i, mats = _best_of(f, "plus", delta, budget, seed, n, p, rule)
        samples += len(mats)
        if val > best:
            best, witness = val, f"contraction #{i} {_fmt_matrix(mats[i])}"
    return ModulusEstimate(best, kind, delta, n, p, samples, witness)


def modulus_dial(f: HoloPoly, deltas: Sequence[float], n: int = 1, p: float = 2.0, kind: str = "unitary",
                 budget: int = 16, seed: int = 0, metric: bool = False,
                 rule: SphereRule | None = None) -> list[ModulusEstimate]:
    """Estimates on an increasing ``delta`` grid, made nondecreasing.

    A transform admissible for ``delta`` is admissible for every larger
    ``delta``, so the running maximum is still a valid lower bound.
    """
    deltas = [float(d) for d in deltas]
    if any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise RangeError("delta grid must be strictly increasing")
    out = []
    run = None
    for d in deltas:
        est = modulus_estimate(f, d, n, p, kind, budget, seed, metric, rule)
        if run is not None and run.value > est.value:
            est = ModulusEstimate(run.value, kind, est.delta, n, p, est.samples + run.samples,
                                  f"{run.witness} (from delta={run.delta:.6g})")
        out.append(est)
        run = est
    return out


def modulus_table(f: HoloPoly, deltas: Sequence[float], n: int = 1, p: float = 2.0, budget: int = 16,
                  seed: int = 0, metric: bool = False, rule: SphereRule | None = None) -> list[tuple]:
    """Rows ``(delta, minus, unitary, plus)``; nesting holds row by row."""
    cols = {k: modulus_dial(f, deltas, n, p, k, budget, seed, metric, rule) for k in KINDS}
    rows = []
    for i, d in enumerate(deltas):
        m, u, pl = (cols[k][i].value for k in KINDS)
        u = max(u, m)
        rows.append((float(d), m, u, max(pl, u)))
    return rows


def write_modulus_csv(rows: Sequence[tuple], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["delta", "minus", "unitary", "plus"])
        for r in rows:
            w.writerow([repr(float(x)) for x in r])


def hardy_sobolev_check(f: HoloPoly, n: int = 1, p: float = 2.0, budget: int = 8,
                        deltas: Sequence[float] | None = None, kind: str = "unitary",
                        exponent: float | None = None, seed: int = 0,
                        rule: SphereRule | None = None) -> dict:
    """Growth of ``omega_n(delta, f)_p`` against ``delta^exponent`` (default ``exponent = n``).

    Returns the fitted log-log slope on the smaller half of the grid, the
    supremum of ``omega / delta^exponent`` and the raw table.
    """
    if deltas is None:
        deltas = np.geomspace(1e-3, 0.5, 12)
    deltas = np.asarray(deltas, dtype=float)
    if exponent is None:
        exponent = n
    ests = modulus_dial(f, deltas, n, p, kind, budget, seed, rule=rule)
    vals = np.array([e.value for e in ests])
    ratios = vals / deltas ** exponent
    half = max(2, len(deltas) // 2)
    pos = vals[:half] > 0
    if pos.sum() >= 2:
        slope = float(np.polyfit(np.log(deltas[:half][pos]), np.log(vals[:half][pos]), 1)[0])
    else:
        slope = math.nan
    return {
        "deltas": deltas.tolist(),
        "values": vals.tolist(),
        "ratios": ratios.tolist(),
        "ratio_sup": float(ratios.max()) if len(ratios) else 0.0,
        "slope": slope,
        "exponent": float(exponent),
    }
