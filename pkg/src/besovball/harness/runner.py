"""Run registered checks over families and render verdicts and reports."""

from __future__ import annotations

import csv
import json
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError
from .checks import TINY, CheckSpec, get_check, registered_ids
from .families import TestFamily

__all__ = [
    "CheckResult",
    "DEFAULT_TOLERANCE",
    "CONSTANT_FREE_SLACK",
    "evaluate_family",
    "run_check",
    "check_equivalence",
    "check_inequality",
    "check_constant_free",
    "check_membership_chain",
    "default_suite",
    "run_suite",
    "suite_exit_code",
    "report_json",
    "write_report",
    "available_jobs",
]

DEFAULT_TOLERANCE = 0.25
# relative slack for constant-free bounds: absorbs rounding in equality cases only
CONSTANT_FREE_SLACK = 1e-12


@dataclass
class CheckResult:
    """Outcome of one check.

    ``runs`` holds one entry per evaluation setting (base degree, doubled
    degree, doubled budget) with its per-function ``(lhs, rhs)`` values and
    ratio statistics.  ``stats`` summarizes the drift numbers the verdict
    is based on.
    """

    check_id: str
    anchor: str
    kind: str
    params: dict
    family: dict
    runs: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    verdict: str = "pass"
    reason: str = ""
    parts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def per_function(self) -> list[dict]:
        rows = []
        for run in self.runs:
            for row in run["rows"]:
                rows.append({"run": run["label"], "degree": run["degree"], "budget": run["budget"], **row})
        return rows

    def to_dict(self) -> dict:
        d = {
            "id": self.check_id,
            "anchor": self.anchor,
            "kind": self.kind,
            "params": _jsonable(self.params),
            "family": self.family,
            "perFunction": _jsonable(self.per_function()),
            "ratioStats": _jsonable(self.stats),
            "verdict": self.verdict,
            "reason": self.reason,
        }
        if self.parts:
            d["parts"] = [p.to_dict() for p in self.parts]
        return d


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


# ---------------------------------------------------------------------------
# evaluation


def _eval_chunk(check_id: str, params: dict, polys: list) -> list:
    spec = get_check(check_id)
    return [spec.evaluate(f, params) for f in polys]


def evaluate_family(spec: CheckSpec, params: dict, polys: list, jobs: int = 1) -> list[tuple]:
    """``(lhs, rhs, extra)`` per function, in family order.

    With ``jobs > 1`` contiguous chunks go to worker processes; results are
    merged by index, so the output does not depend on ``jobs``.
    """
    if jobs <= 1 or len(polys) <= 1:
        return _eval_chunk(spec.id, params, polys)
    jobs = min(jobs, len(polys))
    bounds = np.linspace(0, len(polys), jobs + 1).round().astype(int)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futs = [pool.submit(_eval_chunk, spec.id, params, polys[a:b]) for a, b in zip(bounds[:-1], bounds[1:])]
        out = []
        for fut in futs:
            out.extend(fut.result())
    return out


def _rows(triples) -> list[dict]:
    rows = []
    for i, (lhs, rhs, extra) in enumerate(triples):
        lhs, rhs = float(lhs), float(rhs)
        excluded = lhs < TINY and rhs < TINY
        if excluded:
            ratio = math.nan
        elif rhs <= TINY:
            ratio = math.inf
        else:
            ratio = lhs / rhs
        rows.append({"index": i, "lhs": lhs, "rhs": rhs, "ratio": ratio, "excluded": excluded,
                     "extra": _jsonable(extra)})
    return rows


def _run_stats(rows) -> dict:
    ratios = [r["ratio"] for r in rows if not r["excluded"]]
    st = {"count": len(rows), "excluded": len(rows) - len(ratios)}
    if ratios:
        st.update(min=min(ratios), max=max(ratios), median=statistics.median(ratios))
        lo, hi = st["min"], st["max"]
        st["window"] = hi / lo if lo > 0 and math.isfinite(hi) else math.inf
    else:
        st.update(min=None, max=None, median=None, window=None)
    st["hardFailures"] = sum(1 for r in rows if not r["excluded"] and math.isinf(r["ratio"]))
    return st


def _run(spec, params, family: TestFamily, label, jobs) -> dict:
    polys = family.generate()
    rows = _rows(evaluate_family(spec, params, polys, jobs))
    return {"label": label, "degree": family.max_degree, "budget": params.get("budget"),
            "rows": rows, "stats": _run_stats(rows)}


def _drift(a, b) -> float:
    if a is None or b is None:
        return 0.0
    if a == b:
        return 0.0
    if not (math.isfinite(a) and math.isfinite(b)) or a <= 0:
        return math.inf
    return abs(b / a - 1)


def _new_result(spec, params, family) -> CheckResult:
    return CheckResult(spec.id, spec.anchor, spec.kind, dict(params), family.to_dict())


def _verdict(res: CheckResult, verdict: str, reason: str) -> CheckResult:
    res.verdict, res.reason = verdict, reason
    return res


def _prepare(check_id, family: TestFamily, params, kind=None):
    spec = get_check(check_id)
    if kind is not None and spec.kind not in kind:
        raise ConfigurationError(f"{check_id} is a {spec.kind} check")
    return spec, spec.resolve(params, family.dim)


def check_equivalence(check_id: str, family: TestFamily, params: dict | None = None,
                      tolerance: float = DEFAULT_TOLERANCE, jobs: int = 1) -> CheckResult:
    """Ratio-window stability of ``lhs ~ rhs`` when the truncation degree doubles."""
    spec, P = _prepare(check_id, family, params, ("equivalence",))
    res = _new_result(spec, P, family)
    base = _run(spec, P, family, "base", jobs)
    doubled = _run(spec, P, family.with_degree(2 * family.max_degree), "degree x2", jobs)
    res.runs = [base, doubled]
    w1, w2 = base["stats"]["window"], doubled["stats"]["window"]
    res.stats = {"window": w1, "windowDoubled": w2, "driftDegree": _drift(w1, w2), "tolerance": tolerance,
                 "min": base["stats"]["min"], "max": base["stats"]["max"], "median": base["stats"]["median"],
                 "excluded": base["stats"]["excluded"]}
    for run in res.runs:
        if run["stats"]["hardFailures"] or (run["stats"]["min"] is not None and run["stats"]["min"] <= 0):
            return _verdict(res, "fail", f"{run['label']}: one side vanishes while the other does not")
    if w1 is None:
        return _verdict(res, "pass", "all functions degenerate")
    if not res.stats["driftDegree"] < tolerance:
        return _verdict(res, "fail", f"window drift {res.stats['driftDegree']:.3g} >= {tolerance}")
    return _verdict(res, "pass", "")


def check_inequality(check_id: str, family: TestFamily, params: dict | None = None,
                     tolerance: float = DEFAULT_TOLERANCE, jobs: int = 1) -> CheckResult:
    """Finite empirical constant, stable under degree doubling and budget doubling."""
    spec, P = _prepare(check_id, family, params, ("inequality",))
    res = _new_result(spec, P, family)
    runs = [_run(spec, P, family, "base", jobs),
            _run(spec, P, family.with_degree(2 * family.max_degree), "degree x2", jobs)]
    if spec.uses_modulus:
        runs.append(_run(spec, {**P, "budget": 2 * int(P["budget"])}, family, "budget x2", jobs))
    res.runs = runs
    c = [r["stats"]["max"] for r in runs]
    res.stats = {"constant": c[0], "constantDegree": c[1], "driftDegree": _drift(c[0], c[1]),
                 "tolerance": tolerance, "min": runs[0]["stats"]["min"], "median": runs[0]["stats"]["median"],
                 "excluded": runs[0]["stats"]["excluded"]}
    if spec.uses_modulus:
        res.stats.update(constantBudget=c[2], driftBudget=_drift(c[0], c[2]))
    for run in runs:
        if run["stats"]["hardFailures"]:
            return _verdict(res, "hard-fail", f"{run['label']}: rhs = 0 with lhs > 0")
    drifts = {k: v for k, v in res.stats.items() if k.startswith("drift")}
    bad = {k: v for k, v in drifts.items() if not v < tolerance}
    if bad:
        return _verdict(res, "fail", ", ".join(f"{k} {v:.3g} >= {tolerance}" for k, v in bad.items()))
    return _verdict(res, "pass", "")


def check_constant_free(check_id: str, family: TestFamily, params: dict | None = None,
                        jobs: int = 1, **_) -> CheckResult:
    """``lhs <= bound * rhs`` for every function, with no fitted constant."""
    spec, P = _prepare(check_id, family, params, ("constant-free",))
    res = _new_result(spec, P, family)
    run = _run(spec, P, family, "base", jobs)
    res.runs = [run]
    c = run["stats"]["max"]
    res.stats = {"constant": c, "bound": spec.bound, "min": run["stats"]["min"],
                 "median": run["stats"]["median"], "excluded": run["stats"]["excluded"]}
    if run["stats"]["hardFailures"]:
        return _verdict(res, "hard-fail", "rhs = 0 with lhs > 0")
    if c is not None and not c <= spec.bound * (1 + CONSTANT_FREE_SLACK):
        return _verdict(res, "fail", f"constant {c!r} exceeds {spec.bound!r}")
    return _verdict(res, "pass", "")


_DISPATCH = {"equivalence": check_equivalence, "inequality": check_inequality, "constant-free": check_constant_free}


def run_check(check_id: str, family: TestFamily, params: dict | None = None,
              tolerance: float = DEFAULT_TOLERANCE, jobs: int = 1) -> CheckResult:
    spec = get_check(check_id)
    return _DISPATCH[spec.kind](check_id, family, params, tolerance=tolerance, jobs=jobs)


def check_membership_chain(family: TestFamily, params: dict | None = None,
                           tolerance: float = DEFAULT_TOLERANCE, jobs: int = 1) -> CheckResult:
    """Block triangle inequality (outright) and the ``phi`` inclusion (stable constant).

    ``params`` feeds both parts; ``p`` is shared, the rest goes to the
    ``phi`` inclusion.  The ``phi`` monotonicity precondition is checked
    before anything is computed.
    """
    params = dict(params or {})
    phi_spec = get_check("phi-inclusion")
    phi_params = {k: v for k, v in params.items() if k in phi_spec.defaults}
    phi_spec.resolve(phi_params, family.dim)
    tri_params = {k: v for k, v in params.items() if k == "p"}
    tri = check_constant_free("block-triangle", family, tri_params, jobs=jobs)
    phi = check_inequality("phi-inclusion", family, phi_params, tolerance, jobs)
    res = CheckResult("membership-chain", f"{tri.anchor}; {phi.anchor}", "chain", params, family.to_dict(),
                      parts=[tri, phi])
    res.stats = {"triangleConstant": tri.stats["constant"], "phiConstant": phi.stats["constant"]}
    failed = [p for p in (tri, phi) if not p.passed]
    if failed:
        verdict = "hard-fail" if any(p.verdict == "hard-fail" for p in failed) else "fail"
        return _verdict(res, verdict, "; ".join(f"{p.check_id}: {p.reason}" for p in failed))
    return res


# ---------------------------------------------------------------------------
# suites


def default_suite(seed: int = 0, degree: int = 32, count: int = 4, dim: int = 2) -> dict:
    """Every registered id on a small ``randomDecay`` family, degrees ``degree/2 -> degree``."""
    return {"suite": "default", "seed": seed, "degree": degree, "tolerance": DEFAULT_TOLERANCE,
            "family": {"generator": "randomDecay", "count": count, "dim": dim},
            "checks": registered_ids()}


def _family_for(doc: dict, entry_family: dict | None, seed: int, degree: int | None) -> TestFamily:
    merged = {"seed": seed, **(doc.get("family") or {}), **(entry_family or {})}
    if degree is not None:
        merged["maxDegree"] = max(1, int(degree) // 2)
    merged.setdefault("maxDegree", 16)
    try:
        return TestFamily.from_dict(merged)
    except TypeError as exc:
        raise ConfigurationError(f"bad family spec: {exc}") from None


def _entries(doc: dict) -> list[dict]:
    out = []
    for e in doc.get("checks", []):
        if isinstance(e, str):
            e = {"id": e}
        if not isinstance(e, dict) or "id" not in e:
            raise ConfigurationError(f"bad check entry {e!r}")
        extra = set(e) - {"id", "params", "family"}
        if extra:
            raise ConfigurationError(f"check entry {e['id']}: unknown keys {sorted(extra)}")
        out.append(e)
    return out


def run_suite(config: dict, jobs: int = 1, progress=None) -> tuple[dict, dict]:
    """Run every listed check; returns ``(report, meta)``.

    ``report`` is deterministic for a fixed config and seed; ``meta`` holds
    timings.  Configuration problems raise before any computation.  The
    suite seed feeds the family generator and the modulus samplers unless
    an entry overrides them.
    """
    if not isinstance(config, dict):
        raise ConfigurationError("suite config must be a JSON object")
    known = {"suite", "seed", "degree", "tolerance", "family", "checks"}
    extra = set(config) - known
    if extra:
        raise ConfigurationError(f"unknown suite keys {sorted(extra)}; accepted: {sorted(known)}")
    seed = int(config.get("seed", 0))
    tol = float(config.get("tolerance", DEFAULT_TOLERANCE))
    degree = config.get("degree")
    plan = []
    for e in _entries(config):
        spec = get_check(e["id"])
        fam = _family_for(config, e.get("family"), seed, degree)
        params = dict(e.get("params") or {})
        if "seed" in spec.defaults:
            params.setdefault("seed", seed)
        spec.resolve(params, fam.dim)
        plan.append((spec, fam, params))
    checks, timings = [], {}
    for spec, fam, params in plan:
        t0 = time.perf_counter()
        res = run_check(spec.id, fam, params, tol, jobs)
        timings[spec.id] = time.perf_counter() - t0
        checks.append(res)
        if progress is not None:
            progress(res, timings[spec.id])
    report = {"suite": config.get("suite", "custom"), "seed": seed, "tolerance": tol,
              "checks": [c.to_dict() for c in checks]}
    meta = {"timings": timings, "total": sum(timings.values()), "jobs": jobs}
    return report, meta


def suite_exit_code(report: dict) -> int:
    return 0 if all(c["verdict"] == "pass" for c in report["checks"]) else 1


def report_json(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=1, allow_nan=False) + "\n"


def write_report(report: dict, outdir, meta: dict | None = None) -> Path:
    """Write ``report.json``, one CSV per check and optionally ``meta.json``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "report.json"
    path.write_text(report_json(report))
    for chk in report["checks"]:
        rows = list(chk["perFunction"])
        for part in chk.get("parts", []):
            rows += [{**r, "run": f"{part['id']}:{r['run']}"} for r in part["perFunction"]]
        with open(outdir / f"{chk['id']}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["run", "degree", "budget", "index", "lhs", "rhs", "ratio", "excluded"])
            for r in rows:
                w.writerow([r["run"], r["degree"], r["budget"], r["index"], r["lhs"], r["rhs"], r["ratio"],
                            int(r["excluded"])])
    if meta is not None:
        (outdir / "meta.json").write_text(json.dumps(_jsonable(meta), indent=1) + "\n")
    return path


def available_jobs() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover
        return os.cpu_count() or 1
