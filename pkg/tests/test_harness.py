import json
import math

import numpy as np
import pytest

from besovball import ConfigurationError, HoloPoly, dilate, modulus_estimate
from besovball.harness import (
    REGISTRY,
    CheckSpec,
    TestFamily,
    check_constant_free,
    check_equivalence,
    check_inequality,
    check_membership_chain,
    default_suite,
    generate_family,
    get_check,
    load_polys,
    registered_ids,
    report_json,
    run_check,
    run_suite,
    save_polys,
    suite_exit_code,
    write_report,
)
from besovball.harness import functionals as F

SMALL = TestFamily("randomDecay", count=3, seed=1, dim=2, max_degree=8)


# ---------------------------------------------------------------------------
# registry


def test_registry_ids_unique_and_anchored():
    ids = registered_ids()
    assert len(ids) == len(set(ids)) == len(REGISTRY)
    for spec in REGISTRY.values():
        assert spec.anchor.strip()
        assert spec.kind in ("equivalence", "inequality", "constant-free")
        assert spec.bound >= 1.0


def test_registry_covers_statement_kinds():
    kinds = {s.kind for s in REGISTRY.values()}
    assert kinds == {"equivalence", "inequality", "constant-free"}
    assert len(registered_ids()) == 31


def test_unknown_id_lists_registered():
    with pytest.raises(ConfigurationError, match="besov-dyadic"):
        get_check("no-such-check")


@pytest.mark.parametrize(
    "check_id,params,dim",
    [
        ("besov-dyadic", {"s": 0.5, "alpha": 0.5}, 2),
        ("besov-s-independence", {"s2": 0.25}, 2),
        ("besov-rotation-differences", {"alpha": 1.0, "n": 1}, 2),
        ("besov-modulus-unitary", {"alpha": 0.0}, 2),
        ("besov-tangential", {"k": 1, "alpha": 0.75}, 2),
        ("besov-tangential", {}, 1),
        ("besov-multiplier", {"t": 0.5}, 2),
        ("radial-tail-by-differences", {"a": -1.0}, 2),
        ("radial-tail-by-differences", {"q": "inf"}, 2),
        ("phi-inclusion", {"phi": "power:0.1"}, 2),
        ("block-multiplier-window", {"p": 4}, 2),
        ("besov-dyadic", {"p": 0.5}, 2),
        ("besov-dyadic", {"p": "two"}, 2),
        ("besov-dyadic", {"bogus": 1}, 2),
        ("radial-by-gradient", {"s": 1.5}, 2),
        ("hardy-type-1d", {"beta": 0.0}, 2),
    ],
)
def test_hypothesis_violations_are_configuration_errors(check_id, params, dim):
    with pytest.raises(ConfigurationError):
        get_check(check_id).resolve(params, dim)


def test_violation_raised_before_computation(monkeypatch):
    def boom(f, P):
        raise AssertionError("evaluated")

    spec = REGISTRY["besov-dyadic"]
    monkeypatch.setitem(REGISTRY, "besov-dyadic", CheckSpec(**{**spec.__dict__, "evaluate": boom}))
    with pytest.raises(ConfigurationError):
        check_equivalence("besov-dyadic", SMALL, {"s": 0.1})


def test_resolve_parses_inf():
    P = get_check("besov-dyadic").resolve({"q": "inf"}, 2)
    assert P["q"] == math.inf and P["p"] == 2.0


def test_wrong_kind_rejected():
    with pytest.raises(ConfigurationError):
        check_equivalence("radial-first-by-second", SMALL)


# ---------------------------------------------------------------------------
# families


@pytest.mark.parametrize("gen,opts", [("randomDecay", {}), ("lacunary", {"levels": 3}),
                                      ("monomial", {"alpha": [2, 1]}), ("blockConcentrated", {"nu": 2})])
def test_family_generators_are_seeded(gen, opts):
    fam = TestFamily(gen, count=3, seed=4, dim=2, max_degree=10, options=opts)
    a, b = generate_family(fam), generate_family(fam)
    assert len(a) == 3
    assert all(x == y for x, y in zip(a, b))
    assert all(g.dim == 2 and g.max_degree == 10 for g in a)


def test_random_decay_nests_under_degree_doubling():
    lo = generate_family(SMALL)
    hi = generate_family(SMALL.with_degree(16))
    for f, g in zip(lo, hi):
        assert g.truncate(8).with_max_degree(8) == f


def test_family_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        TestFamily("nope")
    with pytest.raises(ConfigurationError):
        TestFamily.from_dict({"generator": "randomDecay", "colour": 1})
    with pytest.raises(ConfigurationError):
        generate_family(TestFamily("monomial", 1, dim=2, max_degree=3, options={"alpha": [3, 3]}))
    with pytest.raises(ConfigurationError):
        generate_family(TestFamily("userFile", 1, dim=2, max_degree=3))


def test_user_file_family(tmp_path):
    polys = generate_family(SMALL)
    path = tmp_path / "f.json"
    save_polys(polys, path)
    assert load_polys(path) == polys
    fam = TestFamily("userFile", count=0, dim=2, max_degree=8, options={"path": str(path)})
    assert generate_family(fam) == polys


# ---------------------------------------------------------------------------
# verdicts


def test_zero_family_is_degenerate():
    fam = TestFamily("monomial", count=2, dim=2, max_degree=4, options={"alpha": [0, 0]})
    res = check_constant_free("radial-first-by-second", fam)
    assert res.passed
    assert res.stats["excluded"] == 2


def test_zero_function_all_functionals_vanish():
    f = HoloPoly.zeros(2, 8)
    for cid in ("besov-dyadic", "besov-rotation-differences", "block-triangle", "phi-inclusion"):
        spec = get_check(cid)
        lhs, rhs, _ = spec.evaluate(f, spec.resolve({}, 2))
        assert lhs == 0 and rhs == 0


def _fake(evaluate, kind="inequality"):
    return CheckSpec("fake", "a <= C b", kind, {"p": 2.0}, evaluate)


def test_hard_failure(monkeypatch):
    monkeypatch.setitem(REGISTRY, "fake", _fake(lambda f, P: (1.0, 0.0, {})))
    res = check_inequality("fake", SMALL, jobs=1)
    assert res.verdict == "hard-fail"
    assert not res.passed
    monkeypatch.setitem(REGISTRY, "fake", _fake(lambda f, P: (1.0, 0.0, {}), "constant-free"))
    assert check_constant_free("fake", SMALL).verdict == "hard-fail"


def test_drifting_constant_fails(monkeypatch):
    monkeypatch.setitem(REGISTRY, "fake", _fake(lambda f, P: (float(f.max_degree), 1.0, {})))
    res = check_inequality("fake", SMALL)
    assert res.verdict == "fail"
    assert res.stats["driftDegree"] == pytest.approx(1.0)


def test_equivalence_vanishing_side_fails(monkeypatch):
    monkeypatch.setitem(REGISTRY, "fake", _fake(lambda f, P: (0.0, 1.0, {}), "equivalence"))
    assert check_equivalence("fake", SMALL).verdict == "fail"


def test_constant_free_exceeded(monkeypatch):
    monkeypatch.setitem(REGISTRY, "fake", _fake(lambda f, P: (1.0 + 1e-9, 1.0, {}), "constant-free"))
    res = check_constant_free("fake", SMALL)
    assert res.verdict == "fail"


def test_stable_check_passes_and_keeps_raw_values():
    res = run_check("radial-first-by-second", SMALL)
    assert res.passed
    rows = res.per_function()
    assert len(rows) == 3
    assert all(r["lhs"] <= r["rhs"] for r in rows)
    d = res.to_dict()
    assert set(d) >= {"id", "anchor", "params", "perFunction", "ratioStats", "verdict"}


def test_equivalence_records_both_degrees():
    res = check_equivalence("besov-s-independence", SMALL)
    assert [r["degree"] for r in res.runs] == [8, 16]
    assert res.passed
    assert 1 <= res.stats["window"] < math.inf


def test_inequality_with_modulus_doubles_budget():
    res = check_inequality("modulus-plus-by-radial-tail", SMALL.with_count(2), {"budget": 2})
    assert [r["label"] for r in res.runs] == ["base", "degree x2", "budget x2"]
    assert [r["budget"] for r in res.runs] == [2, 2, 4]
    assert "driftBudget" in res.stats


def test_membership_chain():
    res = check_membership_chain(SMALL, {"p": 2.0, "budget": 2})
    assert res.passed
    assert [p.check_id for p in res.parts] == ["block-triangle", "phi-inclusion"]
    assert res.stats["triangleConstant"] <= 1


def test_membership_chain_rejects_bad_phi():
    with pytest.raises(ConfigurationError):
        check_membership_chain(SMALL, {"phi": "power:0.1", "alpha": 0.25})


def test_phi_monotone_check():
    F.check_phi_monotone(F.parse_phi("power:0.5"), 0.25)
    with pytest.raises(ConfigurationError):
        F.check_phi_monotone(F.parse_phi("power:0.5"), 0.75)


def test_dilated_modulus_scales_for_monomials():
    """``omega^+(delta, f_(1-delta)) / (delta M(1-delta, R f))`` at ``f = z_1^k``, ``delta = 1/k``."""
    ratios = []
    for k in (2, 4, 8, 16):
        f = HoloPoly.monomial((k, 0))
        d = 1.0 / k
        lhs = modulus_estimate(dilate(f, 1 - d), d, 1, 2.0, "plus", budget=8).value
        rhs = d * k * (1 - d) ** k * f.h2_norm()
        ratios.append(lhs / rhs)
    assert min(ratios) >= 2 * math.sin(0.5) - 1e-9
    assert max(ratios) / min(ratios) < 1.25


def test_jobs_do_not_change_results():
    fam = SMALL.with_count(4)
    a = run_check("besov-modulus-plus", fam, {"budget": 2}, jobs=1).to_dict()
    b = run_check("besov-modulus-plus", fam, {"budget": 2}, jobs=2).to_dict()
    assert json.dumps(a) == json.dumps(b)


# ---------------------------------------------------------------------------
# suites and reports


def test_empty_suite():
    report, meta = run_suite({"suite": "empty", "checks": []})
    assert report["checks"] == []
    assert suite_exit_code(report) == 0


def test_suite_config_errors():
    with pytest.raises(ConfigurationError):
        run_suite({"checks": ["no-such-check"]})
    with pytest.raises(ConfigurationError):
        run_suite({"checks": [{"id": "besov-dyadic", "params": {"s": 0.1}}]})
    with pytest.raises(ConfigurationError):
        run_suite({"checks": [], "colour": "red"})
    with pytest.raises(ConfigurationError):
        run_suite({"checks": [{"id": "besov-dyadic", "extra": 1}]})
    with pytest.raises(ConfigurationError):
        run_suite([])


def test_default_suite_lists_every_id():
    cfg = default_suite(seed=3, degree=16, count=2)
    assert cfg["checks"] == registered_ids()
    assert cfg["seed"] == 3 and cfg["family"]["count"] == 2


def test_suite_report_and_files(tmp_path):
    cfg = {"suite": "mini", "seed": 2, "degree": 8,
           "family": {"generator": "randomDecay", "count": 2, "dim": 2},
           "checks": ["radial-first-by-second", {"id": "modulus-nesting", "params": {"budget": 2}},
                      {"id": "besov-dyadic", "family": {"dim": 1}}]}
    seen = []
    report, meta = run_suite(cfg, progress=lambda res, t: seen.append(res.check_id))
    assert seen == ["radial-first-by-second", "modulus-nesting", "besov-dyadic"]
    assert suite_exit_code(report) == 0
    nest = report["checks"][1]
    assert nest["params"]["seed"] == 2 and nest["params"]["budget"] == 2
    assert nest["family"]["maxDegree"] == 4 and nest["family"]["seed"] == 2
    assert report["checks"][2]["family"]["dim"] == 1
    path = write_report(report, tmp_path / "out", meta)
    text = path.read_text()
    assert json.loads(text) == json.loads(report_json(report))
    assert "timings" not in text and "NaN" not in text and "Infinity" not in text
    assert (tmp_path / "out" / "meta.json").exists()
    csv_lines = (tmp_path / "out" / "modulus-nesting.csv").read_text().splitlines()
    assert csv_lines[0] == "run,degree,budget,index,lhs,rhs,ratio,excluded"
    assert len(csv_lines) == 1 + 2


def test_report_is_deterministic():
    cfg = {"seed": 5, "degree": 8, "family": {"count": 2},
           "checks": ["besov-modulus-unitary", "monotone-means"]}
    a, _ = run_suite(cfg)
    b, _ = run_suite(cfg)
    assert report_json(a) == report_json(b)


def test_report_encodes_non_finite():
    text = report_json({"x": [math.inf, math.nan, -math.inf, np.float64(1.5)]})
    assert json.loads(text) == {"x": ["inf", "nan", "-inf", 1.5]}


def test_failing_suite_exit_code(monkeypatch):
    monkeypatch.setitem(REGISTRY, "fake", _fake(lambda f, P: (1.0, 0.0, {})))
    report, _ = run_suite({"degree": 4, "family": {"count": 1}, "checks": ["fake"]})
    assert report["checks"][0]["verdict"] == "hard-fail"
    assert suite_exit_code(report) == 1

