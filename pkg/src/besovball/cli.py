"""Command-line entry point.

Subcommands: ``norm``, ``modulus``, ``blocks``, ``approx``, ``verify`` and
``generate``.  Every subcommand accepts ``--config FILE``: a JSON object whose
keys are the subcommand's option names (dashes or underscores).  Values
given as flags override the config file, which overrides the defaults.

Exit codes: 0 success (or all checks pass), 1 a check failed or a
computation failed, 2 bad flags or configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .errors import BesovBallError, ConfigurationError
from .harness import (
    GENERATORS,
    REGISTRY,
    TestFamily,
    available_jobs,
    default_suite,
    load_polys,
    run_suite,
    save_polys,
    suite_exit_code,
    write_report,
)
from .harness.functionals import lambda_seminorm, parse_phi
from .lpblocks import DyadicNormSpec, best_approx_general, block_norms, build_block_basis, dyadic_norm
from .moduli import KINDS, modulus_dial
from .quad import NormSpec, hardy_norm, mixed_norm, phi_seminorm, sphere_rule_for

__all__ = ["main", "build_parser", "parse_grid"]

_DEFAULTS = {
    "norm": {"kind": "lambda", "p": 2.0, "q": 2.0, "alpha": 0.5, "s": 1.0, "n": 1, "phi": None},
    "modulus": {"kind": "all", "n": 1, "p": 2.0, "grid": "log:1e-3:0.5:20", "budget": 16, "seed": 0,
                "metric": False, "output": None},
    "blocks": {"p": 2.0, "sharp": False, "output": None},
    "approx": {"p": 2.0, "levels": None, "budget": 200, "rtol": 1e-3, "output": None},
    "verify": {"suite": "default", "seed": 0, "degree": 32, "count": 4, "dim": 2, "jobs": None,
               "checks": None, "output": "verify-out", "tolerance": None, "list": False},
    "generate": {"generator": "randomDecay", "count": 8, "seed": 0, "dim": 2, "degree": 16, "options": None,
                 "output": None},
}
# suite-level keys a verify config may carry in addition to the flag names
_SUITE_KEYS = {"family", "checks", "tolerance", "suite"}


def _exponent(text: str) -> float:
    if str(text).lower() in ("inf", "infinity"):
        return math.inf
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'inf', got {text!r}") from None
    if not v >= 1:
        raise argparse.ArgumentTypeError(f"exponent must lie in [1, inf], got {v}")
    return v


def parse_grid(spec) -> np.ndarray:
    """``log:a:b:k``, ``lin:a:b:k`` or a comma-separated list of values."""
    if isinstance(spec, (list, tuple)):
        return np.asarray(spec, dtype=float)
    parts = str(spec).split(":")
    try:
        if parts[0] in ("log", "lin") and len(parts) == 4:
            a, b, k = float(parts[1]), float(parts[2]), int(parts[3])
            if not (0 < a < b and k >= 1):
                raise ConfigurationError(f"grid {spec!r}: need 0 < a < b and k >= 1")
            return np.geomspace(a, b, k) if parts[0] == "log" else np.linspace(a, b, k)
        return np.array([float(x) for x in str(spec).split(",")])
    except ValueError:
        raise ConfigurationError(f"unrecognized grid {spec!r}; use log:a:b:k, lin:a:b:k or v1,v2,...") from None


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    ap = argparse.ArgumentParser(prog="besovball", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="store_true", help="print version and build metadata")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_, argument_default=S)
        p.add_argument("--config", help="JSON file with option values (flags take precedence)")
        return p

    p = cmd("norm", "compute a norm or seminorm of each input function")
    p.add_argument("--input", help="JSON file with one or more functions")
    p.add_argument("--kind", choices=["lambda", "mixed", "hardy", "dyadic", "phi"],
                   help="lambda: ||R^s f||_{p,q,s-alpha}; mixed: ||f||_{p,q,alpha}; hardy: ||f||_p; "
                        "dyadic: block norm with exponent -alpha; phi: phi-weighted functional of R^n f")
    p.add_argument("--p", type=_exponent)
    p.add_argument("--q", type=_exponent)
    p.add_argument("--alpha", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--phi", help="phi weight: power:b or powerlog:b:c")

    p = cmd("modulus", "table of moduli of smoothness over a delta grid (CSV)")
    p.add_argument("--input", help="JSON file with one or more functions")
    p.add_argument("--kind", choices=["all", *KINDS])
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=_exponent)
    p.add_argument("--grid", help="log:a:b:k, lin:a:b:k or a comma-separated list")
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--metric", action="store_true", help="use the chordal angle bound for rotations")
    p.add_argument("--output", help="CSV path (default: stdout)")

    p = cmd("blocks", "dyadic block spectrum (nu, ||W_nu*f||_p) as CSV")
    p.add_argument("--input", help="JSON file with one or more functions")
    p.add_argument("--p", type=_exponent)
    p.add_argument("--sharp", action="store_true", help="use sharp V_nu blocks")
    p.add_argument("--output")

    p = cmd("approx", "best-approximation brackets E_{2^nu}(f)_p as CSV")
    p.add_argument("--input", help="JSON file with one or more functions")
    p.add_argument("--p", type=_exponent)
    p.add_argument("--levels", type=int, help="number of dyadic levels (default: while 2^nu < D)")
    p.add_argument("--budget", type=int)
    p.add_argument("--rtol", type=float)
    p.add_argument("--output")

    p = cmd("verify", "run the verification suite and write report.json plus CSV tables")
    p.add_argument("--suite", help="'default' or a JSON suite file")
    p.add_argument("--seed", type=int)
    p.add_argument("--degree", type=int, help="top truncation degree; checks compare degree/2 with degree")
    p.add_argument("--count", type=int, help="functions per family (default suite)")
    p.add_argument("--dim", type=int, help="dimension N (default suite)")
    p.add_argument("--jobs", type=int, help="worker processes (default: available cores)")
    p.add_argument("--checks", help="comma-separated subset of check ids")
    p.add_argument("--tolerance", type=float, help="allowed drift (default 0.25)")
    p.add_argument("--output", help="output directory")
    p.add_argument("--list", action="store_true", help="list registered check ids and exit")

    p = cmd("generate", "write a seeded test family to JSON")
    p.add_argument("--generator", choices=GENERATORS)
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--degree", type=int)
    p.add_argument("--options", help="generator options as JSON, e.g. '{\"gamma\": 2}'")
    p.add_argument("--output", required=False)
    return ap


def _resolve(args: argparse.Namespace) -> dict:
    """Defaults, then config file, then flags."""
    cfg = dict(_DEFAULTS[args.command])
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "version", "config")}
    path = getattr(args, "config", None)
    if path:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigurationError("config file must hold a JSON object")
        doc = {k.replace("-", "_"): v for k, v in doc.items()}
        allowed = set(cfg) | {"input"} | (_SUITE_KEYS if args.command == "verify" else set())
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigurationError(f"config: unknown keys {sorted(unknown)} for {args.command}")
        cfg.update(doc)
    cfg.update(flags)
    for key in ("p", "q"):
        if key in cfg and not isinstance(cfg[key], float):
            try:
                cfg[key] = _exponent(cfg[key])
            except argparse.ArgumentTypeError as exc:
                raise ConfigurationError(f"{key}: {exc}") from None
    return cfg


def _open_out(path):
    return open(path, "w", newline="") if path else io.TextIOWrapper(sys.stdout.buffer, newline="", write_through=True)


def _write_csv(path, header, rows):
    fh = _open_out(path)
    try:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    finally:
        if path:
            fh.close()
        else:
            fh.detach()


def _inputs(cfg):
    if not cfg.get("input"):
        raise ConfigurationError("--input is required")
    return load_polys(cfg["input"])


def _cmd_norm(cfg) -> int:
    kind, p, q, alpha = cfg["kind"], cfg["p"], cfg["q"], cfg["alpha"]
    for i, f in enumerate(_inputs(cfg)):
        if kind == "lambda":
            if not cfg["s"] > alpha:
                raise ConfigurationError(f"need s > alpha, got s={cfg['s']}, alpha={alpha}")
            val = lambda_seminorm(f, p, q, alpha, cfg["s"])
            label = f"||R^{cfg['s']:g} f||_{{{p:g},{q:g},{cfg['s'] - alpha:g}}}"
        elif kind == "mixed":
            val = mixed_norm(f, NormSpec(p, q, alpha))
            label = f"||f||_{{{p:g},{q:g},{alpha:g}}}"
        elif kind == "hardy":
            val = hardy_norm(f, p, sphere_rule_for(f, p))
            label = f"||f||_{p:g}"
        elif kind == "dyadic":
            val = dyadic_norm(f, DyadicNormSpec(p, q, -alpha))
            label = f"dyadic({p:g},{q:g},{-alpha:g})"
        else:
            if cfg["phi"] is None:
                raise ConfigurationError("--kind phi needs --phi")
            val = phi_seminorm(f, NormSpec(p, q, alpha, phi=parse_phi(cfg["phi"]), n=int(cfg["n"])))
            label = f"phi[{cfg['phi']}](n={cfg['n']},p={p:g},q={q:g})"
        print(f"f[{i}] {label} = {val!r}")
    return 0


def _cmd_modulus(cfg) -> int:
    grid = parse_grid(cfg["grid"])
    kinds = list(KINDS) if cfg["kind"] == "all" else [cfg["kind"]]
    polys = _inputs(cfg)
    rows = []
    for i, f in enumerate(polys):
        cols = {k: modulus_dial(f, grid, int(cfg["n"]), cfg["p"], k, int(cfg["budget"]), int(cfg["seed"]),
                                bool(cfg["metric"])) for k in kinds}
        for j, d in enumerate(grid):
            vals = [cols[k][j].value for k in kinds]
            if cfg["kind"] == "all":
                vals[1] = max(vals[1], vals[0])
                vals[2] = max(vals[2], vals[1])
            rows.append([i, repr(float(d))] + [repr(float(v)) for v in vals])
    _write_csv(cfg["output"], ["function", "delta", *kinds], rows)
    if cfg["output"]:
        print(f"wrote {len(rows)} rows to {cfg['output']}")
    return 0


def _cmd_blocks(cfg) -> int:
    rows = []
    for i, f in enumerate(_inputs(cfg)):
        basis = build_block_basis(max(f.max_degree, 1), sharp=bool(cfg["sharp"]))
        for nu, v in enumerate(block_norms(f, cfg["p"], basis)):
            rows.append([i, nu, repr(float(v))])
    _write_csv(cfg["output"], ["function", "nu", "norm"], rows)
    if cfg["output"]:
        print(f"wrote {len(rows)} rows to {cfg['output']}")
    return 0


def _cmd_approx(cfg) -> int:
    rows = []
    for i, f in enumerate(_inputs(cfg)):
        levels = cfg["levels"]
        if levels is None:
            levels = max(1, math.ceil(math.log2(max(f.max_degree, 2))))
        rule = None if cfg["p"] == 2 else sphere_rule_for(f, cfg["p"])
        for nu in range(int(levels)):
            b = best_approx_general(f, 2 ** nu, cfg["p"], rule, budget=int(cfg["budget"]), rtol=float(cfg["rtol"]))
            rows.append([i, nu, 2 ** nu, repr(float(b.upper)), repr(float(b.lower)), int(b.converged)])
    _write_csv(cfg["output"], ["function", "nu", "degree", "upper", "lower", "converged"], rows)
    if cfg["output"]:
        print(f"wrote {len(rows)} rows to {cfg['output']}")
    return 0


def _suite_config(cfg) -> dict:
    if cfg["suite"] == "default":
        suite = default_suite(int(cfg["seed"]), int(cfg["degree"]), int(cfg["count"]), int(cfg["dim"]))
    else:
        try:
            suite = json.loads(Path(cfg["suite"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read suite {cfg['suite']}: {exc}") from None
        suite.setdefault("seed", int(cfg["seed"]))
    for key in _SUITE_KEYS - {"suite"}:
        if cfg.get(key) is not None and key != "checks":
            suite[key] = cfg[key]
    if cfg.get("checks"):
        wanted = cfg["checks"].split(",") if isinstance(cfg["checks"], str) else list(cfg["checks"])
        suite["checks"] = wanted
    return suite


def _cmd_verify(cfg) -> int:
    if cfg["list"]:
        for cid, spec in REGISTRY.items():
            print(f"{cid:36s} {spec.kind:13s} {spec.anchor}")
        return 0
    suite = _suite_config(cfg)
    jobs = int(cfg["jobs"]) if cfg["jobs"] else available_jobs()

    def progress(res, dt):
        print(f"{res.verdict.upper():9s} {res.check_id:36s} {dt:7.2f}s {res.reason}", flush=True)

    report, meta = run_suite(suite, jobs=jobs, progress=progress)
    path = write_report(report, cfg["output"], meta)
    code = suite_exit_code(report)
    n_pass = sum(c["verdict"] == "pass" for c in report["checks"])
    print(f"{n_pass}/{len(report['checks'])} checks passed; report: {path}")
    return code


def _cmd_generate(cfg) -> int:
    opts = cfg["options"]
    if isinstance(opts, str):
        try:
            opts = json.loads(opts)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"--options is not valid JSON: {exc}") from None
    fam = TestFamily(cfg["generator"], int(cfg["count"]), int(cfg["seed"]), int(cfg["dim"]), int(cfg["degree"]),
                     dict(opts or {}))
    polys = fam.generate()
    out = cfg["output"] or f"{fam.generator}-N{fam.dim}-D{fam.max_degree}-s{fam.seed}.json"
    save_polys(polys, out)
    print(f"wrote {len(polys)} functions to {out}")
    return 0


_COMMANDS = {"norm": _cmd_norm, "modulus": _cmd_modulus, "blocks": _cmd_blocks, "approx": _cmd_approx,
             "verify": _cmd_verify, "generate": _cmd_generate}


def _version_text() -> str:
    return (f"besovball {__version__} (python {platform.python_version()}, numpy {np.__version__}, "
            f"scipy {scipy.__version__})")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.version:
        print(_version_text())
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](_resolve(args))
    except (ConfigurationError, ValueError, OSError) as exc:
        print(f"besovball {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except BesovBallError as exc:
        print(f"besovball {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
