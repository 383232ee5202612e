"""Verification harness: check registry, test families, runner and reports."""

from .checks import REGISTRY, CheckSpec, get_check, registered_ids
from .families import GENERATORS, TestFamily, generate_family, load_polys, save_polys
from .runner import (
    CheckResult,
    available_jobs,
    check_constant_free,
    check_equivalence,
    check_inequality,
    check_membership_chain,
    default_suite,
    evaluate_family,
    report_json,
    run_check,
    run_suite,
    suite_exit_code,
    write_report,
)

__all__ = [
    "REGISTRY",
    "CheckSpec",
    "get_check",
    "registered_ids",
    "GENERATORS",
    "TestFamily",
    "generate_family",
    "load_polys",
    "save_polys",
    "CheckResult",
    "available_jobs",
    "check_constant_free",
    "check_equivalence",
    "check_inequality",
    "check_membership_chain",
    "default_suite",
    "evaluate_family",
    "report_json",
    "run_check",
    "run_suite",
    "suite_exit_code",
    "write_report",
]
