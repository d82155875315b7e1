"""Top-level acceptance gate: the ten headline checks, one line each.

Each test runs one aggregated criterion from the report suite and prints
a single PASS/FAIL line; the detail payload lands in the assertion
message on failure.
"""

from __future__ import annotations

from qmforms import cli


def run_criterion(criterion) -> dict:
    result = criterion()
    status = "PASS" if result["passed"] else "FAIL"
    print(f"{status} {result['id']}: {result['title']}")
    assert result["passed"], result
    return result


def test_criterion_01_identity_registry_exact_and_fast():
    result = run_criterion(cli._criterion_identity_suite)
    assert result["detail"]["runtime_s"] < 120
    assert result["detail"]["perturbation_exponent"] is not None


def test_criterion_02_coefficient_laws_exact():
    run_criterion(cli._criterion_coefficient_laws)


def test_criterion_03_golden_expansions():
    run_criterion(cli._criterion_goldens)


def test_criterion_04_positivity_patterns():
    run_criterion(cli._criterion_positivity)


def test_criterion_05_ratio_infima():
    run_criterion(cli._criterion_ratio_infima)


def test_criterion_06_block_certificates():
    run_criterion(cli._criterion_lambert)


def test_criterion_07_high_precision_special_values():
    run_criterion(cli._criterion_numeric_values)


def test_criterion_08_small_t_limits():
    run_criterion(cli._criterion_limits)


def test_criterion_09_scan_verdicts_within_budget():
    result = run_criterion(cli._criterion_scans)
    assert result["detail"]["runtime_s"] < 60


def test_criterion_10_derivative_chain():
    run_criterion(cli._criterion_reduction_chain)
