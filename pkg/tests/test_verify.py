"""The verification harness itself: suites, determinism, self-test."""

from __future__ import annotations

import json

import pytest

import ghlab.verify as verify
from ghlab.verify import SUITES, TheoremResult, run_suite


def test_every_suite_passes():
    for name in SUITES:
        results = run_suite(name, seed=0)
        assert results, name
        for tr in results:
            assert tr.passed, (name, tr.theorem, tr.counterexample)
            assert tr.cases > 0


def test_runs_are_deterministic_under_a_seed():
    a = [tr.to_json() for tr in run_suite("all", seed=5)]
    b = [tr.to_json() for tr in run_suite("all", seed=5)]
    assert json.dumps(a, sort_keys=True, default=str) == json.dumps(
        b, sort_keys=True, default=str
    )


def test_unknown_suite_raises():
    with pytest.raises(ValueError):
        run_suite("nope")


def test_case_count_override_shrinks_the_run():
    small = run_suite("fundamental", seed=1, cases=5)
    assert all(tr.cases <= 5 or tr.cases > 0 for tr in small)
    assert sum(tr.cases for tr in small) < sum(
        tr.cases for tr in run_suite("fundamental", seed=1)
    )


def test_result_json_shape():
    tr = run_suite("inframetric", seed=2, cases=4)[0]
    obj = tr.to_json()
    assert set(obj) == {"theorem", "cases", "failures", "counterexample"}
    json.dumps(obj)  # must be serializable as-is


def test_injected_bug_is_caught_with_a_counterexample(monkeypatch):
    # corrupt the delta_r the suites call: the harness must notice and
    # return a counterexample rather than passing silently
    real = verify.delta_r

    def skewed(glued, r, strict=False, tol=0):
        return real(glued, r, strict=strict, tol=tol) + 1

    monkeypatch.setattr(verify, "delta_r", skewed)
    results = run_suite("inframetric", seed=0, cases=10)
    broken = [tr for tr in results if not tr.passed]
    assert broken
    assert all(isinstance(tr.counterexample, dict) for tr in broken)
    json.dumps([tr.to_json() for tr in broken])
