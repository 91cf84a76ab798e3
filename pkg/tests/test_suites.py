import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from resmex import errors
from resmex.suites import (
    SUITES,
    SuiteConfig,
    classical_neyman_pearson,
    classical_spectrum,
    run_suite,
    uhlmann_purified_distance,
)
from resmex import extension as ex
from resmex.qstate import random_density

SMALL_EXTRA = {"purified": {"restarts": 300}, "aep": {"n_max": 4}}


@pytest.mark.parametrize("name", sorted(SUITES))
def test_every_suite_passes_small_run(name):
    cfg = SuiteConfig(name, trials=4, dims=(2, 3), seed=11, extra=SMALL_EXTRA.get(name, {}))
    report = run_suite(cfg)
    assert report.total > 0
    assert report.all_passed, report.summary()


def test_reports_are_deterministic_and_order_independent():
    cfg = SuiteConfig("dpi", trials=6, dims=(2, 3), seed=5)
    a, b = run_suite(cfg), run_suite(cfg)
    c = run_suite(SuiteConfig("dpi", trials=6, dims=(2, 3), seed=5, workers=4))
    assert a.content() == b.content() == c.content()
    assert json.dumps(a.content()) == json.dumps(c.content())


def test_different_seeds_differ():
    a = run_suite(SuiteConfig("sandwich", trials=3, dims=(2,), seed=1))
    b = run_suite(SuiteConfig("sandwich", trials=3, dims=(2,), seed=2))
    assert a.content() != b.content()


def test_trials_run_per_dim():
    report = run_suite(SuiteConfig("eq1", trials=3, dims=(2, 3, 4)))
    assert [r.dim for r in report.records] == [2] * 3 + [3] * 3 + [4] * 3
    assert [r.index for r in report.records] == list(range(9))


def test_slack_decides_pass():
    report = run_suite(SuiteConfig("sandwich", trials=2, dims=(2,), slack=1e-300))
    for r in report.records:
        assert r.passed == (r.margin <= 1e-300)


def test_config_validation():
    with pytest.raises(errors.UnknownSuite, match="available"):
        SuiteConfig("nope")
    with pytest.raises(errors.BadConfig):
        SuiteConfig("dpi", extra={"tni": True, "divergences": ["dmin"]})
    with pytest.raises(errors.BadConfig):
        SuiteConfig("dpi", extra={"divergences": ["bogus"]})
    with pytest.raises(errors.BadConfig):
        SuiteConfig("sandwich", trials=0)
    with pytest.raises(errors.BadConfig):
        SuiteConfig("sandwich", dims=(1,))
    with pytest.raises(errors.BadConfig):
        SuiteConfig("sandwich", slack=-1.0)


def test_dpi_with_tni_maps():
    report = run_suite(SuiteConfig("dpi", trials=3, dims=(2,), extra={"tni": True, "divergences": ["umegaki"]}))
    assert report.all_passed


def test_csv_and_json_outputs():
    report = run_suite(SuiteConfig("pure_state", trials=2, dims=(2,)))
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    assert rows[0][:6] == ["suite", "trial", "dim", "seed", "margin", "pass"]
    assert len(rows) == 3
    data = json.loads(report.to_json())
    assert data["aggregate"]["total"] == 2
    assert "wall_time" in data["aggregate"]
    assert "wall_time" not in report.content()["aggregate"]


def test_summary_line():
    report = run_suite(SuiteConfig("eq1", trials=2, dims=(2,)))
    assert report.summary().startswith("eq1: 2/2 pass")


@given(st.lists(st.floats(0.05, 1.0), min_size=2, max_size=6), st.floats(0.01, 0.95), st.integers(0, 2**31))
def test_classical_oracles_agree_with_linear_program(weights, eps, seed):
    p = np.array(weights) / sum(weights)
    q = np.random.default_rng(seed).dirichlet(np.ones(p.size))
    assert classical_neyman_pearson(p, q, eps) == pytest.approx(oracles.classical_hypothesis_lp(p, q, eps), abs=1e-7)
    assert classical_spectrum(p, q, eps) == pytest.approx(oracles.classical_spectrum_bruteforce(p, q, eps), abs=1e-9)


def test_uhlmann_search_matches_closed_form():
    a, b = random_density(2, seed=1).matrix, random_density(2, seed=2).matrix
    assert uhlmann_purified_distance(a, b, restarts=500, rng=0) == pytest.approx(ex.purified_distance(a, b), abs=1e-6)
