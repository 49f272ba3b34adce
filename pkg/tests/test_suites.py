import csv
import io
import json

import numpy as np
import pytest

from oracles import product_max_bruteforce
from qcorr.optimize import OptimizerConfig
from qcorr.qcore import random_hermitian
from qcorr.suites import DEFAULT_COUNTS, SUITES, linopt_grid, run_suite

CHEAP = OptimizerConfig(starts=2, seed=0)
COUNTS = {"koashi-winter": 3, "holevo-identity": 3, "inequality-chain": 2, "norm-bounds": 1,
          "linopt-equality": 3, "classicality-equivalence": 6, "steering-completeness": 10,
          "reduction-soundness": 4}


def test_registry_matches_defaults():
    assert set(SUITES) == set(DEFAULT_COUNTS) == set(COUNTS)


@pytest.mark.parametrize("name", sorted(COUNTS))
def test_suite_passes_on_small_battery(name):
    rep = run_suite(name, seed=3, count=COUNTS[name], cfg=CHEAP)
    assert rep.passed, rep.cases
    assert len(rep.cases) == COUNTS[name]
    assert rep.worst_residual == max(c["residual"] for c in rep.cases)
    d = json.loads(json.dumps(rep.to_json(), allow_nan=False))
    assert d["suite"] == name and d["battery"]["count"] == COUNTS[name]
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert len(rows) == COUNTS[name]
    assert "residual" in rows[0]


def test_suite_is_deterministic():
    a = run_suite("koashi-winter", seed=5, count=2, cfg=CHEAP).to_json()
    b = run_suite("koashi-winter", seed=5, count=2, cfg=CHEAP).to_json()
    assert a == b


def test_unknown_suite_and_bad_count():
    with pytest.raises(KeyError):
        run_suite("nope")
    with pytest.raises(ValueError):
        run_suite("koashi-winter", count=0)


def test_linopt_grid_agrees_with_sampling():
    for seed in range(3):
        o = random_hermitian(4, seed)
        assert linopt_grid(o) == pytest.approx(product_max_bruteforce(o), abs=1e-4)


def test_failing_case_is_reported():
    # a deliberately broken tolerance shows up as a failed case, not an exception
    from qcorr import suites
    case = suites._checks({}, {"x": (0.5, 0.1)})
    assert case["ok"] is False and case["residual"] == 0.5
    rep = suites.SuiteReport("t", {}, {}, [case])
    assert not suites._finish(rep).passed
    assert np.isclose(rep.worst_residual, 0.5)
