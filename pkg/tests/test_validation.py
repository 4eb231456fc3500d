import json

import numpy as np
import pytest

from quartic_scatter import validation


def test_quick_suite_passes():
    report = validation.validate("quick", seed=3)
    failed = [(c.name, c.max_residual) for c in report.checks if not c.passed]
    assert not failed
    assert [c.name for c in report.checks] == [c.name for c in validation.CHECKS]


def test_seed_reproducible():
    a = validation.run_check(validation.CHECK_BY_NAME["exact_unitarity"], 20, seed=5)
    b = validation.run_check(validation.CHECK_BY_NAME["exact_unitarity"], 20, seed=5)
    assert a.max_residual == b.max_residual


def test_replay_roundtrip(tmp_path):
    report = validation.validate("quick", seed=2, tolerances={"kernel_ode": 1e-300}, only=["kernel_ode"])
    assert not report.passed
    path = tmp_path / "failures.json"
    n = validation.write_replay(report, path)
    assert n == len(json.loads(path.read_text())["failures"])
    rows = validation.replay(path)
    assert len(rows) == n
    for rec, residual, ok in rows:
        assert residual == pytest.approx(rec["residual"], rel=1e-12)
        assert not ok


def test_rejects_unknown_names():
    with pytest.raises(ValueError):
        validation.validate("medium")
    with pytest.raises(ValueError):
        validation.validate("quick", tolerances={"nonsense": 1.0})


def test_bc_serialisation():
    case = validation._bc_case(np.random.default_rng(0))
    bc = validation.bc_from_dict(case["bc"])
    assert validation.bc_to_dict(bc) == case["bc"]
