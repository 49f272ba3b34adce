import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qcorr.optimize import (InfeasibleError, Objective, OptimizerConfig, default_config,
                            grid_oracle, minimize, seesaw, start_streams)
from qcorr.qcore import singlet_projector


def quadratic():
    return Objective(fun=lambda x: float((x[0] - 3.0) ** 2), arity=1,
                     batch=lambda pts: (pts[:, 0] - 3.0) ** 2)


def rastrigin():
    def f(x):
        return float(20 + np.sum(x ** 2 - 10 * np.cos(2 * math.pi * x)))

    def batch(pts):
        return 20 + np.sum(pts ** 2 - 10 * np.cos(2 * math.pi * pts), axis=1)

    return Objective(fun=f, arity=2, batch=batch)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(starts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(tol_f=0)
    cfg = OptimizerConfig(starts=5, seed=3, box=((0, 1),))
    assert OptimizerConfig.from_dict(cfg.to_dict()) == cfg
    assert default_config(4).starts == 32
    assert default_config(6).starts == 128


def test_quadratic():
    res = minimize(quadratic(), OptimizerConfig(starts=4))
    assert res.best_value <= 1e-9
    assert res.best_params[0] == pytest.approx(3.0, abs=1e-4)
    assert res.converged


def test_rastrigin_matches_grid():
    obj = rastrigin()
    box = ((-2.5, 2.5), (-2.5, 2.5))
    res = minimize(obj, OptimizerConfig(starts=64, box=box))
    ref = grid_oracle(obj, 1e-3, box)
    assert res.best_value <= ref.best_value + 1e-9
    assert abs(res.best_value - ref.best_value) <= 1e-4


def test_infeasible():
    obj = Objective(fun=lambda x: math.inf, arity=2)
    with pytest.raises(InfeasibleError):
        minimize(obj, OptimizerConfig(starts=3))


def test_determinism_and_certification():
    obj = rastrigin()
    cfg = OptimizerConfig(starts=8, seed=11)
    a = minimize(obj, cfg)
    b = minimize(obj, cfg)
    assert a.best_value == b.best_value
    assert np.array_equal(a.best_params, b.best_params)
    assert abs(obj(a.best_params) - a.best_value) <= 1e-12


def test_start_streams_prefix_stable():
    a = [g.standard_normal() for g in start_streams(5, 3)]
    b = [g.standard_normal() for g in start_streams(5, 6)][:3]
    assert a == b


def test_grid_oracle_examples():
    res = grid_oracle(quadratic(), 1e-3, [(0, 10)])
    assert res.best_value <= 1e-6
    with pytest.raises(ValueError):
        grid_oracle(quadratic(), 1e-3, [(1, 1)])
    wide = Objective(fun=lambda x: 0.0, arity=5)
    with pytest.raises(ValueError):
        grid_oracle(wide, 10, [(0, 1)] * 5)


def _linopt_blocks(o):
    t = o.reshape(2, 2, 2, 2)

    def value(bl):
        a, b = bl
        return float(np.real(np.einsum("a,b,abcd,c,d->", a.conj(), b.conj(), t, a, b)))

    def best_a(bl):
        return np.linalg.eigh(np.einsum("b,abcd,d->ac", bl[1].conj(), t, bl[1]))[1][:, -1]

    def best_b(bl):
        return np.linalg.eigh(np.einsum("a,abcd,c->bd", bl[0].conj(), t, bl[0]))[1][:, -1]

    def init(rng):
        a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        return a / np.linalg.norm(a), b / np.linalg.norm(b)

    return value, [best_a, best_b], init


@pytest.mark.parametrize("op,expected", [(np.eye(4), 1.0), (singlet_projector(), 0.5),
                                         (np.diag([0.2, 1.5, -1.0, 0.7]), 1.5)])
def test_seesaw_examples(op, expected):
    value, maxers, init = _linopt_blocks(op)
    res, blocks = seesaw(value, maxers, init, OptimizerConfig(starts=8))
    assert res.best_value == pytest.approx(expected, abs=1e-9)
    assert value(blocks) == pytest.approx(res.best_value, abs=1e-12)


def test_seesaw_monotone():
    rng = np.random.default_rng(4)
    for _ in range(10):
        h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        value, maxers, init = _linopt_blocks(h + h.conj().T)
        res, _ = seesaw(value, maxers, init, OptimizerConfig(starts=4))
        assert np.all(np.diff(res.history) >= -1e-12)


def test_initial_points_are_used():
    obj = Objective(fun=lambda x: float(np.sum((x - 7.0) ** 2)), arity=2)
    res = minimize(obj, OptimizerConfig(starts=1, max_iters=1), initial=[np.array([7.0, 7.0])])
    assert res.start_values[0] == 0.0
    assert_allclose(res.best_params, [7.0, 7.0])
