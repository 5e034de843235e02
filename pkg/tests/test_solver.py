import numpy as np
import pytest
import scipy.sparse as sp

from sairod.model import Action, Parameters, SimpleState
from sairod.policy import adaptive_policy, AdaptiveConfig, constant_policy
from sairod.solver import (converge, deaths_at_least, expected_action_series,
                           infinitely_often_probability, initial_distribution, marginal_cdf,
                           query_probability, query_series, reach_probability, step)
from sairod.statespace import DTMC, StateSpace, build_dtmc
from sairod.model import encode


def _toy():
    # 0 -> {0: .5, 1: .5}, 1 -> 2, 2 -> 1, 3 -> 3
    p = Parameters.frozen(N=1, C=1)
    keys = sorted(encode(v, 1) for v in [(1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0),
                                         (0, 0, 1, 0, 0, 0), (0, 0, 0, 1, 0, 0)])
    space = StateSpace(p, "simplified", keys)
    P = sp.csr_matrix(np.array([[.5, .5, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]))
    return DTMC(space, P, np.ones((4, 2)))


def test_step_and_mass():
    d = _toy()
    x = step(d, np.array([1.0, 0, 0, 0]))
    assert x.tolist() == [0.5, 0.5, 0, 0]
    with pytest.raises(ValueError):
        step(d, np.ones(3) / 3)


def test_converge_fixed_point_and_cap():
    d = _toy()
    res = converge(d, np.array([0, 0, 0, 1.0]))
    assert res.iterations == 0 and res.converged
    # periodic chain never settles
    res = converge(d, np.array([0, 1.0, 0, 0]), max_iter=50)
    assert not res.converged and res.iterations == 50
    with pytest.raises(ValueError):
        converge(d, np.array([0, 1.0, 0, 0]), tol=0)


def test_reachability_and_bottom_components():
    d = _toy()
    r = reach_probability(d, np.array([False, False, True, False]))
    assert r.tolist() == pytest.approx([1, 1, 1, 0])
    io = infinitely_often_probability(d, np.array([False, True, False, False]))
    assert io.tolist() == pytest.approx([1, 1, 1, 0])
    io0 = infinitely_often_probability(d, np.array([True, False, False, False]))
    assert io0.tolist() == pytest.approx([0, 0, 0, 0])


def test_frozen_queries_constant():
    p = Parameters.frozen(N=10, C=2)
    init = [SimpleState(6, 2, 1, 0, 1, 0)]
    d = build_dtmc(init, constant_policy(3), p, "simplified")
    x0 = initial_distribution(d.space, [(init[0], 1.0)])
    s = query_series(d, x0, [deaths_at_least(0.0, 10), lambda v: v.A == 2], 10)
    assert np.all(s == 1.0)
    assert converge(d, x0).iterations == 0


def test_initial_distribution_checks():
    d = _toy()
    with pytest.raises(ValueError):
        initial_distribution(d.space, [((1, 0, 0, 0, 0, 0), 0.5)])
    with pytest.raises(KeyError):
        initial_distribution(d.space, [((0, 0, 0, 0, 1, 0), 1.0)])


def test_solver_end_to_end():
    p = Parameters.paper(N=10, C=2)
    init = [(SimpleState(8, 2, 0, 0, 0, 0), 0.5), (SimpleState(9, 1, 0, 0, 0, 0), 0.5)]
    d = build_dtmc([s for s, _ in init], adaptive_policy(AdaptiveConfig(), 10), p, "simplified")
    x0 = initial_distribution(d.space, init)
    res = converge(d, x0)
    assert res.converged and res.dist.sum() == pytest.approx(1, abs=1e-9)
    # the limit is concentrated on states with no active infection
    assert query_probability(res.dist, d.space, lambda v: (v.A + v.I + v.O) == 0) == pytest.approx(1, abs=1e-6)
    cdf = marginal_cdf(res.dist, d.space, "D")
    assert len(cdf) == 11 and np.all(np.diff(cdf) >= -1e-15) and cdf[-1] == 1.0
    m = expected_action_series(d, x0, 5)
    assert 1 <= m.min() and m.max() <= 5
    # D is monotone along paths, so P[D >= x] is nondecreasing over time
    s = query_series(d, x0, [deaths_at_least(0.2, 10)], 30)[:, 0]
    assert np.all(np.diff(s) >= -1e-12)
