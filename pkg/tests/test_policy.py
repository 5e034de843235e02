import numpy as np
import pytest
from hypothesis import given, strategies as st

from sairod.model import Action, Parameters, SimpleState, State
from sairod.policy import (AdaptiveConfig, adaptive_M, adaptive_policy, apply_policy,
                           constant_policy, signal_fraction)
from sairod.statespace import build_reachable

CFG = AdaptiveConfig(0.05, 0.15, 1, 5)


def s6(**kw):
    return SimpleState(**{c: kw.get(c, 0) for c in SimpleState._fields})


def test_adaptive_examples():
    assert adaptive_M(s6(S=20), CFG, 20) == 5
    assert adaptive_M(s6(A=20), CFG, 20) == 1
    assert adaptive_M(s6(S=18, A=2), CFG, 20) == 3          # f = 0.10
    assert adaptive_M(s6(S=18, A=2), AdaptiveConfig(round_M=False), 20) == pytest.approx(3.0)


def test_signals():
    v = s6(S=10, A=2, I=3, O=1, D=4)
    assert signal_fraction(v, "AA", 20) == pytest.approx(2 / 16)
    assert signal_fraction(v, "AS", 20) == pytest.approx(4 / 16)


def test_all_deceased():
    with pytest.raises(ValueError):
        adaptive_M(s6(D=5), CFG, 5)
    assert adaptive_policy(CFG, 5)(s6(D=5)) == Action(1, 0)


@pytest.mark.parametrize("kw", [dict(t_low=0.2, t_high=0.1), dict(m_low=6), dict(signal="X")])
def test_config_invariants(kw):
    with pytest.raises(ValueError):
        AdaptiveConfig(**kw)


@given(st.floats(0, 1), st.floats(0, 1), st.sampled_from(["AA", "AS"]), st.booleans())
def test_adaptive_monotone_and_bounded(f1, f2, signal, rnd):
    cfg = AdaptiveConfig(0.05, 0.15, 1, 5, signal, rnd)
    N = 1000
    def at(f):
        k = int(round(f * N))
        return s6(S=N - k, A=k) if signal == "AA" else s6(S=N - k, I=k)
    lo, hi = sorted((f1, f2))
    m_lo, m_hi = adaptive_M(at(lo), cfg, N), adaptive_M(at(hi), cfg, N)
    assert 1 <= m_hi <= m_lo <= 5


def test_aa_as_agree_without_infection():
    aa = adaptive_policy(CFG, 10)
    as_ = adaptive_policy(AdaptiveConfig(signal="AS"), 10)
    for v in [s6(S=10), s6(S=4, R=3, D=3), s6(R=10)]:
        assert aa(v) == as_(v)


def _table():
    p = Parameters.paper(N=8, C=2)
    return build_reachable([SimpleState(6, 2, 0, 0, 0, 0)], [Action(M) for M in range(1, 6)],
                           p, "simplified")


def test_apply_policy_selects_rows():
    space, table = _table()
    d = apply_policy(table, constant_policy(2))
    assert abs(d.P - table.matrices[1]).max() == 0
    d2 = apply_policy(table, adaptive_policy(CFG, 8))
    assert np.allclose(np.asarray(d2.P.sum(axis=1)).ravel(), 1.0, atol=1e-9)
    assert d2.choice[:, 0].min() >= 1 and d2.choice[:, 0].max() <= 5
    same = apply_policy(table, adaptive_policy(CFG, 8))
    assert (same.P != d2.P).nnz == 0


def test_apply_policy_missing_action():
    _, table = _table()
    with pytest.raises(KeyError):
        apply_policy(table, constant_policy(7))


def test_constant_policy_caps_tests():
    pol = constant_policy(2, 3)
    assert pol(State(1, 0, 3, 0, 0, 0, 0, 0)) == Action(2, 1)
    assert pol(State(5, 0, 0, 0, 0, 0, 0, 0)) == Action(2, 3)


def test_unrounded_policy_builds():
    from sairod.statespace import build_dtmc
    p = Parameters.paper(N=8, C=1)
    d = build_dtmc([SimpleState(6, 2, 0, 0, 0, 0)], adaptive_policy(AdaptiveConfig(round_M=False), 8),
                   p, "simplified")
    Ms = set(d.choice[:, 0].tolist())
    assert any(m != int(m) for m in Ms)
    assert np.allclose(np.asarray(d.P.sum(axis=1)).ravel(), 1.0, atol=1e-9)
