import math

import pytest
from hypothesis import given, strategies as st

from sairod.combinatorics import binom, binomial_pmf, multinom


@pytest.mark.parametrize("a,b,want", [(3, 5, 0), (0, 0, 1), (5, 2, 10), (4, -1, 0), (0, 1, 0)])
def test_binom(a, b, want):
    assert binom(a, b) == want


@pytest.mark.parametrize("x,p,k,want", [(2, 0.5, 1, 0.5), (3, 0.2, 5, 0.0), (4, 0.3, 0, 0.2401)])
def test_binomial_pmf(x, p, k, want):
    assert binomial_pmf(x, p, k) == pytest.approx(want, abs=1e-15)


@pytest.mark.parametrize("x,p", [(2, -0.1, ), (2, 1.5), (-1, 0.5)])
def test_binomial_pmf_domain(x, p):
    with pytest.raises(ValueError):
        binomial_pmf(x, p, 0)


def test_binomial_pmf_degenerate_p():
    assert binomial_pmf(3, 0.0, 0) == 1.0
    assert binomial_pmf(3, 1.0, 3) == 1.0
    assert binomial_pmf(0, 0.3, 0) == 1.0


@pytest.mark.parametrize("n,parts,want", [(2, [1, 1], 2), (3, [3], 1), (4, [2, 1], 12),
                                          (3, [2, 2], 0), (0, [], 1)])
def test_multinom(n, parts, want):
    assert multinom(n, parts) == want


@given(st.integers(0, 30), st.floats(0, 1))
def test_binomial_pmf_sums_to_one(x, p):
    assert math.fsum(binomial_pmf(x, p, k) for k in range(x + 1)) == pytest.approx(1, abs=1e-12)


@given(st.integers(0, 12), st.integers(1, 4))
def test_multinomial_theorem(n, k):
    # sum of multinomial coefficients over all compositions of n into k+1 parts is (k+1)^n
    def comps(n, w):
        if w == 1:
            yield (n,)
            return
        for f in range(n + 1):
            for r in comps(n - f, w - 1):
                yield (f,) + r
    total = sum(multinom(n, list(c[:-1])) for c in comps(n, k + 1))
    assert total == (k + 1) ** n
