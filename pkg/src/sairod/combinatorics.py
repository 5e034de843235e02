"""Binomial, multinomial and binomial-pmf primitives.

All functions are total on integers: infeasible arguments return 0 rather
than raising, so that vanishing terms in the nested transition sums drop out
without special-casing at every call site.
"""

from math import comb


def binom(a: int, b: int) -> int:
    """Binomial coefficient, 0 when ``b > a`` or ``b < 0``, 1 when ``a == b == 0``."""
    if b < 0 or a < 0 or b > a:
        return 0
    return comb(a, b)


def binomial_pmf(x: int, p: float, k: int) -> float:
    """Probability of exactly ``k`` successes in ``x`` Bernoulli(p) trials."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
    if x < 0:
        raise ValueError(f"negative trial count: {x}")
    if k < 0 or k > x:
        return 0.0
    # 0.0 ** 0 == 1.0, which is the convention we want at p in {0, 1}
    return comb(x, k) * p**k * (1.0 - p) ** (x - k)


def multinom(n: int, parts) -> int:
    """Multinomial coefficient ``n! / (prod(parts)! * rest!)``.

    The last block is implied as ``n - sum(parts)``; a negative remainder or a
    negative part gives 0. Computed exactly as a product of binomials.
    """
    out = 1
    left = n
    for k in parts:
        if k < 0 or k > left:
            return 0
        out *= comb(left, k)
        left -= k
    return out
