from fractions import Fraction
from itertools import product
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfdlab.analytics.bernoulli import (
    bernoulli_bands,
    binom_cdf,
    binom_pmf,
    flow_quantiles,
    fn_j,
    min_two_binomials_quantiles,
)
from mfdlab.network import ParameterError

K = Fraction(3, 10)


def exact_cdf(n, p, x):
    return sum(Fraction(comb(n, i)) * p**i * (1 - p) ** (n - i) for i in range(0, min(x, n) + 1))


def lowest_quantile(cdf_values, q):
    return next(m for m, c in enumerate(cdf_values) if c >= q)


@pytest.mark.parametrize("n", range(0, 13))
@pytest.mark.parametrize("p", [Fraction(0), Fraction(1, 7), Fraction(1, 2), Fraction(9, 10), Fraction(1)])
def test_cdf_matches_exact_sum(n, p):
    xs = np.arange(-1, n + 2)
    ours = binom_cdf(n, float(p), xs)
    for x, v in zip(xs, ours):
        expect = 0 if x < 0 else exact_cdf(n, p, int(x))
        assert v == pytest.approx(float(expect), abs=1e-13)


def test_cdf_bracket_values():
    assert binom_cdf(10, 0.3, -1) == 0.0
    assert binom_cdf(10, 0.3, 10) == 1.0
    assert binom_cdf(10, 0.3, 2.7) == binom_cdf(10, 0.3, 2)


@settings(max_examples=50)
@given(st.integers(0, 60), st.floats(0, 1))
def test_cdf_is_monotone(n, p):
    c = binom_cdf(n, p, np.arange(-1, n + 1))
    assert c[0] == 0 and c[-1] == 1
    assert (np.diff(c) >= -1e-15).all()
    assert binom_pmf(n, p).sum() == pytest.approx(1.0)


def enumerate_counts(ell, k, copies, reducer):
    """Exact law of reducer over `copies` iid Bin(2*ell, k) counts."""
    n = 2 * ell
    pmf = [Fraction(comb(n, i)) * k**i * (1 - k) ** (n - i) for i in range(n + 1)]
    law = [Fraction(0)] * (n + 1)
    for combo in product(range(n + 1), repeat=copies):
        w = Fraction(1)
        for c in combo:
            w *= pmf[c]
        law[reducer(combo)] += w
    out, acc = [], Fraction(0)
    for w in law:
        acc += w
        out.append(acc)
    return out


@pytest.mark.parametrize("ell", [1, 2, 3])
@pytest.mark.parametrize("policy,reducer", [("lqf", max), ("sqf", min)])
def test_fn_j_one_cycle_matches_enumeration(ell, policy, reducer):
    exact = enumerate_counts(ell, K, 2, reducer)
    ours = fn_j(policy, 1, ell, float(K), np.arange(2 * ell + 1))
    assert np.allclose(ours, [float(x) for x in exact], atol=1e-13)


def test_fn_j_two_cycles_matches_enumeration():
    exact = enumerate_counts(1, K, 4, max)
    ours = fn_j("lqf", 2, 1, float(K), np.arange(3))
    assert np.allclose(ours, [float(x) for x in exact], atol=1e-13)


@pytest.mark.parametrize("ell", range(1, 7))
def test_random_policy_keeps_base_law(ell):
    n = 2 * ell
    assert np.allclose(
        fn_j("rnd", 3, ell, 0.4, np.arange(n + 1)),
        [float(exact_cdf(n, Fraction(2, 5), x)) for x in range(n + 1)],
    )


@pytest.mark.parametrize("ell", range(1, 7))
@pytest.mark.parametrize("policy", ["lqf", "sqf", "rnd"])
def test_flow_quantiles_match_enumeration(ell, policy):
    n, j = 2 * ell, 2
    base = [exact_cdf(n, K, x) for x in range(n + 1)]
    cdf = {
        "lqf": [c ** (2 * j) for c in base],
        "sqf": [1 - (1 - c) ** (2 * j) for c in base],
        "rnd": base,
    }[policy]
    pct = [Fraction(5, 100), Fraction(1, 2), Fraction(95, 100)]
    expect = [lowest_quantile(cdf, q) / (8 * ell) for q in pct]
    assert np.allclose(flow_quantiles(policy, j, ell, float(K), [float(q) for q in pct]), expect)


@pytest.mark.parametrize("n", range(1, 7))
def test_min_two_matches_enumeration(n):
    exact = enumerate_counts(n, K, 2, min)
    pct = [Fraction(1, 20), Fraction(1, 4), Fraction(1, 2), Fraction(19, 20)]
    expect = [lowest_quantile(exact, q) for q in pct]
    assert list(min_two_binomials_quantiles(n, float(K), [float(q) for q in pct])) == expect


def test_min_two_median_small_case():
    assert min_two_binomials_quantiles(1, 0.5, [0.5])[0] == 1


def test_min_two_cdf_matches_monte_carlo():
    rng = np.random.default_rng(2024)
    n, k, m = 5, 0.35, 10**6
    x = np.minimum(rng.binomial(2 * n, k, m), rng.binomial(2 * n, k, m))
    base = binom_cdf(2 * n, k, np.arange(2 * n + 1))
    model = 1 - (1 - base) ** 2
    emp = np.array([(x <= v).mean() for v in range(2 * n + 1)])
    se = np.sqrt(model * (1 - model) / m)
    assert (np.abs(emp - model) <= 3 * se + 1e-12).all()


def test_degenerate_densities():
    assert (flow_quantiles("lqf", 3, 10, 0.0, [0.05, 0.95]) == 0).all()
    assert np.allclose(flow_quantiles("rnd", 1, 10, 1.0, [0.05, 0.5, 0.95]), 0.25)
    assert (min_two_binomials_quantiles(4, 0.0, [0.05, 0.95]) == 0).all()


@settings(max_examples=60)
@given(st.integers(1, 15), st.floats(0.01, 0.99), st.integers(1, 6), st.integers(1, 6))
def test_dominance_in_j(ell, k, j1, j2):
    j1, j2 = sorted((j1, j2))
    n = np.arange(2 * ell + 1)
    assert (fn_j("lqf", j2, ell, k, n) <= fn_j("lqf", j1, ell, k, n) + 1e-15).all()
    assert (fn_j("sqf", j2, ell, k, n) >= fn_j("sqf", j1, ell, k, n) - 1e-15).all()


def test_errors():
    with pytest.raises(ParameterError):
        fn_j("fifo", 1, 3, 0.5, 1)
    with pytest.raises(ParameterError):
        fn_j("lqf", 0, 3, 0.5, 1)
    with pytest.raises(ParameterError):
        binom_cdf(3, 1.5, 1)
    with pytest.raises(ParameterError):
        min_two_binomials_quantiles(0, 0.5, [0.5])
    with pytest.raises(ParameterError):
        flow_quantiles("lqf", 1, 3, 0.5, [1.0])


def test_band_rows():
    rows = bernoulli_bands(["lqf", "sqf"], [1, 5], 10, [0.2, 0.5])
    assert len(rows) == 8
    lqf = {(r[1], r[3]): r[4:] for r in rows if r[0] == "lqf"}
    sqf = {(r[1], r[3]): r[4:] for r in rows if r[0] == "sqf"}
    assert lqf[(5, 0.5)][0] >= lqf[(1, 0.5)][0]
    assert sqf[(5, 0.5)][1] <= sqf[(1, 0.5)][1]
