import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bellcorr.errors import BudgetExceeded
from bellcorr.preproc import (
    PreprocessingWiring, achievable_boosted_functions, boosted_bell_bound, find_boost_witness, input_points,
    is_boosted_achievable, linear_functions_on_inputs, product_table,
)


def brute_force_achievable(n, x_len, d, w):
    """Enumerate every explicit (alpha_j, g_j) assignment for all n parties."""
    pts = input_points(x_len, w)
    per_party = set()
    for alpha in itertools.product(range(w), repeat=x_len):
        for g in itertools.product(range(d), repeat=w):
            per_party.add(tuple(g[sum(a * v for a, v in zip(alpha, x)) % w] for x in pts))
    out = set()
    for combo in itertools.product(sorted(per_party), repeat=n):
        out.add(tuple(sum(col) % d for col in zip(*combo)))
    return out


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("x_len", [2, 3])
def test_binary_closure(n, x_len):
    # at d = 2 every achievable function is affine in x
    bset = achievable_boosted_functions(n, x_len, 2)
    assert len(bset) == 2 ** (x_len + 1)
    assert not bset.report()["strict_superset"]


@pytest.mark.parametrize("n,x_len,d", [(1, 2, 2), (2, 2, 2), (3, 2, 2), (1, 2, 3), (2, 2, 3), (2, 3, 2)])
def test_matches_brute_force(n, x_len, d):
    bset = achievable_boosted_functions(n, x_len, d)
    assert bset.as_set() == brute_force_achievable(n, x_len, d, d)


def test_mixed_modulus_matches_brute_force():
    bset = achievable_boosted_functions(2, 2, 2, wiring_modulus=3, input_modulus=3)
    assert bset.as_set() == brute_force_achievable(2, 2, 2, 3)


@pytest.mark.parametrize("x_len,d", [(2, 2), (2, 3), (3, 2)])
def test_monotone_in_parties(x_len, d):
    prev = None
    for n in range(1, 4):
        cur = achievable_boosted_functions(n, x_len, d).as_set()
        if prev is not None:
            assert prev <= cur
        prev = cur


@pytest.mark.parametrize("x_len,d", [(2, 2), (2, 3), (3, 2), (2, 5)])
def test_contains_linear_functions(x_len, d):
    bset = achievable_boosted_functions(1, x_len, d)
    for row in linear_functions_on_inputs(x_len, d):
        assert bset.contains(row)


def test_ternary_two_parties():
    bset = achievable_boosted_functions(2, 2, 3)
    rep = bset.report()
    assert rep["achievable"] == 729 and rep["linear_on_inputs"] == 27
    assert rep["strict_superset"]
    assert bset.contains(product_table(2, 3, exponent=1))
    assert not bset.contains(product_table(2, 3))
    for s in rep["samples"]:
        assert "x1^2*x2^2" not in s["polynomial"]


def test_top_monomial_not_reached_at_three_parties():
    assert not is_boosted_achievable(product_table(2, 3), 2, 3, n_max=3)


@pytest.mark.parametrize("table,x_len,d,w,n_expect", [
    (product_table(2, 2), 2, 2, 2, None),
    (product_table(2, 3, exponent=1), 2, 3, 3, 2),
    (product_table(2, 3, exponent=1, input_modulus=2), 2, 3, 2, 3),
])
def test_witness_reproduces_table(table, x_len, d, w, n_expect):
    wit = find_boost_witness(table, x_len, d, n_max=3, wiring_modulus=w, input_modulus=w)
    if n_expect is None:
        assert wit is None
        return
    assert wit.n == n_expect
    for x, v in zip(input_points(x_len, w), table):
        assert wit.evaluate(x, d) == v


@settings(max_examples=25)
@given(seed=st.integers(0, 10 ** 6))
def test_witness_for_random_achievable_table(seed):
    rng = np.random.default_rng(seed)
    bset = achievable_boosted_functions(2, 2, 3)
    row = bset.all_tables()[rng.integers(len(bset))]
    wit = find_boost_witness(row, 2, 3, n_max=2)
    assert wit is not None
    assert [wit.evaluate(x, 3) for x in input_points(2, 3)] == [int(v) for v in row]


def test_wiring_settings():
    wr = PreprocessingWiring(2, ((1, 0), (1, 1)), (3, 3))
    assert wr.settings((2, 2)) == (2, 1)


def test_budget_exceeded_keeps_partial():
    with pytest.raises(BudgetExceeded) as exc:
        achievable_boosted_functions(3, 2, 3, budget=2000)
    part = exc.value.partial
    assert part is not None and not part.complete
    assert part.n == 2 and part.evaluations <= 2000
    full = achievable_boosted_functions(part.n, 2, 3) if part.n else None
    if full is not None:
        assert part.as_set() == full.as_set()


def test_boosted_bell_bounds():
    # AND of two bits: 3/4 classically however many parties share the inputs
    assert boosted_bell_bound(product_table(2, 2), 4, 2, 2) == Fraction(3, 4)
    assert boosted_bell_bound(product_table(2, 3), 2, 2, 3) == Fraction(8, 9)
    # achievable targets reach 1
    assert boosted_bell_bound(product_table(2, 3, exponent=1), 2, 2, 3) == 1
    w = [Fraction(1, 2), 0, 0, Fraction(1, 2)]
    assert boosted_bell_bound(product_table(2, 2), 2, 2, 2, weights=w) == 1
