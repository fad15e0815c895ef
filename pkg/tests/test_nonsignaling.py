import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bellcorr.correlator import correlator_from_distribution, deterministic_correlator
from bellcorr.errors import InvalidSplit, NotNonsignaling
from bellcorr.geometry import LinearProgram, lp_solve
from bellcorr.modfunc import FunctionOverSettings, Setting, enumerate_functions, is_bipartite_linear
from bellcorr.nonsignaling import (
    JointDistribution, NsConstraintSystem, bipartite_box, gen_pr_box, is_nonsignaling, is_ns_vertex,
    local_deterministic, product_distribution, unique_ns_for_vertex,
)

from conftest import fn

HALF = Fraction(1, 2)


def test_pr_box_entries():
    s = Setting.of(2, 2, 2)
    pr = gen_pr_box(fn(s, lambda a, b: a * b))
    for x in s.strings:
        for m in itertools.product(range(2), repeat=2):
            assert pr.p(m, x) == (HALF if (m[0] + m[1]) % 2 == x[0] * x[1] else 0)
    assert is_nonsignaling(pr)


def test_gen_box_constant_and_ternary():
    s = Setting.of(2, 2, 2)
    box = gen_pr_box(FunctionOverSettings.constant(s))
    assert box.p((0, 0), (1, 0)) == box.p((1, 1), (1, 0)) == HALF and box.p((0, 1), (0, 0)) == 0
    s3 = Setting.of(2, 2, 3)
    box = gen_pr_box(fn(s3, lambda a, b: a * b + 1))
    assert set(box.entries) == {0, Fraction(1, 3)}
    assert sum(1 for x in box.row(3) if x) == 3


@pytest.mark.parametrize("triple", [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2)])
def test_gen_box_marginals_uniform(triple):
    s = Setting.of(*triple)
    rng = random.Random(0)
    for _ in range(5):
        f = FunctionOverSettings(s, tuple(rng.randrange(s.d) for _ in range(s.num_strings)))
        box = gen_pr_box(f)
        assert is_nonsignaling(box)
        assert correlator_from_distribution(box) == deterministic_correlator(f)
        outs = list(itertools.product(range(s.d), repeat=s.n))
        for x in s.strings:
            for j in range(s.n):
                for a in range(s.d):
                    assert sum(box.p(m, x) for m in outs if m[j] == a) == Fraction(1, s.d)


def test_signaling_table_detected():
    s = Setting.of(2, 2, 2)
    sig = JointDistribution.from_function(s, lambda m, x: int(m == (x[1], 0)))
    assert not is_nonsignaling(sig)
    with pytest.raises(NotNonsignaling):
        is_ns_vertex(sig)


@given(st.lists(st.fractions(0, 1, max_denominator=5), min_size=6, max_size=6))
def test_products_of_local_distributions_are_nonsignaling(ps):
    s = Setting.of(3, 2, 2)
    locals_ = [[[1 - ps[2 * j + a], ps[2 * j + a]] for a in range(2)] for j in range(3)]
    assert is_nonsignaling(product_distribution(s, locals_))


def test_bipartite_box_example():
    s = Setting.of(3, 2, 2)
    f = fn(s, lambda a, b, c: a * b)
    split = is_bipartite_linear(f)
    box = bipartite_box(f, split.A, split.B, split.fA, split.fB)
    assert box != gen_pr_box(f)
    assert is_nonsignaling(box)
    assert correlator_from_distribution(box) == deterministic_correlator(f)
    assert box.p((1, 0, 0), (1, 1, 0)) == box.p((0, 1, 0), (1, 1, 0)) == HALF
    assert box.p((1, 1, 0), (1, 1, 0)) == box.p((1, 0, 1), (1, 1, 0)) == 0
    with pytest.raises(InvalidSplit):
        bipartite_box(f, (0,), (1,), split.fA, split.fB)


def test_bipartite_box_of_linear_two_party_is_product():
    s = Setting.of(2, 2, 3)
    f = fn(s, lambda a, b: a + 2 * b)
    split = is_bipartite_linear(f)
    box = bipartite_box(f, split.A, split.B, split.fA, split.fB)
    det = local_deterministic(s, [[split.fA((a,)) for a in range(2)], [split.fB((b,)) for b in range(2)]])
    assert box == det


def test_lp_pins_pr_box_coordinate():
    s = Setting.of(2, 2, 2)
    f = fn(s, lambda a, b: a * b)
    system = NsConstraintSystem.build(s)
    A_eq = [r for r, _ in system.equalities]
    b_eq = [b for _, b in system.equalities]
    # vertex constraints: all mass on the support
    for si, x in enumerate(s.strings):
        row = [0] * system.nvars
        for mi, m in enumerate(itertools.product(range(2), repeat=2)):
            if (m[0] + m[1]) % 2 == f(x):
                row[si * 4 + mi] = 1
        A_eq.append(row)
        b_eq.append(1)
    obj = [0] * system.nvars
    obj[0] = 1
    hi = lp_solve(LinearProgram(obj, A_eq=A_eq, b_eq=b_eq, sense="max"))
    lo = lp_solve(LinearProgram(obj, A_eq=A_eq, b_eq=b_eq, sense="min"))
    assert hi.value == lo.value == HALF


@pytest.mark.parametrize("method", ["rank", "lp"])
def test_uniqueness_examples(method):
    s = Setting.of(2, 2, 2)
    res = unique_ns_for_vertex(fn(s, lambda a, b: a * b), method=method)
    assert res.unique and res.witness == gen_pr_box(fn(s, lambda a, b: a * b)) and res.prime_outcomes
    s3 = Setting.of(3, 2, 2)
    f = fn(s3, lambda a, b, c: a * b)
    res = unique_ns_for_vertex(f, method=method)
    assert not res.unique
    a, b = res.witness
    assert a != b
    for dist in (a, b):
        assert is_nonsignaling(dist)
        assert correlator_from_distribution(dist) == deterministic_correlator(f)
    assert unique_ns_for_vertex(fn(Setting.of(2, 2, 3), lambda x, y: x * y + 1), method=method).unique


def test_convex_mixture_of_witnesses_stays_compatible():
    s3 = Setting.of(3, 2, 2)
    f = fn(s3, lambda a, b, c: a * b)
    a, b = unique_ns_for_vertex(f).witness
    for t in (Fraction(1, 3), Fraction(1, 2), Fraction(4, 5)):
        m = a.mix(b, t)
        assert is_nonsignaling(m) and correlator_from_distribution(m) == deterministic_correlator(f)


@pytest.mark.parametrize("triple", [(2, 2, 2), (2, 2, 3)])
def test_rank_and_lp_routes_agree(triple):
    s = Setting.of(*triple)
    for f in itertools.islice(enumerate_functions(s), 0, None, 3 if s.d == 3 else 1):
        assert unique_ns_for_vertex(f).unique == unique_ns_for_vertex(f, method="lp").unique


@pytest.mark.parametrize("triple", [(2, 2, 2), (2, 2, 3)])
def test_uniqueness_iff_not_bipartite(triple):
    s = Setting.of(*triple)
    for f in enumerate_functions(s):
        assert unique_ns_for_vertex(f).unique == (is_bipartite_linear(f) is None)


def test_uniqueness_iff_not_bipartite_exhaustive_322():
    s = Setting.of(3, 2, 2)
    for f in enumerate_functions(s):
        assert unique_ns_for_vertex(f).unique == (is_bipartite_linear(f) is None)


def test_composite_outcomes_flagged_out_of_scope():
    s = Setting.of(2, 2, 4)
    res = unique_ns_for_vertex(fn(s, lambda a, b: a * b))
    assert not res.prime_outcomes


def test_ns_vertex_examples():
    s = Setting.of(2, 2, 2)
    assert is_ns_vertex(gen_pr_box(fn(s, lambda a, b: a * b)))
    s3 = Setting.of(3, 2, 2)
    assert not is_ns_vertex(gen_pr_box(fn(s3, lambda a, b, c: a * b)))
    assert is_ns_vertex(local_deterministic(s3, [[0, 1], [1, 1], [0, 0]]))


def test_distribution_validation_and_text():
    s = Setting.of(2, 2, 2)
    with pytest.raises(ValueError):
        JointDistribution(s, (1,) * 16)
    box = gen_pr_box(fn(s, lambda a, b: a * b))
    assert JointDistribution.from_text(box.to_text()) == box
