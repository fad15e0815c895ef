import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bellcorr.correlator import (
    CorrelatorVector, FullCorrelatorVector, LhvPolytope, coord, correlator_from_distribution,
    deterministic_correlator, lhv_membership, lift_to_full, project_to_reduced,
)
from bellcorr.errors import NotNormalizable
from bellcorr.modfunc import FunctionOverSettings, Setting, enumerate_functions, enumerate_n_partite_linear
from bellcorr.nonsignaling import JointDistribution, gen_pr_box, product_distribution

from conftest import fn


def test_coordinate_order_k_inner():
    st = Setting.of(2, 2, 3)
    assert [coord(st, 0, 1), coord(st, 0, 2), coord(st, 1, 1)] == [0, 1, 2]


def test_deterministic_examples():
    st = Setting.of(2, 2, 2)
    assert deterministic_correlator(FunctionOverSettings.constant(st)).entries == (0,) * 4
    assert deterministic_correlator(fn(st, lambda a, b: a * b)).entries == (0, 0, 0, 1)
    st3 = Setting.of(2, 2, 3)
    v = deterministic_correlator(fn(st3, lambda a, b: a * b + 1))
    assert v.entries == (1, 0, 1, 0, 1, 0, 0, 1)


@pytest.mark.parametrize("triple", [(2, 2, 2), (2, 2, 3)])
def test_deterministic_correlator_injective(triple):
    s = Setting.of(*triple)
    vecs = [deterministic_correlator(f).entries for f in enumerate_functions(s)]
    assert len(set(vecs)) == len(vecs)


@pytest.mark.parametrize("triple,count", [((2, 2, 2), 8), ((2, 2, 3), 27), ((2, 2, 5), 125), ((3, 2, 2), 16),
                                          ((3, 2, 3), 81), ((2, 3, 2), 32), ((2, 4, 2), 128)])
def test_vertex_counts(triple, count):
    assert len(LhvPolytope(Setting.of(*triple))) == count


def test_lift_project_round_trip_and_errors(small_setting):
    z = CorrelatorVector.zero(small_setting)
    full = lift_to_full(z)
    d = small_setting.d
    assert all(full.entries[i * d] == 1 for i in range(small_setting.num_strings))
    u = CorrelatorVector.uniform(small_setting)
    assert set(lift_to_full(u).entries) == {Fraction(1, d)}
    assert project_to_reduced(lift_to_full(u)) == u
    bad = CorrelatorVector(small_setting, (1,) * small_setting.reduced_dim)
    if d > 2:
        with pytest.raises(NotNormalizable):
            lift_to_full(bad)


@given(st.data())
def test_project_lift_identity(data):
    s = Setting.of(2, 2, 3)
    blocks = []
    for _ in range(s.num_strings):
        a = data.draw(st.fractions(0, 1, max_denominator=7))
        b = data.draw(st.fractions(0, 1 - a, max_denominator=7))
        blocks += [a, b]
    c = CorrelatorVector(s, tuple(blocks))
    assert project_to_reduced(lift_to_full(c)) == c


def test_correlator_from_distribution_examples():
    st2 = Setting.of(2, 2, 2)
    pr = gen_pr_box(fn(st2, lambda a, b: a * b))
    assert correlator_from_distribution(pr) == deterministic_correlator(fn(st2, lambda a, b: a * b))
    st3 = Setting.of(2, 2, 3)
    noise = [[[Fraction(1, 3)] * 3] * 2] * 2
    assert correlator_from_distribution(product_distribution(st3, noise)) == CorrelatorVector.uniform(st3)


@pytest.mark.parametrize("triple", [(2, 2, 3), (3, 2, 2)])
def test_gen_box_correlator_is_deterministic(triple):
    s = Setting.of(*triple)
    for f in itertools.islice(enumerate_functions(s), 0, None, 7):
        assert correlator_from_distribution(gen_pr_box(f)) == deterministic_correlator(f)


@given(st.fractions(0, 1, max_denominator=9))
def test_correlator_map_is_affine(t):
    s = Setting.of(2, 2, 3)
    a = gen_pr_box(fn(s, lambda x, y: x * y))
    b = gen_pr_box(fn(s, lambda x, y: x + 2 * y))
    ca, cb = correlator_from_distribution(a), correlator_from_distribution(b)
    mixed = correlator_from_distribution(a.mix(b, t))
    assert mixed.entries == tuple((1 - t) * x + t * y for x, y in zip(ca.entries, cb.entries))


def test_lhv_membership_examples():
    s = Setting.of(2, 2, 2)
    lhv = LhvPolytope(s)
    res = lhv_membership(CorrelatorVector.uniform(s), lhv)
    assert res.member and sum(res.weights) == 1 and min(res.weights) >= 0
    out = lhv_membership(deterministic_correlator(fn(s, lambda a, b: a * b)), lhv)
    assert not out.member and out.violated is not None
    for f in enumerate_n_partite_linear(s):
        assert lhv_membership(deterministic_correlator(f), lhv)


@pytest.mark.parametrize("cached", [False, True])
def test_membership_weights_reconstruct_point(cached):
    s = Setting.of(2, 2, 3)
    lhv = LhvPolytope(s)
    if cached:
        lhv.hrep()
    p = CorrelatorVector(s, (Fraction(1, 4), Fraction(1, 4), Fraction(1, 3), 0, 0, Fraction(1, 3),
                             Fraction(1, 5), Fraction(1, 5)))
    res = lhv_membership(p, lhv)
    if res.member:
        recon = [sum(w * v[j] for w, v in zip(res.weights, lhv.vertices)) for j in range(s.reduced_dim)]
        assert tuple(recon) == p.entries
    else:
        b, g = res.violated
        assert sum(Fraction(x) * y for x, y in zip(b, p.entries)) > g


def test_membership_paths_agree():
    s = Setting.of(2, 2, 3)
    cached = LhvPolytope(s)
    cached.hrep()
    fresh = LhvPolytope(s)
    for f in itertools.islice(enumerate_functions(s), 0, None, 5):
        for t in (Fraction(1, 2), Fraction(1, 3)):
            p = CorrelatorVector(s, tuple(t * x + (1 - t) / 3 for x in deterministic_correlator(f).entries))
            assert bool(lhv_membership(p, cached)) == bool(lhv_membership(p, fresh))


def test_text_round_trip():
    s = Setting.of(2, 2, 3)
    c = CorrelatorVector.uniform(s)
    assert CorrelatorVector.from_text(c.to_text()) == c
