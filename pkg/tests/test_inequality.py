import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bellcorr.correlator import CorrelatorVector, LhvPolytope, deterministic_correlator, lift_to_full
from bellcorr.errors import LinearFunctionInput, SearchSpaceTooLarge, SettingMismatch, UnknownFamily
from bellcorr.geometry import is_facet_defining
from bellcorr.inequality import (
    BellInequality, CATALOG, InputWeights, algebraic_max_bruteforce, catalog_instances, count_nonlinear_functions,
    evaluate, lhv_bound, max_violating_vertices, named_family, nontrivial_from_function, vertex_values,
)
from bellcorr.modfunc import FunctionOverSettings, Setting, enumerate_n_partite_linear, is_n_partite_linear

from conftest import fn


def _lhv_bound_oracle(ineq):
    """Independent evaluation over enumerated linear functions with exact Fractions."""
    return max(evaluate(ineq, deterministic_correlator(f)) for f in enumerate_n_partite_linear(ineq.setting))


@pytest.mark.parametrize("ineq", catalog_instances(), ids=lambda i: f"{i.name}{i.setting}")
def test_catalog_bounds(ineq):
    assert ineq.gamma_L == ineq.bound == _lhv_bound_oracle(ineq)
    assert ineq.gamma_L <= ineq.gamma_P


@pytest.mark.parametrize("ineq", [i for i in catalog_instances() if i.setting.d ** i.setting.num_strings <= 10 ** 5],
                         ids=lambda i: f"{i.name}{i.setting}")
def test_gamma_P_closed_form_matches_bruteforce(ineq):
    assert ineq.gamma_P == algebraic_max_bruteforce(ineq)


def test_chsh_values():
    s = Setting.of(2, 2, 2)
    delta = named_family("CHSH-delta")
    assert evaluate(delta, deterministic_correlator(FunctionOverSettings.constant(s))) == 3
    assert evaluate(delta, deterministic_correlator(fn(s, lambda a, b: a * b))) == 4
    assert evaluate(delta, CorrelatorVector.zero(s)) == 3  # the zero vector is f = 0 in P
    assert evaluate(named_family("CHSH"), CorrelatorVector.zero(s)) == 0
    assert named_family("CHSH").gamma_L == 2 and delta.gamma_L == 3


def test_chsh_forms_agree_on_vertices():
    """Delta form and signed form are affinely related on all of P, hence on every vertex of L."""
    s = Setting.of(2, 2, 2)
    signed, delta = named_family("CHSH"), named_family("CHSH-delta")
    shifted = BellInequality.from_terms(s, lambda x, k: int(k == (x[0] * x[1] + 1) % 2), 3)
    for f in enumerate_n_partite_linear(s):
        v = deterministic_correlator(f)
        full = lift_to_full(v).entries
        p0, p1 = full[0::2], full[1::2]
        assert evaluate(delta, v) == p0[0] + p0[1] + p0[2] + p1[3]
        assert evaluate(signed, v) == p1[0] + p1[1] + p1[2] - p1[3]
        assert evaluate(delta, v) == 3 - evaluate(signed, v)
        assert evaluate(shifted, v) == evaluate(signed, v) + 1
    assert shifted.gamma_L == signed.gamma_L + 1 == 3


def test_named_family_examples():
    cg = named_family("CGLMP", Setting.of(2, 2, 3))
    assert cg.gamma_L == 3 and cg.gamma_P == 5
    assert named_family("B1").gamma_L == 8
    i2 = named_family("I2")
    assert [f.table for f in max_violating_vertices(i2)] == [(1, 1, 1, 3)]
    with pytest.raises(UnknownFamily):
        named_family("nope")
    with pytest.raises(UnknownFamily):
        named_family("CHSH", Setting.of(2, 2, 3))


def test_svetlichny_and_mermin_bounds():
    assert named_family("Svetlichny").gamma_L == 6
    assert named_family("Mermin").gamma_L == 2


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_cglmp_algebraic_max(d):
    cg = named_family("CGLMP", Setting.of(2, 2, d))
    assert cg.gamma_L == d and cg.gamma_P == 2 * d - 1
    if d > 2:
        st2 = Setting.of(2, 2, d)
        assert [f.table for f in max_violating_vertices(cg)] == [fn(st2, lambda a, b: a * b + 1).table]


def test_third_224_family():
    ineq = named_family("CHSH-parity-plus")
    assert ineq.gamma_L == 4 and ineq.gamma_P == 6
    s = Setting.of(2, 2, 4)
    assert [f.table for f in max_violating_vertices(ineq)] == [fn(s, lambda a, b: 2 * a * b + 2).table]


def test_facet_status():
    assert is_facet_defining(named_family("CHSH").canonical(), LhvPolytope(Setting.of(2, 2, 2)).vrep)
    assert is_facet_defining(named_family("CGLMP").canonical(), LhvPolytope(Setting.of(2, 2, 3)).vrep)
    assert not is_facet_defining(named_family("Svetlichny").canonical(), LhvPolytope(Setting.of(3, 2, 2)).vrep)


def test_nontrivial_generator_examples():
    s = Setting.of(2, 2, 2)
    ineq = nontrivial_from_function(fn(s, lambda a, b: a * b))
    assert ineq.gamma_L == Fraction(3, 4) and ineq.gamma_P == 1
    s3 = Setting.of(3, 2, 2)
    sv = nontrivial_from_function(fn(s3, lambda a, b, c: a * (b + c) + b * c))
    assert sv.gamma_L == Fraction(6, 8)
    assert count_nonlinear_functions(Setting.of(2, 2, 3)) == 54
    with pytest.raises(LinearFunctionInput):
        nontrivial_from_function(fn(s, lambda a, b: a + b))


@pytest.mark.parametrize("triple", [(2, 2, 3), (3, 2, 2)])
@given(data=st.data())
def test_positive_weights_give_nontrivial(triple, data):
    s = Setting.of(*triple)
    table = data.draw(st.lists(st.integers(0, s.d - 1), min_size=s.num_strings, max_size=s.num_strings))
    f = FunctionOverSettings(s, tuple(table))
    if is_n_partite_linear(f) is not None:
        return
    raw = data.draw(st.lists(st.integers(1, 9), min_size=s.num_strings, max_size=s.num_strings))
    w = InputWeights(s, tuple(Fraction(x, sum(raw)) for x in raw))
    ineq = nontrivial_from_function(f, w)
    assert ineq.gamma_L < ineq.gamma_P == 1
    assert ineq.gamma_L == _lhv_bound_oracle(ineq)


def test_weights_validation():
    s = Setting.of(2, 2, 2)
    with pytest.raises(ValueError):
        InputWeights(s, (1, 1, 0, 0))
    with pytest.raises(SettingMismatch):
        InputWeights(s, (1,))
    assert not InputWeights(s, (1, 0, 0, 0)).strictly_positive()


def test_evaluate_setting_mismatch():
    with pytest.raises(SettingMismatch):
        evaluate(named_family("CHSH"), CorrelatorVector.zero(Setting.of(2, 2, 3)))


def test_vertex_values_match_evaluate():
    ineq = named_family("CGLMP")
    from bellcorr.correlator import lhv_vertices
    vals = vertex_values(ineq)
    for v, val in zip(lhv_vertices(ineq.setting), vals):
        assert evaluate(ineq, CorrelatorVector(ineq.setting, v)) == val


def test_max_violating_limit():
    with pytest.raises(SearchSpaceTooLarge):
        max_violating_vertices(BellInequality(Setting.of(2, 2, 5), (0,) * 16), limit=10)


def test_record_round_trip():
    ineq = named_family("CGLMP")
    back = BellInequality.from_record(ineq.to_record())
    assert back.coeffs == ineq.coeffs and back.offset == ineq.offset and back.gamma_L == ineq.gamma_L


def test_catalog_covers_every_family():
    names = set(CATALOG)
    assert {"CHSH", "CGLMP", "CGLMP-slice", "CGLMP-diagonal", "Svetlichny", "Mermin", "C_c=3",
            "I1", "I2", "I3", "CHSH-parity-plus"} <= names
    assert {f"B{i}" for i in range(1, 12)} <= names
