from fractions import Fraction

import pytest

from core.descent import SolutionInputError
from core.eliminate import (
    CM_SPLIT_CARTAN,
    INNER_TWIST_A3,
    P_1_MOD_4,
    TRACE_AT_3,
    TWIST_CARAYOL,
    Congruence,
    EliminationError,
    EliminationResult,
    S3Route,
    assemble_theorem,
    carayol_excludes,
    eligible_primes,
    frey_trace_at_P3,
    hecke_trace_81,
    hecke_trace_81_numeric,
    hecke_trace_oracle_check,
    inner_twist_shape,
    s1_conditions,
    s2_exceptional_primes,
    s3_eliminate,
    s3_parity_violations,
    sturm_bound,
    trace_at_3_eliminate,
    twist_and_match,
)
from core.fields import I, GaussianElt
from core.galois import build_epsilon, chi8
from core.newforms import NewformClass, classify_newform


def forms_of(newforms, tag, level=None):
    return [f for f in newforms if classify_newform(f) is tag and (level is None or f.level == level)]


# ---------------------------------------------------------------------------
# Inner twists and traces
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("q, shape", [(1, "t"), (19, "t"), (29, "it"), (3, "t-it"), (17, "t-it"), (7, "t+it"), (13, "t+it")])
def test_inner_twist_shape(q, shape):
    assert inner_twist_shape(q) == shape


def test_inner_twist_shape_needs_q_coprime_to_20():
    with pytest.raises(ValueError):
        inner_twist_shape(15)


def test_shapes_satisfy_the_inner_twist_relation():
    eps_bar = build_epsilon().conj()
    units = {"t": GaussianElt(1), "it": I, "t-it": 1 - I, "t+it": 1 + I}
    for q in (3, 7, 9, 11, 13, 17, 19, 21):
        u = units[inner_twist_shape(q)]
        assert u == u.conj() * eps_bar(q)


@pytest.mark.parametrize("a3, expected", [(2 * I - 2, 14), (I - 1, 2), (GaussianElt(0), -18), (2 - 2 * I, 14)])
def test_hecke_trace_81(a3, expected):
    assert hecke_trace_81(a3) == expected


def test_hecke_trace_81_numeric_agrees():
    assert hecke_trace_81_numeric(complex(-2, 2)) == pytest.approx(14)
    assert hecke_trace_oracle_check(samples=100) == []


def test_frey_trace_at_P3():
    assert frey_trace_at_P3(1, 2) == -18
    with pytest.raises(SolutionInputError):
        frey_trace_at_P3(1, 1)


@pytest.mark.parametrize("N, bound", [(1600, 480), (800, 240), (400, 120), (1, 1)])
def test_sturm_bound(N, bound):
    assert sturm_bound(N) == bound


def test_sturm_bound_validation():
    with pytest.raises(ValueError):
        sturm_bound(0)
    with pytest.raises(ValueError):
        sturm_bound(100, k=1)


def test_carayol_excludes():
    assert carayol_excludes(800, 100)
    assert carayol_excludes(800, 400)
    assert not carayol_excludes(800, 1600)
    assert not carayol_excludes(400, 400)


# ---------------------------------------------------------------------------
# Result model
# ---------------------------------------------------------------------------
def test_congruence():
    assert P_1_MOD_4.holds(29) and not P_1_MOD_4.holds(31)
    assert str(P_1_MOD_4) == "p ≡ 1 mod 4"
    with pytest.raises(ValueError):
        Congruence(7, frozenset({1}))


def test_elimination_result_eliminates():
    result = EliminationResult("f", CM_SPLIT_CARTAN, conditions=(P_1_MOD_4,), exceptional=frozenset({17}))
    assert result.eliminates(29)
    assert not result.eliminates(17)
    assert not result.eliminates(19)
    assert not result.eliminates(13)
    assert not EliminationResult("f", TRACE_AT_3, inconclusive=True).eliminates(101)


# ---------------------------------------------------------------------------
# S1
# ---------------------------------------------------------------------------
def test_s1_conditions(newforms):
    cm4 = next(f for f in newforms if f.cm_disc == -4)
    cm20 = next(f for f in newforms if f.cm_disc == -20)
    assert s1_conditions(cm4).conditions == (P_1_MOD_4,)
    result = s1_conditions(cm20, d=2)
    assert result.method == CM_SPLIT_CARTAN
    assert result.conditions[0].residues == frozenset({1, 4})


def test_s1_with_trace_route_for_d3(newforms):
    cm20 = next(f for f in newforms if f.cm_disc == -20)
    result = s1_conditions(cm20, d=3)
    assert result.method == TRACE_AT_3
    assert result.exceptional == frozenset({2, 5})
    assert result.conditions == ()


def test_s1_rejects_non_cm(newforms):
    with pytest.raises(EliminationError):
        s1_conditions(forms_of(newforms, NewformClass.S3)[0])


# ---------------------------------------------------------------------------
# S2
# ---------------------------------------------------------------------------
def test_s2_exceptional_primes(newforms):
    # field x⁴ + 4m² with c₃² = −2mi, keyed by the constant term
    expected = {100: frozenset({2, 5}), 16: frozenset({2}), 36: frozenset({2, 3})}
    for f in forms_of(newforms, NewformClass.S2):
        result = s2_exceptional_primes(f)
        assert result.method == INNER_TWIST_A3
        assert not result.inconclusive
        assert result.cross_check_ok
        if f.level == 800:
            assert result.exceptional == frozenset({3, 5})
        else:
            assert result.exceptional == expected[f.field.poly[0]], f.label


def test_s2_rejects_other_classes(newforms):
    with pytest.raises(EliminationError):
        s2_exceptional_primes(forms_of(newforms, NewformClass.S3)[0])


# ---------------------------------------------------------------------------
# S3
# ---------------------------------------------------------------------------
def test_trace_at_3(newforms):
    s3 = forms_of(newforms, NewformClass.S3, level=1600)
    results = {f.a_gaussian(3): trace_at_3_eliminate(f).exceptional for f in s3}
    assert results == {2 * I - 2: frozenset({2}), I - 1: frozenset({2, 5})}


def test_trace_at_3_with_zero_a3_is_inconclusive(newforms):
    cm4 = next(f for f in newforms if f.cm_disc == -4)
    assert cm4.a_gaussian(3) == 0
    assert trace_at_3_eliminate(cm4).inconclusive


def test_twist_and_match(newforms):
    for f in forms_of(newforms, NewformClass.S3, level=1600):
        match = twist_and_match(f, chi8(), newforms)
        assert match.level == 800
        assert match.target == f.label.replace("1600.", "800.")
        assert not match.conjugated
        assert match.compared_up_to == 480


def test_twist_and_match_rejects_cm_input(newforms):
    cm = next(f for f in newforms if f.cm_disc == -4 and f.level == 1600)
    with pytest.raises(EliminationError):
        twist_and_match(cm, chi8(), newforms)


def test_twist_and_match_without_level_800(newforms):
    f = forms_of(newforms, NewformClass.S3, level=1600)[0]
    with pytest.raises(EliminationError, match="no match"):
        twist_and_match(f, chi8(), [g for g in newforms if g.level != 800])


def test_s3_carayol_route(newforms):
    f = forms_of(newforms, NewformClass.S3, level=1600)[0]
    match = twist_and_match(f, chi8(), newforms)
    result = s3_eliminate(f, 2, S3Route(match=match))
    assert result.method == TWIST_CARAYOL
    assert not result.inconclusive
    assert result.eliminates(29)


def test_s3_carayol_route_needs_match(newforms):
    f = forms_of(newforms, NewformClass.S3, level=1600)[0]
    with pytest.raises(EliminationError):
        s3_eliminate(f, 2)


def test_s3_for_d3(newforms):
    f = forms_of(newforms, NewformClass.S3, level=1600)[0]
    assert s3_eliminate(f, 3).method == TRACE_AT_3
    known = s3_eliminate(f, 3, S3Route(twisted_exponent2=4))
    assert known.method == TWIST_CARAYOL and not known.inconclusive
    assert s3_eliminate(f, 3, S3Route(twisted_exponent2=6)).method == TRACE_AT_3
    with pytest.raises(SolutionInputError):
        s3_eliminate(f, 5)


def test_s3_parity(newforms):
    assert s3_parity_violations(newforms) == []


# ---------------------------------------------------------------------------
# Theorem
# ---------------------------------------------------------------------------
def test_theorem_d2(newforms):
    report = assemble_theorem(2, newforms)
    assert report.conditions == ("p > 13", "p ≡ 1 mod 4", "p ≡ ±1 mod 5")
    assert report.residues_mod_20 == (1, 9)
    assert report.density == Fraction(1, 4)
    assert not report.bound_discrepancy
    assert report.eliminates(29) and report.eliminates(41)
    assert not report.eliminates(37)
    assert report.to_dict()["density"] == 0.25


def test_theorem_d3(newforms, caplog):
    with caplog.at_level("WARNING", logger="qcurve.eliminate"):
        report = assemble_theorem(3, newforms)
    assert report.conditions == ("p > 73", "p ≡ 1 mod 4")
    assert report.residues_mod_20 == (1, 9, 13, 17)
    assert report.density == Fraction(1, 2)
    assert report.derived_lower_bound == 13
    assert report.bound_discrepancy
    assert "stated bound" in caplog.text


def test_theorem_rejects_other_exponents(newforms):
    with pytest.raises(SolutionInputError):
        assemble_theorem(5, newforms)


def test_theorem_on_incomplete_dataset(newforms):
    with pytest.raises(EliminationError):
        assemble_theorem(2, [f for f in newforms if f.level != 800])
    with pytest.raises(EliminationError):
        assemble_theorem(2, [f for f in newforms if f.level == 800])


# ---------------------------------------------------------------------------
# Eligible primes
# ---------------------------------------------------------------------------
def test_eligible_primes():
    assert eligible_primes(2, 100).primes == (29, 41, 61, 89)
    assert eligible_primes(3, 120).primes == (89, 97, 101, 109, 113)


def test_eligible_primes_validation():
    with pytest.raises(ValueError):
        eligible_primes(2, 50)
    with pytest.raises(SolutionInputError):
        eligible_primes(4, 1000)


@pytest.mark.slow
@pytest.mark.parametrize("d, target", [(2, 0.25), (3, 0.5)])
def test_eligible_density(d, target):
    report = eligible_primes(d, 10 ** 6)
    assert report.ok
    assert report.density == pytest.approx(target, abs=0.02)
