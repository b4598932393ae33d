import pytest

from core.fields import I, GaussianElt, QuarticElt
from core.galois import (
    COCYCLE_TABLE,
    KLEIN_LABELS,
    DirichletChar,
    build_epsilon,
    chi8,
    cocycle_table_check,
    cocycle_value,
    embedding_verify,
    epsilon_checks,
    gamma,
    gamma_report,
    splitting_map_check,
    sqrt_m2_norm_check,
)


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("n, expected", [
    (1, GaussianElt(1)),
    (3, I),
    (7, -I),
    (9, GaussianElt(-1)),
    (19, GaussianElt(1)),
    (23, I),
    (10, GaussianElt(0)),
])
def test_epsilon_values(n, expected):
    assert build_epsilon()(n) == expected


def test_epsilon_structure():
    eps = build_epsilon()
    assert eps.modulus == 20
    assert eps.order() == 4
    assert eps.conductor() == 20
    assert eps.conj()(3) == -I
    assert eps.power(2).conductor() == 5


def test_epsilon_checks_pass():
    report = epsilon_checks()
    assert report.ok, [c.name for c in report.checks if not c.ok]


def test_chi8():
    chi = chi8()
    assert chi(7) == 1 and chi(9) == 1
    assert chi(3) == -1 and chi(5) == -1
    assert chi(4) == 0
    assert chi.order() == 2
    assert chi.conductor() == 8


def test_character_table_must_cover_units():
    with pytest.raises(ValueError):
        DirichletChar(5, ((1, GaussianElt(1)), (2, I)), "partial")


def test_character_to_dict():
    record = build_epsilon().to_dict()
    assert record["order"] == 4
    assert record["values"]["3"] == str(I)


# ---------------------------------------------------------------------------
# Cocycle and embedding problem
# ---------------------------------------------------------------------------
def test_cocycle_table_check():
    report = cocycle_table_check()
    assert report.checked == 64
    assert report.ok
    assert len(COCYCLE_TABLE) == len(KLEIN_LABELS) == 4


def test_cocycle_is_normalised():
    for g in KLEIN_LABELS:
        assert cocycle_value("1", g) == cocycle_value(g, "1") == 1


def test_embedding_problem():
    data = embedding_verify()
    assert data.ok, [c.to_dict() for c in data.checks if not c.ok]
    assert data.group.sigma0.order() == 4


def test_splitting_map_is_rational_with_zeta_minus_one():
    report = splitting_map_check()
    assert report.rational
    assert not report.cocycle_failures
    assert report.zeta == GaussianElt(-1)
    assert report.ok
    assert len(report.values) == 64


def test_sqrt_m2_relative_norm():
    assert sqrt_m2_norm_check().ok


# ---------------------------------------------------------------------------
# γ
# ---------------------------------------------------------------------------
def test_gamma_report():
    report = gamma_report()
    assert report.value == gamma() == QuarticElt.of(-5, -1, 2)
    assert report.valuations == {"P2": 0, "P3": 0, "P5": 1}
    assert report.numeric == pytest.approx(0.334, abs=1e-3)
    assert report.orbit_size == 4
    assert report.norm == 5
    assert report.matches_frey_twist
    assert report.to_dict()["coordinates"] == ["-5", "-1", "2", "0"]
