import pytest

from core.descent import classify_solution
from core.weil import (
    CONDUCTOR_TABLE,
    CaseLabelError,
    ConductorIdeal,
    SerreData,
    all_row_diagnostics,
    case_key,
    conductor_table,
    diagnose_row,
    milne_check,
    milne_conductor,
    serre_parameters,
    twisted_serre_level,
)


# ---------------------------------------------------------------------------
# Conductor ideals
# ---------------------------------------------------------------------------
def test_conductor_value():
    assert ConductorIdeal(6, 2).value(3) == 64 * 25 * 3
    assert ConductorIdeal(6, 2).without_c0() == 1600
    assert ConductorIdeal(6, 2).label() == "2^6·5^2·c0"
    assert ConductorIdeal(0, 0, 0).label() == "1"


@pytest.mark.parametrize("c0", [5, 4, 10])
def test_conductor_value_needs_c0_coprime_to_ten(c0):
    with pytest.raises(ValueError):
        ConductorIdeal(6, 2).value(c0)


def test_conductor_ideal_validation():
    with pytest.raises(ValueError):
        ConductorIdeal(-1, 0)
    with pytest.raises(ValueError):
        ConductorIdeal(1, 1, 1, "R")
    with pytest.raises(ValueError):
        ConductorIdeal(8, 2, 1, "K").value()
    with pytest.raises(ValueError):
        ConductorIdeal(8, 2, 1, "K") * ConductorIdeal(8, 2)


# ---------------------------------------------------------------------------
# Case labels
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("case, expected", [
    (("Eq4", 1), ("Eq4", "1")),
    (("Eq4", "0"), ("Eq4", "0")),
    (("Eq5", 3), ("Eq5", ">=3")),
    (("Eq5", 7), ("Eq5", ">=3")),
    (("Eq4", "inf"), ("Eq4", ">=3")),
])
def test_case_key_normalisation(case, expected):
    assert case_key(case) == expected


def test_case_key_from_solution():
    assert case_key(classify_solution(1, -1, 2)) == ("Eq5", ">=3")
    assert case_key(classify_solution(1, 1, 2)) == ("Eq4", "1")


@pytest.mark.parametrize("case", [("Eq6", "0"), "Eq4", ("Eq4", "x"), 42])
def test_case_key_rejects_unknown_cases(case):
    with pytest.raises(CaseLabelError):
        case_key(case)


# ---------------------------------------------------------------------------
# Milne
# ---------------------------------------------------------------------------
def test_milne_conductor():
    weil = milne_conductor(ConductorIdeal(8, 2, 1, "K"))
    assert (weil.exp2, weil.exp5, weil.c0_power, weil.over) == (24, 8, 4, "Q")
    weil = milne_conductor(ConductorIdeal(0, 0, 1, "K"))
    assert (weil.exp2, weil.exp5) == (8, 6)


def test_milne_conductor_needs_curve_over_K():
    with pytest.raises(ValueError):
        milne_conductor(ConductorIdeal(8, 2))


def test_all_milne_checks_agree():
    for key in CONDUCTOR_TABLE:
        assert milne_check(key).ok, key


# ---------------------------------------------------------------------------
# Conductor table
# ---------------------------------------------------------------------------
def test_table_has_eight_rows():
    assert len(CONDUCTOR_TABLE) == 8
    assert all(len(entries) == 4 for entries in CONDUCTOR_TABLE.values())


def test_row_diagnostics():
    diagnostics = all_row_diagnostics()
    discrepancies = {(d.row.equation_tag, d.row.nu2_class) for d in diagnostics if d.discrepancy}
    assert len(discrepancies) == 7
    assert ("Eq4", "0") not in discrepancies


def test_sigma_pair_violations():
    broken = {(d.row.equation_tag, d.row.nu2_class) for d in all_row_diagnostics() if not d.sigma_pairs_equal}
    assert broken == {("Eq4", "1"), ("Eq5", "0")}


def test_matching_row():
    diag = diagnose_row(conductor_table(("Eq4", "0")))
    assert diag.product_matches
    assert diag.product == ConductorIdeal(24, 8, 4)
    assert not diag.discrepancy


def test_mismatch_is_logged(caplog):
    with caplog.at_level("WARNING", logger="qcurve.weil"):
        conductor_table(("Eq5", "1"))
    assert "table row" in caplog.text


# ---------------------------------------------------------------------------
# Serre parameters
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("case, level", [
    (("Eq4", "0"), 1600),
    (("Eq4", ">=3"), 1600),
    (("Eq4", "2"), 400),
    (("Eq4", "1"), 100),
    (("Eq5", "0"), 800),
    (("Eq5", ">=3"), 1600),
    (("Eq5", "2"), 400),
    (("Eq5", "1"), 100),
])
def test_serre_levels(case, level):
    data = serre_parameters(case)
    assert data.level == level
    assert data.weight == 2
    assert 1600 % data.level == 0


def test_serre_data_applies_to():
    data = serre_parameters(("Eq4", "0"))
    assert data.applies_to(17)
    assert not data.applies_to(13)
    assert not data.applies_to(5)


def test_serre_data_rejects_unknown_level():
    with pytest.raises(ValueError):
        SerreData(("Eq4", "0"), 200, 2, "conj(ε)", ())


@pytest.mark.parametrize("exponent, level", [(4, 400), (0, 100)])
def test_twisted_serre_level(exponent, level):
    assert twisted_serre_level(exponent) == level


def test_twisted_serre_level_rejects_other_exponents():
    with pytest.raises(CaseLabelError):
        twisted_serre_level(2)
