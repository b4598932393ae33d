"""
Conductor bookkeeping for the Weil restriction B = Res_{K/Q}(E_γ).

Milne's formula gives

    N_B = Nm_{K/Q}(N_{E_γ}) · Disc(K/Q)²,    Disc(K/Q) = 2⁴5³,

with Nm(𝔓₂) = 4, Nm(𝔓₅) = 5 and Nm((c₀)) = c₀⁴.  B splits into two
GL₂-type surfaces whose four 2-dimensional λ-adic pieces have the
conductors of the golden conductor table below; the Serre level of the
residual representation is the first column with c₀ removed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

logger = logging.getLogger("qcurve.weil")

NORM_P2 = 4
NORM_P5 = 5
DISC_K = (4, 3)  # 2⁴5³

NU2_CLASSES = ("0", ">=3", "2", "1")
EQUATIONS = ("Eq4", "Eq5")
SERRE_LEVELS = (1600, 800, 400, 100)


class CaseLabelError(Exception):
    """Raised for an unknown (equation, ν₂) case or an out-of-range exponent."""


# ---------------------------------------------------------------------------
# Data Models
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ConductorIdeal:
    """2^exp2 · 5^exp5 · c₀^c0_power, as an integer (over="Q") or as 𝔓₂^exp2 𝔓₅^exp5 (c₀) (over="K")."""
    exp2: int
    exp5: int
    c0_power: int = 1
    over: str = "Q"

    def __post_init__(self):
        if min(self.exp2, self.exp5, self.c0_power) < 0:
            raise ValueError(f"negative exponent in {self}")
        if self.over not in ("Q", "K"):
            raise ValueError(f"over must be 'Q' or 'K', got {self.over!r}")

    def value(self, c0: int = 1) -> int:
        if self.over != "Q":
            raise ValueError("only rational conductors have an integer value")
        if c0 % 2 == 0 or c0 % 5 == 0:
            raise ValueError(f"c₀ must be coprime to 10, got {c0}")
        return 2 ** self.exp2 * 5 ** self.exp5 * c0 ** self.c0_power

    def without_c0(self) -> int:
        return 2 ** self.exp2 * 5 ** self.exp5

    def __mul__(self, other: "ConductorIdeal") -> "ConductorIdeal":
        if self.over != other.over:
            raise ValueError("cannot multiply conductors over different fields")
        return ConductorIdeal(self.exp2 + other.exp2, self.exp5 + other.exp5,
                              self.c0_power + other.c0_power, self.over)

    def label(self) -> str:
        if self.over == "K":
            parts = [f"P2^{self.exp2}" if self.exp2 else "", f"P5^{self.exp5}" if self.exp5 else ""]
        else:
            parts = [f"2^{self.exp2}" if self.exp2 else "", f"5^{self.exp5}" if self.exp5 else ""]
        if self.c0_power:
            parts.append("c0" if self.c0_power == 1 else f"c0^{self.c0_power}")
        return "·".join(p for p in parts if p) or "1"

    def to_dict(self) -> dict:
        return {"label": self.label(), "exp2": self.exp2, "exp5": self.exp5, "c0_power": self.c0_power}


def _q(e2: int, e5: int, c: int = 1) -> ConductorIdeal:
    return ConductorIdeal(e2, e5, c, "Q")


# Conductor of E_γ by case: list of possible 𝔓₂, 𝔓₅ exponents.
FREY_TWIST_EXPONENTS: dict[tuple[str, str], tuple[tuple[int, int], ...]] = {
    ("Eq4", "1"): ((8, 2),),
    ("Eq4", "2"): ((0, 2),),
    ("Eq4", ">=3"): ((4, 2),),
    ("Eq4", "0"): ((8, 2), (6, 2)),
    ("Eq5", "1"): ((8, 0),),
    ("Eq5", "2"): ((0, 0),),
    ("Eq5", ">=3"): ((4, 0),),
    ("Eq5", "0"): ((8, 0), (6, 0)),
}

# N_B as stated for each case.
STATED_WEIL_CONDUCTORS: dict[tuple[str, str], tuple[ConductorIdeal, ...]] = {
    ("Eq4", "0"): (_q(24, 8, 4), _q(20, 8, 4)),
    ("Eq4", "1"): (_q(24, 8, 4),),
    ("Eq4", "2"): (_q(8, 8, 4),),
    ("Eq4", ">=3"): (_q(16, 8, 4),),
    ("Eq5", "0"): (_q(24, 6, 4), _q(20, 6, 4)),
    ("Eq5", "1"): (_q(24, 6, 4),),
    ("Eq5", "2"): (_q(8, 6, 4),),
    ("Eq5", ">=3"): (_q(16, 6, 4),),
}

# Conductors of ρ_{S1}, ρ_{S1}^σ, ρ_{S2}, ρ_{S2}^σ.
CONDUCTOR_TABLE: dict[tuple[str, str], tuple[ConductorIdeal, ...]] = {
    ("Eq4", "0"): (_q(6, 2), _q(6, 2), _q(6, 2), _q(6, 2)),
    ("Eq4", ">=3"): (_q(6, 2), _q(6, 2), _q(6, 2), _q(6, 2)),
    ("Eq4", "2"): (_q(4, 2), _q(4, 2), _q(4, 2), _q(4, 2)),
    ("Eq4", "1"): (_q(2, 2), _q(4, 2), _q(4, 2), _q(4, 2)),
    ("Eq5", "0"): (_q(5, 2), _q(5, 2), _q(5, 1), _q(5, 0)),
    ("Eq5", ">=3"): (_q(6, 2), _q(6, 2), _q(6, 1), _q(6, 1)),
    ("Eq5", "2"): (_q(4, 2), _q(4, 2), _q(4, 1), _q(4, 1)),
    ("Eq5", "1"): (_q(2, 2), _q(2, 2), _q(2, 1), _q(2, 1)),
}


def case_key(case) -> tuple[str, str]:
    """Normalise (equation, ν₂ class) or a SolutionCase to a table key."""
    if hasattr(case, "equation_tag"):
        key = (case.equation_tag, case.nu2_class)
    else:
        try:
            equation, nu2 = case
        except (TypeError, ValueError):
            raise CaseLabelError(f"expected (equation, ν₂ class), got {case!r}") from None
        nu2 = str(nu2)
        if nu2 in ("3", "inf", "≥3") or (nu2.isdigit() and int(nu2) >= 3):
            nu2 = ">=3"
        key = (str(equation), nu2)
    if key not in CONDUCTOR_TABLE:
        raise CaseLabelError(f"unknown case {key!r}")
    return key


# ---------------------------------------------------------------------------
# Milne
# ---------------------------------------------------------------------------
def milne_conductor(N_E: ConductorIdeal) -> ConductorIdeal:
    """Nm_{K/Q}(N_E)·Disc(K/Q)²."""
    if N_E.over != "K":
        raise ValueError("milne_conductor expects a conductor of a curve over K")
    return ConductorIdeal(
        exp2=2 * N_E.exp2 + 2 * DISC_K[0],
        exp5=N_E.exp5 + 2 * DISC_K[1],
        c0_power=4 * N_E.c0_power,
        over="Q",
    )


@dataclass(frozen=True)
class MilneCheck:
    case: tuple[str, str]
    computed: tuple[ConductorIdeal, ...]
    stated: tuple[ConductorIdeal, ...]

    @property
    def ok(self) -> bool:
        return set(self.computed) == set(self.stated)

    def to_dict(self) -> dict:
        return {
            "case": list(self.case),
            "computed": [c.label() for c in self.computed],
            "stated": [c.label() for c in self.stated],
            "ok": self.ok,
        }


def milne_check(case) -> MilneCheck:
    key = case_key(case)
    computed = tuple(milne_conductor(ConductorIdeal(e2, e5, 1, "K")) for e2, e5 in FREY_TWIST_EXPONENTS[key])
    return MilneCheck(key, computed, STATED_WEIL_CONDUCTORS[key])


# ---------------------------------------------------------------------------
# Conductor table
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class TableRow:
    equation_tag: str
    nu2_class: str
    entries: tuple[ConductorIdeal, ...]

    @property
    def product(self) -> ConductorIdeal:
        total = ConductorIdeal(0, 0, 0)
        for entry in self.entries:
            total = total * entry
        return total

    @property
    def serre_level(self) -> int:
        return self.entries[0].without_c0()

    def sigma_pairs_equal(self) -> bool:
        """ρ and ρ^σ have the same conductor for both surfaces."""
        return self.entries[0] == self.entries[1] and self.entries[2] == self.entries[3]

    def to_dict(self) -> dict:
        return {
            "equation": self.equation_tag,
            "nu2": self.nu2_class,
            "entries": [e.label() for e in self.entries],
        }


@dataclass(frozen=True)
class RowDiagnostic:
    row: TableRow
    product: ConductorIdeal
    milne: tuple[ConductorIdeal, ...]
    product_matches: bool
    sigma_pairs_equal: bool

    @property
    def discrepancy(self) -> bool:
        return not (self.product_matches and self.sigma_pairs_equal)

    def to_dict(self) -> dict:
        return {
            **self.row.to_dict(),
            "product": self.product.label(),
            "milne": [m.label() for m in self.milne],
            "product_matches": self.product_matches,
            "sigma_pairs_equal": self.sigma_pairs_equal,
        }


def conductor_table(case) -> TableRow:
    """The golden row for *case*; mismatches with Milne are logged, never corrected."""
    key = case_key(case)
    row = TableRow(key[0], key[1], CONDUCTOR_TABLE[key])
    diag = diagnose_row(row)
    if diag.discrepancy:
        logger.warning("table row %s: product %s vs Milne %s, ρ/ρ^σ equal: %s",
                       key, diag.product.label(), [m.label() for m in diag.milne], diag.sigma_pairs_equal)
    return row


def diagnose_row(row: TableRow) -> RowDiagnostic:
    milne = milne_check((row.equation_tag, row.nu2_class)).computed
    product = row.product
    return RowDiagnostic(
        row=row,
        product=product,
        milne=milne,
        product_matches=product in milne,
        sigma_pairs_equal=row.sigma_pairs_equal(),
    )


def all_row_diagnostics() -> list[RowDiagnostic]:
    return [diagnose_row(conductor_table(key)) for key in CONDUCTOR_TABLE]


# ---------------------------------------------------------------------------
# Serre parameters
# ---------------------------------------------------------------------------
IRREDUCIBILITY_BOUND = 13


@dataclass(frozen=True)
class SerreData:
    case: tuple[str, str]
    level: int
    weight: int
    character: str
    conditions: tuple[str, ...]

    def __post_init__(self):
        if self.level not in SERRE_LEVELS:
            raise ValueError(f"Serre level {self.level} outside {SERRE_LEVELS}")
        if 1600 % self.level:
            raise ValueError(f"Serre level {self.level} does not divide 1600")

    def applies_to(self, p: int) -> bool:
        return p > IRREDUCIBILITY_BOUND and p % 2 != 0 and p % 5 != 0

    def to_dict(self) -> dict:
        return {
            "case": list(self.case),
            "level": self.level,
            "weight": self.weight,
            "character": self.character,
            "conditions": list(self.conditions),
        }


def serre_parameters(case) -> SerreData:
    key = case_key(case)
    row = conductor_table(key)
    return SerreData(
        case=key,
        level=row.serre_level,
        weight=2,
        character="conj(ε)",
        conditions=(
            f"p > {IRREDUCIBILITY_BOUND}: the residual representation is absolutely irreducible",
            "p ∤ 10",
            "weight 2: good reduction at p when p ∤ c, finite at p when p | c",
            "character conj(ε) = ε⁻¹ of the splitting character",
        ),
    )


def twisted_serre_level(exponent2: int) -> int:
    """Serre level of the χ₈-twisted representation from the 𝔓₂-exponent of E_{γ,2}."""
    if exponent2 not in (0, 4):
        raise CaseLabelError(f"𝔓₂-exponent of E_γ,2 must be 0 or 4, got {exponent2}")
    weil = milne_conductor(ConductorIdeal(exponent2, 2, 1, "K"))
    # four pieces with equal conductor at 2; at 5 the first piece carries 5²
    e2 = (weil.exp2) // 4
    return 2 ** e2 * 5 ** 2
