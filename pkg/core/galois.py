"""
Dirichlet characters, the cocycle table of the Frey curve and the embedding
problem whose solution is the twist γ = 2θ² − θ − 5.

ε = ε₂ε₅ is the order-4 character of conductor 20 with ε₂ the quadratic
character mod 4 and ε₅(2) = i.  Its fixed field is K.

The embedding problem is checked through its concrete data in K(√−2):

    N_σ₀(α₀) = −1,   N_σ₁(α₁) = 5,   σ₁(α₀)/α₀ = σ₀(α₁)/α₁

with α₀ = ½(−1 + θ + θ²)√−2 and α₁ = −5 + 2θ², and the splitting map β
whose coboundary q(g, h) = β_g·g(β_h)·β_gh⁻¹ must be rational.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd

from sympy import divisors, legendre_symbol

from core.elliptic import GAMMA, IdentityCheck
from core.fields import (
    SQRT_M2,
    THETA,
    THETA_NUMERIC,
    FieldAutomorphism,
    GaloisGroupK2,
    GaussianElt,
    I,
    OctElt,
    QuarticElt,
    galois_group_K,
    galois_group_K_sqrtm2,
    relative_norm,
)
from core.localization import P2, P3, P5, valuation

logger = logging.getLogger("qcurve.galois")

ONE = GaussianElt(1)


# ---------------------------------------------------------------------------
# Dirichlet characters
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class DirichletChar:
    """A character of (Z/mZ)* with values in Q(i), stored on the units mod m."""
    modulus: int
    table: tuple[tuple[int, GaussianElt], ...]
    name: str = ""

    def __post_init__(self):
        units = [n for n in range(1, self.modulus + 1) if gcd(n, self.modulus) == 1]
        if sorted(n % self.modulus for n, _ in self.table) != sorted(n % self.modulus for n in units):
            raise ValueError(f"{self.name or 'character'}: table must cover the units mod {self.modulus}")

    @classmethod
    def from_function(cls, modulus: int, fn, name: str = "") -> "DirichletChar":
        units = [n for n in range(1, modulus + 1) if gcd(n, modulus) == 1]
        return cls(modulus, tuple((n % modulus, GaussianElt._coerce(fn(n))) for n in units), name)

    @property
    def values(self) -> dict[int, GaussianElt]:
        return dict(self.table)

    def __call__(self, n: int) -> GaussianElt:
        if gcd(n, self.modulus) != 1:
            return GaussianElt(0)
        return self.values[n % self.modulus]

    def __mul__(self, other: "DirichletChar") -> "DirichletChar":
        m = self.modulus * other.modulus // gcd(self.modulus, other.modulus)
        return DirichletChar.from_function(m, lambda n: self(n) * other(n), f"{self.name}{other.name}")

    def conj(self) -> "DirichletChar":
        return DirichletChar(self.modulus, tuple((n, v.conj()) for n, v in self.table), f"conj({self.name})")

    def power(self, k: int) -> "DirichletChar":
        return DirichletChar(self.modulus, tuple((n, v ** k) for n, v in self.table), f"{self.name}^{k}")

    def is_trivial(self) -> bool:
        return all(v == ONE for _, v in self.table)

    def order(self) -> int:
        k = 1
        while not self.power(k).is_trivial():
            k += 1
        return k

    def conductor(self) -> int:
        for d in divisors(self.modulus):
            if all(v == ONE for n, v in self.table if n % d == 1 % d):
                return d
        return self.modulus

    def is_multiplicative(self) -> bool:
        units = [n for n, _ in self.table]
        return all(self(a * b) == self(a) * self(b) for a, b in product(units, repeat=2))

    def fixed_field_degree(self) -> int:
        return len({v for _, v in self.table})

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "modulus": self.modulus,
            "order": self.order(),
            "conductor": self.conductor(),
            "values": {str(n): str(v) for n, v in self.table},
        }


def char_value(chi: DirichletChar, n: int) -> GaussianElt:
    return chi(n)


def _epsilon2() -> DirichletChar:
    return DirichletChar(4, ((1, ONE), (3, GaussianElt(-1))), "ε2")


def _epsilon5() -> DirichletChar:
    # 2 generates (Z/5)*
    table = tuple((pow(2, k, 5), I ** k) for k in range(4))
    return DirichletChar(5, table, "ε5")


def chi8() -> DirichletChar:
    """The character of Q(√2): +1 on ±1 mod 8, −1 on ±3 mod 8."""
    return DirichletChar.from_function(8, lambda n: 1 if n % 8 in (1, 7) else -1, "χ8")


@dataclass(frozen=True)
class EpsilonReport:
    epsilon: DirichletChar
    checks: tuple[IdentityCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def build_epsilon() -> DirichletChar:
    """ε = ε₂ε₅ mod 20."""
    eps = _epsilon2() * _epsilon5()
    return DirichletChar(eps.modulus, eps.table, "ε")


def epsilon_checks(eps: DirichletChar | None = None) -> EpsilonReport:
    eps = eps or build_epsilon()
    square = eps.power(2)
    legendre_ok = all(square(n) == int(legendre_symbol(n % 5, 5)) for n, _ in square.table)
    checks = (
        IdentityCheck("epsilon_order", eps.order() == 4, str(eps.order()), "4"),
        IdentityCheck("epsilon_conductor", eps.conductor() == 20, str(eps.conductor()), "20"),
        IdentityCheck("epsilon_even", eps(-1) == ONE, str(eps(-1)), "1"),
        IdentityCheck("epsilon_bar_3", eps.conj()(3) == -I, str(eps.conj()(3)), "-i"),
        IdentityCheck("epsilon_squared_is_legendre_5", legendre_ok),
        IdentityCheck("epsilon_squared_conductor", square.conductor() == 5, str(square.conductor()), "5"),
        IdentityCheck("epsilon_fourth_trivial", eps.power(4).is_trivial()),
        IdentityCheck("epsilon_multiplicative", eps.is_multiplicative()),
        IdentityCheck("epsilon_fixed_field_degree", eps.fixed_field_degree() == 4,
                      str(eps.fixed_field_degree()), "4"),
    )
    return EpsilonReport(epsilon=eps, checks=checks)


# ---------------------------------------------------------------------------
# Cocycle table
# ---------------------------------------------------------------------------
KLEIN_LABELS = ("1", "σ", "τ", "στ")

# c(g, h), rows g and columns h in KLEIN_LABELS order
COCYCLE_TABLE: tuple[tuple[int, ...], ...] = (
    (1, 1, 1, 1),
    (1, 1, -1, -1),
    (1, 1, -2, -2),
    (1, 1, 2, 2),
)

# degree of the isogeny attached to each element
ISOGENY_DEGREE = {"1": 1, "σ": 1, "τ": 2, "στ": 2}


def _klein_mul(g: str, h: str) -> str:
    # σ and τ are commuting involutions
    bits = {"1": (0, 0), "σ": (1, 0), "τ": (0, 1), "στ": (1, 1)}
    a, b = bits[g], bits[h]
    key = ((a[0] + b[0]) % 2, (a[1] + b[1]) % 2)
    return {v: k for k, v in bits.items()}[key]


@dataclass(frozen=True)
class CocycleReport:
    checked: int
    failures: tuple[tuple[str, str, str], ...]
    degree_failures: tuple[tuple[str, str], ...]
    normalized: bool

    @property
    def ok(self) -> bool:
        return not self.failures and not self.degree_failures and self.normalized

    def to_dict(self) -> dict:
        return {
            "checked": self.checked,
            "failures": [list(f) for f in self.failures],
            "degree_failures": [list(f) for f in self.degree_failures],
            "normalized": self.normalized,
            "table": [list(row) for row in COCYCLE_TABLE],
        }


def cocycle_value(g: str, h: str) -> int:
    return COCYCLE_TABLE[KLEIN_LABELS.index(g)][KLEIN_LABELS.index(h)]


def cocycle_table_check() -> CocycleReport:
    """2-cocycle condition on all 64 triples and the degree rule c(g,h)² = d(g)d(h)/d(gh)."""
    failures = []
    for g, h, k in product(KLEIN_LABELS, repeat=3):
        lhs = cocycle_value(g, h) * cocycle_value(_klein_mul(g, h), k)
        rhs = cocycle_value(h, k) * cocycle_value(g, _klein_mul(h, k))
        if lhs != rhs:
            failures.append((g, h, k))
    degree_failures = []
    for g, h in product(KLEIN_LABELS, repeat=2):
        d = ISOGENY_DEGREE
        if Fraction(cocycle_value(g, h) ** 2) != Fraction(d[g] * d[h], d[_klein_mul(g, h)]):
            degree_failures.append((g, h))
    normalized = all(cocycle_value("1", x) == 1 and cocycle_value(x, "1") == 1 for x in KLEIN_LABELS)
    report = CocycleReport(64, tuple(failures), tuple(degree_failures), normalized)
    logger.info("cocycle table: %d triples, %d failures", report.checked, len(failures))
    return report


# ---------------------------------------------------------------------------
# Embedding problem
# ---------------------------------------------------------------------------
HALF = Fraction(1, 2)
ALPHA0 = OctElt(QuarticElt.of(0), QuarticElt.of(-HALF, HALF, HALF))
ALPHA1 = OctElt(QuarticElt.of(-5, 0, 2))
BETA_BY_SIGMA0_POWER = (
    OctElt(QuarticElt.of(1)),
    ALPHA0,
    OctElt(QuarticElt.of(2, -1, -1)),
    OctElt(QuarticElt.of(0), QuarticElt.of(Fraction(3, 2), -HALF, -HALF)),
)


@dataclass(frozen=True)
class EmbeddingData:
    group: GaloisGroupK2
    alpha0: OctElt
    alpha1: OctElt
    gamma: QuarticElt
    checks: tuple[IdentityCheck, ...]
    sigma0_theta: str

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def beta(self, g) -> OctElt:
        """β_g; it depends only on the σ₀-exponent of g."""
        return BETA_BY_SIGMA0_POWER[self.group.index(g) % 4]

    def to_dict(self) -> dict:
        return {
            "sigma0_theta": self.sigma0_theta,
            "alpha0": repr(self.alpha0),
            "alpha1": repr(self.alpha1),
            "gamma": str(self.gamma),
            "checks": [c.to_dict() for c in self.checks],
        }


def _embedding_for(base: FieldAutomorphism) -> EmbeddingData:
    group = galois_group_K_sqrtm2(base)
    s0, s1 = group.sigma0, group.sigma1
    n0 = relative_norm(ALPHA0, s0)
    n1 = relative_norm(ALPHA1, s1)
    left = s1(ALPHA0) / ALPHA0
    right = s0(ALPHA1) / ALPHA1
    checks = (
        IdentityCheck("norm_sigma0_alpha0", n0 == -1, repr(n0), "-1"),
        IdentityCheck("norm_sigma1_alpha1", n1 == 5, repr(n1), "5"),
        IdentityCheck("compatibility_quotient", left == right, repr(left), repr(right)),
        IdentityCheck("sigma0_order", s0.order() == 4, str(s0.order()), "4"),
        IdentityCheck("sigma1_order", s1.order() == 2, str(s1.order()), "2"),
    )
    return EmbeddingData(group, ALPHA0, ALPHA1, gamma(), checks, str(base.theta_image))


def _sigma0_candidates() -> list[FieldAutomorphism]:
    gal = galois_group_K()
    return [g for g in (gal[1], gal[3]) if g.restricts_to_conjugation()]


def embedding_verify() -> EmbeddingData:
    """Try σ₀(θ) = θ³ − 3θ first, then its inverse; keep the first that passes."""
    tried = []
    for base in _sigma0_candidates():
        data = _embedding_for(base)
        tried.append(data)
        if data.ok and splitting_map_check(data).rational:
            logger.info("σ₀(θ) = %s satisfies the embedding conditions", data.sigma0_theta)
            return data
        logger.info("σ₀(θ) = %s rejected", data.sigma0_theta)
    logger.warning("no choice of σ₀ passes the embedding conditions")
    return tried[0]


@dataclass(frozen=True)
class SplittingReport:
    values: dict
    untwisted_values: dict
    non_rational: tuple[tuple[str, str], ...]
    cocycle_failures: tuple[tuple[str, str, str], ...]
    zeta: GaussianElt | None

    @property
    def rational(self) -> bool:
        return not self.non_rational

    @property
    def ok(self) -> bool:
        return self.rational and not self.cocycle_failures and self.zeta == GaussianElt(-1)

    def to_dict(self) -> dict:
        return {
            "values": {f"{g},{h}": str(v) for (g, h), v in self.values.items()},
            "untwisted_rational": sum(1 for v in self.untwisted_values.values() if v.is_rational()),
            "non_rational": [list(x) for x in self.non_rational],
            "cocycle_failures": [list(x) for x in self.cocycle_failures[:10]],
            "zeta": str(self.zeta) if self.zeta is not None else None,
            "ok": self.ok,
        }


def splitting_map_check(data: EmbeddingData | None = None) -> SplittingReport:
    """q(g, h) = β_g·g(β_h)·β_gh⁻¹ on all 64 pairs, its cocycle identity and ζ."""
    data = data or embedding_verify()
    group = data.group
    labels = {g: group.label(g) for g in group.elements}
    raw, untwisted, non_rational = {}, {}, []
    for g, h in product(group.elements, repeat=2):
        gh = group.product(g, h)
        q = data.beta(g) * g(data.beta(h)) / data.beta(gh)
        raw[(g, h)] = q
        untwisted[(labels[g], labels[h])] = data.beta(g) * data.beta(h) / data.beta(gh)
        if not q.is_rational():
            non_rational.append((labels[g], labels[h]))

    values = {(labels[g], labels[h]): GaussianElt(q.u.coords[0]) for (g, h), q in raw.items() if q.is_rational()}
    failures = []
    if not non_rational:
        for g, h, k in product(group.elements, repeat=3):
            gh, hk = group.product(g, h), group.product(h, k)
            lhs = raw[(g, h)] * raw[(gh, k)]
            rhs = g(raw[(h, k)]) * raw[(g, hk)]
            if lhs != rhs:
                failures.append((labels[g], labels[h], labels[k]))

    zeta = None
    s0 = group.sigma0
    powers = [group.elements[j] for j in range(4)]
    if all((labels[x], labels[s0]) in values for x in powers):
        zeta = ONE
        for x in powers:
            zeta = zeta * values[(labels[x], labels[s0])]
    report = SplittingReport(values, untwisted, tuple(non_rational), tuple(failures), zeta)
    logger.info("splitting map: %d non-rational values, ζ = %s", len(non_rational), zeta)
    return report


# ---------------------------------------------------------------------------
# γ
# ---------------------------------------------------------------------------
def gamma() -> QuarticElt:
    return 2 * THETA * THETA - THETA - 5


@dataclass(frozen=True)
class GammaReport:
    value: QuarticElt
    valuations: dict
    numeric: float
    orbit_size: int
    norm: Fraction
    matches_frey_twist: bool
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "gamma": str(self.value),
            "coordinates": [str(c) for c in self.value.coords],
            "valuations": dict(self.valuations),
            "numeric": round(self.numeric, 6),
            "theta_numeric": round(THETA_NUMERIC, 6),
            "orbit_size": self.orbit_size,
            "norm": str(self.norm),
            "matches_frey_twist": self.matches_frey_twist,
        }


def gamma_report() -> GammaReport:
    g = gamma()
    if g.is_zero():
        raise ArithmeticError("γ vanished")
    return GammaReport(
        value=g,
        valuations={P.label: valuation(g, P) for P in (P2, P3, P5)},
        numeric=g.to_float(),
        orbit_size=len(set(g.conjugates())),
        norm=g.norm(),
        matches_frey_twist=g == GAMMA,
    )


def sqrt_m2_norm_check() -> IdentityCheck:
    """N_σ₁(√−2) = 2."""
    group = galois_group_K_sqrtm2()
    n = relative_norm(SQRT_M2, group.sigma1)
    return IdentityCheck("norm_sigma1_sqrt_m2", n == 2, repr(n), "2")
