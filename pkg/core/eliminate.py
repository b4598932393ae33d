"""
Elimination of the newforms predicted by Serre's conjecture.

Every form f of S₂(M, conj(ε)) at a relevant level M is ruled out for all
exponents p outside a finite set, or outside congruence classes mod 4 and 5:

  S1  CM forms: images in a split Cartan normaliser once p splits in the CM field
  S2  c₃(f) ≢ t − ti (mod 𝔓) for |t| ≤ 2, checked through absolute norms
  S3  d = 2: twist by χ₈ lands at level 800 and Carayol forbids the congruence;
      d = 3: a_𝔓₃(f) = α⁴ + β⁴ ∈ {14, 2} against a_𝔓₃(E_γ) = −18

assemble_theorem folds the per-form results into the final statement.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy import primefactors, primepi, primerange

from core.descent import SolutionInputError
from core.elliptic import frey_twist, reduce_and_count
from core.fields import GaussianElt, I
from core.galois import DirichletChar, build_epsilon, chi8
from core.localization import P3
from core.newforms import NewformClass, NewformRecord, classify_newform, cm_field
from core.weil import IRREDUCIBILITY_BOUND, twisted_serre_level

logger = logging.getLogger("qcurve.eliminate")

CM_SPLIT_CARTAN = "CM-split-Cartan"
INNER_TWIST_A3 = "inner-twist-a3"
TRACE_AT_3 = "trace-at-3"
TWIST_CARAYOL = "twist-Carayol"

FREY_TRACE_AT_P3 = -18
WEIL_T_RANGE = (-2, -1, 0, 1, 2)  # |t − ti| ≤ 2√3

RELEVANT_LEVELS = {2: (1600, 400, 100), 3: (1600, 800, 400, 100)}
STATED_BOUND = {2: 13, 3: 73}
STATED_RESIDUES_MOD_20 = {2: (1, 9), 3: (1, 9, 13, 17)}
STATED_DENSITY = {2: Fraction(1, 4), 3: Fraction(1, 2)}
S2_SOUNDNESS_BOUND = 73


class EliminationError(Exception):
    """Raised when a newform cannot be eliminated or the assembly does not close."""


# ---------------------------------------------------------------------------
# Data Models
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Congruence:
    """p mod modulus ∈ residues."""
    modulus: int
    residues: frozenset[int]

    def __post_init__(self):
        if self.modulus not in (4, 5, 20):
            raise ValueError(f"congruences are taken mod 4, 5 or 20, got {self.modulus}")

    def holds(self, p: int) -> bool:
        return p % self.modulus in self.residues

    def __str__(self):
        return f"p ≡ {' or '.join(str(r) for r in sorted(self.residues))} mod {self.modulus}"


P_1_MOD_4 = Congruence(4, frozenset({1}))
P_PM1_MOD_5 = Congruence(5, frozenset({1, 4}))


@dataclass(frozen=True)
class EliminationResult:
    newform: str
    method: str
    conditions: tuple[Congruence, ...] = ()
    exceptional: frozenset[int] = frozenset()
    lower_bound: int = IRREDUCIBILITY_BOUND
    inconclusive: bool = False
    notes: tuple[str, ...] = ()
    cross_check: frozenset[int] | None = None

    def eliminates(self, p: int) -> bool:
        if self.inconclusive or p <= self.lower_bound or p in self.exceptional:
            return False
        return all(c.holds(p) for c in self.conditions)

    @property
    def cross_check_ok(self) -> bool:
        return self.cross_check is None or self.exceptional <= self.cross_check

    def to_dict(self) -> dict:
        out = {
            "newform": self.newform,
            "method": self.method,
            "conditions": [str(c) for c in self.conditions],
            "exceptional": sorted(self.exceptional),
            "lower_bound": self.lower_bound,
            "inconclusive": self.inconclusive,
            "notes": list(self.notes),
        }
        if self.cross_check is not None:
            out["fourth_power_primes"] = sorted(self.cross_check)
        return out


# ---------------------------------------------------------------------------
# Inner twists
# ---------------------------------------------------------------------------
_SHAPES = {1: "t", 19: "t", 9: "it", 11: "it", 3: "t-it", 17: "t-it", 7: "t+it", 13: "t+it"}
_SHAPE_UNIT = {"t": GaussianElt(1), "it": I, "t-it": 1 - I, "t+it": 1 + I}


def inner_twist_shape(q: int) -> str:
    """Shape forced on a_q by a_q = conj(a_q)·conj(ε)(q), for q coprime to 20."""
    if math.gcd(q, 20) != 1:
        raise ValueError(f"inner twist shape needs gcd(q, 20) = 1, got q = {q}")
    shape = _SHAPES[q % 20]
    unit = _SHAPE_UNIT[shape]
    if unit.conj() * build_epsilon().conj()(q) != unit:
        raise ArithmeticError(f"shape {shape} inconsistent with conj(ε)({q})")
    return shape


# ---------------------------------------------------------------------------
# S1
# ---------------------------------------------------------------------------
def s1_conditions(f: NewformRecord, d: int = 2) -> EliminationResult:
    if classify_newform(f) is not NewformClass.S1:
        raise EliminationError(f"{f.label} has no CM")
    if f.cm_disc == -4:
        return EliminationResult(f.label, CM_SPLIT_CARTAN, conditions=(P_1_MOD_4,),
                                 notes=("p splits in Q(i)",))
    if d == 3 and f.has_gaussian_field:
        a3 = f.a_gaussian(3)
        if a3 in (I - 1, 1 - I):
            result = trace_at_3_eliminate(f)
            return EliminationResult(f.label, TRACE_AT_3, exceptional=result.exceptional,
                                     inconclusive=result.inconclusive,
                                     notes=(f"CM by {cm_field(f)} with a_3 = {a3}",) + result.notes)
    return EliminationResult(f.label, CM_SPLIT_CARTAN, conditions=(P_PM1_MOD_5,),
                             notes=("p splits in Q(sqrt(-5))",))


# ---------------------------------------------------------------------------
# S2
# ---------------------------------------------------------------------------
def _primes_of(values: list[Fraction]) -> frozenset[int]:
    primes: set[int] = set()
    for v in values:
        primes.update(primefactors(abs(v.numerator)))
        primes.update(primefactors(v.denominator))
    return frozenset(primes)


def s2_exceptional_primes(f: NewformRecord) -> EliminationResult:
    """Primes dividing Nm(c₃ − (t − ti)) for |t| ≤ 2; the fourth-power norms are kept as a cross-check."""
    if classify_newform(f) is not NewformClass.S2:
        raise EliminationError(f"{f.label} is not of class S2")
    fld = f.field
    c3 = f.a(3)
    c3_fourth = fld.pow(c3, 4)
    direct, fourth, notes = [], [], []
    inconclusive = False
    for t in WEIL_T_RANGE:
        shape = fld.from_gaussian(GaussianElt(t, -t))
        n = fld.norm(fld.sub(c3, shape))
        if n == 0:
            inconclusive = True
            notes.append(f"c_3 = {t} - {t}i exactly")
            continue
        direct.append(n)
        n4 = fld.norm(fld.add(c3_fourth, fld.scalar(4 * t ** 4)))
        if n4 == 0:
            notes.append(f"c_3^4 = -4·{t}^4, fourth-power check skipped for t = {t}")
        else:
            fourth.append(n4)
    result = EliminationResult(
        f.label,
        INNER_TWIST_A3,
        exceptional=_primes_of(direct),
        inconclusive=inconclusive,
        notes=tuple(notes),
        cross_check=_primes_of(fourth),
    )
    if not result.cross_check_ok:
        logger.warning("%s: direct primes %s not inside fourth-power primes %s",
                       f.label, sorted(result.exceptional), sorted(result.cross_check))
    return result


# ---------------------------------------------------------------------------
# Trace at 𝔓₃
# ---------------------------------------------------------------------------
def hecke_trace_81(a3: GaussianElt) -> GaussianElt:
    """α⁴ + β⁴ for the roots of x² − a₃x + conj(ε)(3)·3, by power sums."""
    e1 = GaussianElt._coerce(a3)
    e2 = build_epsilon().conj()(3) * 3
    e1_sq = e1 * e1
    return e1_sq * e1_sq - 4 * e1_sq * e2 + 2 * e2 * e2


def hecke_trace_81_numeric(a3: complex) -> complex:
    e2 = complex(build_epsilon().conj()(3).to_complex() * 3)
    alpha, beta = np.roots([1.0, -complex(a3), e2])
    return complex(alpha ** 4 + beta ** 4)


def hecke_trace_oracle_check(samples: int = 100, seed: int = 0, tolerance: float = 1e-9) -> list[tuple[GaussianElt, complex, complex]]:
    """Random a₃ in the Weil disk where power sums and numeric roots disagree."""
    rng = np.random.default_rng(seed)
    radius = 2 * math.sqrt(3)
    failures = []
    drawn = 0
    while drawn < samples:
        re, im = rng.integers(-346, 347, size=2)
        a3 = GaussianElt(Fraction(int(re), 100), Fraction(int(im), 100))
        if abs(a3.to_complex()) > radius:
            continue
        drawn += 1
        exact = hecke_trace_81(a3).to_complex()
        numeric = hecke_trace_81_numeric(a3.to_complex())
        if abs(exact - numeric) > tolerance * max(1.0, abs(exact)):
            failures.append((a3, exact, numeric))
    return failures


def frey_trace_at_P3(a: int, b: int) -> int:
    if (a + b) % 3:
        raise SolutionInputError(f"3 does not divide a + b = {a + b}")
    _, trace = reduce_and_count(frey_twist(a, b), P3)
    return trace


def trace_at_3_eliminate(f: NewformRecord) -> EliminationResult:
    if not f.has_gaussian_field:
        raise EliminationError(f"{f.label}: a_3 must lie in Q(i)")
    a3 = f.a_gaussian(3)
    value = hecke_trace_81(a3)
    diff = value - FREY_TRACE_AT_P3
    norm = diff.norm()
    note = f"a_P3(f) = {value}, a_P3(E) = {FREY_TRACE_AT_P3}"
    if norm == 0:
        return EliminationResult(f.label, TRACE_AT_3, inconclusive=True, notes=(note,))
    return EliminationResult(f.label, TRACE_AT_3, exceptional=_primes_of([norm]), notes=(note,))


# ---------------------------------------------------------------------------
# S3
# ---------------------------------------------------------------------------
def sturm_bound(N: int, k: int = 2) -> int:
    if N < 1 or k < 2:
        raise ValueError(f"sturm_bound needs N ≥ 1 and k ≥ 2, got N={N}, k={k}")
    index = Fraction(N)
    for ell in primefactors(N):
        index *= Fraction(ell + 1, ell)
    return math.ceil(Fraction(k, 12) * index)


def twist_coefficients(f: NewformRecord, chi: DirichletChar) -> list[GaussianElt]:
    """a_n·χ(n) for 1 ≤ n ≤ horizon."""
    return [f.a_gaussian(n) * chi(n) for n in range(1, f.horizon + 1)]


@dataclass(frozen=True)
class TwistMatch:
    source: str
    target: str
    level: int
    conjugated: bool
    compared_up_to: int

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "level": self.level,
            "conjugated": self.conjugated,
            "compared_up_to": self.compared_up_to,
        }


def twist_and_match(f: NewformRecord, chi: DirichletChar, dataset: list[NewformRecord]) -> TwistMatch:
    """Find the unique stored form (or conjugate) equal to f ⊗ χ on the coefficients coprime to the modulus of χ."""
    if classify_newform(f) is not NewformClass.S3 or f.level != 1600:
        raise EliminationError(f"{f.label}: twisting is defined for S3 forms of level 1600")
    twisted = twist_coefficients(f, chi)
    matches: list[TwistMatch] = []
    for g in dataset:
        if g.label == f.label or not g.has_gaussian_field:
            continue
        horizon = min(len(twisted), g.horizon)
        indices = [n for n in range(1, horizon + 1) if math.gcd(n, chi.modulus) == 1]
        stored = [g.a_gaussian(n) for n in indices]
        candidate = [twisted[n - 1] for n in indices]
        if stored == candidate:
            matches.append(TwistMatch(f.label, g.label, g.level, False, horizon))
        elif [s.conj() for s in stored] == candidate:
            matches.append(TwistMatch(f.label, g.label, g.level, True, horizon))
    if not matches:
        raise EliminationError(f"{f.label} ⊗ {chi.name}: no match in the dataset (incomplete?)")
    if len(matches) > 1:
        raise EliminationError(f"{f.label} ⊗ {chi.name}: {len(matches)} matches {[m.target for m in matches]}")
    match = matches[0]
    if match.level != 800:
        raise EliminationError(f"{f.label} ⊗ {chi.name} matched {match.target} at level {match.level}, not 800")
    logger.info("%s ⊗ %s = %s%s", f.label, chi.name, match.target, " (conjugate)" if match.conjugated else "")
    return match


def carayol_excludes(level_f: int, level_rho: int) -> bool:
    """No congruence between newforms whose levels have different 2-valuations, the smaller one below."""
    def v2(n):
        return (n & -n).bit_length() - 1
    return v2(level_rho) < v2(level_f)


@dataclass(frozen=True)
class S3Route:
    match: TwistMatch | None = None
    twisted_exponent2: int | None = None


def s3_eliminate(f: NewformRecord, d: int, route: S3Route | None = None) -> EliminationResult:
    """Eliminate an S3 form for d = 2 or 3.

    d = 2 needs ``route.match`` from :func:`twist_and_match`. For d = 3 at level 1600
    the trace route at P3 is used unless the caller supplies
    ``route.twisted_exponent2``, the P2 exponent of the twisted Frey curve when it is
    known (4 or 0). The Carayol rule is then applied against level 800.
    ``assemble_theorem`` never sets it.
    """
    if classify_newform(f) is not NewformClass.S3:
        raise EliminationError(f"{f.label} is not of class S3")
    route = route or S3Route()

    if d == 2:
        if route.match is None:
            raise EliminationError(f"{f.label}: the Carayol route needs the level-800 twist")
        levels = [twisted_serre_level(e) for e in (0, 4)]
        if not all(carayol_excludes(route.match.level, m) for m in levels):
            return EliminationResult(f.label, TWIST_CARAYOL, inconclusive=True,
                                     notes=(f"levels {levels} vs {route.match.level}",))
        return EliminationResult(f.label, TWIST_CARAYOL,
                                 notes=(f"f ⊗ χ8 = {route.match.target} (level 800) against levels {levels}",))

    if d != 3:
        raise SolutionInputError(f"d must be 2 or 3, got {d}")
    if f.level == 800:
        return trace_at_3_eliminate(f)

    # twisting by χ₈ only flips the sign of a₃, which α⁴ + β⁴ ignores
    trace = trace_at_3_eliminate(f)
    exponent = route.twisted_exponent2
    if exponent is not None and exponent != 6:
        level = 2 ** exponent * 25
        if carayol_excludes(800, level):
            return EliminationResult(f.label, TWIST_CARAYOL, notes=(f"twisted Frey level {level}",))
        return EliminationResult(f.label, TWIST_CARAYOL, inconclusive=True,
                                 notes=(f"twisted Frey level {level} vs 800",))
    notes = trace.notes if exponent == 6 else trace.notes + ("twisted 2-exponent unknown: trace route covers both",)
    return EliminationResult(f.label, TRACE_AT_3, exceptional=trace.exceptional,
                             inconclusive=trace.inconclusive, notes=notes)


def s3_parity_violations(forms: list[NewformRecord], q_max: int = 50) -> list[tuple[str, int]]:
    """S3 forms at level 1600 must have a_q in the prime above 2 of Z[i]."""
    bad = []
    for f in forms:
        if f.level != 1600 or classify_newform(f) is not NewformClass.S3:
            continue
        for q in primerange(3, q_max + 1):
            if f.level % q == 0:
                continue
            a = f.a_gaussian(q)
            if (a.re - a.im) % 2 != 0:
                bad.append((f.label, q))
    return bad


# ---------------------------------------------------------------------------
# Theorem assembly
# ---------------------------------------------------------------------------
@dataclass
class TheoremReport:
    d: int
    lower_bound: int
    derived_lower_bound: int
    residues_mod_20: tuple[int, ...]
    density: Fraction
    results: list[EliminationResult] = field(default_factory=list)

    @property
    def conditions(self) -> tuple[str, ...]:
        out = [f"p > {self.lower_bound}"]
        if all(r % 4 == 1 for r in self.residues_mod_20):
            out.append(str(P_1_MOD_4))
        if all(r % 5 in (1, 4) for r in self.residues_mod_20):
            out.append("p ≡ ±1 mod 5")
        return tuple(out)

    @property
    def bound_discrepancy(self) -> bool:
        return self.derived_lower_bound != self.lower_bound

    def eliminates(self, p: int) -> bool:
        return p > self.lower_bound and p % 20 in self.residues_mod_20

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "conditions": list(self.conditions),
            "lower_bound": self.lower_bound,
            "derived_lower_bound": self.derived_lower_bound,
            "residues_mod_20": list(self.residues_mod_20),
            "density": float(self.density),
            "results": [r.to_dict() for r in self.results],
        }


def eliminate_form(f: NewformRecord, d: int, dataset: list[NewformRecord]) -> EliminationResult:
    tag = classify_newform(f)
    if tag is NewformClass.S1:
        return s1_conditions(f, d)
    if tag is NewformClass.S2:
        return s2_exceptional_primes(f)
    match = twist_and_match(f, chi8(), dataset) if f.level == 1600 else None
    return s3_eliminate(f, d, S3Route(match=match))


def assemble_theorem(d: int, dataset: list[NewformRecord]) -> TheoremReport:
    if d not in RELEVANT_LEVELS:
        raise SolutionInputError(f"d must be 2 or 3, got {d}")
    forms = [f for f in dataset if f.level in RELEVANT_LEVELS[d]]
    if not forms:
        raise EliminationError(f"no newforms at levels {RELEVANT_LEVELS[d]}")

    results = [eliminate_form(f, d, dataset) for f in forms]
    culprits = [r.newform for r in results if r.inconclusive]
    if culprits:
        raise EliminationError(f"inconclusive elimination for {culprits}")
    unsound = [(r.newform, p) for r in results if r.method == INNER_TWIST_A3
               for p in r.exceptional if p % 4 == 1 and p > S2_SOUNDNESS_BOUND]
    if unsound:
        raise EliminationError(f"S2 exceptional primes above {S2_SOUNDNESS_BOUND}: {unsound}")

    residues = tuple(r for r in range(20) if math.gcd(r, 20) == 1
                     and all(c.holds(r) for res in results for c in res.conditions))
    derived = max([IRREDUCIBILITY_BOUND] + [p for r in results for p in r.exceptional])
    stated = STATED_BOUND[d]
    if residues != STATED_RESIDUES_MOD_20[d]:
        raise EliminationError(f"d = {d}: congruence classes mod 20 are {residues}, expected {STATED_RESIDUES_MOD_20[d]}")
    if derived > stated:
        raise EliminationError(f"d = {d}: exceptional primes force p > {derived}, above the stated p > {stated}")
    if derived < stated:
        logger.warning("d = %d: exceptional sets give p > %d, stated bound is p > %d", d, derived, stated)

    report = TheoremReport(
        d=d,
        lower_bound=stated,
        derived_lower_bound=derived,
        residues_mod_20=residues,
        density=Fraction(len(residues), 8),
        results=results,
    )
    if report.density != STATED_DENSITY[d]:
        raise EliminationError(f"density {report.density} differs from {STATED_DENSITY[d]}")
    logger.info("d = %d: %d newforms eliminated, conditions %s", d, len(results), report.conditions)
    return report


# ---------------------------------------------------------------------------
# Eligible primes
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class EligibleReport:
    d: int
    X: int
    primes: tuple[int, ...]
    total: int
    density: float
    target: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return abs(self.density - self.target) <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "X": self.X,
            "count": len(self.primes),
            "first_primes": list(self.primes[:20]),
            "pi_X": self.total,
            "density": self.density,
            "target": self.target,
            "tolerance": self.tolerance,
            "ok": self.ok,
        }


def eligible_primes(d: int, X: int) -> EligibleReport:
    if d not in STATED_BOUND:
        raise SolutionInputError(f"d must be 2 or 3, got {d}")
    if X < 100:
        raise ValueError(f"X must be at least 100, got {X}")
    candidates = np.fromiter(primerange(2, X + 1), dtype=np.int64)
    mask = (candidates > STATED_BOUND[d]) & np.isin(candidates % 20, STATED_RESIDUES_MOD_20[d])
    primes = tuple(int(p) for p in candidates[mask])
    total = int(primepi(X))
    return EligibleReport(
        d=d,
        X=X,
        primes=primes,
        total=total,
        density=len(primes) / total,
        target=float(STATED_DENSITY[d]),
        tolerance=min(0.5, 20 / math.sqrt(X)),
    )
