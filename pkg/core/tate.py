"""
Tate's algorithm at a prime 𝔓 of K and the conductor profiles of the Frey twist.

The algorithm runs on exact elements of K.  Everything it needs from the
completion comes from three primitives of the localization layer: the
valuation ν_𝔓, the residue map to O_K/𝔓 and its lift back to Z[θ], plus a
uniformizer π.  Square and cube roots are only ever taken in the residue
field, where they are Frobenius powers (x^(2^(f−1)) in characteristic 2,
x^(3^(f−1)) in characteristic 3).

The conductor exponent follows from the Kodaira type through Ogg's formula
f = ν(Δ_min) + 1 − (number of components).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from core.descent import DEFAULT_TRIAL_LIMIT, SolutionCase, SolutionInputError, classify_solution, prime_support
from core.elliptic import DegenerateCurveError, WeierstrassCurve, frey_twist, frey_twist2
from core.localization import P2, P5, FiniteFieldElt, PrimeLocalization, primes_above
from core.transform import WeierstrassTransform, compose_all
from core.weil import FREY_TWIST_EXPONENTS, case_key

logger = logging.getLogger("qcurve.tate")


class TateConvergenceError(Exception):
    """Raised when Tate's loop fails to terminate; this signals an arithmetic bug."""


# ---------------------------------------------------------------------------
# Data Models
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ReductionData:
    """Local reduction data of a curve at one prime."""
    prime: str
    p: int
    kodaira: str
    conductor_exponent: int
    kind: str
    disc_valuation: int
    minimal_model: WeierstrassCurve
    transform: WeierstrassTransform = field(default_factory=WeierstrassTransform)

    def __post_init__(self):
        expected = {"good": lambda f: f == 0, "multiplicative": lambda f: f == 1, "additive": lambda f: f >= 2}
        if self.kind not in expected:
            raise ValueError(f"unknown reduction kind {self.kind!r}")
        if not expected[self.kind](self.conductor_exponent):
            raise ValueError(f"{self.kind} reduction with conductor exponent {self.conductor_exponent}")
        if self.p >= 5 and self.conductor_exponent > 2:
            raise ValueError(f"exponent {self.conductor_exponent} > 2 at {self.prime} (p = {self.p})")

    def to_dict(self) -> dict:
        return {
            "prime": self.prime,
            "kodaira": self.kodaira,
            "conductor_exponent": self.conductor_exponent,
            "kind": self.kind,
            "disc_valuation": self.disc_valuation,
            "minimal_model": self.minimal_model.to_dict(),
            "transform": self.transform.to_audit_dict(),
        }


class _Local:
    """Residue-field helpers at one prime."""

    def __init__(self, P: PrimeLocalization):
        self.P = P
        self.p = P.p
        self.pi = P.uniformizer
        self.F = P.residue_field

    def v(self, z) -> int | float:
        return self.P.valuation(z)

    def res(self, z) -> FiniteFieldElt:
        return self.P.residue(z)

    def lift(self, a: FiniteFieldElt):
        return self.P.lift(a)

    def sqrt(self, a: FiniteFieldElt) -> FiniteFieldElt:
        if self.p != 2:
            raise ArithmeticError("Frobenius square roots only in characteristic 2")
        return a ** (2 ** (self.F.f - 1))

    def cbrt(self, a: FiniteFieldElt) -> FiniteFieldElt:
        if self.p != 3:
            raise ArithmeticError("Frobenius cube roots only in characteristic 3")
        return a ** (3 ** (self.F.f - 1))


def _integral_scaling(curve: WeierstrassCurve, loc: _Local) -> int:
    k = 0
    for i, a in zip((1, 2, 3, 4, 6), curve.ainvs):
        va = loc.v(a)
        if va != math.inf and va < 0:
            k = max(k, math.ceil(-va / i))
    return k


# ---------------------------------------------------------------------------
# Tate's algorithm
# ---------------------------------------------------------------------------
def tate_local(E: WeierstrassCurve, P: PrimeLocalization) -> ReductionData:
    """Minimal model, Kodaira type and conductor exponent of *E* at *P*."""
    if not isinstance(P, PrimeLocalization):
        raise TypeError(f"expected a PrimeLocalization, got {type(P).__name__}")
    curve = E.base_change_to_K()
    if curve.discriminant == 0:
        raise DegenerateCurveError("Tate's algorithm on a singular model")
    loc = _Local(P)
    p, pi = loc.p, loc.pi
    pi2 = pi * pi
    steps: list[WeierstrassTransform] = []

    def apply(T: WeierstrassTransform):
        nonlocal curve
        curve = curve.change_coordinates(T)
        steps.append(T)

    def done(kodaira: str, exponent: int, kind: str, vD: int) -> ReductionData:
        data = ReductionData(
            prime=P.label,
            p=p,
            kodaira=kodaira,
            conductor_exponent=exponent,
            kind=kind,
            disc_valuation=vD,
            minimal_model=curve,
            transform=compose_all(steps),
        )
        logger.debug("%s: type %s, exponent %d, v(Δ) = %d", P.label, kodaira, exponent, vD)
        return data

    k = _integral_scaling(curve, loc)
    if k:
        apply(WeierstrassTransform.scaling(pi ** (-k)))

    max_rounds = int(loc.v(curve.discriminant)) // 12 + 2
    for _ in range(max_rounds):
        vD = loc.v(curve.discriminant)
        if vD == 0:
            return done("I0", 0, "good", 0)

        # move the singular point of the reduction to (0, 0)
        a1, a2, a3, a4, a6 = (loc.res(c) for c in curve.ainvs)
        if p == 2:
            if loc.v(curve.b2) > 0:
                r = loc.sqrt(a4)
                t = loc.sqrt(((r + a2) * r + a4) * r + a6)
            else:
                a1inv = a1.inverse()
                r = a1inv * a3
                t = a1inv * (a4 + r * r)
        elif p == 3:
            if loc.v(curve.b2) > 0:
                r = loc.cbrt(-loc.res(curve.b6))
            else:
                r = -loc.res(curve.b4) / loc.res(curve.b2)
            t = a1 * r + a3
        else:
            if loc.v(curve.c4) > 0:
                r = -loc.res(curve.b2) / 12
            else:
                r = -(loc.res(curve.c6) + loc.res(curve.b2) * loc.res(curve.c4)) / (loc.res(curve.c4) * 12)
            t = -(a1 * r + a3) / 2
        apply(WeierstrassTransform.translation(r=loc.lift(r), t=loc.lift(t)))

        if loc.v(curve.b2) == 0:
            return done(f"I{vD}", 1, "multiplicative", vD)
        if loc.v(curve.a6) < 2:
            return done("II", vD, "additive", vD)
        if loc.v(curve.b8) < 3:
            return done("III", vD - 1, "additive", vD)
        if loc.v(curve.b6) < 3:
            return done("IV", vD - 2, "additive", vD)

        # change coordinates so that π | a₁, a₂; π² | a₃, a₄; π³ | a₆
        if p == 2:
            s = loc.lift(loc.sqrt(loc.res(curve.a2)))
            t = pi * loc.lift(loc.sqrt(loc.res(curve.a6 / pi2)))
        elif p == 3:
            s, t = curve.a1, curve.a3
        else:
            half = (p + 1) // 2
            s, t = -curve.a1 * half, -curve.a3 * half
        apply(WeierstrassTransform.translation(s=s, t=t))

        b = curve.a2 / pi
        c = curve.a4 / pi2
        d = curve.a6 / (pi2 * pi)
        w = 27 * d * d - b * b * c * c + 4 * b * b * b * d - 18 * b * c * d + 4 * c * c * c
        x = 3 * c - b * b
        if loc.v(w) == 0:
            return done("I0*", vD - 4, "additive", vD)

        if loc.v(x) == 0:
            # double root of T³ + bT² + cT + d
            rb, rc, rd, rx = loc.res(b), loc.res(c), loc.res(d), loc.res(x)
            if p == 2:
                r = loc.sqrt(rc)
            elif p == 3:
                r = rc / rb
            else:
                r = (rb * rc - 9 * rd) / (2 * rx)
            apply(WeierstrassTransform.translation(r=pi * loc.lift(r)))
            ix = iy = 3
            mx = my = pi2
            while True:
                xa3 = curve.a3 / my
                xa6 = curve.a6 / (mx * my)
                if loc.v(xa3 * xa3 + 4 * xa6) == 0:
                    break
                if p == 2:
                    t = my * loc.lift(loc.sqrt(loc.res(xa6)))
                else:
                    t = my * loc.lift(-loc.res(xa3) / 2)
                apply(WeierstrassTransform.translation(t=t))
                my = my * pi
                iy += 1
                xa2 = curve.a2 / pi
                xa4 = curve.a4 / (pi * mx)
                xa6 = curve.a6 / (mx * my)
                if loc.v(xa4 * xa4 - 4 * xa2 * xa6) == 0:
                    break
                if p == 2:
                    r = mx * loc.lift(loc.sqrt(loc.res(xa6) / loc.res(xa2)))
                else:
                    r = mx * loc.lift(-loc.res(xa4) / (2 * loc.res(xa2)))
                apply(WeierstrassTransform.translation(r=r))
                mx = mx * pi
                ix += 1
                if ix + iy > 2 * vD + 6:
                    raise TateConvergenceError(f"I*m loop at {P.label} did not stop")
            m = ix + iy - 5
            return done(f"I{m}*", vD - m - 4, "additive", vD)

        # triple root
        rb, rd = loc.res(b), loc.res(d)
        if p == 2:
            r = rb
        elif p == 3:
            r = loc.cbrt(-rd)
        else:
            r = -rb / 3
        apply(WeierstrassTransform.translation(r=pi * loc.lift(r)))
        x3 = curve.a3 / pi2
        x6 = curve.a6 / (pi2 * pi2)
        if loc.v(x3 * x3 + 4 * x6) == 0:
            return done("IV*", vD - 6, "additive", vD)
        if p == 2:
            t = -pi2 * loc.lift(loc.sqrt(loc.res(x6)))
        else:
            t = pi2 * loc.lift(-loc.res(x3) / 2)
        apply(WeierstrassTransform.translation(t=t))
        if loc.v(curve.a4) < 4:
            return done("III*", vD - 7, "additive", vD)
        if loc.v(curve.a6) < 6:
            return done("II*", vD - 8, "additive", vD)
        # non-minimal: divide a_i by π^i and start again
        apply(WeierstrassTransform.scaling(pi))
        logger.info("%s: model was not minimal, rescaled", P.label)

    raise TateConvergenceError(f"Tate's algorithm at {P.label} did not terminate")


# ---------------------------------------------------------------------------
# Conductor profiles of E_γ
# ---------------------------------------------------------------------------
def expected_exponents(case: SolutionCase) -> tuple[tuple[int, int], ...]:
    """Allowed (e₂, e₅) for E_γ by equation shape and ν₂(a + b)."""
    return FREY_TWIST_EXPONENTS[case_key(case)]


@dataclass(frozen=True)
class ConductorProfile:
    case: SolutionCase
    exponents: dict
    multiplicative: tuple[str, ...]
    local: tuple[ReductionData, ...]
    expected: tuple[tuple[int, int], ...]
    multiplicative_ok: bool
    unverified_tail: tuple[int, ...] = ()

    @property
    def matches(self) -> bool:
        return (self.exponents["P2"], self.exponents["P5"]) in self.expected and self.multiplicative_ok

    def to_dict(self) -> dict:
        return {
            "case": self.case.to_dict(),
            "exponents": dict(self.exponents),
            "expected": [list(e) for e in self.expected],
            "multiplicative": list(self.multiplicative),
            "multiplicative_ok": self.multiplicative_ok,
            "matches": self.matches,
            "local": [r.to_dict() for r in self.local],
            "unverified_tail": list(self.unverified_tail),
        }


def conductor_profile(a: int, b: int, d: int, trial_limit: int = DEFAULT_TRIAL_LIMIT) -> ConductorProfile:
    """Run Tate at 𝔓₂, 𝔓₅ and above every trial-division prime of φ(a, b) / 5^ν."""
    case = classify_solution(a, b, d, trial_limit=trial_limit)
    curve = frey_twist(a, b)
    local = [tate_local(curve, P2), tate_local(curve, P5)]
    primes, tail = prime_support(case.c0_radical, trial_limit)
    multiplicative, mult_ok = [], True
    for q in primes:
        above = [tate_local(curve, P) for P in primes_above(q)]
        local.extend(above)
        hits = [r.prime for r in above if r.conductor_exponent == 1]
        multiplicative.extend(hits)
        if not hits or any(r.conductor_exponent > 1 for r in above):
            mult_ok = False
    profile = ConductorProfile(
        case=case,
        exponents={"P2": local[0].conductor_exponent, "P5": local[1].conductor_exponent},
        multiplicative=tuple(multiplicative),
        local=tuple(local),
        expected=expected_exponents(case),
        multiplicative_ok=mult_ok,
        unverified_tail=tail,
    )
    if not profile.matches:
        logger.warning("conductor of E_γ(%d, %d) = %s, expected one of %s",
                       a, b, profile.exponents, profile.expected)
    else:
        logger.info("conductor of E_γ(%d, %d): %s", a, b, profile.exponents)
    return profile


@dataclass(frozen=True)
class Twist2Result:
    a: int
    b: int
    exponent: int
    reduction: ReductionData

    @property
    def in_expected(self) -> bool:
        return self.exponent in (0, 4)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "exponent": self.exponent,
                "in_expected": self.in_expected, "reduction": self.reduction.to_dict()}


def twist2_conductor_at_2(a: int, b: int) -> Twist2Result:
    """Exponent of E_{γ,2} at 𝔓₂ for 2 ∥ a + b."""
    if a + b == 0 or (a + b) % 2 or (a + b) % 4 == 0:
        raise SolutionInputError(f"ν₂(a + b) must be 1, got a + b = {a + b}")
    data = tate_local(frey_twist2(a, b), P2)
    result = Twist2Result(a=a, b=b, exponent=data.conductor_exponent, reduction=data)
    if not result.in_expected:
        logger.warning("E_γ,2(%d, %d) has exponent %d at P2", a, b, result.exponent)
    return result
