"""
Weierstrass curves over Q(√5) and K, the Frey family and its twists.

For a coprime pair (a, b) the Frey curve over Q(√5) is

    E : y² = x³ + 2(a + b)x² − ω̄φ₁(a, b)x,      Δ(E) = 2⁶ω̄φφ₁,

and E_γ is its quadratic twist over K by γ = 2θ² − θ − 5.  The Galois
conjugate σE is 2-isogenous to E through

    μ(x, y) = (−y²/2x², (√−2/4)(y/x²)(ωφ₂ + x²)),

which is checked here as a polynomial identity in the function field of
σE, i.e. modulo the curve equation, over K(√−2).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from core.descent import SolutionInputError, phi, phi12
from core.fields import OMEGA, OMEGA_BAR, SQRT_M2, OctElt, QuadElt, QuarticElt, THETA
from core.localization import P3, FiniteFieldElt, PrimeLocalization, ResidueField, residue, valuation
from core.transform import WeierstrassTransform

logger = logging.getLogger("qcurve.elliptic")

DEFAULT_POINT_LIMIT = 10 ** 6

GAMMA = 2 * THETA * THETA - THETA - 5


class DegenerateCurveError(Exception):
    """Raised when a Weierstrass model has zero discriminant."""


class BadReductionError(Exception):
    """Raised when point counting is requested at a prime of bad reduction."""


class EnumerationBoundError(Exception):
    """Raised when a residue field is larger than the configured enumeration bound."""


# ---------------------------------------------------------------------------
# Curves
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class WeierstrassCurve:
    """y² + a₁xy + a₃y = x³ + a₂x² + a₄x + a₆ over Q, Q(√5), K or K(√−2)."""
    a1: Any = 0
    a2: Any = 0
    a3: Any = 0
    a4: Any = 0
    a6: Any = 0

    @property
    def ainvs(self) -> tuple:
        return self.a1, self.a2, self.a3, self.a4, self.a6

    @property
    def b2(self):
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self):
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self):
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self):
        a1, a2, a3, a4, a6 = self.ainvs
        return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4

    @property
    def c4(self):
        return self.b2 * self.b2 - 24 * self.b4

    @property
    def c6(self):
        b2, b4, b6 = self.b2, self.b4, self.b6
        return -(b2 * b2 * b2) + 36 * b2 * b4 - 216 * b6

    @property
    def discriminant(self):
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -(b2 * b2 * b8) - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def j_invariant(self):
        disc = self.discriminant
        if disc == 0:
            raise DegenerateCurveError("j-invariant of a singular model")
        c4 = self.c4
        return c4 * c4 * c4 / disc

    def require_nonsingular(self) -> "WeierstrassCurve":
        if self.discriminant == 0:
            raise DegenerateCurveError(f"singular model {self.ainvs}")
        return self

    def change_coordinates(self, transform: WeierstrassTransform) -> "WeierstrassCurve":
        return WeierstrassCurve(*transform.apply(self.ainvs))

    def quadratic_twist(self, delta) -> "WeierstrassCurve":
        """Twist by δ through y² = x³ + (b₂/4)x² + (b₄/2)x + b₆/4."""
        if delta == 0:
            raise DegenerateCurveError("twist by zero")
        quarter, half = Fraction(1, 4), Fraction(1, 2)
        return WeierstrassCurve(
            0,
            self.b2 * quarter * delta,
            0,
            self.b4 * half * delta * delta,
            self.b6 * quarter * delta * delta * delta,
        )

    def map_coefficients(self, fn) -> "WeierstrassCurve":
        return WeierstrassCurve(*(fn(c) for c in self.ainvs))

    def base_change_to_K(self) -> "WeierstrassCurve":
        return self.map_coefficients(QuarticElt._coerce)

    def conjugate(self) -> "WeierstrassCurve":
        """σE for a curve over Q(√5)."""
        return self.map_coefficients(lambda c: c.conj() if isinstance(c, QuadElt) else c)

    def is_on_curve(self, x, y) -> bool:
        a1, a2, a3, a4, a6 = self.ainvs
        return y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6) == 0

    def to_dict(self) -> dict:
        return {name: str(c) for name, c in zip(("a1", "a2", "a3", "a4", "a6"), self.ainvs)}


# ---------------------------------------------------------------------------
# Frey family
# ---------------------------------------------------------------------------
def _require_pair(a: int, b: int):
    if (a, b) == (0, 0):
        raise SolutionInputError("(a, b) = (0, 0)")
    if math.gcd(a, b) != 1:
        raise SolutionInputError(f"gcd({a}, {b}) = {math.gcd(a, b)} ≠ 1")


def frey_curve(a: int, b: int) -> WeierstrassCurve:
    """E_(a,b) over Q(√5)."""
    _require_pair(a, b)
    f1, _ = phi12(a, b)
    curve = WeierstrassCurve(a2=QuadElt(2 * (a + b)), a4=-(OMEGA_BAR * f1))
    if curve.discriminant == 0:
        raise DegenerateCurveError(f"Frey curve of ({a}, {b}) is singular")
    return curve


def frey_twist(a: int, b: int) -> WeierstrassCurve:
    """E_γ over K: a₂ ↦ γa₂, a₄ ↦ γ²a₄."""
    base = frey_curve(a, b).base_change_to_K()
    return WeierstrassCurve(a2=GAMMA * base.a2, a4=GAMMA * GAMMA * base.a4)


def frey_twist2(a: int, b: int) -> WeierstrassCurve:
    """E_{γ,2}: the quadratic twist of E_γ by 2."""
    return frey_twist(a, b).quadratic_twist(2)


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    ok: bool
    lhs: str = ""
    rhs: str = ""
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "lhs": self.lhs, "rhs": self.rhs, "details": dict(self.details)}


def discriminant_check(a: int, b: int) -> IdentityCheck:
    """Δ(E) = 2⁶·ω̄·φ·φ₁ together with 1728Δ = c₄³ − c₆²."""
    curve = frey_curve(a, b)
    f1, _ = phi12(a, b)
    lhs = curve.discriminant
    rhs = 64 * OMEGA_BAR * phi(a, b) * f1
    c4, c6 = curve.c4, curve.c6
    return IdentityCheck(
        name="frey_discriminant",
        ok=lhs == rhs and 1728 * lhs == c4 * c4 * c4 - c6 * c6,
        lhs=str(lhs),
        rhs=str(rhs),
        details={"a": a, "b": b},
    )


def twist_scaling_check(a: int, b: int) -> IdentityCheck:
    """Δ(E_γ) = γ⁶Δ(E) and j(E_γ) = j(E)."""
    base = frey_curve(a, b).base_change_to_K()
    twist = frey_twist(a, b)
    ok = twist.discriminant == GAMMA ** 6 * base.discriminant and twist.j_invariant == base.j_invariant
    return IdentityCheck(
        name="frey_twist_scaling",
        ok=ok,
        lhs=str(twist.discriminant),
        rhs=str(GAMMA ** 6 * base.discriminant),
        details={"a": a, "b": b},
    )


# ---------------------------------------------------------------------------
# Function-field polynomials in x, y over K(√−2)
# ---------------------------------------------------------------------------
Poly = dict  # {(i, j): OctElt} for the monomial xⁱyʲ


def _oct(c) -> OctElt:
    value = OctElt._coerce(c)
    if value is None:
        raise TypeError(f"cannot read {type(c).__name__} as an element of K(√−2)")
    return value


def _poly(*terms) -> Poly:
    out: Poly = {}
    for (i, j), c in terms:
        _accumulate(out, (i, j), _oct(c))
    return out


def _accumulate(target: Poly, key, value: OctElt):
    total = target.get(key, OctElt(QuarticElt.of(0))) + value
    if total.is_zero():
        target.pop(key, None)
    else:
        target[key] = total


def _padd(f: Poly, g: Poly) -> Poly:
    out = dict(f)
    for k, c in g.items():
        _accumulate(out, k, c)
    return out


def _pscale(f: Poly, c) -> Poly:
    c = _oct(c)
    return {k: v * c for k, v in f.items() if not (v * c).is_zero()}


def _pmul(f: Poly, g: Poly) -> Poly:
    out: Poly = {}
    for (i1, j1), c1 in f.items():
        for (i2, j2), c2 in g.items():
            _accumulate(out, (i1 + i2, j1 + j2), c1 * c2)
    return out


def _ppow(f: Poly, n: int) -> Poly:
    out = _poly(((0, 0), 1))
    for _ in range(n):
        out = _pmul(out, f)
    return out


def _reduce_mod_curve(f: Poly, curve: WeierstrassCurve) -> Poly:
    """Normal form with y-degree ≤ 1 using y² = x³ + a₂x² + a₄x + a₆ − a₁xy − a₃y."""
    a1, a2, a3, a4, a6 = (_oct(c) for c in curve.ainvs)
    y2 = _poly(((3, 0), 1), ((2, 0), a2), ((1, 0), a4), ((0, 0), a6), ((1, 1), -a1), ((0, 1), -a3))
    out: Poly = {}
    pending = dict(f)
    while pending:
        (i, j), c = pending.popitem()
        if j < 2:
            _accumulate(out, (i, j), c)
            continue
        for (di, dj), d in y2.items():
            _accumulate(pending, (i + di, j - 2 + dj), c * d)
    return out


def _poly_str(f: Poly) -> str:
    if not f:
        return "0"
    return " + ".join(f"({c})·x^{i}·y^{j}" for (i, j), c in sorted(f.items()))


@dataclass(frozen=True)
class IsogenyMap:
    """(x, y) ↦ (x_num/x_den, y_num/y_den) as polynomials in the source coordinates."""
    name: str
    source: WeierstrassCurve
    target: WeierstrassCurve
    x_num: Poly
    x_den: Poly
    y_num: Poly
    y_den: Poly
    degree: int = 2

    def residual(self) -> Poly:
        """Target equation evaluated on the image, cleared of denominators and reduced on the source."""
        a1, a2, a3, a4, a6 = (_oct(c) for c in self.target.ainvs)
        xn, xd, yn, yd = self.x_num, self.x_den, self.y_num, self.y_den
        xd2 = _pmul(xd, xd)
        xd3 = _pmul(xd2, xd)
        lhs = _pmul(_pmul(yn, yn), xd3)
        lhs = _padd(lhs, _pscale(_pmul(_pmul(xn, xd2), _pmul(yn, yd)), a1))
        lhs = _padd(lhs, _pscale(_pmul(_pmul(yn, yd), xd3), a3))
        rhs = _ppow(xn, 3)
        rhs = _padd(rhs, _pscale(_pmul(_pmul(xn, xn), xd), a2))
        rhs = _padd(rhs, _pscale(_pmul(xn, xd2), a4))
        rhs = _padd(rhs, _pscale(xd3, a6))
        rhs = _pmul(_pmul(yd, yd), rhs)
        return _reduce_mod_curve(_padd(lhs, _pscale(rhs, -1)), self.source)


def mu_isogeny(a: int, b: int) -> IsogenyMap:
    """μ : σE → E."""
    curve = frey_curve(a, b)
    _, f2 = phi12(a, b)
    coeff = SQRT_M2 * OctElt(QuarticElt.of(Fraction(1, 4)))
    return IsogenyMap(
        name="mu",
        source=curve.conjugate(),
        target=curve,
        x_num=_poly(((0, 2), -1)),
        x_den=_poly(((2, 0), 2)),
        y_num=_pscale(_poly(((0, 1), OMEGA * f2), ((2, 1), 1)), coeff),
        y_den=_poly(((2, 0), 1)),
    )


def dual_isogeny(a: int, b: int) -> IsogenyMap:
    """μ̂ : E → σE."""
    curve = frey_curve(a, b)
    f1, _ = phi12(a, b)
    coeff = SQRT_M2 * OctElt(QuarticElt.of(Fraction(-1, 4)))
    return IsogenyMap(
        name="mu_dual",
        source=curve,
        target=curve.conjugate(),
        x_num=_poly(((0, 2), -1)),
        x_den=_poly(((2, 0), 2)),
        y_num=_pscale(_poly(((0, 1), OMEGA_BAR * f1), ((2, 1), 1)), coeff),
        y_den=_poly(((2, 0), 1)),
    )


@dataclass(frozen=True)
class IsogenyCheck:
    a: int
    b: int
    checks: tuple[IdentityCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def _x_only(f: Poly) -> dict[int, OctElt]:
    if any(j for (_, j) in f):
        raise ArithmeticError("expected a polynomial in x alone")
    return {i: c for (i, _), c in f.items()}


def _degree_and_kernel(iso: IsogenyMap) -> IdentityCheck:
    """The x-map, as a rational function of x, has degree 2 and its only finite pole is x = 0."""
    num = _x_only(_reduce_mod_curve(iso.x_num, iso.source))
    den = _x_only(iso.x_den)
    shift = min(min(num), min(den))
    num = {i - shift: c for i, c in num.items()}
    den = {i - shift: c for i, c in den.items()}
    degree = max(max(num), max(den))
    den_is_monomial = len(den) == 1 and min(den) > 0
    kernel_ok = den_is_monomial and 0 in num
    return IdentityCheck(
        name=f"{iso.name}_degree_kernel",
        ok=degree == iso.degree and kernel_ok,
        lhs=str(degree),
        rhs=str(iso.degree),
        details={"kernel_x": [0] if den_is_monomial else None},
    )


def _duplication_check(a: int, b: int) -> IdentityCheck:
    """x(μ(μ̂(P))) = x(2P) = (x² − a₄)²/4y² on E."""
    dual = dual_isogeny(a, b)
    curve = dual.source
    a4 = _oct(curve.a4)
    # x(μ) ∘ μ̂ = −Y²/2X² with X = xn/xd, Y = yn/yd  ⇒  −yn²·xd² / (2·yd²·xn²)
    comp_num = _pscale(_pmul(_pmul(dual.y_num, dual.y_num), _pmul(dual.x_den, dual.x_den)), -1)
    comp_den = _pscale(_pmul(_pmul(dual.y_den, dual.y_den), _pmul(dual.x_num, dual.x_num)), 2)
    dup_num = _ppow(_poly(((2, 0), 1), ((0, 0), -a4)), 2)
    dup_den = _poly(((0, 2), 4))
    residual = _reduce_mod_curve(_padd(_pmul(comp_num, dup_den), _pscale(_pmul(dup_num, comp_den), -1)), curve)
    return IdentityCheck(
        name="mu_mu_dual_duplication",
        ok=not residual,
        lhs="x(mu(mu_dual(P)))",
        rhs="(x^2 - a4)^2 / 4y^2",
        details={"residual": _poly_str(residual)},
    )


def verify_isogeny(a: int, b: int) -> IsogenyCheck:
    checks = []
    for iso in (mu_isogeny(a, b), dual_isogeny(a, b)):
        residual = iso.residual()
        checks.append(IdentityCheck(
            name=f"{iso.name}_maps_onto_target",
            ok=not residual,
            lhs="image on target equation",
            rhs="0",
            details={"residual": _poly_str(residual)},
        ))
        checks.append(_degree_and_kernel(iso))
    checks.append(_duplication_check(a, b))
    result = IsogenyCheck(a=a, b=b, checks=tuple(checks))
    logger.info("isogeny checks for (%d, %d): %s", a, b, "ok" if result.ok else "FAILED")
    return result


# ---------------------------------------------------------------------------
# Reduction and point counting
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ReducedCurve:
    field: ResidueField
    ainvs: tuple[FiniteFieldElt, ...]

    def count_points(self) -> int:
        F = self.field
        a1, a2, a3, a4, a6 = self.ainvs
        total = 1
        if F.p == 2:
            elements = list(F.elements())
            for x in elements:
                rhs = x * x * x + a2 * x * x + a4 * x + a6
                lin = a1 * x + a3
                total += sum(1 for y in elements if y * y + lin * y == rhs)
            return total
        squares: dict[FiniteFieldElt, int] = {}
        for y in F.elements():
            sq = y * y
            squares[sq] = squares.get(sq, 0) + 1
        quarter = F.from_int(4).inverse()
        for x in F.elements():
            lin = a1 * x + a3
            value = x * x * x + a2 * x * x + a4 * x + a6 + lin * lin * quarter
            total += squares.get(value, 0)
        return total

    def to_dict(self) -> dict:
        return {"field": self.field.label(), "ainvs": [list(c.coords) for c in self.ainvs]}


def reduce_curve(E: WeierstrassCurve, P: PrimeLocalization) -> ReducedCurve:
    return ReducedCurve(P.residue_field, tuple(residue(c, P) for c in E.base_change_to_K().ainvs))


def reduce_and_count(
    E: WeierstrassCurve,
    P: PrimeLocalization,
    point_limit: int = DEFAULT_POINT_LIMIT,
) -> tuple[int, int]:
    """(#E(F_P), a_P) on a model with good reduction at P."""
    from core.tate import tate_local

    if P.q > point_limit:
        raise EnumerationBoundError(f"Nm({P.label}) = {P.q} exceeds the enumeration bound {point_limit}")
    data = tate_local(E, P)
    if data.conductor_exponent != 0:
        raise BadReductionError(f"{P.label}: {data.kodaira} reduction, exponent {data.conductor_exponent}")
    count = reduce_curve(data.minimal_model, P).count_points()
    trace = P.q + 1 - count
    if trace * trace > 4 * P.q:
        raise ArithmeticError(f"Hasse bound violated at {P.label}: a = {trace}")
    logger.debug("%s: #E = %d, a = %d", P.label, count, trace)
    return count, trace


def twisted_trace_check(E: WeierstrassCurve, P: PrimeLocalization, delta) -> IdentityCheck:
    """a_P(E^δ) = ±a_P(E) with the sign of the residue symbol of the unit δ."""
    if P.p == 2:
        raise ValueError("twist sign rule needs odd residue characteristic")
    if valuation(delta, P) != 0:
        raise ValueError(f"δ must be a unit at {P.label}")
    _, base = reduce_and_count(E, P)
    _, twisted = reduce_and_count(E.quadratic_twist(delta), P)
    sign = 1 if residue(delta, P).is_square() else -1
    return IdentityCheck(
        name="twisted_trace_sign",
        ok=twisted == sign * base,
        lhs=str(twisted),
        rhs=str(sign * base),
        details={"prime": P.label, "delta": str(delta), "square": sign == 1},
    )


def reduction_at_P3(a: int, b: int) -> ReducedCurve:
    """E_γ mod 𝔓₃ for 3 | a + b."""
    if (a + b) % 3:
        raise SolutionInputError(f"3 does not divide a + b = {a + b}")
    return reduce_curve(frey_twist(a, b), P3)
