"""
Primes of K = Q(θ), their valuations and residue fields.

Z[θ] is the maximal order of K (disc(x⁴ − 5x² + 5) = 2⁴5³ = disc K), so
Kummer–Dedekind applies at every rational prime: the primes above p
correspond to the irreducible factors g of x⁴ − 5x² + 5 mod p, and the
residue field at the prime belonging to g is F_p[x]/(g) with θ ↦ x.

    p = 2   (x² + x + 1)²   one prime 𝔓₂, e = 2, f = 2
    p = 5   x⁴              one prime 𝔓₅, e = 4, f = 1
    p = 3   irreducible     one prime 𝔓₃, e = 1, f = 4, residue field F₈₁

Valuations at a prime that is alone above p come from the norm,
ν_𝔓(z) = ν_p(N(z)) / f.  When p splits, ν_𝔓 is read off the p-content of
z·hᵐ, where h is a lift of the product of the other factors (h is a unit
at 𝔓 and lies in every other prime above p).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterator, Optional

from sympy import Poly, multiplicity, symbols

from core.fields import MIN_POLY, QuarticElt, THETA, iter_small_quartic

logger = logging.getLogger("qcurve.localization")

INFINITY = math.inf

_X = symbols("x")


class UnsupportedLocalizationError(Exception):
    """Raised when a valuation or residue is requested outside K or at an unknown prime."""


class NotIntegralError(Exception):
    """Raised when a residue is requested for an element that is not 𝔓-integral."""


# ---------------------------------------------------------------------------
# Residue fields F_p[x]/(g)
# ---------------------------------------------------------------------------
def _poly_mod(coeffs: list[int], modulus: tuple[int, ...], p: int) -> tuple[int, ...]:
    """Reduce an integer polynomial (low → high) modulo a monic *modulus* and p."""
    f = len(modulus) - 1
    c = [x % p for x in coeffs]
    for k in range(len(c) - 1, f - 1, -1):
        top = c[k]
        if top:
            for i in range(f + 1):
                c[k - f + i] = (c[k - f + i] - top * modulus[i]) % p
    c = c[:f] + [0] * (f - len(c))
    return tuple(c)


@dataclass(frozen=True)
class ResidueField:
    """F_q = F_p[x]/(modulus), modulus monic irreducible of degree f."""
    p: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if self.modulus[-1] % self.p != 1:
            raise ValueError(f"modulus must be monic, got {self.modulus}")

    @property
    def f(self) -> int:
        return len(self.modulus) - 1

    @property
    def q(self) -> int:
        return self.p ** self.f

    def element(self, coeffs) -> "FiniteFieldElt":
        return FiniteFieldElt(self, _poly_mod(list(coeffs), self.modulus, self.p))

    def from_int(self, n: int) -> "FiniteFieldElt":
        return self.element([n])

    @property
    def zero(self) -> "FiniteFieldElt":
        return self.from_int(0)

    @property
    def one(self) -> "FiniteFieldElt":
        return self.from_int(1)

    @property
    def generator(self) -> "FiniteFieldElt":
        """The class of x (the image of θ)."""
        return self.element([0, 1])

    def elements(self) -> Iterator["FiniteFieldElt"]:
        for coords in product(range(self.p), repeat=self.f):
            yield FiniteFieldElt(self, tuple(coords))

    def label(self) -> str:
        return f"F_{self.q}"


@dataclass(frozen=True)
class FiniteFieldElt:
    field: ResidueField
    coords: tuple[int, ...]

    def _coerce(self, other) -> "FiniteFieldElt | None":
        if isinstance(other, FiniteFieldElt):
            if other.field != self.field:
                raise ValueError(f"mixing {self.field.label()} and {other.field.label()}")
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return self.field.from_int(other)
        if isinstance(other, Fraction):
            p = self.field.p
            if other.denominator % p == 0:
                raise ZeroDivisionError(f"{other} has no image in {self.field.label()}")
            return self.field.from_int(other.numerator * pow(other.denominator, -1, p))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.field.p
        return FiniteFieldElt(self.field, tuple((a + b) % p for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FiniteFieldElt(self.field, tuple((-a) % p for a in self.coords))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        prod = [0] * (2 * self.field.f - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        prod[i + j] += a * b
        return FiniteFieldElt(self.field, _poly_mod(prod, self.field.modulus, self.field.p))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "FiniteFieldElt":
        if self.is_zero():
            raise ZeroDivisionError(f"inverse of zero in {self.field.label()}")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = self._coerce(other)
        if not isinstance(other, FiniteFieldElt):
            return NotImplemented
        return self.field == other.field and self.coords == other.coords

    def __hash__(self):
        return hash((self.field, self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def frobenius(self) -> "FiniteFieldElt":
        return self ** self.field.p

    def pth_root(self) -> "FiniteFieldElt":
        """Inverse of Frobenius: x^(p^(f−1))."""
        return self ** (self.field.p ** (self.field.f - 1))

    def is_square(self) -> bool:
        if self.is_zero() or self.field.p == 2:
            return True
        return self ** ((self.field.q - 1) // 2) == self.field.one

    def __repr__(self):
        return f"{self.field.label()}{list(self.coords)}"


# ---------------------------------------------------------------------------
# Primes of K
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class PrimeLocalization:
    """A prime 𝔓 of K together with its valuation and residue machinery.

    Parameters
    ----------
    label : str
        ``P2``, ``P5``, ``P3``, ``Split(p)#j``, ``Quadratic(p)#j`` or ``Inert(p)``.
    p : int
        Residue characteristic.
    e, f : int
        Ramification index and residue degree.
    factor : tuple[int, ...]
        Monic irreducible factor of x⁴ − 5x² + 5 mod p defining the residue field.
    complement : QuarticElt | None
        Lift of the product of the other factors; ``None`` when 𝔓 is the only prime above p.
    uniformizer : QuarticElt
        An element of valuation 1.
    """
    label: str
    p: int
    e: int
    f: int
    factor: tuple[int, ...]
    complement: Optional[QuarticElt] = None
    uniformizer: Optional[QuarticElt] = None

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def norm(self) -> int:
        return self.q

    @property
    def residue_field(self) -> ResidueField:
        return ResidueField(self.p, self.factor)

    @property
    def is_alone(self) -> bool:
        return self.complement is None

    def valuation(self, z) -> int | float:
        return valuation(z, self)

    def residue(self, z) -> FiniteFieldElt:
        return residue(z, self)

    def lift(self, a: FiniteFieldElt) -> QuarticElt:
        """Integral element of K reducing to *a*."""
        if a.field != self.residue_field:
            raise ValueError(f"{a} does not belong to the residue field at {self.label}")
        coords = list(a.coords) + [0] * (4 - len(a.coords))
        return QuarticElt(tuple(coords[:4]))

    def describe(self) -> dict:
        return {
            "label": self.label,
            "p": self.p,
            "e": self.e,
            "f": self.f,
            "residue_field": self.residue_field.label(),
            "uniformizer": [str(c) for c in self.uniformizer.coords] if self.uniformizer else None,
        }


def _vp(value: Fraction, p: int) -> int:
    return multiplicity(p, value.numerator) - multiplicity(p, value.denominator)


def _as_quartic(z) -> QuarticElt:
    q = QuarticElt._coerce(z)
    if q is None:
        raise UnsupportedLocalizationError(f"valuations are defined on K, not on {type(z).__name__}")
    return q


def _content(w: QuarticElt, p: int) -> int | float:
    """min ν_p of the (integral) coordinates."""
    vals = [multiplicity(p, c.numerator) for c in w.coords if c]
    return min(vals) if vals else INFINITY


def valuation(z, P: PrimeLocalization) -> int | float:
    """ν_𝔓(z); +∞ for z = 0."""
    if not isinstance(P, PrimeLocalization):
        raise UnsupportedLocalizationError(f"not a prime of K: {P!r}")
    z = _as_quartic(z)
    if z.is_zero():
        return INFINITY
    if P.is_alone:
        v, rem = divmod(_vp(z.norm(), P.p), P.f)
        if rem:
            raise ArithmeticError(f"norm valuation of {z} at {P.label} is not a multiple of f")
        return v
    D = z.denominator()
    w = z * D
    k0 = multiplicity(P.p, D)
    step = w
    current = _content(step, P.p)
    while True:
        step = step * P.complement
        nxt = _content(step, P.p)
        if nxt == current:
            return current - k0
        current = nxt


def _reduce_integral(w: QuarticElt, P: PrimeLocalization) -> FiniteFieldElt:
    p = P.p
    coeffs = []
    for c in w.coords:
        if c.denominator % p == 0:
            raise NotIntegralError(f"{w} is not {P.label}-integral")
        coeffs.append(c.numerator * pow(c.denominator, -1, p))
    return P.residue_field.element(coeffs)


def residue(z, P: PrimeLocalization) -> FiniteFieldElt:
    """Image of a 𝔓-integral z in O_K/𝔓."""
    if not isinstance(P, PrimeLocalization):
        raise UnsupportedLocalizationError(f"not a prime of K: {P!r}")
    z = _as_quartic(z)
    if P.is_alone:
        # the only prime above p: 𝔓-integral ⇔ p-integral coordinates
        return _reduce_integral(z, P)
    if valuation(z, P) < 0:
        raise NotIntegralError(f"{z} is not {P.label}-integral")
    D = z.denominator()
    k = multiplicity(P.p, D)
    if k == 0:
        return _reduce_integral(z, P)
    w = z * D
    h_power = QuarticElt.of(1)
    while _content(w * h_power, P.p) < k:
        h_power = h_power * P.complement
    num = (w * h_power) / (P.p ** k)
    den = _reduce_integral(h_power * (D // P.p ** k), P)
    return _reduce_integral(num, P) / den


@lru_cache(maxsize=None)
def primes_above(p: int) -> tuple[PrimeLocalization, ...]:
    """All primes of K above the rational prime p, in the order sympy lists the factors."""
    poly = Poly(list(reversed(MIN_POLY)), _X, modulus=p)
    _, factors = poly.factor_list()
    monic = []
    for g, mult in factors:
        coeffs = [int(c) % p for c in reversed(g.all_coeffs())]
        lc_inv = pow(coeffs[-1], -1, p)
        monic.append((tuple((c * lc_inv) % p for c in coeffs), mult))
    monic.sort()
    result = []
    for j, (g, mult) in enumerate(monic):
        f = len(g) - 1
        if len(monic) == 1:
            complement = None
        else:
            comp = [1]
            for k, (other, _) in enumerate(monic):
                if k != j:
                    comp = _poly_mul(comp, list(other))
            complement = QuarticElt(tuple(_reduce_list(comp)))
        label = _label(p, f, j, len(monic))
        base = PrimeLocalization(label=label, p=p, e=mult, f=f, factor=g, complement=complement)
        result.append(replace(base, uniformizer=_find_uniformizer(base)))
    if sum(P.e * P.f for P in result) != 4:
        raise ArithmeticError(f"Σ e·f above {p} is not 4")
    logger.debug("primes above %d: %s", p, [P.label for P in result])
    return tuple(result)


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _reduce_list(coeffs: list[int]) -> list[Fraction]:
    from core.fields import _reduce_theta
    return list(_reduce_theta([Fraction(c) for c in coeffs]))


def _label(p: int, f: int, j: int, count: int) -> str:
    if p in (2, 3, 5):
        return f"P{p}"
    if f == 4:
        return f"Inert({p})"
    kind = "Split" if f == 1 else "Quadratic"
    return f"{kind}({p})#{j}"


def _find_uniformizer(P: PrimeLocalization) -> QuarticElt:
    if P.e == 1:
        return QuarticElt.of(P.p)
    if valuation(THETA, P) == 1:
        return THETA
    for candidate in iter_small_quartic(1):
        if valuation(candidate, P) == 1:
            logger.info("uniformizer at %s: %s", P.label, candidate)
            return candidate
    raise ArithmeticError(f"no small uniformizer found at {P.label}")


def prime_above(p: int) -> PrimeLocalization:
    """The unique prime above p (2, 3, 5 and primes inert in K)."""
    primes = primes_above(p)
    if len(primes) != 1:
        raise UnsupportedLocalizationError(f"{p} has {len(primes)} primes above it in K")
    return primes[0]


P2 = prime_above(2)
P3 = prime_above(3)
P5 = prime_above(5)
