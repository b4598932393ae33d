"""
Exact arithmetic in the tower  Q ⊂ Q(√5) ⊂ K = Q(θ) ⊂ K(√−2)  and in Q(i).

θ is a root of x⁴ − 5x² + 5.  K is cyclic quartic over Q and contains
Q(√5) through  √5 = 2θ² − 5.  Elements carry rational coordinates
(``fractions.Fraction``) on fixed bases:

    QuadElt      x + y·√5
    QuarticElt   c₀ + c₁θ + c₂θ² + c₃θ³
    OctElt       u + v·√−2        (u, v ∈ K)
    GaussianElt  re + im·i

All values are immutable; every operation returns a new element.
"""

from __future__ import annotations

import logging
import math
import numbers
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Iterator, Union

import numpy as np

logger = logging.getLogger("qcurve.fields")

RationalBig = Fraction
Scalar = Union[int, Fraction]

# x⁴ − 5x² + 5, coefficients low → high
MIN_POLY: tuple[int, ...] = (5, 0, -5, 0, 1)

# Real embedding used for numeric consistency checks only.
THETA_NUMERIC = float(np.sqrt((5.0 + np.sqrt(5.0)) / 2.0))


def _q(value: Scalar) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    raise TypeError(f"Expected an exact rational, got {type(value).__name__}")


def _is_scalar(value) -> bool:
    return isinstance(value, (numbers.Integral, Fraction)) and not isinstance(value, bool)


# ---------------------------------------------------------------------------
# Q(√5)
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class QuadElt:
    """x + y·√5 with rational x, y."""
    x: Fraction
    y: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "x", _q(self.x))
        object.__setattr__(self, "y", _q(self.y))

    @classmethod
    def _coerce(cls, other) -> "QuadElt | None":
        if isinstance(other, QuadElt):
            return other
        if _is_scalar(other):
            return cls(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElt(self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadElt(-self.x, -self.y)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElt(self.x - o.x, self.y - o.y)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElt(self.x * o.x + 5 * self.y * o.y, self.x * o.y + self.y * o.x)

    __rmul__ = __mul__

    def inverse(self) -> "QuadElt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(√5)")
        return QuadElt(self.x / n, -self.y / n)

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

    def __pow__(self, n: int):
        return _power(self, n, QuadElt(1))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        # equal to scalars, so hash like one
        if not self.y:
            return hash(self.x)
        return hash(("Q(√5)", self.x, self.y))

    def conj(self) -> "QuadElt":
        return QuadElt(self.x, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x - 5 * self.y * self.y

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def to_quartic(self) -> "QuarticElt":
        return QuarticElt.from_quad(self)

    def __repr__(self):
        return f"QuadElt({self.x} + {self.y}·√5)"

    def __str__(self):
        if self.y == 0:
            return str(self.x)
        sqrt_part = f"{abs(self.y)}√5" if abs(self.y) != 1 else "√5"
        if self.x == 0:
            return ("-" if self.y < 0 else "") + sqrt_part
        return f"{self.x} {'-' if self.y < 0 else '+'} {sqrt_part}"


SQRT5_Q = QuadElt(0, 1)
OMEGA = QuadElt(Fraction(-1, 2), Fraction(1, 2))
OMEGA_BAR = QuadElt(Fraction(-1, 2), Fraction(-1, 2))


def conj_sqrt5(z: QuadElt) -> QuadElt:
    """The non-trivial automorphism of Q(√5)."""
    return z.conj()


# ---------------------------------------------------------------------------
# K = Q(θ)
# ---------------------------------------------------------------------------
def _reduce_theta(coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    """Reduce a polynomial in θ modulo θ⁴ = 5θ² − 5."""
    c = list(coeffs)
    for k in range(len(c) - 1, 3, -1):
        top = c[k]
        if top:
            c[k] = Fraction(0)
            c[k - 2] += 5 * top
            c[k - 4] -= 5 * top
    c = c + [Fraction(0)] * (4 - len(c))
    return tuple(c[:4])


@dataclass(frozen=True, eq=False)
class QuarticElt:
    """c₀ + c₁θ + c₂θ² + c₃θ³ in K = Q(θ)."""
    coords: tuple[Fraction, Fraction, Fraction, Fraction]

    def __post_init__(self):
        if len(self.coords) != 4:
            raise ValueError(f"QuarticElt needs 4 coordinates, got {len(self.coords)}")
        object.__setattr__(self, "coords", tuple(_q(c) for c in self.coords))

    @classmethod
    def of(cls, c0: Scalar = 0, c1: Scalar = 0, c2: Scalar = 0, c3: Scalar = 0) -> "QuarticElt":
        return cls((c0, c1, c2, c3))

    @classmethod
    def from_quad(cls, z: QuadElt) -> "QuarticElt":
        # √5 = 2θ² − 5
        return cls((z.x - 5 * z.y, 0, 2 * z.y, 0))

    @classmethod
    def _coerce(cls, other) -> "QuarticElt | None":
        if isinstance(other, QuarticElt):
            return other
        if isinstance(other, QuadElt):
            return cls.from_quad(other)
        if _is_scalar(other):
            return cls((other, 0, 0, 0))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuarticElt(tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return QuarticElt(tuple(-a for a in self.coords))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuarticElt(tuple(a - b for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if _is_scalar(other):
            s = _q(other)
            return QuarticElt(tuple(a * s for a in self.coords))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        prod = [Fraction(0)] * 7
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        prod[i + j] += a * b
        return QuarticElt(_reduce_theta(prod))

    __rmul__ = __mul__

    def conjugates(self) -> list["QuarticElt"]:
        """Images under the four automorphisms of K (identity first)."""
        return [s(self) for s in galois_group_K()]

    def norm(self) -> Fraction:
        conj = self.conjugates()
        prod = conj[0] * conj[1] * conj[2] * conj[3]
        if not prod.is_rational():
            raise ArithmeticError(f"norm of {self} is not rational: {prod}")
        return prod.coords[0]

    def inverse(self) -> "QuarticElt":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in K")
        conj = self.conjugates()
        others = conj[1] * conj[2] * conj[3]
        n = (self * others).coords[0]
        return others * (1 / n)

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (1 / _q(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        return _power(self, n, QuarticElt.of(1))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self):
        c0, c1, c2, c3 = self.coords
        if not c1 and not c3:
            return hash(QuadElt(c0 + 5 * c2 / 2, c2 / 2))
        return hash(("K", self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def denominator(self) -> int:
        d = 1
        for c in self.coords:
            d = math.lcm(d, c.denominator)
        return d

    def to_float(self, theta: float = THETA_NUMERIC) -> float:
        return float(np.polyval([float(c) for c in reversed(self.coords)], theta))

    def __repr__(self):
        return "QuarticElt(" + ", ".join(str(c) for c in self.coords) + ")"

    def __str__(self):
        terms = []
        for k in range(3, -1, -1):
            c = self.coords[k]
            if not c:
                continue
            mono = {0: "", 1: "θ"}.get(k, f"θ^{k}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' if mono else ''}{mono}"
            terms.append((c < 0, body))
        if not terms:
            return "0"
        out = ("-" if terms[0][0] else "") + terms[0][1]
        for neg, body in terms[1:]:
            out += (" - " if neg else " + ") + body
        return out


def _power(base, n: int, one):
    if n < 0:
        return _power(base.inverse(), -n, one)
    result = one
    while n:
        if n & 1:
            result = result * base
        base = base * base
        n >>= 1
    return result


THETA = QuarticElt.of(0, 1)
SQRT5 = QuarticElt.of(-5, 0, 2)


def evaluate_poly(coeffs, point):
    """Horner evaluation of a low → high coefficient list at *point*."""
    acc = point * 0
    for c in reversed(coeffs):
        acc = acc * point + c
    return acc


# ---------------------------------------------------------------------------
# Gal(K/Q)
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class FieldAutomorphism:
    """Automorphism of K determined by the image of θ."""
    theta_image: QuarticElt

    def __call__(self, z):
        z = QuarticElt._coerce(z)
        if z is None:
            raise TypeError("automorphisms of K act on elements of K")
        return evaluate_poly(z.coords, self.theta_image)

    def compose(self, other: "FieldAutomorphism") -> "FieldAutomorphism":
        """self ∘ other."""
        return FieldAutomorphism(self(other.theta_image))

    def matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        """4×4 rational matrix on the power basis; column j is the image of θʲ."""
        cols = [self(THETA ** j).coords for j in range(4)]
        return tuple(tuple(cols[j][i] for j in range(4)) for i in range(4))

    def order(self) -> int:
        g, k = self, 1
        while g.theta_image != THETA:
            g, k = self.compose(g), k + 1
            if k > 4:
                raise ArithmeticError("automorphism order exceeds 4")
        return k

    def is_identity(self) -> bool:
        return self.theta_image == THETA

    def restricts_to_conjugation(self) -> bool:
        return self(SQRT5) == -SQRT5


def _roots_in_K() -> list[QuarticElt]:
    """Roots of x⁴ − 5x² + 5 in K: ±θ and ±√5/θ."""
    theta_inv = -(evaluate_poly(MIN_POLY[1:], THETA)) / MIN_POLY[0]
    candidates = [THETA, -THETA, SQRT5 * theta_inv, -(SQRT5 * theta_inv)]
    roots = [r for r in candidates if evaluate_poly(MIN_POLY, r).is_zero()]
    if len(set(roots)) != 4:
        raise ArithmeticError("x⁴ − 5x² + 5 does not split in K")
    return roots


def galois_group_K() -> list[FieldAutomorphism]:
    """[id, s, s², s³] with s(θ) = θ³ − 3θ (the root √5/θ)."""
    return list(_galois_group_K())


@lru_cache(maxsize=None)
def _galois_group_K() -> tuple[FieldAutomorphism, ...]:
    roots = _roots_in_K()
    generator = FieldAutomorphism(roots[2])
    group = [FieldAutomorphism(THETA)]
    while len(group) < 4:
        group.append(generator.compose(group[-1]))
    if not generator.compose(group[-1]).is_identity():
        raise ArithmeticError("Gal(K/Q) is not cyclic of order 4")
    if {g.theta_image for g in group} != set(roots):
        raise ArithmeticError("automorphisms do not permute the roots")
    logger.debug("Gal(K/Q) generator: θ ↦ %s", generator.theta_image)
    return tuple(group)


# ---------------------------------------------------------------------------
# K(√−2)
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class OctElt:
    """u + v·√−2 with u, v ∈ K."""
    u: QuarticElt
    v: QuarticElt = QuarticElt.of(0)

    def __post_init__(self):
        object.__setattr__(self, "u", QuarticElt._coerce(self.u))
        object.__setattr__(self, "v", QuarticElt._coerce(self.v))
        if self.u is None or self.v is None:
            raise ValueError("OctElt components must lie in K")

    @classmethod
    def _coerce(cls, other) -> "OctElt | None":
        if isinstance(other, OctElt):
            return other
        q = QuarticElt._coerce(other)
        return cls(q) if q is not None else None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return OctElt(self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __neg__(self):
        return OctElt(-self.u, -self.v)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return OctElt(self.u - o.u, self.v - o.v)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return OctElt(self.u * o.u - 2 * (self.v * o.v), self.u * o.v + self.v * o.u)

    __rmul__ = __mul__

    def relative_norm(self) -> QuarticElt:
        return self.u * self.u + 2 * (self.v * self.v)

    def inverse(self) -> "OctElt":
        n = self.relative_norm()
        if n.is_zero():
            raise ZeroDivisionError("inverse of zero in K(√−2)")
        n_inv = n.inverse()
        return OctElt(self.u * n_inv, -(self.v * n_inv))

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

    def __pow__(self, n: int):
        return _power(self, n, OctElt(QuarticElt.of(1)))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.u == o.u and self.v == o.v

    def __hash__(self):
        if self.v.is_zero():
            return hash(self.u)
        return hash(("K(√−2)", self.u, self.v))

    def is_zero(self) -> bool:
        return self.u.is_zero() and self.v.is_zero()

    def is_rational(self) -> bool:
        return self.v.is_zero() and self.u.is_rational()

    def norm(self) -> Fraction:
        return self.relative_norm().norm()

    def __repr__(self):
        return f"OctElt({self.u!r} + {self.v!r}·√−2)"


SQRT_M2 = OctElt(QuarticElt.of(0), QuarticElt.of(1))


@dataclass(frozen=True)
class OctAutomorphism:
    """Automorphism of K(√−2): *base* on K and √−2 ↦ sign·√−2."""
    base: FieldAutomorphism
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be ±1, got {self.sign}")

    def __call__(self, z) -> OctElt:
        z = OctElt._coerce(z)
        return OctElt(self.base(z.u), self.sign * self.base(z.v))

    def compose(self, other: "OctAutomorphism") -> "OctAutomorphism":
        return OctAutomorphism(self.base.compose(other.base), self.sign * other.sign)

    def is_identity(self) -> bool:
        return self.sign == 1 and self.base.is_identity()

    def order(self) -> int:
        g, k = self, 1
        while not g.is_identity():
            g, k = self.compose(g), k + 1
            if k > 8:
                raise ArithmeticError("automorphism order exceeds 8")
        return k


@dataclass(frozen=True)
class GaloisGroupK2:
    """Gal(K(√−2)/Q) ≅ C4 × C2 with the generators σ₀, σ₁.

    ``elements[a*4 + j]`` is σ₁ᵃσ₀ʲ.
    """
    sigma0: OctAutomorphism
    sigma1: OctAutomorphism
    elements: tuple[OctAutomorphism, ...]

    def label(self, g: OctAutomorphism) -> str:
        idx = self.index(g)
        a, j = divmod(idx, 4)
        parts = (["σ1"] if a else []) + ([f"σ0^{j}"] if j > 1 else ["σ0"] if j == 1 else [])
        return "".join(parts) or "id"

    def index(self, g: OctAutomorphism) -> int:
        for i, h in enumerate(self.elements):
            if h == g:
                return i
        raise KeyError("automorphism not in the group")

    def product(self, g: OctAutomorphism, h: OctAutomorphism) -> OctAutomorphism:
        """g·h as an element of ``elements``."""
        return self.elements[self.index(g.compose(h))]


def galois_group_K_sqrtm2(sigma0_base: FieldAutomorphism | None = None) -> GaloisGroupK2:
    """The order-8 group with σ₀ (order 4, √5 ↦ −√5, √−2 ↦ −√−2) and σ₁.

    *sigma0_base* chooses σ₀ on K; the default is θ ↦ θ³ − 3θ, the other
    admissible choice is its inverse θ ↦ 3θ − θ³.
    """
    gal = galois_group_K()
    identity = OctAutomorphism(gal[0], 1)
    base = sigma0_base or gal[1]
    if not base.restricts_to_conjugation():
        raise ValueError("σ₀ must act on K by an automorphism moving √5")
    sigma0 = OctAutomorphism(base, -1)
    sigma1 = OctAutomorphism(gal[0], -1)
    powers = [identity]
    for _ in range(3):
        powers.append(sigma0.compose(powers[-1]))
    elements = tuple(powers) + tuple(sigma1.compose(g) for g in powers)
    if len({(g.base.theta_image, g.sign) for g in elements}) != 8:
        raise ArithmeticError("σ₀, σ₁ do not generate a group of order 8")
    return GaloisGroupK2(sigma0=sigma0, sigma1=sigma1, elements=elements)


def relative_norm(z: OctElt, s: OctAutomorphism) -> OctElt:
    """∏_{j < ord(s)} s^j(z)."""
    z = OctElt._coerce(z)
    result = z
    image = z
    for _ in range(s.order() - 1):
        image = s(image)
        result = result * image
    return result


# ---------------------------------------------------------------------------
# Q(i)
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class GaussianElt:
    """re + im·i."""
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _q(self.re))
        object.__setattr__(self, "im", _q(self.im))

    @classmethod
    def _coerce(cls, other) -> "GaussianElt | None":
        if isinstance(other, GaussianElt):
            return other
        if _is_scalar(other):
            return cls(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianElt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianElt(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianElt(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianElt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "GaussianElt":
        return GaussianElt(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianElt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(i)")
        return GaussianElt(self.re / n, -self.im / n)

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

    def __pow__(self, n: int):
        return _power(self, n, GaussianElt(1))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash(("Q(i)", self.re, self.im))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianElt({self.re} + {self.im}·i)"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


I = GaussianElt(0, 1)


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------
def norm_to_Q(z) -> Fraction:
    """Product of all Galois conjugates over Q."""
    if isinstance(z, (QuadElt, QuarticElt, OctElt, GaussianElt)):
        return z.norm()
    if _is_scalar(z):
        return _q(z)
    raise TypeError(f"No norm defined for {type(z).__name__}")


def iter_small_quartic(bound: int = 1) -> Iterator[QuarticElt]:
    """Nonzero elements of Z[θ] with coordinates in [−bound, bound], in a fixed order."""
    rng = range(-bound, bound + 1)
    for c3 in rng:
        for c2 in rng:
            for c1 in rng:
                for c0 in rng:
                    if c0 or c1 or c2 or c3:
                        yield QuarticElt.of(c0, c1, c2, c3)
