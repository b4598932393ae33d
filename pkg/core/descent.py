"""
Descent for x⁵ + y⁵ = d·z^p.

With (a, b) = (x, y) coprime,

    a⁵ + b⁵ = (a + b)·φ(a, b),    φ(a, b) = a⁴ − a³b + a²b² − ab³ + b⁴,

and over Q(√5) the quartic splits as φ = φ₁φ₂ with

    φ₁ = a² + ωab + b²,   φ₂ = a² + ω̄ab + b²,   ω = (−1 + √5)/2.

The two factors of a⁵ + b⁵ share at most the prime 5, to the first power,
and every other prime dividing φ is ≡ 1 (mod 5).  A solution therefore
falls into one of two shapes:

    Eq4   φ(a, b) = c^p          (5 ∤ a + b)
    Eq5   φ(a, b) = 5·c^p        (5 | a + b)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from sympy import factorint, integer_nthroot, isprime, multiplicity, primerange, sqrt_mod

from core.fields import OMEGA, OMEGA_BAR, QuadElt

logger = logging.getLogger("qcurve.descent")

INFINITY = math.inf
DEFAULT_TRIAL_LIMIT = 10 ** 5


class SolutionInputError(Exception):
    """Raised when a pair (a, b) does not meet the descent preconditions."""


# ---------------------------------------------------------------------------
# The quartic form and its factorization
# ---------------------------------------------------------------------------
def phi(a: int, b: int) -> int:
    return a ** 4 - a ** 3 * b + a ** 2 * b ** 2 - a * b ** 3 + b ** 4


def phi12(a: int, b: int) -> tuple[QuadElt, QuadElt]:
    """(φ₁(a, b), φ₂(a, b)) in Q(√5)."""
    base = QuadElt(a * a + b * b)
    return base + OMEGA * (a * b), base + OMEGA_BAR * (a * b)


@dataclass
class ScanResult:
    """Outcome of an exhaustive identity or residue scan."""
    name: str
    checked: int = 0
    counts: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "checked": self.checked,
            "counts": dict(self.counts),
            "counterexamples": [list(c) for c in self.counterexamples[:20]],
            "ok": self.ok,
        }


def verify_phi_identities(H: int) -> ScanResult:
    """Check φ = φ₁φ₂ and (a + b)² = −ω̄φ₁ − ωφ₂ for all |a|, |b| ≤ H."""
    if H < 1:
        raise ValueError(f"H must be ≥ 1, got {H}")
    result = ScanResult(name="phi_identities")
    for a in range(-H, H + 1):
        for b in range(-H, H + 1):
            f1, f2 = phi12(a, b)
            if f1 * f2 != phi(a, b):
                result.counterexamples.append(("phi = phi1*phi2", a, b))
            if -(OMEGA_BAR * f1) - OMEGA * f2 != (a + b) ** 2:
                result.counterexamples.append(("(a+b)^2 = -w'phi1 - w phi2", a, b))
            result.checked += 1
    logger.info("phi identities: %d pairs, %d failures", result.checked, len(result.counterexamples))
    return result


# ---------------------------------------------------------------------------
# Residue scans
# ---------------------------------------------------------------------------
def _grid(modulus: int) -> tuple[np.ndarray, np.ndarray]:
    """All residue pairs (a, b) mod *modulus* that are not both divisible by its prime."""
    a, b = np.meshgrid(np.arange(modulus, dtype=np.int64), np.arange(modulus, dtype=np.int64), indexing="ij")
    a, b = a.ravel(), b.ravel()
    prime = 5 if modulus == 25 else modulus
    keep = (a % prime != 0) | (b % prime != 0)
    return a[keep], b[keep]


def _phi_mod(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    a2, b2, ab = a * a % m, b * b % m, a * b % m
    return (a2 * a2 - a2 * ab + a2 * b2 - ab * b2 + b2 * b2) % m


def _fifth_power_sum_mod(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    a2, b2 = a * a % m, b * b % m
    return (a2 * a2 % m * a + b2 * b2 % m * b) % m


def lemma_scan(l_max: int) -> ScanResult:
    """Residue-class verification of the coprimality and splitting lemmas.

    For every prime l ≤ *l_max* and every pair (a, b) mod l not both ≡ 0:

    * l | a + b and l | φ(a, b) only for l = 5, and then ν₅(φ) = 1 (checked mod 25);
    * l ≢ 1 (mod 5) and l | a⁵ + b⁵ imply l | a + b;
    * l | φ(a, b), l ≠ 5, implies l ≡ 1 (mod 5);
    * φ₁(a, b) and φ₂(a, b) have no common prime factor above l ≠ 5.
    """
    if l_max < 7:
        raise ValueError(f"l_max must be ≥ 7, got {l_max}")
    result = ScanResult(name="lemma_scan", counts={"primes": 0, "pairs": 0, "phi_divisible": 0})

    def record(prop: str, l: int, mask: np.ndarray, a: np.ndarray, b: np.ndarray):
        for x, y in zip(a[mask][:5].tolist(), b[mask][:5].tolist()):
            result.counterexamples.append((prop, l, x, y))

    for l in primerange(2, l_max + 1):
        a, b = _grid(l)
        s = (a + b) % l
        f = _phi_mod(a, b, l)
        result.counts["primes"] += 1
        result.counts["pairs"] += int(a.size)
        result.counts["phi_divisible"] += int(np.count_nonzero(f == 0))

        if l != 5:
            record("coprime outside 5", l, (s == 0) & (f == 0), a, b)
        if l % 5 != 1:
            fifth = _fifth_power_sum_mod(a, b, l)
            record("l | a^5+b^5 => l | a+b", l, (fifth == 0) & (s != 0), a, b)
            if l != 5:
                record("l | phi => l = 1 mod 5", l, f == 0, a, b)
        else:
            # split in Q(√5): check φ₁, φ₂ under both embeddings of ω
            for r in sqrt_mod(5, l, all_roots=True):
                w = (r - 1) * pow(2, -1, l) % l
                wb = (-1 - r) * pow(2, -1, l) % l
                base = (a * a + b * b) % l
                ab = a * b % l
                f1 = (base + w * ab) % l
                f2 = (base + wb * ab) % l
                record("phi1, phi2 coprime outside 5", l, (f1 == 0) & (f2 == 0), a, b)
        result.checked += int(a.size)

    a, b = _grid(25)
    f = _phi_mod(a, b, 25)
    five = (a + b) % 5 == 0
    record("nu5(phi) = 1 when 5 | a+b", 5, five & ((f % 5 != 0) | (f == 0)), a, b)
    result.checked += int(a.size)

    logger.info(
        "lemma scan up to %d: %d primes, %d residue pairs, %d counterexamples",
        l_max, result.counts["primes"], result.counts["pairs"], len(result.counterexamples),
    )
    return result


# ---------------------------------------------------------------------------
# Solutions
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SolutionCase:
    """Local data of a coprime pair (a, b) with d | a + b.

    ``nu2`` is ``math.inf`` when a + b = 0.  ``c0_radical`` is the radical of
    φ(a, b) with its power of 5 removed; ``unverified_tail`` lists cofactors
    left composite-or-unknown by trial division.
    """
    a: int
    b: int
    d: int
    p: Optional[int]
    equation_tag: str
    nu2: int | float
    nu5: int | float
    phi_value: int
    c0_radical: int
    cofactor_is_pth_power: bool
    unverified_tail: tuple[int, ...] = ()
    z: Optional[int] = None
    trivial: Optional[bool] = None

    def __post_init__(self):
        if self.equation_tag not in ("Eq4", "Eq5"):
            raise ValueError(f"equation_tag must be Eq4 or Eq5, got {self.equation_tag!r}")
        if self.c0_radical % 2 == 0 or self.c0_radical % 5 == 0:
            raise ValueError(f"c0_radical must be coprime to 10, got {self.c0_radical}")

    @property
    def nu2_class(self) -> str:
        """Row key for the conductor tables: '0', '1', '2' or '>=3'."""
        if self.nu2 >= 3:
            return ">=3"
        return str(self.nu2)

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "d": self.d,
            "p": self.p,
            "equation": self.equation_tag,
            "nu2": "inf" if self.nu2 == INFINITY else self.nu2,
            "nu5": "inf" if self.nu5 == INFINITY else self.nu5,
            "phi": self.phi_value,
            "c0_radical": self.c0_radical,
            "cofactor_is_pth_power": self.cofactor_is_pth_power,
            "unverified_tail": list(self.unverified_tail),
            "z": self.z,
            "trivial": self.trivial,
        }


def _valuation(n: int, p: int) -> int | float:
    return INFINITY if n == 0 else multiplicity(p, n)


def prime_support(n: int, trial_limit: int = DEFAULT_TRIAL_LIMIT) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Prime factors of n found by trial division up to *trial_limit*, and the cofactors not certified prime."""
    primes, tail = [], []
    for q in sorted(factorint(abs(n), limit=trial_limit)):
        if q > trial_limit and not isprime(q):
            tail.append(q)
        else:
            primes.append(q)
    if tail:
        logger.warning("unverified factorisation tail for %d: %s", n, tail)
    return tuple(primes), tuple(tail)


def classify_solution(
    a: int,
    b: int,
    d: int,
    p: Optional[int] = None,
    *,
    strict: bool = False,
    trial_limit: int = DEFAULT_TRIAL_LIMIT,
) -> SolutionCase:
    """Sort a coprime pair into Eq4 / Eq5 and compute its local data."""
    if math.gcd(a, b) != 1:
        raise SolutionInputError(f"gcd({a}, {b}) = {math.gcd(a, b)} ≠ 1")
    if d not in (2, 3):
        raise SolutionInputError(f"d must be 2 or 3, got {d}")
    if (a + b) % d:
        raise SolutionInputError(f"{d} does not divide a + b = {a + b}")

    value = phi(a, b)
    nu5_phi = multiplicity(5, value)
    cofactor = value // 5 ** nu5_phi
    primes, tail = prime_support(cofactor, trial_limit)
    rad = math.prod(primes) * math.prod(tail)
    bad = [q for q in primes if q % 5 != 1]
    if bad:
        raise ArithmeticError(f"φ({a}, {b}) has prime factors {bad} not ≡ 1 mod 5")

    exact = p is not None and integer_nthroot(cofactor, p)[1]
    if strict and not exact:
        raise SolutionInputError(f"φ({a}, {b}) / 5^{nu5_phi} = {cofactor} is not a {p}-th power")

    return SolutionCase(
        a=a,
        b=b,
        d=d,
        p=p,
        equation_tag="Eq5" if (a + b) % 5 == 0 else "Eq4",
        nu2=_valuation(a + b, 2),
        nu5=_valuation(a + b, 5),
        phi_value=value,
        c0_radical=rad,
        cofactor_is_pth_power=bool(exact),
        unverified_tail=tail,
    )


def _signed_root(n: int, p: int) -> Optional[int]:
    if n < 0 and p % 2 == 0:
        return None
    root, exact = integer_nthroot(abs(n), p)
    if not exact:
        return None
    return root if n >= 0 else -root


def search_solutions(d: int, p: int, H: int, *, include_degenerate: bool = False) -> list[SolutionCase]:
    """All coprime |a|, |b| ≤ H with a⁵ + b⁵ = d·z^p, in lexicographic order of (a, b).

    Only pairs with d | a + b are visited.  Pairs with a + b = 0 (z = 0) are
    skipped unless *include_degenerate* is set.
    """
    if H < 1:
        raise ValueError(f"H must be ≥ 1, got {H}")
    if not isprime(p):
        raise ValueError(f"p must be prime, got {p}")
    a, b = np.meshgrid(np.arange(-H, H + 1, dtype=np.int64), np.arange(-H, H + 1, dtype=np.int64), indexing="ij")
    a, b = a.ravel(), b.ravel()
    mask = (np.gcd(a, b) == 1) & ((a + b) % d == 0)
    if not include_degenerate:
        mask &= (a + b) != 0
    hits: list[SolutionCase] = []
    for x, y in zip(a[mask].tolist(), b[mask].tolist()):
        total = x ** 5 + y ** 5
        if total % d:
            continue
        z = _signed_root(total // d, p)
        if z is None:
            continue
        case = classify_solution(x, y, d, p)
        hits.append(replace(case, z=z, trivial=abs(z) <= 1))
    logger.info("search d=%d p=%d H=%d: %d hits (%d non-trivial)",
                d, p, H, len(hits), sum(1 for h in hits if not h.trivial))
    return hits