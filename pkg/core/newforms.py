"""
Newform dataset: model, loader and census

The newforms of S₂(M, conj(ε)) for M ∈ {100, 400, 800, 1600} are produced by
an external modular-symbols computation and exported as a single JSON
document.  This module reads that document with exact arithmetic, checks
every record, and classifies the forms into the three elimination classes:

  S1  forms with complex multiplication
  S2  forms without CM whose coefficient field strictly contains Q(i)
  S3  forms without CM with coefficient field Q(i)

Document layout:

    {"schema_version": 1,
     "forms": [{"label": "...", "level": 1600, "char": "20.ord4",
                "field_poly": [1, 0, 1], "i_embed": [0, 1],
                "cm_disc": null, "an": [[1, 0], [0, 0], ...],
                "conj_class_size": 2, "denominator": 1}, ...]}

``field_poly`` and every coefficient vector list coordinates from the
constant term up, in the power basis of the field generator.  The optional
``denominator`` divides ``i_embed`` and every ``an`` entry.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from math import gcd, isqrt, sqrt
from pathlib import Path

import numpy as np
import pandas as pd
from sympy import Poly, Rational, jacobi_symbol, primerange, symbols
from sympy import resultant as sympy_resultant

from core.fields import GaussianElt
from core.galois import build_epsilon

logger = logging.getLogger("qcurve.newforms")

SCHEMA_VERSION = 1
CHARACTER_LABEL = "20.ord4"
LEVELS = (100, 400, 800, 1600)
CM_DISCRIMINANTS = (-4, -20)
COEFFICIENT_HORIZON = 480  # Sturm bound of S₂(1600)
NUMERIC_TOLERANCE = 1e-9
MULTIPLICATIVITY_SAMPLE = 60

REQUIRED_FIELDS = ("level", "char", "field_poly", "i_embed", "cm_disc", "an", "conj_class_size")

_X = symbols("x")


class DatasetSchemaError(Exception):
    """Raised when the newform document is malformed or a record breaks an invariant."""


class DatasetCountError(Exception):
    """Raised when the census of a level group differs from the expected counts."""


# ---------------------------------------------------------------------------
# Coefficient fields
# ---------------------------------------------------------------------------
Coords = tuple[Fraction, ...]


@dataclass(frozen=True)
class HeckeField:
    """Q[x]/(poly) with poly monic irreducible; elements are coordinate tuples."""
    poly: tuple[int, ...]
    i_coords: Coords

    def __post_init__(self):
        if len(self.poly) < 3 or self.poly[-1] != 1:
            raise ValueError(f"field polynomial must be monic of degree ≥ 2, got {self.poly}")
        if len(self.i_coords) != self.degree:
            raise ValueError("i must be given in the power basis of the field")

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @property
    def relative_degree(self) -> int:
        """Degree over Q(i)."""
        return self.degree // 2

    def coords(self, values) -> Coords:
        values = [Fraction(v) for v in values]
        if len(values) > self.degree:
            raise ValueError(f"too many coordinates for a degree-{self.degree} field")
        return tuple(values + [Fraction(0)] * (self.degree - len(values)))

    def zero(self) -> Coords:
        return self.coords([])

    def scalar(self, value) -> Coords:
        return self.coords([value])

    def add(self, a: Coords, b: Coords) -> Coords:
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a: Coords, b: Coords) -> Coords:
        return tuple(x - y for x, y in zip(a, b))

    def mul(self, a: Coords, b: Coords) -> Coords:
        n = self.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if c:
                for j in range(n + 1):
                    prod[k - n + j] -= c * self.poly[j]
        return tuple(prod[:n])

    def pow(self, a: Coords, k: int) -> Coords:
        result, base = self.scalar(1), a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def from_gaussian(self, z: GaussianElt) -> Coords:
        return self.add(self.scalar(z.re), tuple(z.im * c for c in self.i_coords))

    def to_gaussian(self, a: Coords) -> GaussianElt:
        """Inverse of from_gaussian; only defined when the field is Q(i)."""
        if self.degree != 2:
            raise ValueError("to_gaussian needs the coefficient field to be Q(i)")
        if self.i_coords[1] == 0:
            raise ValueError("i is not a generator of the field")
        im = a[1] / self.i_coords[1]
        return GaussianElt(a[0] - im * self.i_coords[0], im)

    def contains_i(self) -> bool:
        return self.mul(self.i_coords, self.i_coords) == self.scalar(-1)

    def norm(self, a: Coords) -> Fraction:
        """Absolute norm to Q as the resultant of the field polynomial with the element."""
        if all(c == 0 for c in a[1:]):
            return a[0] ** self.degree
        f = Poly(list(reversed(self.poly)), _X)
        g = Poly([Rational(c.numerator, c.denominator) for c in reversed(a)], _X)
        value = Rational(sympy_resultant(f, g))
        return Fraction(int(value.p), int(value.q))

    @cached_property
    def roots(self) -> np.ndarray:
        return np.roots(np.array(list(reversed(self.poly)), dtype=float))

    def embed(self, a: Coords) -> np.ndarray:
        """Images of *a* under every complex embedding."""
        return np.polyval(np.array([float(c) for c in reversed(a)]), self.roots)

    @cached_property
    def embedded_i(self) -> np.ndarray:
        return self.embed(self.i_coords)


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------
class NewformClass(str, Enum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"


@dataclass(frozen=True)
class NewformRecord:
    label: str
    level: int
    weight: int
    character: str
    field: HeckeField
    cm_disc: int | None
    coefficients: tuple[Coords, ...]
    conj_class_size: int = 1

    def a(self, n: int) -> Coords:
        if not 1 <= n <= len(self.coefficients):
            raise IndexError(f"{self.label}: a_{n} outside the stored range 1..{len(self.coefficients)}")
        return self.coefficients[n - 1]

    def a_gaussian(self, n: int) -> GaussianElt:
        return self.field.to_gaussian(self.a(n))

    @property
    def horizon(self) -> int:
        return len(self.coefficients)

    @property
    def has_gaussian_field(self) -> bool:
        return self.field.degree == 2

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "level": self.level,
            "cm_disc": self.cm_disc,
            "field_degree": self.field.degree,
            "class": classify_newform(self).value,
            "conj_class_size": self.conj_class_size,
        }


def classify_newform(f: NewformRecord) -> NewformClass:
    if f.cm_disc is not None:
        return NewformClass.S1
    if f.field.degree > 2:
        return NewformClass.S2
    return NewformClass.S3


def cm_field(f: NewformRecord) -> str | None:
    return {-4: "Q(i)", -20: "Q(sqrt(-5))"}.get(f.cm_disc)


# ---------------------------------------------------------------------------
# Record invariants
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class RecordIssue:
    label: str
    check: str
    detail: str

    def to_dict(self) -> dict:
        return {"label": self.label, "check": self.check, "detail": self.detail}


def _good_primes(f: NewformRecord):
    return (q for q in primerange(2, f.horizon + 1) if f.level % q)


def _epsilon_embedded(f: NewformRecord, q: int) -> np.ndarray:
    value = build_epsilon()(q)
    return float(value.re) + float(value.im) * f.field.embedded_i


def check_record(f: NewformRecord) -> list[RecordIssue]:
    """All per-record invariants; an empty list means the record is sound."""
    issues: list[RecordIssue] = []
    fld = f.field
    if not fld.contains_i():
        issues.append(RecordIssue(f.label, "contains_i", "i_embed does not square to -1"))
        return issues
    if f.a(1) != fld.scalar(1):
        issues.append(RecordIssue(f.label, "a1", f"a_1 = {f.a(1)}"))

    for q in _good_primes(f):
        aq = f.a(q)
        images = fld.embed(aq)
        bound = 2 * sqrt(q) + NUMERIC_TOLERANCE
        if np.any(np.abs(images) > bound):
            issues.append(RecordIssue(f.label, "weil_bound", f"|a_{q}| = {np.max(np.abs(images)):.6f} > 2√{q}"))
        eps = _epsilon_embedded(f, q)
        if np.any(np.abs(np.conj(images) - eps * images) > NUMERIC_TOLERANCE):
            issues.append(RecordIssue(f.label, "inner_twist", f"conj(a_{q}) ≠ ε({q})·a_{q}"))
        if f.cm_disc is not None and jacobi_symbol(f.cm_disc % q, q) == -1 and any(aq):
            issues.append(RecordIssue(f.label, "cm_zero", f"a_{q} ≠ 0 at a prime inert in {cm_field(f)}"))

    checked = 0
    for m in range(2, isqrt(f.horizon) + 1):
        for n in range(m + 1, f.horizon // m + 1):
            if gcd(m, n) != 1:
                continue
            if fld.mul(f.a(m), f.a(n)) != f.a(m * n):
                issues.append(RecordIssue(f.label, "multiplicative", f"a_{m * n} ≠ a_{m}·a_{n}"))
                return issues
            checked += 1
            if checked >= MULTIPLICATIVITY_SAMPLE:
                return issues
    return issues


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------
def _require_int_list(value, what: str, label: str) -> list[int]:
    if not isinstance(value, list) or not value:
        raise DatasetSchemaError(f"{label}: {what} must be a non-empty list of integers")
    for v in value:
        if isinstance(v, bool) or not isinstance(v, int):
            raise DatasetSchemaError(f"{label}: {what} contains non-integer {v!r}")
    return value


def _parse_record(raw: dict, index: int) -> NewformRecord:
    if not isinstance(raw, dict):
        raise DatasetSchemaError(f"form #{index} is not an object")
    label = str(raw.get("label") or f"{raw.get('level')}.{index}")
    missing = [k for k in REQUIRED_FIELDS if k not in raw]
    if missing:
        raise DatasetSchemaError(f"{label}: missing fields {missing}")
    level = raw["level"]
    if isinstance(level, bool) or not isinstance(level, int) or level not in LEVELS:
        raise DatasetSchemaError(f"{label}: level must be one of {LEVELS}, got {level!r}")
    if raw["char"] != CHARACTER_LABEL:
        raise DatasetSchemaError(f"{label}: character must be {CHARACTER_LABEL!r}, got {raw['char']!r}")
    if raw.get("weight", 2) != 2:
        raise DatasetSchemaError(f"{label}: only weight 2 is supported")

    poly = _require_int_list(raw["field_poly"], "field_poly", label)
    if len(poly) < 3 or len(poly) % 2 == 0 or poly[-1] != 1:
        raise DatasetSchemaError(f"{label}: field_poly must be monic of even degree, got {poly}")
    if not Poly(list(reversed(poly)), _X).is_irreducible:
        raise DatasetSchemaError(f"{label}: field_poly {poly} is reducible")

    denominator = raw.get("denominator", 1)
    if isinstance(denominator, bool) or not isinstance(denominator, int) or denominator < 1:
        raise DatasetSchemaError(f"{label}: denominator must be a positive integer")

    degree = len(poly) - 1

    def vector(values, what):
        values = _require_int_list(values, what, label)
        if len(values) > degree:
            raise DatasetSchemaError(f"{label}: {what} has more than {degree} coordinates")
        return tuple(Fraction(v, denominator) for v in values) + (Fraction(0),) * (degree - len(values))

    try:
        fld = HeckeField(tuple(poly), vector(raw["i_embed"], "i_embed"))
    except ValueError as exc:
        raise DatasetSchemaError(f"{label}: {exc}") from exc

    cm = raw["cm_disc"]
    if cm is not None and cm not in CM_DISCRIMINANTS:
        raise DatasetSchemaError(f"{label}: cm_disc must be null or one of {CM_DISCRIMINANTS}, got {cm!r}")

    an = raw["an"]
    if not isinstance(an, list) or len(an) < COEFFICIENT_HORIZON:
        raise DatasetSchemaError(f"{label}: need coefficients a_1..a_{COEFFICIENT_HORIZON}")
    coefficients = tuple(vector(c, f"a_{n}") for n, c in enumerate(an, start=1))

    size = raw["conj_class_size"]
    if isinstance(size, bool) or not isinstance(size, int) or size < 1:
        raise DatasetSchemaError(f"{label}: conj_class_size must be a positive integer")

    return NewformRecord(label, level, 2, CHARACTER_LABEL, fld, cm, coefficients, size)


def read_newforms(path: str | Path, check: bool = True) -> list[NewformRecord]:
    """Parse and, with *check*, verify every record; counts are not validated here."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Newform dataset not found: {path}")
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        raise DatasetSchemaError(f"{path}: empty document")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetSchemaError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise DatasetSchemaError(f"{path}: schema_version {SCHEMA_VERSION} is required")

    frame = pd.DataFrame(doc.get("forms") or [])
    missing = set(REQUIRED_FIELDS) - set(frame.columns)
    if frame.empty or missing:
        raise DatasetSchemaError(f"{path}: forms are missing fields {sorted(missing) or list(REQUIRED_FIELDS)}")

    forms = [_parse_record(raw, k) for k, raw in enumerate(doc["forms"])]
    labels = [f.label for f in forms]
    if len(set(labels)) != len(labels):
        raise DatasetSchemaError(f"{path}: duplicate labels")

    issues = [issue for f in forms for issue in check_record(f)] if check else []
    if issues:
        first = issues[0]
        raise DatasetSchemaError(f"{len(issues)} record invariant(s) violated, first: {first.label} {first.check}: {first.detail}")
    logger.info("Loaded %d newforms from %s", len(forms), path)
    return forms


# ---------------------------------------------------------------------------
# Census
# ---------------------------------------------------------------------------
LEVEL_GROUPS = {"100/400/1600": (100, 400, 1600), "800": (800,)}

EXPECTED_CENSUS = {
    ("100/400/1600", "S1"): 8,
    ("100/400/1600", "S2"): 12,
    ("100/400/1600", "S3"): 10,
    ("800", "S1"): 0,
    ("800", "S2"): 4,
    ("800", "S3"): 10,
}


def census(forms: list[NewformRecord]) -> pd.DataFrame:
    """Forms per level and class, one per Galois orbit."""
    frame = pd.DataFrame(
        {"level": [f.level for f in forms], "class": [classify_newform(f).value for f in forms]}
    )
    table = pd.crosstab(frame["level"], frame["class"]) if len(frame) else pd.DataFrame()
    return table.reindex(index=list(LEVELS), columns=[c.value for c in NewformClass], fill_value=0)


@dataclass(frozen=True)
class CountMismatch:
    group: str
    tag: str
    expected: int
    observed: int

    def __str__(self):
        return f"level {self.group} class {self.tag}: expected {self.expected}, found {self.observed}"


def count_mismatches(forms: list[NewformRecord]) -> list[CountMismatch]:
    table = census(forms)
    mismatches = []
    for (group, tag), expected in EXPECTED_CENSUS.items():
        observed = int(table.loc[list(LEVEL_GROUPS[group]), tag].sum())
        if observed != expected:
            mismatches.append(CountMismatch(group, tag, expected, observed))
    s3_off_level = int(table.loc[[100, 400], "S3"].sum())
    if s3_off_level:
        mismatches.append(CountMismatch("100/400", "S3", 0, s3_off_level))
    return mismatches


def cm_distribution(forms: list[NewformRecord]) -> dict[str, int]:
    """Observed level of each CM form, recorded without an expectation."""
    dist: dict[str, int] = {}
    for f in forms:
        if f.cm_disc is not None:
            key = f"{f.level}:{f.cm_disc}"
            dist[key] = dist.get(key, 0) + 1
    return dict(sorted(dist.items()))


def load_newforms(path: str | Path) -> list[NewformRecord]:
    forms = read_newforms(path)
    mismatches = count_mismatches(forms)
    if mismatches:
        raise DatasetCountError("; ".join(str(m) for m in mismatches))
    return forms


@dataclass
class DatasetSummary:
    forms: list[NewformRecord] = field(default_factory=list)
    mismatches: list[CountMismatch] = field(default_factory=list)

    def to_dict(self) -> dict:
        table = census(self.forms)
        return {
            "census": {str(level): {k: int(v) for k, v in row.items()} for level, row in table.iterrows()},
            "cm_distribution": cm_distribution(self.forms),
            "mismatches": [str(m) for m in self.mismatches],
        }


def summarize(forms: list[NewformRecord]) -> DatasetSummary:
    return DatasetSummary(forms=list(forms), mismatches=count_mismatches(forms))
