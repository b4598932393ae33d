"""
Shared fixtures.

The real newform dataset comes from an external modular-symbols run, so the
suite builds a synthetic document with the same census and the same
arithmetic shape: coefficients in Q(i) of the inner-twist shape at every
good prime, CM zeros at inert primes, a₃ of the S3 forms in {2i − 2, i − 1},
S2 forms whose c₃ generates a quartic field (c₃² = −2mi, or c₃ a root of
x² ± (2 − 2i)x + i at level 800) and level-800 S3 forms that are the χ₈
twists of the level-1600 ones.
"""

from __future__ import annotations

import copy
import json
import math
import random
from fractions import Fraction

import pytest
from sympy import factorint, jacobi_symbol, primerange

from core.fields import GaussianElt
from core.galois import build_epsilon, chi8
from core.newforms import COEFFICIENT_HORIZON, HeckeField, load_newforms

EPS_BAR = build_epsilon().conj()
CHI8 = chi8()

# unit u with conj(u) = ε(q)·u, by q mod 20
SHAPE_UNITS = {1: (1, 0), 19: (1, 0), 9: (0, 1), 11: (0, 1), 3: (1, -1), 17: (1, -1), 7: (1, 1), 13: (1, 1)}


def shaped(q: int, t: int) -> GaussianElt:
    re, im = SHAPE_UNITS[q % 20]
    return GaussianElt(t * re, t * im)


def gaussian_field() -> HeckeField:
    return HeckeField((1, 0, 1), (Fraction(0), Fraction(1)))


def quartic_field(k: int) -> HeckeField:
    """Q(g) with g⁴ = −k², so that g² = −k·i."""
    return HeckeField((k * k, 0, 0, 0, 1), (Fraction(0), Fraction(0), Fraction(-1, k), Fraction(0)))


def _random_t(seed: int, q: int) -> int:
    return random.Random(seed * 1009 + q).choice((-2, 2))


def expand(fld: HeckeField, level: int, prime_value) -> list:
    """a_1..a_H from prime values through the Hecke recursion and multiplicativity."""
    horizon = COEFFICIENT_HORIZON
    powers = {}
    for q in primerange(2, horizon + 1):
        if level % q == 0:
            pk = q
            while pk <= horizon:
                powers[pk] = fld.zero()
                pk *= q
            continue
        aq = prime_value(q)
        eps_q = fld.from_gaussian(EPS_BAR(q) * q)
        prev, cur, pk = fld.scalar(1), aq, q
        while pk <= horizon:
            powers[pk] = cur
            prev, cur = cur, fld.sub(fld.mul(aq, cur), fld.mul(eps_q, prev))
            pk *= q
    coeffs = [fld.scalar(1)]
    for n in range(2, horizon + 1):
        value = fld.scalar(1)
        for q, e in factorint(n).items():
            value = fld.mul(value, powers[q ** e])
        coeffs.append(value)
    return coeffs


def s3_coefficients(seed: int, a3_t: int, a7_t: int) -> list:
    fld = gaussian_field()

    def prime_value(q):
        if q == 3:
            return fld.from_gaussian(shaped(3, a3_t))
        if q == 7:
            return fld.from_gaussian(shaped(7, a7_t))
        return fld.from_gaussian(shaped(q, _random_t(seed, q)))

    return expand(fld, 1600, prime_value)


def cm_coefficients(seed: int, disc: int, level: int, a3_t: int = -1) -> list:
    fld = gaussian_field()

    def prime_value(q):
        if jacobi_symbol(disc % q, q) == -1:
            return fld.zero()
        if q == 3:
            return fld.from_gaussian(shaped(3, a3_t))
        return fld.from_gaussian(shaped(q, _random_t(seed, q)))

    return expand(fld, level, prime_value)


def s2_coefficients(seed: int, fld: HeckeField, c3, level: int) -> list:
    def prime_value(q):
        if q == 3:
            return c3
        return fld.from_gaussian(shaped(q, _random_t(seed, q)))

    return expand(fld, level, prime_value)


def record(label: str, level: int, fld: HeckeField, coeffs: list, cm_disc=None) -> dict:
    values = list(fld.i_coords) + [c for a in coeffs for c in a]
    den = math.lcm(*(c.denominator for c in values))
    return {
        "label": label,
        "level": level,
        "char": "20.ord4",
        "field_poly": list(fld.poly),
        "i_embed": [int(c * den) for c in fld.i_coords],
        "cm_disc": cm_disc,
        "an": [[int(c * den) for c in a] for a in coeffs],
        "conj_class_size": fld.degree,
        "denominator": den,
    }


def build_document() -> dict:
    forms = []
    seed = 0

    # S3 at 1600 and their χ₈ twists at 800
    for a3_t in (-2, -1):
        for a7_t in (0, 1, -1, 2, -2):
            seed += 1
            coeffs = s3_coefficients(seed, a3_t, a7_t)
            label = f"1600.s3.{seed}"
            forms.append(record(label, 1600, gaussian_field(), coeffs))
            fld = gaussian_field()
            twisted = [fld.mul(a, fld.scalar(CHI8(n).re)) for n, a in enumerate(coeffs, start=1)]
            forms.append(record(f"800.s3.{seed}", 800, fld, twisted))

    # S1: four with CM by Q(i), four by Q(sqrt(-5)) with a_3 = ±(i − 1)
    for k, level in enumerate((1600, 400, 100, 1600)):
        seed += 1
        forms.append(record(f"{level}.cm4.{seed}", level, gaussian_field(),
                            cm_coefficients(seed, -4, level), cm_disc=-4))
    for k, level in enumerate((1600, 400, 100, 400)):
        seed += 1
        forms.append(record(f"{level}.cm20.{seed}", level, gaussian_field(),
                            cm_coefficients(seed, -20, level, a3_t=(-1, 1)[k % 2]), cm_disc=-20))

    # S2 at 100/400/1600: c₃ = g with g² = −2mi; the first is the x² + 10i form at 400
    for k, (level, m) in enumerate(((400, 5), (1600, 2), (100, 3), (1600, 5), (400, 2), (100, 5),
                                    (1600, 3), (400, 3), (100, 2), (1600, 2), (400, 5), (1600, 3))):
        seed += 1
        fld = quartic_field(2 * m)
        g = fld.coords([0, 1])
        forms.append(record(f"{level}.s2.{seed}", level, fld, s2_coefficients(seed, fld, g, level)))

    # S2 at 800: c₃ root of x² ± (2 − 2i)x + i, with g² = −3i and 1 − i = 1 + g²/3
    fld = quartic_field(3)
    w = fld.from_gaussian(GaussianElt(1, -1))
    g = fld.coords([0, 1])
    for sign in (1, 1, -1, -1):
        seed += 1
        c3 = fld.sub(g, w) if sign == 1 else fld.add(g, w)
        forms.append(record(f"800.s2.{seed}", 800, fld, s2_coefficients(seed, fld, c3, 800)))

    return {"schema_version": 1, "forms": forms}


_DOCUMENT = None


def _document() -> dict:
    global _DOCUMENT
    if _DOCUMENT is None:
        _DOCUMENT = build_document()
    return _DOCUMENT


@pytest.fixture
def newform_document() -> dict:
    """A fresh, mutable copy of the synthetic document."""
    return copy.deepcopy(_document())


@pytest.fixture(scope="session")
def dataset_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("newforms") / "forms.json"
    path.write_text(json.dumps(_document()), encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def newforms(dataset_path):
    return load_newforms(dataset_path)


def write_document(path, document) -> str:
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)
