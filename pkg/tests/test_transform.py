from fractions import Fraction

import pytest
from sympy import Rational, expand, symbols

from core.transform import WeierstrassTransform, compose_all

CURVE = (Fraction(1), Fraction(-1), Fraction(1), Fraction(-3), Fraction(5))


def weierstrass(ainvs, x, y):
    a1, a2, a3, a4, a6 = (Rational(c.numerator, c.denominator) for c in ainvs)
    return y ** 2 + a1 * x * y + a3 * y - (x ** 3 + a2 * x ** 2 + a4 * x + a6)


def test_identity_leaves_coefficients_alone():
    assert WeierstrassTransform.identity().apply(CURVE) == CURVE
    assert WeierstrassTransform.identity().is_identity()


def test_zero_scaling_is_rejected():
    with pytest.raises(ValueError):
        WeierstrassTransform(u=0)


def test_point_map_carries_new_model_onto_old():
    T = WeierstrassTransform(u=2, r=1, s=3, t=-4)
    new = T.apply(CURVE)
    x, y = symbols("x y")
    X, Y = T.apply_to_point(x, y)
    assert expand(weierstrass(CURVE, X, Y) - 2 ** 6 * weierstrass(new, x, y)) == 0


def test_compose_matches_sequential_application():
    first = WeierstrassTransform(u=2, r=1, s=0, t=3)
    second = WeierstrassTransform(u=Fraction(1, 3), r=-2, s=5, t=1)
    assert first.compose(second).apply(CURVE) == second.apply(first.apply(CURVE))
    assert compose_all([first, second]) == first.compose(second)


def test_affine_matrix_agrees_with_point_map():
    T = WeierstrassTransform(u=3, r=2, s=-1, t=7)
    matrix = T.affine_matrix()
    x, y = 5, -2
    image = tuple(sum(row[k] * v for k, v in enumerate((x, y, 1))) for row in matrix[:2])
    assert image == T.apply_to_point(x, y)


def test_audit_dict_is_serialisable():
    audit = WeierstrassTransform.translation(r=1, t=Fraction(1, 2)).to_audit_dict()
    assert audit == {"u": "1", "r": "1", "s": "0", "t": "1/2"}
