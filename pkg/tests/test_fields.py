import random
from fractions import Fraction

import pytest
from sympy import Integer, legendre_symbol

from core.fields import (
    I,
    OMEGA,
    OMEGA_BAR,
    SQRT5,
    SQRT5_Q,
    SQRT_M2,
    THETA,
    GaussianElt,
    OctElt,
    QuadElt,
    QuarticElt,
    conj_sqrt5,
    galois_group_K,
    galois_group_K_sqrtm2,
    norm_to_Q,
    relative_norm,
)


def random_quartic(rng, bound=5):
    return QuarticElt.of(*(Fraction(rng.randint(-bound, bound), rng.randint(1, 3)) for _ in range(4)))


# ---------------------------------------------------------------------------
# Q(√5)
# ---------------------------------------------------------------------------
def test_conj_sqrt5_examples():
    assert conj_sqrt5(OMEGA) == OMEGA_BAR
    assert conj_sqrt5(QuadElt(7)) == 7
    assert QuadElt(2, 1) * QuadElt(2, -1) == -1


def test_omega_relations():
    assert OMEGA + OMEGA_BAR == -1
    assert OMEGA * OMEGA_BAR == -1
    assert OMEGA * OMEGA + OMEGA - 1 == 0


def test_quad_embeds_through_sqrt5():
    assert QuarticElt.from_quad(SQRT5_Q) == SQRT5
    assert SQRT5 * SQRT5 == 5
    assert QuarticElt.from_quad(OMEGA) == (SQRT5 - 1) / 2


# ---------------------------------------------------------------------------
# K = Q(θ)
# ---------------------------------------------------------------------------
def test_theta_satisfies_minimal_polynomial():
    assert THETA ** 4 - 5 * THETA ** 2 + 5 == 0


def test_field_axioms_on_random_triples():
    rng = random.Random(7)
    for _ in range(30):
        x, y, z = random_quartic(rng), random_quartic(rng), random_quartic(rng)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        if not x.is_zero():
            assert x * x.inverse() == 1


def test_galois_group_K():
    group = galois_group_K()
    assert len(group) == 4
    assert any(g.is_identity() for g in group)
    images = {g.theta_image for g in group}
    assert THETA ** 3 - 3 * THETA in images
    generator = next(g for g in group if g.theta_image == THETA ** 3 - 3 * THETA)
    assert generator.order() == 4
    assert generator.restricts_to_conjugation()


def test_galois_group_is_closed_under_composition():
    group = galois_group_K()
    images = {g.theta_image for g in group}
    for g in group:
        for h in group:
            assert g.compose(h).theta_image in images


def test_automorphism_matrix_of_identity():
    identity = next(g for g in galois_group_K() if g.is_identity())
    matrix = identity.matrix()
    assert all(matrix[i][j] == (1 if i == j else 0) for i in range(4) for j in range(4))


def test_norm_is_galois_invariant():
    rng = random.Random(11)
    for _ in range(10):
        z = random_quartic(rng)
        if z.is_zero():
            continue
        assert {norm_to_Q(g(z)) for g in galois_group_K()} == {norm_to_Q(z)}


@pytest.mark.parametrize("element, expected", [
    (THETA, 5),
    (QuarticElt.of(2), 16),
    (I - 1, 2),
    (QuadElt(2, 1), -1),
])
def test_norm_to_Q(element, expected):
    assert norm_to_Q(element) == expected


def test_norm_to_Q_rejects_other_types():
    with pytest.raises(TypeError):
        norm_to_Q("theta")


# ---------------------------------------------------------------------------
# K(√−2)
# ---------------------------------------------------------------------------
def test_sqrt_m2_squares_to_minus_two():
    assert SQRT_M2 * SQRT_M2 == -2


def test_galois_group_K_sqrtm2():
    group = galois_group_K_sqrtm2()
    assert len(group.elements) == 8
    assert group.sigma0.order() == 4
    assert group.sigma1.order() == 2
    assert group.sigma0(SQRT_M2) == -SQRT_M2
    assert group.sigma1(SQRT_M2) == -SQRT_M2
    assert group.sigma0(OctElt(SQRT5)) == OctElt(-SQRT5)
    assert group.sigma1(OctElt(SQRT5)) == OctElt(SQRT5)


def test_galois_group_K_sqrtm2_rejects_base_fixing_sqrt5():
    identity = next(g for g in galois_group_K() if g.is_identity())
    with pytest.raises(ValueError):
        galois_group_K_sqrtm2(identity)


def test_relative_norms():
    group = galois_group_K_sqrtm2()
    assert relative_norm(OctElt(QuarticElt.of(1)), group.sigma0) == 1
    assert relative_norm(OctElt(QuarticElt.of(-5, 0, 2)), group.sigma1) == 5
    assert relative_norm(SQRT_M2, group.sigma1) == 2


# ---------------------------------------------------------------------------
# Q(i)
# ---------------------------------------------------------------------------
def test_gaussian_arithmetic():
    assert I * I == -1
    assert (1 + I).conj() == 1 - I
    assert (2 * I - 2) * (2 * I - 2) == GaussianElt(0, -8)
    assert (3 + 4 * I) / (3 + 4 * I) == 1


def test_gaussian_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        GaussianElt(0).inverse()


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        QuadElt(0.5)


def test_sympy_integers_are_scalars():
    assert GaussianElt(1) == legendre_symbol(4, 5)
    assert GaussianElt(-1) == legendre_symbol(2, 5)
    assert QuadElt(Integer(3)) == 3
    assert QuarticElt.of(Integer(2)) * THETA == 2 * THETA


def test_equal_elements_hash_alike():
    assert hash(GaussianElt(1)) == hash(1)
    assert hash(QuadElt(Fraction(1, 2))) == hash(Fraction(1, 2))
    assert hash(QuarticElt.from_quad(SQRT5_Q)) == hash(SQRT5_Q)
    assert hash(OctElt(QuarticElt.of(3))) == hash(3)
    assert len({GaussianElt(2), 2, Fraction(2)}) == 1
    assert len({QuarticElt.of(-5, 0, 2), SQRT5_Q, OctElt(SQRT5)}) == 1


def test_denominator_is_common_multiple():
    assert QuarticElt.of(Fraction(1, 4), Fraction(1, 6), 1, Fraction(-2, 9)).denominator() == 36
