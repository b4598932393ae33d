import math
import random

import pytest

from core.descent import SolutionInputError
from core.elliptic import (
    GAMMA,
    BadReductionError,
    EnumerationBoundError,
    WeierstrassCurve,
    discriminant_check,
    frey_curve,
    frey_twist,
    reduce_and_count,
    reduction_at_P3,
    twist_scaling_check,
    twisted_trace_check,
    verify_isogeny,
)
from core.fields import OMEGA, OMEGA_BAR, QuadElt, QuarticElt, THETA
from core.localization import P3, P5, primes_above


def coprime_pairs(count, seed, bound=60, condition=lambda a, b: True):
    rng = random.Random(seed)
    pairs = []
    while len(pairs) < count:
        a, b = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if a * b != 0 and math.gcd(a, b) == 1 and condition(a, b):
            pairs.append((a, b))
    return pairs


# ---------------------------------------------------------------------------
# Frey curves
# ---------------------------------------------------------------------------
def test_frey_curve_examples():
    curve = frey_curve(1, 1)
    assert curve.a2 == 4
    assert curve.a4 == QuadElt(2, 1)
    curve = frey_curve(1, 0)
    assert (curve.a2, curve.a4) == (2, -OMEGA_BAR)
    curve = frey_curve(1, 2)
    assert curve.a2 == 6
    assert curve.a4 == -(OMEGA_BAR * (5 + 2 * OMEGA))


@pytest.mark.parametrize("a, b", [(0, 0), (2, 4)])
def test_frey_curve_rejects_bad_pairs(a, b):
    with pytest.raises(SolutionInputError):
        frey_curve(a, b)


def test_discriminant_examples():
    assert frey_curve(1, 1).discriminant == -64 * QuadElt(2, 1)
    assert frey_curve(1, 0).discriminant == 64 * OMEGA_BAR


def test_discriminant_check_on_random_pairs():
    for a, b in [(1, 1), (1, 0)] + coprime_pairs(50, seed=1):
        assert discriminant_check(a, b).ok, (a, b)


@pytest.mark.slow
def test_discriminant_check_on_a_thousand_large_pairs():
    for a, b in coprime_pairs(1000, seed=11, bound=10 ** 4):
        assert discriminant_check(a, b).ok, (a, b)


def test_frey_twist_coefficients():
    twist = frey_twist(1, 1)
    assert twist.a2 == 4 * GAMMA
    assert GAMMA == QuarticElt.of(-5, -1, 2)
    assert twist.j_invariant == frey_curve(1, 1).base_change_to_K().j_invariant


def test_twist_scaling_check():
    for a, b in [(1, 1), (3, 5), (1, 2)]:
        assert twist_scaling_check(a, b).ok


def test_invariant_relation_on_twists():
    for a, b in coprime_pairs(5, seed=2):
        curve = frey_twist(a, b)
        assert 1728 * curve.discriminant == curve.c4 ** 3 - curve.c6 ** 2


def test_quadratic_twist_scaling():
    curve = WeierstrassCurve(1, -1, 1, -3, 5)
    twisted = curve.quadratic_twist(THETA)
    assert twisted.discriminant == THETA ** 6 * curve.discriminant
    assert twisted.c4 == THETA ** 2 * curve.c4


# ---------------------------------------------------------------------------
# Isogeny
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("a, b", [(1, 1), (1, 0), (3, -7)])
def test_verify_isogeny(a, b):
    result = verify_isogeny(a, b)
    assert result.ok, [c.to_dict() for c in result.checks if not c.ok]
    names = {c.name for c in result.checks}
    assert {"mu_maps_onto_target", "mu_dual_maps_onto_target", "mu_mu_dual_duplication"} <= names


@pytest.mark.slow
def test_verify_isogeny_on_twenty_pairs():
    for a, b in coprime_pairs(20, seed=12):
        result = verify_isogeny(a, b)
        assert result.ok, (a, b, [c.name for c in result.checks if not c.ok])


# ---------------------------------------------------------------------------
# Reduction and point counting
# ---------------------------------------------------------------------------
def test_trace_at_P3_for_one_two():
    count, trace = reduce_and_count(frey_twist(1, 2), P3)
    assert (count, trace) == (100, -18)


def test_trace_at_P3_is_constant():
    for a, b in coprime_pairs(10, seed=3, condition=lambda a, b: (a + b) % 3 == 0):
        _, trace = reduce_and_count(frey_twist(a, b), P3)
        assert trace == -18, (a, b)


@pytest.mark.slow
def test_trace_at_P3_on_two_hundred_pairs():
    for a, b in coprime_pairs(200, seed=4, bound=10 ** 4, condition=lambda a, b: (a + b) % 3 == 0):
        assert reduce_and_count(frey_twist(a, b), P3)[1] == -18, (a, b)


def test_reduction_at_P3_does_not_depend_on_pair():
    assert reduction_at_P3(1, 2).ainvs == reduction_at_P3(4, -1).ainvs
    with pytest.raises(SolutionInputError):
        reduction_at_P3(1, 1)


def test_hasse_bound_above_31():
    curve = frey_twist(1, 2)
    for P in primes_above(31):
        _, trace = reduce_and_count(curve, P)
        assert trace * trace <= 4 * P.norm


def test_bad_reduction_is_refused():
    with pytest.raises(BadReductionError):
        reduce_and_count(frey_twist(1, 1), P5)


def test_enumeration_bound():
    with pytest.raises(EnumerationBoundError):
        reduce_and_count(frey_twist(1, 2), P3, point_limit=50)


@pytest.mark.parametrize("delta", [QuarticElt.of(2), THETA, THETA + 1])
def test_twisted_trace_sign(delta):
    assert twisted_trace_check(frey_twist(1, 2), P3, delta).ok
