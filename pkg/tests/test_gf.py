import math
import random

import pytest

from rslab import gf
from rslab.gf import (
    DegreeMismatch,
    DivisionByZero,
    MixedFields,
    NTooLarge,
    NotPrime,
    OrderTooLarge,
    ReducibleModulus,
    TowerField,
    lift_for_testing,
    make_field,
    sample_distinct,
)


def test_make_prime_field(gf7):
    assert gf7.p == 7 and gf7.m == 1 and gf7.order == 7


def test_make_extension_with_modulus():
    f8 = make_field(2, 3, [1, 1, 0, 1])  # x^3 + x + 1
    assert f8.order == 8
    # x * x^2 = x + 1
    assert f8.mul(2, 4) == 3


def test_modulus_search_is_deterministic():
    assert make_field(2, 3).modulus == (1, 1, 0, 1)
    assert make_field(2, 3).modulus == make_field(2, 3).modulus


def test_composite_characteristic_rejected():
    with pytest.raises(NotPrime):
        make_field(6)


def test_reducible_modulus_rejected():
    with pytest.raises(ReducibleModulus):
        make_field(2, 3, [1, 0, 0, 1])  # x^3 + 1 = (x+1)(x^2+x+1)


def test_modulus_shape_checked():
    with pytest.raises(DegreeMismatch):
        make_field(2, 3, [1, 1, 1])
    with pytest.raises(DegreeMismatch):
        make_field(2, 3, [1, 1, 0, 0, 1])
    with pytest.raises(DegreeMismatch):
        make_field(7, 1, [1, 1])


def test_order_cap():
    with pytest.raises(OrderTooLarge):
        make_field(2, 63)


def test_basic_arith_gf7(gf7):
    a, b = gf7.element(3), gf7.element(5)
    assert (a * b).rep == 1
    assert gf7.element(4).inverse().rep == 2
    assert (a + b).rep == 1
    assert (a - b).rep == 5
    assert (a / b).rep == gf7.mul(3, gf7.inv(5))
    assert (a ** 6).rep == 1


def test_division_by_zero(gf7):
    with pytest.raises(DivisionByZero):
        gf7.element(3) / gf7.element(0)
    with pytest.raises(DivisionByZero):
        gf7.inv(0)


def test_mixed_fields_rejected(gf7, gf101):
    with pytest.raises(MixedFields):
        gf7.element(1) + gf101.element(1)


@pytest.mark.parametrize("p,m", [(7, 1), (2, 3), (3, 2), (2, 8), (101, 1)])
def test_field_axioms_random(p, m):
    ctx = make_field(p, m)
    rng = random.Random(p * 100 + m)
    q = ctx.order
    for _ in range(10_000):
        a, b, c = rng.randrange(q), rng.randrange(q), rng.randrange(q)
        assert ctx.add(ctx.add(a, b), c) == ctx.add(a, ctx.add(b, c))
        assert ctx.mul(ctx.mul(a, b), c) == ctx.mul(a, ctx.mul(b, c))
        assert ctx.mul(a, b) == ctx.mul(b, a)
        assert ctx.add(a, b) == ctx.add(b, a)
        assert ctx.mul(a, ctx.add(b, c)) == ctx.add(ctx.mul(a, b), ctx.mul(a, c))
        if a:
            assert ctx.mul(a, ctx.inv(a)) == 1


@pytest.mark.parametrize("p,m", [(2, 3), (3, 2), (2, 8), (5, 3)])
def test_frobenius(p, m):
    ctx = make_field(p, m)
    rng = random.Random(p + m)
    for _ in range(500):
        a, b = rng.randrange(ctx.order), rng.randrange(ctx.order)
        lhs = ctx.pow_(ctx.add(a, b), p)
        rhs = ctx.add(ctx.pow_(a, p), ctx.pow_(b, p))
        assert lhs == rhs


def test_pow_edge_cases(gf7):
    assert gf7.pow_(0, 0) == 1
    assert gf7.pow_(0, 5) == 0
    assert gf7.pow_(3, -1) == gf7.inv(3)


def test_big_extension_without_tables():
    ctx = make_field(101, 3)
    assert ctx._log is None  # too big for tables
    rng = random.Random(0)
    for _ in range(200):
        a = rng.randrange(1, ctx.order)
        assert ctx.mul(a, ctx.inv(a)) == 1


def test_sample_distinct_full_field_is_permutation(gf7):
    pts = sample_distinct(gf7, 7, random.Random(1))
    assert sorted(e.rep for e in pts) == list(range(7))


def test_sample_distinct_too_many(gf7):
    with pytest.raises(NTooLarge):
        sample_distinct(gf7, 8, random.Random(1))


def test_sample_distinct_deterministic(gf7):
    a = sample_distinct(gf7, 4, random.Random(99))
    b = sample_distinct(gf7, 4, random.Random(99))
    assert a == b


def test_sample_distinct_first_position_uniform(gf7):
    # every element lands in position 1 with frequency 1/q within 5 sigma
    draws = 20_000
    rng = random.Random(5)
    counts = [0] * 7
    for _ in range(draws):
        counts[sample_distinct(gf7, 3, rng)[0].rep] += 1
    p = 1 / 7
    sigma = math.sqrt(p * (1 - p) / draws)
    for c in counts:
        assert abs(c / draws - p) <= 5 * sigma


def test_element_order_and_equality(gf7):
    assert gf7.element(3) == gf7.element(10)
    assert gf7.element(2) < gf7.element(5)
    assert make_field(7).element(3) == gf7.element(3)  # same params, fresh context


def test_tower_field_ops(gf101):
    tower = lift_for_testing(gf101)
    assert tower.order >= 1 << 20
    rng = random.Random(2)
    x, y, z = tower.sample(rng), tower.sample(rng), tower.sample(rng)
    assert tower.mul(x, y) == tower.mul(y, x)
    assert tower.mul(tower.mul(x, y), z) == tower.mul(x, tower.mul(y, z))
    assert tower.mul(x, tower.one) == x
    assert tower.add(x, tower.zero) == x
    # embedding is a ring homomorphism
    a, b = rng.randrange(101), rng.randrange(101)
    assert tower.mul(tower.embed(a), tower.embed(b)) == tower.embed(gf101.mul(a, b))


def test_tower_sample_distinct(gf7):
    tower = TowerField(gf7, 8)
    pts = tower.sample_distinct(20, random.Random(1))
    assert len(set(pts)) == 20
