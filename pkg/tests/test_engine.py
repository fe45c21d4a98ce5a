import random
from fractions import Fraction

import pytest

from clog.core import (
    END, NEG, ONE, RECIP, ZERO, CLStream, DegenerateError, Stall, decode_rational,
    digits_to_compact, encode_rational, rational_digits,
)
from clog.engine import (
    ADD, DIV, MUL, PREFER_X, SUB, Bihom, Hom, Indeterminate, add, consume_x, consume_x_end,
    consume_y, consume_y_end, corner_values, decide_digit, div, mul, neg, produce, recip,
    run_bihom, run_hom, scale, sub, value_range,
)
from clog.interval import NEG_INF, POS_INF, RatInterval
from clog.transcendental import e_cl, pi_cl

q = CLStream.from_rational


def compact(s, limit=200):
    return list(digits_to_compact(s.take(limit)))


def test_corner_values():
    assert corner_values(ADD) == (2, POS_INF, POS_INF, POS_INF)
    assert corner_values(MUL) == (1, POS_INF, POS_INF, POS_INF)
    assert corner_values(SUB)[:3] == (0, NEG_INF, POS_INF)


def test_corner_values_degenerate():
    with pytest.raises(DegenerateError):
        corner_values(Bihom(0, 0, 0, 0, 0, 0, 0, 0))


def test_value_range():
    assert value_range(ADD) == RatInterval(Fraction(2), POS_INF, hi_open=True)
    assert value_range(SUB) == RatInterval(NEG_INF, POS_INF, True, True)
    assert value_range(Bihom(1, 0, 0, 1, 0, 0, 0, 1)) == RatInterval(Fraction(2), POS_INF, hi_open=True)


def test_value_range_indeterminate_when_denominator_changes_sign():
    # 1/(x - y) has a pole inside the box.
    assert value_range(Bihom(0, 0, 0, 1, 0, 1, -1, 0)) is Indeterminate


@pytest.mark.parametrize("r,digit", [
    (RatInterval(Fraction(2), POS_INF), ONE),
    (RatInterval(Fraction(5, 4), Fraction(19, 10)), ZERO),
    (RatInterval(Fraction(19, 10), Fraction(21, 10)), None),
    (RatInterval(Fraction(1, 4), Fraction(3, 4)), RECIP),
    (RatInterval(NEG_INF, Fraction(-1, 2)), NEG),
    (RatInterval(Fraction(1), Fraction(2)), None),
    (RatInterval(Fraction(1), Fraction(2), lo_open=True, hi_open=True), ZERO),
])
def test_decide_digit(r, digit):
    assert decide_digit(r) is digit


def test_decide_end_only_for_exhausted_point_one():
    one = RatInterval.point(Fraction(1))
    assert decide_digit(one, False, False) is END
    assert decide_digit(one, True, False) is None


def test_produce_examples():
    assert produce(ADD, ZERO) == Bihom(0, 0, 0, 1, 0, 1, 1, -1)
    assert produce(ADD, ONE) == Bihom(0, 1, 1, 0, 0, 0, 0, 2)
    assert produce(MUL, RECIP) == Bihom(0, 0, 0, 1, 1, 0, 0, 0)
    assert produce(MUL, NEG) == Bihom(-1, 0, 0, 0, 0, 0, 0, 1)


def test_consume_examples():
    assert consume_x(ADD, ZERO) == Bihom(1, 1, 0, 1, 0, 1, 0, 0)
    assert consume_x(ADD, ONE) == Bihom(0, 2, 1, 0, 0, 0, 0, 1)
    assert consume_x(MUL, RECIP) == Bihom(0, 0, 1, 0, 0, 1, 0, 0)
    assert consume_y(ADD, ONE) == Bihom(0, 1, 2, 0, 0, 0, 0, 1)


def test_consume_end():
    assert consume_x_end(ADD) == Hom(1, 1, 0, 1)
    assert consume_x_end(MUL) == Hom(1, 0, 0, 1)
    assert consume_x_end(SUB) == Hom(-1, 1, 0, 1)
    assert consume_y_end(SUB) == Hom(1, -1, 0, 1)


def test_canonical_divides_gcd():
    assert Bihom(2, 4, 6, 8, 2, 2, 2, 2).canonical() == Bihom(1, 2, 3, 4, 1, 1, 1, 1)


@pytest.mark.parametrize("op,u,v,expected", [
    (add, 3, 5, [3]),
    (mul, 19, 1, [4, 2, 1, 1]),
    (mul, Fraction(5, 2), 2, [2, 2]),
    (add, 19, -19, [-1]),
    (div, 0, 3, [-1]),
    (sub, 1, 3, [-2, 1]),
])
def test_arithmetic_on_rationals(op, u, v, expected):
    assert compact(op(q(u), q(v))) == expected


def test_division_by_zero_is_infinity():
    assert div(q(1), q(0)).take(5) == []


def test_all_zero_transform_is_degenerate():
    with pytest.raises(DegenerateError):
        run_bihom(Bihom(0, 0, 0, 0, 0, 0, 0, 0), q(1), q(2))[0]
    with pytest.raises(DegenerateError):
        run_hom(Hom(0, 0, 0, 0), q(1))[0]


def test_run_hom_examples():
    assert compact(run_hom(Hom(1, 1, 0, 2), q(3))) == [1]
    assert compact(run_hom(Hom(1, -1, 1, 1), q(3))) == [-1, 1]
    assert list(digits_to_compact(run_hom(Hom(2, 0, 0, 1), pi_cl()).take(3)))[:1] == [2]


def test_unary_helpers():
    assert compact(neg(q(Fraction(7, 3)))) == encode_rational(-7, 3)
    assert compact(recip(q(Fraction(7, 3)))) == encode_rational(3, 7)
    assert compact(scale(q(5), 3, 10)) == encode_rational(3, 2)


def test_pi_over_e_first_term():
    assert next(digits_to_compact(iter(div(pi_cl(), e_cl())))) == 0


def test_pi_minus_pi_stalls_after_fuel():
    s = sub(pi_cl(), pi_cl(), fuel=300)
    with pytest.raises(Stall) as info:
        s[0]
    assert info.value.consumed == 300
    assert info.value.interval.contains(Fraction(0))
    assert info.value.interval.width < Fraction(1, 2 ** 60)


def test_fuel_must_be_positive():
    with pytest.raises(ValueError):
        add(q(1), q(2), fuel=0)


def test_prefer_x_policy_gives_same_result():
    a, b = Fraction(17, 5), Fraction(-3, 11)
    for m, exact in [(ADD, a + b), (MUL, a * b), (DIV, a / b)]:
        s = run_bihom(m, q(a), q(b), policy=PREFER_X)
        assert decode_rational(compact(s)) == exact


def test_random_rational_pairs_all_ops():
    rng = random.Random(7)
    ops = [(add, lambda u, v: u + v), (sub, lambda u, v: u - v),
           (mul, lambda u, v: u * v), (div, lambda u, v: u / v)]
    for _ in range(100):
        u = Fraction(rng.randint(-200, 200), rng.randint(1, 200))
        v = Fraction(rng.randint(-200, 200), rng.randint(1, 200))
        for op, ref in ops:
            if op is div and v == 0:
                continue
            assert decode_rational(compact(op(q(u), q(v)))) == ref(u, v)


def test_exception_in_input_propagates_as_outer_stall():
    def broken():
        yield ONE
        raise Stall(RatInterval(Fraction(2), Fraction(3)), 5)

    s = add(CLStream(broken()), q(1))
    with pytest.raises(Stall) as info:
        s.take(10)
    assert info.value.interval.contains(Fraction(3))
