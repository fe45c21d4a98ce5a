"""Reference values for testing: exact rationals and certified series intervals.

Nothing here calls the streaming kernel.  The digit encoder is a separate
implementation of the same definition, and every series value is an exact
rational interval built from a partial sum plus an explicit remainder bound.
No floating point is used.
"""
from __future__ import annotations

import operator
from fractions import Fraction
from typing import Callable, Iterator, List

from .core import Digit
from .interval import RatInterval

__all__ = [
    "ref_arith", "ref_function", "ref_tail", "ref_pi", "encode_digits",
    "cl_prefix_of_interval", "FUNCTIONS",
]

_OPS = {
    "+": operator.add, "add": operator.add,
    "-": operator.sub, "sub": operator.sub,
    "*": operator.mul, "×": operator.mul, "mul": operator.mul,
    "/": operator.truediv, "÷": operator.truediv, "div": operator.truediv,
}


def ref_arith(op: str, u, v) -> Fraction:
    """Exact u op v.  Division by zero raises ZeroDivisionError."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operator {op!r}") from None
    return fn(Fraction(u), Fraction(v))


def encode_digits(x) -> List[Digit]:
    """CL digits of a rational, straight from the definition."""
    x = Fraction(x)
    out: List[Digit] = []
    if x < 0:
        out.append(Digit.NEG)
        x = -x
    if x == 0:
        return out + [Digit.RECIP]
    if x < 1:
        out.append(Digit.RECIP)
        x = 1 / x
    while True:
        if x == 1:
            out.append(Digit.END)
            return out
        if x >= 2:
            out.append(Digit.ONE)
            x /= 2
        else:
            out.append(Digit.ZERO)
            x = 1 / (x - 1)


def cl_prefix_of_interval(i: RatInterval) -> List[Digit]:
    """Longest digit prefix shared by every rational in a finite interval.

    The set of reals with a given non-terminal prefix is an interval, so the
    common prefix of the two endpoints is shared by everything between them.
    """
    out = []
    for p, q in zip(encode_digits(i.lo), encode_digits(i.hi)):
        if p is not q:
            break
        out.append(p)
    return out


# -- certified series ---------------------------------------------------------

def _ball(s: Fraction, r: Fraction) -> RatInterval:
    return RatInterval(s - r, s + r)


def _exp_balls(x: Fraction) -> Iterator[RatInterval]:
    # After N terms with N + 1 > |x| the remainder is at most
    # t_N / (1 - |x|/(N+1)) by comparison with a geometric series.
    ax = abs(x)
    s, t, n = Fraction(0), Fraction(1), 0
    while True:
        s += t
        n += 1
        t = t * x / n
        if n + 1 > ax:
            yield _ball(s, abs(t) / (1 - ax / (n + 1)))


def _alternating_balls(first: Fraction, ratio: Callable[[int], Fraction]) -> Iterator[RatInterval]:
    # Alternating series with terms t_k, t_{k+1} = -t_k * ratio(k): once the
    # ratio is below 1 the terms shrink monotonically and the first omitted
    # term bounds the remainder.
    s, t, k = Fraction(0), first, 0
    while True:
        s += t
        r = ratio(k)
        t = -t * r
        k += 1
        if r < 1:
            yield _ball(s, abs(t))


def _cos_balls(x: Fraction) -> Iterator[RatInterval]:
    x2 = x * x
    return _alternating_balls(Fraction(1), lambda k: x2 / ((2 * k + 1) * (2 * k + 2)))


def _sin_balls(x: Fraction) -> Iterator[RatInterval]:
    x2 = x * x
    return _alternating_balls(x, lambda k: x2 / ((2 * k + 2) * (2 * k + 3)))


def _atanh_balls(z: Fraction) -> Iterator[RatInterval]:
    # atanh z = sum z^(2k+1)/(2k+1); the tail after term k is below
    # z^(2k+3) / ((2k+3)(1 - z^2)).
    z2 = z * z
    s, p, k = Fraction(0), z, 0
    while True:
        s += p / (2 * k + 1)
        p *= z2
        k += 1
        yield _ball(s, abs(p) / ((2 * k + 1) * (1 - z2)))


def _log_balls(x: Fraction) -> Iterator[RatInterval]:
    j = 0
    while x >= 2:
        x /= 2
        j += 1
    while x < 1:
        x *= 2
        j -= 1
    # log x = j log 2 + 2 atanh((y-1)/(y+1)) with 1 <= y < 2; log 2 = 2 atanh(1/3).
    for ln2, ly in zip(_atanh_balls(Fraction(1, 3)), _atanh_balls((x - 1) / (x + 1))):
        lo2, hi2 = (2 * j * ln2.lo, 2 * j * ln2.hi) if j >= 0 else (2 * j * ln2.hi, 2 * j * ln2.lo)
        yield RatInterval(lo2 + 2 * ly.lo, hi2 + 2 * ly.hi)


def _atan_inv_balls(k: int) -> Iterator[RatInterval]:
    inv = Fraction(1, k)
    return _alternating_balls(inv, lambda n: Fraction(2 * n + 1, (2 * n + 3) * k * k))


def _pi_balls() -> Iterator[RatInterval]:
    # Machin: pi = 16 atan(1/5) - 4 atan(1/239).
    for a, b in zip(_atan_inv_balls(5), _atan_inv_balls(239)):
        yield RatInterval(16 * a.lo - 4 * b.hi, 16 * a.hi - 4 * b.lo)


def _asin_balls(x: Fraction) -> Iterator[RatInterval]:
    if abs(x) == 1:
        for p in _pi_balls():
            yield RatInterval(p.lo / 2, p.hi / 2) if x > 0 else RatInterval(-p.hi / 2, -p.lo / 2)
        return
    # asin x = sum t_n x^(2n+1) with t_n decreasing, so the tail after
    # term n is below t_(n+1) |x|^(2n+3) / (1 - x^2).
    x2 = x * x
    s, t, p, n = Fraction(0), Fraction(1), x, 0
    while True:
        s += t * p
        t *= Fraction((2 * n + 1) ** 2, (2 * n + 2) * (2 * n + 3))
        p *= x2
        n += 1
        yield _ball(s, t * abs(p) / (1 - x2))


def _check_domain(name: str, x: Fraction) -> None:
    if name == "log" and x <= 0:
        raise ValueError("log needs x > 0")
    if name == "asin" and abs(x) > 1:
        raise ValueError("asin needs |x| <= 1")


FUNCTIONS = {
    "exp": _exp_balls,
    "log": _log_balls,
    "cos": _cos_balls,
    "sin": _sin_balls,
    "asin": _asin_balls,
}


def _tighten(balls: Iterator[RatInterval], eps: Fraction) -> RatInterval:
    """Running intersection of a fixed interval sequence until narrower than eps.

    Because the sequence does not depend on eps, smaller eps gives a nested
    interval.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    acc = next(balls)
    while not acc.width < eps:
        acc = acc.intersect(next(balls))
    return acc


def ref_function(name: str, x, eps) -> RatInterval:
    """Certified interval of width < eps around name(x)."""
    x = Fraction(x)
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    _check_domain(name, x)
    if x == 0 and name in ("exp", "cos"):
        return RatInterval.point(Fraction(1))
    if x == 0 and name in ("sin", "asin"):
        return RatInterval.point(Fraction(0))
    if x == 1 and name == "log":
        return RatInterval.point(Fraction(0))
    return _tighten(FUNCTIONS[name](x), eps)


def ref_pi(eps) -> RatInterval:
    return _tighten(_pi_balls(), eps)


# -- series tails ----------------------------------------------------------------

def ref_tail(family: str, n: int, w, eps) -> RatInterval:
    """Certified interval around the n-th tail of a series family at w."""
    w = Fraction(w)
    if family == "exp":
        # y_n = 1 + w/n + w^2/(n(n+1)) + ...
        balls = _tail_series(lambda i: w / (n + i), lambda i: w / (n + i))
    elif family == "log":
        # g_n = sum w^k (2n-1)/(2n+2k-1)
        balls = _tail_series(lambda i: w * (2 * n + 2 * i - 1) / (2 * n + 2 * i + 1), lambda i: w)
    elif family == "asin":
        balls = _tail_series(lambda i: w * Fraction((2 * (n + i) - 1) ** 2, 2 * (n + i) * (2 * (n + i) + 1)),
                             lambda i: w)
    elif family == "cos":
        # c_n = sum (-1)^k w^k / prod_{i<k} 2(n+i)(2(n+i)-1)
        balls = _alternating_balls(Fraction(1), lambda k: w / (2 * (n + k) * (2 * (n + k) - 1)))
    else:
        raise ValueError(f"unknown family {family!r}")
    if w == 0:
        return RatInterval.point(Fraction(1))
    return _tighten(balls, eps)


def _tail_series(ratio: Callable[[int], Fraction], bound: Callable[[int], Fraction]):
    """Sum of prod_{i<k} ratio(i) over k >= 0, with ratio(i) <= bound(i) < 1 eventually."""
    s, t, k = Fraction(0), Fraction(1), 0
    while True:
        s += t
        t *= ratio(k)
        k += 1
        q = bound(k)
        if q < 1:
            # Remaining terms: t, t*ratio(k), ... each ratio at most q.
            yield RatInterval(s, s + t / (1 - q))
