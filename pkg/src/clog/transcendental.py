"""exp, log, cos, sin, tan, arcsin and pi on continued-logarithm streams.

Each function is a power series written in nested (Horner) form,

    T_n(w) = M_n(w, T_{n+1}(w)),

where every M_n is a bihomographic map and the tails T_n are again streams.
A tail's first few digits are known in advance from a bound on the series
remainder, so the n-th tail can start emitting before T_{n+1} exists; the
remaining digits come from running the arithmetic engine on (w, T_{n+1}).
Tails are instantiated lazily and driven by an explicit stack, so deep
nesting costs no Python recursion.
"""
from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional

from .core import (
    END, NEG, ONE, RECIP, ZERO, CLStream, Digit, DomainError, PrefixBounds, Stall,
    rational_digits,
)
from .engine import (
    DEFAULT_FUEL, Bihom, ConsumePolicy, Hom, Machine, div, mul, neg, recip,
    run_bihom, run_hom, scale, sub,
)
from .interval import POS_INF, RatInterval, is_finite

__all__ = [
    "SeriesFamily", "eval_series", "exp_family", "asin_family", "cos_family", "log_family",
    "exp_cl", "log_cl", "cos_cl", "sin_cl", "tan_cl", "asin_cl", "pi_cl", "ln2_cl", "e_cl",
]


def floor_log2(x: Fraction) -> int:
    """floor(log2(x)) for a positive rational."""
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    k = p.bit_length() - q.bit_length()
    if k >= 0:
        if p < q << k:
            k -= 1
    elif p << -k < q:
        k -= 1
    return k


@dataclass(frozen=True)
class SeriesFamily:
    """A nested series: tail matrices, a-priori tail prefixes, valid w range.

    ``prefix(n, w)`` returns digits known to begin the n-th tail for every
    in-domain w; fixed-prefix families ignore ``w``.
    """

    name: str
    matrix: Callable[[int], Bihom]
    prefix: Callable[[int, Optional[CLStream]], List[Digit]]
    domain: RatInterval


# -- families ---------------------------------------------------------------

def _exp_prefix(n, w=None):
    # y_n(x) < 1 + (e^x - 1)/n < 1 + 2/n, so 1/(y_n - 1) > n/2.
    if n < 2:
        return []
    return [ZERO] + [ONE] * (floor_log2(Fraction(n)) - 1)


@functools.lru_cache(maxsize=None)
def exp_family() -> SeriesFamily:
    return SeriesFamily(
        "exp",
        lambda n: Bihom(1, 0, 0, n, 0, 0, 0, n),
        _exp_prefix,
        RatInterval(Fraction(0), Fraction(109, 100)),
    )


def _cos_prefix(n, w=None):
    # 1 - 5/(4n(2n-1)) <= c_n(w) < 1 for 0 < w < 5/2.
    if n < 2:
        return []
    ones = floor_log2(Fraction(8 * n * n - 4 * n - 5, 5))
    return [RECIP, ZERO] + [ONE] * ones


@functools.lru_cache(maxsize=None)
def cos_family() -> SeriesFamily:
    return SeriesFamily(
        "cos",
        lambda n: Bihom(-1, 0, 0, 2 * n * (2 * n - 1), 0, 0, 0, 2 * n * (2 * n - 1)),
        _cos_prefix,
        RatInterval(Fraction(0), Fraction(5, 2), hi_open=True),
    )


def _log_prefix(n, w=None):
    # g_n(w) - 1 <= (2n-1)/(2n+1) * w/(1-w) <= (2n-1)/(8(2n+1)) for w <= 1/9.
    ones = floor_log2(Fraction(8 * (2 * n + 1), 2 * n - 1))
    return [ZERO] + [ONE] * ones


@functools.lru_cache(maxsize=None)
def log_family() -> SeriesFamily:
    return SeriesFamily(
        "log",
        lambda n: Bihom(2 * n - 1, 0, 0, 2 * n + 1, 0, 0, 0, 2 * n + 1),
        _log_prefix,
        RatInterval(Fraction(0), Fraction(1, 9), lo_open=True),
    )


def asin_ratio(n: int) -> Fraction:
    """t_n / t_{n-1} for the arcsin(x)/x coefficients t_n."""
    return Fraction((2 * n - 1) ** 2, 2 * n * (2 * n + 1))


def common_prefix(u, v) -> List[Digit]:
    """Longest common digit prefix of two extended rationals."""
    out = []
    for p, q in zip(rational_digits(u), rational_digits(v)):
        if p is not q:
            break
        out.append(p)
    return out


_BOUND_BITS = 256


def _down(x: Fraction) -> Fraction:
    if x.denominator.bit_length() <= _BOUND_BITS:
        return x
    return Fraction((x.numerator << _BOUND_BITS) // x.denominator, 1 << _BOUND_BITS)


def _up(x: Fraction) -> Fraction:
    if x.denominator.bit_length() <= _BOUND_BITS:
        return x
    return Fraction(-((-x.numerator << _BOUND_BITS) // x.denominator), 1 << _BOUND_BITS)


def asin_bounds(n: int, w_lo: Fraction, w_hi, k: int):
    """Bounds on a_n(w) for w in [w_lo, w_hi] from k series terms.

    Lower: the k-term partial sum.  Upper: k-1 terms plus the geometric
    majorant of the rest (the coefficients t_n decrease).  Both increase in w.
    Terms with long denominators are rounded outward to dyadics so long sums
    stay cheap.
    """
    w_lo = Fraction(w_lo)
    open_top = w_hi is POS_INF or w_hi >= 1
    lo = hi = Fraction(1)
    t_lo = t_hi = Fraction(1)
    for j in range(1, k + 1):
        r = asin_ratio(n + j - 1)
        t_lo = _down(t_lo * r * w_lo)
        lo += t_lo
        if not open_top:
            t_hi = _up(t_hi * r * w_hi)
            if j < k:
                hi += t_hi
    if open_top:
        return lo, POS_INF
    hi += _up(t_hi / (1 - w_hi))
    return lo, hi


# Tails deeper in the nest need a few a-priori digits more than the number of
# child digits they consume before their first decision, or demand diverges.
ASIN_PREFIX_TARGET = 12
# With an irrational w the nest gains only log2(1/w) bits per level, so the
# tails must supply most digits themselves.
ASIN_PREFIX_TARGET_OPEN = 64


def _asin_prefix(n, w):
    bounds = PrefixBounds()
    pos = 0
    best: List[Digit] = []
    for rnd in range(16):
        for _ in range(64):
            iv = bounds.interval()
            if iv.is_point:
                break
            d = w[pos]
            bounds.push(d)
            if d is not None:
                pos += 1
        iv = bounds.interval()
        target = ASIN_PREFIX_TARGET if iv.is_point else ASIN_PREFIX_TARGET_OPEN
        w_lo = max(iv.lo, Fraction(0))
        lo, hi = asin_bounds(n, w_lo, iv.hi, 2 ** rnd)
        if hi is POS_INF:
            continue
        pre = common_prefix(lo, hi)
        if len(pre) >= target or (pre and pre[-1] is END):
            return pre
        if pre:
            best = pre
            if rnd >= 8 and iv.is_point:
                break
    if best:
        return best
    raise Stall(RatInterval(Fraction(1), POS_INF), 0,
                f"no a-priori digits for arcsin tail {n}")


@functools.lru_cache(maxsize=None)
def asin_family() -> SeriesFamily:
    return SeriesFamily(
        "asin",
        lambda n: Bihom((2 * n - 1) ** 2, 0, 0, 2 * n * (2 * n + 1),
                        0, 0, 0, 2 * n * (2 * n + 1)),
        _asin_prefix,
        RatInterval(Fraction(0), Fraction(1), hi_open=True),
    )


# -- the nested-series driver -------------------------------------------------

def _w_heavy(live, turn):
    # Digits of w are shared by every tail and cost nothing new; child digits
    # deepen the nest.  Read w first, then two w digits per child digit.
    if len(live) == 1:
        return live[0]
    return 0 if turn < 8 or turn % 3 else 1


SERIES_POLICY = ConsumePolicy("w-heavy", _w_heavy)

class _Tail:
    __slots__ = ("machine", "buf", "done", "w_pos", "want", "child_slot")

    def __init__(self, machine, buf, done, child_slot):
        self.machine = machine
        self.buf = buf
        self.done = done
        self.w_pos = 0
        self.want = None
        self.child_slot = child_slot


def _check_domain(fam: SeriesFamily, w: CLStream, probe: int = 16) -> None:
    b = PrefixBounds()
    try:
        for i in range(probe):
            d = w[i]
            b.push(d)
            if d is None or d is END:
                break
    except Stall:
        return
    iv = b.interval()
    dom = fam.domain
    outside = (iv.hi < dom.lo or iv.lo > dom.hi
               or (dom.hi_open and iv.lo >= dom.hi)
               or (dom.lo_open and iv.hi <= dom.lo))
    if outside:
        raise DomainError(f"{fam.name} series argument {iv} outside {dom}")


def _exact_value(w: CLStream, probe: int = 64) -> Optional[Fraction]:
    """The rational value of w if its stream ends within ``probe`` digits."""
    b = PrefixBounds()
    try:
        for i in range(probe):
            d = w[i]
            b.push(d)
            if d is None or d is END:
                iv = b.interval()
                return iv.lo if is_finite(iv.lo) else None
    except Stall:
        return None
    return None


def block_hom(fam: SeriesFamily, n: int, size: int, w: Fraction):
    """Terms n .. n+size-1 with w substituted, composed into one Hom in the child."""
    p, q = w.numerator, w.denominator
    A, B, C, D = 1, 0, 0, 1
    for i in range(n, n + size):
        a, b, c, d, e, f, g, h = fam.matrix(i).coeffs
        u, v, x, y = a * p + c * q, b * p + d * q, e * p + g * q, f * p + h * q
        A, B, C, D = A * u + B * x, A * v + B * y, C * u + D * x, C * v + D * y
    return Hom(A, B, C, D).canonical()


# Terms per tail when w is a known rational: the tail's contraction must beat
# the few digits each level loses to emission lag.
BLOCK = 8


def block_size(w: Fraction) -> int:
    """Terms per tail: at least BLOCK, and enough that w**size <= 2**-8."""
    size = BLOCK
    w = abs(Fraction(w))
    if w >= 1:
        return size
    while w ** size > Fraction(1, 256):
        size *= 2
    return size


def eval_series(fam: SeriesFamily, w: CLStream, fuel: int = DEFAULT_FUEL) -> CLStream:
    """Stream the first tail T_1(w) of a nested series family."""
    if fuel < 1:
        raise ValueError("fuel must be >= 1")

    def gen():
        _check_domain(fam, w)
        exact = _exact_value(w)
        tails: List[_Tail] = []
        size = block_size(exact) if exact is not None else 1

        def make(j):
            n = j * size + 1
            pre = fam.prefix(n, w)
            if exact is not None:
                machine = Machine(block_hom(fam, n, size, exact).coeffs, 1, track_prefix=(j == 0))
                slot = 0
            else:
                machine = Machine(fam.matrix(n).coeffs, 2, SERIES_POLICY, track_prefix=(j == 0))
                slot = 1
            for d in pre:
                machine.force(d)
            done = bool(pre) and pre[-1] is END
            return _Tail(None if done else machine, deque(pre), done, slot)

        def tail(k):
            while len(tails) <= k:
                tails.append(make(len(tails)))
            return tails[k]

        top = tail(0)
        if top.done:
            yield from top.buf
            return
        # Each new tail costs a consumption; too many without output is a stall.
        created_at = len(tails)

        def stall(cause=None):
            exc = Stall(top.machine.value_interval(), tails[-1].machine.since_emit)
            if cause is not None:
                raise exc from cause
            raise exc

        while True:
            if top.buf:
                yield top.buf.popleft()
                continue
            if top.done:
                return
            stack = [0]
            while stack:
                k = stack[-1]
                t = tails[k]
                if t.want is not None:
                    act, t.want = t.want, None
                else:
                    act = t.machine.action()
                    if act is None:
                        t.done = True
                        stack.pop()
                        continue
                    if isinstance(act, Digit):
                        t.buf.append(act)
                        if k == 0:
                            created_at = len(tails)
                        stack.pop()
                        continue
                    if t.machine.since_emit >= fuel:
                        stall()
                if act != t.child_slot:
                    try:
                        d = w[t.w_pos]
                    except Stall as exc:
                        stall(exc)
                    if d is not None:
                        t.w_pos += 1
                    t.machine.feed(act, d)
                    continue
                child = tail(k + 1)
                if child.buf:
                    t.machine.feed(act, child.buf.popleft())
                elif child.done:
                    t.machine.feed(act, None)
                else:
                    if len(tails) - created_at >= fuel:
                        stall()
                    t.want = act
                    stack.append(k + 1)

    return CLStream(gen(), name=f"{fam.name}-series")


# -- helpers --------------------------------------------------------------------

def _bound(x: CLStream, good: Callable[[RatInterval], bool], fuel: int) -> RatInterval:
    """Read digits of x until ``good(interval)`` holds, it is exact, or fuel runs out."""
    b = PrefixBounds()
    iv = b.interval()
    for i in range(fuel):
        if iv.is_point or good(iv):
            return iv
        try:
            d = x[i]
        except Stall as exc:
            try:
                return iv.intersect(exc.interval)
            except ValueError:
                return exc.interval
        b.push(d)
        iv = b.interval()
    return iv


def _is_zero(x: CLStream) -> bool:
    """True iff x is literally the stream ``r`` or ``nr``."""
    i = 1 if x[0] is NEG else 0
    return x[i] is RECIP and x[i + 1] is None


def _const(name):
    def deco(fn):
        cached = functools.lru_cache(maxsize=None)(fn)
        cached.__name__ = name
        return cached
    return deco


@_const("pi")
def pi_cl() -> CLStream:
    """pi = 6 arcsin(1/2), shared process-wide."""
    s = mul(CLStream.from_rational(6), asin_cl(CLStream.from_rational(1, 2)), fuel=1 << 20)
    s.name = "pi"
    return s


@_const("half_pi")
def half_pi_cl() -> CLStream:
    s = scale(pi_cl(), 1, 2, fuel=1 << 20)
    s.name = "pi/2"
    return s


@_const("ln2")
def ln2_cl() -> CLStream:
    """log 2 = 2 * (1/3) * g(1/9)."""
    g = eval_series(log_family(), CLStream.from_rational(1, 9), fuel=1 << 20)
    s = scale(g, 2, 3, fuel=1 << 20)
    s.name = "ln2"
    return s


@_const("e")
def e_cl() -> CLStream:
    s = exp_cl(CLStream.from_rational(1))
    s.name = "e"
    return s


# -- functions ------------------------------------------------------------------

EXP_DIRECT = Fraction(109, 100)
COS_DIRECT = Fraction(158, 100)


def exp_cl(x: CLStream, fuel: int = DEFAULT_FUEL) -> CLStream:
    """e**x.  Negative x via 1/e**(-x); large x via (e**(x/2**k))**(2**k)."""

    def gen():
        d0 = x[0]
        if d0 is None:
            raise DomainError("exp of infinity")
        if d0 is NEG:
            yield from recip(exp_cl(x.tail(1), fuel), fuel)
            return
        if _is_zero(x):
            yield END
            return
        iv = _bound(x, lambda v: v.width < Fraction(1, 64), fuel)
        if not is_finite(iv.hi):
            raise Stall(RatInterval(Fraction(1), POS_INF), fuel, "cannot bound exp argument")
        k = 0
        while iv.hi / 2 ** k >= EXP_DIRECT:
            k += 1
        y = x if k == 0 else scale(x, 1, 2 ** k, fuel)
        r = eval_series(exp_family(), y, fuel)
        for _ in range(k):
            r = mul(r, r, fuel)
        yield from r

    return CLStream(gen(), name="exp")


def log_cl(x: CLStream, fuel: int = DEFAULT_FUEL) -> CLStream:
    """Natural log, reduced by the leading run of Ones: x = 2**j * x', 1 < x' < 2."""

    def gen():
        d0 = x[0]
        if d0 is None:
            raise DomainError("log of infinity")
        if d0 is NEG:
            raise DomainError("log of a negative number")
        if d0 is RECIP:
            if x[1] is None:
                raise DomainError("log of zero")
            yield NEG
            yield from log_cl(x.tail(1), fuel)
            return
        j = 0
        while x[j] is ONE:
            j += 1
        dj = x[j]
        if dj is None:
            raise DomainError("log of infinity")
        if dj is END:
            if j == 0:
                yield RECIP
            else:
                yield from scale(ln2_cl(), j, 1, fuel)
            return
        reduced = x.tail(j)
        z = run_hom(Hom(1, -1, 1, 1), reduced, fuel)
        g = eval_series(log_family(), mul(z, z, fuel), fuel)
        r = run_bihom(Bihom(2, 0, 0, 0, 0, 0, 0, 1), z, g, fuel=fuel)
        if j:
            r = run_bihom(Bihom(0, j, 1, 0, 0, 0, 0, 1), ln2_cl(), r, fuel=fuel)
        yield from r

    return CLStream(gen(), name="log")


def asin_cl(x: CLStream, fuel: int = DEFAULT_FUEL) -> CLStream:
    """arcsin x = x * a_1(x**2) for |x| < 1; +-1 map to +-pi/2."""

    def gen():
        d0 = x[0]
        if d0 is None:
            raise DomainError("arcsin of infinity")
        if d0 is NEG:
            if _is_zero(x):
                yield RECIP
                return
            yield NEG
            yield from asin_cl(x.tail(1), fuel)
            return
        if d0 is END:
            yield from half_pi_cl()
            return
        if d0 is not RECIP:
            raise DomainError("arcsin argument greater than 1")
        if x[1] is None:
            yield RECIP
            return
        a = eval_series(asin_family(), mul(x, x, fuel), fuel)
        yield from mul(x, a, fuel)

    return CLStream(gen(), name="asin")


def cos_cl(x: CLStream, fuel: int = DEFAULT_FUEL) -> CLStream:
    """cos x, reduced to |x - k pi| < 1.58 with the sign (-1)**k."""

    def gen():
        d0 = x[0]
        if d0 is None:
            raise DomainError("cos of infinity")
        y = x.tail(1) if d0 is NEG else x
        if _is_zero(y):
            yield END
            return
        if y is pi_cl():
            yield from rational_digits(-1)
            return
        iv = _bound(y, lambda v: v.width < Fraction(1, 512), fuel)
        if not is_finite(iv.hi):
            raise Stall(RatInterval(Fraction(-1), Fraction(1)), fuel, "cannot bound cos argument")
        k = 0
        if iv.hi >= COS_DIRECT:
            k, z_iv = _reduce_by_pi(iv, fuel)
            if z_iv is None:
                raise Stall(RatInterval(Fraction(-1), Fraction(1)), fuel, "cannot reduce cos argument")
        z = y if k == 0 else sub(y, scale(pi_cl(), k, 1, fuel), fuel)
        c = eval_series(cos_family(), mul(z, z, fuel), fuel)
        yield from (neg(c, fuel) if k % 2 else c)

    return CLStream(gen(), name="cos")


def _reduce_by_pi(iv: RatInterval, fuel: int):
    """Choose k with |x - k pi| < 1.58 for every x in iv."""
    pi = pi_cl()
    width = Fraction(1, 512)
    mid = iv.midpoint
    for _ in range(8):
        piv = _bound(pi, lambda v, w=width: v.width < w, fuel)
        k = int(round(mid / piv.midpoint))
        lo = iv.lo - k * piv.hi
        hi = iv.hi - k * piv.lo
        if max(abs(lo), abs(hi)) < COS_DIRECT:
            return k, RatInterval(lo, hi)
        width /= 64
    return k, None


def sin_cl(x: CLStream, fuel: int = DEFAULT_FUEL) -> CLStream:
    """sin x = cos(x - pi/2)."""

    def gen():
        if x[0] is not None and _is_zero(x):
            yield RECIP
            return
        yield from cos_cl(sub(x, half_pi_cl(), fuel), fuel)

    return CLStream(gen(), name="sin")


def tan_cl(x: CLStream, fuel: int = DEFAULT_FUEL) -> CLStream:
    """tan x = sin x / cos x."""
    return div(sin_cl(x, fuel), cos_cl(x, fuel), fuel)
