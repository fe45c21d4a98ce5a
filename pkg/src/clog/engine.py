"""Gosper-style arithmetic on continued-logarithm streams.

The state of a binary operation is a bihomographic form

    M(x, y) = (a*x*y + b*x + c*y + d) / (e*x*y + f*x + g*y + h)

in the still-unread tails ``x, y`` of the two inputs.  Output digits are
emitted ("produced") whenever exact bounds of M over the residual domain
``[1, inf]^2`` determine them; otherwise an input digit is consumed, which
substitutes ``x <- 2x`` (One), ``x <- 1 + 1/x`` (Zero) and so on.

Bounds: with ``x = 1/t, y = 1/s`` the numerator and denominator become
bilinear in ``(t, s)`` over ``(0, 1]^2``.  When the denominator has one sign
there, M is monotone in each variable separately, so its infimum and
supremum are among the (iterated) limits at the four corners.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .core import (
    END, NEG, ONE, RECIP, ZERO, CLStream, DegenerateError, Digit, Stall, rational_digits,
)
from .interval import NEG_INF, POS_INF, RatInterval, ext_ratio, is_finite

__all__ = [
    "Bihom", "Hom", "ConsumePolicy", "ALTERNATE", "DEFAULT_FUEL", "Indeterminate",
    "corner_values", "value_range", "decide_digit", "produce", "consume_x", "consume_y",
    "consume_x_end", "consume_y_end", "run_bihom", "run_hom", "add", "sub", "mul", "div",
    "neg", "recip", "scale", "Machine", "ADD", "SUB", "MUL", "DIV",
]

DEFAULT_FUEL = 4096

# Output/input head states.
HEAD, AFTER_NEG, BODY = 0, 1, 2


class _Indeterminate:
    def __repr__(self):
        return "Indeterminate"


Indeterminate = _Indeterminate()


def _canon(m: Tuple[int, ...]) -> Tuple[int, ...]:
    g = math.gcd(*m)
    if g > 1:
        return tuple(v // g for v in m)
    return m


# -- matrix types -----------------------------------------------------------

@dataclass(frozen=True)
class Bihom:
    a: int
    b: int
    c: int
    d: int
    e: int
    f: int
    g: int
    h: int

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "Bihom":
        (a, b, c, d), (e, f, g, h) = rows
        return cls(a, b, c, d, e, f, g, h)

    @property
    def coeffs(self) -> Tuple[int, ...]:
        return (self.a, self.b, self.c, self.d, self.e, self.f, self.g, self.h)

    def rows(self):
        return [[self.a, self.b, self.c, self.d], [self.e, self.f, self.g, self.h]]

    def canonical(self) -> "Bihom":
        return Bihom(*_canon(self.coeffs))

    def __call__(self, x, y):
        a, b, c, d, e, f, g, h = self.coeffs
        num = a * x * y + b * x + c * y + d
        den = e * x * y + f * x + g * y + h
        return Fraction(num) / den


@dataclass(frozen=True)
class Hom:
    a: int
    b: int
    c: int
    d: int

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "Hom":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @property
    def coeffs(self) -> Tuple[int, ...]:
        return (self.a, self.b, self.c, self.d)

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def canonical(self) -> "Hom":
        return Hom(*_canon(self.coeffs))

    def __call__(self, x):
        return Fraction(self.a * x + self.b) / (self.c * x + self.d)


# -- raw transforms on coefficient tuples -------------------------------------

def _bh_produce(m, d):
    a, b, c, dd, e, f, g, h = m
    if d is ZERO:
        return (e, f, g, h, a - e, b - f, c - g, dd - h)
    if d is ONE:
        return (a, b, c, dd, 2 * e, 2 * f, 2 * g, 2 * h)
    if d is RECIP:
        return (e, f, g, h, a, b, c, dd)
    if d is NEG:
        return (-a, -b, -c, -dd, e, f, g, h)
    raise ValueError(f"cannot produce {d!r}")


def _bh_consume_x(m, d):
    a, b, c, dd, e, f, g, h = m
    if d is ONE:
        return (2 * a, 2 * b, c, dd, 2 * e, 2 * f, g, h)
    if d is ZERO:
        return (a + c, b + dd, a, b, e + g, f + h, e, f)
    if d is RECIP:
        return (c, dd, a, b, g, h, e, f)
    if d is NEG:
        return (-a, -b, c, dd, -e, -f, g, h)
    raise ValueError(f"cannot consume {d!r}")


def _bh_consume_y(m, d):
    a, b, c, dd, e, f, g, h = m
    if d is ONE:
        return (2 * a, b, 2 * c, dd, 2 * e, f, 2 * g, h)
    if d is ZERO:
        return (a + b, a, c + dd, c, e + f, e, g + h, g)
    if d is RECIP:
        return (b, a, dd, c, f, e, h, g)
    if d is NEG:
        return (-a, b, -c, dd, -e, f, -g, h)
    raise ValueError(f"cannot consume {d!r}")


def _bh_end_x(m):
    """x = 1: a Hom in y."""
    a, b, c, d, e, f, g, h = m
    return (a + c, b + d, e + g, f + h)


def _bh_end_y(m):
    a, b, c, d, e, f, g, h = m
    return (a + b, c + d, e + f, g + h)


def _bh_inf_x(m):
    """x -> inf: a Hom in y."""
    a, b, c, d, e, f, g, h = m
    if a or b or e or f:
        return (a, b, e, f)
    return (c, d, g, h)


def _bh_inf_y(m):
    a, b, c, d, e, f, g, h = m
    if a or c or e or g:
        return (a, c, e, g)
    return (b, d, f, h)


def _h_produce(m, d):
    a, b, c, dd = m
    if d is ZERO:
        return (c, dd, a - c, b - dd)
    if d is ONE:
        return (a, b, 2 * c, 2 * dd)
    if d is RECIP:
        return (c, dd, a, b)
    if d is NEG:
        return (-a, -b, c, dd)
    raise ValueError(f"cannot produce {d!r}")


def _h_consume(m, d):
    a, b, c, dd = m
    if d is ONE:
        return (2 * a, b, 2 * c, dd)
    if d is ZERO:
        return (a + b, a, c + dd, c)
    if d is RECIP:
        return (b, a, dd, c)
    if d is NEG:
        return (-a, b, -c, dd)
    raise ValueError(f"cannot consume {d!r}")


# -- bounds -------------------------------------------------------------------
# A candidate is (num, den, attained) with den >= 0; den == 0 encodes a
# signed infinity (sign of num).  Only the (x, y) = (1, 1) corner is attained;
# the others are limits as an input tends to infinity.

def _norm(n, d):
    if d < 0:
        return (-n, -d)
    if d == 0:
        return (1 if n > 0 else -1, 0)
    return (n, d)


def _lim(n0, n1, d0, d1):
    """lim_{u->0+} (n0 + n1 u) / (d0 + d1 u), or None if undefined."""
    if d0:
        return _norm(n0, d0)
    if d1 == 0:
        return None
    if n0:
        return (1 if (n0 > 0) == (d1 > 0) else -1, 0)
    return _norm(n1, d1)


def _sgn(v):
    return (v > 0) - (v < 0)


def _bihom_candidates(m):
    a, b, c, d, e, f, g, h = m
    q11 = e + f + g + h
    if q11 == 0:
        return None
    sigma = 1 if q11 > 0 else -1
    if (e * sigma < 0) or ((e + f) * sigma < 0) or ((e + g) * sigma < 0):
        return None
    n, dd = _norm(a + b + c + d, q11)
    out = [(n, dd, True)]
    lims = [_lim(a + c, b + d, e + g, f + h), _lim(a + b, c + d, e + f, g + h)]
    # x -> inf first, then y -> inf or y -> 1.
    if e or f:
        lims.append(_lim(a, b, e, f))
        lims.append(_lim(a + b, -b, e + f, -f))
    elif a or b:
        near0 = a if a else b
        near1 = (a + b) if (a + b) else -b
        out.append((_sgn(near0) * sigma, 0, False))
        out.append((_sgn(near1) * sigma, 0, False))
    else:
        lims.append(_lim(c, d, g, h))
        lims.append(_lim(c + d, -d, g + h, -h))
    # y -> inf first.
    if e or g:
        lims.append(_lim(a, c, e, g))
        lims.append(_lim(a + c, -c, e + g, -g))
    elif a or c:
        near0 = a if a else c
        near1 = (a + c) if (a + c) else -c
        out.append((_sgn(near0) * sigma, 0, False))
        out.append((_sgn(near1) * sigma, 0, False))
    else:
        lims.append(_lim(b, d, f, h))
        lims.append(_lim(b + d, -d, f + h, -h))
    for lim in lims:
        if lim is None:
            return None
        out.append((lim[0], lim[1], False))
    return out


def _hom_candidates(m):
    a, b, c, d = m
    q1 = c + d
    if q1 == 0 or c * q1 < 0:
        return None
    lim = _lim(a, b, c, d)
    if lim is None:
        return None
    n, dd = _norm(a + b, q1)
    return [(n, dd, True), (lim[0], lim[1], False)]


def _cmp(cand, k):
    n, d, _ = cand
    if d == 0:
        return n
    return _sgn(n - k * d)


def _above(cand, k):
    s = _cmp(cand, k)
    return s > 0 or (s == 0 and not cand[2])


def _below(cand, k):
    s = _cmp(cand, k)
    return s < 0 or (s == 0 and not cand[2])


def _decide(cands, state):
    if state == HEAD and all(_below(c, 0) for c in cands):
        return NEG
    if state != BODY and all(_above(c, 0) and _below(c, 1) for c in cands):
        return RECIP
    if all(_cmp(c, 2) >= 0 for c in cands):
        return ONE
    if all(_above(c, 1) and _below(c, 2) for c in cands):
        return ZERO
    return None


def _cands_interval(cands) -> RatInterval:
    vals = []
    for n, d, att in cands:
        v = ext_ratio(n, d)
        vals.append((v, att))
    lo = min(v for v, _ in vals)
    hi = max(v for v, _ in vals)
    lo_open = not any(att and v == lo for v, att in vals)
    hi_open = not any(att and v == hi for v, att in vals)
    return RatInterval(lo, hi, lo_open, hi_open)


def _bihom_constant(m):
    """Value if M does not depend on x or y (rows proportional), else None."""
    num, den = m[:4], m[4:]
    for i in range(4):
        for j in range(i + 1, 4):
            if num[i] * den[j] != num[j] * den[i]:
                return None
    return _row_ratio(num, den)


def _hom_constant(m):
    a, b, c, d = m
    if a * d != b * c:
        return None
    return _row_ratio((a, b), (c, d))


def _row_ratio(num, den):
    for n, d in zip(num, den):
        if d:
            return Fraction(n, d)
    if any(num):
        return POS_INF
    raise DegenerateError("transform is 0/0 everywhere")


# -- public matrix operations -------------------------------------------------

def corner_values(m: Bihom):
    """M at (1,1), (1,inf), (inf,1), (inf,inf) with limit semantics."""
    a, b, c, d, e, f, g, h = m.coeffs

    def val(*pairs):
        for n, dd in pairs:
            if n or dd:
                return ext_ratio(n, dd)
        raise DegenerateError("0/0 at a corner after all fallbacks")

    return (
        val((a + b + c + d, e + f + g + h)),
        val((a + c, e + g), (b + d, f + h)),
        val((a + b, e + f), (c + d, g + h)),
        val((a, e), (b + c, f + g), (d, h)),
    )


def value_range(m):
    """Exact range of a Bihom or Hom over the residual domain, or Indeterminate.

    Endpoints approached only as an input tends to infinity are flagged open.
    """
    coeffs = m.coeffs
    if not any(coeffs[len(coeffs) // 2:]):
        if not any(coeffs):
            raise DegenerateError("all coefficients are zero")
        return RatInterval.point(POS_INF)
    cands = _bihom_candidates(coeffs) if len(coeffs) == 8 else _hom_candidates(coeffs)
    if cands is None:
        return Indeterminate
    return _cands_interval(cands)


def decide_digit(r, x_live: bool = True, y_live: bool = True, state: int = HEAD) -> Optional[Digit]:
    """The digit determined by a value range, or None.

    ``state`` restricts the alphabet: Neg only at HEAD, Recip only before BODY.
    End is decided only for the exact point 1 with both inputs exhausted.
    """
    if r is Indeterminate:
        return None
    if r.is_point and r.lo == 1 and not x_live and not y_live:
        return END
    cands = []
    for v, att in ((r.lo, not r.lo_open), (r.hi, not r.hi_open)):
        if is_finite(v):
            cands.append((v.numerator, v.denominator, att))
        else:
            cands.append((v.sign, 0, False))
    return _decide(cands, state)


def produce(m, d: Digit):
    if isinstance(m, Bihom):
        return Bihom(*_canon(_bh_produce(m.coeffs, d)))
    return Hom(*_canon(_h_produce(m.coeffs, d)))


def consume_x(m, d: Digit):
    if isinstance(m, Bihom):
        return Bihom(*_canon(_bh_consume_x(m.coeffs, d)))
    return Hom(*_canon(_h_consume(m.coeffs, d)))


def consume_y(m: Bihom, d: Digit) -> Bihom:
    return Bihom(*_canon(_bh_consume_y(m.coeffs, d)))


def consume_x_end(m: Bihom) -> Hom:
    return Hom(*_canon(_bh_end_x(m.coeffs)))


def consume_y_end(m: Bihom) -> Hom:
    return Hom(*_canon(_bh_end_y(m.coeffs)))


# -- consumption policy -------------------------------------------------------

@dataclass(frozen=True)
class ConsumePolicy:
    """Chooses which live input to read when no digit can be emitted."""

    name: str
    choose: Callable[[List[int], int], int]


ALTERNATE = ConsumePolicy("alternate", lambda live, turn: live[turn % len(live)])
PREFER_X = ConsumePolicy("prefer-x", lambda live, turn: live[0])


# -- the state machine --------------------------------------------------------

_GONE = 3


class Machine:
    """Incremental emit/consume state for one (bi)homographic evaluation.

    ``action()`` returns a Digit to emit, an input index (0 = x, 1 = y) whose
    next digit must be passed to ``feed``, or None once the output has ended.
    """

    __slots__ = ("m", "arity", "inputs", "out", "pending", "finished", "turn",
                 "since_emit", "policy", "prefix", "_map")

    def __init__(self, coeffs, arity: int = 2, policy: ConsumePolicy = ALTERNATE,
                 track_prefix: bool = True, out_state: int = HEAD):
        self.m = _canon(tuple(coeffs))
        self.arity = arity
        # Input slots map to original input indices; HEAD until a body digit is read.
        self.inputs = [HEAD] * arity if arity == 2 else [HEAD, _GONE]
        self._map = None
        self.out = out_state
        self.pending: deque = deque()
        self.finished = False
        self.turn = 0
        self.since_emit = 0
        self.policy = policy
        self.prefix = (1, 0, 0, 1) if track_prefix else None

    # Which coefficient layout is active: 8 (both live), 4 (one live), 0 (constant).
    def _live(self):
        return [i for i in (0, 1) if self.inputs[i] != _GONE]

    def _emit(self, d):
        self.since_emit = 0
        if self.prefix is not None:
            a, b, c, e = self.prefix
            if d is ONE:
                self.prefix = (2 * a, b, 2 * c, e)
            elif d is ZERO:
                self.prefix = (a + b, a, c + e, c)
            elif d is RECIP:
                self.prefix = (b, a, e, c)
            elif d is NEG:
                self.prefix = (-a, b, -c, e)
        if d is NEG:
            self.out = AFTER_NEG
        elif d is END:
            self.finished = True
        else:
            self.out = BODY
        return d

    def force(self, d: Digit) -> None:
        """Produce a digit known a priori to be correct."""
        if d is END:
            self.m = None
            self._emit(d)
            return
        self.m = _canon(_bh_produce(self.m, d) if len(self.m) == 8 else _h_produce(self.m, d))
        self._emit(d)

    def _start_constant(self, value):
        self.m = None
        if value is POS_INF:
            self.finished = True
            return
        self.pending.extend(rational_digits(value))

    def action(self):
        if self.pending:
            d = self.pending.popleft()
            self._emit(d)
            if not self.pending and d is not END:
                self.finished = True
            return d
        if self.finished:
            return None
        inputs = self.inputs
        if inputs[0] == HEAD or inputs[0] == AFTER_NEG:
            return 0
        if inputs[1] == HEAD or inputs[1] == AFTER_NEG:
            return 1
        m = self.m
        if len(m) == 8:
            cands = _bihom_candidates(m)
        else:
            if not (m[2] or m[3]):
                if not (m[0] or m[1]):
                    raise DegenerateError("transform is 0/0 everywhere")
                self._start_constant(POS_INF)
                return self.action()
            cands = _hom_candidates(m)
        if cands is not None:
            d = _decide(cands, self.out)
            if d is not None:
                self.m = _canon(_bh_produce(m, d) if len(m) == 8 else _h_produce(m, d))
                return self._emit(d)
        const = _bihom_constant(m) if len(m) == 8 else _hom_constant(m)
        if const is not None:
            self._start_constant(const)
            return self.action()
        live = self._live()
        if not live:
            raise AssertionError("no live input but transform is not constant")
        i = self.policy.choose(live, self.turn)
        self.turn += 1
        return i

    def feed(self, i: int, d: Optional[Digit]) -> None:
        """Consume digit ``d`` (None = exhausted) of input ``i``."""
        self.since_emit += 1
        m = self.m
        state = self.inputs[i]
        both = len(m) == 8
        if d is None or d is END:
            self.inputs[i] = _GONE
            if both:
                if d is END:
                    m = _bh_end_x(m) if i == 0 else _bh_end_y(m)
                else:
                    m = _bh_inf_x(m) if i == 0 else _bh_inf_y(m)
            else:
                a, b, c, e = m
                if d is END:
                    m = (0, a + b, 0, c + e)
                elif a or c:
                    m = (0, a, 0, c)
                else:
                    m = (0, b, 0, e)
                # (0, n, 0, d) denotes the constant n/d (or inf when d == 0).
                if m[3] == 0 and m[1] == 0:
                    raise DegenerateError("transform is 0/0 everywhere")
            self.m = _canon(m)
            return
        if d is NEG:
            if state != HEAD:
                raise DegenerateError("Neg digit inside an input stream")
            self.inputs[i] = AFTER_NEG
        elif d is RECIP:
            if state == BODY:
                raise DegenerateError("Recip digit inside an input stream")
            self.inputs[i] = HEAD  # still need one more digit to leave the head
        else:
            self.inputs[i] = BODY
        if both:
            m = _bh_consume_x(m, d) if i == 0 else _bh_consume_y(m, d)
        else:
            m = _h_consume(m, d)
        self.m = _canon(m)

    def tail_interval(self) -> RatInterval:
        """Bounds on the still-unemitted part of the output."""
        if self.m is None:
            return RatInterval.everything()
        m = self.m
        if any(s in (HEAD, AFTER_NEG) for s in self.inputs):
            return RatInterval.everything()
        if len(m) == 4 and not (m[2] or m[3]):
            return RatInterval.point(POS_INF)
        cands = _bihom_candidates(m) if len(m) == 8 else _hom_candidates(m)
        if cands is None:
            return RatInterval.everything()
        return _cands_interval(cands)

    def value_interval(self) -> RatInterval:
        """Bounds on the whole output value, mapped through the emitted prefix."""
        tail = self.tail_interval()
        dom = {HEAD: RatInterval.everything(),
               AFTER_NEG: RatInterval(Fraction(0), POS_INF),
               BODY: RatInterval(Fraction(1), POS_INF)}[self.out]
        try:
            tail = tail.intersect(dom)
        except ValueError:
            tail = dom
        if self.prefix is None or self.prefix == (1, 0, 0, 1):
            return RatInterval(tail.lo, tail.hi)
        from .core import _hom_at
        u, v = _hom_at(self.prefix, tail.lo), _hom_at(self.prefix, tail.hi)
        return RatInterval(min(u, v), max(u, v))


# -- stream drivers -----------------------------------------------------------

def _drive(machine: Machine, inputs: Sequence[CLStream], fuel: int):
    pos = [0, 0]
    while True:
        act = machine.action()
        if act is None:
            return
        if isinstance(act, Digit):
            yield act
            continue
        if machine.since_emit >= fuel:
            raise Stall(machine.value_interval(), machine.since_emit)
        try:
            d = inputs[act][pos[act]]
        except Stall as exc:
            raise Stall(machine.value_interval(), machine.since_emit) from exc
        pos[act] += 1
        machine.feed(act, d)


def run_bihom(m, x: CLStream, y: CLStream, policy: ConsumePolicy = ALTERNATE,
              fuel: int = DEFAULT_FUEL) -> CLStream:
    """Stream the digits of M(x, y)."""
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    coeffs = m.coeffs if isinstance(m, Bihom) else tuple(m)
    machine = Machine(coeffs, 2, policy)
    return CLStream(_drive(machine, (x, y), fuel))


def run_hom(m, x: CLStream, fuel: int = DEFAULT_FUEL) -> CLStream:
    """Stream the digits of (a x + b) / (c x + d)."""
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    coeffs = m.coeffs if isinstance(m, Hom) else tuple(m)
    machine = Machine(coeffs, 1)
    return CLStream(_drive(machine, (x,), fuel))


ADD = Bihom(0, 1, 1, 0, 0, 0, 0, 1)
SUB = Bihom(0, 1, -1, 0, 0, 0, 0, 1)
MUL = Bihom(1, 0, 0, 0, 0, 0, 0, 1)
DIV = Bihom(0, 1, 0, 0, 0, 0, 1, 0)


def add(x, y, fuel=DEFAULT_FUEL):
    return run_bihom(ADD, x, y, fuel=fuel)


def sub(x, y, fuel=DEFAULT_FUEL):
    return run_bihom(SUB, x, y, fuel=fuel)


def mul(x, y, fuel=DEFAULT_FUEL):
    return run_bihom(MUL, x, y, fuel=fuel)


def div(x, y, fuel=DEFAULT_FUEL):
    return run_bihom(DIV, x, y, fuel=fuel)


def neg(x, fuel=DEFAULT_FUEL):
    return run_hom(Hom(-1, 0, 0, 1), x, fuel)


def recip(x, fuel=DEFAULT_FUEL):
    return run_hom(Hom(0, 1, 1, 0), x, fuel)


def scale(x, p: int, q: int = 1, fuel=DEFAULT_FUEL):
    """(p/q) * x."""
    return run_hom(Hom(p, 0, 0, q), x, fuel)
