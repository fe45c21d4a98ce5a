"""Continued-logarithm digits, memoized digit streams and conversions.

A real number is a (possibly infinite) stream over the binary digit alphabet::

    1  One    value >= 2, continue with value/2
    0  Zero   1 < value < 2, continue with 1/(value - 1)
    r  Recip  0 < value < 1, continue with 1/value   (leading position only)
    n  Neg    value < 0, continue with -value         (leading position only)
    $  End    value == 1

The empty stream denotes +infinity, so zero is spelled ``r`` (the reciprocal
of infinity).  The compact form ``[a0, a1, ...]`` run-length encodes the
Ones before each Zero/End, with -2 and -1 standing for leading Neg/Recip.
"""
from __future__ import annotations

import enum
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence

from .interval import NEG_INF, POS_INF, ExtRational, RatInterval, ext_ratio, is_finite

__all__ = [
    "Digit", "CLError", "RepresentationError", "DomainError", "DegenerateError", "Stall",
    "CLStream", "encode_rational", "decode_rational", "rational_digits",
    "compact_to_digits", "digits_to_compact", "format_compact", "parse_compact",
    "format_binary", "parse_binary", "prefix_bound", "PrefixBounds", "to_decimal",
    "render_decimal", "compare", "Comparison", "validate", "ZERO_STREAM", "ONE_STREAM",
    "INF_STREAM", "PHI",
]


class Digit(str, enum.Enum):
    ONE = "1"
    ZERO = "0"
    RECIP = "r"
    NEG = "n"
    END = "$"

    def __repr__(self) -> str:
        return f"Digit.{self.name}"


ONE, ZERO, RECIP, NEG, END = Digit.ONE, Digit.ZERO, Digit.RECIP, Digit.NEG, Digit.END


class CLError(Exception):
    """Base class for kernel errors."""


class RepresentationError(CLError, ValueError):
    """Malformed compact or digit representation."""


class DomainError(CLError, ValueError):
    """Argument certified to lie outside a function's domain."""


class DegenerateError(CLError, ArithmeticError):
    """A transform denotes 0/0 everywhere."""


class Stall(CLError):
    """No output digit could be determined within the fuel budget.

    ``interval`` bounds the value of the whole stream that stalled;
    ``consumed`` is the number of input digits read for the failed pull.
    """

    def __init__(self, interval: RatInterval, consumed: int = 0, message: str = ""):
        self.interval = interval
        self.consumed = consumed
        super().__init__(message or f"stalled after {consumed} input digits; value in {interval}")


# ---------------------------------------------------------------------------
# Grammar automaton.  States: "start", "neg" (after leading Neg), "recip"
# (right after Recip), "body" (after One), "zero" (right after Zero), "end".

def _next_state(state: str, d: Digit) -> str:
    if state == "end":
        raise RepresentationError("digit after End")
    if d is NEG:
        if state != "start":
            raise RepresentationError("Neg is only allowed at position 0")
        return "neg"
    if d is RECIP:
        if state not in ("start", "neg"):
            raise RepresentationError("Recip is only allowed at the head of a stream")
        return "recip"
    if d is END:
        if state in ("zero", "recip"):
            raise RepresentationError(f"End cannot follow {'Zero' if state == 'zero' else 'Recip'}")
        return "end"
    if d is ONE:
        return "body"
    if d is ZERO:
        return "zero"
    raise RepresentationError(f"not a digit: {d!r}")


def _check_exhaustion(state: str) -> None:
    if state == "zero":
        raise RepresentationError("stream ends right after Zero")


# ---------------------------------------------------------------------------

class CLStream:
    """Lazy, memoized, immutable stream of :class:`Digit`.

    ``s[i]`` returns the i-th digit or ``None`` once the stream is exhausted.
    Every digit is computed once; an exception raised while computing a digit
    is recorded and re-raised for every later read at or past that position.
    """

    __slots__ = ("_cache", "_source", "_lock", "_error", "_done", "name", "__weakref__")

    def __init__(self, source: Iterable[Digit], name: Optional[str] = None):
        self._cache: List[Digit] = []
        self._source: Optional[Iterator[Digit]] = iter(source)
        self._lock = threading.RLock()
        self._error: Optional[BaseException] = None
        self._done = False
        self.name = name

    def __getitem__(self, i: int) -> Optional[Digit]:
        cache = self._cache
        if i < len(cache):
            return cache[i]
        with self._lock:
            while len(cache) <= i:
                if self._done:
                    return None
                if self._error is not None:
                    raise self._error
                try:
                    d = next(self._source)
                except StopIteration:
                    self._done = True
                    self._source = None
                    return None
                except Exception as exc:
                    self._error = exc
                    self._source = None
                    raise
                cache.append(d)
            return cache[i]

    def __iter__(self) -> Iterator[Digit]:
        i = 0
        while True:
            d = self[i]
            if d is None:
                return
            yield d
            i += 1

    def take(self, n: int) -> List[Digit]:
        out = []
        for i in range(n):
            d = self[i]
            if d is None:
                break
            out.append(d)
        return out

    def tail(self, k: int) -> "CLStream":
        """The stream of digits from position ``k`` on (shares this cache)."""
        def gen():
            i = k
            while True:
                d = self[i]
                if d is None:
                    return
                yield d
                i += 1
        return CLStream(gen())

    def known_length(self) -> Optional[int]:
        """Length if the stream is already known to be exhausted."""
        return len(self._cache) if self._done else None

    @classmethod
    def from_digits(cls, digits: Iterable[Digit], name: Optional[str] = None) -> "CLStream":
        return cls(list(digits), name=name)

    @classmethod
    def from_rational(cls, p, q=1) -> "CLStream":
        x = Fraction(p, q)
        return cls(rational_digits(x), name=str(x))

    @classmethod
    def from_compact(cls, terms: Iterable[int]) -> "CLStream":
        return compact_to_digits(terms)

    @classmethod
    def from_text(cls, text: str) -> "CLStream":
        return cls(parse_binary(text))

    def __repr__(self) -> str:
        shown = "".join(d.value for d in self._cache[:24])
        more = "" if self._done and len(self._cache) <= 24 else "..."
        label = f" {self.name}" if self.name else ""
        return f"<CLStream{label} {shown}{more}>"


def rational_digits(x) -> Iterator[Digit]:
    """Run the digit dynamical system on an exact rational (or +inf)."""
    if x is POS_INF:
        return
    x = Fraction(x)
    if x < 0:
        yield NEG
        x = -x
    if x == 0:
        yield RECIP
        return
    if x < 1:
        yield RECIP
        x = 1 / x
    p, q = x.numerator, x.denominator
    while True:
        if p >= 2 * q:
            yield ONE
            if p % 2 == 0:
                p //= 2
            else:
                q *= 2
        elif p > q:
            yield ZERO
            p, q = q, p - q
        else:
            yield END
            return


def digits_to_compact(digits: Iterable[Optional[Digit]]) -> Iterator[int]:
    """Lazily run-length encode a digit sequence into compact terms."""
    ones = 0
    for d in digits:
        if d is None:
            break
        if d is NEG:
            yield -2
        elif d is RECIP:
            yield -1
        elif d is ONE:
            ones += 1
        elif d is ZERO or d is END:
            yield ones
            ones = 0
            if d is END:
                return
        else:
            raise RepresentationError(f"not a digit: {d!r}")
    if ones:
        raise RepresentationError("run of Ones not closed by Zero or End")


def compact_to_digits(terms: Iterable[int]) -> CLStream:
    """Expand compact terms into a digit stream (lazy for infinite input)."""

    def gen():
        it = iter(terms)
        pos = 0
        pending = None
        for t in it:
            if pending is not None:
                yield from [ONE] * pending
                yield ZERO
                pending = None
            if t == -2:
                if pos != 0:
                    raise RepresentationError("-2 is only allowed as the first term")
                yield NEG
            elif t == -1:
                if pos > 1:
                    raise RepresentationError("-1 is only allowed at the head")
                yield RECIP
            elif t >= 0:
                pending = t
            else:
                raise RepresentationError(f"invalid compact term {t}")
            pos += 1
        if pending is not None:
            yield from [ONE] * pending
            yield END

    return CLStream(gen())


def encode_rational(p: int, q: int = 1) -> List[int]:
    """Finite compact representation of ``p/q``."""
    if q <= 0:
        raise ValueError("denominator must be positive")
    return list(digits_to_compact(rational_digits(Fraction(p, q))))


def decode_rational(terms: Sequence[int]) -> Fraction:
    """Exact value of a finite, well-formed compact representation."""
    terms = list(terms)
    validate_compact(terms)
    head = []
    i = 0
    while i < len(terms) and terms[i] < 0:
        head.append(terms[i])
        i += 1
    body = terms[i:]
    if not body:
        if head and head[-1] == -1:
            value = Fraction(0)
        else:
            raise RepresentationError("representation denotes infinity, not a rational")
    else:
        value = Fraction(2) ** body[-1]
        for k in reversed(body[:-1]):
            value = Fraction(2) ** k * (1 + 1 / value)
        if head and head[-1] == -1:
            value = 1 / value
    if head and head[0] == -2:
        value = -value
    return value


def validate_compact(terms: Sequence[int]) -> None:
    state = "start"
    for d in compact_to_digits(terms):
        state = _next_state(state, d)
    if state != "end":
        _check_exhaustion(state)


def format_compact(terms: Iterable[int]) -> str:
    return "[" + ",".join(str(t) for t in terms) + "]"


def parse_compact(text: str) -> List[int]:
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise RepresentationError(f"compact form must be bracketed: {text!r}")
    inner = s[1:-1].strip()
    if not inner:
        return []
    try:
        return [int(part) for part in inner.split(",")]
    except ValueError:
        raise RepresentationError(f"bad compact term in {text!r}") from None


def format_binary(digits: Iterable[Digit]) -> str:
    return "".join(d.value for d in digits)


def parse_binary(text: str) -> List[Digit]:
    try:
        digits = [Digit(ch) for ch in text.strip()]
    except ValueError:
        raise RepresentationError(f"bad digit string {text!r}") from None
    state = "start"
    for d in digits:
        state = _next_state(state, d)
    if state != "end":
        _check_exhaustion(state)
    return digits


def validate(stream: CLStream) -> CLStream:
    """Wrap ``stream`` so that grammar violations raise RepresentationError."""

    def gen():
        state = "start"
        for d in stream:
            state = _next_state(state, d)
            yield d
        if state != "end":
            _check_exhaustion(state)

    return CLStream(gen())


# ---------------------------------------------------------------------------
# Prefix intervals.  The consumed prefix is the Moebius map r -> (a r + b)/(c r + d)
# from the residual tail value r back to the stream's value.

_DOMAINS = {
    "start": (NEG_INF, POS_INF),
    "neg": (Fraction(0), POS_INF),
    "recip": (Fraction(1), POS_INF),
    "body": (Fraction(1), POS_INF),
    "zero": (Fraction(1), POS_INF),
}


def _hom_at(m, r) -> ExtRational:
    a, b, c, d = m
    if r is POS_INF or r is NEG_INF:
        if a == 0 and c == 0:
            return ext_ratio(b, d)
        v = ext_ratio(a, c)
        return v if is_finite(v) or r is POS_INF else -v
    r = Fraction(r)
    return ext_ratio(a * r.numerator + b * r.denominator, c * r.numerator + d * r.denominator)


class PrefixBounds:
    """Incrementally tracks the interval implied by a consumed digit prefix."""

    __slots__ = ("m", "state", "count", "exact")

    def __init__(self):
        self.m = (1, 0, 0, 1)
        self.state = "start"
        self.count = 0
        self.exact: Optional[ExtRational] = None

    def push(self, d: Optional[Digit]) -> None:
        if self.exact is not None:
            return
        a, b, c, e = self.m
        if d is None:
            _check_exhaustion(self.state)
            self.exact = _hom_at(self.m, POS_INF)
            return
        self.state = _next_state(self.state, d)
        self.count += 1
        if d is ONE:
            self.m = (2 * a, b, 2 * c, e)
        elif d is ZERO:
            self.m = (a + b, a, c + e, c)
        elif d is RECIP:
            self.m = (b, a, e, c)
        elif d is NEG:
            self.m = (-a, b, -c, e)
        else:
            self.exact = _hom_at(self.m, 1)

    def interval(self) -> RatInterval:
        if self.exact is not None:
            return RatInterval.point(self.exact)
        lo, hi = _DOMAINS[self.state]
        u, v = _hom_at(self.m, lo), _hom_at(self.m, hi)
        return RatInterval(min(u, v), max(u, v))


def prefix_bound(s: CLStream, k: int) -> RatInterval:
    """Interval containing the value of ``s`` given its first ``k`` digits.

    If the digit after the prefix is End (or the stream is exhausted) the
    value is known exactly and a point interval is returned.
    """
    b = PrefixBounds()
    for i in range(k):
        d = s[i]
        b.push(d)
        if d is None or d is END:
            return b.interval()
    try:
        nxt = s[k]
    except Stall:
        return b.interval()
    if nxt is None or nxt is END:
        b.push(nxt)
    return b.interval()


# ---------------------------------------------------------------------------

def render_decimal(x: Fraction, digits: int) -> str:
    """``x`` truncated toward zero to ``digits`` places."""
    scaled = abs(x.numerator) * 10 ** digits // x.denominator
    sign = "-" if x < 0 and scaled else ""
    whole, frac = divmod(scaled, 10 ** digits)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"


def to_decimal(s: CLStream, digits: int, fuel: int = 10000):
    """Decimal rendering of ``s`` plus the exact interval it was drawn from.

    Pulls digits until the interval is narrower than 10**-digits (and, where
    possible, both ends truncate to the same text) or ``fuel`` pulls have been
    spent.  A stall inside ``s`` ends the loop with the
    interval carried by the stall.  Always terminates.
    """
    if digits < 0 or fuel < 1:
        raise ValueError("digits >= 0 and fuel >= 1 required")
    target = Fraction(1, 10 ** digits)
    # Past the target width, keep going a little until both ends agree.
    floor = target / 2 ** 20

    def settled(v):
        if v.is_point:
            return True
        if not v.width < target:
            return False
        return v.width < floor or render_decimal(v.lo, digits) == render_decimal(v.hi, digits)

    b = PrefixBounds()
    iv = b.interval()
    for i in range(fuel):
        if settled(iv):
            break
        try:
            d = s[i]
        except Stall as stall:
            try:
                iv = iv.intersect(stall.interval)
            except ValueError:
                iv = stall.interval
            break
        b.push(d)
        iv = b.interval()
    if iv.is_point:
        v = iv.lo
        text = render_decimal(v, digits) if is_finite(v) else "inf"
    elif is_finite(iv.lo) and is_finite(iv.hi):
        text = render_decimal(iv.midpoint, digits)
    else:
        text = "unbounded"
    return text, iv


# ---------------------------------------------------------------------------

class Comparison(enum.Enum):
    LESS = "<"
    EQUAL = "="
    GREATER = ">"
    STALL = "?"


@dataclass(frozen=True)
class CompareResult:
    outcome: Comparison
    a: RatInterval
    b: RatInterval


def compare(a: CLStream, b: CLStream, fuel: int = 4096) -> CompareResult:
    """Order two streams from their prefixes.

    Equal is reported only for finite, digit-identical streams; anything
    that cannot be separated within ``fuel`` digit pulls is a stall.
    """
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    streams = (a, b)
    bounds = [PrefixBounds(), PrefixBounds()]
    ivs = [RatInterval.everything(), RatInterval.everything()]
    pos = [0, 0]
    finished = [False, False]  # exhausted or End read
    stalled = [False, False]

    turn = 0
    for _ in range(fuel):
        live = [i for i in (0, 1) if not (finished[i] or stalled[i])]
        if not live:
            break
        i = live[turn % len(live)]
        turn += 1
        try:
            d = streams[i][pos[i]]
        except Stall as stall:
            stalled[i] = True
            ivs[i] = stall.interval
        else:
            bounds[i].push(d)
            ivs[i] = bounds[i].interval()
            if d is None or d is END:
                finished[i] = True
            else:
                pos[i] += 1
        ia, ib = ivs
        if ia.hi < ib.lo:
            return CompareResult(Comparison.LESS, ia, ib)
        if ia.lo > ib.hi:
            return CompareResult(Comparison.GREATER, ia, ib)
        if all(finished):
            if a.take(pos[0] + 1) == b.take(pos[1] + 1):
                return CompareResult(Comparison.EQUAL, ia, ib)
            break
    return CompareResult(Comparison.STALL, *ivs)


# ---------------------------------------------------------------------------

def _phi_digits():
    while True:
        yield ZERO


ZERO_STREAM = CLStream([RECIP], name="0")
ONE_STREAM = CLStream([END], name="1")
INF_STREAM = CLStream([], name="inf")
PHI = CLStream(_phi_digits(), name="phi")
