"""``clog``: evaluate, list terms, convert and compare continued-logarithm values.

Exit codes: 0 success, 2 parse or representation error, 3 stall, 4 domain error.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import List, Optional

from .core import (
    CLStream, Comparison, DegenerateError, DomainError, RepresentationError, Stall,
    compare, decode_rational, digits_to_compact, encode_rational, format_binary,
    format_compact, parse_binary, parse_compact, rational_digits, to_decimal,
)
from .engine import DEFAULT_FUEL
from .interval import POS_INF, RatInterval, is_finite
from .parser import ParseError, build, parse
from .transcendental import floor_log2

EXIT_OK, EXIT_PARSE, EXIT_STALL, EXIT_DOMAIN = 0, 2, 3, 4


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def default_fuel() -> int:
    env = os.environ.get("CLOG_FUEL")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise _Exit(EXIT_PARSE, f"CLOG_FUEL must be an integer, got {env!r}") from None
        if value < 1:
            raise _Exit(EXIT_PARSE, "CLOG_FUEL must be positive")
        return value
    return DEFAULT_FUEL


# -- formatting ------------------------------------------------------------------

def sci(v, up: bool, sig: int = 6) -> str:
    """Scientific notation with ``sig`` significant digits, rounded up or down."""
    if not is_finite(v):
        return "inf" if v > 0 else "-inf"
    v = Fraction(v)
    if v == 0:
        return "0"
    a = abs(v)
    exp10 = len(str(a.numerator)) - len(str(a.denominator))
    if a < Fraction(10) ** exp10:
        exp10 -= 1
    scaled = v / Fraction(10) ** (exp10 - sig + 1)
    n = -((-scaled.numerator) // scaled.denominator) if up else scaled.numerator // scaled.denominator
    if abs(n) >= 10 ** sig:  # rounding carried into a new digit
        n = -((-n) // 10) if up else n // 10
        exp10 += 1
    sign = "-" if n < 0 else ""
    digits = str(abs(n))
    return f"{sign}{digits[0]}.{digits[1:]}e{exp10:+d}"


def format_interval(iv: RatInterval) -> str:
    return f"[{sci(iv.lo, up=False)}, {sci(iv.hi, up=True)}]"


def width_note(iv: RatInterval) -> str:
    w = iv.width
    if w == 0:
        return "width 0"
    if not is_finite(w):
        return "unbounded"
    return f"width < 2^-{-(floor_log2(w) + 1)}"


def stall_message(exc: Stall) -> str:
    return (f"stall: no further digit after consuming {exc.consumed} input digits; "
            f"value in {format_interval(exc.interval)} ({width_note(exc.interval)})")


def decimal_report(text: str, iv: RatInterval, digits: int) -> str:
    if iv.is_point:
        return f"{text} (exact)"
    w = iv.width
    if not is_finite(w):
        return f"{text} (unbounded)"
    if w < Fraction(1, 10 ** digits):
        return f"{text} (±<1e-{digits})"
    k = -digits
    while not w < Fraction(10) ** k:
        k += 1
    return f"{text} (±<1e{k})"


# -- value input -----------------------------------------------------------------

def _expression(src: str, fuel: int) -> CLStream:
    try:
        return build(parse(src), fuel)
    except ParseError as exc:
        raise _Exit(EXIT_PARSE, f"parse error: {exc}") from None


def read_value(text: str):
    """CL or rational text -> exact value (Fraction or POS_INF)."""
    t = text.strip()
    if t.startswith("["):
        return decode_rational(parse_compact(t)) if parse_compact(t) else POS_INF
    if any(ch in t for ch in "$rn"):
        digits = parse_binary(t)
        return decode_rational(list(digits_to_compact(digits))) if digits else POS_INF
    if t.lower() in ("inf", "infinity", "∞"):
        return POS_INF
    try:
        return Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise RepresentationError(f"not a CL string or rational: {text!r}") from None


def format_value(v, to: str) -> str:
    if to == "rational":
        return "inf" if v is POS_INF else str(v)
    if v is POS_INF:
        return "[]" if to == "compact" else ""
    if to == "compact":
        return format_compact(encode_rational(v.numerator, v.denominator))
    return format_binary(rational_digits(v))


# -- commands --------------------------------------------------------------------

def cmd_eval(args) -> int:
    s = _expression(args.expr, args.fuel)
    text, iv = to_decimal(s, args.digits, fuel=max(args.fuel, 64) * 4)
    print(decimal_report(text, iv, args.digits))
    return EXIT_OK


def cmd_terms(args) -> int:
    s = _expression(args.expr, args.fuel)
    out: List = []
    try:
        if args.form == "compact":
            for term in digits_to_compact(iter(s)):
                out.append(term)
                if len(out) >= args.count:
                    break
        else:
            for d in s:
                out.append(d)
                if len(out) >= args.count:
                    break
    except Stall as exc:
        if out:
            print(format_compact(out) if args.form == "compact" else format_binary(out))
        raise _Exit(EXIT_STALL, stall_message(exc)) from None
    print(format_compact(out) if args.form == "compact" else format_binary(out))
    return EXIT_OK


def cmd_convert(args) -> int:
    print(format_value(read_value(args.value), args.to))
    return EXIT_OK


def cmd_compare(args) -> int:
    a = _expression(args.a, args.fuel)
    b = _expression(args.b, args.fuel)
    if a is b:
        print(Comparison.EQUAL.value)
        return EXIT_OK
    res = compare(a, b, fuel=args.fuel)
    if res.outcome is Comparison.STALL:
        raise _Exit(EXIT_STALL, "stall: cannot separate the values; "
                                f"first in {format_interval(res.a)}, second in {format_interval(res.b)}")
    print(res.outcome.value)
    return EXIT_OK


def build_parser(fuel: int) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clog", description="Exact real arithmetic on continued logarithms.")
    sub = p.add_subparsers(dest="command", required=True)

    def fuel_flag(sp):
        sp.add_argument("--fuel", type=int, default=fuel,
                        help=f"input digits a stream may consume without output (default {fuel})")

    e = sub.add_parser("eval", help="certified decimal value of an expression")
    e.add_argument("expr")
    e.add_argument("--digits", type=int, default=12)
    fuel_flag(e)
    e.set_defaults(func=cmd_eval)

    t = sub.add_parser("terms", help="leading CL terms of an expression")
    t.add_argument("expr")
    t.add_argument("--count", type=int, default=15)
    t.add_argument("--form", choices=("compact", "binary"), default="compact")
    fuel_flag(t)
    t.set_defaults(func=cmd_terms)

    c = sub.add_parser("convert", help="convert between rational, compact and binary forms")
    c.add_argument("value")
    c.add_argument("--to", choices=("rational", "compact", "binary"), default="rational")
    c.set_defaults(func=cmd_convert)

    k = sub.add_parser("compare", help="compare two expressions")
    k.add_argument("a")
    k.add_argument("b")
    fuel_flag(k)
    k.set_defaults(func=cmd_compare)
    return p


def _shield_negatives(argv: List[str]) -> List[str]:
    # argparse reads "-pi" or "-4/33" as an option; a leading space keeps them
    # positional and every value reader ignores surrounding whitespace.
    return [" " + a if a[:1] == "-" and a[1:2] not in ("-", "h", "") else a for a in argv]


def main(argv: Optional[List[str]] = None) -> int:
    try:
        parser = build_parser(default_fuel())
        args = parser.parse_args(_shield_negatives(sys.argv[1:] if argv is None else list(argv)))
        if getattr(args, "fuel", 1) < 1 or getattr(args, "digits", 0) < 0 or getattr(args, "count", 1) < 0:
            raise _Exit(EXIT_PARSE, "fuel must be positive; digits and count non-negative")
        return args.func(args)
    except _Exit as exc:
        print(exc, file=sys.stderr)
        return exc.code
    except RepresentationError as exc:
        print(f"representation error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DomainError, DegenerateError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except Stall as exc:
        print(stall_message(exc), file=sys.stderr)
        return EXIT_STALL


if __name__ == "__main__":
    sys.exit(main())
