"""Expression language for the command line: rationals, + - * /, functions, constants."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union

from . import engine, transcendental
from .core import PHI, CLStream, INF_STREAM
from .interval import POS_INF

__all__ = ["Num", "Const", "Neg", "BinOp", "Call", "Expr", "ParseError", "parse", "build",
           "FUNCTIONS", "CONSTANTS"]


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class Num:
    value: Fraction  # or POS_INF for a literal p/0


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Const, Neg, BinOp, Call]

FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "asin")
CONSTANTS = ("pi", "e", "phi")

_TOKEN = re.compile(r"""
    (?P<space>\s+)
  | (?P<num>\d+/\d+|\d+\.\d*|\.\d+|\d+)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>[-+*/()])
""", re.VERBOSE)


def _tokenize(src: str) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "space":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(src)))
    return out


def _literal(text: str, pos: int):
    # Fraction parses "p/q" and decimal text exactly; p/0 is infinity.
    if "/" in text:
        p, q = (int(t) for t in text.split("/"))
        if q == 0:
            if p == 0:
                raise ParseError("0/0 is undefined", pos)
            return POS_INF
    return Fraction(text)


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, value, pos = self.take()
        if value != text:
            raise ParseError(f"expected {text!r}", pos)

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.atom()

    def atom(self) -> Expr:
        kind, value, pos = self.take()
        if kind == "num":
            return Num(_literal(value, pos))
        if kind == "name":
            name = value.lower()
            if name in CONSTANTS:
                return Const(name)
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            raise ParseError(f"unknown name {value!r}", pos)
        if value == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "eof":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected {value!r}", pos)


def parse(src: str) -> Expr:
    """Parse an expression; raises ParseError carrying the character offset."""
    p = _Parser(src)
    node = p.expr()
    kind, value, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected {value!r}", pos)
    return node


_BUILDERS = {
    "exp": transcendental.exp_cl,
    "log": transcendental.log_cl,
    "sin": transcendental.sin_cl,
    "cos": transcendental.cos_cl,
    "tan": transcendental.tan_cl,
    "asin": transcendental.asin_cl,
}
_BINOPS = {"+": engine.add, "-": engine.sub, "*": engine.mul, "/": engine.div}


def build(node: Expr, fuel: int = engine.DEFAULT_FUEL) -> CLStream:
    """Turn an expression tree into a digit stream."""
    if isinstance(node, Num):
        if node.value is POS_INF:
            return INF_STREAM
        return CLStream.from_rational(node.value)
    if isinstance(node, Const):
        if node.name == "pi":
            return transcendental.pi_cl()
        if node.name == "e":
            return transcendental.e_cl()
        return PHI
    if isinstance(node, Neg):
        return engine.neg(build(node.operand, fuel), fuel)
    if isinstance(node, BinOp):
        return _BINOPS[node.op](build(node.left, fuel), build(node.right, fuel), fuel)
    if isinstance(node, Call):
        if node.func == "exp" and node.arg == Num(Fraction(1)):
            return transcendental.e_cl()
        return _BUILDERS[node.func](build(node.arg, fuel), fuel)
    raise TypeError(f"not an expression node: {node!r}")
