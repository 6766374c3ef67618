"""Expression syntax.

Grammar (ASCII, whitespace ignored)::

    expr     = term { ("+" | "-") term } ;
    term     = unary { ("*" | "/") unary } ;
    unary    = "-" unary | power ;
    power    = atom [ "^" exponent ] ;
    exponent = [ "-" ] number | "(" [ "-" ] number [ "/" number ] ")" ;
    atom     = number | "w" | "exp" "(" expr ")"
             | "log" [ "^" integer ] "(" expr ")" | "(" expr ")" ;
    number   = digit { digit } [ "." digit { digit } ] ;

``^`` binds tighter than unary minus, so ``-w^2`` is ``-(w^2)``.  ``log^3(x)``
is ``log(log(log(x)))``, not a power of ``log(x)``; write ``log(x)^3`` for that.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ExprSyntaxError, UnsupportedExponent


class Expr:
    """Base of the expression tree."""

    def sexpr(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Num(Expr):
    value: Fraction

    def sexpr(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Var(Expr):
    def sexpr(self) -> str:
        return "w"


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def sexpr(self) -> str:
        return f"neg({self.arg.sexpr()})"


@dataclass(frozen=True)
class _Binary(Expr):
    left: Expr
    right: Expr
    name = ""

    def sexpr(self) -> str:
        return f"{self.name}({self.left.sexpr()}, {self.right.sexpr()})"


@dataclass(frozen=True)
class Add(_Binary):
    name = "add"


@dataclass(frozen=True)
class Sub(_Binary):
    name = "sub"


@dataclass(frozen=True)
class Mul(_Binary):
    name = "mul"


@dataclass(frozen=True)
class Div(_Binary):
    name = "div"


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction

    def sexpr(self) -> str:
        return f"pow({self.base.sexpr()}, {self.exponent})"


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr

    def sexpr(self) -> str:
        return f"exp({self.arg.sexpr()})"


@dataclass(frozen=True)
class Log(Expr):
    arg: Expr
    depth: int = 1

    def sexpr(self) -> str:
        inner = self.arg.sexpr()
        for _ in range(self.depth):
            inner = f"log({inner})"
        return inner


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_]\w*)|(\S))")


class _Tokens:
    def __init__(self, text: str):
        self.items: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if m is None:  # only whitespace left
                break
            if m.group(1):
                self.items.append(("num", m.group(1), m.start(1)))
            elif m.group(2):
                self.items.append(("name", m.group(2), m.start(2)))
            else:
                self.items.append(("op", m.group(3), m.start(3)))
            pos = m.end()
        self.items.append(("end", "", len(text)))
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.items[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.items[self.i]
        self.i += 1
        return tok

    def accept(self, op: str) -> bool:
        kind, val, _ = self.peek()
        if kind == "op" and val == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str) -> None:
        kind, val, pos = self.peek()
        if not (kind == "op" and val == op):
            found = val or "end of input"
            raise ExprSyntaxError(f"expected {op!r}, found {found!r}", pos)
        self.i += 1


def parse(text: str) -> Expr:
    """Parse an expression in ``w``."""
    toks = _Tokens(text)
    e = _expr(toks)
    kind, val, pos = toks.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected {val!r}", pos)
    return e


def _expr(toks: _Tokens) -> Expr:
    left = _term(toks)
    while True:
        if toks.accept("+"):
            left = Add(left, _term(toks))
        elif toks.accept("-"):
            left = Sub(left, _term(toks))
        else:
            return left


def _term(toks: _Tokens) -> Expr:
    left = _unary(toks)
    while True:
        if toks.accept("*"):
            left = Mul(left, _unary(toks))
        elif toks.accept("/"):
            left = Div(left, _unary(toks))
        else:
            return left


def _unary(toks: _Tokens) -> Expr:
    if toks.accept("-"):
        return Neg(_unary(toks))
    return _power(toks)


def _power(toks: _Tokens) -> Expr:
    base = _atom(toks)
    if toks.accept("^"):
        return Pow(base, _exponent(toks))
    return base


def _exponent(toks: _Tokens) -> Fraction:
    start = toks.peek()[2]

    def unsupported():
        raise UnsupportedExponent("exponents must be rational literals such as 2, -1 or (1/2)", start)

    if toks.accept("("):
        neg = toks.accept("-")
        kind, val, _ = toks.next()
        if kind != "num":
            unsupported()
        q = Fraction(val)
        if toks.accept("/"):
            kind, val, _ = toks.next()
            if kind != "num":
                unsupported()
            d = Fraction(val)
            if not d:
                raise ExprSyntaxError("zero denominator in exponent", start)
            q /= d
        if not toks.accept(")"):
            unsupported()
        q = -q if neg else q
    else:
        neg = toks.accept("-")
        kind, val, _ = toks.next()
        if kind != "num":
            unsupported()
        q = -Fraction(val) if neg else Fraction(val)
    if toks.peek()[:2] == ("op", "^"):
        raise UnsupportedExponent("chained powers need parentheses", toks.peek()[2])
    return q


def _atom(toks: _Tokens) -> Expr:
    kind, val, pos = toks.next()
    if kind == "num":
        return Num(Fraction(val))
    if kind == "name":
        if val == "w":
            return Var()
        if val == "exp":
            toks.expect("(")
            arg = _expr(toks)
            toks.expect(")")
            return Exp(arg)
        if val == "log":
            depth = 1
            if toks.accept("^"):
                k, d, dpos = toks.next()
                if k != "num" or not d.isdigit() or int(d) < 1:
                    raise ExprSyntaxError("log^k needs a positive integer k", dpos)
                depth = int(d)
            toks.expect("(")
            arg = _expr(toks)
            toks.expect(")")
            return Log(arg, depth)
        raise ExprSyntaxError(f"unknown name {val!r}", pos)
    if kind == "op" and val == "(":
        e = _expr(toks)
        toks.expect(")")
        return e
    raise ExprSyntaxError(f"unexpected {val or 'end of input'!r}", pos)


__all__ = ["Expr", "Num", "Var", "Neg", "Add", "Sub", "Mul", "Div", "Pow", "Exp", "Log", "parse"]
