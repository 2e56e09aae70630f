"""Exact-expression alphabet for ray components.

Grammar (whitespace is ignored between tokens)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | atom
    atom   := NUMBER | 'i' | 'w' | 'sqrt' '(' INTEGER ')' | '(' expr ')'
    NUMBER := DIGITS ('.' DIGITS)?

``i`` is the imaginary unit and ``w`` the cube root of unity exp(2 pi i / 3).
A decimal literal is the rational it spells, so flexed sets written with
17 significant digits stay inside the grammar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import EvalError, ParseError
from .rays import ComplexScalar

W = complex(-0.5, math.sqrt(3) / 2)


@dataclass(frozen=True)
class Num:
    text: str

    @property
    def value(self) -> Fraction:
        return Fraction(self.text)


@dataclass(frozen=True)
class Const:
    name: str  # 'i' or 'w'


@dataclass(frozen=True)
class Sqrt:
    k: int


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str, pos: int | None = None):
        p = self.pos if pos is None else pos
        raise ParseError(msg, len(self.text[:p].encode("utf-8")))

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self):
        if not self.text.strip():
            self.error("empty expression", 0)
        node = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek() == "-":
            self.pos += 1
            return Neg(self.unary())
        return self.atom()

    def atom(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        if ch.isdigit():
            return Num(self.number())
        if ch.isalpha():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isalpha():
                self.pos += 1
            word = self.text[start:self.pos]
            if word in ("i", "w"):
                return Const(word)
            if word == "sqrt":
                self.expect("(")
                self.skip()
                at = self.pos
                if not self.peek().isdigit():
                    self.error("sqrt takes a positive integer")
                digits = self.number(allow_fraction=False)
                if int(digits) <= 0:
                    self.error("sqrt takes a positive integer", at)
                self.expect(")")
                return Sqrt(int(digits))
            self.error(f"unknown name {word!r}", start)
        self.error("expected a number, 'i', 'w', 'sqrt' or '('" if ch else "unexpected end of input")

    def number(self, allow_fraction: bool = True) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if allow_fraction and self.pos < len(self.text) and self.text[self.pos] == ".":
            self.pos += 1
            frac = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == frac:
                self.error("digits expected after decimal point")
        return self.text[start:self.pos]


def parse_expr(text: str):
    """Parse component text into an AST."""
    return _Parser(text).parse()


def evaluate(node) -> complex:
    if isinstance(node, Num):
        return complex(float(node.value))
    if isinstance(node, Const):
        return 1j if node.name == "i" else W
    if isinstance(node, Sqrt):
        return complex(math.sqrt(node.k))
    if isinstance(node, Neg):
        return -evaluate(node.arg)
    if isinstance(node, BinOp):
        a, b = evaluate(node.left), evaluate(node.right)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0:
            raise EvalError("division by zero")
        return a / b
    raise TypeError(f"not an expression node: {node!r}")


def to_text(node, parent: int = 0) -> str:
    """Print an AST back in the grammar, parenthesising only where needed."""
    if isinstance(node, Num):
        return node.text
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Sqrt):
        return f"sqrt({node.k})"
    if isinstance(node, Neg):
        inner = to_text(node.arg, 3)
        return f"-{inner}"
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        # right operand of - and / binds tighter to keep left associativity
        right_prec = prec + 1 if node.op in ("-", "/") else prec
        s = f"{to_text(node.left, prec)} {node.op} {to_text(node.right, right_prec)}"
        return f"({s})" if prec < parent else s
    raise TypeError(f"not an expression node: {node!r}")


def parse_component(text: str) -> ComplexScalar:
    value = evaluate(parse_expr(text))
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise EvalError(f"non-finite value from {text!r}")
    return ComplexScalar(value, text)


def _decimal(x: float) -> str:
    # positional notation only: the grammar has no exponent syntax
    return np.format_float_positional(abs(x), precision=17, unique=False, fractional=False, trim="-")


def format_decimal(value: complex) -> str:
    """Render a complex value as grammar text with 17 significant digits."""
    re_, im = value.real, value.imag
    parts = []
    if re_ != 0 or im == 0:
        parts.append(("-" if re_ < 0 else "") + _decimal(re_))
    if im != 0:
        mag = _decimal(im)
        if parts:
            parts.append(("- " if im < 0 else "+ ") + mag + "*i")
        else:
            parts.append(("-" if im < 0 else "") + mag + "*i")
    return " ".join(parts)
