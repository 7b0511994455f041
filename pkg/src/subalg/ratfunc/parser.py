"""Recursive-descent parser for rational expressions in z1..zN.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := NUMBER | NUMBER 'i' | 'i' | VAR | '(' expr ')'

Arithmetic is carried out on (numerator, denominator) polynomial pairs, so
any nesting of divisions is accepted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ExprSyntaxError, NotHomogenizable, ParseError
from .poly import MultiPoly, MultiRational

__all__ = ["parse", "parse_fraction", "homogenize_fraction", "tokenize"]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<var>z(?P<idx>\d+))
  | (?P<imag>[ij](?![A-Za-z0-9_]))
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "var", "imag", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup if m.lastgroup != "idx" else "var"
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n_vars: int):
        self.tokens = tokenize(text)
        self.i = 0
        self.n = n_vars

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, expected: tuple[str, ...]):
        t = self.tok
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"unexpected {what}, expected {' or '.join(expected)}",
                              t.pos, expected)

    def const(self, c: complex):
        return MultiPoly.constant(self.n, c), MultiPoly.constant(self.n)

    # every rule returns a (numerator, denominator) pair

    def expr(self):
        num, den = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            n2, d2 = self.term()
            n2 = n2 if op == "+" else -n2
            num, den = num * d2 + n2 * den, den * d2
        return num, den

    def term(self):
        num, den = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op_tok = self.advance()
            n2, d2 = self.unary()
            if op_tok.text == "*":
                num, den = num * n2, den * d2
            else:
                if n2.is_zero:
                    raise ParseError(f"division by zero at offset {op_tok.pos}")
                num, den = num * d2, den * n2
        return num, den

    def unary(self):
        if self.tok.kind == "op" and self.tok.text in "+-":
            sign = self.advance().text
            num, den = self.unary()
            return (num if sign == "+" else -num), den
        return self.power()

    def power(self):
        num, den = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                self.fail(("non-negative integer exponent",))
            self.advance()
            k = int(t.text)
            num, den = num ** k, den ** k
        return num, den

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            value = float(t.text)
            if self.tok.kind == "imag":
                self.advance()
                return self.const(1j * value)
            return self.const(value)
        if t.kind == "imag":
            self.advance()
            return self.const(1j)
        if t.kind == "var":
            idx = int(t.text[1:])
            if not 1 <= idx <= self.n:
                raise ExprSyntaxError(f"variable {t.text} outside z1..z{self.n}", t.pos,
                                      (f"z1..z{self.n}",))
            self.advance()
            return MultiPoly.variable(self.n, idx - 1), MultiPoly.constant(self.n)
        if t.kind == "op" and t.text == "(":
            self.advance()
            out = self.expr()
            if not (self.tok.kind == "op" and self.tok.text == ")"):
                self.fail(("')'",))
            self.advance()
            return out
        self.fail(("number", "variable", "'('"))

    def parse(self):
        out = self.expr()
        if self.tok.kind != "end":
            self.fail(("operator", "end of input"))
        return out


def parse_fraction(text: str, n_vars: int) -> tuple[MultiPoly, MultiPoly]:
    """Parse to an unnormalized (numerator, denominator) pair."""
    if n_vars < 1:
        raise ParseError("need at least one variable")
    return _Parser(text, n_vars).parse()


def homogenize_fraction(p: MultiPoly, q: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """Bring p/q to homogeneous degree one.

    When the last variable is absent it acts as the homogenizer: both parts
    are padded with its powers and the degree gap is closed.  When it is
    present the input must already be homogeneous of degree one.
    """
    last = p.n_vars - 1
    if p.is_zero:
        return p, q
    if p.mentions(last) or q.mentions(last):
        if p.homogeneous and q.homogeneous and p.degree == q.degree + 1:
            return p, q
        raise NotHomogenizable(
            f"z{last + 1} appears, but the expression is not homogeneous of degree one")
    ph, qh = p.homogenize(last), q.homogenize(last)
    gap = ph.degree - qh.degree
    if gap >= 1:
        qh = qh.scale_variable(last, gap - 1)
    else:
        ph = ph.scale_variable(last, 1 - gap)
    return ph, qh


def parse(text: str, n_vars: int) -> MultiRational:
    """Parse, homogenize with z_N if needed, and normalize at (1, …, 1)."""
    p, q = parse_fraction(text, n_vars)
    p, q = homogenize_fraction(p, q)
    return MultiRational.from_polys(p, q)
