"""Recursive-descent parser for the polynomial text grammar.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INTEGER)?
    atom   := NUMBER | 'i' | VAR | '(' expr ')'

``VAR`` is ``x0 .. x{N}``; numbers are integers or decimals (converted exactly).
Juxtaposition (``2x0``) is a syntax error; ``/`` only divides by constants.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction

from .numbers import QQi
from .polynomial import Polynomial

log = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<var>x\d+)|(?P<unit>i)(?![A-Za-z0-9_])|(?P<op>[-+*/^()]))"
)


class ParseError(ValueError):
    """Syntax error in polynomial text; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, num_vars: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.nv = num_vars

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self) -> Polynomial:
        p = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected token {self.tok.text!r} (implicit multiplication is not allowed)",
                             self.tok.pos)
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            t = self.take()
            q = self.unary()
            if t.text == "*":
                p = p * q
            else:
                if q.degree > 0:
                    raise ParseError("division by a non-constant", t.pos)
                if q.is_zero:
                    raise ParseError("division by zero", t.pos)
                p = p / q
        return p

    def unary(self) -> Polynomial:
        if self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            p = self.unary()
            return -p if op == "-" else p
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            t = self.take()
            if t.kind != "num" or not t.text.isdigit():
                raise ParseError("exponent must be a non-negative integer literal", t.pos)
            base = base ** int(t.text)
        return base

    def atom(self) -> Polynomial:
        t = self.take()
        if t.kind == "num":
            return Polynomial.constant(Fraction(t.text), self.nv)
        if t.kind == "unit":
            return Polynomial.constant(QQi(0, 1), self.nv)
        if t.kind == "var":
            idx = int(t.text[1:])
            if idx >= self.nv:
                raise ParseError(f"variable {t.text} out of range for {self.nv} variables", t.pos)
            return Polynomial.variable(idx, self.nv)
        if t.kind == "op" and t.text == "(":
            p = self.expr()
            close = self.take()
            if close.text != ")":
                raise ParseError("expected ')'", close.pos)
            return p
        if t.kind == "end":
            raise ParseError("unexpected end of input", t.pos)
        raise ParseError(f"unexpected token {t.text!r}", t.pos)


def parse_polynomial(text: str, num_vars: int) -> Polynomial:
    """Parse ``text`` into an exact :class:`Polynomial` in ``num_vars`` variables.

    The zero polynomial is accepted; a warning is logged.
    """
    p = _Parser(text, num_vars).parse()
    if p.is_zero:
        log.warning("parsed polynomial %r is identically zero", text)
    return p


def parse_constant(text: str) -> QQi:
    """Parse an exact scalar such as ``"1/2"``, ``"-3"`` or ``"1/2 + i"``."""
    p = _Parser(str(text), 0).parse()
    return p.coefficient(())
