"""Text syntax for operators.

Grammar (``*`` is operator composition, left associative)::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := "-" unary | power
    power := atom ("^" ["-"] INT)?
    atom  := INT | IDENT | "exp" "(" expr ")" | "(" expr ")"

``t`` and ``x`` are coordinates, ``Dt`` and ``Dx`` derivatives, other
identifiers are declared symbols or names from the environment.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Union

from sympy.polys.fields import FracElement

from schrodinger.diffop import DiffOp
from schrodinger.fracpoly import fracpoly_to_ring, numerator_and_denominator
from schrodinger.ring import IDENTIFIER, RESERVED_NAMES, SYMBOLS, ExpArg, RingElement, RingTerm


class ParseError(ValueError):
    def __init__(self, message: str, token: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.token = token
        self.column = column
        self.line: Optional[int] = None
        super().__init__(str(self))

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where += f"line {self.line}, "
        if self.token is not None:
            where += f"token {self.token} (column {self.column})"
        return f"{self.message} at {where}".rstrip(", ") if where else self.message


class SemanticError(ValueError):
    pass


# region Tokenizer


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    index: int
    column: int


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if not match:
            column = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[column - 1]!r}", len(tokens) + 1, column)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(Token(kind, match.group(kind), len(tokens) + 1, start + 1))
        pos = match.end()
    return tokens


# endregion Tokenizer

# region AST


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Name:
    name: str
    token: Token


@dataclass(frozen=True)
class Exp:
    arg: "Node"
    token: Token


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"
    sign: int


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Div:
    left: "Node"
    right: "Node"
    token: Token


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int
    token: Token


@dataclass(frozen=True)
class Neg:
    operand: "Node"


Node = Union[Num, Name, Exp, Add, Mul, Div, Pow, Neg]

# endregion AST


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    def _peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _error(self, message: str) -> ParseError:
        token = self._peek()
        if token is None:
            return ParseError(f"{message}, found end of input", len(self.tokens) + 1, len(self.text) + 1)
        return ParseError(f"{message}, found {token.text!r}", token.index, token.column)

    def _accept(self, text: str) -> Optional[Token]:
        token = self._peek()
        if token is not None and token.kind == "op" and token.text == text:
            self.pos += 1
            return token
        return None

    def _expect(self, text: str) -> Token:
        token = self._accept(text)
        if token is None:
            raise self._error(f"expected {text!r}")
        return token

    def parse(self) -> Node:
        if not self.tokens:
            raise ParseError("empty expression", 1, 1)
        node = self.expr()
        if self._peek() is not None:
            raise self._error("expected an operator or end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            if self._accept("+"):
                node = Add(node, self.term(), 1)
            elif self._accept("-"):
                node = Add(node, self.term(), -1)
            else:
                return node

    def term(self) -> Node:
        node = self.unary()
        while True:
            if self._accept("*"):
                node = Mul(node, self.unary())
            else:
                token = self._accept("/")
                if token is None:
                    return node
                node = Div(node, self.unary(), token)

    def unary(self) -> Node:
        if self._accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        token = self._accept("^")
        if token is None:
            return base
        sign = -1 if self._accept("-") else 1
        number = self._peek()
        if number is None or number.kind != "num":
            raise self._error("expected an integer exponent")
        self.pos += 1
        return Pow(base, sign * int(number.text), token)

    def atom(self) -> Node:
        token = self._peek()
        if token is None:
            raise self._error("expected an operand")
        if token.kind == "num":
            self.pos += 1
            return Num(int(token.text))
        if token.kind == "ident":
            self.pos += 1
            if token.text == "exp":
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Exp(arg, token)
            return Name(token.text, token)
        if self._accept("("):
            node = self.expr()
            self._expect(")")
            return node
        raise self._error("expected an operand")


def parse_ast(text: str) -> Node:
    return Parser(text).parse()


def _scalar_of(op: DiffOp) -> Optional[RingElement]:
    """The coefficient when op is multiplication by a single rational-times-monomial term."""
    if len(op.entries) != 1 or op.entries[0][:2] != (0, 0):
        return None
    coeff = op.entries[0][2]
    if len(coeff.terms) != 1 or not coeff.terms[0].is_scalar():
        return None
    return coeff


def evaluate(node: Node, env: Optional[Mapping[str, object]] = None) -> DiffOp:
    env = env or {}
    if isinstance(node, Num):
        return DiffOp.multiplication(node.value)
    if isinstance(node, Name):
        name = node.name
        if name in ("t", "x"):
            return DiffOp.multiplication(RingElement.var(name))
        if name == "Dt":
            return DiffOp.dt()
        if name == "Dx":
            return DiffOp.dx()
        if name in env:
            return env[name]
        if name in SYMBOLS:
            return DiffOp.multiplication(RingElement.symbol(name))
        raise SemanticError(f"unknown identifier {name!r} at token {node.token.index}")
    if isinstance(node, Exp):
        arg = evaluate(node.arg, env)
        if any((dt, dx) != (0, 0) for dt, dx, _ in arg.entries):
            raise SemanticError(f"exp argument at token {node.token.index} contains derivatives")
        try:
            exponent = arg.coefficient(0, 0).to_exp_arg()
        except ValueError as e:
            raise SemanticError(f"exp argument at token {node.token.index}: {e}") from None
        return DiffOp.multiplication(RingElement.exponential(exponent))
    if isinstance(node, Add):
        left, right = evaluate(node.left, env), evaluate(node.right, env)
        return left + right if node.sign > 0 else left - right
    if isinstance(node, Mul):
        return evaluate(node.left, env) * evaluate(node.right, env)
    if isinstance(node, Div):
        divisor = _scalar_of(evaluate(node.right, env))
        if divisor is None:
            raise SemanticError(
                f"division at token {node.token.index} must be by a rational or a symbol monomial"
            )
        return divisor.inverse() * evaluate(node.left, env)
    if isinstance(node, Pow):
        base = evaluate(node.base, env)
        if node.exponent >= 0:
            return base**node.exponent
        scalar = _scalar_of(base)
        if scalar is None:
            raise SemanticError(f"negative power at token {node.token.index} of a non-invertible factor")
        return DiffOp.multiplication(scalar ** node.exponent)
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    raise TypeError(f"unknown node {node!r}")


def parse_expr(text: str, env: Optional[Mapping[str, object]] = None) -> DiffOp:
    """Parse text into a canonical operator."""
    return evaluate(parse_ast(text), env)


# region Printer


def _power(base: str, exp: int) -> str:
    return base if exp == 1 else f"{base}^{exp}"


def _product(coeff: Fraction, numer: list[str], denom: list[str], trailing: list[str]) -> tuple[bool, str]:
    top = ([str(abs(coeff.numerator))] if abs(coeff.numerator) != 1 else []) + numer
    bottom = ([str(coeff.denominator)] if coeff.denominator != 1 else []) + denom
    if not top and (bottom or not trailing):
        top = ["1"]
    body = "*".join(top)
    if bottom:
        body += "/" + (bottom[0] if len(bottom) == 1 else "(" + "*".join(bottom) + ")")
    if trailing:
        body = "*".join(([body] if body else []) + trailing)
    return coeff < 0, body


def _exp_text(arg: ExpArg) -> str:
    terms = [
        RingTerm(coeff, mono, 1, 0) if base == "t" else RingTerm(coeff, mono, 0, 2)
        for coeff, mono, base in arg.entries
    ]
    return f"exp({format_ring(RingElement.from_terms(terms))})"


def _term(term: RingTerm, trailing: list[str]) -> tuple[bool, str]:
    numer, denom = [], []
    for name, exp in term.mono.powers:
        (numer if exp > 0 else denom).append(_power(name, abs(exp)))
    if term.tdeg:
        numer.append(_power("t", term.tdeg))
    if term.xdeg:
        numer.append(_power("x", term.xdeg))
    if not term.exp.is_zero():
        numer.append(_exp_text(term.exp))
    return _product(term.coeff, numer, denom, trailing)


def _join(parts: list[tuple[bool, str]]) -> str:
    if not parts:
        return "0"
    negative, body = parts[0]
    text = ("-" if negative else "") + body
    for negative, body in parts[1:]:
        text += f" {'-' if negative else '+'} {body}"
    return text


def format_ring(e: RingElement) -> str:
    return _join([_term(term, []) for term in e.terms])


def format_expr(P: DiffOp) -> str:
    """Canonical text; parse_expr(format_expr(P)) == P."""
    parts = []
    for dt, dx, coeff in P.entries:
        derivs = ([_power("Dt", dt)] if dt else []) + ([_power("Dx", dx)] if dx else [])
        parts.extend(_term(term, derivs) for term in coeff.terms)
    return _join(parts)


def format_scalar(f: FracElement) -> str:
    ring = fracpoly_to_ring(f)
    if ring is not None:
        return format_ring(ring)
    num, den = numerator_and_denominator(f)
    return f"({format_ring(num)})/({format_ring(den)})"


# endregion Printer


def load_definitions(text: str, env: Optional[Mapping[str, object]] = None) -> dict[str, DiffOp]:
    """Read ``name = expression`` lines; ``#`` starts a comment, ``symbols:`` declares symbols.

    Declarations go into the global table; wrap the call in ``SYMBOLS.scoped()`` to undo them.
    """
    definitions: dict[str, DiffOp] = {}
    scope = dict(env or {})
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("symbols:"):
            for name in re.split(r"[,\s]+", line[len("symbols:"):].strip()):
                if name:
                    SYMBOLS.declare(name)
            continue
        name, sep, body = line.partition("=")
        name = name.strip()
        if not sep or not IDENTIFIER.fullmatch(name):
            error = ParseError("expected 'name = expression'")
            error.line = lineno
            raise error
        if name in RESERVED_NAMES or name in SYMBOLS:
            raise SemanticError(f"line {lineno}: '{name}' is reserved or a declared symbol")
        try:
            op = parse_expr(body, scope)
        except ParseError as e:
            e.line = lineno
            raise
        definitions[name] = op
        scope[name] = op
        logging.debug(f"[expr] defined {name}")
    return definitions
