"""Differential operators ``sum c(t, x) * Dt^i * Dx^j`` with coefficients on the left."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, NamedTuple, Optional

from schrodinger.ring import Monomial, RingElement, RingTerm, scalar_parts

Entry = tuple[int, int, RingElement]


class Bracket(enum.Enum):
    COMMUTATOR = "comm"
    ANTICOMMUTATOR = "anti"

    @classmethod
    def parse(cls, value: str) -> "Bracket":
        aliases = {"commutator": "comm", "anticommutator": "anti"}
        return cls(aliases.get(value, value))


@dataclass(frozen=True)
class DiffOp:
    entries: tuple[Entry, ...] = ()

    @classmethod
    def from_entries(cls, entries: Iterable[Entry]) -> "DiffOp":
        acc: dict[tuple[int, int], RingElement] = {}
        for dt, dx, coeff in entries:
            if dt < 0 or dx < 0:
                raise ValueError(f"derivative orders must be non-negative, got ({dt}, {dx})")
            coeff = RingElement.coerce(coeff)
            acc[(dt, dx)] = acc.get((dt, dx), RingElement.zero()) + coeff
        items = [(dt, dx, c) for (dt, dx), c in acc.items() if not c.is_zero()]
        items.sort(key=lambda entry: (-entry[0], -entry[1]))
        return cls(tuple(items))

    @classmethod
    def from_mapping(cls, mapping: dict[tuple[int, int], object]) -> "DiffOp":
        return cls.from_entries((dt, dx, c) for (dt, dx), c in mapping.items())

    @classmethod
    def multiplication(cls, coeff: object) -> "DiffOp":
        return cls.from_entries([(0, 0, coeff)])

    @classmethod
    def identity(cls) -> "DiffOp":
        return cls.multiplication(1)

    @classmethod
    def zero(cls) -> "DiffOp":
        return cls()

    @classmethod
    def dt(cls, order: int = 1) -> "DiffOp":
        return cls.from_entries([(order, 0, 1)])

    @classmethod
    def dx(cls, order: int = 1) -> "DiffOp":
        return cls.from_entries([(0, order, 1)])

    @classmethod
    def coerce(cls, value: object) -> "DiffOp":
        if isinstance(value, DiffOp):
            return value
        return cls.multiplication(value)

    def coefficient(self, dt: int, dx: int) -> RingElement:
        for i, j, c in self.entries:
            if (i, j) == (dt, dx):
                return c
        return RingElement.zero()

    def order_t(self) -> int:
        return max((dt for dt, _, _ in self.entries), default=0)

    def is_zero(self) -> bool:
        return not self.entries

    def is_t_only(self) -> bool:
        """No Dx and no x anywhere in the coefficients."""
        return all(
            dx == 0 and all(term.xdeg == 0 and not term.exp.rate("x2") for term in c.terms)
            for _, dx, c in self.entries
        )

    def key_expansion(self) -> Iterator[tuple[tuple, Fraction, Monomial]]:
        """Yield (key, rational, symbol monomial); key collects everything that is not a scalar."""
        for dt, dx, c in self.entries:
            for term in c.terms:
                key = (dt, dx, term.tdeg, term.xdeg, term.exp.sort_key())
                yield key, term.coeff, term.mono

    def piece(self, key: tuple) -> "DiffOp":
        """Part of the operator living at a key from ``key_expansion``."""
        dt, dx, tdeg, xdeg, exp_key = key
        terms = [
            term
            for term in self.coefficient(dt, dx).terms
            if (term.tdeg, term.xdeg, term.exp.sort_key()) == (tdeg, xdeg, exp_key)
        ]
        return DiffOp.from_entries([(dt, dx, RingElement.from_terms(terms))])

    def substitute(self, name: str, value: object) -> "DiffOp":
        return DiffOp.from_entries((dt, dx, c.substitute(name, value)) for dt, dx, c in self.entries)

    def ratio_to(self, other: "DiffOp") -> Optional[RingElement]:
        """Scalar mu (rational times symbol monomial) with self == mu * other, or None."""
        if other.is_zero():
            raise ValueError("ratio against the zero operator")
        if self.is_zero():
            return RingElement.zero()
        dt, dx, lead = other.entries[0]
        mu = self.coefficient(dt, dx).ratio_to(lead)
        if mu is None or not mu.is_scalar() or len(mu.terms) > 1:
            return None
        if mu * other != self:
            return None
        return mu

    def __add__(self, other: object) -> "DiffOp":
        try:
            other = DiffOp.coerce(other)
        except TypeError:
            return NotImplemented
        return DiffOp.from_entries(self.entries + other.entries)

    __radd__ = __add__

    def __neg__(self) -> "DiffOp":
        return DiffOp(tuple((dt, dx, -c) for dt, dx, c in self.entries))

    def __sub__(self, other: object) -> "DiffOp":
        try:
            other = DiffOp.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> "DiffOp":
        return (-self) + other

    def __mul__(self, other: object) -> "DiffOp":
        try:
            other = DiffOp.coerce(other)
        except TypeError:
            return NotImplemented
        return compose(self, other)

    def __rmul__(self, other: object) -> "DiffOp":
        try:
            left = RingElement.coerce(other)
        except TypeError:
            return NotImplemented
        return DiffOp.from_entries((dt, dx, left * c) for dt, dx, c in self.entries)

    def __pow__(self, n: int) -> "DiffOp":
        if n < 0:
            raise ValueError("operators have no inverse powers")
        result = DiffOp.identity()
        for _ in range(n):
            result = compose(result, self)
        return result

    def __str__(self) -> str:
        from schrodinger.expr import format_expr

        return format_expr(self)


@lru_cache(maxsize=4096)
def _partial(coeff: RingElement, i: int, j: int) -> RingElement:
    for _ in range(i):
        coeff = coeff.derive("t")
    for _ in range(j):
        coeff = coeff.derive("x")
    return coeff


def compose(P: DiffOp, Q: DiffOp) -> DiffOp:
    """P o Q, by moving each derivative of P past the coefficients of Q."""
    entries = []
    for i, j, a in P.entries:
        for k, l, b in Q.entries:
            for p in range(i + 1):
                for q in range(j + 1):
                    db = _partial(b, p, q)
                    if db.is_zero():
                        continue
                    weight = comb(i, p) * comb(j, q)
                    entries.append((i - p + k, j - q + l, weight * (a * db)))
    return DiffOp.from_entries(entries)


def bracket(P: DiffOp, Q: DiffOp, kind: Bracket = Bracket.COMMUTATOR) -> DiffOp:
    if kind is Bracket.COMMUTATOR:
        return P * Q - Q * P
    return P * Q + Q * P


def apply(P: DiffOp, psi: object) -> RingElement:
    psi = RingElement.coerce(psi)
    result = RingElement.zero()
    for dt, dx, c in P.entries:
        result = result + c * _partial(psi, dt, dx)
    return result


def grading(P: DiffOp) -> Optional[Fraction]:
    """Dimension of a homogeneous operator, None when inhomogeneous or zero."""
    grades = set()
    for dt, dx, c in P.entries:
        for term in c.terms:
            g = term.grade()
            if g is None:
                return None
            grades.add(g + dt + Fraction(dx, 2))
    if len(grades) != 1:
        return None
    return grades.pop()


def conjugate_exp(P: DiffOp, g: object) -> DiffOp:
    """exp(g) o P o exp(-g): every Dt becomes Dt - g_t and every Dx becomes Dx - g_x."""
    g = RingElement.coerce(g)
    shifted_t = DiffOp.dt() - g.derive("t")
    shifted_x = DiffOp.dx() - g.derive("x")
    result = DiffOp.zero()
    for dt, dx, c in P.entries:
        result = result + c * (shifted_t**dt * shifted_x**dx)
    return result


def _shift_coefficient(coeff: RingElement, b: RingElement) -> RingElement:
    result = RingElement.zero()
    for term in coeff.terms:
        if term.exp.rate("x2") and not b.is_zero():
            raise ValueError(
                "shifting x in a Gaussian factor leaves the exponent span of t and x^2"
            )
        head = RingElement.from_terms([RingTerm(term.coeff, term.mono, term.tdeg, 0, term.exp)])
        shifted = (RingElement.var("x") + b) ** term.xdeg
        result = result + head * shifted
    return result


def shift_x(P: DiffOp, b: object) -> DiffOp:
    """Replace x by x + b in every coefficient; b must be x-independent."""
    coeff, mono = scalar_parts(b)
    shift = RingElement.from_terms([RingTerm(coeff, mono)])
    return DiffOp.from_entries((dt, dx, _shift_coefficient(c, shift)) for dt, dx, c in P.entries)


class Reduction(NamedTuple):
    quotient: DiffOp
    remainder: DiffOp


def check_reducer(omega: DiffOp) -> None:
    bearing = [(dt, dx, c) for dt, dx, c in omega.entries if dt > 0]
    if len(bearing) != 1 or bearing[0][:2] != (1, 0):
        raise ValueError("reducer must be Dt plus terms free of Dt")
    if bearing[0][2] != RingElement.one():
        raise ValueError(f"reducer must have unit Dt coefficient, got {bearing[0][2]}")


def reduce_mod(P: DiffOp, omega: DiffOp) -> Reduction:
    """Left division P = Q o omega + R with R free of Dt."""
    check_reducer(omega)
    quotient = DiffOp.zero()
    remainder = P
    while remainder.order_t() > 0:
        top = remainder.order_t()
        step = DiffOp.from_entries(
            (dt - 1, dx, c) for dt, dx, c in remainder.entries if dt == top
        )
        quotient = quotient + step
        remainder = remainder - step * omega
    logging.debug(f"[diffop] reduced order {P.order_t()} operator modulo Dt + L")
    return Reduction(quotient, remainder)


def adjoint_eigenvalue(cartan: DiffOp, P: DiffOp) -> Optional[RingElement]:
    """lambda with [cartan, P] = lambda * P, or None."""
    if P.is_zero():
        return None
    return bracket(cartan, P).ratio_to(P)
