"""Rational functions in the declared symbols, the scalar field for structure constants."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Optional

import sympy
from sympy import QQ
from sympy.polys.fields import FracElement, FracField

from schrodinger.ring import SYMBOLS, Monomial, RingElement, RingTerm


@lru_cache(maxsize=None)
def fraction_field(names: tuple[str, ...]) -> FracField:
    return FracField(sympy.symbols(list(names)), QQ)


def current_field() -> FracField:
    return fraction_field(SYMBOLS.names)


def _to_qq(value: Fraction):
    return QQ(value.numerator, value.denominator)


def to_fraction(c) -> Fraction:
    """Convert a QQ domain element to a Fraction."""
    return Fraction(int(c.numerator), int(c.denominator))


def from_term(coeff: Fraction, mono: Monomial, field: Optional[FracField] = None) -> FracElement:
    field = field or current_field()
    names = [str(s) for s in field.symbols]
    result = field(_to_qq(Fraction(coeff)))
    for name, exp in mono.powers:
        result = result * field.gens[names.index(name)] ** exp
    return result


def from_scalar(element: RingElement, field: Optional[FracField] = None) -> FracElement:
    if not element.is_scalar():
        raise ValueError(f"{element} depends on t, x or an exponential")
    field = field or current_field()
    total = field.zero
    for term in element.terms:
        total = total + from_term(term.coeff, term.mono, field)
    return total


def _poly_to_ring(poly, names: list[str], shift: Optional[tuple[int, ...]] = None) -> RingElement:
    terms = []
    for monom, coeff in poly.terms():
        exps = monom if shift is None else tuple(e - s for e, s in zip(monom, shift))
        mono = Monomial.from_dict(dict(zip(names, exps)))
        terms.append(RingTerm(to_fraction(coeff), mono))
    return RingElement.from_terms(terms)


def fracpoly_to_ring(f: FracElement) -> Optional[RingElement]:
    """Laurent polynomial form when the denominator is a single term, else None."""
    names = [str(s) for s in f.field.symbols]
    denom_terms = f.denom.terms()
    if len(denom_terms) != 1:
        return None
    ((shift, dcoeff),) = denom_terms
    numer = _poly_to_ring(f.numer, names, shift)
    return numer * RingElement.constant(1 / to_fraction(dcoeff))


def numerator_and_denominator(f: FracElement) -> tuple[RingElement, RingElement]:
    names = [str(s) for s in f.field.symbols]
    return _poly_to_ring(f.numer, names), _poly_to_ring(f.denom, names)


def is_constant(f: FracElement) -> bool:
    return f.numer.is_ground and f.denom.is_ground


def constant_value(f: FracElement) -> Fraction:
    if not is_constant(f):
        raise ValueError(f"{f.as_expr()} is not a rational constant")
    return to_fraction(f.numer.LC) / to_fraction(f.denom.LC)


def substitute_fracpoly(f: FracElement, name: str, coeff: Fraction, mono: Monomial) -> FracElement:
    field = f.field
    value = sympy.Rational(coeff.numerator, coeff.denominator)
    for symbol, exp in mono.powers:
        value = value * sympy.Symbol(symbol) ** exp
    expr = f.as_expr().subs(sympy.Symbol(name), value)
    return field.from_expr(sympy.together(expr))
