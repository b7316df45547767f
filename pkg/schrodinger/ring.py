"""Exact coefficient ring.

Elements are finite sums of ``Fraction * symbol monomial * t^i x^j * exp(E)``
where the symbol monomial is a Laurent monomial in the declared symbols and
``E`` is a linear combination of ``t`` and ``x^2`` with monomial coefficients.
"""

from __future__ import annotations

import logging
import re
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from schrodinger import DEFAULT_SYMBOLS, RESERVED_NAMES, SYMBOL_GRADES

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
EXP_BASES = ("t", "x2")

Scalar = Union[int, Fraction]


class SymbolTable:
    """Ordered set of declared symbol names."""

    def __init__(self, names: Iterable[str] = DEFAULT_SYMBOLS):
        self._names: list[str] = []
        for name in names:
            self.declare(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def declare(self, name: str) -> int:
        if name in RESERVED_NAMES:
            raise ValueError(f"'{name}' is reserved and cannot be declared as a symbol")
        if not IDENTIFIER.fullmatch(name):
            raise ValueError(f"'{name}' is not a valid symbol name")
        if name not in self._names:
            logging.debug(f"[ring] declare symbol {name}")
            self._names.append(name)
        return self._names.index(name)

    def index(self, name: str) -> int:
        try:
            return self._names.index(name)
        except ValueError:
            raise KeyError(f"undeclared symbol '{name}'") from None

    def __contains__(self, name: object) -> bool:
        return name in self._names

    def __iter__(self):
        return iter(self._names)

    def __len__(self) -> int:
        return len(self._names)

    @contextmanager
    def scoped(self):
        """Declarations made inside the block are dropped on exit."""
        saved = list(self._names)
        try:
            yield self
        finally:
            dropped = [name for name in self._names if name not in saved]
            if dropped:
                logging.debug(f"[ring] drop symbols {', '.join(dropped)}")
            self._names[:] = saved


SYMBOLS = SymbolTable()


@dataclass(frozen=True)
class Monomial:
    powers: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, **powers: int) -> "Monomial":
        return cls.from_dict(powers)

    @classmethod
    def from_dict(cls, powers: dict[str, int]) -> "Monomial":
        items = [(name, exp) for name, exp in powers.items() if exp]
        items.sort(key=lambda item: SYMBOLS.index(item[0]))
        return cls(tuple(items))

    def exponent(self, name: str) -> int:
        for symbol, exp in self.powers:
            if symbol == name:
                return exp
        return 0

    def without(self, name: str) -> "Monomial":
        return Monomial(tuple(item for item in self.powers if item[0] != name))

    def is_one(self) -> bool:
        return not self.powers

    def grade(self) -> Fraction:
        return sum(
            (SYMBOL_GRADES.get(name, Fraction(0)) * exp for name, exp in self.powers),
            Fraction(0),
        )

    def sort_key(self) -> tuple[int, ...]:
        return tuple(self.exponent(name) for name in SYMBOLS.names)

    def inverse(self) -> "Monomial":
        return self**-1

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        acc = dict(self.powers)
        for name, exp in other.powers:
            acc[name] = acc.get(name, 0) + exp
        return Monomial.from_dict(acc)

    def __pow__(self, n: int) -> "Monomial":
        return Monomial.from_dict({name: exp * n for name, exp in self.powers})


ONE = Monomial()


@dataclass(frozen=True)
class ExpArg:
    """Exponent of an exponential factor: entries (coeff, mono, base)."""

    entries: tuple[tuple[Fraction, Monomial, str], ...] = ()

    @classmethod
    def build(cls, entries: Iterable[tuple[Scalar, Monomial, str]]) -> "ExpArg":
        acc: dict[tuple[Monomial, str], Fraction] = {}
        for coeff, mono, base in entries:
            if base not in EXP_BASES:
                raise ValueError(f"exponent base must be one of {EXP_BASES}, got {base!r}")
            acc[(mono, base)] = acc.get((mono, base), Fraction(0)) + Fraction(coeff)
        items = [(coeff, mono, base) for (mono, base), coeff in acc.items() if coeff]
        items.sort(key=lambda item: (item[2], item[1].sort_key()))
        return cls(tuple(items))

    def is_zero(self) -> bool:
        return not self.entries

    def rate(self, base: str) -> list[tuple[Fraction, Monomial]]:
        return [(coeff, mono) for coeff, mono, b in self.entries if b == base]

    def is_grade_zero(self) -> bool:
        return all(mono.grade() == 1 for _, mono, _ in self.entries)

    def sort_key(self) -> tuple:
        return tuple((base, mono.sort_key(), coeff) for coeff, mono, base in self.entries)

    def substitute(self, name: str, coeff: Fraction, mono: Monomial) -> "ExpArg":
        entries = []
        for c, m, base in self.entries:
            k = m.exponent(name)
            if k and not coeff:
                if k < 0:
                    raise ZeroDivisionError(f"substituting {name} = 0 into exponent with {name}^{k}")
                continue
            entries.append((c * coeff**k, m.without(name) * mono**k, base))
        return ExpArg.build(entries)

    def __add__(self, other: "ExpArg") -> "ExpArg":
        return ExpArg.build(self.entries + other.entries)

    def __neg__(self) -> "ExpArg":
        return ExpArg.build((-c, m, base) for c, m, base in self.entries)


NO_EXP = ExpArg()


@dataclass(frozen=True)
class RingTerm:
    coeff: Fraction
    mono: Monomial = ONE
    tdeg: int = 0
    xdeg: int = 0
    exp: ExpArg = NO_EXP

    @property
    def key(self) -> tuple:
        return (self.mono, self.tdeg, self.xdeg, self.exp)

    def sort_key(self) -> tuple:
        return (self.mono.sort_key(), self.tdeg, self.xdeg, self.exp.sort_key())

    def is_scalar(self) -> bool:
        return self.tdeg == 0 and self.xdeg == 0 and self.exp.is_zero()

    def grade(self) -> Optional[Fraction]:
        if not self.exp.is_grade_zero():
            return None
        return self.mono.grade() - self.tdeg - Fraction(self.xdeg, 2)


def _collect(pairs: Iterable[tuple[tuple, Fraction]]) -> "RingElement":
    acc: dict[tuple, Fraction] = {}
    for key, coeff in pairs:
        acc[key] = acc.get(key, Fraction(0)) + coeff
    terms = [RingTerm(coeff, *key) for key, coeff in acc.items() if coeff]
    terms.sort(key=RingTerm.sort_key)
    return RingElement(tuple(terms))


@dataclass(frozen=True)
class RingElement:
    terms: tuple[RingTerm, ...] = ()

    @classmethod
    def from_terms(cls, terms: Iterable[RingTerm]) -> "RingElement":
        return _collect((term.key, Fraction(term.coeff)) for term in terms)

    @classmethod
    def coerce(cls, value: object) -> "RingElement":
        if isinstance(value, RingElement):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.constant(value)
        if isinstance(value, Monomial):
            return cls.from_terms([RingTerm(Fraction(1), value)])
        raise TypeError(f"cannot use {type(value).__name__} as a ring element")

    @classmethod
    def constant(cls, value: Scalar) -> "RingElement":
        return cls.from_terms([RingTerm(Fraction(value))])

    @classmethod
    def zero(cls) -> "RingElement":
        return cls()

    @classmethod
    def one(cls) -> "RingElement":
        return cls.constant(1)

    @classmethod
    def symbol(cls, name: str, power: int = 1) -> "RingElement":
        SYMBOLS.index(name)
        return cls.from_terms([RingTerm(Fraction(1), Monomial.from_dict({name: power}))])

    @classmethod
    def var(cls, name: str, power: int = 1) -> "RingElement":
        if name == "t":
            return cls.from_terms([RingTerm(Fraction(1), tdeg=power)])
        if name == "x":
            return cls.from_terms([RingTerm(Fraction(1), xdeg=power)])
        raise ValueError(f"coordinate must be 't' or 'x', got {name!r}")

    @classmethod
    def exponential(cls, arg: ExpArg) -> "RingElement":
        return cls.from_terms([RingTerm(Fraction(1), exp=arg)])

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return all(term.is_scalar() for term in self.terms)

    def has_gaussian(self) -> bool:
        return any(term.exp.rate("x2") for term in self.terms)

    def to_exp_arg(self) -> ExpArg:
        """Read this element as an exponent: every term must be c*m*t or c*m*x^2."""
        entries = []
        for term in self.terms:
            if not term.exp.is_zero():
                raise ValueError("nested exponentials are outside the exponent span")
            if (term.tdeg, term.xdeg) == (1, 0):
                entries.append((term.coeff, term.mono, "t"))
            elif (term.tdeg, term.xdeg) == (0, 2):
                entries.append((term.coeff, term.mono, "x2"))
            else:
                raise ValueError(
                    f"exponent term with t^{term.tdeg} x^{term.xdeg} is outside the span of t and x^2"
                )
        return ExpArg.build(entries)

    def strip_exp(self) -> "RingElement":
        return RingElement.from_terms(
            RingTerm(term.coeff, term.mono, term.tdeg, term.xdeg) for term in self.terms
        )

    def grade(self) -> Optional[Fraction]:
        grades = {term.grade() for term in self.terms}
        if len(grades) != 1 or None in grades:
            return None
        return grades.pop()

    def inverse(self) -> "RingElement":
        if len(self.terms) != 1:
            raise ValueError("only single-term elements are invertible")
        (term,) = self.terms
        if term.tdeg or term.xdeg:
            raise ValueError("t and x are not invertible")
        return RingElement((RingTerm(1 / term.coeff, term.mono.inverse(), exp=-term.exp),))

    def ratio_to(self, other: "RingElement") -> Optional["RingElement"]:
        """Scalar mu with self == mu * other, or None."""
        if other.is_zero():
            raise ValueError("ratio against the zero element")
        if self.is_zero():
            return RingElement.zero()
        lead = other.terms[0]
        for term in self.terms:
            if (term.tdeg, term.xdeg, term.exp) != (lead.tdeg, lead.xdeg, lead.exp):
                continue
            mu = RingElement(
                (RingTerm(term.coeff / lead.coeff, term.mono * lead.mono.inverse()),)
            )
            if mu * other == self:
                return mu
        return None

    def derive(self, var: str) -> "RingElement":
        if var not in ("t", "x"):
            raise ValueError(f"can only differentiate in t or x, got {var!r}")
        pairs = []
        for term in self.terms:
            if var == "t":
                if term.tdeg:
                    pairs.append(
                        ((term.mono, term.tdeg - 1, term.xdeg, term.exp), term.coeff * term.tdeg)
                    )
                for c, m in term.exp.rate("t"):
                    pairs.append(((term.mono * m, term.tdeg, term.xdeg, term.exp), term.coeff * c))
            else:
                if term.xdeg:
                    pairs.append(
                        ((term.mono, term.tdeg, term.xdeg - 1, term.exp), term.coeff * term.xdeg)
                    )
                for c, m in term.exp.rate("x2"):
                    pairs.append(
                        ((term.mono * m, term.tdeg, term.xdeg + 1, term.exp), 2 * term.coeff * c)
                    )
        return _collect(pairs)

    def substitute(self, name: str, value: object) -> "RingElement":
        SYMBOLS.index(name)
        coeff, mono = scalar_parts(value)
        pairs = []
        for term in self.terms:
            k = term.mono.exponent(name)
            if k and not coeff:
                if k < 0:
                    raise ZeroDivisionError(f"substituting {name} = 0 into {name}^{k}")
                continue
            exp = term.exp.substitute(name, coeff, mono)
            pairs.append(
                ((term.mono.without(name) * mono**k, term.tdeg, term.xdeg, exp), term.coeff * coeff**k)
            )
        return _collect(pairs)

    def __add__(self, other: object) -> "RingElement":
        try:
            other = RingElement.coerce(other)
        except TypeError:
            return NotImplemented
        return RingElement.from_terms(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> "RingElement":
        return RingElement(tuple(RingTerm(-t.coeff, t.mono, t.tdeg, t.xdeg, t.exp) for t in self.terms))

    def __sub__(self, other: object) -> "RingElement":
        try:
            other = RingElement.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> "RingElement":
        return (-self) + other

    def __mul__(self, other: object) -> "RingElement":
        try:
            other = RingElement.coerce(other)
        except TypeError:
            return NotImplemented
        pairs = []
        for left in self.terms:
            for right in other.terms:
                key = (
                    left.mono * right.mono,
                    left.tdeg + right.tdeg,
                    left.xdeg + right.xdeg,
                    left.exp + right.exp,
                )
                pairs.append((key, left.coeff * right.coeff))
        return _collect(pairs)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "RingElement":
        try:
            other = RingElement.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, n: int) -> "RingElement":
        if n < 0:
            return self.inverse() ** -n
        result = RingElement.one()
        for _ in range(n):
            result = result * self
        return result

    def __str__(self) -> str:
        from schrodinger.expr import format_ring

        return format_ring(self)


def scalar_parts(value: object) -> tuple[Fraction, Monomial]:
    """Split a substitution value into (rational, monomial)."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value), ONE
    if isinstance(value, Monomial):
        return Fraction(1), value
    if isinstance(value, RingElement):
        if value.is_zero():
            return Fraction(0), ONE
        if len(value.terms) != 1 or not value.terms[0].is_scalar():
            raise ValueError(
                f"substitution value must be a rational times a symbol monomial, got {value}"
            )
        (term,) = value.terms
        return term.coeff, term.mono
    raise TypeError(f"cannot substitute a {type(value).__name__}")


def normalize(e: RingElement) -> RingElement:
    return RingElement.from_terms(e.terms)


def mul(e1: RingElement, e2: RingElement) -> RingElement:
    return e1 * e2


def derive(e: RingElement, var: str) -> RingElement:
    return e.derive(var)


def substitute(e: RingElement, sym: str, value: object) -> RingElement:
    return e.substitute(sym, value)
