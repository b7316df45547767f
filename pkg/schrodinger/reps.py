"""Differential-operator representations of the Schrödinger algebra.

Three potentials are covered: constant ``V = 0``, linear ``V = omega x`` and
quadratic ``V = nu^2 x^2``. Each carries six first-order generators, three
second-order anticommutators and the evolution operator
``Omega = Dt + a Dx^2 - a V(x)``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from schrodinger.diffop import Bracket, DiffOp, adjoint_eigenvalue, bracket, grading
from schrodinger.ring import ExpArg, Monomial, RingElement


class RepCase(enum.Enum):
    CONSTANT = "constant"
    LINEAR = "linear"
    QUADRATIC = "quadratic"

    @classmethod
    def parse(cls, value: str) -> "RepCase":
        aliases = {"const": "constant", "lin": "linear", "quad": "quadratic"}
        try:
            return cls(aliases.get(value, value))
        except ValueError:
            raise ValueError(f"unknown representation '{value}'") from None

    @property
    def short(self) -> str:
        return {"constant": "const", "linear": "lin", "quadratic": "quad"}[self.value]


class Parity(enum.IntEnum):
    EVEN = 0
    ODD = 1

    def __str__(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Generator:
    name: str
    op: object
    parity: Parity = Parity.EVEN


class NamedBasis:
    """Ordered generators with unique names and a parity tag each."""

    def __init__(self, generators: Iterable[Generator]):
        self.generators: list[Generator] = []
        for g in generators:
            if g.name in self.names:
                raise ValueError(f"duplicate generator name '{g.name}'")
            self.generators.append(g)

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    def __getitem__(self, name: str):
        for g in self.generators:
            if g.name == name:
                return g.op
        raise KeyError(f"unknown generator '{name}' (have {', '.join(self.names)})")

    def __contains__(self, name: object) -> bool:
        return name in self.names

    def __iter__(self) -> Iterator[Generator]:
        return iter(self.generators)

    def __len__(self) -> int:
        return len(self.generators)

    def parity(self, name: str) -> Parity:
        for g in self.generators:
            if g.name == name:
                return g.parity
        raise KeyError(f"unknown generator '{name}'")

    def parities(self) -> dict[str, Parity]:
        return {g.name: g.parity for g in self.generators}

    def with_parity(self, parities: dict[str, Parity]) -> "NamedBasis":
        unknown = set(parities) - set(self.names)
        if unknown:
            raise KeyError(f"parity given for unknown generators {sorted(unknown)}")
        return NamedBasis(
            Generator(g.name, g.op, Parity(parities.get(g.name, g.parity))) for g in self.generators
        )

    def extend(self, generators: Iterable[Generator]) -> "NamedBasis":
        return NamedBasis(list(self.generators) + list(generators))

    def substitute(self, name: str, value: object) -> "NamedBasis":
        return NamedBasis(Generator(g.name, g.op.substitute(name, value), g.parity) for g in self.generators)

    def unit_name(self) -> Optional[str]:
        """Name of the generator acting as multiplication by 1, if any."""
        for g in self.generators:
            if isinstance(g.op, DiffOp) and g.op == DiffOp.identity():
                return g.name
        return None

    def as_env(self) -> dict[str, object]:
        return {g.name: g.op for g in self.generators}


# Symbols and coordinates as multiplication operators.
t = DiffOp.multiplication(RingElement.var("t"))
x = DiffOp.multiplication(RingElement.var("x"))
a = RingElement.symbol("a")
nu = RingElement.symbol("nu")
omega = RingElement.symbol("omega")
Dt = DiffOp.dt()
Dx = DiffOp.dx()
ONE = DiffOp.identity()


def _exp_t(rate: Fraction, **powers: int) -> RingElement:
    return RingElement.exponential(ExpArg.build([(rate, Monomial.of(**powers), "t")]))


def _half(value: int) -> Fraction:
    return Fraction(value, 2)


def _constant() -> list[DiffOp]:
    return [
        Dt,
        t * Dt + _half(1) * x * Dx + Fraction(1, 4),
        t**2 * Dt + t * x * Dx - Fraction(1, 4) * a.inverse() * x**2 + _half(1) * t,
        Dx,
        t * Dx - _half(1) * a.inverse() * x,
    ]


def _linear() -> list[DiffOp]:
    return [
        t**2 * Dt
        + (a**2 * omega * t**3 + t * x) * Dx
        + (_half(1) * t - Fraction(1, 4) * a**3 * omega**2 * t**4 - Fraction(3, 2) * a * omega * t**2 * x
           - Fraction(1, 4) * a.inverse() * x**2),
        -(t * Dt)
        - (Fraction(3, 2) * a**2 * omega * t**2 + _half(1) * x) * Dx
        + (_half(1) * a**3 * omega**2 * t**3 + Fraction(3, 2) * a * omega * t * x - Fraction(1, 4)),
        Dt + 2 * a**2 * omega * t * Dx - a**3 * omega**2 * t**2 - a * omega * x,
        -(t * Dx) + _half(1) * a.inverse() * x + _half(1) * a * omega * t**2,
        Dx - a * omega * t,
    ]


def _quadratic() -> list[DiffOp]:
    up2 = _exp_t(Fraction(2), a=1, nu=1)
    up4 = _exp_t(Fraction(4), a=1, nu=1)
    down2 = _exp_t(Fraction(-2), a=1, nu=1)
    down4 = _exp_t(Fraction(-4), a=1, nu=1)
    return [
        up4 * (Dt + 2 * a * nu * x * Dx + a * nu - 2 * a * nu**2 * x**2),
        Dt,
        down4 * (Dt - 2 * a * nu * x * Dx - a * nu - 2 * a * nu**2 * x**2),
        up2 * (Dx - nu * x),
        down2 * (Dx + nu * x),
    ]


FIRST_ORDER = ("z_p1", "z_0", "z_m1", "w_p", "w_m")
SECOND_ORDER = ("w_p1", "w_0s", "w_m1")
ODD = frozenset({"w_p", "w_m"})

_BUILDERS = {
    RepCase.CONSTANT: _constant,
    RepCase.LINEAR: _linear,
    RepCase.QUADRATIC: _quadratic,
}


def build_rep(case: RepCase) -> NamedBasis:
    """The six generators z_p1, z_0, z_m1, w_p, w_m, c of one representation."""
    ops = _BUILDERS[RepCase(case)]()
    generators = [
        Generator(name, DiffOp.coerce(op), Parity.ODD if name in ODD else Parity.EVEN)
        for name, op in zip(FIRST_ORDER, ops)
    ]
    generators.append(Generator("c", ONE))
    return NamedBasis(generators)


def extend_rep(basis: NamedBasis) -> NamedBasis:
    """Append w_p1 = {w_p, w_p}, w_0s = {w_p, w_m}, w_m1 = {w_m, w_m}."""
    w_p, w_m = basis["w_p"], basis["w_m"]
    anti = Bracket.ANTICOMMUTATOR
    return basis.extend(
        [
            Generator("w_p1", bracket(w_p, w_p, anti)),
            Generator("w_0s", bracket(w_p, w_m, anti)),
            Generator("w_m1", bracket(w_m, w_m, anti)),
        ]
    )


def potential(case: RepCase) -> RingElement:
    case = RepCase(case)
    if case is RepCase.CONSTANT:
        return RingElement.zero()
    if case is RepCase.LINEAR:
        return omega * RingElement.var("x")
    return nu**2 * RingElement.var("x", 2)


def omega_from_potential(V: object) -> DiffOp:
    return Dt + a * DiffOp.dx(2) - a * RingElement.coerce(V)


def build_omega(case: RepCase) -> DiffOp:
    return omega_from_potential(potential(case))


# Omega = z + (a/2) w in terms of the enlarged basis.
OMEGA_IDENTITIES = {
    RepCase.CONSTANT: ("z_p1", "w_p1"),
    RepCase.LINEAR: ("z_m1", "w_m1"),
    RepCase.QUADRATIC: ("z_0", "w_0s"),
}


def omega_identity(case: RepCase, basis: Optional[NamedBasis] = None) -> DiffOp:
    case = RepCase(case)
    basis = basis or extend_rep(build_rep(case))
    z, w = OMEGA_IDENTITIES[case]
    return basis[z] + _half(1) * a * basis[w]


def omega_identity_check(case: RepCase) -> bool:
    case = RepCase(case)
    holds = omega_identity(case) == build_omega(case)
    z, w = OMEGA_IDENTITIES[case]
    logging.debug(f"[reps] {case.value}: Omega = {z} + (a/2)*{w} {'holds' if holds else 'fails'}")
    return holds


def dimension_grades(basis: NamedBasis) -> dict[str, Optional[Fraction]]:
    return {g.name: grading(g.op) for g in basis}


def adjoint_grade(P: DiffOp, basis: NamedBasis) -> Optional[Fraction]:
    """Grade of P under ad z_0, normalised so that z_p1 has grade 1."""
    cartan = basis["z_0"]
    reference = adjoint_eigenvalue(cartan, basis["z_p1"])
    if reference is None or reference.is_zero():
        raise ValueError("z_p1 is not an ad z_0 eigenvector with nonzero weight")
    if P.is_zero():
        return None
    weight = adjoint_eigenvalue(cartan, P)
    if weight is None:
        return None
    ratio = weight * reference.inverse()
    if ratio.is_zero():
        return Fraction(0)
    if len(ratio.terms) != 1 or not ratio.terms[0].mono.is_one():
        return None
    return ratio.terms[0].coeff


def adjoint_grades(basis: NamedBasis) -> dict[str, Optional[Fraction]]:
    return {g.name: adjoint_grade(g.op, basis) for g in basis}
