"""On-shell symmetries: [g, Omega] = f_g * Omega and membership in the left ideal of Omega."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from schrodinger.diffop import DiffOp, bracket, check_reducer, reduce_mod
from schrodinger.reps import NamedBasis, RepCase
from schrodinger.ring import RingElement

# Where the printed formulas hold only after nu = -1/(4a).
SPECIAL_NU = Fraction(-1, 4) * RingElement.symbol("a").inverse()


@dataclass(frozen=True)
class OnShellFactor:
    name: str
    factor: RingElement
    residual_zero: bool = True


@dataclass(frozen=True)
class PrintedIdentity:
    """[generator, Omega] written in the enlarged basis and as f * Omega.

    ``abstract`` and ``factor`` are the forms the engine verifies. The
    ``printed_*`` fields keep the published forms where they differ.
    """

    case: RepCase
    generator: str
    abstract: str
    factor: str
    printed_abstract: Optional[str] = None
    printed_factor: Optional[str] = None
    at_special_nu: bool = False


PRINTED_IDENTITIES = (
    PrintedIdentity(RepCase.CONSTANT, "z_0", "-z_p1 - a/2*w_p1", "-1"),
    PrintedIdentity(RepCase.CONSTANT, "z_m1", "-2*z_0 - a*w_0s", "-2*t"),
    PrintedIdentity(RepCase.LINEAR, "z_p1", "2*z_0 + a*w_0s", "-2*t", printed_factor="2*t"),
    PrintedIdentity(RepCase.LINEAR, "z_0", "z_m1 + a/2*w_m1", "1"),
    PrintedIdentity(
        RepCase.QUADRATIC,
        "z_p1",
        "-4*a*nu*(z_p1 + a/2*w_p1)",
        "-4*a*nu*exp(4*a*nu*t)",
        printed_abstract="z_p1 + 1/2*w_p1",
        printed_factor="exp(-t)",
        at_special_nu=True,
    ),
    PrintedIdentity(
        RepCase.QUADRATIC,
        "z_m1",
        "4*a*nu*(z_m1 + a/2*w_m1)",
        "4*a*nu*exp(-4*a*nu*t)",
        printed_abstract="-z_m1 - a/2*w_m1",
        printed_factor="-exp(t)",
        at_special_nu=True,
    ),
)


def onshell_factor(g: DiffOp, omega: DiffOp, name: str = "g") -> Optional[OnShellFactor]:
    """f with [g, omega] == f * omega, read off the Dt coefficient; None if there is none."""
    check_reducer(omega)
    commutator = bracket(g, omega)
    f = commutator.coefficient(1, 0)
    if not (commutator - f * omega).is_zero():
        logging.debug(f"[onshell] {name}: [g, Omega] is not a multiple of Omega")
        return None
    return OnShellFactor(name, f)


def is_onshell_symmetry(D: DiffOp, omega: DiffOp) -> bool:
    return reduce_mod(omega * D, omega).remainder.is_zero()


@dataclass(frozen=True)
class IdentityCheck:
    identity: PrintedIdentity
    abstract_holds: bool
    factor_holds: bool
    printed_abstract_holds: Optional[bool] = None
    printed_factor_holds: Optional[bool] = None

    @property
    def holds(self) -> bool:
        return self.abstract_holds and self.factor_holds


@dataclass(frozen=True)
class GeneratorReport:
    name: str
    vanishes: bool
    factor: Optional[OnShellFactor]
    # Omega o g lies in the left ideal of Omega; true for products of symmetries without a factor.
    symmetry: bool = True


@dataclass
class OnShellReport:
    generators: list[GeneratorReport]
    identities: list[IdentityCheck] = field(default_factory=list)
    unclosed_pairs: list[tuple[str, str]] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return (
            all(g.symmetry for g in self.generators)
            and all(check.holds for check in self.identities)
            and not self.unclosed_pairs
        )


def _evaluate(text: str, basis: NamedBasis, omega: DiffOp) -> DiffOp:
    from schrodinger.expr import parse_expr

    env = basis.as_env()
    env["Omega"] = omega
    return parse_expr(text, env)


def check_identity(identity: PrintedIdentity, basis: NamedBasis, omega: DiffOp) -> IdentityCheck:
    lhs = bracket(basis[identity.generator], omega)
    abstract = _evaluate(identity.abstract, basis, omega)
    factor = _evaluate(identity.factor, basis, omega) * omega
    printed = {}
    if identity.printed_abstract or identity.printed_factor:
        special_basis, special_omega, special_lhs = basis, omega, lhs
        if identity.at_special_nu:
            special_basis = basis.substitute("nu", SPECIAL_NU)
            special_omega = omega.substitute("nu", SPECIAL_NU)
            special_lhs = lhs.substitute("nu", SPECIAL_NU)
        for key in ("printed_abstract", "printed_factor"):
            text = getattr(identity, key)
            if text is None:
                continue
            rhs = _evaluate(text, special_basis, special_omega)
            if key == "printed_factor":
                rhs = rhs * special_omega
            printed[f"{key}_holds"] = special_lhs == rhs
    check = IdentityCheck(identity, lhs == abstract, lhs == factor, **printed)
    logging.debug(f"[onshell] [{identity.generator}, Omega] = {identity.abstract}: {check.holds}")
    return check


def factor_closure(
    basis: NamedBasis, omega: DiffOp, names: Optional[list[str]] = None
) -> list[tuple[str, str]]:
    """Pairs whose bracket is not an on-shell symmetry with a factor."""
    names = basis.names if names is None else names
    failing = []
    for i, left in enumerate(names):
        for right in names[i:]:
            if onshell_factor(bracket(basis[left], basis[right]), omega) is None:
                failing.append((left, right))
    return failing


def onshell_report(
    basis: NamedBasis,
    omega: DiffOp,
    case: Optional[RepCase] = None,
    only: Optional[str] = None,
    with_pairs: bool = True,
) -> OnShellReport:
    generators = []
    for g in basis:
        if only is not None and g.name != only:
            continue
        vanishes = bracket(g.op, omega).is_zero()
        factor = onshell_factor(g.op, omega, g.name)
        symmetry = factor is not None or is_onshell_symmetry(g.op, omega)
        generators.append(GeneratorReport(g.name, vanishes, factor, symmetry))
    if only is not None and not generators:
        raise KeyError(f"unknown generator '{only}'")
    identities = []
    if case is not None:
        identities = [
            check_identity(identity, basis, omega)
            for identity in PRINTED_IDENTITIES
            if identity.case is RepCase(case) and (only is None or identity.generator == only)
        ]
    unclosed = []
    if with_pairs and only is None:
        unclosed = factor_closure(basis, omega)
    report = OnShellReport(generators, identities, unclosed)
    logging.info(
        f"[onshell] {len(generators)} generators, "
        f"{sum(not g.vanishes for g in generators)} with nonzero [g, Omega], "
        f"identities {'hold' if report.holds else 'fail'}"
    )
    return report
