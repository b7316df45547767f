"""Oscillator spectrum from a Gaussian vacuum and a ladder operator.

The vacuum is found by substituting exp(lam*t + beta*x^2) into Omega; the
branch kept is the one annihilated by w_p. Excited states come from repeated
application of w_m and are verified exactly against Omega.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional

from schrodinger import DEFAULT_SEED, SAMPLE_VALUES
from schrodinger.diffop import DiffOp, apply
from schrodinger.numeric import residual
from schrodinger.ring import ExpArg, Monomial, RingElement, RingTerm


def _scalar_term(element: RingElement, what: str) -> tuple[Fraction, Monomial]:
    if element.is_zero():
        return Fraction(0), Monomial()
    if len(element.terms) != 1 or not element.terms[0].is_scalar():
        raise ValueError(f"{what} must be a single rational-times-monomial term, got {element}")
    term = element.terms[0]
    return term.coeff, term.mono


def _fraction_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    num, den = isqrt(value.numerator), isqrt(value.denominator)
    if num * num != value.numerator or den * den != value.denominator:
        return None
    return Fraction(num, den)


def monomial_sqrt(coeff: Fraction, mono: Monomial) -> Optional[tuple[Fraction, Monomial]]:
    root = _fraction_sqrt(coeff)
    if root is None or any(exp % 2 for _, exp in mono.powers):
        return None
    return root, Monomial.from_dict({name: exp // 2 for name, exp in mono.powers})


def _split_omega(omega: DiffOp) -> tuple[RingElement, RingElement, RingElement]:
    """Read omega = Dt + A*Dx^2 + C*x^2 + D, returning (A, C, D)."""
    keys = {(dt, dx) for dt, dx, _ in omega.entries}
    if omega.coefficient(1, 0) != RingElement.one() or not keys <= {(1, 0), (0, 2), (0, 0)}:
        raise ValueError(f"expected Dt + A*Dx^2 + C*x^2 + D, got {omega}")
    A = omega.coefficient(0, 2)
    if A.is_zero() or not A.is_scalar():
        raise ValueError(f"Dx^2 coefficient must be a nonzero scalar, got {A}")
    C_terms, D_terms = [], []
    for term in omega.coefficient(0, 0).terms:
        if term.tdeg or not term.exp.is_zero() or term.xdeg not in (0, 2):
            raise ValueError(f"potential term outside C*x^2 + D in {omega}")
        bare = RingTerm(term.coeff, term.mono)
        (C_terms if term.xdeg == 2 else D_terms).append(bare)
    return A, RingElement.from_terms(C_terms), RingElement.from_terms(D_terms)


def gaussian_vacuum_ansatz(omega: DiffOp) -> list[tuple[RingElement, RingElement]]:
    """Exact (lam, beta) with omega exp(lam*t + beta*x^2) = 0, positive root first.

    The x^2 part gives 4*A*beta^2 + C = 0 and the constant part lam + 2*A*beta + D = 0.
    """
    A, C, D = _split_omega(omega)
    _scalar_term(A, "Dx^2 coefficient")
    _scalar_term(C, "x^2 coefficient")
    _scalar_term(D, "constant term")
    square = -C * (4 * A).inverse()
    if square.is_zero():
        roots = [RingElement.zero()]
    else:
        coeff, mono = _scalar_term(square, "beta^2")
        root = monomial_sqrt(coeff, mono)
        if root is None:
            raise ValueError(f"beta^2 = {square} has no exact square root")
        beta = RingElement((RingTerm(*root),))
        roots = [beta, -beta]
    solutions = []
    for beta in roots:
        lam = -(2 * A * beta) - D
        if (lam, beta) not in solutions:
            solutions.append((lam, beta))
    logging.debug(f"[spectrum] {len(solutions)} Gaussian branch(es)")
    return solutions


def gaussian(lam: RingElement, beta: RingElement) -> RingElement:
    entries = []
    for value, base in ((lam, "t"), (beta, "x2")):
        for term in value.terms:
            entries.append((term.coeff, term.mono, base))
    return RingElement.exponential(ExpArg.build(entries))


@dataclass(frozen=True)
class VacuumSolution:
    lam: RingElement
    beta: RingElement
    psi: RingElement
    annihilator: DiffOp
    ladder: DiffOp
    omega: Optional[DiffOp] = None


@dataclass(frozen=True)
class LadderState:
    n: int
    psi: RingElement
    eigenvalue: Optional[RingElement]
    polynomial: RingElement


def select_fock_branch(
    solutions: list[tuple[RingElement, RingElement]],
    w_plus: DiffOp,
    w_minus: DiffOp,
    omega: Optional[DiffOp] = None,
) -> VacuumSolution:
    """The unique branch annihilated by w_plus; w_minus becomes the ladder."""
    passing = [(lam, beta) for lam, beta in solutions if apply(w_plus, gaussian(lam, beta)).is_zero()]
    if len(passing) != 1:
        raise ValueError(
            f"{len(passing)} Gaussian branches are annihilated by w_p; expected exactly one"
        )
    lam, beta = passing[0]
    logging.info(f"[spectrum] Fock vacuum exp(({lam})*t + ({beta})*x^2)")
    return VacuumSolution(lam, beta, gaussian(lam, beta), w_plus, w_minus, omega)


def eigenvalue_of(P: DiffOp, psi: RingElement) -> Optional[RingElement]:
    """mu with P psi == mu * psi, or None when psi is not an eigenfunction."""
    if psi.is_zero():
        raise ValueError("eigenvalue of the zero function")
    mu = apply(P, psi).ratio_to(psi)
    if mu is None or not mu.is_scalar() or len(mu.terms) > 1:
        return None
    return mu


def ladder(vac: VacuumSolution, n_max: int, cartan: Optional[DiffOp] = None) -> list[LadderState]:
    """States (w_m)^n psi_vac for n = 0..n_max, each checked against Omega."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    cartan = cartan if cartan is not None else DiffOp.dt()
    states = []
    psi = vac.psi
    for n in range(n_max + 1):
        if n:
            psi = apply(vac.ladder, psi)
        if vac.omega is not None and not apply(vac.omega, psi).is_zero():
            raise ArithmeticError(f"state {n} does not solve Omega psi = 0")
        states.append(LadderState(n, psi, eigenvalue_of(cartan, psi), psi.strip_exp()))
    logging.info(f"[spectrum] built {len(states)} ladder states")
    return states


def highest_weight_check(vac: VacuumSolution, w_0: DiffOp) -> bool:
    """The Fock vacuum is also annihilated by an odd generator and diagonal under w_0."""
    return apply(vac.annihilator, vac.psi).is_zero() and eigenvalue_of(w_0, vac.psi) is not None


def numeric_residual(
    psi: RingElement,
    omega: DiffOp,
    samples: int = 20,
    seed: int = DEFAULT_SEED,
    env=SAMPLE_VALUES,
    h: float = 1e-3,
) -> float:
    return residual(psi, omega, samples=samples, seed=seed, env=env, h=h)
