"""Graded 2x2 matrix operators acting on the (phi, psi) column of a (1,1) multiplet.

Row index is the output field, column index the input field. Odd operators
swap phi and psi, even ones are diagonal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

import sympy

from schrodinger.closure import Kind, NotInSpan, StructureTable, closure_table, express_in_basis
from schrodinger.diffop import Bracket, DiffOp, apply as apply_op
from schrodinger.fracpoly import constant_value
from schrodinger.reps import Generator, NamedBasis, Parity
from schrodinger.ring import ExpArg, Monomial, RingElement


@dataclass(frozen=True)
class MatrixOp:
    entries: tuple[tuple[DiffOp, DiffOp], tuple[DiffOp, DiffOp]]
    parity: Parity

    def __post_init__(self):
        for row in self.entries:
            for op in row:
                if not op.is_t_only():
                    raise ValueError(f"matrix entries must act in t only, got {op}")
        (pp, ps), (sp, ss) = self.entries
        if self.parity is Parity.EVEN and not (ps.is_zero() and sp.is_zero()):
            raise ValueError("even matrix operator with off-diagonal entries")
        if self.parity is Parity.ODD and not (pp.is_zero() and ss.is_zero()):
            raise ValueError("odd matrix operator with diagonal entries")

    @classmethod
    def diagonal(cls, phi: object, psi: object) -> "MatrixOp":
        zero = DiffOp.zero()
        return cls(((DiffOp.coerce(phi), zero), (zero, DiffOp.coerce(psi))), Parity.EVEN)

    @classmethod
    def off_diagonal(cls, phi_from_psi: object, psi_from_phi: object) -> "MatrixOp":
        zero = DiffOp.zero()
        return cls(((zero, DiffOp.coerce(phi_from_psi)), (DiffOp.coerce(psi_from_phi), zero)), Parity.ODD)

    @classmethod
    def zero(cls, parity: Parity = Parity.EVEN) -> "MatrixOp":
        z = DiffOp.zero()
        return cls(((z, z), (z, z)), parity)

    def entry(self, row: int, col: int) -> DiffOp:
        return self.entries[row][col]

    def is_zero(self) -> bool:
        return all(op.is_zero() for row in self.entries for op in row)

    def _combine(self, other: "MatrixOp", sign: int) -> "MatrixOp":
        if self.parity is not other.parity and not (self.is_zero() or other.is_zero()):
            raise ValueError("cannot add operators of different parity")
        parity = other.parity if self.is_zero() else self.parity
        rows = tuple(
            tuple(a + sign * b for a, b in zip(row_a, row_b))
            for row_a, row_b in zip(self.entries, other.entries)
        )
        return MatrixOp(rows, parity)

    def __add__(self, other: object) -> "MatrixOp":
        if not isinstance(other, MatrixOp):
            return NotImplemented
        return self._combine(other, 1)

    def __sub__(self, other: object) -> "MatrixOp":
        if not isinstance(other, MatrixOp):
            return NotImplemented
        return self._combine(other, -1)

    def __neg__(self) -> "MatrixOp":
        return MatrixOp(tuple(tuple(-op for op in row) for row in self.entries), self.parity)

    def __mul__(self, other: object) -> "MatrixOp":
        if isinstance(other, MatrixOp):
            return compose(self, other)
        return NotImplemented

    def __rmul__(self, other: object) -> "MatrixOp":
        try:
            scalar = RingElement.coerce(other)
        except TypeError:
            return NotImplemented
        return MatrixOp(tuple(tuple(scalar * op for op in row) for row in self.entries), self.parity)

    def apply(self, column: tuple[object, object]) -> tuple[RingElement, RingElement]:
        return tuple(
            apply_op(self.entries[r][0], column[0]) + apply_op(self.entries[r][1], column[1]) for r in range(2)
        )

    def key_expansion(self):
        for r in range(2):
            for c in range(2):
                for key, coeff, mono in self.entries[r][c].key_expansion():
                    yield (r, c) + key, coeff, mono

    def piece(self, key: tuple) -> "MatrixOp":
        r, c = key[:2]
        rows = [[DiffOp.zero(), DiffOp.zero()], [DiffOp.zero(), DiffOp.zero()]]
        rows[r][c] = self.entries[r][c].piece(key[2:])
        return MatrixOp(tuple(tuple(row) for row in rows), Parity.EVEN if r == c else Parity.ODD)

    def substitute(self, name: str, value: object) -> "MatrixOp":
        return MatrixOp(tuple(tuple(op.substitute(name, value) for op in row) for row in self.entries), self.parity)

    def __str__(self) -> str:
        (pp, ps), (sp, ss) = self.entries
        return f"[[{pp}, {ps}], [{sp}, {ss}]]"


def compose(A: MatrixOp, B: MatrixOp) -> MatrixOp:
    rows = tuple(
        tuple(A.entries[r][0] * B.entries[0][c] + A.entries[r][1] * B.entries[1][c] for c in range(2))
        for r in range(2)
    )
    return MatrixOp(rows, Parity(A.parity ^ B.parity))


def graded_matrix_bracket(A: MatrixOp, B: MatrixOp, kind: Optional[Bracket] = None) -> MatrixOp:
    """Anticommutator of two odd operators, commutator otherwise."""
    if kind is None:
        both_odd = A.parity is Parity.ODD and B.parity is Parity.ODD
        kind = Bracket.ANTICOMMUTATOR if both_odd else Bracket.COMMUTATOR
    if kind is Bracket.ANTICOMMUTATOR:
        return A * B + B * A
    return A * B - B * A


def _e(rate: int) -> RingElement:
    return RingElement.exponential(ExpArg.build([(Fraction(rate), Monomial(), "t")]))


SIGMA_NAMES = ("Qp", "Qm", "Zp", "Zm", "H")


def build_n1_hyperbolic() -> NamedBasis:
    """Q+-, Z+- and H of the hyperbolic (1,1) model, in the order Qp, Qm, Zp, Zm, H."""
    Dt = DiffOp.dt()
    ops = {
        "Qp": MatrixOp.off_diagonal(_e(1), _e(1) * (Dt - 1)),
        "Qm": MatrixOp.off_diagonal(_e(-1), _e(-1) * (Dt + 1)),
        "Zp": MatrixOp.diagonal(_e(2) * (Dt - 1), _e(2) * Dt),
        "Zm": MatrixOp.diagonal(_e(-2) * (Dt + 1), _e(-2) * Dt),
        "H": MatrixOp.diagonal(Dt, Dt),
    }
    return NamedBasis(Generator(name, ops[name], ops[name].parity) for name in SIGMA_NAMES)


def sigma_closure_table(basis: Optional[NamedBasis] = None) -> StructureTable:
    basis = basis or build_n1_hyperbolic()
    table = closure_table(basis, Kind.SUPER, bracket_fn=graded_matrix_bracket)
    logging.info(f"[sigma] osp(1|2) table {'closes' if table.closes() else 'fails'}")
    return table


@dataclass(frozen=True)
class EomOperator:
    """Euler-Lagrange operators diag(Dt^2 - eps, Dt) of the (1,1) action."""

    eps: int = 1

    def __post_init__(self):
        if self.eps not in (1, 0, -1):
            raise ValueError(f"eps must be 1, 0 or -1, got {self.eps}")

    @property
    def matrix(self) -> MatrixOp:
        return MatrixOp.diagonal(DiffOp.dt(2) - self.eps, DiffOp.dt())

    def reduce(self, op: DiffOp, column: int) -> DiffOp:
        """Use the equation of motion of the input field: phi'' = eps*phi, psi' = 0."""
        if column == 1:
            return DiffOp.from_entries((dt, dx, c) for dt, dx, c in op.entries if dt == 0)
        while op.order_t() >= 2:
            top = op.order_t()
            lowered = [(dt - 2, dx, self.eps * c) for dt, dx, c in op.entries if dt == top]
            rest = [(dt, dx, c) for dt, dx, c in op.entries if dt != top]
            op = DiffOp.from_entries(rest + lowered)
        return op


def eom_onshell_check(G: MatrixOp, E: EomOperator) -> bool:
    """E o G vanishes on solutions of E."""
    product = E.matrix * G
    residual = [E.reduce(product.entry(r, c), c) for r in range(2) for c in range(2)]
    holds = all(op.is_zero() for op in residual)
    logging.debug(f"[sigma] eps={E.eps}: {'on-shell' if holds else 'not on-shell'}")
    return holds


@dataclass(frozen=True)
class SquareCertificate:
    target: str
    equations: list[str]
    satisfiable: bool
    solutions: list[tuple[Fraction, Fraction]]
    cross: list[tuple[Fraction, str]]

    def __str__(self) -> str:
        verdict = "SATISFIABLE" if self.satisfiable else "UNSATISFIABLE"
        text = f"{verdict}: {', '.join(self.equations)}"
        if self.satisfiable:
            sols = "; ".join(f"alpha={a}, beta={b}" for a, b in self.solutions)
            text += f" ({sols})"
        return text


_MONOMIALS = ("alpha^2", "beta^2", "alpha*beta")


def _format_equation(coeffs: dict[str, Fraction], rhs: Fraction) -> str:
    parts = []
    for mono in _MONOMIALS:
        c = coeffs.get(mono, Fraction(0))
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        body = mono if abs(c) == 1 else f"{abs(c)}*{mono}"
        parts.append((sign, body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return f"{text}={rhs}"


def _normalize(coeffs: dict[str, Fraction], rhs: Fraction) -> tuple[dict[str, Fraction], Fraction]:
    values = list(coeffs.values()) + [rhs]
    den = 1
    for v in values:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in values]
    g = 0
    for i in ints:
        g = gcd(g, i)
    lead = next(v for v in (coeffs.get(m, Fraction(0)) for m in _MONOMIALS) if v)
    scale = Fraction(den, g) * (1 if lead > 0 else -1)
    return {m: c * scale for m, c in coeffs.items()}, rhs * scale


def hamiltonian_square_search(
    target: str = "H",
    table: Optional[StructureTable] = None,
    odd: tuple[str, str] = ("Qp", "Qm"),
) -> SquareCertificate:
    """Rational alpha, beta with (alpha*Qp + beta*Qm)^2 == target, i.e. {X, X} = 2*target."""
    table = table or sigma_closure_table()
    if not table.closes():
        raise ValueError("square search needs a closed table")
    if target != "0" and target not in table.names:
        raise KeyError(f"unknown generator '{target}'")
    qp, qm = odd
    products = {
        "alpha^2": table.coefficients(qp, qp),
        "beta^2": table.coefficients(qm, qm),
        "alpha*beta": [(2 * c, g) for c, g in table.coefficients(qp, qm)],
    }
    gens = sorted({g for expansion in products.values() for _, g in expansion} | ({target} - {"0"}),
                  key=table.names.index)
    alpha, beta = sympy.symbols("alpha beta")
    symbolic = {"alpha^2": alpha**2, "beta^2": beta**2, "alpha*beta": alpha * beta}
    rows = []
    for g in gens:
        coeffs = {}
        for mono, expansion in products.items():
            for c, name in expansion:
                if name == g:
                    coeffs[mono] = coeffs.get(mono, Fraction(0)) + constant_value(c)
        rhs = Fraction(2 if g == target else 0)
        coeffs = {m: c for m, c in coeffs.items() if c}
        if not coeffs:
            if rhs:
                rows.append(({}, rhs))
            continue
        rows.append(_normalize(coeffs, rhs))
    rows.sort(key=lambda row: min((_MONOMIALS.index(m) for m in row[0]), default=len(_MONOMIALS)))
    equations = [_format_equation(c, r) if c else f"0={r}" for c, r in rows]
    system = [
        sum(sympy.Rational(c.numerator, c.denominator) * symbolic[m] for m, c in coeffs.items())
        - sympy.Rational(rhs.numerator, rhs.denominator)
        for coeffs, rhs in rows
    ]
    found = sympy.solve(system, [alpha, beta], dict=True) if system else [{}]
    solutions = []
    for sol in found:
        a_val, b_val = sol.get(alpha, alpha), sol.get(beta, beta)
        if a_val.is_Rational and b_val.is_Rational:
            solutions.append((Fraction(int(a_val.p), int(a_val.q)), Fraction(int(b_val.p), int(b_val.q))))
    solutions.sort()
    cross = [(constant_value(c), g) for c, g in table.coefficients(qp, qm)]
    certificate = SquareCertificate(target, equations, bool(solutions), solutions, cross)
    logging.info(f"[sigma] square search for {target}: {certificate}")
    return certificate


def expand_in_sigma(op: MatrixOp, basis: Optional[NamedBasis] = None):
    result = express_in_basis(op, basis or build_n1_hyperbolic())
    return result if not isinstance(result, NotInSpan) else None
