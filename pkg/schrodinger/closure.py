"""Structure constants by exact linear algebra over the field Q(a, nu, ...).

Brackets of generators are expanded back into the basis. Coefficients must be
free of t, x and exponentials; a bracket that needs such coefficients is
reported as a failure with the offending piece as certificate.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Callable, Optional, Union

from sympy.polys.fields import FracElement, FracField

from schrodinger.diffop import Bracket, bracket
from schrodinger.fracpoly import (
    current_field,
    fracpoly_to_ring,
    from_scalar,
    from_term,
    numerator_and_denominator,
    substitute_fracpoly,
)
from schrodinger.reps import NamedBasis, Parity
from schrodinger.ring import RingElement, scalar_parts

Expansion = list[tuple[FracElement, str]]


class Kind(enum.Enum):
    LIE = "lie"
    SUPER = "super"


@dataclass(frozen=True)
class NotInSpan:
    certificate: object
    reason: str

    def __str__(self) -> str:
        return f"not in span: {self.reason}: {self.certificate}"


def bracket_kind(kind: Kind, left: Parity, right: Parity) -> Bracket:
    if Kind(kind) is Kind.SUPER and left is Parity.ODD and right is Parity.ODD:
        return Bracket.ANTICOMMUTATOR
    return Bracket.COMMUTATOR


def _vector(op, scalars: FracField) -> dict[tuple, FracElement]:
    vec: dict[tuple, FracElement] = {}
    for key, coeff, mono in op.key_expansion():
        vec[key] = vec.get(key, scalars.zero) + from_term(coeff, mono, scalars)
    return {key: value for key, value in vec.items() if value != 0}


def express_in_basis(target, basis: NamedBasis) -> Union[Expansion, NotInSpan]:
    """Coefficients c_i in Q(symbols) with target == sum c_i * g_i, or NotInSpan.

    Elimination is fraction free, pivots are taken column by column in basis
    order, and free columns get coefficient zero, so a dependent basis
    expands onto the earliest generators.
    """
    scalars = current_field()
    columns = [_vector(g.op, scalars) for g in basis]
    rhs = _vector(target, scalars)
    keys = sorted(set(rhs).union(*[set(c) for c in columns]))

    missing = [key for key in rhs if all(key not in c for c in columns)]
    if missing:
        return NotInSpan(target.piece(min(missing)), "no generator carries this term")

    rows = [[c.get(key, scalars.zero) for c in columns] + [rhs.get(key, scalars.zero)] for key in keys]
    row_keys = list(keys)
    n = len(columns)
    pivots: list[tuple[int, int]] = []
    previous = scalars.one
    r = 0
    for col in range(n):
        found = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if found is None:
            continue
        rows[r], rows[found] = rows[found], rows[r]
        row_keys[r], row_keys[found] = row_keys[found], row_keys[r]
        pivot = rows[r][col]
        for i in range(len(rows)):
            if i == r:
                continue
            factor = rows[i][col]
            rows[i] = [(pivot * rows[i][j] - factor * rows[r][j]) / previous for j in range(n + 1)]
        previous = pivot
        pivots.append((r, col))
        r += 1

    for i in range(r, len(rows)):
        if rows[i][n] != 0:
            return NotInSpan(target.piece(row_keys[i]), "inconsistent with the generators")

    solution = [scalars.zero] * n
    for row, col in pivots:
        solution[col] = rows[row][n] / rows[row][col]
    names = basis.names
    return [(c, names[i]) for i, c in enumerate(solution) if c != 0]


def reconstruct(expansion: Expansion, basis: NamedBasis):
    """sum c_i * g_i with denominators cleared: returns (common denominator, operator)."""
    scalars = current_field()
    common = RingElement.one()
    for c, _ in expansion:
        common = common * numerator_and_denominator(c)[1]
    cleared = from_scalar(common, scalars)
    total = None
    for c, name in expansion:
        term = fracpoly_to_ring(c * cleared) * basis[name]
        total = term if total is None else total + term
    return common, total


def verify_expansion(target, expansion: Expansion, basis: NamedBasis) -> bool:
    """denominator * target == cleared sum, checked on operators."""
    denominator, total = reconstruct(expansion, basis)
    if total is None:
        return target.is_zero()
    return denominator * target == total


@dataclass
class StructureTable:
    names: list[str]
    parities: dict[str, Parity]
    kind: Kind
    entries: dict[tuple[str, str], tuple[Bracket, Expansion]] = field(default_factory=dict)
    failures: list[tuple[str, str, str]] = field(default_factory=list)

    def closes(self) -> bool:
        return not self.failures

    def pairs(self) -> list[tuple[str, str]]:
        return [(self.names[i], self.names[j]) for i, j in combinations_with_replacement(range(len(self.names)), 2)]

    def bracket_of(self, left: str, right: str) -> Bracket:
        return bracket_kind(self.kind, self.parities[left], self.parities[right])

    def coefficients(self, left: str, right: str) -> Expansion:
        """Expansion of [left, right} using graded antisymmetry for the reversed order."""
        if (left, right) in self.entries:
            return self.entries[(left, right)][1]
        if (right, left) not in self.entries:
            raise KeyError(f"no entry for ({left}, {right})")
        expansion = self.entries[(right, left)][1]
        symmetric = self.bracket_of(left, right) is Bracket.ANTICOMMUTATOR
        return expansion if symmetric else [(-c, name) for c, name in expansion]

    def nonvanishing(self) -> list[tuple[str, str, Bracket, Expansion]]:
        return [
            (i, j, kind, expansion)
            for (i, j), (kind, expansion) in self.entries.items()
            if expansion
        ]

    def specialize(self, name: str, value: object) -> "StructureTable":
        coeff, mono = scalar_parts(value)
        table = StructureTable(list(self.names), dict(self.parities), self.kind, failures=list(self.failures))
        for pair, (kind, expansion) in self.entries.items():
            specialized = [(substitute_fracpoly(c, name, coeff, mono), g) for c, g in expansion]
            table.entries[pair] = (kind, [(c, g) for c, g in specialized if c != 0])
        return table

    def compare(self, other: "StructureTable") -> list[tuple[str, str, Expansion, Expansion]]:
        """Pairs over the shared names whose expansions differ."""
        shared = [n for n in self.names if n in other.names]
        mismatches = []
        for i, left in enumerate(shared):
            for right in shared[i:]:
                mine = dict((g, c) for c, g in self.coefficients(left, right))
                theirs = dict((g, c) for c, g in other.coefficients(left, right))
                if mine != theirs:
                    mismatches.append((left, right, self.coefficients(left, right), other.coefficients(left, right)))
        return mismatches

    def to_json(self) -> dict:
        from schrodinger.expr import format_scalar

        data = {"basis": list(self.names), "kind": self.kind.value}
        if self.kind is Kind.SUPER:
            data["parity"] = {name: str(self.parities[name]) for name in self.names}
        data["entries"] = [
            {
                "i": i,
                "j": j,
                "bracket": kind.value,
                "result": [{"coeff": format_scalar(c), "gen": g} for c, g in expansion],
            }
            for (i, j), (kind, expansion) in self.entries.items()
        ]
        data["failures"] = [{"i": i, "j": j, "certificate": cert} for i, j, cert in self.failures]
        return data


BracketFn = Callable[[object, object, Bracket], object]


def closure_table(basis: NamedBasis, kind: Kind = Kind.LIE, bracket_fn: BracketFn = bracket) -> StructureTable:
    kind = Kind(kind)
    table = StructureTable(basis.names, basis.parities(), kind)
    for left, right in table.pairs():
        which = table.bracket_of(left, right)
        result = bracket_fn(basis[left], basis[right], which)
        expansion = express_in_basis(result, basis)
        if isinstance(expansion, NotInSpan):
            logging.debug(f"[closure] ({left}, {right}) {expansion}")
            table.failures.append((left, right, str(expansion.certificate)))
            continue
        table.entries[(left, right)] = (which, expansion)
    logging.info(
        f"[closure] {kind.value} table over {len(basis)} generators: "
        f"{len(table.nonvanishing())} nonvanishing, {len(table.failures)} failures"
    )
    return table


@dataclass(frozen=True)
class JacobiResult:
    holds: bool
    checked: int
    violation: Optional[tuple[str, str, str]] = None


def _sign(p: Parity, q: Parity) -> int:
    return -1 if (p is Parity.ODD and q is Parity.ODD) else 1


def _jacobi_from_table(table: StructureTable) -> JacobiResult:
    """Graded Jacobi on structure constants:
    (-1)^{|A||C|}[A,[B,C]} + (-1)^{|B||A|}[B,[C,A]} + (-1)^{|C||B|}[C,[A,B]} = 0.
    """
    par = table.parities if table.kind is Kind.SUPER else {n: Parity.EVEN for n in table.names}
    scalars = current_field()
    checked = 0

    def nested(x: str, y: str, z: str) -> dict[str, FracElement]:
        out: dict[str, FracElement] = {}
        for c, w in table.coefficients(y, z):
            for d, v in table.coefficients(x, w):
                out[v] = out.get(v, scalars.zero) + c * d
        return out

    for A, B, C in combinations_with_replacement(table.names, 3):
        total: dict[str, FracElement] = {}
        for (x, y, z), s in (
            ((A, B, C), _sign(par[A], par[C])),
            ((B, C, A), _sign(par[B], par[A])),
            ((C, A, B), _sign(par[C], par[B])),
        ):
            for g, c in nested(x, y, z).items():
                total[g] = total.get(g, scalars.zero) + s * c
        checked += 1
        if any(c != 0 for c in total.values()):
            return JacobiResult(False, checked, (A, B, C))
    return JacobiResult(True, checked)


def _jacobi_from_basis(basis: NamedBasis, kind: Kind, bracket_fn: BracketFn) -> JacobiResult:
    par = basis.parities() if Kind(kind) is Kind.SUPER else {n: Parity.EVEN for n in basis.names}
    inner: dict[tuple[str, str], object] = {}

    def graded(x, px: Parity, y, py: Parity):
        return bracket_fn(x, y, bracket_kind(Kind.SUPER, px, py))

    def pair(y: str, z: str):
        if (y, z) not in inner:
            inner[(y, z)] = graded(basis[y], par[y], basis[z], par[z])
        return inner[(y, z)]

    def parity_of(y: str, z: str) -> Parity:
        return Parity(par[y] ^ par[z])

    checked = 0
    for A, B, C in combinations_with_replacement(basis.names, 3):
        total = None
        for (x, y, z), s in (
            ((A, B, C), _sign(par[A], par[C])),
            ((B, C, A), _sign(par[B], par[A])),
            ((C, A, B), _sign(par[C], par[B])),
        ):
            term = graded(basis[x], par[x], pair(y, z), parity_of(y, z))
            term = term if s == 1 else -term
            total = term if total is None else total + term
        checked += 1
        if not total.is_zero():
            return JacobiResult(False, checked, (A, B, C))
    return JacobiResult(True, checked)


def jacobi_check(
    source: Union[StructureTable, NamedBasis],
    kind: Optional[Kind] = None,
    bracket_fn: BracketFn = bracket,
) -> JacobiResult:
    """Brute-force (graded) Jacobi identity over all unordered triples."""
    if isinstance(source, StructureTable):
        if not source.closes():
            raise ValueError("Jacobi check on a table that does not close")
        result = _jacobi_from_table(source)
    else:
        result = _jacobi_from_basis(source, kind or Kind.LIE, bracket_fn)
    logging.debug(f"[closure] Jacobi over {result.checked} triples: {'holds' if result.holds else result.violation}")
    return result


@dataclass(frozen=True)
class OddPair:
    left: str
    right: str
    commutator: Expansion
    anticommutator: Expansion
    commutator_central: bool
    anticommutator_even: bool


@dataclass
class DualityReport:
    lie: StructureTable
    super: StructureTable
    disagreements: list[tuple[str, str]]
    odd_pairs: list[OddPair]

    @property
    def holds(self) -> bool:
        return (
            self.lie.closes()
            and self.super.closes()
            and not self.disagreements
            and all(p.commutator_central and p.anticommutator_even for p in self.odd_pairs)
        )


def duality_check(basis: NamedBasis, parity: Optional[dict[str, Parity]] = None) -> DualityReport:
    """Both a Lie and a super structure on one set of operators."""
    if parity is not None:
        basis = basis.with_parity(parity)
    lie = closure_table(basis, Kind.LIE)
    sup = closure_table(basis, Kind.SUPER)
    unit = basis.unit_name()
    disagreements = []
    odd_pairs = []
    for left, right in lie.pairs():
        odd = basis.parity(left) is Parity.ODD and basis.parity(right) is Parity.ODD
        in_lie = (left, right) in lie.entries
        in_super = (left, right) in sup.entries
        if not odd:
            if in_lie and in_super and lie.entries[(left, right)] != sup.entries[(left, right)]:
                disagreements.append((left, right))
            continue
        comm = lie.entries[(left, right)][1] if in_lie else []
        anti = sup.entries[(left, right)][1] if in_super else []
        odd_pairs.append(
            OddPair(
                left,
                right,
                comm,
                anti,
                commutator_central=in_lie and all(g == unit for _, g in comm),
                anticommutator_even=in_super and all(basis.parity(g) is Parity.EVEN for _, g in anti),
            )
        )
    report = DualityReport(lie, sup, disagreements, odd_pairs)
    logging.info(f"[closure] duality {'holds' if report.holds else 'fails'}")
    return report
