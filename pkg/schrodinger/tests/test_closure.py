import unittest
from fractions import Fraction

from schrodinger.closure import (
    Kind,
    NotInSpan,
    bracket_kind,
    closure_table,
    duality_check,
    express_in_basis,
    jacobi_check,
    reconstruct,
    verify_expansion,
)
from schrodinger.diffop import Bracket, DiffOp, bracket
from schrodinger.fracpoly import from_scalar
from schrodinger.onshell import SPECIAL_NU
from schrodinger.reps import Generator, NamedBasis, Parity, RepCase, build_rep, extend_rep
from schrodinger.ring import RingElement

a = RingElement.symbol("a")
nu = RingElement.symbol("nu")


def q(value):
    """Scalar ring element as an element of the coefficient field."""
    return from_scalar(RingElement.coerce(value))


def as_dict(expansion):
    return {g: c for c, g in expansion}


class TestExpressInBasis(unittest.TestCase):
    def setUp(self):
        self.basis = build_rep(RepCase.CONSTANT)

    def test_linear_combination(self):
        target = 3 * self.basis["z_0"] - self.basis["z_p1"]
        expansion = express_in_basis(target, self.basis)
        self.assertEqual(expansion, [(q(-1), "z_p1"), (q(3), "z_0")])
        self.assertTrue(verify_expansion(target, expansion, self.basis))

    def test_symbolic_coefficients(self):
        target = a.inverse() * self.basis["w_m"] + nu * self.basis["c"]
        self.assertEqual(as_dict(express_in_basis(target, self.basis)), {"w_m": q(a.inverse()), "c": q(nu)})

    def test_zero_target(self):
        self.assertEqual(express_in_basis(DiffOp.zero(), self.basis), [])

    def test_unknown_term(self):
        result = express_in_basis(DiffOp.dx(2), self.basis)
        self.assertIsInstance(result, NotInSpan)
        self.assertEqual(result.certificate, DiffOp.dx(2))

    def test_function_coefficient_is_not_in_span(self):
        t = DiffOp.multiplication(RingElement.var("t"))
        self.assertIsInstance(express_in_basis(t * self.basis["z_p1"], self.basis), NotInSpan)

    def test_dependent_basis_uses_earliest_generator(self):
        basis = NamedBasis([Generator("p", DiffOp.dt()), Generator("q", 2 * DiffOp.dt())])
        self.assertEqual(express_in_basis(DiffOp.dt(), basis), [(q(1), "p")])

    def test_reconstruct_clears_denominators(self):
        expansion = [(q(Fraction(1, 2) * a.inverse()), "w_p")]
        denominator, total = reconstruct(expansion, self.basis)
        self.assertEqual(total, (denominator * Fraction(1, 2) * a.inverse()) * DiffOp.dx())
        self.assertTrue(verify_expansion(DiffOp.dx() * (Fraction(1, 2) * a.inverse()), expansion, self.basis))


class TestBracketKind(unittest.TestCase):
    def test_only_odd_pairs_anticommute(self):
        self.assertIs(bracket_kind(Kind.SUPER, Parity.ODD, Parity.ODD), Bracket.ANTICOMMUTATOR)
        self.assertIs(bracket_kind(Kind.SUPER, Parity.ODD, Parity.EVEN), Bracket.COMMUTATOR)
        self.assertIs(bracket_kind(Kind.LIE, Parity.ODD, Parity.ODD), Bracket.COMMUTATOR)


class TestQuadraticStructureConstants(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.table = closure_table(build_rep(RepCase.QUADRATIC), Kind.LIE)

    def test_closes(self):
        self.assertTrue(self.table.closes())

    def test_schroedinger_relations(self):
        expected = {
            ("z_p1", "z_m1"): {"z_0": q(-8 * a * nu)},
            ("z_0", "z_p1"): {"z_p1": q(4 * a * nu)},
            ("z_0", "z_m1"): {"z_m1": q(-4 * a * nu)},
            ("z_p1", "w_m"): {"w_p": q(-4 * a * nu)},
            ("z_m1", "w_p"): {"w_m": q(4 * a * nu)},
            ("z_0", "w_p"): {"w_p": q(2 * a * nu)},
            ("z_0", "w_m"): {"w_m": q(-2 * a * nu)},
            ("w_p", "w_m"): {"c": q(2 * nu)},
        }
        for (left, right), value in expected.items():
            with self.subTest(pair=(left, right)):
                self.assertEqual(as_dict(self.table.coefficients(left, right)), value)

    def test_all_other_pairs_vanish(self):
        self.assertEqual(len(self.table.nonvanishing()), 8)

    def test_json_shape(self):
        data = self.table.to_json()
        self.assertEqual(data["basis"], ["z_p1", "z_0", "z_m1", "w_p", "w_m", "c"])
        self.assertEqual(data["kind"], "lie")
        self.assertNotIn("parity", data)
        entry = next(e for e in data["entries"] if (e["i"], e["j"]) == ("w_p", "w_m"))
        self.assertEqual(entry["bracket"], "comm")
        self.assertEqual(entry["result"], [{"coeff": "2*nu", "gen": "c"}])
        self.assertEqual(data["failures"], [])

    def test_jacobi(self):
        self.assertTrue(jacobi_check(self.table).holds)


class TestSubstitutionConsistency(unittest.TestCase):
    def test_constant_and_linear_match_specialised_quadratic(self):
        reference = closure_table(build_rep(RepCase.QUADRATIC)).specialize("nu", SPECIAL_NU)
        for case in (RepCase.CONSTANT, RepCase.LINEAR):
            with self.subTest(case=case):
                table = closure_table(build_rep(case))
                self.assertTrue(table.closes())
                self.assertEqual(table.compare(reference), [])

    def test_general_nu_differs(self):
        reference = closure_table(build_rep(RepCase.QUADRATIC))
        table = closure_table(build_rep(RepCase.CONSTANT))
        self.assertNotEqual(table.compare(reference), [])


class TestEnlargedAlgebra(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.basis = extend_rep(build_rep(RepCase.QUADRATIC))
        cls.lie = closure_table(cls.basis, Kind.LIE)
        cls.super = closure_table(cls.basis, Kind.SUPER)

    def test_both_close(self):
        self.assertTrue(self.lie.closes())
        self.assertTrue(self.super.closes())

    def test_second_order_commutator(self):
        self.assertEqual(as_dict(self.lie.coefficients("w_p1", "w_m1")), {"w_0s": q(16 * nu)})
        special = self.lie.specialize("nu", SPECIAL_NU)
        self.assertEqual(as_dict(special.coefficients("w_p1", "w_m1")), {"w_0s": q(-4 * a.inverse())})

    def test_anticommutators(self):
        self.assertEqual(as_dict(self.super.coefficients("w_p", "w_p")), {"w_p1": q(1)})
        self.assertEqual(as_dict(self.super.coefficients("w_p", "w_m")), {"w_0s": q(1)})
        self.assertEqual(as_dict(self.super.coefficients("w_m", "w_p")), {"w_0s": q(1)})
        self.assertEqual(as_dict(self.super.coefficients("w_m", "w_m")), {"w_m1": q(1)})

    def test_super_json_has_parity(self):
        data = self.super.to_json()
        self.assertEqual(data["parity"]["w_p"], "odd")
        self.assertEqual(data["parity"]["w_0s"], "even")

    def test_jacobi_from_tables(self):
        self.assertTrue(jacobi_check(self.lie).holds)
        self.assertTrue(jacobi_check(self.super).holds)

    def test_duality(self):
        report = duality_check(self.basis)
        self.assertTrue(report.holds)
        pair = next(p for p in report.odd_pairs if (p.left, p.right) == ("w_p", "w_m"))
        self.assertEqual(as_dict(pair.commutator), {"c": q(2 * nu)})
        self.assertEqual(as_dict(pair.anticommutator), {"w_0s": q(1)})


class TestFailures(unittest.TestCase):
    def test_super_bracket_leaves_first_order_basis(self):
        table = closure_table(build_rep(RepCase.CONSTANT), Kind.SUPER)
        self.assertFalse(table.closes())
        self.assertIn(("w_p", "w_p"), [(i, j) for i, j, _ in table.failures])
        with self.assertRaises(ValueError):
            jacobi_check(table)

    def test_brute_force_jacobi_constant_case(self):
        basis = extend_rep(build_rep(RepCase.CONSTANT))
        self.assertTrue(jacobi_check(basis, Kind.LIE).holds)
        self.assertTrue(jacobi_check(basis, Kind.SUPER).holds)


class TestEnlargedBracketsAcrossCases(unittest.TestCase):
    """Brackets with the second-order generators at nu = -1/(4a), one row per pair."""

    EXPECTED = {
        ("z_0", "w_p1"): {"w_p1": q(-1)},
        ("z_0", "w_m1"): {"w_m1": q(1)},
        ("z_p1", "w_0s"): {"w_p1": q(1)},
        ("z_m1", "w_0s"): {"w_m1": q(-1)},
        ("z_p1", "w_m1"): {"w_0s": q(2)},
        ("z_m1", "w_p1"): {"w_0s": q(-2)},
        ("w_p", "w_0s"): {"w_p": q(-a.inverse())},
        ("w_m", "w_0s"): {"w_m": q(a.inverse())},
        ("w_p", "w_m1"): {"w_m": q(-2 * a.inverse())},
        ("w_m", "w_p1"): {"w_p": q(2 * a.inverse())},
        ("w_0s", "w_p1"): {"w_p1": q(2 * a.inverse())},
        ("w_0s", "w_m1"): {"w_m1": q(-2 * a.inverse())},
        ("w_p1", "w_m1"): {"w_0s": q(-4 * a.inverse())},
    }

    @classmethod
    def setUpClass(cls):
        cls.tables = {
            case: closure_table(extend_rep(build_rep(case)), Kind.LIE) for case in RepCase
        }
        cls.tables[RepCase.QUADRATIC] = cls.tables[RepCase.QUADRATIC].specialize("nu", SPECIAL_NU)

    def test_table(self):
        for case, table in self.tables.items():
            for (left, right), value in self.EXPECTED.items():
                with self.subTest(case=case, pair=(left, right)):
                    self.assertEqual(as_dict(table.coefficients(left, right)), value)

    def test_general_nu(self):
        table = closure_table(extend_rep(build_rep(RepCase.QUADRATIC)), Kind.LIE)
        expected = {
            ("z_0", "w_p1"): {"w_p1": q(4 * a * nu)},
            ("z_m1", "w_0s"): {"w_m1": q(4 * a * nu)},
            ("z_p1", "w_m1"): {"w_0s": q(-8 * a * nu)},
            ("w_p", "w_0s"): {"w_p": q(4 * nu)},
            ("w_m", "w_p1"): {"w_p": q(-8 * nu)},
            ("w_0s", "w_m1"): {"w_m1": q(8 * nu)},
        }
        for (left, right), value in expected.items():
            with self.subTest(pair=(left, right)):
                self.assertEqual(as_dict(table.coefficients(left, right)), value)


class TestTablesReverify(unittest.TestCase):
    def test_every_entry_expands_back(self):
        for case in RepCase:
            basis = extend_rep(build_rep(case))
            for kind in Kind:
                table = closure_table(basis, kind)
                self.assertTrue(table.closes())
                for left, right, how, expansion in table.nonvanishing():
                    with self.subTest(case=case, kind=kind, pair=(left, right)):
                        target = bracket(basis[left], basis[right], how)
                        self.assertTrue(verify_expansion(target, expansion, basis))


if __name__ == "__main__":
    unittest.main()
