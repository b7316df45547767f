import unittest
from fractions import Fraction

from schrodinger.closure import jacobi_check
from schrodinger.diffop import DiffOp
from schrodinger.fracpoly import from_scalar
from schrodinger.reps import Parity
from schrodinger.ring import ExpArg, Monomial, RingElement
from schrodinger.superconf import (
    SIGMA_NAMES,
    EomOperator,
    MatrixOp,
    build_n1_hyperbolic,
    eom_onshell_check,
    expand_in_sigma,
    graded_matrix_bracket,
    hamiltonian_square_search,
    sigma_closure_table,
)


def q(value):
    return from_scalar(RingElement.coerce(value))


def exp_t(rate):
    return RingElement.exponential(ExpArg.build([(rate, Monomial(), "t")]))


class TestMatrixOp(unittest.TestCase):
    def test_entries_must_act_in_t(self):
        with self.assertRaises(ValueError):
            MatrixOp.diagonal(DiffOp.dx(), DiffOp.dt())

    def test_parity_shape(self):
        zero, one = DiffOp.zero(), DiffOp.identity()
        with self.assertRaises(ValueError):
            MatrixOp(((zero, one), (one, zero)), Parity.EVEN)
        with self.assertRaises(ValueError):
            MatrixOp(((one, zero), (zero, one)), Parity.ODD)

    def test_mixed_parity_sum(self):
        with self.assertRaises(ValueError):
            MatrixOp.diagonal(1, 1) + MatrixOp.off_diagonal(1, 1)
        self.assertEqual(MatrixOp.zero() + MatrixOp.off_diagonal(1, 1), MatrixOp.off_diagonal(1, 1))

    def test_odd_times_odd_is_even(self):
        Q = MatrixOp.off_diagonal(1, DiffOp.dt())
        self.assertEqual((Q * Q).parity, Parity.EVEN)
        self.assertEqual(Q * Q, MatrixOp.diagonal(DiffOp.dt(), DiffOp.dt()))

    def test_apply(self):
        Qp = build_n1_hyperbolic()["Qp"]
        phi, psi = RingElement.var("t"), RingElement.one()
        self.assertEqual(Qp.apply((phi, psi)), (exp_t(1), exp_t(1) * (1 - RingElement.var("t"))))


class TestSigmaClosure(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.basis = build_n1_hyperbolic()
        cls.table = sigma_closure_table(cls.basis)

    def coefficients(self, left, right):
        return {g: c for c, g in self.table.coefficients(left, right)}

    def test_basis(self):
        self.assertEqual(self.basis.names, list(SIGMA_NAMES))
        self.assertEqual(self.basis.parity("Qp"), Parity.ODD)
        self.assertEqual(self.basis.parity("H"), Parity.EVEN)

    def test_closes(self):
        self.assertTrue(self.table.closes())

    def test_osp_relations(self):
        self.assertEqual(self.coefficients("Qp", "Qp"), {"Zp": q(2)})
        self.assertEqual(self.coefficients("Qm", "Qm"), {"Zm": q(2)})
        self.assertEqual(self.coefficients("Qp", "Qm"), {"H": q(2)})
        self.assertEqual(self.coefficients("H", "Qp"), {"Qp": q(1)})
        self.assertEqual(self.coefficients("H", "Qm"), {"Qm": q(-1)})
        self.assertEqual(self.coefficients("H", "Zp"), {"Zp": q(2)})
        self.assertEqual(self.coefficients("Zp", "Qm"), {"Qp": q(-2)})
        self.assertEqual(self.coefficients("Zm", "Qp"), {"Qm": q(2)})
        self.assertEqual(self.coefficients("Zp", "Zm"), {"H": q(-4)})
        self.assertEqual(self.coefficients("Zp", "Qp"), {})

    def test_z_is_square_of_q(self):
        self.assertEqual(self.basis["Qp"] * self.basis["Qp"], self.basis["Zp"])
        self.assertEqual(self.basis["Qm"] * self.basis["Qm"], self.basis["Zm"])

    def test_graded_jacobi(self):
        self.assertTrue(jacobi_check(self.table).holds)

    def test_graded_antisymmetry(self):
        for left in SIGMA_NAMES:
            for right in SIGMA_NAMES:
                with self.subTest(pair=(left, right)):
                    A, B = self.basis[left], self.basis[right]
                    both_odd = A.parity is Parity.ODD and B.parity is Parity.ODD
                    forward = graded_matrix_bracket(A, B)
                    backward = graded_matrix_bracket(B, A)
                    self.assertTrue((forward - backward if both_odd else forward + backward).is_zero())
                    self.assertEqual(expand_in_sigma(backward, self.basis), self.table.coefficients(right, left))

    def test_expand(self):
        Qp, Qm = self.basis["Qp"], self.basis["Qm"]
        self.assertEqual(expand_in_sigma(graded_matrix_bracket(Qp, Qm)), [(q(2), "H")])
        self.assertIsNone(expand_in_sigma(MatrixOp.diagonal(DiffOp.dt(2), 0)))

    def test_json_parity(self):
        data = self.table.to_json()
        self.assertEqual(data["kind"], "super")
        self.assertEqual(data["parity"], {"Qp": "odd", "Qm": "odd", "Zp": "even", "Zm": "even", "H": "even"})


class TestEquationOfMotion(unittest.TestCase):
    def test_all_generators_on_shell(self):
        eom = EomOperator(1)
        for g in build_n1_hyperbolic():
            with self.subTest(generator=g.name):
                self.assertTrue(eom_onshell_check(g.op, eom))

    def test_wrong_sign_breaks_supersymmetry(self):
        self.assertFalse(eom_onshell_check(build_n1_hyperbolic()["Qp"], EomOperator(0)))

    def test_eps_range(self):
        with self.assertRaises(ValueError):
            EomOperator(2)

    def test_reduce_uses_field_equations(self):
        eom = EomOperator(-1)
        self.assertEqual(eom.reduce(DiffOp.dt(3), 0), -DiffOp.dt())
        self.assertTrue(eom.reduce(DiffOp.dt(), 1).is_zero())


class TestSquareSearch(unittest.TestCase):
    def test_hamiltonian_is_not_a_square(self):
        certificate = hamiltonian_square_search("H")
        self.assertFalse(certificate.satisfiable)
        self.assertEqual(str(certificate), "UNSATISFIABLE: alpha^2=0, beta^2=0, 2*alpha*beta=1")

    def test_zp_is_a_square(self):
        certificate = hamiltonian_square_search("Zp")
        self.assertTrue(certificate.satisfiable)
        self.assertEqual(certificate.solutions, [(Fraction(-1), Fraction(0)), (Fraction(1), Fraction(0))])

    def test_zero_target(self):
        certificate = hamiltonian_square_search("0")
        self.assertEqual(certificate.solutions, [(Fraction(0), Fraction(0))])

    def test_unknown_target(self):
        with self.assertRaises(KeyError):
            hamiltonian_square_search("K")


if __name__ == "__main__":
    unittest.main()
