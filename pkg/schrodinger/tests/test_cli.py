import io
import json
import os
import tempfile
import unittest
from unittest.mock import patch

from schrodinger.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, App
from schrodinger.ring import SYMBOLS

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def run(*argv, stdin=""):
    """Run the CLI and return (exit code, stdout)."""
    with patch("sys.stdout", new_callable=io.StringIO) as stdout, patch(
        "sys.stderr", new_callable=io.StringIO
    ), patch("sys.stdin", io.StringIO(stdin)):
        code = App().run(list(argv))
        return code, stdout.getvalue()


class TestRep(unittest.TestCase):
    def test_dump(self):
        code, out = run("rep", "dump", "--case", "const")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("w_m = t*Dx - x/(2*a)", out)
        self.assertNotIn("w_0s", out)

    def test_dump_extended_checks_omega(self):
        code, out = run("--json", "rep", "dump", "--case", "quad", "--extended")
        self.assertEqual(code, EXIT_OK)
        data = json.loads(out)
        self.assertTrue(data["omega_identity"])
        self.assertEqual(len(data["generators"]), 9)

    def test_bad_case(self):
        code, out = run("rep", "dump", "--case", "cubic")
        self.assertEqual(code, EXIT_USAGE)
        self.assertEqual(out, "")


class TestBracket(unittest.TestCase):
    def test_generator_names(self):
        code, out = run("bracket", "--case", "quad", "w_p", "w_m")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("[w_p, w_m] = 2*nu*c", out)

    def test_anticommutator(self):
        code, out = run("bracket", "--case", "const", "--type", "anti", "w_p", "w_p")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("{w_p, w_p} = w_p1", out)

    def test_expressions(self):
        code, out = run("bracket", "--case", "const", "x", "Dx")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("[x, Dx] = -1", out)


class TestClosure(unittest.TestCase):
    def test_json(self):
        code, out = run("--json", "closure", "--case", "quad", "--kind", "lie")
        self.assertEqual(code, EXIT_OK)
        data = json.loads(out)
        self.assertEqual(data["kind"], "lie")
        self.assertEqual(data["failures"], [])

    def test_substitution_matches_quadratic(self):
        code, out = run("closure", "--case", "const", "--subst-nu", "--jacobi")
        self.assertEqual(code, EXIT_OK)
        self.assertNotIn("MISMATCH", out)
        self.assertIn("Jacobi (lie): holds", out)

    def test_super_on_first_order_basis_is_extended(self):
        code, out = run("closure", "--case", "const", "--kind", "super")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("{w_p, w_p} = w_p1", out)


class TestOnShell(unittest.TestCase):
    def test_single_generator(self):
        code, out = run("onshell", "--case", "const", "--gen", "z_0")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.splitlines()[0], "f = -1")

    def test_unknown_generator(self):
        code, _ = run("onshell", "--case", "const", "--gen", "z_9")
        self.assertEqual(code, EXIT_USAGE)


class TestSpectrum(unittest.TestCase):
    def test_ladder(self):
        code, out = run("--json", "spectrum", "--n", "2", "--numeric")
        self.assertEqual(code, EXIT_OK)
        data = json.loads(out)
        self.assertEqual([s["n"] for s in data["states"]], [0, 1, 2])
        self.assertEqual(data["states"][2]["polynomial"], "2*nu + 4*nu^2*x^2")
        self.assertEqual(data["seed"], 0)


class TestSigma(unittest.TestCase):
    def test_square(self):
        code, out = run("sigma", "--check", "square")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.strip(), "UNSATISFIABLE: alpha^2=0, beta^2=0, 2*alpha*beta=1")

    def test_wrong_eom_sign(self):
        code, out = run("sigma", "--check", "onshell", "--eps", "0")
        self.assertEqual(code, EXIT_FAILED)
        self.assertIn("Qp: not on-shell (eps=0)", out)

    def test_all(self):
        code, _ = run("sigma")
        self.assertEqual(code, EXIT_OK)


class TestParse(unittest.TestCase):
    def test_canonical_form(self):
        code, out = run("parse", "Dx*x")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out, "x*Dx + 1\n")

    def test_stdin(self):
        code, out = run("parse", stdin="Dx*x\n")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out, "x*Dx + 1\n")

    def test_parse_error(self):
        code, out = run("parse", "Dt Dt +")
        self.assertEqual(code, EXIT_USAGE)
        self.assertEqual(out, "")

    def test_semantic_error(self):
        code, _ = run("parse", "exp(t*x)")
        self.assertEqual(code, EXIT_USAGE)

    def test_definitions(self):
        code, out = run("parse", "--defs", os.path.join(FIXTURES, "constant.txt"), "w_p*w_m")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("w_m = t*Dx - x/(2*a)", out)
        self.assertEqual(out.splitlines()[-1], "t*Dx^2 - x/(2*a)*Dx - 1/(2*a)")

    def test_missing_definitions_file(self):
        code, _ = run("parse", "--defs", os.path.join(FIXTURES, "missing.txt"), "x")
        self.assertEqual(code, EXIT_USAGE)

    def test_case_environment(self):
        code, out = run("parse", "--case", "const", "Omega - z_p1")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.strip(), "a*Dx^2")

    def test_conjugate(self):
        code, out = run("parse", "Dx", "--conjugate", "x^2")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.strip(), "Dx - 2*x")

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "result.txt")
            code, out = run("-o", path, "parse", "x*Dx")
            self.assertEqual(code, EXIT_OK)
            self.assertEqual(out, "")
            with open(path) as f:
                self.assertEqual(f.read(), "x*Dx\n")


class TestGlobalFlags(unittest.TestCase):
    def test_json_after_subcommand(self):
        code, out = run("closure", "--case", "quad", "--kind", "lie", "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["kind"], "lie")

    def test_seed_after_subcommand(self):
        code, out = run("spectrum", "--n", "1", "--numeric", "--seed", "3", "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["seed"], 3)

    def test_defaults_when_omitted(self):
        code, out = run("spectrum", "--n", "0", "--numeric")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out.startswith("vacuum: "))

    def test_output_after_subcommand(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "result.json")
            code, out = run("parse", "x*Dx", "--json", "-o", path)
            self.assertEqual(code, EXIT_OK)
            self.assertEqual(out, "")
            with open(path) as f:
                self.assertEqual(json.load(f), {"result": "x*Dx"})

    def test_same_seed_same_output(self):
        first = run("spectrum", "--n", "3", "--numeric", "--seed", "11")
        second = run("spectrum", "--n", "3", "--numeric", "--seed", "11")
        self.assertEqual(first, second)
        self.assertIn("residual=", first[1])


class TestSymbolScope(unittest.TestCase):
    def test_definition_symbols_do_not_outlive_the_command(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "defs.txt")
            with open(path, "w") as f:
                f.write("symbols: kappa\ng = kappa*Dx\n")
            code, out = run("parse", "--defs", path, "g*x")
            self.assertEqual(code, EXIT_OK)
            self.assertEqual(out.splitlines()[-1], "kappa*x*Dx + kappa")
        self.assertNotIn("kappa", SYMBOLS)


if __name__ == "__main__":
    unittest.main()
