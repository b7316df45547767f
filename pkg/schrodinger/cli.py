import argparse
import logging
import sys

from schrodinger import DEFAULT_SEED, SAMPLE_VALUES
from schrodinger.closure import Kind, NotInSpan, closure_table, duality_check, express_in_basis, jacobi_check
from schrodinger.diffop import Bracket, bracket, conjugate_exp, shift_x
from schrodinger.expr import SemanticError, format_expr, format_ring, format_scalar, load_definitions, parse_expr
from schrodinger.onshell import SPECIAL_NU, onshell_report
from schrodinger.output import Result, format_bracket, format_expansion, strategy_for, write
from schrodinger.reps import (
    RepCase,
    adjoint_grades,
    build_omega,
    build_rep,
    dimension_grades,
    extend_rep,
    omega_identity_check,
)
from schrodinger.ring import SYMBOLS
from schrodinger.spectrum import eigenvalue_of, gaussian_vacuum_ansatz, ladder, numeric_residual, select_fock_branch
from schrodinger.superconf import (
    EomOperator,
    build_n1_hyperbolic,
    eom_onshell_check,
    hamiltonian_square_search,
    sigma_closure_table,
)

# region Command line parsing  # noqa


class ColorLogFormatter(logging.Formatter):
    """
    Custom formatter that changes the color of logs based on the log level.
    """

    grey = "\x1b[38;20m"
    green = "\u001b[32m"
    yellow = "\x1b[33;20m"
    red = "\x1b[31;20m"
    bold_red = "\x1b[31;1m"
    blue = "\u001b[34m"
    reset = "\x1b[0m"

    timestamp = "%(asctime)s - "
    loglevel = "%(levelname)s"
    message = " - %(message)s"

    COLORS = {
        logging.DEBUG: blue,
        logging.INFO: green,
        logging.WARNING: yellow,
        logging.ERROR: red,
        logging.CRITICAL: bold_red,
    }

    def __init__(self, with_timestamp=False):
        super().__init__()
        prefix = self.timestamp if with_timestamp else ""
        self.FORMATS = {
            level: prefix + color + self.loglevel + self.reset + self.message
            for level, color in self.COLORS.items()
        }

    def format(self, record):
        log_fmt = self.FORMATS.get(record.levelno)
        formatter = logging.Formatter(log_fmt)
        return formatter.format(record)


def _init_logger(level=logging.INFO, timestamp=False):
    logger = logging.getLogger()
    logger.setLevel(level)

    # repeated runs in one process replace the console handler
    for handler in list(logger.handlers):
        if isinstance(handler.formatter, ColorLogFormatter):
            logger.removeHandler(handler)

    formatter = ColorLogFormatter(with_timestamp=timestamp)
    ch = logging.StreamHandler(sys.stderr)
    ch.setLevel(level)
    ch.setFormatter(formatter)
    logger.addHandler(ch)


class RawTextArgumentDefaultsHelpFormatter(
    argparse.ArgumentDefaultsHelpFormatter, argparse.RawTextHelpFormatter
):
    pass


def _case(value):
    try:
        return RepCase.parse(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


# endregion Command line parsing  # noqa

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _add_global_arguments(parser, suppress=False):
    """Flags accepted before and after the subcommand; subparsers only override what was given."""

    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument(
        "-v",
        "--verbosity",
        choices=["critical", "error", "warning", "info", "debug"],
        default=default("info"),
        help="Set the logging verbosity level.",
    )
    parser.add_argument(
        "--timestamp",
        default=default(False),
        help="Include timestamp in log messages.",
        action="store_true",
    )
    parser.add_argument(
        "--json", action="store_true", default=default(False), help="Output results in JSON format."
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=default(DEFAULT_SEED),
        help="Seed for the sample points of numeric checks.",
    )
    parser.add_argument(
        "-o", "--output", default=default(None), help="Write results to this file instead of stdout."
    )


class App:
    def __init__(self) -> None:
        self.args = None
        self.parser = argparse.ArgumentParser(
            prog="schrodinger",
            description="Exact checks for differential-operator representations of the Schroedinger algebra.",
            formatter_class=RawTextArgumentDefaultsHelpFormatter,
        )
        _add_global_arguments(self.parser)
        common = argparse.ArgumentParser(add_help=False)
        _add_global_arguments(common, suppress=True)
        self.subparsers = self.parser.add_subparsers(dest="command", title="Commands")
        case_help = "Representation: const, lin or quad."

        rep_parser = self.subparsers.add_parser(
            "rep", parents=[common], help="Show the generators of a representation."
        )
        rep_parser.add_argument("action", choices=["dump"], help="What to do with the representation.")
        rep_parser.add_argument("--case", type=_case, required=True, metavar="CASE", help=case_help)
        rep_parser.add_argument(
            "--extended", action="store_true", help="Include the second-order generators w_p1, w_0s, w_m1."
        )
        rep_parser.set_defaults(func=rep_dump)

        bracket_parser = self.subparsers.add_parser(
            "bracket",
            parents=[common],
            help="Bracket two generators or expressions and expand the result in the basis.",
        )
        bracket_parser.add_argument("--case", type=_case, required=True, metavar="CASE", help=case_help)
        bracket_parser.add_argument(
            "--type", choices=["comm", "anti"], default="comm", help="Commutator or anticommutator."
        )
        bracket_parser.add_argument("left", help="Generator name or expression.")
        bracket_parser.add_argument("right", help="Generator name or expression.")
        bracket_parser.set_defaults(func=bracket_command)

        closure_parser = self.subparsers.add_parser(
            "closure", parents=[common], help="Structure constants of a representation."
        )
        closure_parser.add_argument("--case", type=_case, required=True, metavar="CASE", help=case_help)
        closure_parser.add_argument("--kind", choices=["lie", "super"], default="lie", help="Bracket convention.")
        closure_parser.add_argument(
            "--extended", action="store_true", help="Use the nine-generator enlarged basis."
        )
        closure_parser.add_argument(
            "--subst-nu",
            action="store_true",
            help="Specialise at nu = -1/(4a) and compare with the quadratic table.",
        )
        closure_parser.add_argument("--jacobi", action="store_true", help="Also check the (graded) Jacobi identity.")
        closure_parser.set_defaults(func=closure_command)

        duality_parser = self.subparsers.add_parser(
            "duality", parents=[common], help="Lie and super structures on the enlarged basis side by side."
        )
        duality_parser.add_argument("--case", type=_case, required=True, metavar="CASE", help=case_help)
        duality_parser.set_defaults(func=duality_command)

        onshell_parser = self.subparsers.add_parser(
            "onshell", parents=[common], help="On-shell factors [g, Omega] = f*Omega."
        )
        onshell_parser.add_argument("--case", type=_case, required=True, metavar="CASE", help=case_help)
        onshell_parser.add_argument("--gen", default=None, help="Only this generator.")
        onshell_parser.set_defaults(func=onshell_command)

        spectrum_parser = self.subparsers.add_parser(
            "spectrum", parents=[common], help="Oscillator ladder states of the quadratic representation."
        )
        spectrum_parser.add_argument("--n", type=int, default=5, help="Highest excitation number.")
        spectrum_parser.add_argument(
            "--numeric", action="store_true", help="Add a finite-difference residual for every state."
        )
        spectrum_parser.add_argument(
            "--tolerance", type=float, default=1e-4, help="Largest accepted numeric residual."
        )
        spectrum_parser.set_defaults(func=spectrum_command)

        sigma_parser = self.subparsers.add_parser(
            "sigma", parents=[common], help="Checks of the N=1 osp(1|2) sigma model."
        )
        sigma_parser.add_argument(
            "--check", choices=["closure", "onshell", "square", "all"], default="all", help="Which check to run."
        )
        sigma_parser.add_argument("--target", default="H", help="Generator the square search aims at.")
        sigma_parser.add_argument("--eps", type=int, choices=[1, 0, -1], default=1, help="Sign in the EOM.")
        sigma_parser.set_defaults(func=sigma_command)

        parse_parser = self.subparsers.add_parser(
            "parse", parents=[common], help="Parse an expression and print its canonical form."
        )
        parse_parser.add_argument(
            "expression", nargs="?", help="The expression. Alternatively, it can be provided via stdin."
        )
        parse_parser.add_argument("--defs", default=None, help="A file of 'name = expression' definitions.")
        parse_parser.add_argument(
            "--case", type=_case, default=None, metavar="CASE", help="Make generator names and Omega available."
        )
        parse_parser.add_argument("--conjugate", default=None, metavar="G", help="Conjugate by exp(G).")
        parse_parser.add_argument("--shift-x", default=None, metavar="B", help="Replace x by x + B.")
        parse_parser.set_defaults(func=parse_command)

    def parse_args(self, args=None):
        self.args = self.parser.parse_args(args)

    def run(self, argv=None) -> int:
        if argv is not None or not self.args:
            try:
                self.parse_args(argv)
            except SystemExit as e:
                return e.code if isinstance(e.code, int) else EXIT_USAGE
        _init_logger(getattr(logging, self.args.verbosity.upper()), self.args.timestamp)
        logging.debug(f"command-line args: {self.args}")
        if not getattr(self.args, "func", None):
            self.parser.print_help()
            return EXIT_USAGE
        try:
            result = self.args.func(self.args)
        except ValueError as e:
            # ParseError and SemanticError included
            logging.error(f"{type(e).__name__}: {e}")
            return EXIT_USAGE
        except KeyError as e:
            logging.error(e.args[0] if e.args else e)
            return EXIT_USAGE
        except OSError as e:
            logging.error(f"Cannot read input: {e}")
            return EXIT_USAGE
        write(result, strategy_for(self.args.json), self.args.output)
        return EXIT_OK if result.ok else EXIT_FAILED


def _basis(case: RepCase, extended: bool = True):
    basis = build_rep(case)
    return extend_rep(basis) if extended else basis


def _grade_text(value) -> str:
    return "-" if value is None else str(value)


def rep_dump(args) -> Result:
    basis = _basis(args.case, args.extended)
    omega = build_omega(args.case)
    grades = dimension_grades(basis)
    adjoint = adjoint_grades(basis)
    identity = omega_identity_check(args.case) if args.extended else None
    lines = [f"# {args.case.value} representation"]
    generators = []
    for g in basis:
        text = format_expr(g.op)
        lines.append(f"{g.name} = {text}  [{g.parity}] grade={_grade_text(grades[g.name])} ad={_grade_text(adjoint[g.name])}")
        generators.append(
            {
                "name": g.name,
                "parity": str(g.parity),
                "expr": text,
                "grade": _grade_text(grades[g.name]),
                "adjoint_grade": _grade_text(adjoint[g.name]),
            }
        )
    lines.append(f"Omega = {format_expr(omega)}")
    data = {"case": args.case.value, "generators": generators, "omega": format_expr(omega)}
    if identity is not None:
        lines.append(f"Omega identity: {'holds' if identity else 'fails'}")
        data["omega_identity"] = identity
    return Result("\n".join(lines), data, identity is not False)


def _env(basis, omega) -> dict:
    env = basis.as_env()
    env["Omega"] = omega
    return env


def bracket_command(args) -> Result:
    basis = _basis(args.case)
    env = _env(basis, build_omega(args.case))
    left, right = parse_expr(args.left, env), parse_expr(args.right, env)
    kind = Bracket.parse(args.type)
    result = bracket(left, right, kind)
    expansion = express_in_basis(result, basis)
    label = format_bracket(args.left, args.right, kind)
    lines = [f"{label} = {format_expr(result)}"]
    data = {"left": args.left, "right": args.right, "bracket": kind.value, "result": format_expr(result)}
    if isinstance(expansion, NotInSpan):
        lines.append(str(expansion))
        data["expansion"] = None
    else:
        lines.append(f"{label} = {format_expansion(expansion)}")
        data["expansion"] = [{"coeff": format_scalar(c), "gen": g} for c, g in expansion]
    return Result("\n".join(lines), data)


def _table_lines(table) -> list[str]:
    lines = [
        f"{format_bracket(i, j, kind)} = {format_expansion(expansion)}"
        for i, j, kind, expansion in table.nonvanishing()
    ]
    lines.extend(f"FAIL {format_bracket(i, j, table.bracket_of(i, j))}: {cert}" for i, j, cert in table.failures)
    return lines


def closure_command(args) -> Result:
    extended = args.extended or args.kind == "super"
    basis = _basis(args.case, extended)
    table = closure_table(basis, Kind(args.kind))
    ok = table.closes()
    if args.subst_nu:
        table = table.specialize("nu", SPECIAL_NU)
    lines = _table_lines(table)
    data = table.to_json()
    if args.subst_nu and args.case is not RepCase.QUADRATIC and ok:
        reference = closure_table(_basis(RepCase.QUADRATIC, extended), Kind(args.kind)).specialize("nu", SPECIAL_NU)
        mismatches = table.compare(reference)
        for i, j, mine, theirs in mismatches:
            lines.append(f"MISMATCH [{i}, {j}]: {format_expansion(mine)} vs quad {format_expansion(theirs)}")
        data["mismatches"] = [[i, j] for i, j, _, _ in mismatches]
        ok = ok and not mismatches
    if args.jacobi and table.closes():
        jacobi = jacobi_check(table)
        verdict = "holds" if jacobi.holds else f"fails at {jacobi.violation}"
        lines.append(f"Jacobi ({table.kind.value}): {verdict} over {jacobi.checked} triples")
        data["jacobi"] = {"holds": jacobi.holds, "checked": jacobi.checked}
        ok = ok and jacobi.holds
    return Result("\n".join(lines), data, ok)


def duality_command(args) -> Result:
    report = duality_check(_basis(args.case))
    lines = [
        f"lie table: {'closes' if report.lie.closes() else 'fails'}",
        f"super table: {'closes' if report.super.closes() else 'fails'}",
    ]
    pairs = []
    for pair in report.odd_pairs:
        lines.append(
            f"[{pair.left}, {pair.right}] = {format_expansion(pair.commutator)}; "
            f"{{{pair.left}, {pair.right}}} = {format_expansion(pair.anticommutator)}"
        )
        pairs.append(
            {
                "left": pair.left,
                "right": pair.right,
                "commutator": format_expansion(pair.commutator),
                "anticommutator": format_expansion(pair.anticommutator),
            }
        )
    for i, j in report.disagreements:
        lines.append(f"DISAGREE [{i}, {j}]")
    data = {
        "case": args.case.value,
        "lie": report.lie.to_json(),
        "super": report.super.to_json(),
        "odd_pairs": pairs,
        "disagreements": [[i, j] for i, j in report.disagreements],
        "holds": report.holds,
    }
    return Result("\n".join(lines), data, report.holds)


def onshell_command(args) -> Result:
    basis = _basis(args.case)
    omega = build_omega(args.case)
    report = onshell_report(basis, omega, args.case, only=args.gen)
    lines = []
    generators = []
    for g in report.generators:
        factor = format_ring(g.factor.factor) if g.factor is not None else None
        if args.gen is not None:
            lines.append(f"f = {factor}" if factor is not None else "f: none")
        else:
            status = f"f = {factor}" if factor is not None else ("left ideal" if g.symmetry else "not a symmetry")
            lines.append(f"{g.name}: {status}")
        generators.append({"name": g.name, "factor": factor, "symmetry": g.symmetry})
    identities = []
    for check in report.identities:
        ident = check.identity
        lines.append(
            f"[{ident.generator}, Omega] = {ident.abstract} = ({ident.factor})*Omega: "
            f"{'holds' if check.holds else 'fails'}"
        )
        identities.append({"generator": ident.generator, "abstract": ident.abstract, "factor": ident.factor,
                           "holds": check.holds})
    for i, j in report.unclosed_pairs:
        lines.append(f"UNCLOSED [{i}, {j}]")
    data = {
        "case": args.case.value,
        "generators": generators,
        "identities": identities,
        "unclosed": [[i, j] for i, j in report.unclosed_pairs],
    }
    ok = report.holds if args.gen is None else (
        all(g.factor is not None for g in report.generators) and all(c.holds for c in report.identities)
    )
    return Result("\n".join(lines), data, ok)


def spectrum_command(args) -> Result:
    case = RepCase.QUADRATIC
    basis = _basis(case)
    omega = build_omega(case)
    vacuum = select_fock_branch(gaussian_vacuum_ansatz(omega), basis["w_p"], basis["w_m"], omega)
    states = ladder(vacuum, args.n, cartan=basis["z_0"])
    lines = [f"vacuum: lam = {format_ring(vacuum.lam)}, beta = {format_ring(vacuum.beta)}"]
    rows = []
    ok = True
    for state in states:
        w0 = eigenvalue_of(basis["w_0s"], state.psi)
        row = {
            "n": state.n,
            "z_0": format_ring(state.eigenvalue) if state.eigenvalue is not None else None,
            "w_0s": format_ring(w0) if w0 is not None else None,
            "polynomial": format_ring(state.polynomial),
        }
        line = f"n={state.n}  z_0={row['z_0']}  w_0s={row['w_0s']}  K={row['polynomial']}"
        if args.numeric:
            res = numeric_residual(state.psi, omega, seed=args.seed)
            row["residual"] = res
            line += f"  residual={res:.3e}"
            ok = ok and res <= args.tolerance
        lines.append(line)
        rows.append(row)
    data = {"lam": format_ring(vacuum.lam), "beta": format_ring(vacuum.beta), "states": rows}
    if args.numeric:
        data["sample_values"] = {k: str(v) for k, v in SAMPLE_VALUES.items()}
        data["seed"] = args.seed
    return Result("\n".join(lines), data, ok)


def sigma_command(args) -> Result:
    basis = build_n1_hyperbolic()
    checks = ["closure", "onshell", "square"] if args.check == "all" else [args.check]
    lines = []
    data = {}
    ok = True
    if "closure" in checks:
        table = sigma_closure_table(basis)
        lines.extend(_table_lines(table))
        data["closure"] = table.to_json()
        ok = ok and table.closes()
    if "onshell" in checks:
        eom = EomOperator(args.eps)
        passed = {g.name: eom_onshell_check(g.op, eom) for g in basis}
        lines.extend(f"{name}: {'on-shell' if holds else 'not on-shell'} (eps={args.eps})" for name, holds in passed.items())
        data["onshell"] = {"eps": args.eps, "generators": passed}
        ok = ok and all(passed.values())
    if "square" in checks:
        certificate = hamiltonian_square_search(args.target)
        lines.append(str(certificate))
        data["square"] = {
            "target": certificate.target,
            "satisfiable": certificate.satisfiable,
            "equations": certificate.equations,
            "solutions": [[str(a), str(b)] for a, b in certificate.solutions],
        }
    return Result("\n".join(lines), data, ok)


def _parse(args) -> Result:
    env = {}
    if args.case is not None:
        basis = _basis(args.case)
        env = _env(basis, build_omega(args.case))
    lines = []
    data = {}
    if args.defs:
        with open(args.defs) as f:
            definitions = load_definitions(f.read(), env)
        logging.info(f"Loaded {len(definitions)} definitions from {args.defs}")
        for name, op in definitions.items():
            lines.append(f"{name} = {format_expr(op)}")
            data[name] = format_expr(op)
        env = {**env, **definitions}
    text = args.expression
    if text is None and not args.defs:
        text = sys.stdin.read()
    if text is not None and text.strip():
        op = parse_expr(text.strip(), env)
        if args.conjugate:
            g = parse_expr(args.conjugate, env)
            if g.order_t() or any(dx for _, dx, _ in g.entries):
                raise SemanticError("conjugation needs a function, not an operator")
            op = conjugate_exp(op, g.coefficient(0, 0))
        if args.shift_x:
            shift = parse_expr(args.shift_x, env)
            op = shift_x(op, shift.coefficient(0, 0))
        lines.append(format_expr(op))
        data["result"] = format_expr(op)
    return Result("\n".join(lines), data)


def parse_command(args) -> Result:
    # a symbols: header in --defs only lasts for this command
    with SYMBOLS.scoped():
        return _parse(args)


def main():
    sys.exit(App().run())


if __name__ == "__main__":
    main()
