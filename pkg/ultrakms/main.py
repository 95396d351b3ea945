"""
Command-line front end.

    ultrakms check graph.ug
    ultrakms g0 graph.ug --expr "r(e1) & r(e2)"
    ultrakms semiring "sec6(d=2, a=2)" --cyl "(; w ;)" --minus "(; w ; f1)"
    ultrakms measure graph.ug --m m.txt --M 2 --cyl "(e1 ; ;)"
    ultrakms kms solve graph.ug --beta 1/2
    ultrakms kms critical graph.ug
    ultrakms ground graph.ug
    ultrakms kmscheck graph.ug --beta 1/2 --m m.txt --len 3
    ultrakms sec6 --d 2 --a 2 --beta 2 --mw 1/2 --verify

Every command prints its info lines and then the CHECK lines sorted by name
and witness, so two runs over the same input print the same bytes. Exit code
0 when nothing failed, 1 on a FAIL or a domain error, 2 on a usage error.
"""

import argparse
import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, List, Optional, Sequence

import structlog

from ultrakms import __version__
from ultrakms.config import settings
from ultrakms.exceptions import ParseError, UltraKMSError
from ultrakms.log import configure_logging
from ultrakms.models import Report, Sec6Params, Verdict
from ultrakms.services.family_sec6 import (
    describe_sec6,
    ground_states_sec6,
    kms_states_sec6,
    sec6_mfunction,
    sec6_thresholds,
    sec6_weights,
    w_partial_sums,
)
from ultrakms.services.kappa_measure import (
    KappaMeasure,
    check_additivity,
    check_scaling,
    kappa,
    kappa_disjointified,
    kappa_union,
)
from ultrakms.services.kms_solver import critical_beta, solve_ground, solve_kms
from ultrakms.services.star_symbolic import StateFunctional, kms_check, multiply, spanning
from ultrakms.services.state_functions import (
    EdgeWeightN,
    MFunction,
    ScaledWeightM,
    dump_mfunction,
    verify_ground_m,
    verify_kms_m,
)
from ultrakms.tools.families import build_sec6
from ultrakms.tools.numbers import Number, format_number, parse_number
from ultrakms.tools.parser import (
    load_ultragraph,
    parse_cylinder,
    parse_expr,
    parse_m_weights,
    parse_spanning,
    parse_word,
    read_atoms,
)
from ultrakms.tools.shift_space import (
    cyl_diff,
    cyl_intersect,
    cyl_refine,
    theta_apply,
    verify_difference,
    verify_refinement,
)
from ultrakms.tools.ultragraph import Ultragraph, canonicalize

logger = structlog.get_logger(__name__)


# ----- helpers ------------------------------------------------------------


def _number(text: str) -> Number:
    try:
        return parse_number(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


@contextmanager
def _overrides(args: argparse.Namespace) -> Iterator[None]:
    """Apply --depth / --fbound / --tol to the settings for one invocation."""
    saved = {}
    for key in ("depth", "fbound", "tol"):
        value = getattr(args, key, None)
        if value is not None:
            saved[key] = getattr(settings, key)
            setattr(settings, key, value)
    try:
        yield
    finally:
        for key, value in saved.items():
            setattr(settings, key, value)


def _exact(args: argparse.Namespace) -> Optional[bool]:
    return True if args.exact else None


def _scaled_weights(graph: Ultragraph, args: argparse.Namespace, beta: Number) -> ScaledWeightM:
    return ScaledWeightM.from_weights(EdgeWeightN.from_graph(graph), beta, exact=_exact(args))


def _weights_from_option(graph: Ultragraph, args: argparse.Namespace) -> ScaledWeightM:
    """--M is either beta (M = N^-beta) or a file of `weight <edge> <M(e)>` lines."""
    try:
        beta = parse_number(args.M)
    except ParseError:
        path = Path(args.M)
        values = parse_m_weights(path.read_text(encoding="utf-8"))
        return ScaledWeightM.from_values({graph.edge(name): value for name, value in values.items()})
    return _scaled_weights(graph, args, beta)


def _load_m(graph: Ultragraph, path: str) -> MFunction:
    return MFunction.from_names(graph, read_atoms(path), name=Path(path).stem)


def _write_states(out: Optional[str], states: Sequence[MFunction], report: Report) -> None:
    """One file for a single state, numbered siblings for several."""
    if not out or not states:
        return
    target = Path(out)
    for index, state in enumerate(states, start=1):
        path = target if len(states) == 1 else target.with_name(f"{target.stem}_{index}{target.suffix}")
        path.write_text(dump_mfunction(state), encoding="utf-8")
        report.say(f"wrote {path}")


# ----- commands -----------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> Report:
    graph = load_ultragraph(args.graph, validate=False)
    report = Report()
    report.say(f"ultragraph {graph.name} ({graph.backend})")
    report.verification.merge(graph.admissibility_report(settings.family_depth))
    return report


def cmd_g0(args: argparse.Namespace) -> Report:
    graph = load_ultragraph(args.graph)
    subset = canonicalize(graph, parse_expr(args.expr))
    decomposition = graph.decompose(subset)
    emission = graph.emission(subset)
    shown = emission.take(settings.fbound)
    report = Report()
    report.say(f"set = {subset.label()}")
    report.say(f"minimal parts = {' '.join(decomposition.minimal_parts) or '-'}")
    finite = ",".join(vertex.name for vertex in sorted(decomposition.finite_part))
    report.say(f"finite part = {{{finite}}}")
    tail = "" if emission.is_finite else " ..."
    report.say(f"emits = {' '.join(edge.name for edge in shown) or '-'}{tail}")
    return report


def cmd_semiring(args: argparse.Namespace) -> Report:
    graph = load_ultragraph(args.graph)
    cylinder = parse_cylinder(graph, args.cyl)
    report = Report()
    report.say(f"cylinder = {cylinder.label()} [{cylinder.kind.value}]")
    if args.meet:
        other = parse_cylinder(graph, args.meet)
        meet = cyl_intersect(graph, cylinder, other)
        report.say(f"intersection = {meet.label() if meet is not None else 'empty'}")
    if args.minus:
        removed = parse_cylinder(graph, args.minus)
        pieces = cyl_diff(graph, cylinder, removed)
        for piece in pieces:
            report.say(f"difference piece {piece.label()}")
        outcome = verify_difference(graph, cylinder, removed, pieces)
        report.verification.add(
            "difference",
            Verdict.PASS if outcome.ok else Verdict.FAIL,
            outcome.witness or f"pieces={len(pieces)} points={outcome.points}",
        )
    if args.refine:
        pieces = cyl_refine(graph, cylinder, expand_finite=True)
        for piece in pieces:
            report.say(f"refinement piece {piece.label()}")
        outcome = verify_refinement(graph, cylinder, pieces)
        report.verification.add(
            "refinement",
            Verdict.PASS if outcome.ok else Verdict.FAIL,
            outcome.witness or f"pieces={len(pieces)} points={outcome.points}",
        )
    if args.theta:
        moved = theta_apply(graph, parse_word(graph, args.theta), cylinder)
        report.say(f"theta[{args.theta}] = {moved.label()}")
    return report


def cmd_measure(args: argparse.Namespace) -> Report:
    graph = load_ultragraph(args.graph)
    measure = KappaMeasure(_load_m(graph, args.m), _weights_from_option(graph, args))
    cylinders = [parse_cylinder(graph, text) for text in args.cyl]
    report = Report()
    for cylinder in cylinders:
        report.say(f"kappa {cylinder.label()} = {format_number(kappa(measure, cylinder))}")
        if args.additivity:
            pieces = cyl_refine(graph, cylinder, expand_finite=True)
            report.verification.merge(check_additivity(measure, cylinder, pieces))
        if args.scale:
            edge = graph.edge(args.scale)
            report.verification.merge(check_scaling(measure, edge, cylinder))
    if len(cylinders) > 1:
        report.say(f"union = {format_number(kappa_union(measure, cylinders))}")
        report.say(f"union (disjoint pieces) = {format_number(kappa_disjointified(measure, cylinders))}")
    return report


def cmd_kms_solve(args: argparse.Namespace) -> Report:
    graph = load_ultragraph(args.graph)
    beta = args.beta
    solution = solve_kms(graph, EdgeWeightN.from_graph(graph), beta, exact=_exact(args))
    weights = _scaled_weights(graph, args, beta)
    report = Report()
    mode = "exact" if solution.exact else "float"
    report.say(f"beta = {format_number(beta)} kernel = {solution.kernel_dimension} mode = {mode}")
    if solution.is_empty:
        report.say("no KMS state at this beta")
    lattice = graph.test_lattice(settings.lattice_length)
    for state, vector in zip(solution.states, solution.vectors):
        values = " ".join(f"{vertex.name}={format_number(value)}" for vertex, value in sorted(vector.items()))
        report.say(f"state {state.name}: {values}")
        report.verification.merge(verify_kms_m(state, weights, lattice))
    _write_states(args.out, solution.states, report)
    return report


def cmd_kms_critical(args: argparse.Namespace) -> Report:
    graph = load_ultragraph(args.graph)
    result = critical_beta(graph, EdgeWeightN.from_graph(graph), lo=args.lo, hi=args.hi)
    report = Report()
    report.say(f"beta* = {result.beta:.9f}")
    return report


def cmd_ground(args: argparse.Namespace) -> Report:
    graph = load_ultragraph(args.graph)
    description = solve_ground(graph)
    report = Report()
    for line in description.lines():
        report.say(line)
    states = description.extreme_points()
    for state in states:
        report.verification.merge(verify_ground_m(state))
    _write_states(args.out, states, report)
    return report


def cmd_kmscheck(args: argparse.Namespace) -> Report:
    graph = load_ultragraph(args.graph)
    m = _load_m(graph, args.m)
    weights = _scaled_weights(graph, args, args.beta)
    report = Report()
    if args.spot:
        phi = StateFunctional(m, weights)
        elements = [spanning(graph, *parse_spanning(graph, text)) for text in args.spot]
        for element in elements:
            label = element.label() if element is not None else "0"
            report.say(f"phi {label} = {format_number(phi(element))}")
        if len(elements) == 2:
            product = multiply(graph, elements[0], elements[1])
            report.say(f"product = {product.label() if product is not None else '0'}")
            report.say(f"phi product = {format_number(phi(product))}")
    report.verification.merge(kms_check(m, weights, args.len))
    return report


def _sec6_params(args: argparse.Namespace) -> Sec6Params:
    try:
        return Sec6Params(d=args.d, a=args.a, beta=args.beta, m_w=args.mw)
    except ValueError as exc:
        raise ParseError(f"bad sec6 parameters: {exc}") from exc


def cmd_sec6(args: argparse.Namespace) -> Report:
    params = _sec6_params(args)
    graph = build_sec6(params, depth=settings.family_depth)
    report = Report()
    for line in describe_sec6(params):
        report.say(line)
    m_w = params.m_w
    if m_w is None:
        states = kms_states_sec6(params)
        m_w = states.low if states is not None else Fraction(1)
    m = sec6_mfunction(params, m_w, graph=graph)
    report.say(f"m(w) = {format_number(m.atom('w'))}")
    report.say(f"m(B) = {format_number(m.atom('B'))}")
    for vertex in graph.vertices(7):
        if vertex.index:
            report.say(f"m({vertex.name}) = {format_number(m.atom(vertex))}")
    if args.verify:
        weights = sec6_weights(graph, params, exact=_exact(args))
        lattice = graph.test_lattice(settings.lattice_length)
        report.verification.merge(verify_kms_m(m, weights, lattice))
        report.verification.merge(w_partial_sums(params, m.atom("w")))
    if args.ground:
        segment = ground_states_sec6(graph)
        for line in segment.lines():
            report.say(line)
        for t in (Fraction(0), Fraction(1, 2), Fraction(1)):
            report.verification.merge(verify_ground_m(segment.state(t)))
    if args.thresholds:
        for line in sec6_thresholds(params.d).lines():
            report.say(line)
    _write_states(args.out, [m], report)
    return report


# ----- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=None, help="membership-oracle depth L")
    common.add_argument("--fbound", type=int, default=None, help="largest F tried for m3")
    common.add_argument("--tol", type=float, default=None, help="float-mode tolerance")
    common.add_argument("--exact", action="store_true", help="insist on rational arithmetic")
    common.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    common.add_argument("--out", default=None, help="write produced m-functions here")

    parser = argparse.ArgumentParser(
        prog="ultrakms",
        description="KMS and ground states of ultragraph C*-algebras",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", parents=[common], help="validate an ultragraph")
    check.add_argument("graph")
    check.set_defaults(handler=cmd_check)

    g0 = commands.add_parser("g0", parents=[common], help="canonical form of a generalized vertex")
    g0.add_argument("graph")
    g0.add_argument("--expr", required=True)
    g0.set_defaults(handler=cmd_g0)

    semiring = commands.add_parser("semiring", parents=[common], help="cylinder-set algebra")
    semiring.add_argument("graph")
    semiring.add_argument("--cyl", required=True)
    semiring.add_argument("--minus", default=None)
    semiring.add_argument("--meet", default=None)
    semiring.add_argument("--refine", action="store_true")
    semiring.add_argument("--theta", default=None, help="word such as 'e1 e4^-1'")
    semiring.set_defaults(handler=cmd_semiring)

    measure = commands.add_parser("measure", parents=[common], help="kappa of cylinders")
    measure.add_argument("graph")
    measure.add_argument("--m", required=True, help="m-function file")
    measure.add_argument("--M", required=True, help="beta, or a file of M(e) values")
    measure.add_argument("--cyl", required=True, action="append")
    measure.add_argument("--additivity", action="store_true")
    measure.add_argument("--scale", default=None, help="edge e for the kappa(theta_e V) check")
    measure.set_defaults(handler=cmd_measure)

    kms = commands.add_parser("kms", help="KMS states of finite ultragraphs")
    kms_commands = kms.add_subparsers(dest="kms_command", required=True)
    solve = kms_commands.add_parser("solve", parents=[common])
    solve.add_argument("graph")
    solve.add_argument("--beta", type=_number, required=True)
    solve.set_defaults(handler=cmd_kms_solve)
    critical = kms_commands.add_parser("critical", parents=[common])
    critical.add_argument("graph")
    critical.add_argument("--lo", type=float, default=None)
    critical.add_argument("--hi", type=float, default=None)
    critical.set_defaults(handler=cmd_kms_critical)

    ground = commands.add_parser("ground", parents=[common], help="ground states")
    ground.add_argument("graph")
    ground.set_defaults(handler=cmd_ground)

    kmscheck = commands.add_parser("kmscheck", parents=[common], help="KMS condition on spanning elements")
    kmscheck.add_argument("graph")
    kmscheck.add_argument("--beta", type=_number, required=True)
    kmscheck.add_argument("--m", required=True)
    kmscheck.add_argument("--len", type=int, default=3)
    kmscheck.add_argument("--spot", action="append", default=None, help="[mu ; A ; nu]")
    kmscheck.set_defaults(handler=cmd_kmscheck)

    sec6 = commands.add_parser("sec6", parents=[common], help="the sec6 family in closed form")
    sec6.add_argument("--d", required=True)
    sec6.add_argument("--a", required=True)
    sec6.add_argument("--beta", required=True)
    sec6.add_argument("--mw", default=None)
    sec6.add_argument("--verify", action="store_true")
    sec6.add_argument("--ground", action="store_true")
    sec6.add_argument("--thresholds", action="store_true")
    sec6.set_defaults(handler=cmd_sec6)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("DEBUG" if args.verbose else settings.log_level)
    handler: Callable[[argparse.Namespace], Report] = args.handler
    try:
        with _overrides(args):
            report = handler(args)
    except (UltraKMSError, OSError) as exc:
        logger.debug("command_failed", command=args.command, error=type(exc).__name__)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(report.render())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
