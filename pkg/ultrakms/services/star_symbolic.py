"""
Spanning elements s_mu p_A s_nu* and the state functional on them.

Products of spanning elements are spanning elements or zero, so a state is
pinned down by its values on single elements:

    phi(s_mu p_A s_nu*) = [mu == nu] M(mu) m(A)

The checker verifies the KMS identity phi(ab) = M(mu)/M(nu) phi(ba) on all
pairs up to a path length, and the scalar Cuntz-Krieger relation
phi(s_mu p_A s_mu*) = sum over e in epsilon(A) of phi(s_mue p_r(e) s_mue*)
for finite-emission A, which is where m2 shows up.
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

import structlog

from ultrakms.config import settings
from ultrakms.exceptions import DomainViolation
from ultrakms.models import Verdict, VerificationReport
from ultrakms.services.state_functions import MFunction, ScaledWeightM
from ultrakms.tools.numbers import Number, is_zero
from ultrakms.tools.ultragraph import Edge, GeneralizedVertex, Ultragraph

logger = structlog.get_logger(__name__)

Path = Tuple[Edge, ...]


@dataclass(frozen=True)
class SpanningElement:
    """(mu, A, nu) standing for s_mu p_A s_nu*, with A inside r(mu) and r(nu)."""

    mu: Path
    middle: GeneralizedVertex
    nu: Path

    def label(self) -> str:
        mu = " ".join(edge.name for edge in self.mu)
        nu = " ".join(edge.name for edge in self.nu)
        return f"[{mu} ; {self.middle.label()} ; {nu}]"

    def __str__(self) -> str:
        return self.label()


def spanning(
    graph: Ultragraph,
    mu: Sequence[Edge] = (),
    middle: Optional[GeneralizedVertex] = None,
    nu: Sequence[Edge] = (),
) -> Optional[SpanningElement]:
    """
    Normalized element, or None for zero.

    The middle set is cut down to r(mu) and r(nu) (an empty path imposes
    nothing); leaving it out means exactly that intersection.
    """
    mu, nu = tuple(mu), tuple(nu)
    for path in (mu, nu):
        if not graph.is_path(path):
            raise DomainViolation(f"{' '.join(e.name for e in path)} is not a path")
    bounds = [graph.range(path[-1]) for path in (mu, nu) if path]
    if middle is None:
        if not bounds:
            raise DomainViolation("p_A needs a set A")
        middle = bounds[0]
    for bound in bounds:
        middle = graph.intersection(middle, bound)
    if middle.is_empty:
        return None
    return SpanningElement(mu, middle, nu)


def adjoint(x: Optional[SpanningElement]) -> Optional[SpanningElement]:
    return None if x is None else SpanningElement(x.nu, x.middle, x.mu)


def gauge_invariant(x: Optional[SpanningElement]) -> bool:
    """|mu| = |nu|: the element survives the conditional expectation onto the core."""
    return x is None or len(x.mu) == len(x.nu)


class ProductCase(str, Enum):
    RANGE = "range"
    MU_PRIME = "mu-prime"
    NU_PRIME = "nu-prime"
    ZERO = "zero"


def adjoint_product(nu: Sequence[Edge], mu: Sequence[Edge]) -> Tuple[ProductCase, Path]:
    """
    s_nu* s_mu: p_r(nu) when equal, s_mu' when mu = nu mu', s_nu'* when
    nu = mu nu', zero otherwise.
    """
    nu, mu = tuple(nu), tuple(mu)
    if nu == mu:
        return ProductCase.RANGE, ()
    if mu[: len(nu)] == nu:
        return ProductCase.MU_PRIME, mu[len(nu):]
    if nu[: len(mu)] == mu:
        return ProductCase.NU_PRIME, nu[len(mu):]
    return ProductCase.ZERO, ()


def multiply(
    graph: Ultragraph, a: Optional[SpanningElement], b: Optional[SpanningElement]
) -> Optional[SpanningElement]:
    """(s_mu p_A s_nu*)(s_lam p_B s_tau*)."""
    if a is None or b is None:
        return None
    case, rest = adjoint_product(a.nu, b.mu)
    if case is ProductCase.RANGE:
        middle = graph.intersection(a.middle, b.middle)
        return spanning(graph, a.mu, middle, b.nu)
    if case is ProductCase.NU_PRIME:
        if not graph.source_in(rest[0], b.middle):
            return None
        return spanning(graph, a.mu, a.middle, b.nu + rest)
    if case is ProductCase.MU_PRIME:
        if not graph.source_in(rest[0], a.middle):
            return None
        return spanning(graph, a.mu + rest, b.middle, b.nu)
    return None


class StateFunctional:
    """phi_{m,beta} on spanning elements."""

    def __init__(self, m: MFunction, weights: ScaledWeightM):
        self.m = m
        self.weights = weights

    def __call__(self, x: Optional[SpanningElement]) -> Number:
        return phi_eval(self, x)


def phi_eval(phi: StateFunctional, x: Optional[SpanningElement]) -> Number:
    if x is None or x.mu != x.nu:
        return Fraction(0)
    return phi.weights.of_path(x.mu) * phi.m(x.middle)


# ----- exhaustive checks ------------------------------------------------------


def paths_up_to(graph: Ultragraph, length: int) -> List[Path]:
    """Every path of length <= `length` (the empty one included)."""
    paths: List[Path] = [()]
    frontier: List[Path] = [(edge,) for edge in graph.edges()]
    for _ in range(length):
        paths.extend(frontier)
        frontier = [
            path + (edge,)
            for path in frontier
            for vertex in sorted(graph.range(path[-1]).finite)
            for edge in graph.edges_from(vertex)
        ]
    return paths


def middle_sets(graph: Ultragraph) -> List[GeneralizedVertex]:
    """Ranges, vertex singletons and the top element, deduplicated."""
    found = {}
    top = graph.top()
    if top is not None:
        found[top] = None
    for vertex in graph.vertices():
        found[graph.singleton(vertex)] = None
    for edge in graph.edges():
        found[graph.range(edge)] = None
    return list(found)


def spanning_elements(graph: Ultragraph, length: int) -> Iterator[SpanningElement]:
    paths = paths_up_to(graph, length)
    sets = middle_sets(graph)
    seen = set()
    for mu, nu in itertools.product(paths, paths):
        for middle in sets:
            element = spanning(graph, mu, middle, nu)
            if element is not None and element not in seen:
                seen.add(element)
                yield element


def ck_relation_check(
    phi: StateFunctional, length: int, tol: float, report: VerificationReport
) -> None:
    graph = phi.m.graph
    failed = False
    checked = 0
    for mu in paths_up_to(graph, length):
        for middle in middle_sets(graph):
            x = spanning(graph, mu, middle, mu)
            if x is None or not x.middle.has_finite_emission:
                continue
            checked += 1
            expansion = Fraction(0)
            for edge in graph.emission(x.middle):
                expansion += phi(spanning(graph, mu + (edge,), None, mu + (edge,)))
            residual = phi(x) - expansion
            if not is_zero(residual, tol):
                failed = True
                report.add("ck-relation", Verdict.FAIL, x.label(), residual)
    if not failed:
        report.add("ck-relation", Verdict.PASS, f"elements={checked}", Fraction(0))


def kms_check(
    m: MFunction,
    weights: ScaledWeightM,
    length: int = 3,
    tol: Optional[float] = None,
) -> VerificationReport:
    """
    phi(ab) = M(mu)/M(nu) phi(ba) for every pair of spanning elements with
    paths of length <= `length`, plus the scalar Cuntz-Krieger relation.
    """
    tol = settings.tol if tol is None else tol
    graph = m.graph
    phi = StateFunctional(m, weights)
    report = VerificationReport(tolerance=tol)
    if weights.beta is not None and weights.beta == 0:
        report.notes.append("beta = 0: trace case, the KMS extension need not be unique")
    elements = list(spanning_elements(graph, length))
    failed = False
    for a, b in itertools.product(elements, elements):
        left = phi(multiply(graph, a, b))
        right = weights.of_path(a.mu) / weights.of_path(a.nu) * phi(multiply(graph, b, a))
        residual = left - right
        if not is_zero(residual, tol):
            failed = True
            report.add("kms-pair", Verdict.FAIL, f"{a.label()} {b.label()}", residual)
    if not failed:
        report.add("kms-pair", Verdict.PASS, f"pairs={len(elements) ** 2}", Fraction(0))
    ck_relation_check(phi, length, tol, report)
    logger.debug("kms_check", elements=len(elements), passed=report.passed)
    return report
