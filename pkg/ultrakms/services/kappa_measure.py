"""
The measure kappa on cylinder sets.

    kappa(D_{(beta,B),F}) = M(beta) m(B) - sum over e in F of M(beta e) m(r(e))

It is additive on the semi-ring of cylinders and extends to finite unions
(the generated ring) by adding up disjoint pieces. The checks here compare
kappa of a set with kappa of a decomposition, and kappa after the partial
action theta_e with M(e) times kappa before.
"""

import itertools
from fractions import Fraction
from typing import Optional, Sequence

import structlog

from ultrakms.config import settings
from ultrakms.exceptions import NoExhaustingSequence, NotDisjoint
from ultrakms.models import Verdict, VerificationReport
from ultrakms.services.state_functions import MFunction, ScaledWeightM
from ultrakms.tools.numbers import Number, is_zero
from ultrakms.tools.shift_space import (
    CylinderSet,
    WordLetter,
    cyl_intersect,
    cyl_refine,
    disjointify,
    source_set,
    theta_apply,
    verify_refinement,
)
from ultrakms.tools.ultragraph import Edge, GeneralizedVertex

logger = structlog.get_logger(__name__)


class KappaMeasure:
    """kappa for an m-function m and edge weights M."""

    def __init__(self, m: MFunction, weights: ScaledWeightM):
        self.m = m
        self.weights = weights
        self.graph = m.graph

    def __call__(self, cylinder: Optional[CylinderSet]) -> Number:
        return kappa(self, cylinder)


def kappa(measure: KappaMeasure, cylinder: Optional[CylinderSet]) -> Number:
    if cylinder is None:
        return Fraction(0)
    graph, m, weights = measure.graph, measure.m, measure.weights
    stem_weight = weights.of_path(cylinder.stem)
    value = stem_weight * m(cylinder.base)
    for edge in sorted(cylinder.excluded):
        value -= stem_weight * weights(edge) * m(graph.range(edge))
    return value


def kappa_ring(
    measure: KappaMeasure, pieces: Sequence[CylinderSet], check_disjoint: bool = True
) -> Number:
    """Sum over pieces that are claimed pairwise disjoint (NotDisjoint otherwise)."""
    if check_disjoint:
        for first, second in itertools.combinations(pieces, 2):
            if cyl_intersect(measure.graph, first, second) is not None:
                raise NotDisjoint(first.label(), second.label())
    return sum((kappa(measure, piece) for piece in pieces), Fraction(0))


def kappa_union(measure: KappaMeasure, cylinders: Sequence[CylinderSet]) -> Number:
    """Measure of an arbitrary finite union by inclusion-exclusion over intersections."""
    graph = measure.graph
    total: Number = Fraction(0)
    for size in range(1, len(cylinders) + 1):
        sign = 1 if size % 2 else -1
        for group in itertools.combinations(cylinders, size):
            meet: Optional[CylinderSet] = group[0]
            for other in group[1:]:
                meet = cyl_intersect(graph, meet, other) if meet is not None else None
            if meet is not None:
                total += sign * kappa(measure, meet)
    return total


def kappa_disjointified(measure: KappaMeasure, cylinders: Sequence[CylinderSet]) -> Number:
    """Measure of a finite union through its disjoint basis decomposition."""
    return kappa_ring(measure, disjointify(measure.graph, cylinders), check_disjoint=False)


def measure_of_set(measure: KappaMeasure, subset: GeneralizedVertex) -> Number:
    """mu(D_{(A,A)}) through the basis pieces of X_A; equals m(A)."""
    pieces = cyl_refine(measure.graph, source_set(measure.graph, subset))
    return kappa_ring(measure, pieces, check_disjoint=False)


def check_additivity(
    measure: KappaMeasure,
    whole: CylinderSet,
    pieces: Sequence[CylinderSet],
    tol: Optional[float] = None,
) -> VerificationReport:
    """Pieces partition whole (membership oracle) and kappa adds up over them."""
    tol = settings.tol if tol is None else tol
    report = VerificationReport(tolerance=tol)
    partition = verify_refinement(measure.graph, whole, pieces)
    report.add(
        "partition",
        Verdict.PASS if partition.ok else Verdict.FAIL,
        partition.witness or f"{whole.label()} points={partition.points}",
    )
    residual = kappa(measure, whole) - sum((kappa(measure, piece) for piece in pieces), Fraction(0))
    verdict = Verdict.PASS if is_zero(residual, tol) else Verdict.FAIL
    report.add("additivity", verdict, whole.label(), residual)
    return report


def check_scaling(
    measure: KappaMeasure, edge: Edge, cylinder: Optional[CylinderSet], tol: Optional[float] = None
) -> VerificationReport:
    """kappa(theta_e(V)) = M(e) kappa(V); DomainViolation when V is outside X_{e^-1}."""
    tol = settings.tol if tol is None else tol
    report = VerificationReport(tolerance=tol)
    if cylinder is None:
        report.add("scaling", Verdict.PASS, f"{edge.name} ; empty", Fraction(0))
        return report
    moved = theta_apply(measure.graph, [WordLetter(edge)], cylinder)
    residual = kappa(measure, moved) - measure.weights(edge) * kappa(measure, cylinder)
    verdict = Verdict.PASS if is_zero(residual, tol) else Verdict.FAIL
    report.add("scaling", verdict, f"{edge.name} ; {cylinder.label()}", residual)
    return report


def normalization(measure: KappaMeasure, tol: Optional[float] = None) -> VerificationReport:
    """mu(X) = m(top) = 1."""
    tol = settings.tol if tol is None else tol
    top = measure.graph.top()
    if top is None:
        raise NoExhaustingSequence(f"{measure.graph.name} has no top element")
    report = VerificationReport(tolerance=tol)
    residual = measure_of_set(measure, top) - 1
    report.add("normalization", Verdict.PASS if is_zero(residual, tol) else Verdict.FAIL, top.label(), residual)
    return report
