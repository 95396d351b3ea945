"""
Edge weights and m-functions, plus the verifiers for KMS and ground states.

An m-function assigns a number to every atom of the generalized-vertex
lattice (the minimal infinite emitters and the finite-emission vertices) and
is extended to any generalized vertex additively. KMS states at inverse
temperature beta correspond to m-functions satisfying:

    m1  m(top) = 1 (or the values along an exhausting sequence tend to 1)
    m2  m(A) = sum over e in epsilon(A) of M(e) m(r(e))   when epsilon(A) is finite
    m3  m(A) >= sum over e in F of M(e) m(r(e))           for finite F in epsilon(A)
    m4  m(A | B) = m(A) + m(B) - m(A & B)

with M(e) = N(e)^-beta. Ground states replace m2/m3 by m(A) = 0 whenever
epsilon(A) is finite.
"""

import itertools
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import structlog

from ultrakms.config import settings
from ultrakms.exceptions import InvalidWeight, MissingAtom, MissingWeight, NoExhaustingSequence
from ultrakms.models import Verdict, VerificationReport
from ultrakms.tools.numbers import Number, format_number, is_exact, is_zero, not_above, power
from ultrakms.tools.ultragraph import Edge, GeneralizedVertex, Ultragraph, Vertex

logger = structlog.get_logger(__name__)

Atom = Union[str, Vertex]
TailFormula = Callable[["ScaledWeightM"], Optional[Number]]


class EdgeWeightN:
    """N: edges -> (1, infinity), extended multiplicatively to paths."""

    def __init__(self, rule: Callable[[Edge], Optional[Number]], name: str = "N"):
        self._rule = rule
        self.name = name

    @classmethod
    def from_graph(cls, graph: Ultragraph) -> "EdgeWeightN":
        """The weights the ultragraph was loaded with."""
        return cls(graph.declared_weight, name=f"N[{graph.name}]")

    @classmethod
    def constant(cls, value: Number) -> "EdgeWeightN":
        return cls(lambda edge: value, name=f"N={format_number(value)}")

    @classmethod
    def from_values(cls, values: Mapping[Edge, Number]) -> "EdgeWeightN":
        return cls(values.get)

    def __call__(self, edge: Edge) -> Number:
        value = self._rule(edge)
        if value is None:
            raise MissingWeight(edge)
        if value <= 1:
            raise InvalidWeight(edge, value)
        return value

    def of_path(self, path: Sequence[Edge]) -> Number:
        total: Number = Fraction(1)
        for edge in path:
            total *= self(edge)
        return total


class ScaledWeightM:
    """
    M: edges -> (0, 1], usually M(e) = N(e)^-beta.

    Values are exact whenever the power is rational; `exact=True` makes an
    irrational power an error instead of a float.
    """

    def __init__(self, rule: Callable[[Edge], Number], beta: Optional[Number] = None):
        self._rule = rule
        self._cache: Dict[Edge, Number] = {}
        self.beta = beta

    @classmethod
    def from_weights(
        cls, weights: EdgeWeightN, beta: Number, exact: Optional[bool] = None
    ) -> "ScaledWeightM":
        warned = []

        def rule(edge: Edge) -> Number:
            base = weights(edge)
            value = power(base, -beta, exact=exact)
            if not warned and is_exact(base) and is_exact(beta) and not is_exact(value):
                warned.append(edge)
                logger.info("float_mode", reason="irrational power", edge=edge.name)
            return value

        return cls(rule, beta=beta)

    @classmethod
    def from_values(cls, values: Mapping[Edge, Number]) -> "ScaledWeightM":
        def rule(edge: Edge) -> Number:
            if edge not in values:
                raise MissingWeight(edge)
            return values[edge]

        return cls(rule)

    def __call__(self, edge: Edge) -> Number:
        value = self._cache.get(edge)
        if value is None:
            value = self._rule(edge)
            self._cache[edge] = value
        return value

    def of_path(self, path: Sequence[Edge]) -> Number:
        total: Number = Fraction(1)
        for edge in path:
            total *= self(edge)
        return total


class MFunction:
    """
    Values on atoms plus the additive extension to generalized vertices.

    Atoms are emitter names and finite-emission vertices. Vertex values can
    also come from `vertex_rule` (infinite families). `tail_sums` optionally
    gives, per emitter E and for a weight M, the exact value of
    sum over e in epsilon(E) of M(e) m(r(e)), which lets m3 be checked
    against the supremum instead of finitely many F.
    """

    def __init__(
        self,
        graph: Ultragraph,
        atoms: Mapping[Atom, Number],
        vertex_rule: Optional[Callable[[Vertex], Optional[Number]]] = None,
        tail_sums: Optional[Mapping[str, TailFormula]] = None,
        name: str = "m",
    ):
        self.graph = graph
        self.atoms: Dict[Atom, Number] = dict(atoms)
        self.vertex_rule = vertex_rule
        self.tail_sums = dict(tail_sums or {})
        self.name = name
        self._cache: Dict[GeneralizedVertex, Number] = {}
        for key in self.atoms:
            if isinstance(key, str) and key not in graph.emitters:
                raise MissingAtom(key)

    @classmethod
    def from_names(cls, graph: Ultragraph, values: Mapping[str, Number], name: str = "m") -> "MFunction":
        """Atom names as they appear in files: emitter names first, then vertex names."""
        atoms: Dict[Atom, Number] = {}
        for label, value in values.items():
            atoms[label if label in graph.emitters else graph.vertex(label)] = value
        return cls(graph, atoms, name=name)

    @classmethod
    def from_vector(cls, graph: Ultragraph, vector: Mapping[Vertex, Number], name: str = "m") -> "MFunction":
        return cls(graph, vector, name=name)

    def atom(self, key: Atom) -> Number:
        if key in self.atoms:
            return self.atoms[key]
        if isinstance(key, Vertex) and self.vertex_rule is not None:
            value = self.vertex_rule(key)
            if value is not None:
                return value
        raise MissingAtom(key)

    def with_atom(self, key: Atom, value: Number) -> "MFunction":
        """Copy with one atom changed; tail formulas no longer apply and are dropped."""
        atoms = dict(self.atoms)
        atoms[key] = value
        return MFunction(self.graph, atoms, self.vertex_rule, None, name=f"{self.name}'")

    def tail_sum(self, emitter: str, weights: ScaledWeightM) -> Optional[Number]:
        formula = self.tail_sums.get(emitter)
        return None if formula is None else formula(weights)

    def __call__(self, subset: GeneralizedVertex) -> Number:
        return m_eval(self, subset)

    def named_atoms(self, vertex_count: Optional[int] = None) -> List[Tuple[str, Number]]:
        """
        (name, value) pairs: emitters, then vertices in index order.

        With a vertex rule, the first `vertex_count` vertices are materialized.
        """
        emitters = sorted((key, value) for key, value in self.atoms.items() if isinstance(key, str))
        vertices = {key: value for key, value in self.atoms.items() if isinstance(key, Vertex)}
        if self.vertex_rule is not None and vertex_count:
            for vertex in self.graph.vertices(vertex_count):
                if vertex not in vertices and self.graph.has_finite_emission(vertex):
                    value = self.vertex_rule(vertex)
                    if value is not None:
                        vertices[vertex] = value
        return emitters + [(vertex.name, vertices[vertex]) for vertex in sorted(vertices)]


def m_eval(m: MFunction, subset: GeneralizedVertex) -> Number:
    """
    m(A) from the atoms.

    Sum over the listed emitters and the finite part, minus (k - 1) m(v) for
    each vertex lying in k > 1 of the listed emitters.
    """
    cached = m._cache.get(subset)
    if cached is not None:
        return cached
    graph = m.graph
    total: Number = Fraction(0)
    for name in sorted(subset.emitters):
        total += m.atom(name)
    for vertex in sorted(subset.finite):
        total += m.atom(vertex)
    if len(subset.emitters) > 1:
        shared = set()
        for name in subset.emitters:
            shared |= graph.shared_vertices(name)
        for vertex in sorted(shared):
            count = sum(1 for name in subset.emitters if graph.emitter_contains(name, vertex))
            if count > 1:
                total -= (count - 1) * m.atom(vertex)
    m._cache[subset] = total
    return total


def dump_mfunction(m: MFunction, vertex_count: Optional[int] = None) -> str:
    """m-function file text (`atom <name> <value>` per line)."""
    count = settings.lattice_length if vertex_count is None else vertex_count
    return "".join(
        f"atom {name} {format_number(value)}\n" for name, value in m.named_atoms(count)
    )


# ----- verifiers ----------------------------------------------------------


def _edge_term(m: MFunction, weights: ScaledWeightM, edge: Edge) -> Number:
    return weights(edge) * m(m.graph.range(edge))


def _check_range(report: VerificationReport, m: MFunction, lattice: Sequence[GeneralizedVertex], tol: float) -> None:
    failed = False
    for subset in lattice:
        value = m(subset)
        if not (not_above(0, value, tol) and not_above(value, 1, tol)):
            report.add("m0-range", Verdict.FAIL, subset.label(), value)
            failed = True
    if not failed:
        report.add("m0-range", Verdict.PASS, f"sets={len(lattice)}")


def range_check(
    m: MFunction, lattice: Sequence[GeneralizedVertex], tol: Optional[float] = None
) -> VerificationReport:
    """Every lattice value of m lies in [0, 1]."""
    report = VerificationReport()
    _check_range(report, m, lattice, settings.tol if tol is None else tol)
    return report


def _check_limit(report: VerificationReport, name: str, m: MFunction, tol: float, steps: int) -> None:
    """m1 / gm1: m(top) = 1, or monotone convergence along the declared exhaustion."""
    graph = m.graph
    top = graph.top()
    if top is not None:
        residual = m(top) - 1
        verdict = Verdict.PASS if is_zero(residual, tol) else Verdict.FAIL
        report.add(name, verdict, top.label(), residual)
        return
    sequence = graph.exhaustion(steps)
    if not sequence:
        raise NoExhaustingSequence(f"{graph.name} has no top element and no exhausting sequence")
    values = [m(subset) for subset in sequence]
    monotone = all(not_above(a, b, tol) for a, b in zip(values, values[1:]))
    residual = values[-1] - 1
    verdict = Verdict.PASS if monotone and is_zero(residual, tol) else Verdict.FAIL
    report.add(name, verdict, sequence[-1].label(), residual)


def _check_additivity(
    report: VerificationReport, name: str, m: MFunction, lattice: Sequence[GeneralizedVertex], tol: float
) -> None:
    graph = m.graph
    failed = False
    pairs = 0
    for first, second in itertools.combinations(lattice, 2):
        pairs += 1
        residual = (
            m(graph.union(first, second)) - m(first) - m(second) + m(graph.intersection(first, second))
        )
        if not is_zero(residual, tol):
            failed = True
            report.add(name, Verdict.FAIL, f"{first.label()} ; {second.label()}", residual)
    if not failed:
        report.add(name, Verdict.PASS, f"pairs={pairs}", Fraction(0))


def _m3_supremum(m: MFunction, weights: ScaledWeightM, subset: GeneralizedVertex) -> Optional[Number]:
    """Exact sum over all of epsilon(A), when every listed emitter has a tail formula."""
    graph = m.graph
    tails = [m.tail_sum(name, weights) for name in sorted(subset.emitters)]
    if any(tail is None for tail in tails):
        return None
    total: Number = sum(tails, Fraction(0))
    for vertex in sorted(subset.finite):
        total += sum((_edge_term(m, weights, e) for e in graph.edges_from(vertex)), Fraction(0))
    shared = set()
    for name in subset.emitters:
        shared |= graph.shared_vertices(name)
    for vertex in sorted(shared):
        count = sum(1 for name in subset.emitters if graph.emitter_contains(name, vertex))
        if count > 1:
            emitted = sum((_edge_term(m, weights, e) for e in graph.edges_from(vertex)), Fraction(0))
            total -= (count - 1) * emitted
    return total


def verify_kms_m(
    m: MFunction,
    weights: ScaledWeightM,
    lattice: Optional[Sequence[GeneralizedVertex]] = None,
    fbound: Optional[int] = None,
    tol: Optional[float] = None,
) -> VerificationReport:
    """
    Check m0-range and m1 to m4 on a test lattice.

    m2 is checked exactly on every finite-emission set. For infinite emission
    the window F = first `fbound` edges of epsilon(A) dominates every F inside
    that window (all terms are nonnegative), but not an F using later edges.
    When the m-function carries tail formulas the exact supremum over all of
    epsilon(A) is checked as well; without one the later edges stay unchecked
    and m3 is PASS-AT-DEPTH.
    """
    graph = m.graph
    fbound = settings.fbound if fbound is None else fbound
    tol = settings.tol if tol is None else tol
    lattice = list(graph.test_lattice(settings.lattice_length) if lattice is None else lattice)
    report = VerificationReport(tolerance=tol)

    _check_range(report, m, lattice, tol)
    _check_limit(report, "m1", m, tol, max(fbound, 1))

    m2_failed = False
    m3_verdict = Verdict.PASS
    m3_failed = False
    m3_sets = 0
    for subset in lattice:
        if subset.is_empty:
            continue
        emission = graph.emission(subset)
        if emission.is_finite:
            residual = m(subset) - sum(
                (_edge_term(m, weights, edge) for edge in emission.edges), Fraction(0)
            )
            if not is_zero(residual, tol):
                m2_failed = True
                report.add("m2", Verdict.FAIL, subset.label(), residual)
            continue
        m3_sets += 1
        value = m(subset)
        window = emission.take(fbound)
        partial = sum((_edge_term(m, weights, edge) for edge in window), Fraction(0))
        if not not_above(partial, value, tol):
            m3_failed = True
            report.add("m3", Verdict.FAIL, f"{subset.label()} ; |F|={len(window)}", partial - value)
            continue
        supremum = _m3_supremum(m, weights, subset)
        if supremum is None:
            m3_verdict = Verdict.PASS_AT_DEPTH
        elif not not_above(supremum, value, tol):
            m3_failed = True
            report.add("m3", Verdict.FAIL, f"{subset.label()} ; F=epsilon", supremum - value)
    if not m2_failed:
        report.add("m2", Verdict.PASS, f"sets={len(lattice)}", Fraction(0))
    if not m3_failed:
        report.add("m3", m3_verdict, f"sets={m3_sets} fbound={fbound}")
        if m3_verdict is Verdict.PASS_AT_DEPTH:
            logger.info("m3_pass_at_depth", fbound=fbound, reason="no tail formula")
            report.notes.append(f"m3 checked for |F| <= {fbound} only (no tail formula)")

    _check_additivity(report, "m4", m, lattice, tol)
    logger.debug("verify_kms_m", sets=len(lattice), passed=report.passed)
    return report


def verify_ground_m(
    m: MFunction,
    lattice: Optional[Sequence[GeneralizedVertex]] = None,
    tol: Optional[float] = None,
) -> VerificationReport:
    """gm1 limit 1, gm2 m(A) = 0 on finite emission, gm3 additivity."""
    graph = m.graph
    tol = settings.tol if tol is None else tol
    lattice = list(graph.test_lattice(settings.lattice_length) if lattice is None else lattice)
    report = VerificationReport(tolerance=tol)

    _check_range(report, m, lattice, tol)
    _check_limit(report, "gm1", m, tol, max(settings.fbound, 1))
    failed = False
    for subset in lattice:
        if subset.is_empty or not subset.has_finite_emission:
            continue
        value = m(subset)
        if not is_zero(value, tol):
            failed = True
            report.add("gm2", Verdict.FAIL, subset.label(), value)
    if not failed:
        report.add("gm2", Verdict.PASS, f"sets={len(lattice)}", Fraction(0))
    _check_additivity(report, "gm3", m, lattice, tol)
    return report


def vertex_lattice(graph: Ultragraph) -> Tuple[GeneralizedVertex, ...]:
    """Every subset of the vertices of a small finite ultragraph."""
    vertices = list(graph.vertices())
    subsets = itertools.chain.from_iterable(
        itertools.combinations(vertices, size) for size in range(len(vertices) + 1)
    )
    return tuple(graph.vertex_set(subset) for subset in subsets)

