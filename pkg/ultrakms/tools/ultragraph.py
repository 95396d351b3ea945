"""
Ultragraphs and their generalized vertices.

An ultragraph is a directed graph whose edges land on *sets* of vertices.
The sets we can talk about (the generalized vertices) are generated by the
singletons and the edge ranges under finite unions and nonempty
intersections. Under Condition (RFUM) every one of them is a finite union of
minimal infinite emitters plus a finite set of vertices that emit finitely
many edges, and that is exactly how we store them: a GeneralizedVertex is a
set of emitter names plus a finite vertex set disjoint from those emitters.

Two backends share one interface:
- FiniteUltragraph: everything listed explicitly (loaded from a .ug file).
- PresentedUltragraph: an infinite family described by rules (FamilyOracle),
  with its minimal emitters declared up front.
"""

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import structlog

from ultrakms.exceptions import (
    EmptyRange,
    EmptySetError,
    SinkDetected,
    UndecidableAtDepth,
    UnknownName,
)
from ultrakms.models import Verdict, VerificationReport
from ultrakms.tools.numbers import Number

logger = structlog.get_logger(__name__)

FINITE_BACKEND = "finite-explicit"
FAMILY_BACKEND = "presented-family"


@dataclass(frozen=True, order=True)
class Vertex:
    """A vertex: dense index plus the name it was declared with."""

    index: int
    name: str = field(compare=False)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Edge:
    """An edge: dense index plus its name."""

    index: int
    name: str = field(compare=False)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class GeneralizedVertex:
    """
    Canonical element of the generalized-vertex lattice.

    emitters: names of minimal infinite emitters (infinite-emitting single
    vertices are emitters too). finite: vertices with finite emission, none of
    them inside a listed emitter. Equal canonical forms mean equal sets.
    """

    emitters: FrozenSet[str] = frozenset()
    finite: FrozenSet[Vertex] = frozenset()

    @property
    def is_empty(self) -> bool:
        return not self.emitters and not self.finite

    @property
    def has_finite_emission(self) -> bool:
        return not self.emitters

    def label(self) -> str:
        parts = sorted(self.emitters)
        if self.finite:
            parts.append("{" + ",".join(v.name for v in sorted(self.finite)) + "}")
        return " | ".join(parts) if parts else "{}"

    def __str__(self) -> str:
        return self.label()


EMPTY = GeneralizedVertex()


@dataclass(frozen=True)
class Decomposition:
    """A generalized vertex split into its minimal emitters and its finite part."""

    minimal_parts: Tuple[str, ...]
    finite_part: FrozenSet[Vertex]


@dataclass(frozen=True, eq=False)
class EmitterSpec:
    """
    A declared minimal infinite emitter.

    contains: membership predicate. edges: lazy enumeration of epsilon(E).
    singleton: the vertex, when the emitter is a single infinite-emitting vertex.
    """

    name: str
    contains: Callable[[Vertex], bool]
    edges: Callable[[], Iterator[Edge]]
    singleton: Optional[Vertex] = None


class Emission:
    """epsilon(A): either a finite tuple of edges or a lazy infinite enumeration."""

    def __init__(
        self,
        finite: Optional[Tuple[Edge, ...]] = None,
        source: Optional[Callable[[], Iterator[Edge]]] = None,
    ):
        self._finite = finite
        self._source = source

    @property
    def is_finite(self) -> bool:
        return self._finite is not None

    @property
    def edges(self) -> Tuple[Edge, ...]:
        if self._finite is None:
            raise ValueError("emission is infinite; use take()")
        return self._finite

    def __iter__(self) -> Iterator[Edge]:
        if self._finite is not None:
            return iter(self._finite)
        assert self._source is not None
        return self._source()

    def take(self, count: int) -> Tuple[Edge, ...]:
        return tuple(itertools.islice(iter(self), count))


@dataclass(frozen=True)
class RfumResult:
    """Outcome of check_rfum: ok, or the first violating edge and why."""

    ok: bool
    edge: Optional[Edge] = None
    reason: str = ""


class Ultragraph(ABC):
    """Common interface of both backends."""

    backend: str = ""
    name: str = ""

    # ----- enumeration -------------------------------------------------

    @abstractmethod
    def vertices(self, limit: Optional[int] = None) -> Iterator[Vertex]:
        """Vertices in index order (presented families need a limit)."""

    @abstractmethod
    def edges(self, limit: Optional[int] = None) -> Iterator[Edge]:
        """Edges in index order (presented families need a limit)."""

    @abstractmethod
    def vertex(self, name: str) -> Vertex:
        """Look a vertex up by name (UnknownName if absent)."""

    @abstractmethod
    def edge(self, name: str) -> Edge:
        """Look an edge up by name (UnknownName if absent)."""

    @abstractmethod
    def source(self, edge: Edge) -> Vertex:
        ...

    @abstractmethod
    def range(self, edge: Edge) -> GeneralizedVertex:
        ...

    @abstractmethod
    def edges_from(self, vertex: Vertex) -> Tuple[Edge, ...]:
        """Outgoing edges of a finite-emission vertex."""

    @property
    @abstractmethod
    def emitters(self) -> Mapping[str, EmitterSpec]:
        ...

    @abstractmethod
    def overlap(self, first: str, second: str) -> FrozenSet[Vertex]:
        """Declared (finite) intersection of two distinct minimal emitters."""

    @abstractmethod
    def top(self) -> Optional[GeneralizedVertex]:
        """The largest generalized vertex, when there is one."""

    def exhaustion(self, count: int) -> Optional[List[GeneralizedVertex]]:
        """First `count` sets of a declared increasing exhausting sequence."""
        top = self.top()
        return None if top is None else [top]

    def declared_weight(self, edge: Edge) -> Optional[Number]:
        """N(e) when the ultragraph carries weights."""
        return None

    @property
    def is_finite(self) -> bool:
        return self.backend == FINITE_BACKEND

    # ----- lattice ---------------------------------------------------

    @cached_property
    def _singleton_emitters(self) -> Dict[Vertex, str]:
        return {
            spec.singleton: spec.name
            for spec in self.emitters.values()
            if spec.singleton is not None
        }

    def emitter_set(self, name: str) -> GeneralizedVertex:
        if name not in self.emitters:
            raise UnknownName(name)
        return GeneralizedVertex(emitters=frozenset([name]))

    def singleton(self, vertex: Vertex) -> GeneralizedVertex:
        return self.canonical(finite=[vertex])

    def vertex_set(self, vertices: Iterable[Vertex]) -> GeneralizedVertex:
        return self.canonical(finite=vertices)

    def emitter_contains(self, name: str, vertex: Vertex) -> bool:
        return self.emitters[name].contains(vertex)

    def has_finite_emission(self, vertex: Vertex) -> bool:
        return vertex not in self._singleton_emitters

    def canonical(
        self, emitters: Iterable[str] = (), finite: Iterable[Vertex] = ()
    ) -> GeneralizedVertex:
        """
        Normal form: infinite-emitting vertices become emitter references and
        vertices covered by a listed emitter are dropped from the finite part.
        """
        names = set(emitters)
        for name in names:
            if name not in self.emitters:
                raise UnknownName(name)
        loose = []
        for vertex in finite:
            as_emitter = self._singleton_emitters.get(vertex)
            if as_emitter is not None:
                names.add(as_emitter)
            else:
                loose.append(vertex)
        kept = frozenset(
            vertex
            for vertex in loose
            if not any(self.emitters[name].contains(vertex) for name in names)
        )
        return GeneralizedVertex(emitters=frozenset(names), finite=kept)

    def member(self, vertex: Vertex, subset: GeneralizedVertex) -> bool:
        if vertex in subset.finite:
            return True
        return any(self.emitters[name].contains(vertex) for name in subset.emitters)

    def union(self, *sets: GeneralizedVertex) -> GeneralizedVertex:
        emitters: set = set()
        finite: set = set()
        for item in sets:
            emitters |= item.emitters
            finite |= item.finite
        return self.canonical(emitters, finite)

    def _emitter_meet(self, name: str, other: GeneralizedVertex) -> set:
        """Vertices of emitter `name` lying in `other`, which does not list it."""
        spec = self.emitters[name]
        meet = {vertex for vertex in other.finite if spec.contains(vertex)}
        for other_name in other.emitters:
            meet |= self.overlap(name, other_name)
        return meet

    def intersection(self, first: GeneralizedVertex, second: GeneralizedVertex) -> GeneralizedVertex:
        common = first.emitters & second.emitters
        finite = set()
        for name in first.emitters - common:
            finite |= self._emitter_meet(name, second)
        for name in second.emitters - common:
            finite |= self._emitter_meet(name, first)
        finite |= {vertex for vertex in first.finite if self.member(vertex, second)}
        finite |= {vertex for vertex in second.finite if self.member(vertex, first)}
        return self.canonical(common, finite)

    def contains_set(self, outer: GeneralizedVertex, inner: GeneralizedVertex) -> bool:
        """inner is a subset of outer."""
        return self.intersection(outer, inner) == inner

    @cached_property
    def _overlap_cache(self) -> Dict[str, FrozenSet[Vertex]]:
        cache = {}
        for name in self.emitters:
            shared: set = set()
            for other in self.emitters:
                if other != name:
                    shared |= self.overlap(name, other)
            cache[name] = frozenset(shared)
        return cache

    def shared_vertices(self, name: str) -> FrozenSet[Vertex]:
        """Vertices of emitter `name` that also lie in some other declared emitter."""
        return self._overlap_cache[name]

    def emission(self, subset: GeneralizedVertex) -> Emission:
        """epsilon(A): finite exactly when A lists no emitter."""
        finite_edges = tuple(
            sorted(edge for vertex in subset.finite for edge in self.edges_from(vertex))
        )
        if not subset.emitters:
            return Emission(finite=finite_edges)
        names = sorted(subset.emitters)

        def enumerate_edges() -> Iterator[Edge]:
            seen = set()
            for edge in finite_edges:
                seen.add(edge)
                yield edge
            sources = [self.emitters[name].edges() for name in names]
            for batch in itertools.zip_longest(*sources):
                for edge in batch:
                    if edge is not None and edge not in seen:
                        seen.add(edge)
                        yield edge

        return Emission(source=enumerate_edges)

    def source_in(self, edge: Edge, subset: GeneralizedVertex) -> bool:
        return self.member(self.source(edge), subset)

    def decompose(self, subset: GeneralizedVertex) -> Decomposition:
        return Decomposition(
            minimal_parts=tuple(sorted(subset.emitters)), finite_part=subset.finite
        )

    def path_range(self, path: Sequence[Edge]) -> Optional[GeneralizedVertex]:
        """r(path), or None for the empty path (read as 'no restriction')."""
        return self.range(path[-1]) if path else None

    def is_path(self, path: Sequence[Edge]) -> bool:
        return all(
            self.member(self.source(nxt), self.range(prev))
            for prev, nxt in zip(path, path[1:])
        )

    # ----- validation ------------------------------------------------

    def validate(self, depth: int) -> None:
        """No sinks, nonempty ranges (presented families: within `depth`)."""
        for vertex in self.vertices(None if self.is_finite else depth):
            if self.has_finite_emission(vertex) and not self.edges_from(vertex):
                raise SinkDetected(vertex)
        for edge in self.edges(None if self.is_finite else depth):
            if self.range(edge).is_empty:
                raise EmptyRange(edge)

    def check_rfum(self, depth: int) -> RfumResult:
        return RfumResult(ok=True)

    def validate_emitters(self, depth: int) -> List[str]:
        """
        Bounded sanity checks on the declared emitters.

        Each must emit at least `depth` edges, a finite one must be a single
        vertex, and declared overlaps must agree with the membership
        predicates on the first `depth` vertices.
        """
        issues = []
        window = list(self.vertices(depth))
        for name, spec in sorted(self.emitters.items()):
            emitted = list(itertools.islice(spec.edges(), depth))
            if len(emitted) < depth:
                issues.append(f"{name}: only {len(emitted)} edges, not an infinite emitter")
            members = [vertex for vertex in window if spec.contains(vertex)]
            if spec.singleton is not None and members != [spec.singleton]:
                issues.append(f"{name}: declared singleton but contains {len(members)} vertices")
        for first, second in itertools.combinations(sorted(self.emitters), 2):
            declared = self.overlap(first, second)
            seen = {
                vertex
                for vertex in window
                if self.emitter_contains(first, vertex) and self.emitter_contains(second, vertex)
            }
            if seen != declared & set(window):
                issues.append(f"{first}/{second}: overlap disagrees with membership")
        return issues

    def admissibility_report(self, depth: int) -> VerificationReport:
        """validate, check_rfum and validate_emitters as report lines instead of raising."""
        report = VerificationReport()
        bound = None if self.is_finite else depth
        sinks = [
            vertex
            for vertex in self.vertices(bound)
            if self.has_finite_emission(vertex) and not self.edges_from(vertex)
        ]
        for vertex in sinks:
            report.add("no-sinks", Verdict.FAIL, vertex.name)
        if not sinks:
            report.add("no-sinks", Verdict.PASS)
        try:
            empty = [edge for edge in self.edges(bound) if self.range(edge).is_empty]
        except UndecidableAtDepth as exc:
            report.add("nonempty-ranges", Verdict.FAIL, f"{exc.edge} undecidable at depth {depth}")
        else:
            for edge in empty:
                report.add("nonempty-ranges", Verdict.FAIL, edge.name)
            if not empty:
                report.add("nonempty-ranges", Verdict.PASS)
        try:
            rfum = self.check_rfum(depth)
        except UndecidableAtDepth as exc:
            report.add("rfum", Verdict.FAIL, f"{exc.edge} undecidable at depth {depth}")
        else:
            if rfum.ok:
                report.add("rfum", Verdict.PASS if self.is_finite else Verdict.PASS_AT_DEPTH)
            else:
                report.add("rfum", Verdict.FAIL, f"{rfum.edge} {rfum.reason}")
        issues = self.validate_emitters(depth)
        for issue in issues:
            report.add("emitters", Verdict.FAIL, issue)
        if not issues:
            report.add("emitters", Verdict.PASS, f"declared={len(self.emitters)}")
        return report

    # ----- test lattice ----------------------------------------------

    def test_lattice(self, length: int) -> Tuple[GeneralizedVertex, ...]:
        """
        The default lattice the verifiers run on.

        The empty set, the top element, every vertex singleton among the first
        `length` vertices and every declared emitter, their pairwise unions, and
        the ranges of the first `length` edges.
        """
        generators: Dict[GeneralizedVertex, None] = {}
        top = self.top()
        if top is not None:
            generators[top] = None
        for vertex in self.vertices(length):
            generators[self.singleton(vertex)] = None
        for name in sorted(self.emitters):
            generators[self.emitter_set(name)] = None
        lattice: Dict[GeneralizedVertex, None] = {EMPTY: None}
        lattice.update(generators)
        for first, second in itertools.combinations(list(generators), 2):
            lattice[self.union(first, second)] = None
        for edge in self.edges(length):
            lattice[self.range(edge)] = None
        return tuple(lattice)


class FiniteUltragraph(Ultragraph):
    """An ultragraph with every vertex and edge listed."""

    backend = FINITE_BACKEND

    def __init__(
        self,
        vertex_names: Sequence[str],
        edge_specs: Sequence[Tuple[str, str, Sequence[str]]],
        weights: Optional[Mapping[str, Number]] = None,
        name: str = "ultragraph",
    ):
        self.name = name
        self._vertices = [Vertex(index, label) for index, label in enumerate(vertex_names)]
        self._vertex_by_name = {vertex.name: vertex for vertex in self._vertices}
        if len(self._vertex_by_name) != len(self._vertices):
            raise ValueError("duplicate vertex names")
        self._edges: List[Edge] = []
        self._source: Dict[Edge, Vertex] = {}
        self._range: Dict[Edge, GeneralizedVertex] = {}
        outgoing: Dict[Vertex, List[Edge]] = {vertex: [] for vertex in self._vertices}
        for index, (label, source_name, target_names) in enumerate(edge_specs):
            edge = Edge(index, label)
            self._edges.append(edge)
            self._source[edge] = self.vertex(source_name)
            self._range[edge] = GeneralizedVertex(
                finite=frozenset(self.vertex(target) for target in target_names)
            )
            outgoing[self._source[edge]].append(edge)
        self._edge_by_name = {edge.name: edge for edge in self._edges}
        if len(self._edge_by_name) != len(self._edges):
            raise ValueError("duplicate edge names")
        self._outgoing = {vertex: tuple(edges) for vertex, edges in outgoing.items()}
        self._weights: Dict[Edge, Number] = {
            self.edge(label): value for label, value in (weights or {}).items()
        }

    def vertices(self, limit: Optional[int] = None) -> Iterator[Vertex]:
        return iter(self._vertices[:limit])

    def edges(self, limit: Optional[int] = None) -> Iterator[Edge]:
        return iter(self._edges[:limit])

    def vertex(self, name: str) -> Vertex:
        try:
            return self._vertex_by_name[name]
        except KeyError:
            raise UnknownName(name) from None

    def edge(self, name: str) -> Edge:
        try:
            return self._edge_by_name[name]
        except KeyError:
            raise UnknownName(name) from None

    def source(self, edge: Edge) -> Vertex:
        return self._source[edge]

    def range(self, edge: Edge) -> GeneralizedVertex:
        return self._range[edge]

    def edges_from(self, vertex: Vertex) -> Tuple[Edge, ...]:
        return self._outgoing[vertex]

    @property
    def emitters(self) -> Mapping[str, EmitterSpec]:
        return {}

    def overlap(self, first: str, second: str) -> FrozenSet[Vertex]:
        raise UnknownName(first)

    def top(self) -> GeneralizedVertex:
        return GeneralizedVertex(finite=frozenset(self._vertices))

    def declared_weight(self, edge: Edge) -> Optional[Number]:
        return self._weights.get(edge)

    @property
    def vertex_count(self) -> int:
        return len(self._vertices)

    @property
    def edge_count(self) -> int:
        return len(self._edges)


@dataclass
class FamilyOracle:
    """
    Rules presenting an infinite ultragraph.

    range_rule returns the claimed decomposition of r(e) as (emitter names,
    finite vertices), or None when it cannot say; range_contains is the raw
    membership rule the claim is checked against. overlaps maps unordered
    emitter pairs to their (finite) intersection; missing pairs are disjoint.
    """

    name: str
    vertex_at: Callable[[int], Optional[Vertex]]
    vertex_named: Callable[[str], Optional[Vertex]]
    edge_at: Callable[[int], Optional[Edge]]
    edge_named: Callable[[str], Optional[Edge]]
    source: Callable[[Edge], Vertex]
    range_rule: Callable[[Edge], Optional[Tuple[FrozenSet[str], FrozenSet[Vertex]]]]
    range_contains: Callable[[Edge, Vertex], bool]
    edges_from: Callable[[Vertex], Tuple[Edge, ...]]
    emitters: Tuple[EmitterSpec, ...]
    overlaps: Mapping[FrozenSet[str], FrozenSet[Vertex]] = field(default_factory=dict)
    top: Optional[Tuple[FrozenSet[str], FrozenSet[Vertex]]] = None
    exhaustion: Optional[Callable[[int], Tuple[FrozenSet[str], FrozenSet[Vertex]]]] = None
    weight: Optional[Callable[[Edge], Number]] = None
    first_edge_index: int = 0


class PresentedUltragraph(Ultragraph):
    """An infinite ultragraph given by a FamilyOracle."""

    backend = FAMILY_BACKEND

    def __init__(self, oracle: FamilyOracle, depth: int = 64):
        self.oracle = oracle
        self.name = oracle.name
        self.depth = depth
        names = [spec.name for spec in oracle.emitters]
        if len(set(names)) != len(names):
            raise ValueError("declared minimal emitters must be pairwise distinct")
        self._emitters = {spec.name: spec for spec in oracle.emitters}
        self._range_cache: Dict[Edge, GeneralizedVertex] = {}

    def vertices(self, limit: Optional[int] = None) -> Iterator[Vertex]:
        if limit is None:
            raise ValueError("presented families need an enumeration limit")
        for index in range(limit):
            vertex = self.oracle.vertex_at(index)
            if vertex is None:
                return
            yield vertex

    def edges(self, limit: Optional[int] = None) -> Iterator[Edge]:
        if limit is None:
            raise ValueError("presented families need an enumeration limit")
        for index in range(self.oracle.first_edge_index, self.oracle.first_edge_index + limit):
            edge = self.oracle.edge_at(index)
            if edge is None:
                return
            yield edge

    def vertex(self, name: str) -> Vertex:
        vertex = self.oracle.vertex_named(name)
        if vertex is None:
            raise UnknownName(name)
        return vertex

    def edge(self, name: str) -> Edge:
        edge = self.oracle.edge_named(name)
        if edge is None:
            raise UnknownName(name)
        return edge

    def source(self, edge: Edge) -> Vertex:
        return self.oracle.source(edge)

    def range(self, edge: Edge) -> GeneralizedVertex:
        cached = self._range_cache.get(edge)
        if cached is not None:
            return cached
        claimed = self.oracle.range_rule(edge)
        if claimed is None:
            raise UndecidableAtDepth(edge, self.depth)
        emitters, finite = claimed
        value = self.canonical(emitters, finite)
        self._range_cache[edge] = value
        return value

    def edges_from(self, vertex: Vertex) -> Tuple[Edge, ...]:
        if not self.has_finite_emission(vertex):
            raise ValueError(f"{vertex} emits infinitely many edges")
        return self.oracle.edges_from(vertex)

    @property
    def emitters(self) -> Mapping[str, EmitterSpec]:
        return self._emitters

    def overlap(self, first: str, second: str) -> FrozenSet[Vertex]:
        if first == second:
            raise ValueError("overlap is defined for distinct emitters")
        return self.oracle.overlaps.get(frozenset((first, second)), frozenset())

    def top(self) -> Optional[GeneralizedVertex]:
        if self.oracle.top is None:
            return None
        return self.canonical(*self.oracle.top)

    def exhaustion(self, count: int) -> Optional[List[GeneralizedVertex]]:
        if self.oracle.exhaustion is None:
            return super().exhaustion(count)
        return [self.canonical(*self.oracle.exhaustion(step)) for step in range(count)]

    def declared_weight(self, edge: Edge) -> Optional[Number]:
        return None if self.oracle.weight is None else self.oracle.weight(edge)

    def check_rfum(self, depth: int) -> RfumResult:
        """
        Verify the claimed range decompositions of the first `depth` edges.

        Every emitter a range claims must be declared, and the claim must agree
        with the raw range rule on the first `depth` vertices.
        """
        window = list(self.vertices(depth))
        for edge in self.edges(depth):
            claimed = self.oracle.range_rule(edge)
            if claimed is None:
                raise UndecidableAtDepth(edge, depth)
            emitters, finite = claimed
            undeclared = sorted(set(emitters) - set(self._emitters))
            if undeclared:
                return RfumResult(
                    ok=False, edge=edge, reason=f"range uses undeclared emitter {undeclared[0]}"
                )
            value = self.canonical(emitters, finite)
            for vertex in window:
                if self.member(vertex, value) != self.oracle.range_contains(edge, vertex):
                    return RfumResult(
                        ok=False, edge=edge, reason=f"claimed range disagrees at {vertex}"
                    )
        logger.debug("rfum_checked", family=self.name, depth=depth)
        return RfumResult(ok=True)


# ----- lattice expressions ----------------------------------------------


class LatticeExpr(ABC):
    """Expression over edge ranges, vertex sets, emitters, union and intersection."""

    @abstractmethod
    def evaluate(self, graph: Ultragraph) -> GeneralizedVertex:
        ...


@dataclass(frozen=True)
class RangeOf(LatticeExpr):
    edge: str

    def evaluate(self, graph: Ultragraph) -> GeneralizedVertex:
        return graph.range(graph.edge(self.edge))


@dataclass(frozen=True)
class VertexList(LatticeExpr):
    names: Tuple[str, ...]

    def evaluate(self, graph: Ultragraph) -> GeneralizedVertex:
        return graph.vertex_set(graph.vertex(name) for name in self.names)


@dataclass(frozen=True)
class Named(LatticeExpr):
    """An emitter name, a vertex name, or `top`."""

    name: str

    def evaluate(self, graph: Ultragraph) -> GeneralizedVertex:
        if self.name in graph.emitters:
            return graph.emitter_set(self.name)
        if self.name.lower() == "top":
            top = graph.top()
            if top is None:
                raise UnknownName(self.name)
            return top
        return graph.singleton(graph.vertex(self.name))


@dataclass(frozen=True)
class Join(LatticeExpr):
    parts: Tuple[LatticeExpr, ...]

    def evaluate(self, graph: Ultragraph) -> GeneralizedVertex:
        return graph.union(*(part.evaluate(graph) for part in self.parts))


@dataclass(frozen=True)
class Meet(LatticeExpr):
    parts: Tuple[LatticeExpr, ...]

    def evaluate(self, graph: Ultragraph) -> GeneralizedVertex:
        value = self.parts[0].evaluate(graph)
        for part in self.parts[1:]:
            value = graph.intersection(value, part.evaluate(graph))
        return value


@dataclass(frozen=True)
class Literal(LatticeExpr):
    """An already canonical value, so canonical forms can be fed back in."""

    value: GeneralizedVertex

    def evaluate(self, graph: Ultragraph) -> GeneralizedVertex:
        return graph.canonical(self.value.emitters, self.value.finite)


def canonicalize(
    graph: Ultragraph, expr: LatticeExpr, allow_empty: bool = True
) -> GeneralizedVertex:
    """
    Evaluate a lattice expression to its canonical generalized vertex.

    The empty set comes back as EMPTY (p_empty = 0); pass allow_empty=False to
    have it raised instead.
    """
    value = expr.evaluate(graph)
    if value.is_empty and not allow_empty:
        raise EmptySetError("expression evaluates to the empty set")
    return value
