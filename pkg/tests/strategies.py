"""Hypothesis strategies for ultragraphs, KMS pairs, ultrapaths and cylinder sets."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

from hypothesis import strategies as st

from ultrakms.services.state_functions import MFunction, ScaledWeightM
from ultrakms.tools.parser import parse_set
from ultrakms.tools.shift_space import CylinderSet, Ultrapath, make_cylinder, ultrapath
from ultrakms.tools.ultragraph import Edge, FiniteUltragraph, GeneralizedVertex, Ultragraph, Vertex


@dataclass
class KmsPair:
    """A finite ultragraph with M and an exact m solving m2 for it."""

    graph: FiniteUltragraph
    m: MFunction
    weights: ScaledWeightM


@st.composite
def finite_ultragraphs(draw, max_vertices: int = 6, max_edges: int = 10) -> FiniteUltragraph:
    """
    No sinks, nonempty ranges of any size.

    Every vertex emits at least one edge; a single vertex gets two loops.
    """
    n = draw(st.integers(min_value=1, max_value=max_vertices))
    names = [f"v{i}" for i in range(n)]
    sources = list(range(n)) if n > 1 else [0, 0]
    extra = draw(
        st.lists(st.integers(min_value=0, max_value=n - 1), max_size=max(0, max_edges - len(sources)))
    )
    edges = []
    for index, source in enumerate(sources + extra, start=1):
        targets = draw(st.sets(st.integers(min_value=0, max_value=n - 1), min_size=1, max_size=n))
        edges.append((f"e{index}", names[source], [names[t] for t in sorted(targets)]))
    return FiniteUltragraph(names, edges, name="random")


def _outgoing_mass(graph: FiniteUltragraph, raw: Dict[Vertex, Fraction], vertex: Vertex) -> Fraction:
    return sum(sum(raw[t] for t in graph.range(edge).finite) for edge in graph.edges_from(vertex))


@st.composite
def kms_pairs(draw) -> KmsPair:
    """
    Pick m(v) in {2, 3}, set M(e) = m(s(e)) / sum over e' leaving s(e) of
    m(r(e')) and normalize; m2 then holds exactly on every singleton.

    When some vertex holds more than it emits (a lone edge onto a
    single-vertex range) M(e) would exceed 1, so m falls back to uniform.
    """
    graph = draw(finite_ultragraphs())
    raw = {vertex: Fraction(draw(st.sampled_from([2, 3]))) for vertex in graph.vertices()}
    if any(_outgoing_mass(graph, raw, vertex) < raw[vertex] for vertex in graph.vertices()):
        raw = {vertex: Fraction(1) for vertex in graph.vertices()}
    values: Dict[Edge, Fraction] = {}
    for vertex in graph.vertices():
        mass = _outgoing_mass(graph, raw, vertex)
        for edge in graph.edges_from(vertex):
            values[edge] = raw[vertex] / mass
    total = sum(raw.values())
    m = MFunction.from_vector(graph, {vertex: value / total for vertex, value in raw.items()})
    return KmsPair(graph, m, ScaledWeightM.from_values(values))


@st.composite
def subsets_of(draw, graph: Ultragraph, within: GeneralizedVertex) -> GeneralizedVertex:
    """Nonempty subset of a finite generalized vertex."""
    pool = sorted(within.finite)
    picked = draw(st.sets(st.sampled_from(pool), min_size=1, max_size=len(pool)))
    return graph.vertex_set(picked)


@st.composite
def finite_stems(draw, graph: Ultragraph, max_length: int = 2) -> List[Edge]:
    """A random walk of at most `max_length` edges."""
    length = draw(st.integers(min_value=0, max_value=max_length))
    stem: List[Edge] = []
    for _ in range(length):
        if stem:
            candidates = [
                edge
                for vertex in sorted(graph.range(stem[-1]).finite)
                for edge in graph.edges_from(vertex)
            ]
        else:
            candidates = list(graph.edges())
        stem.append(draw(st.sampled_from(candidates)))
    return stem


@st.composite
def ultrapaths(draw, graph: Ultragraph) -> Ultrapath:
    """A random walk ending in a nonempty subset of its last range."""
    stem = draw(finite_stems(graph))
    within = graph.range(stem[-1]) if stem else graph.top()
    return ultrapath(graph, stem, draw(subsets_of(graph, within)))


@st.composite
def finite_cylinders(draw, graph: Ultragraph) -> CylinderSet:
    stem = draw(finite_stems(graph))
    within = graph.range(stem[-1]) if stem else graph.top()
    base = draw(subsets_of(graph, within))
    emitted = sorted(graph.emission(base))
    excluded = draw(st.sets(st.sampled_from(emitted), max_size=len(emitted)))
    return make_cylinder(graph, stem, base, excluded)


@st.composite
def overlapping_cylinders(draw, graph: Ultragraph, first: CylinderSet) -> CylinderSet:
    """A cylinder whose stem is a prefix or a one-edge extension of first's."""
    cut = draw(st.integers(min_value=0, max_value=len(first.stem)))
    stem = list(first.stem[:cut])
    if cut == len(first.stem) and draw(st.booleans()):
        within = graph.range(stem[-1]) if stem else graph.top()
        candidates = sorted(graph.emission(within))
        stem.append(draw(st.sampled_from(candidates)))
    within = graph.range(stem[-1]) if stem else graph.top()
    base = draw(subsets_of(graph, within))
    emitted = sorted(graph.emission(base))
    excluded = draw(st.sets(st.sampled_from(emitted), max_size=len(emitted)))
    return make_cylinder(graph, stem, base, excluded)


# ----- sec6 ---------------------------------------------------------------

SEC6_EDGES = ("e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8", "f1", "f2", "f3")
SEC6_BASES = ("B", "w", "v1", "v2", "v3", "v4", "v5", "r(f1)", "top")


@st.composite
def sec6_stems(draw, graph: Ultragraph, max_length: int = 2) -> List[Edge]:
    pool = [graph.edge(name) for name in SEC6_EDGES]
    length = draw(st.integers(min_value=0, max_value=max_length))
    stem: List[Edge] = []
    for _ in range(length):
        if stem:
            candidates = [edge for edge in pool if graph.source_in(edge, graph.range(stem[-1]))]
        else:
            candidates = pool
        stem.append(draw(st.sampled_from(candidates)))
    return stem


@st.composite
def sec6_cylinders(
    draw, graph: Ultragraph, stem: Optional[List[Edge]] = None
) -> Optional[CylinderSet]:
    """Random cylinder over the first few edges; None when the base misses r(stem)."""
    stem = draw(sec6_stems(graph)) if stem is None else stem
    names = draw(st.lists(st.sampled_from(SEC6_BASES), min_size=1, max_size=2))
    base = graph.union(*(parse_set(graph, name) for name in names))
    if stem:
        base = graph.intersection(base, graph.range(stem[-1]))
    if base.is_empty:
        return None
    pool = [graph.edge(name) for name in SEC6_EDGES]
    excluded = draw(st.sets(st.sampled_from(pool), max_size=3))
    return make_cylinder(graph, stem, base, excluded)


@st.composite
def sec6_cylinder_pairs(draw, graph: Ultragraph):
    first = draw(sec6_cylinders(graph))
    if first is None:
        return None, None
    cut = draw(st.integers(min_value=0, max_value=len(first.stem)))
    stem = list(first.stem[:cut])
    if cut == len(first.stem) and draw(st.booleans()):
        pool = [graph.edge(name) for name in SEC6_EDGES]
        within = graph.range(stem[-1]) if stem else graph.top()
        stem.append(draw(st.sampled_from([e for e in pool if graph.source_in(e, within)])))
    second = draw(sec6_cylinders(graph, stem=stem))
    return first, second
