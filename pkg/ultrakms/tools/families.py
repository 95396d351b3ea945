"""
Built-in presented families.

sec6 is the ultragraph with vertices w, v1, v2, ... whose edges e_i leave v_i
and f_i leave w:

    r(e_i) = {v_i} | B           for i <= 3
    r(e_i) = {v_(i-3), v_i}      for i >= 4
    r(f_i) = G0 = {v1, v2, v3} | B

with B = {v4, v5, ...}. The minimal infinite emitters are {w} and B, and
F0 = {w} | G0 is the largest generalized vertex. Edge indices interleave the
two kinds (e_i has index 2i - 1, f_i has index 2i) so a bounded enumeration
sees both.
"""

import itertools
import re
from typing import Callable, Dict, FrozenSet, Iterator, Optional, Tuple

from ultrakms.models import Sec6Params
from ultrakms.tools.numbers import Number
from ultrakms.tools.ultragraph import (
    Edge,
    EmitterSpec,
    FamilyOracle,
    PresentedUltragraph,
    Vertex,
)

_VERTEX_NAME = re.compile(r"^v([1-9][0-9]*)$")
_EDGE_NAME = re.compile(r"^([ef])([1-9][0-9]*)$")

W = Vertex(0, "w")
EMITTER_W = "w"
EMITTER_B = "B"


def sec6_vertex(index: int) -> Vertex:
    return W if index == 0 else Vertex(index, f"v{index}")


def e_edge(i: int) -> Edge:
    return Edge(2 * i - 1, f"e{i}")


def f_edge(i: int) -> Edge:
    return Edge(2 * i, f"f{i}")


def edge_kind(edge: Edge) -> Tuple[str, int]:
    """('e', i) or ('f', i)."""
    if edge.index % 2:
        return "e", (edge.index + 1) // 2
    return "f", edge.index // 2


def _vertex_named(name: str) -> Optional[Vertex]:
    if name == "w":
        return W
    match = _VERTEX_NAME.match(name)
    return sec6_vertex(int(match.group(1))) if match else None


def _edge_named(name: str) -> Optional[Edge]:
    match = _EDGE_NAME.match(name)
    if not match:
        return None
    i = int(match.group(2))
    return e_edge(i) if match.group(1) == "e" else f_edge(i)


def _edge_at(index: int) -> Optional[Edge]:
    if index < 1:
        return None
    return e_edge((index + 1) // 2) if index % 2 else f_edge(index // 2)


def _source(edge: Edge) -> Vertex:
    kind, i = edge_kind(edge)
    return sec6_vertex(i) if kind == "e" else W


_G0_FINITE = frozenset(sec6_vertex(i) for i in (1, 2, 3))


def _range_rule(edge: Edge) -> Tuple[FrozenSet[str], FrozenSet[Vertex]]:
    kind, i = edge_kind(edge)
    if kind == "f":
        return frozenset([EMITTER_B]), _G0_FINITE
    if i <= 3:
        return frozenset([EMITTER_B]), frozenset([sec6_vertex(i)])
    return frozenset(), frozenset([sec6_vertex(i - 3), sec6_vertex(i)])


def _range_contains(edge: Edge, vertex: Vertex) -> bool:
    """Row of the 0-1 matrix the family is built from (plus f_i -> G0)."""
    if vertex.index == 0:
        return False
    kind, i = edge_kind(edge)
    if kind == "f":
        return True
    if i <= 3:
        return vertex.index == i or vertex.index >= 4
    return vertex.index in (i - 3, i)


def _edges_from(vertex: Vertex) -> Tuple[Edge, ...]:
    if vertex.index == 0:
        raise ValueError("w emits infinitely many edges")
    return (e_edge(vertex.index),)


def _f_edges() -> Iterator[Edge]:
    return (f_edge(i) for i in itertools.count(1))


def _b_edges() -> Iterator[Edge]:
    return (e_edge(i) for i in itertools.count(4))


def sec6_weight_rule(params: Sec6Params) -> Callable[[Edge], Number]:
    """N(e_i) = d, N(f_i) = c_i."""

    def weight(edge: Edge) -> Number:
        kind, i = edge_kind(edge)
        return params.d if kind == "e" else params.c(i)

    return weight


def sec6_oracle(params: Sec6Params) -> FamilyOracle:
    top = (frozenset([EMITTER_W, EMITTER_B]), _G0_FINITE)
    return FamilyOracle(
        name="sec6",
        vertex_at=sec6_vertex,
        vertex_named=_vertex_named,
        edge_at=_edge_at,
        edge_named=_edge_named,
        source=_source,
        range_rule=_range_rule,
        range_contains=_range_contains,
        edges_from=_edges_from,
        emitters=(
            EmitterSpec(EMITTER_B, contains=lambda v: v.index >= 4, edges=_b_edges),
            EmitterSpec(EMITTER_W, contains=lambda v: v.index == 0, edges=_f_edges, singleton=W),
        ),
        overlaps={},
        top=top,
        exhaustion=lambda step: top,
        weight=sec6_weight_rule(params),
        first_edge_index=1,
    )


def build_sec6(params: Sec6Params, depth: int = 64) -> PresentedUltragraph:
    """The sec6 ultragraph with N(e_i) = d and N(f_i) = c_i."""
    return PresentedUltragraph(sec6_oracle(params), depth=depth)


BUILTIN_FAMILIES: Dict[str, Callable[..., PresentedUltragraph]] = {"sec6": build_sec6}
