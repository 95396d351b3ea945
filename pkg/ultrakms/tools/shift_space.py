"""
Ultrapaths, the shift space X and its cylinder sets.

A point of X is either an infinite path or a finite ultrapath (alpha, E)
ending in a minimal infinite emitter E. The basis sets are the cylinders
D_{(beta,B),F}: points that follow the stem beta and then either stop in an
emitter inside B or continue through an edge leaving B that is not in F.

All cylinders with the same stem are described by their continuations: the
emitters a point may stop in, and the edges it may take next. The set
algebra below works on a normal form of those continuations
(`Continuations`), which turns intersection, relative complement and union
into finite set operations and reads back off as disjoint basis cylinders.

Membership of concrete points (`cyl_member`) is kept independent of the
normal form so it can serve as the oracle the algebra is tested against.
"""

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

import structlog

from ultrakms.config import settings
from ultrakms.exceptions import (
    DomainViolation,
    NoExhaustingSequence,
    NotSubset,
)
from ultrakms.tools.ultragraph import Edge, GeneralizedVertex, Ultragraph

logger = structlog.get_logger(__name__)

Path = Tuple[Edge, ...]


# ----- ultrapaths ---------------------------------------------------------


@dataclass(frozen=True)
class Ultrapath:
    """
    (alpha, A) with A inside r(alpha); length 0 is the pair (A, A).

    Build through `ultrapath()` so the path and terminal are checked.
    """

    edges: Path
    terminal: GeneralizedVertex

    def __len__(self) -> int:
        return len(self.edges)

    def label(self) -> str:
        stem = " ".join(edge.name for edge in self.edges)
        return f"({stem} ; {self.terminal.label()})"


def ultrapath(
    graph: Ultragraph, edges: Sequence[Edge] = (), terminal: Optional[GeneralizedVertex] = None
) -> Ultrapath:
    edges = tuple(edges)
    if not graph.is_path(edges):
        raise DomainViolation(f"{' '.join(e.name for e in edges)} is not a path")
    if not edges:
        if terminal is None or terminal.is_empty:
            raise DomainViolation("a length-0 ultrapath needs a nonempty set")
        return Ultrapath((), terminal)
    last_range = graph.range(edges[-1])
    if terminal is None:
        return Ultrapath(edges, last_range)
    if terminal.is_empty or not graph.contains_set(last_range, terminal):
        raise DomainViolation(f"{terminal} is not a nonempty subset of r({edges[-1]})")
    return Ultrapath(edges, terminal)


def concat(graph: Ultragraph, x: Ultrapath, y: Ultrapath) -> Optional[Ultrapath]:
    """
    x . y, or None when undefined.

    Two sets concatenate to their (nonempty) intersection, a set followed by
    a path needs the path to start inside it, a path followed by a set
    shrinks the terminal, and two paths need s(y) in the terminal of x.
    """
    if not x.edges and not y.edges:
        meet = graph.intersection(x.terminal, y.terminal)
        return None if meet.is_empty else Ultrapath((), meet)
    if not x.edges:
        return y if graph.source_in(y.edges[0], x.terminal) else None
    if not y.edges:
        meet = graph.intersection(x.terminal, y.terminal)
        return None if meet.is_empty else Ultrapath(x.edges, meet)
    if not graph.source_in(y.edges[0], x.terminal):
        return None
    return Ultrapath(x.edges + y.edges, y.terminal)


def concat_prefix(graph: Ultragraph, x: Ultrapath, prefix: Sequence[Edge]) -> Optional[Path]:
    """x followed by (a prefix of) an infinite path: defined iff s(prefix) is in r(x)."""
    prefix = tuple(prefix)
    if not prefix:
        return x.edges
    if not graph.source_in(prefix[0], x.terminal):
        return None
    return x.edges + prefix


def initial_segment(graph: Ultragraph, x: Ultrapath, y: Ultrapath) -> bool:
    """True when x = y . x' for some ultrapath x'."""
    n = len(y.edges)
    if x.edges[:n] != y.edges:
        return False
    if len(x.edges) == n:
        return graph.contains_set(y.terminal, x.terminal)
    return graph.source_in(x.edges[n], y.terminal)


# ----- points -------------------------------------------------------------


@dataclass(frozen=True)
class XfinPoint:
    """The finite point (path, E) with E a minimal infinite emitter inside r(path)."""

    path: Path
    emitter: str

    def label(self) -> str:
        return f"<{' '.join(e.name for e in self.path)} ; {self.emitter}>"


@dataclass(frozen=True)
class PathPrefix:
    """A finite prefix of an infinite path."""

    edges: Path

    def label(self) -> str:
        return f"<{' '.join(e.name for e in self.edges)} ...>"


Point = Union[XfinPoint, PathPrefix]


class Membership(Enum):
    NEED_LONGER_PREFIX = "need-longer-prefix"


NEED_LONGER_PREFIX = Membership.NEED_LONGER_PREFIX


# ----- cylinders ----------------------------------------------------------


class CylinderKind(str, Enum):
    MIN_EMITTER = "min-emitter"
    FINITE_EMISSION = "finite-emission"
    MIXED = "mixed"


@dataclass(frozen=True)
class CylinderSet:
    """
    D_{(stem, base), excluded}.

    Built through `make_cylinder`, which keeps base inside r(stem) and the
    excluded edges inside epsilon(base). Basis elements are MIN_EMITTER
    (base is one minimal emitter) and FINITE_EMISSION with nothing excluded;
    everything else is MIXED and `cyl_refine` splits it into basis elements.
    """

    stem: Path
    base: GeneralizedVertex
    excluded: FrozenSet[Edge] = frozenset()

    @property
    def kind(self) -> CylinderKind:
        if len(self.base.emitters) == 1 and not self.base.finite:
            return CylinderKind.MIN_EMITTER
        if not self.base.emitters and not self.excluded:
            return CylinderKind.FINITE_EMISSION
        return CylinderKind.MIXED

    @property
    def is_basis(self) -> bool:
        return self.kind is not CylinderKind.MIXED

    def sort_key(self) -> tuple:
        return (
            tuple(edge.index for edge in self.stem),
            self.base.label(),
            tuple(sorted(edge.index for edge in self.excluded)),
        )

    def mentioned_edges(self) -> Set[Edge]:
        return set(self.stem) | set(self.excluded)

    def label(self) -> str:
        stem = " ".join(edge.name for edge in self.stem)
        excluded = " ".join(edge.name for edge in sorted(self.excluded))
        return f"({stem} ; {self.base.label()} ; {excluded})"

    def __str__(self) -> str:
        return self.label()


def make_cylinder(
    graph: Ultragraph,
    stem: Sequence[Edge] = (),
    base: Optional[GeneralizedVertex] = None,
    excluded: Iterable[Edge] = (),
) -> CylinderSet:
    """
    Normalized cylinder; base defaults to r(stem).

    The base is cut down to r(stem) and excluded edges not leaving the base
    are dropped, so equal normal forms describe equal sets.
    """
    stem = tuple(stem)
    if not graph.is_path(stem):
        raise DomainViolation(f"{' '.join(e.name for e in stem)} is not a path")
    if base is None:
        if not stem:
            raise DomainViolation("a cylinder with an empty stem needs a base")
        base = graph.range(stem[-1])
    elif stem:
        base = graph.intersection(base, graph.range(stem[-1]))
    kept = frozenset(edge for edge in excluded if graph.source_in(edge, base))
    return CylinderSet(stem, base, kept)


def source_set(graph: Ultragraph, subset: GeneralizedVertex) -> CylinderSet:
    """X_A = D_{(A, A)}: every point starting in A."""
    return make_cylinder(graph, (), subset)


# ----- membership oracle --------------------------------------------------


def _continues(graph: Ultragraph, cylinder: CylinderSet, edge: Edge) -> bool:
    return edge not in cylinder.excluded and graph.source_in(edge, cylinder.base)


def cyl_member(
    graph: Ultragraph, point: Point, cylinder: CylinderSet
) -> Union[bool, Membership]:
    """
    Decide whether a point lies in a cylinder.

    Infinite-path prefixes are decided once they reach one edge past the stem
    (or already disagree with it); shorter ones give NEED_LONGER_PREFIX.
    """
    stem = cylinder.stem
    n = len(stem)
    if isinstance(point, XfinPoint):
        path = point.path
        if len(path) < n or path[:n] != stem:
            return False
        if len(path) == n:
            return point.emitter in cylinder.base.emitters
        return _continues(graph, cylinder, path[n])
    edges = point.edges
    shared = min(len(edges), n)
    if edges[:shared] != stem[:shared]:
        return False
    if len(edges) <= n:
        return NEED_LONGER_PREFIX
    return _continues(graph, cylinder, edges[n])


# ----- continuation normal form --------------------------------------------


def _core_owner(graph: Ultragraph, edge: Edge) -> Optional[str]:
    """The emitter whose unshared part emits `edge`, if any."""
    vertex = graph.source(edge)
    for name, spec in graph.emitters.items():
        if spec.contains(vertex) and vertex not in graph.shared_vertices(name):
            return name
    return None


def _shared_edges(graph: Ultragraph, name: str) -> FrozenSet[Edge]:
    return frozenset(
        edge for vertex in graph.shared_vertices(name) for edge in graph.edges_from(vertex)
    )


@dataclass(frozen=True)
class Continuations:
    """
    What may follow a stem.

    cores maps each emitter E the set allows stopping in to the edges excluded
    from E's unshared emission (always finitely many); edges lists the other
    allowed continuation edges (finitely many, none inside a listed core).
    """

    cores: Mapping[str, FrozenSet[Edge]] = field(default_factory=dict)
    edges: FrozenSet[Edge] = frozenset()

    @property
    def is_empty(self) -> bool:
        return not self.cores and not self.edges


def continuations(graph: Ultragraph, cylinder: CylinderSet) -> Continuations:
    base = cylinder.base
    excluded = cylinder.excluded
    cores: Dict[str, FrozenSet[Edge]] = {}
    for name in base.emitters:
        cores[name] = frozenset(edge for edge in excluded if _core_owner(graph, edge) == name)
    loose: Set[Edge] = set()
    for vertex in base.finite:
        loose.update(graph.edges_from(vertex))
    for name in base.emitters:
        loose |= _shared_edges(graph, name)
    loose -= excluded
    loose = {edge for edge in loose if _core_owner(graph, edge) not in cores}
    return Continuations(cores, frozenset(loose))


def _allows(graph: Ultragraph, state: Continuations, edge: Edge) -> bool:
    if edge in state.edges:
        return True
    owner = _core_owner(graph, edge)
    return owner in state.cores and edge not in state.cores[owner]


def _minus(graph: Ultragraph, first: Continuations, second: Continuations) -> Continuations:
    cores = {}
    for name in first.cores.keys() - second.cores.keys():
        filled = {edge for edge in second.edges if _core_owner(graph, edge) == name}
        cores[name] = first.cores[name] | filled
    loose = {edge for edge in first.edges if not _allows(graph, second, edge)}
    for name in first.cores.keys() & second.cores.keys():
        loose |= second.cores[name] - first.cores[name]
    return Continuations(cores, frozenset(loose))


def _without_edge(graph: Ultragraph, state: Continuations, edge: Edge) -> Continuations:
    owner = _core_owner(graph, edge)
    if owner in state.cores:
        cores = dict(state.cores)
        cores[owner] = cores[owner] | {edge}
        return Continuations(cores, state.edges)
    return Continuations(state.cores, state.edges - {edge})


def _full_extension(graph: Ultragraph, stem: Path) -> List[CylinderSet]:
    """D_{(stem, r(stem))} as basis cylinders."""
    whole = make_cylinder(graph, stem)
    if whole.is_basis:
        return [whole]
    return _pieces(graph, stem, continuations(graph, whole))


def _pieces(graph: Ultragraph, stem: Path, state: Continuations) -> List[CylinderSet]:
    """
    Disjoint basis cylinders covering exactly the points a normal form allows.

    One MIN_EMITTER piece per core (its shared edges excluded), a vertex piece
    when every edge of a finite-emission vertex is allowed, and one extended
    stem per remaining edge.
    """
    pieces = []
    for name in sorted(state.cores):
        pieces.append(
            CylinderSet(
                stem,
                graph.emitter_set(name),
                frozenset(state.cores[name] | _shared_edges(graph, name)),
            )
        )
    by_source: Dict = {}
    for edge in state.edges:
        by_source.setdefault(graph.source(edge), set()).add(edge)
    for vertex in sorted(by_source):
        edges = by_source[vertex]
        if graph.has_finite_emission(vertex) and edges == set(graph.edges_from(vertex)):
            pieces.append(CylinderSet(stem, graph.singleton(vertex)))
            continue
        for edge in sorted(edges):
            pieces.extend(_full_extension(graph, stem + (edge,)))
    return pieces


def _sorted(pieces: Iterable[CylinderSet]) -> List[CylinderSet]:
    return sorted(pieces, key=lambda piece: piece.sort_key())


# ----- semi-ring operations -----------------------------------------------


def is_empty(graph: Ultragraph, cylinder: Optional[CylinderSet]) -> bool:
    if cylinder is None:
        return True
    base = cylinder.base
    if base.emitters:
        return False
    return all(edge in cylinder.excluded for edge in graph.emission(base))


def _is_prefix(short: Path, long: Path) -> bool:
    return len(short) <= len(long) and long[: len(short)] == short


def cyl_intersect(
    graph: Ultragraph, first: CylinderSet, second: CylinderSet
) -> Optional[CylinderSet]:
    """
    C1 & C2 as a cylinder, or None when empty.

    Equal stems meet in (stem, B1 & B2, F1 | F2), which may be MIXED; a longer
    stem is absorbed when its next edge is allowed by the shorter cylinder.
    """
    if len(first.stem) > len(second.stem):
        first, second = second, first
    if not _is_prefix(first.stem, second.stem):
        return None
    if len(first.stem) < len(second.stem):
        following = second.stem[len(first.stem)]
        if not _continues(graph, first, following) or is_empty(graph, second):
            return None
        return second
    meet = make_cylinder(
        graph,
        first.stem,
        graph.intersection(first.base, second.base),
        first.excluded | second.excluded,
    )
    return None if is_empty(graph, meet) else meet


def disjoint(graph: Ultragraph, first: CylinderSet, second: CylinderSet) -> bool:
    return cyl_intersect(graph, first, second) is None


def cyl_refine(
    graph: Ultragraph, cylinder: CylinderSet, expand_finite: bool = False
) -> List[CylinderSet]:
    """
    Split a cylinder into disjoint basis cylinders.

    Basis elements come back unchanged unless expand_finite is set, in which
    case D_{(a,A)} with finite emission becomes the union over e in
    epsilon(A) of D_{(ae, r(e))}.
    """
    if is_empty(graph, cylinder):
        return []
    kind = cylinder.kind
    if kind is CylinderKind.FINITE_EMISSION and expand_finite:
        pieces = []
        for edge in graph.emission(cylinder.base):
            pieces.extend(_full_extension(graph, cylinder.stem + (edge,)))
        return _sorted(pieces)
    if cylinder.is_basis:
        return [cylinder]
    return _sorted(_pieces(graph, cylinder.stem, continuations(graph, cylinder)))


def cyl_difference(
    graph: Ultragraph, whole: CylinderSet, removed: CylinderSet
) -> List[CylinderSet]:
    """
    whole minus removed as disjoint basis cylinders (no containment needed).

    When removed has the longer stem, the edge leading towards it is split
    off and the recursion continues one level down.
    """
    if is_empty(graph, whole):
        return []
    stem, other = whole.stem, removed.stem
    if _is_prefix(other, stem) and len(other) < len(stem):
        inside = _continues(graph, removed, stem[len(other)])
        return [] if inside else cyl_refine(graph, whole)
    if not _is_prefix(stem, other):
        return cyl_refine(graph, whole)
    state = continuations(graph, whole)
    if len(other) == len(stem):
        return _sorted(_pieces(graph, stem, _minus(graph, state, continuations(graph, removed))))
    following = other[len(stem)]
    if not _allows(graph, state, following):
        return cyl_refine(graph, whole)
    pieces = _pieces(graph, stem, _without_edge(graph, state, following))
    for child in _full_extension(graph, stem + (following,)):
        pieces.extend(cyl_difference(graph, child, removed))
    return _sorted(pieces)


def cyl_subset(graph: Ultragraph, inner: CylinderSet, outer: CylinderSet) -> bool:
    return not cyl_difference(graph, inner, outer)


def cyl_diff(graph: Ultragraph, whole: CylinderSet, removed: CylinderSet) -> List[CylinderSet]:
    """Relative complement of a contained cylinder; NotSubset otherwise."""
    if not cyl_subset(graph, removed, whole):
        raise NotSubset(f"{removed.label()} is not contained in {whole.label()}")
    pieces = cyl_difference(graph, whole, removed)
    logger.debug("cyl_diff", whole=whole.label(), removed=removed.label(), pieces=len(pieces))
    return pieces


def disjointify(graph: Ultragraph, cylinders: Iterable[CylinderSet]) -> List[CylinderSet]:
    """Disjoint basis cylinders whose union is the union of the inputs."""
    result: List[CylinderSet] = []
    for cylinder in cylinders:
        fresh = cyl_refine(graph, cylinder)
        for existing in result:
            fresh = [piece for part in fresh for piece in cyl_difference(graph, part, existing)]
        result.extend(fresh)
    return _sorted(result)


# ----- partial action -----------------------------------------------------


@dataclass(frozen=True)
class WordLetter:
    """An edge generator or its inverse."""

    edge: Edge
    inverse: bool = False

    def label(self) -> str:
        return f"{self.edge.name}^-1" if self.inverse else self.edge.name


def _theta_letter(graph: Ultragraph, letter: WordLetter, cylinder: CylinderSet) -> CylinderSet:
    edge = letter.edge
    if letter.inverse:
        if not cylinder.stem or cylinder.stem[0] != edge:
            raise DomainViolation(f"stem of {cylinder.label()} does not start with {edge}")
        return CylinderSet(cylinder.stem[1:], cylinder.base, cylinder.excluded)
    edge_range = graph.range(edge)
    if cylinder.stem:
        if not graph.source_in(cylinder.stem[0], edge_range):
            raise DomainViolation(f"{cylinder.label()} does not start inside r({edge})")
    elif not graph.contains_set(edge_range, cylinder.base):
        raise DomainViolation(f"base of {cylinder.label()} is not inside r({edge})")
    return CylinderSet((edge,) + cylinder.stem, cylinder.base, cylinder.excluded)


def theta_apply(
    graph: Ultragraph, word: Sequence[WordLetter], cylinder: CylinderSet
) -> CylinderSet:
    """
    theta_c(V) for a word c of edges and inverse edges, read right to left.

    theta_e prepends e (V must start inside r(e)); theta_{e^-1} strips a
    leading e.
    """
    for letter in reversed(tuple(word)):
        cylinder = _theta_letter(graph, letter, cylinder)
    return cylinder


def domain_contains(graph: Ultragraph, word: Sequence[WordLetter], cylinder: CylinderSet) -> bool:
    try:
        theta_apply(graph, word, cylinder)
    except DomainViolation:
        return False
    return True


def inverse_word(word: Sequence[WordLetter]) -> Tuple[WordLetter, ...]:
    return tuple(WordLetter(letter.edge, not letter.inverse) for letter in reversed(tuple(word)))


# ----- sampling -------------------------------------------------------------


def _windows(
    graph: Ultragraph, mentioned: Iterable[Edge], window: int
) -> Dict[str, Tuple[Edge, ...]]:
    mentioned = set(mentioned)
    windows = {}
    for name, spec in graph.emitters.items():
        own = {edge for edge in mentioned if spec.contains(graph.source(edge))}
        first = itertools.islice(spec.edges(), window + len(own))
        windows[name] = tuple(sorted(set(first) | own))
    return windows


def _next_edges(
    graph: Ultragraph, terminal: GeneralizedVertex, windows: Mapping[str, Tuple[Edge, ...]]
) -> List[Edge]:
    edges: Set[Edge] = set()
    for vertex in terminal.finite:
        edges.update(graph.edges_from(vertex))
    for name in terminal.emitters:
        edges.update(windows[name])
    return sorted(edges)


def sample_points(
    graph: Ultragraph,
    root: Sequence[Edge] = (),
    depth: int = 1,
    mentioned: Iterable[Edge] = (),
    window: Optional[int] = None,
) -> List[Point]:
    """
    Deterministic finite sample of the points under `root`.

    Every finite point (alpha, E) with |alpha| < depth and every path prefix of
    length `depth`. Infinite emitters contribute their first `window` edges
    plus the mentioned edges they emit; finite graphs are enumerated fully.
    """
    window = settings.edge_window if window is None else window
    windows = _windows(graph, mentioned, window)
    root = tuple(root)
    if root:
        terminal = graph.range(root[-1])
    else:
        top = graph.top()
        if top is None:
            raise NoExhaustingSequence("sampling from the empty stem needs a top element")
        terminal = top
    points: List[Point] = []

    def walk(prefix: Path, current: GeneralizedVertex) -> None:
        if len(prefix) >= depth:
            points.append(PathPrefix(prefix))
            return
        for name in sorted(current.emitters):
            points.append(XfinPoint(prefix, name))
        for edge in _next_edges(graph, current, windows):
            walk(prefix + (edge,), graph.range(edge))

    walk(root, terminal)
    return points


def _needed_depth(cylinders: Iterable[CylinderSet]) -> int:
    return max((len(c.stem) + 1 for c in cylinders), default=1)


@dataclass
class PartitionCheck:
    """Outcome of comparing pieces with a target set on sampled points."""

    ok: bool
    points: int = 0
    undecided: int = 0
    witness: str = ""


def check_partition(
    graph: Ultragraph,
    inside: Callable[[Point], Union[bool, Membership]],
    pieces: Sequence[CylinderSet],
    root: Sequence[Edge] = (),
    mentioned: Iterable[Edge] = (),
    depth: Optional[int] = None,
    limit: Optional[int] = None,
) -> PartitionCheck:
    """
    Check on sampled points that every point of the target lies in exactly
    one piece and no other point lies in any piece.

    Sampling goes as deep as the longest stem needs, capped at `limit`;
    points that cannot be decided at that depth are counted, not judged.
    """
    limit = settings.depth if limit is None else limit
    needed = max(_needed_depth(pieces), len(tuple(root)) + 1, depth or 0)
    depth = min(needed, max(limit, len(tuple(root)) + 1))
    mentioned = set(mentioned)
    for piece in pieces:
        mentioned |= piece.mentioned_edges()
    result = PartitionCheck(ok=True)
    for point in sample_points(graph, root, depth, mentioned):
        expected = inside(point)
        hits = [cyl_member(graph, point, piece) for piece in pieces]
        if expected is NEED_LONGER_PREFIX or NEED_LONGER_PREFIX in hits:
            result.undecided += 1
            continue
        result.points += 1
        count = sum(1 for hit in hits if hit is True)
        if count != (1 if expected else 0):
            result.ok = False
            result.witness = point.label()
            return result
    return result


def verify_difference(
    graph: Ultragraph, whole: CylinderSet, removed: CylinderSet, pieces: Sequence[CylinderSet]
) -> PartitionCheck:
    """Pieces partition whole minus removed (membership oracle)."""

    def inside(point: Point) -> Union[bool, Membership]:
        first = cyl_member(graph, point, whole)
        if first is not True:
            return first
        second = cyl_member(graph, point, removed)
        if second is NEED_LONGER_PREFIX:
            return second
        return not second

    return check_partition(
        graph,
        inside,
        pieces,
        root=whole.stem,
        mentioned=whole.mentioned_edges() | removed.mentioned_edges(),
        depth=_needed_depth([whole, removed]),
    )


def verify_refinement(
    graph: Ultragraph, whole: CylinderSet, pieces: Sequence[CylinderSet]
) -> PartitionCheck:
    """Pieces partition whole (membership oracle)."""
    return check_partition(
        graph,
        lambda point: cyl_member(graph, point, whole),
        pieces,
        root=whole.stem,
        mentioned=whole.mentioned_edges(),
        depth=_needed_depth([whole]),
    )


def verify_union(
    graph: Ultragraph, cylinders: Sequence[CylinderSet], pieces: Sequence[CylinderSet]
) -> PartitionCheck:
    """Pieces partition the union of cylinders (membership oracle)."""

    def inside(point: Point) -> Union[bool, Membership]:
        answers = [cyl_member(graph, point, cylinder) for cylinder in cylinders]
        if True in answers:
            return True
        if NEED_LONGER_PREFIX in answers:
            return NEED_LONGER_PREFIX
        return False

    mentioned: Set[Edge] = set()
    for cylinder in cylinders:
        mentioned |= cylinder.mentioned_edges()
    return check_partition(
        graph, inside, pieces, mentioned=mentioned, depth=_needed_depth(cylinders)
    )


def cylinder_from_names(
    graph: Ultragraph,
    stem: Sequence[str],
    base: Optional[GeneralizedVertex],
    excluded: Sequence[str] = (),
) -> CylinderSet:
    return make_cylinder(
        graph,
        [graph.edge(name) for name in stem],
        base,
        [graph.edge(name) for name in excluded],
    )
