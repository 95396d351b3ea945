"""
Text formats.

Ultragraph files (UTF-8, one statement per line, `#` starts a comment):

    vertices: v u
    edge e1 v -> u
    edge e2 v -> u v
    weight e1 2
    weight e2 3/2

or a single `family sec6(d=2, a=2)` line naming a built-in family. The same
`sec6(d=..., a=...)` selector can be passed instead of a file name.

Lattice expressions combine `r(e)`, vertex lists `{v1,v2}`, emitter or
vertex names and `top` with `|` (union) and `&` (intersection), `&` binding
tighter. Cylinders are written `(stem edges ; base expr ; excluded edges)`,
spanning elements `[mu ; A ; nu]` and partial-action words as space separated
`e1` / `e1^-1` letters.
"""

import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import structlog

from ultrakms.config import settings
from ultrakms.exceptions import ParseError
from ultrakms.models import Sec6Params
from ultrakms.tools.families import BUILTIN_FAMILIES
from ultrakms.tools.numbers import Number, parse_number
from ultrakms.tools.shift_space import CylinderSet, WordLetter, make_cylinder
from ultrakms.tools.ultragraph import (
    Edge,
    FiniteUltragraph,
    GeneralizedVertex,
    Join,
    LatticeExpr,
    Meet,
    Named,
    RangeOf,
    Ultragraph,
    VertexList,
    canonicalize,
)

logger = structlog.get_logger(__name__)

_NAME = r"[A-Za-z_][A-Za-z0-9_.']*"
_FAMILY = re.compile(r"^\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*\((?P<args>[^)]*)\)\s*$")
_EDGE_LINE = re.compile(rf"^edge\s+(?P<edge>{_NAME})\s+(?P<source>{_NAME})\s*->\s*(?P<targets>.*)$")
_WEIGHT_LINE = re.compile(rf"^weight\s+(?P<edge>{_NAME})\s+(?P<value>\S+)$")
_ATOM_LINE = re.compile(rf"^atom\s+(?P<name>{_NAME})\s+(?P<value>\S+)$")


# ----- ultragraph files ---------------------------------------------------


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_family_spec(text: str) -> Optional[Tuple[str, Dict[str, str]]]:
    """`sec6(d=2, a=2)` -> ("sec6", {"d": "2", "a": "2"}); None if not of that shape."""
    match = _FAMILY.match(text)
    if not match or match.group("name") not in BUILTIN_FAMILIES:
        return None
    args: Dict[str, str] = {}
    for part in filter(None, (item.strip() for item in match.group("args").split(","))):
        key, sep, value = part.partition("=")
        if not sep:
            raise ParseError("family arguments are key=value", text=part)
        args[key.strip()] = value.strip()
    return match.group("name"), args


def build_family(name: str, args: Dict[str, str], depth: Optional[int] = None) -> Ultragraph:
    try:
        params = Sec6Params(**args)
    except ValueError as exc:
        raise ParseError(f"bad parameters for {name}: {exc}") from exc
    return BUILTIN_FAMILIES[name](params, depth=depth or settings.family_depth)


def parse_ultragraph(text: str, name: str = "ultragraph") -> Ultragraph:
    """Parse without validating (see load_ultragraph)."""
    vertices: List[str] = []
    edges: List[Tuple[str, str, List[str]]] = []
    weights: Dict[str, Number] = {}
    family = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("vertices:"):
            vertices.extend(line[len("vertices:"):].split())
        elif line.startswith("family "):
            family = parse_family_spec(line[len("family "):])
            if family is None:
                raise ParseError("unknown family", line=number, text=line)
        elif line.startswith("edge "):
            match = _EDGE_LINE.match(line)
            if not match:
                raise ParseError("expected `edge <id> <source> -> <targets>`", line=number, text=line)
            edges.append((match.group("edge"), match.group("source"), match.group("targets").split()))
        elif line.startswith("weight "):
            match = _WEIGHT_LINE.match(line)
            if not match:
                raise ParseError("expected `weight <edge> <number>`", line=number, text=line)
            try:
                weights[match.group("edge")] = parse_number(match.group("value"))
            except ParseError as exc:
                raise ParseError(str(exc), line=number, text=line) from exc
        else:
            raise ParseError("unknown statement", line=number, text=line)
    if family is not None:
        if vertices or edges:
            raise ParseError("a family file cannot also list vertices or edges")
        return build_family(*family)
    known = set(vertices)
    for label, source, targets in edges:
        for vertex in [source, *targets]:
            if vertex not in known:
                raise ParseError(f"edge {label} uses undeclared vertex {vertex}")
    for label in weights:
        if label not in {edge for edge, _, _ in edges}:
            raise ParseError(f"weight for undeclared edge {label}")
    try:
        return FiniteUltragraph(vertices, edges, weights, name=name)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def load_ultragraph(
    source: Union[str, Path], depth: Optional[int] = None, validate: bool = True
) -> Ultragraph:
    """
    Load and validate an ultragraph from a file or a built-in selector.

    Raises SinkDetected / EmptyRange when the ultragraph is not admissible
    (for presented families within the first `depth` vertices and edges).
    """
    spec = parse_family_spec(str(source)) if not Path(source).exists() else None
    if spec is not None:
        graph = build_family(*spec, depth=depth)
    else:
        path = Path(source)
        graph = parse_ultragraph(path.read_text(encoding="utf-8"), name=path.stem)
    if validate:
        graph.validate(depth or settings.family_depth)
    logger.debug("ultragraph_loaded", name=graph.name, backend=graph.backend)
    return graph


# ----- lattice expressions ------------------------------------------------

_TOKEN = re.compile(rf"\s*(?:(?P<name>{_NAME})|(?P<symbol>[|&()\{{\}},∪∩]))")


def _tokenize(text: str) -> List[str]:
    tokens = []
    position = 0
    text = text.strip()
    while position < len(text):
        match = _TOKEN.match(text, position)
        if not match:
            raise ParseError("unexpected character in expression", text=text[position:])
        token = match.group("name") or match.group("symbol")
        tokens.append({"∪": "|", "∩": "&"}.get(token, token))
        position = match.end()
    return tokens


class _ExprParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.position = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.position] if self.position < len(self.tokens) else None

    def take(self, expected: Optional[str] = None) -> str:
        token = self.peek()
        if token is None or (expected is not None and token != expected):
            raise ParseError(f"expected {expected or 'a token'}", text=self.text)
        self.position += 1
        return token

    def parse(self) -> LatticeExpr:
        expr = self.union()
        if self.peek() is not None:
            raise ParseError(f"unexpected {self.peek()!r}", text=self.text)
        return expr

    def union(self) -> LatticeExpr:
        parts = [self.meet()]
        while self.peek() == "|":
            self.take("|")
            parts.append(self.meet())
        return parts[0] if len(parts) == 1 else Join(tuple(parts))

    def meet(self) -> LatticeExpr:
        parts = [self.atom()]
        while self.peek() == "&":
            self.take("&")
            parts.append(self.atom())
        return parts[0] if len(parts) == 1 else Meet(tuple(parts))

    def atom(self) -> LatticeExpr:
        token = self.take()
        if token == "(":
            inner = self.union()
            self.take(")")
            return inner
        if token == "{":
            names = []
            while self.peek() != "}":
                names.append(self.take())
                if self.peek() == ",":
                    self.take(",")
            self.take("}")
            return VertexList(tuple(names))
        if token in "|&),}":
            raise ParseError(f"unexpected {token!r}", text=self.text)
        if token == "r" and self.peek() == "(":
            self.take("(")
            edge = self.take()
            self.take(")")
            return RangeOf(edge)
        return Named(token)


def parse_expr(text: str) -> LatticeExpr:
    if not text.strip():
        raise ParseError("empty expression")
    return _ExprParser(text).parse()


def parse_set(graph: Ultragraph, text: str) -> GeneralizedVertex:
    return canonicalize(graph, parse_expr(text))


# ----- cylinders, spanning elements, words --------------------------------


def _split_bracketed(text: str, opening: str, closing: str) -> List[str]:
    body = text.strip()
    if not (body.startswith(opening) and body.endswith(closing)):
        raise ParseError(f"expected {opening} ... {closing}", text=text)
    return [part.strip() for part in body[1:-1].split(";")]


def _edges(graph: Ultragraph, text: str) -> List[Edge]:
    return [graph.edge(name) for name in text.split()]


def parse_cylinder(graph: Ultragraph, text: str) -> CylinderSet:
    """`(e1 e4 ; B ; e5)`; an empty base means r(last stem edge)."""
    parts = _split_bracketed(text, "(", ")")
    if len(parts) not in (2, 3):
        raise ParseError("cylinder is (stem ; base ; excluded)", text=text)
    stem = _edges(graph, parts[0])
    base = parse_set(graph, parts[1]) if parts[1] else None
    excluded = _edges(graph, parts[2]) if len(parts) == 3 else []
    return make_cylinder(graph, stem, base, excluded)


def parse_spanning(
    graph: Ultragraph, text: str
) -> Tuple[List[Edge], Optional[GeneralizedVertex], List[Edge]]:
    """`[mu ; A ; nu]`; an empty A means no restriction beyond the ranges."""
    parts = _split_bracketed(text, "[", "]")
    if len(parts) != 3:
        raise ParseError("spanning element is [mu ; A ; nu]", text=text)
    middle = parse_set(graph, parts[1]) if parts[1] else None
    return _edges(graph, parts[0]), middle, _edges(graph, parts[2])


def parse_word(graph: Ultragraph, text: str) -> Tuple[WordLetter, ...]:
    letters = []
    for token in text.split():
        inverse = token.endswith(("^-1", "^{-1}"))
        name = token.split("^", 1)[0]
        if not name or ("^" in token and not inverse):
            raise ParseError("word letters are e or e^-1", text=token)
        letters.append(WordLetter(graph.edge(name), inverse))
    return tuple(letters)


# ----- m-function files ---------------------------------------------------


def parse_atoms(text: str) -> Dict[str, Number]:
    """`atom <name> <value>` lines -> name: value (in file order)."""
    atoms: Dict[str, Number] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        match = _ATOM_LINE.match(line)
        if not match:
            raise ParseError("expected `atom <name> <value>`", line=number, text=line)
        name = match.group("name")
        if name in atoms:
            raise ParseError(f"atom {name} given twice", line=number, text=line)
        try:
            atoms[name] = parse_number(match.group("value"))
        except ParseError as exc:
            raise ParseError(str(exc), line=number, text=line) from exc
    return atoms


def read_atoms(path: Union[str, Path]) -> Dict[str, Number]:
    return parse_atoms(Path(path).read_text(encoding="utf-8"))


def parse_m_weights(text: str) -> Dict[str, Number]:
    """`weight <edge> <value>` lines giving M(e) directly (values in (0, 1])."""
    values: Dict[str, Number] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        match = _WEIGHT_LINE.match(line)
        if not match:
            raise ParseError("expected `weight <edge> <value>`", line=number, text=line)
        value = parse_number(match.group("value"))
        if not 0 < value <= 1:
            raise ParseError("M(e) must lie in (0, 1]", line=number, text=line)
        values[match.group("edge")] = value
    return values
