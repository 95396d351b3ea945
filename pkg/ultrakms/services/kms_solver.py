"""
Solvers: KMS states of finite ultragraphs, the critical inverse temperature
and the ground states.

On a finite ultragraph, m2 for singletons together with additivity reduces
to the fixed point equation m = T_beta m for the vertex vector, where

    T_beta[v, u] = sum of N(e)^-beta over edges e with s(e) = v and u in r(e).

KMS states at beta are the nonnegative normalized fixed points; we return the
extreme points of that simplex. The fixed point space is computed exactly
(sympy) whenever every entry is rational, otherwise in floating point
(scipy).
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy import linalg
from sympy import Matrix, eye

from ultrakms.config import settings
from ultrakms.exceptions import MissingAtom, NoExhaustingSequence, NotFound, UltraKMSError
from ultrakms.services.state_functions import EdgeWeightN, MFunction, ScaledWeightM
from ultrakms.tools.numbers import (
    Number,
    as_sympy,
    bisect,
    format_number,
    from_sympy,
    is_exact,
    to_float,
)
from ultrakms.tools.ultragraph import GeneralizedVertex, Ultragraph, Vertex

logger = structlog.get_logger(__name__)

NO_STATE_AT_ANY_BETA = "ρ(T₀) < 1: no KMS state at any β ≥ 0"


@dataclass
class TransferMatrix:
    """Vertex-indexed T_beta (rows are sources)."""

    vertices: Tuple[Vertex, ...]
    entries: List[List[Number]]
    beta: Number

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def is_exact(self) -> bool:
        return all(is_exact(value) for row in self.entries for value in row)

    def as_array(self) -> np.ndarray:
        return np.array([[to_float(value) for value in row] for row in self.entries], dtype=float)

    def as_sympy(self) -> Matrix:
        return Matrix([[as_sympy(value) for value in row] for row in self.entries])

    def apply(self, vector: Sequence[Number]) -> List[Number]:
        return [sum((a * b for a, b in zip(row, vector)), Fraction(0)) for row in self.entries]

    def lines(self) -> List[str]:
        header = "T " + " ".join(vertex.name for vertex in self.vertices)
        rows = [
            f"{vertex.name} " + " ".join(format_number(value) for value in row)
            for vertex, row in zip(self.vertices, self.entries)
        ]
        return [header, *rows]


def _require_finite(graph: Ultragraph) -> None:
    if not graph.is_finite:
        raise UltraKMSError(f"{graph.name}: transfer matrices need a finite ultragraph")


def build_transfer(
    graph: Ultragraph, weights: EdgeWeightN, beta: Number, exact: Optional[bool] = None
) -> TransferMatrix:
    _require_finite(graph)
    scaled = ScaledWeightM.from_weights(weights, beta, exact=exact)
    vertices = tuple(graph.vertices())
    position = {vertex: index for index, vertex in enumerate(vertices)}
    entries: List[List[Number]] = [[Fraction(0)] * len(vertices) for _ in vertices]
    for edge in graph.edges():
        row = position[graph.source(edge)]
        for target in graph.range(edge).finite:
            entries[row][position[target]] += scaled(edge)
    return TransferMatrix(vertices, entries, beta)


# ----- fixed points ---------------------------------------------------------


def null_basis(matrix: TransferMatrix, tol: Optional[float] = None) -> List[List[Number]]:
    """Basis of ker(T - I): exact rationals when possible, floats otherwise."""
    tol = settings.tol if tol is None else tol
    if matrix.is_exact:
        system = matrix.as_sympy() - eye(matrix.size)
        return [[from_sympy(value) for value in vector] for vector in system.nullspace()]
    system = matrix.as_array() - np.eye(matrix.size)
    basis = linalg.null_space(system, rcond=tol)
    return [list(map(float, basis[:, column])) for column in range(basis.shape[1])]


def _solve_square(rows: List[List[Number]], rhs: List[Number], exact: bool) -> Optional[List[Number]]:
    if exact:
        system = Matrix([[as_sympy(value) for value in row] for row in rows])
        if system.det() == 0:
            return None
        solution = system.LUsolve(Matrix([as_sympy(value) for value in rhs]))
        return [from_sympy(value) for value in solution]
    array = np.array(rows, dtype=float)
    if abs(np.linalg.det(array)) < 1e-12:
        return None
    return list(map(float, np.linalg.solve(array, np.array(rhs, dtype=float))))


def extreme_points(
    basis: Sequence[Sequence[Number]], tol: Optional[float] = None
) -> List[List[Number]]:
    """
    Vertices of {x = K c : x >= 0, sum(x) = 1} for the null basis K.

    A vertex makes k - 1 coordinates vanish (k = dim ker), so every choice of
    k - 1 coordinates is tried together with the normalization and the
    feasible solutions are kept, deduplicated, in a deterministic order.
    """
    tol = settings.tol if tol is None else tol
    if not basis:
        return []
    exact = all(is_exact(value) for vector in basis for value in vector)
    k = len(basis)
    n = len(basis[0])
    columns = [list(vector) for vector in basis]

    def combine(coefficients: Sequence[Number]) -> List[Number]:
        return [
            sum((coefficients[j] * columns[j][i] for j in range(k)), Fraction(0)) for i in range(n)
        ]

    totals = [sum(vector, Fraction(0)) for vector in columns]
    points: List[List[Number]] = []
    for zeros in itertools.combinations(range(n), k - 1):
        rows = [[columns[j][i] for j in range(k)] for i in zeros] + [totals]
        rhs: List[Number] = [Fraction(0)] * (k - 1) + [Fraction(1)]
        coefficients = _solve_square(rows, rhs, exact)
        if coefficients is None:
            continue
        point = combine(coefficients)
        if exact:
            if any(value < 0 for value in point):
                continue
        else:
            if any(value < -tol for value in point):
                continue
            point = [max(float(value), 0.0) for value in point]
        if not any(_same(point, other, exact, tol) for other in points):
            points.append(point)
    points.sort(key=lambda point: [-float(value) for value in point])
    return points


def _same(first: Sequence[Number], second: Sequence[Number], exact: bool, tol: float) -> bool:
    if exact:
        return list(first) == list(second)
    return all(abs(float(a) - float(b)) <= 10 * tol for a, b in zip(first, second))


@dataclass
class KmsSolution:
    """Extreme points of the KMS_beta simplex (empty when only m = 0 solves)."""

    beta: Number
    states: List[MFunction] = field(default_factory=list)
    vectors: List[Dict[Vertex, Number]] = field(default_factory=list)
    exact: bool = True
    kernel_dimension: int = 0

    @property
    def is_empty(self) -> bool:
        return not self.states


def solve_kms(
    graph: Ultragraph,
    weights: EdgeWeightN,
    beta: Number,
    tol: Optional[float] = None,
    exact: Optional[bool] = None,
) -> KmsSolution:
    matrix = build_transfer(graph, weights, beta, exact=exact)
    basis = null_basis(matrix, tol)
    points = extreme_points(basis, tol)
    solution = KmsSolution(beta=beta, exact=matrix.is_exact, kernel_dimension=len(basis))
    for index, point in enumerate(points):
        vector = dict(zip(matrix.vertices, point))
        solution.vectors.append(vector)
        solution.states.append(MFunction.from_vector(graph, vector, name=f"m{index + 1}"))
    logger.info(
        "kms_solved",
        graph=graph.name,
        beta=format_number(beta),
        kernel=len(basis),
        states=len(points),
        exact=matrix.is_exact,
    )
    return solution


# ----- spectral radius and critical beta --------------------------------------


@dataclass
class SpectralRadius:
    value: float
    method: str  # power | power-squared | eigvals
    iterations: int = 0


def _power_iteration(array: np.ndarray, tol: float, max_iter: int) -> Tuple[Optional[float], int, bool]:
    """(estimate, iterations, oscillating); estimate None when it did not settle."""
    size = array.shape[0]
    vector = np.full(size, 1.0 / size)
    ratios: List[float] = []
    for iteration in range(1, max_iter + 1):
        image = array @ vector
        norm = float(np.abs(image).sum())
        if norm == 0.0:
            return 0.0, iteration, False
        ratios.append(norm / float(np.abs(vector).sum()))
        vector = image / norm
        if len(ratios) >= 2 and abs(ratios[-1] - ratios[-2]) < tol / 10:
            return ratios[-1], iteration, False
        if (
            len(ratios) >= 8
            and abs(ratios[-1] - ratios[-3]) < tol / 10
            and abs(ratios[-1] - ratios[-2]) >= tol / 10
        ):
            return None, iteration, True
    return None, max_iter, False


def spectral_radius(
    matrix: TransferMatrix, tol: Optional[float] = None, max_iter: Optional[int] = None
) -> SpectralRadius:
    """
    rho(T) by power iteration from the uniform vector.

    A period-2 oscillation switches to T squared (rho = sqrt(rho(T^2))); if
    that does not settle either, the eigenvalues are computed directly.
    """
    tol = settings.tol if tol is None else tol
    max_iter = settings.power_max_iter if max_iter is None else max_iter
    array = matrix.as_array()
    estimate, iterations, oscillating = _power_iteration(array, tol, max_iter)
    if estimate is not None:
        return SpectralRadius(estimate, "power", iterations)
    if oscillating:
        logger.debug("power_iteration_oscillates", beta=format_number(matrix.beta))
        squared, more, _ = _power_iteration(array @ array, tol, max_iter)
        if squared is not None:
            return SpectralRadius(float(np.sqrt(squared)), "power-squared", iterations + more)
    logger.debug("power_iteration_fallback", beta=format_number(matrix.beta))
    value = float(np.max(np.abs(np.linalg.eigvals(array)))) if array.size else 0.0
    return SpectralRadius(value, "eigvals", iterations)


@dataclass
class CriticalBeta:
    beta: float
    lo: float
    hi: float
    method: str


def critical_beta(
    graph: Ultragraph,
    weights: EdgeWeightN,
    lo: Optional[float] = None,
    hi: Optional[float] = None,
    tol: Optional[float] = None,
) -> CriticalBeta:
    """
    The beta where rho(T_beta) crosses 1, by bisection.

    rho(T_beta) is strictly decreasing in beta because every N(e) > 1, so the
    bracket must satisfy rho(T_lo) >= 1 >= rho(T_hi); NotFound otherwise.
    """
    lo = settings.beta_lo if lo is None else lo
    hi = settings.beta_hi if hi is None else hi
    tol = settings.tol if tol is None else tol
    if not lo < hi:
        raise NotFound(f"empty bracket [{lo}, {hi}]")
    methods = set()

    def excess(beta: float) -> float:
        radius = spectral_radius(build_transfer(graph, weights, float(beta), exact=False), tol)
        methods.add(radius.method)
        return radius.value - 1.0

    at_lo, at_hi = excess(lo), excess(hi)
    if at_lo < 0:
        raise NotFound(NO_STATE_AT_ANY_BETA if lo == 0 else f"rho(T_{lo}) < 1")
    if at_hi > 0:
        raise NotFound(f"rho(T_{hi}) > 1: widen the bracket")
    beta = bisect(excess, lo, hi, min(tol, 1e-12))
    method = "+".join(sorted(methods))
    logger.info("critical_beta_found", graph=graph.name, beta=beta, method=method)
    return CriticalBeta(beta, lo, hi, method)


# ----- ground states -------------------------------------------------------


@dataclass
class GroundDescription:
    """
    Ground states: free nonnegative coordinates on the minimal infinite
    emitters of the top element summing to 1, every finite-emission atom 0.
    Empty when there are no infinite emitters (every finite ultragraph).
    """

    graph: Ultragraph
    emitters: Tuple[str, ...]

    @property
    def is_empty(self) -> bool:
        return not self.emitters

    def state(self, coordinates: Mapping[str, Number]) -> MFunction:
        unknown = set(coordinates) - set(self.emitters)
        if unknown:
            raise MissingAtom(sorted(unknown)[0])
        values = {name: coordinates.get(name, Fraction(0)) for name in self.emitters}
        if any(value < 0 for value in values.values()) or sum(values.values()) != 1:
            raise UltraKMSError("ground coordinates must be nonnegative and sum to 1")
        return MFunction(self.graph, values, vertex_rule=lambda vertex: Fraction(0), name="ground")

    def extreme_points(self) -> List[MFunction]:
        return [self.state({name: Fraction(1)}) for name in self.emitters]

    def lines(self) -> List[str]:
        if self.is_empty:
            return ["ground states: none (no infinite emitters)"]
        coordinates = " + ".join(f"m({name})" for name in self.emitters)
        return [
            f"ground states: {coordinates} = 1, each >= 0",
            "finite-emission atoms: 0",
            f"extreme points: {len(self.emitters)}",
        ]


def solve_ground(graph: Ultragraph) -> GroundDescription:
    if not graph.emitters:
        return GroundDescription(graph, ())
    top: Optional[GeneralizedVertex] = graph.top()
    if top is None:
        sequence = graph.exhaustion(1)
        if not sequence:
            raise NoExhaustingSequence(f"{graph.name} has no top element and no exhausting sequence")
        top = sequence[-1]
    return GroundDescription(graph, tuple(sorted(top.emitters)))
