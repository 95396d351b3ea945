"""
Closed forms for the sec6 family.

With N(e_i) = d and N(f_i) = c_i, write x = d^-beta and d_beta = x / (1 - x).
m2 on the singletons forces

    m(v_(3q+r)) = d_beta^(q+1) m(B)        r = 1, 2, 3

and normalization m(w) + m(G0) = 1 gives m(B) = (1 - m(w)) / (1 + 3 d_beta).
m3 at B holds iff 3 d_beta^2 / (1 - d_beta) <= 1, and m3 at {w} iff
m(w) / (1 - m(w)) >= S with S the sum of c_i^-beta. The sufficient condition
6 d_beta^2 / (1 - d_beta^2) <= 1 is reported next to the exact one.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Union

import structlog

from ultrakms.config import settings
from ultrakms.exceptions import DivergentAtZero, MwOutOfRange
from ultrakms.models import Sec6Params, Verdict, VerificationReport
from ultrakms.services.kms_solver import GroundDescription, solve_ground
from ultrakms.services.state_functions import EdgeWeightN, MFunction, ScaledWeightM
from ultrakms.tools.families import EMITTER_B, EMITTER_W, build_sec6, e_edge, f_edge
from ultrakms.tools.numbers import Number, bisect, format_number, is_exact, power, to_float
from ultrakms.tools.ultragraph import PresentedUltragraph, Vertex

logger = structlog.get_logger(__name__)


class Divergent:
    """A series with no finite sum."""

    _instance: Optional["Divergent"] = None

    def __new__(cls) -> "Divergent":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DIVERGENT"

    __str__ = __repr__


DIVERGENT = Divergent()


def dbeta(d: Number, beta: Number) -> Number:
    """d_beta = d^-beta / (1 - d^-beta); exact whenever the power is rational."""
    if beta == 0:
        raise DivergentAtZero("d_beta is undefined at beta = 0")
    x = power(d, -beta)
    return x / (1 - x)


@dataclass(frozen=True)
class Condition:
    """Truth value of an m3 condition at B, with the value compared against 1."""

    holds: bool
    value: Optional[Number]
    precondition: bool = True  # False when d_beta >= 1 and the formula does not apply

    def line(self, name: str) -> str:
        if not self.precondition:
            return f"{name} = n/a (d_beta >= 1) false"
        return f"{name} = {format_number(self.value)} {'true' if self.holds else 'false'}"


def _condition(x: Number, numerator: int, denominator: Number) -> Condition:
    value = numerator * x * x / denominator
    return Condition(holds=value <= 1, value=value)


def sufficient_B_condition(d: Number, beta: Number) -> Condition:
    """6 d_beta^2 / (1 - d_beta^2) <= 1 (sufficient, not necessary)."""
    x = dbeta(d, beta)
    if x >= 1:
        return Condition(holds=False, value=None, precondition=False)
    return _condition(x, 6, 1 - x * x)


def exact_B_condition(d: Number, beta: Number) -> Condition:
    """3 d_beta^2 / (1 - d_beta) <= 1: the full m3 sum at B is at most m(B)."""
    x = dbeta(d, beta)
    if x >= 1:
        return Condition(holds=False, value=None, precondition=False)
    return _condition(x, 3, 1 - x)


def b_partial_sum(d: Number, beta: Number, count: int) -> float:
    """
    sum over e_4 .. e_(count+3) of M(e) m(r(e)) for m(B) = 1, in floats.

    Tends to 3 d_beta^2 / (1 - d_beta) when d_beta < 1.
    """
    x = to_float(power(d, -beta, exact=False))
    ratio = x / (1 - x)

    def vertex(i: int) -> float:
        return ratio ** ((i - 1) // 3 + 1)

    return math.fsum(x * (vertex(i - 3) + vertex(i)) for i in range(4, count + 4))


def series_sum(params: Sec6Params, beta: Optional[Number] = None) -> Union[Number, Divergent]:
    """
    S = sum of c_i^-beta.

    The explicit prefix c_1..c_k is summed term by term, the geometric rest
    a^-i beta for i > k in closed form.
    """
    beta = params.beta if beta is None else beta
    ratio = power(params.a, -beta)
    if ratio >= 1:
        return DIVERGENT
    k = len(params.c_prefix)
    head = sum((power(c, -beta) for c in params.c_prefix), Fraction(0))
    return head + ratio ** (k + 1) / (1 - ratio)


def series_partial_sum(params: Sec6Params, count: int, beta: Optional[Number] = None) -> float:
    beta = params.beta if beta is None else beta
    return math.fsum(to_float(power(params.c(i), -beta, exact=False)) for i in range(1, count + 1))


# ----- states --------------------------------------------------------------


@dataclass(frozen=True)
class Sec6State:
    """m(w), m(B) and d_beta; vertex values follow from them."""

    m_w: Number
    m_B: Number
    d_beta: Number

    def vertex_value(self, index: int) -> Number:
        """m(v_index) = d_beta^(q+1) m(B) for index = 3q + r, r in 1..3."""
        if self.m_B == 0:
            return Fraction(0)
        return self.d_beta ** ((index - 1) // 3 + 1) * self.m_B

    def g0_value(self) -> Number:
        return self.m_B * (1 + 3 * self.d_beta)


@dataclass
class Sec6States:
    """The admissible m(w) interval [S / (1 + S), 1] and a constructor for each point."""

    params: Sec6Params
    d_beta: Number
    series: Number
    sufficient: Condition
    exact: Condition

    @property
    def low(self) -> Number:
        return self.series / (1 + self.series)

    @property
    def high(self) -> Number:
        return Fraction(1)

    def state(self, m_w: Optional[Number] = None) -> Sec6State:
        m_w = self.low if m_w is None else m_w
        if not (self.low <= m_w <= self.high):
            raise MwOutOfRange(format_number(m_w), format_number(self.low), format_number(self.high))
        return Sec6State(m_w=m_w, m_B=(1 - m_w) / (1 + 3 * self.d_beta), d_beta=self.d_beta)


def kms_states_sec6(params: Sec6Params) -> Optional[Sec6States]:
    """None (no KMS state of this shape) when S diverges or the B condition fails."""
    series = series_sum(params)
    if series is DIVERGENT:
        logger.info("sec6_empty", reason="series diverges", beta=format_number(params.beta))
        return None
    d_beta = dbeta(params.d, params.beta)
    exact = exact_B_condition(params.d, params.beta)
    sufficient = sufficient_B_condition(params.d, params.beta)
    if not exact.holds:
        logger.info("sec6_empty", reason="B condition fails", d_beta=format_number(d_beta))
        return None
    return Sec6States(params=params, d_beta=d_beta, series=series, sufficient=sufficient, exact=exact)


def sec6_mfunction(
    params: Sec6Params,
    m_w: Optional[Number] = None,
    graph: Optional[PresentedUltragraph] = None,
) -> MFunction:
    """
    The m-function for m(w) = m_w (params.m_w, else the left endpoint).

    Carries tail formulas for B and w so m3 is checked against the whole of
    epsilon(A). m(w) = 1 is a KMS state for every beta and is built even when
    the admissible interval is empty.
    """
    graph = graph or build_sec6(params, depth=settings.family_depth)
    m_w = params.m_w if m_w is None else m_w
    if m_w == 1:
        state = Sec6State(m_w=Fraction(1), m_B=Fraction(0), d_beta=Fraction(0))
    else:
        states = kms_states_sec6(params)
        if states is None:
            raise MwOutOfRange(format_number(m_w) if m_w is not None else "none", "1", "1")
        state = states.state(m_w)
    rest = 1 - state.m_w

    def vertex_rule(vertex: Vertex) -> Optional[Number]:
        return None if vertex.index == 0 else state.vertex_value(vertex.index)

    def b_tail(weights: ScaledWeightM) -> Optional[Number]:
        if state.m_B == 0:
            return Fraction(0)
        x = weights(e_edge(4))
        d_beta = x / (1 - x)
        if d_beta >= 1:
            return None
        return 3 * state.m_B * d_beta * d_beta / (1 - d_beta)

    def w_tail(weights: ScaledWeightM) -> Optional[Number]:
        if rest == 0:
            return Fraction(0)
        series = series_sum(params, weights.beta)
        return None if series is DIVERGENT else series * rest

    return MFunction(
        graph,
        {EMITTER_W: state.m_w, EMITTER_B: state.m_B},
        vertex_rule=vertex_rule,
        tail_sums={EMITTER_B: b_tail, EMITTER_W: w_tail},
        name=f"sec6[m_w={format_number(state.m_w)}]",
    )


def sec6_weights(
    graph: PresentedUltragraph, params: Sec6Params, exact: Optional[bool] = None
) -> ScaledWeightM:
    return ScaledWeightM.from_weights(EdgeWeightN.from_graph(graph), params.beta, exact=exact)


def w_partial_sums(
    params: Sec6Params, m_w: Number, count: Optional[int] = None
) -> VerificationReport:
    """
    m(w) / (1 - m(w)) >= sum_{i <= k} c_i^-beta for k = 1 .. count.

    These are the finite-F instances of m3 at {w}; they are necessary for
    every k and together with the limit sufficient.
    """
    count = settings.fbound if count is None else count
    report = VerificationReport()
    if m_w == 1:
        report.add("w-partial", Verdict.PASS, f"k<={count}", Fraction(0))
        return report
    ratio = m_w / (1 - m_w)
    partial: Number = Fraction(0)
    for k in range(1, count + 1):
        partial += power(params.c(k), -params.beta)
        if partial > ratio:
            report.add("w-partial", Verdict.FAIL, f"k={k} ({f_edge(k).name})", partial - ratio)
            return report
    report.add("w-partial", Verdict.PASS, f"k<={count}", ratio - partial)
    return report


# ----- ground states --------------------------------------------------------


@dataclass
class Sec6GroundSegment:
    """m(B) = t, m(w) = 1 - t, every vertex atom 0, for t in [0, 1]."""

    description: GroundDescription

    def state(self, t: Number) -> MFunction:
        return self.description.state({EMITTER_B: t, EMITTER_W: 1 - t})

    def endpoints(self) -> List[MFunction]:
        return [self.state(Fraction(0)), self.state(Fraction(1))]

    def lines(self) -> List[str]:
        return [
            "ground states: m(B) = t, m(w) = 1 - t, t in [0, 1]",
            "vertex atoms: 0",
        ]


def ground_states_sec6(graph: PresentedUltragraph) -> Sec6GroundSegment:
    return Sec6GroundSegment(solve_ground(graph))


# ----- thresholds -----------------------------------------------------------


@dataclass(frozen=True)
class Sec6Thresholds:
    """Where each B condition starts to hold, by bisection and in closed form."""

    d: float
    sufficient: float
    sufficient_closed_form: float
    exact: float
    exact_closed_form: float

    def lines(self) -> List[str]:
        return [
            f"sufficient threshold beta = {self.sufficient:.9f} (closed form {self.sufficient_closed_form:.9f})",
            f"exact threshold beta = {self.exact:.9f} (closed form {self.exact_closed_form:.9f})",
        ]


def _beta_for(d: float, x: float) -> float:
    """beta with d_beta = x, i.e. d^beta = 1 + 1/x."""
    return math.log(1 + 1 / x) / math.log(d)


def sec6_thresholds(d: Number, tol: Optional[float] = None, hi: Optional[float] = None) -> Sec6Thresholds:
    """
    Both conditions hold for beta above their threshold and fail below.

    The search starts just above log_d 2, where d_beta = 1.
    """
    tol = settings.tol if tol is None else tol
    hi = settings.beta_hi if hi is None else hi
    base = to_float(d)
    lo = math.log(2) / math.log(base) + 1e-6

    def sufficient_gap(beta: float) -> float:
        x = to_float(dbeta(base, beta))
        return 6 * x * x / (1 - x * x) - 1

    def exact_gap(beta: float) -> float:
        x = to_float(dbeta(base, beta))
        return 3 * x * x / (1 - x) - 1

    thresholds = Sec6Thresholds(
        d=base,
        sufficient=bisect(sufficient_gap, lo, hi, tol),
        sufficient_closed_form=_beta_for(base, 1 / math.sqrt(7)),
        exact=bisect(exact_gap, lo, hi, tol),
        exact_closed_form=_beta_for(base, (math.sqrt(13) - 1) / 6),
    )
    logger.debug("sec6_thresholds", d=base, sufficient=thresholds.sufficient, exact=thresholds.exact)
    return thresholds


def describe_sec6(params: Sec6Params) -> List[str]:
    """Info lines printed by the sec6 command."""
    lines = [f"d = {format_number(params.d)}, a = {format_number(params.a)}, beta = {format_number(params.beta)}"]
    if params.beta == 0:
        lines.append("d_beta = undefined (beta = 0)")
        lines.append("series S = divergent")
        return lines
    d_beta = dbeta(params.d, params.beta)
    series = series_sum(params)
    lines.append(f"d_beta = {format_number(d_beta)}")
    lines.append(f"series S = {series if series is DIVERGENT else format_number(series)}")
    lines.append(sufficient_B_condition(params.d, params.beta).line("sufficient B condition"))
    lines.append(exact_B_condition(params.d, params.beta).line("exact B condition"))
    states = kms_states_sec6(params)
    if states is None:
        lines.append("admissible m(w): {1} only")
    else:
        lines.append(f"admissible m(w): [{format_number(states.low)}, 1]")
    if not is_exact(d_beta):
        lines.append("values are floats (irrational power)")
    return lines
