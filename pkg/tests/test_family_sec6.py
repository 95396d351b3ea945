"""Tests for the closed forms of the sec6 family."""

import math
from fractions import Fraction

import pytest
from pydantic import ValidationError

from ultrakms.exceptions import DivergentAtZero, MwOutOfRange
from ultrakms.models import Sec6Params, Verdict
from ultrakms.services.family_sec6 import (
    DIVERGENT,
    b_partial_sum,
    dbeta,
    describe_sec6,
    exact_B_condition,
    ground_states_sec6,
    kms_states_sec6,
    sec6_mfunction,
    sec6_thresholds,
    sec6_weights,
    series_partial_sum,
    series_sum,
    sufficient_B_condition,
    w_partial_sums,
)
from ultrakms.services.state_functions import verify_ground_m, verify_kms_m
from ultrakms.tools.families import build_sec6, sec6_vertex


def _params(beta, m_w=None, **extra):
    return Sec6Params(d=2, a=2, beta=beta, m_w=m_w, **extra)


class TestParams:
    """Test cases for Sec6Params."""

    def test_strings_become_fractions(self):
        """Test numeric text is parsed exactly."""
        params = Sec6Params(d="2", a="3/2", beta="1/2", c_prefix=["5"])
        assert params.a == Fraction(3, 2)
        assert params.c(1) == 5
        assert params.c(2) == Fraction(9, 4)

    @pytest.mark.parametrize(
        "fields",
        [
            {"d": 1, "a": 2},
            {"d": 2, "a": 2, "beta": -1},
            {"d": 2, "a": 2, "m_w": 2},
            {"d": 2, "a": 2, "c_prefix": ["1"]},
        ],
    )
    def test_rejected(self, fields):
        """Test out-of-range parameters fail validation."""
        with pytest.raises(ValidationError):
            Sec6Params(**fields)


class TestConditions:
    """Test cases for d_beta, the B conditions and the series."""

    def test_dbeta(self):
        """Test d_beta at d = 2 for a few beta."""
        assert dbeta(Fraction(2), Fraction(2)) == Fraction(1, 3)
        assert dbeta(Fraction(2), Fraction(1)) == 1
        assert dbeta(Fraction(2), Fraction(40)) < 1e-11
        with pytest.raises(DivergentAtZero):
            dbeta(Fraction(2), Fraction(0))

    def test_conditions_at_two(self):
        """Test both conditions hold at d = beta = 2 with values 3/4 and 1/2."""
        sufficient = sufficient_B_condition(Fraction(2), Fraction(2))
        exact = exact_B_condition(Fraction(2), Fraction(2))
        assert (sufficient.holds, sufficient.value) == (True, Fraction(3, 4))
        assert (exact.holds, exact.value) == (True, Fraction(1, 2))

    def test_condition_without_precondition(self):
        """Test d_beta >= 1 makes the condition inapplicable."""
        condition = exact_B_condition(Fraction(2), Fraction(1))
        assert not condition.precondition
        assert condition.line("exact B condition") == "exact B condition = n/a (d_beta >= 1) false"

    def test_sufficient_implies_exact(self):
        """Test the sufficient condition never holds where the exact one fails."""
        for tenth in range(1, 51):
            beta = Fraction(tenth, 10)
            if sufficient_B_condition(Fraction(2), beta).holds:
                assert exact_B_condition(Fraction(2), beta).holds

    def test_series(self):
        """Test S in closed form, with a prefix and at beta = 0."""
        assert series_sum(_params(2)) == Fraction(1, 3)
        assert series_sum(_params(2, c_prefix=["3"])) == Fraction(7, 36)
        assert series_sum(_params(0)) is DIVERGENT
        assert series_partial_sum(_params(2), 40) == pytest.approx(1 / 3)

    def test_b_partial_sum_tends_to_the_limit(self):
        """Test the partial sums at B approach 3 d_beta^2 / (1 - d_beta)."""
        assert b_partial_sum(Fraction(2), Fraction(2), 300) == pytest.approx(0.5)
        assert b_partial_sum(Fraction(2), Fraction(2), 3) < 0.5


class TestStates:
    """Test cases for kms_states_sec6 and sec6_mfunction."""

    def test_interval(self):
        """Test the admissible m(w) interval at d = a = beta = 2."""
        states = kms_states_sec6(_params(2))
        assert states.low == Fraction(1, 4)
        assert states.high == 1
        state = states.state(Fraction(1, 2))
        assert state.m_B == Fraction(1, 4)
        assert state.vertex_value(3) == Fraction(1, 12)
        assert state.vertex_value(4) == Fraction(1, 36)
        assert state.g0_value() == Fraction(1, 2)
        assert states.state().m_w == Fraction(1, 4)

    def test_out_of_range(self):
        """Test m(w) below S / (1 + S) is refused."""
        with pytest.raises(MwOutOfRange):
            kms_states_sec6(_params(2)).state(Fraction(1, 5))
        with pytest.raises(MwOutOfRange):
            sec6_mfunction(_params(2), Fraction(1, 5))

    @pytest.mark.parametrize("beta", [Fraction(1), Fraction(1, 2), Fraction(0)])
    def test_no_interval(self, beta):
        """Test beta where only m(w) = 1 survives."""
        assert kms_states_sec6(_params(beta)) is None

    def test_point_mass_on_w(self):
        """Test m(w) = 1 is built and passes even where the interval is empty."""
        params = _params(Fraction(1), m_w=Fraction(1))
        graph = build_sec6(params, depth=32)
        m = sec6_mfunction(params, graph=graph)
        assert m.atom("B") == 0
        report = verify_kms_m(m, sec6_weights(graph, params), graph.test_lattice(10))
        assert report.passed
        with pytest.raises(MwOutOfRange):
            sec6_mfunction(_params(Fraction(1)))

    def test_float_parameters(self):
        """Test an irrational power still produces a verified state."""
        params = _params(Fraction(5, 2), m_w=Fraction(1, 2))
        graph = build_sec6(params, depth=32)
        m = sec6_mfunction(params, graph=graph)
        assert isinstance(m.atom("B"), float)
        assert verify_kms_m(m, sec6_weights(graph, params), graph.test_lattice(10)).passed

    def test_w_partial_sums(self):
        """Test the finite-F instances of m3 at {w}."""
        params = _params(2)
        failed = w_partial_sums(params, Fraction(1, 5))
        assert failed.verdict_of("w-partial") is Verdict.FAIL
        assert failed.checks[0].witness == "k=2 (f2)"
        assert failed.checks[0].residual == "1/16"
        assert w_partial_sums(params, Fraction(1, 4), count=12).passed
        assert w_partial_sums(params, Fraction(1)).passed


class TestGround:
    """Test cases for ground_states_sec6."""

    def test_segment(self, sec6_graph):
        """Test every point of the segment is a ground state."""
        segment = ground_states_sec6(sec6_graph)
        lattice = sec6_graph.test_lattice(12)
        for t in (Fraction(0), Fraction(1, 3), Fraction(1)):
            state = segment.state(t)
            assert state.atom("w") == 1 - t
            assert verify_ground_m(state, lattice).passed
        assert [state.atom("B") for state in segment.endpoints()] == [0, 1]
        assert segment.lines()[0] == "ground states: m(B) = t, m(w) = 1 - t, t in [0, 1]"

    def test_vertex_mass_is_not_ground(self, sec6_graph):
        """Test mass on a finite-emission vertex breaks gm2."""
        state = ground_states_sec6(sec6_graph).state(Fraction(1, 2))
        moved = state.with_atom(sec6_vertex(1), Fraction(1, 10))
        report = verify_ground_m(moved, sec6_graph.test_lattice(12))
        assert report.verdict_of("gm2") is Verdict.FAIL

    @pytest.mark.parametrize("t", [Fraction(0), Fraction(1, 2), Fraction(1)])
    @pytest.mark.parametrize("key", ["B", "w", sec6_vertex(1), sec6_vertex(4)])
    def test_single_atom_shift_is_not_ground(self, sec6_graph, key, t):
        """Test adding 1/1000 to any one atom of a ground state fails with a witness."""
        state = ground_states_sec6(sec6_graph).state(t)
        moved = state.with_atom(key, state.atom(key) + Fraction(1, 1000))
        report = verify_ground_m(moved, sec6_graph.test_lattice(12))
        assert not report.passed
        assert all(check.witness for check in report.failures())


class TestThresholds:
    """Test cases for sec6_thresholds and describe_sec6."""

    def test_thresholds_at_two(self):
        """Test the bisection against the closed forms at d = 2."""
        found = sec6_thresholds(Fraction(2))
        assert found.sufficient == pytest.approx(math.log2(1 + math.sqrt(7)), abs=1e-7)
        assert found.sufficient == pytest.approx(found.sufficient_closed_form, abs=1e-7)
        assert found.exact == pytest.approx(math.log2(1 + 6 / (math.sqrt(13) - 1)), abs=1e-7)
        assert found.exact == pytest.approx(found.exact_closed_form, abs=1e-7)
        assert found.exact < found.sufficient

    def test_conditions_flip_at_the_threshold(self):
        """Test the exact condition fails just below its threshold and holds above."""
        found = sec6_thresholds(Fraction(2))
        assert not exact_B_condition(2.0, found.exact - 1e-4).holds
        assert exact_B_condition(2.0, found.exact + 1e-4).holds

    def test_describe(self):
        """Test the info lines of the sec6 command."""
        assert describe_sec6(_params(2)) == [
            "d = 2, a = 2, beta = 2",
            "d_beta = 1/3",
            "series S = 1/3",
            "sufficient B condition = 3/4 true",
            "exact B condition = 1/2 true",
            "admissible m(w): [1/4, 1]",
        ]

    def test_describe_degenerate(self):
        """Test beta = 0 and an empty interval."""
        assert describe_sec6(_params(0))[1:] == ["d_beta = undefined (beta = 0)", "series S = divergent"]
        assert describe_sec6(_params(1))[-1] == "admissible m(w): {1} only"
