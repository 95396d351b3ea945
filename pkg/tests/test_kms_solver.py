"""Tests for the finite-graph KMS solver, the critical beta and ground states."""

import math
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from sympy import Matrix

from ultrakms.exceptions import InexactValue, MissingAtom, NotFound, UltraKMSError
from ultrakms.services.kms_solver import (
    build_transfer,
    critical_beta,
    extreme_points,
    null_basis,
    solve_ground,
    solve_kms,
    spectral_radius,
)
from ultrakms.services.state_functions import (
    EdgeWeightN,
    MFunction,
    ScaledWeightM,
    verify_ground_m,
    verify_kms_m,
    vertex_lattice,
)
from ultrakms.tools.numbers import as_sympy

from tests.strategies import finite_ultragraphs


def _weights(graph):
    return EdgeWeightN.from_graph(graph)


def _by_name(vector):
    return {vertex.name: value for vertex, value in vector.items()}


class TestTransferMatrix:
    """Test cases for build_transfer."""

    def test_entries_sum_parallel_edges(self, branching):
        """Test two parallel edges add up in one entry."""
        matrix = build_transfer(branching, _weights(branching), Fraction(1))
        assert matrix.entries == [[0, 1], [Fraction(1, 2), 0]]
        assert matrix.is_exact
        assert matrix.lines() == ["T v u", "v 0 1", "u 1/2 0"]

    def test_range_sets_fill_a_row(self, fan):
        """Test an edge with a two-vertex range contributes to both columns."""
        matrix = build_transfer(fan, _weights(fan), Fraction(1))
        assert matrix.entries == [[Fraction(1, 2), Fraction(1, 2)], [Fraction(2, 3), 0]]

    def test_float_entries(self, branching):
        """Test an irrational power makes the matrix inexact."""
        matrix = build_transfer(branching, _weights(branching), Fraction(1, 2))
        assert not matrix.is_exact
        assert matrix.as_array()[0, 1] == pytest.approx(math.sqrt(2))

    def test_family_graphs_are_rejected(self, sec6_graph):
        """Test transfer matrices need finitely many vertices."""
        with pytest.raises(UltraKMSError):
            build_transfer(sec6_graph, _weights(sec6_graph), Fraction(2))


class TestFixedPoints:
    """Test cases for null_basis, extreme_points and solve_kms."""

    def test_exact_unique_state(self, rational):
        """Test T_1 of the rational graph has the state (4/7, 3/7)."""
        solution = solve_kms(rational, _weights(rational), Fraction(1))
        assert solution.exact
        assert solution.kernel_dimension == 1
        assert [_by_name(vector) for vector in solution.vectors] == [
            {"v": Fraction(4, 7), "u": Fraction(3, 7)}
        ]

    def test_exact_state_is_kms(self, rational):
        """Test the solver output passes the m-function verifier."""
        solution = solve_kms(rational, _weights(rational), Fraction(1))
        weights = ScaledWeightM.from_weights(_weights(rational), Fraction(1))
        report = verify_kms_m(solution.states[0], weights, vertex_lattice(rational))
        assert report.passed

    def test_two_extreme_states(self, twoloops):
        """Test two disjoint loops at beta = 0 give a segment of states."""
        solution = solve_kms(twoloops, _weights(twoloops), Fraction(0))
        assert solution.kernel_dimension == 2
        assert [_by_name(vector) for vector in solution.vectors] == [
            {"a": 1, "b": 0},
            {"a": 0, "b": 1},
        ]
        assert [state.name for state in solution.states] == ["m1", "m2"]

    def test_float_state(self, branching):
        """Test beta = 1/2 on the branching graph, m(v) = 2 - sqrt(2)."""
        solution = solve_kms(branching, _weights(branching), Fraction(1, 2))
        assert not solution.exact
        values = _by_name(solution.vectors[0])
        assert values["v"] == pytest.approx(2 - math.sqrt(2))
        assert values["u"] == pytest.approx(math.sqrt(2) - 1)

    def test_exact_mode_refuses_floats(self, branching):
        """Test exact=True raises instead of dropping to floats."""
        with pytest.raises(InexactValue):
            solve_kms(branching, _weights(branching), Fraction(1, 2), exact=True)

    def test_no_state(self, fan, branching):
        """Test an invertible T - I leaves only m = 0."""
        assert solve_kms(fan, _weights(fan), Fraction(1)).is_empty
        matrix = build_transfer(branching, _weights(branching), Fraction(1))
        assert null_basis(matrix) == []
        assert extreme_points([]) == []

    def test_loop_at_zero(self, loop):
        """Test the single loop has its state at beta = 0 only."""
        assert _by_name(solve_kms(loop, _weights(loop), Fraction(0)).vectors[0]) == {"v": 1}
        assert solve_kms(loop, _weights(loop), Fraction(1)).is_empty

    def test_extreme_points_of_a_segment(self):
        """Test both ends of a one-dimensional feasible set are found, singular choices skipped."""
        basis = [[Fraction(1), Fraction(-1), Fraction(0)], [Fraction(0), Fraction(1), Fraction(1)]]
        points = extreme_points(basis)
        assert points == [[Fraction(1, 2), Fraction(0), Fraction(1, 2)], [0, Fraction(1, 2), Fraction(1, 2)]]


class TestCriticalBeta:
    """Test cases for spectral_radius and critical_beta."""

    def test_oscillating_power_iteration(self, branching):
        """Test a period-2 matrix switches to the squared iteration."""
        matrix = build_transfer(branching, _weights(branching), 0.5, exact=False)
        radius = spectral_radius(matrix)
        assert radius.method == "power-squared"
        assert radius.value == pytest.approx(1.0)

    def test_power_iteration_settles(self, golden):
        """Test an aperiodic matrix needs plain power iteration only."""
        matrix = build_transfer(golden, _weights(golden), 0.0, exact=False)
        radius = spectral_radius(matrix)
        assert radius.method == "power"
        assert radius.value == pytest.approx((1 + math.sqrt(5)) / 2)

    def test_eigenvalue_fallback(self, golden):
        """Test the eigenvalues are used when the iteration does not settle."""
        matrix = build_transfer(golden, _weights(golden), 0.0, exact=False)
        radius = spectral_radius(matrix, max_iter=1)
        assert radius.method == "eigvals"
        assert radius.value == pytest.approx((1 + math.sqrt(5)) / 2)

    def test_branching(self, branching):
        """Test rho(T_beta) = sqrt(2) 2^-beta crosses 1 at beta = 1/2."""
        found = critical_beta(branching, _weights(branching))
        assert found.beta == pytest.approx(0.5, abs=1e-8)
        assert "power-squared" in found.method

    def test_golden(self, golden):
        """Test beta* = log(golden ratio) / log 3."""
        found = critical_beta(golden, _weights(golden))
        expected = math.log((1 + math.sqrt(5)) / 2) / math.log(3)
        assert found.beta == pytest.approx(expected, abs=1e-8)
        assert f"{found.beta:.6f}" == "0.438018"

    def test_loop_is_critical_at_zero(self, loop):
        """Test a lower endpoint that is already a root is returned as is."""
        assert critical_beta(loop, _weights(loop)).beta == 0

    def test_brackets(self, loop, golden):
        """Test empty, too-high and too-low brackets."""
        with pytest.raises(NotFound):
            critical_beta(loop, _weights(loop), lo=1.0, hi=1.0)
        with pytest.raises(NotFound):
            critical_beta(loop, _weights(loop), lo=1.0, hi=2.0)
        with pytest.raises(NotFound):
            critical_beta(golden, _weights(golden), lo=0.0, hi=0.1)


class TestGround:
    """Test cases for solve_ground."""

    def test_finite_graphs_have_none(self, rational):
        """Test no infinite emitters means no ground state."""
        ground = solve_ground(rational)
        assert ground.is_empty
        assert ground.extreme_points() == []
        assert ground.lines() == ["ground states: none (no infinite emitters)"]

    def test_sec6_segment(self, sec6_graph):
        """Test the sec6 ground states are m(B) + m(w) = 1 with zero vertex atoms."""
        ground = solve_ground(sec6_graph)
        assert ground.emitters == ("B", "w")
        assert ground.lines()[0] == "ground states: m(B) + m(w) = 1, each >= 0"
        half = ground.state({"B": Fraction(1, 2), "w": Fraction(1, 2)})
        assert verify_ground_m(half, sec6_graph.test_lattice(12)).passed
        assert len(ground.extreme_points()) == 2

    def test_bad_coordinates(self, sec6_graph):
        """Test unknown emitters and coordinates off the simplex."""
        ground = solve_ground(sec6_graph)
        with pytest.raises(MissingAtom):
            ground.state({"C": Fraction(1)})
        with pytest.raises(UltraKMSError):
            ground.state({"B": Fraction(2), "w": Fraction(-1)})


class TestSolverAgainstVerifier:
    """Test cases for solve_kms and verify_kms_m on random finite graphs."""

    @given(data=st.data())
    @settings(
        max_examples=50,
        deadline=None,
        suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    )
    def test_fixed_points_are_exactly_the_verified_states(self, data):
        """Test mixtures of solver states pass and a simplex point passes exactly when T m = m."""
        graph = data.draw(finite_ultragraphs())
        weights = EdgeWeightN.from_values(
            {edge: Fraction(data.draw(st.sampled_from([2, 3, 5]))) for edge in graph.edges()}
        )
        beta = Fraction(data.draw(st.sampled_from([0, 1, 2])))
        scaled = ScaledWeightM.from_weights(weights, beta, exact=True)
        lattice = vertex_lattice(graph)
        vertices = list(graph.vertices())

        solution = solve_kms(graph, weights, beta, exact=True)
        assert solution.exact
        for state in solution.states:
            assert verify_kms_m(state, scaled, lattice).passed

        if solution.states:
            count = len(solution.states)
            coefficients = data.draw(st.lists(st.integers(1, 5), min_size=count, max_size=count))
            total = Fraction(sum(coefficients))
            weighted = list(zip(coefficients, solution.vectors))
            mixture = {
                vertex: sum(c * vector[vertex] for c, vector in weighted) / total for vertex in vertices
            }
            assert verify_kms_m(MFunction.from_vector(graph, mixture), scaled, lattice).passed

        raw = data.draw(st.lists(st.integers(1, 4), min_size=len(vertices), max_size=len(vertices)))
        point = [Fraction(value, sum(raw)) for value in raw]
        basis = null_basis(build_transfer(graph, weights, beta, exact=True))
        rows = [[as_sympy(value) for value in vector] for vector in basis + [point]]
        inside = bool(basis) and Matrix(rows).rank() == len(basis)
        candidate = MFunction.from_vector(graph, dict(zip(vertices, point)))
        assert verify_kms_m(candidate, scaled, lattice).passed == inside

        assert solve_ground(graph).is_empty
