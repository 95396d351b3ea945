"""Tests for spanning elements, their products and the KMS pair check."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings

from ultrakms.exceptions import DomainViolation
from ultrakms.models import Verdict
from ultrakms.services.kappa_measure import KappaMeasure, kappa
from ultrakms.services.kms_solver import solve_kms
from ultrakms.services.star_symbolic import (
    ProductCase,
    StateFunctional,
    adjoint,
    adjoint_product,
    gauge_invariant,
    kms_check,
    multiply,
    paths_up_to,
    spanning,
    spanning_elements,
)
from ultrakms.services.state_functions import EdgeWeightN, MFunction, ScaledWeightM
from ultrakms.tools.parser import parse_set
from ultrakms.tools.shift_space import make_cylinder

from tests.strategies import kms_pairs


def _path(graph, names):
    return tuple(graph.edge(name) for name in names.split())


@pytest.fixture
def rational_M(rational):
    return ScaledWeightM.from_weights(EdgeWeightN.from_graph(rational), Fraction(1))


@pytest.fixture
def rational_phi(rational, rational_M):
    m = MFunction.from_names(rational, {"v": Fraction(4, 7), "u": Fraction(3, 7)})
    return StateFunctional(m, rational_M)


class TestSpanningElements:
    """Test cases for spanning and adjoint."""

    def test_middle_defaults_to_the_ranges(self, rational):
        """Test A is cut to r(mu) and r(nu)."""
        x = spanning(rational, _path(rational, "e1"), None, _path(rational, "e2"))
        assert x.middle == parse_set(rational, "u")
        assert x.label() == "[e1 ; {u} ; e2]"
        assert gauge_invariant(x)
        assert not gauge_invariant(spanning(rational, _path(rational, "e1"), None, ()))

    def test_zero_and_invalid(self, rational):
        """Test a middle set missing r(mu) gives zero, a non-path raises."""
        assert spanning(rational, _path(rational, "e1"), parse_set(rational, "v")) is None
        with pytest.raises(DomainViolation):
            spanning(rational, _path(rational, "e1 e1"))
        with pytest.raises(DomainViolation):
            spanning(rational)

    def test_adjoint_swaps_paths(self, rational):
        """Test (s_mu p_A s_nu*)* = s_nu p_A s_mu*."""
        x = spanning(rational, _path(rational, "e1 e3"), None, ())
        assert adjoint(x).mu == () and adjoint(x).nu == x.mu
        assert adjoint(adjoint(x)) == x
        assert adjoint(None) is None

    def test_paths_up_to(self, rational):
        """Test the empty path, three edges and four two-edge paths."""
        assert len(paths_up_to(rational, 2)) == 8


class TestProducts:
    """Test cases for adjoint_product and multiply."""

    def test_adjoint_product_cases(self, rational):
        """Test the four shapes of s_nu* s_mu."""
        e1, e3 = _path(rational, "e1"), _path(rational, "e3")
        e3e1 = _path(rational, "e3 e1")
        assert adjoint_product(e1, e1) == (ProductCase.RANGE, ())
        assert adjoint_product(e3, e3e1) == (ProductCase.MU_PRIME, e1)
        assert adjoint_product(e3e1, e3) == (ProductCase.NU_PRIME, e1)
        assert adjoint_product(e1, e3) == (ProductCase.ZERO, ())

    def test_isometry_relations(self, rational):
        """Test s_e* s_e = p_r(e), s_e s_e* is a range projection and s_e1 s_e1 = 0."""
        x = spanning(rational, _path(rational, "e1"), None, ())
        assert multiply(rational, adjoint(x), x) == spanning(rational, (), parse_set(rational, "u"), ())
        assert multiply(rational, x, adjoint(x)).label() == "[e1 ; {u} ; e1]"
        assert multiply(rational, x, x) is None
        assert multiply(rational, x, None) is None

    def test_longer_adjoint_path(self, rational):
        """Test s_(e3 e1)* s_e3 leaves s_e1* behind."""
        a = spanning(rational, (), None, _path(rational, "e3 e1"))
        b = spanning(rational, _path(rational, "e3"), None, ())
        assert multiply(rational, a, b).label() == "[ ; {u} ; e1]"

    @pytest.mark.parametrize("name", ["rational", "fan"])
    def test_multiply_is_associative(self, request, name):
        """Test (ab)c = a(bc) on every triple of spanning elements with paths up to one edge."""
        graph = request.getfixturevalue(name)
        elements = list(spanning_elements(graph, 1))
        for a, b, c in itertools.product(elements, repeat=3):
            left = multiply(graph, multiply(graph, a, b), c)
            right = multiply(graph, a, multiply(graph, b, c))
            assert left == right, (a.label(), b.label(), c.label())


class TestStateFunctional:
    """Test cases for phi and kms_check."""

    def test_phi_values(self, rational, rational_phi):
        """Test phi is M(mu) m(A) on the diagonal and 0 off it."""
        diagonal = spanning(rational, _path(rational, "e1"), None, _path(rational, "e1"))
        assert rational_phi(diagonal) == Fraction(2, 7)
        assert rational_phi(spanning(rational, _path(rational, "e1"), None, _path(rational, "e2"))) == 0
        assert rational_phi(None) == 0

    def test_exact_state_passes(self, rational, rational_phi, rational_M):
        """Test the rational state satisfies every pair exactly."""
        report = kms_check(rational_phi.m, rational_M, length=2)
        assert report.passed
        assert report.verdict_of("kms-pair") is Verdict.PASS
        assert report.verdict_of("ck-relation") is Verdict.PASS
        assert not report.notes

    def test_solved_branching_state(self, branching):
        """Test the solved state at beta* = 1/2 over every pair with paths up to 3 edges."""
        beta = Fraction(1, 2)
        weights = ScaledWeightM.from_weights(EdgeWeightN.from_graph(branching), beta)
        m = solve_kms(branching, EdgeWeightN.from_graph(branching), beta).states[0]
        report = kms_check(m, weights, length=3, tol=1e-12)
        assert report.passed
        assert report.verdict_of("kms-pair") is Verdict.PASS

    def test_perturbed_branching_state_fails(self, branching):
        """Test moving 1e-2 onto m(v) and renormalizing breaks the check."""
        beta = Fraction(1, 2)
        weights = ScaledWeightM.from_weights(EdgeWeightN.from_graph(branching), beta)
        m = solve_kms(branching, EdgeWeightN.from_graph(branching), beta).states[0]
        v, u = branching.vertex("v"), branching.vertex("u")
        shifted = {v: m.atom(v) + 1e-2, u: m.atom(u)}
        total = sum(shifted.values())
        renormalized = {key: value / total for key, value in shifted.items()}
        perturbed = MFunction.from_vector(branching, renormalized)
        report = kms_check(perturbed, weights, length=3, tol=1e-12)
        assert not report.passed
        assert report.failures()

    def test_wrong_state_breaks_the_relation(self, rational, rational_M):
        """Test m(v) = m(u) = 1/2 fails the Cuntz-Krieger relation at {v}."""
        m = MFunction.from_names(rational, {"v": Fraction(1, 2), "u": Fraction(1, 2)})
        report = kms_check(m, rational_M, length=1)
        assert report.verdict_of("ck-relation") is Verdict.FAIL
        assert "[ ; {v} ; ]" in [check.witness for check in report.failures("ck-relation")]

    def test_trace_note_at_zero(self, loop):
        """Test beta = 0 is flagged as the trace case."""
        weights = ScaledWeightM.from_weights(EdgeWeightN.from_graph(loop), Fraction(0))
        report = kms_check(MFunction.from_names(loop, {"v": Fraction(1)}), weights, length=2)
        assert report.passed
        assert report.notes == ["beta = 0: trace case, the KMS extension need not be unique"]

    @given(pair=kms_pairs())
    @settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    def test_random_pairs(self, pair):
        """Test the pair check and the cylinder measure agree with the m-function."""
        assert kms_check(pair.m, pair.weights, length=1).passed
        phi = StateFunctional(pair.m, pair.weights)
        measure = KappaMeasure(pair.m, pair.weights)
        for x in spanning_elements(pair.graph, 1):
            if x.mu == x.nu:
                assert phi(x) == kappa(measure, make_cylinder(pair.graph, x.mu, x.middle))
