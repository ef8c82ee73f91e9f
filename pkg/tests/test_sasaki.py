import numpy as np
import pytest
import sympy as sp

from hiddensym import sasaki
from hiddensym.killing import ky_residual
from hiddensym.manifold import Chart, GeometryError, Manifold, TensorField, vector
from hiddensym.sasaki import (EPS, ConeManifold, MixedThreeStructure,
                              build_cone, cone_roundtrip_residual,
                              einstein_check, ky_odd_rank_candidate,
                              ky_odd_rank_check, para_hyperkahler_check,
                              reverse_cone, sectional_curvature_check,
                              structure_identity_suite, wedge_forms)


@pytest.fixture(scope="module")
def S(ps):
    return ps.structure


class TestStructureValidation:
    def test_dimension_must_be_4n_plus_3(self):
        chart = Chart(("x", "y"), {"x": (0, 1), "y": (0, 1)})
        M = Manifold(chart, [[1, 0], [0, 1]])
        zero = TensorField(np.zeros((2, 2), dtype=object), "ud")
        with pytest.raises(GeometryError):
            MixedThreeStructure(M, [zero] * 3, [vector([0, 0])] * 3,
                                [vector([0, 0])] * 3)

    def test_needs_three_triples(self, S):
        with pytest.raises(GeometryError):
            MixedThreeStructure(S.manifold, S.phi[:2], S.xi[:2], S.eta[:2])

    def test_rank(self, S):
        assert S.sasakian_rank == 0

    def test_signs(self):
        assert EPS == (1, -1, -1)


class TestFixtureSuites:
    """Full residual suites run in acceptance; spot-check components here."""

    def test_identities(self, S):
        assert structure_identity_suite(S, points=5).passed

    def test_sectional_curvature_one(self, S):
        rep = sectional_curvature_check(S, points=5)
        assert rep.passed

    def test_einstein_constant_two(self, S):
        assert einstein_check(S.manifold, 2.0, points=5).passed

    def test_wrong_einstein_constant_fails(self, S):
        assert not einstein_check(S.manifold, 3.0, points=5).passed

    def test_xi_causal_characters(self, S):
        """One timelike and two spacelike unit structure fields."""
        M = S.manifold
        p = {"rho": 0.7, "t": 1.0, "psi": 2.0}
        g = M.metric_at(p)
        norms = [float(S.xi[a].at(M, p) @ g @ S.xi[a].at(M, p))
                 for a in range(3)]
        assert abs(norms[0] - 1) < 1e-12       # eps_1 = +1
        assert abs(norms[1] + 1) < 1e-12
        assert abs(norms[2] + 1) < 1e-12


class TestCone:
    def test_radial_name_clash_rejected(self, S):
        with pytest.raises(GeometryError):
            build_cone(S, radial="rho")

    def test_cone_metric_block_structure(self, S):
        C = build_cone(S)
        g = C.manifold.metric
        n = S.manifold.dim
        r = sp.Symbol("r")
        assert g[n, n] == 1
        assert sp.simplify(g[0, 0] - r ** 2 * S.manifold.metric[0, 0]) == 0

    def test_euler_field(self, S):
        C = build_cone(S)
        comp = C.euler_field().components
        assert comp[-1] == sp.Symbol("r")
        assert all(c == 0 for c in comp[:-1])

    def test_para_hyperkahler(self, S):
        C = build_cone(S)
        assert para_hyperkahler_check(C, points=5).passed

    def test_round_trip(self, S):
        C = build_cone(S)
        assert cone_roundtrip_residual(S, C, points=5).passed

    def test_reverse_cone_returns_structure(self, S):
        R = reverse_cone(build_cone(S))
        assert isinstance(R, MixedThreeStructure)
        assert structure_identity_suite(R, points=3).passed


class TestOddRankTowers:
    def test_eta_is_rank_one_ky(self, S):
        assert ky_odd_rank_check(S, k=0, alpha=0, points=5).passed

    def test_eta_wedge_deta_is_rank_three_ky(self, S):
        assert ky_odd_rank_check(S, k=1, alpha=0, points=5).passed

    def test_candidate_rank(self, S):
        cand = ky_odd_rank_candidate(S, alpha=0, k=1)
        assert cand.rank == 3

    def test_rank_exceeding_dimension_rejected(self, S):
        with pytest.raises(GeometryError):
            ky_odd_rank_candidate(S, alpha=0, k=2)


class TestWedge:
    def test_wedge_antisymmetry(self, S):
        a, b = S.eta[0], S.eta[1]
        ab = wedge_forms(a, b).components
        ba = wedge_forms(b, a).components
        assert all(sp.simplify(x + y) == 0
                   for x, y in zip(ab.flatten(), ba.flatten()))

    def test_wedge_of_one_forms_components(self, S):
        a, b = S.eta[0], S.eta[1]
        w = wedge_forms(a, b).components
        expected = (a.components[0] * b.components[1]
                    - a.components[1] * b.components[0])
        assert sp.simplify(w[0, 1] - expected) == 0
