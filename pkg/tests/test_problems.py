import numpy as np
import pytest

import nehari as nh
from nehari.problems import estimate_eta_theta, _mesh_x_samples

from conftest import make_model_problem
from oracles import eta_theta_oracle


class TestKirchhoff:
    def test_constant(self):
        kir = nh.Kirchhoff.constant(2.0)
        s = np.geomspace(1e-3, 1e3, 7)
        np.testing.assert_allclose(kir.m(s), 2.0)
        np.testing.assert_allclose(kir.mp(s), 0.0)
        np.testing.assert_allclose(kir.M(s), 2.0 * s, rtol=1e-14)
        eta, theta = estimate_eta_theta(kir)
        assert eta == 0.0
        assert theta == 1.0

    def test_affine(self):
        kir = nh.Kirchhoff.affine_power(1.0, 0.5, 1.0)
        s = np.array([0.0, 1.0, 4.0])
        np.testing.assert_allclose(kir.m(s), [1.0, 1.5, 3.0], rtol=1e-15)
        np.testing.assert_allclose(kir.M(s), s + 0.25 * s ** 2, rtol=1e-14)
        eta, theta = estimate_eta_theta(kir)
        assert (eta, theta) == (1.0, 2.0)

    def test_pure_power(self):
        kir = nh.Kirchhoff.affine_power(0.0, 1.0, 2.0)
        eta, theta = estimate_eta_theta(kir)
        assert (eta, theta) == (2.0, 3.0)
        np.testing.assert_allclose(kir.M(np.array([2.0])), [8.0 / 3.0], rtol=1e-14)

    def test_fractional_power_eta(self):
        # grid suprema saturate far too slowly for s^0.1; the closed form
        # is the only trustworthy value and the oracle documents the gap
        kir = nh.Kirchhoff.affine_power(1.0, 0.1, 0.1)
        eta, theta = estimate_eta_theta(kir)
        assert (eta, theta) == (0.1, 1.1)
        eta_grid, theta_grid = eta_theta_oracle(kir.m, kir.mp, kir.M)
        assert eta_grid <= eta + 1e-12
        assert theta_grid <= theta + 1e-12

    def test_affine_eta_matches_grid_oracle(self):
        # eta_exp = 1 saturates fast enough for the grid to see it
        kir = nh.Kirchhoff.affine_power(1.0, 1.0, 1.0)
        eta, theta = estimate_eta_theta(kir)
        eta_grid, theta_grid = eta_theta_oracle(kir.m, kir.mp, kir.M)
        assert eta_grid == pytest.approx(eta, abs=1e-3)
        assert theta_grid == pytest.approx(theta, abs=1e-3)

    def test_custom_quadrature_primitive(self):
        kir = nh.Kirchhoff.custom(lambda s: 1.0 + s, lambda s: np.ones_like(s))
        s = np.array([2.0])
        np.testing.assert_allclose(kir.M(s), [2.0 + 2.0], rtol=1e-11)
        eta, theta = estimate_eta_theta(kir)
        assert eta == pytest.approx(1.0, abs=1e-3)
        assert theta == pytest.approx(2.0, abs=1e-3)

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            nh.Kirchhoff.constant(0.0)
        with pytest.raises(ValueError):
            nh.Kirchhoff.affine_power(-1.0, 1.0, 1.0)


class TestReactions:
    def test_power_indices_exact(self):
        rx = nh.Reactions.powers(0.5, 4.0)
        assert rx.gamma_minus == 0.5
        assert rx.gamma_plus == 0.5
        assert rx.r_minus == 4.0
        assert rx.r_plus == 4.0

    def test_power_values(self):
        rx = nh.Reactions.powers(0.5, 4.0)
        s = np.array([4.0])
        np.testing.assert_allclose(rx.f_abs(s), 0.5, rtol=1e-15)
        np.testing.assert_allclose(rx.F_abs(s), 4.0, rtol=1e-15)
        np.testing.assert_allclose(rx.g_abs(s), 64.0, rtol=1e-15)
        np.testing.assert_allclose(rx.G_abs(s), 64.0, rtol=1e-15)
        # combined forms sidestep the 0^-gamma singularity entirely
        np.testing.assert_allclose(rx.f_abs_s(np.array([0.0])), 0.0)
        np.testing.assert_allclose(rx.f_abs_s(s), 4.0 ** 0.5, rtol=1e-15)

    def test_custom_indices_estimated(self):
        # f = s^{-1/2} and g = s^3 + s^4: r ranges over [4, 5]
        rx = nh.Reactions(
            gamma=None, r=None,
            f=lambda s: s ** (-0.5),
            fp=lambda s: -0.5 * s ** (-1.5),
            F=lambda s: 2.0 * s ** 0.5,
            g=lambda s: s ** 3 + s ** 4,
            gp=lambda s: 3.0 * s ** 2 + 4.0 * s ** 3,
            G=lambda s: s ** 4 / 4 + s ** 5 / 5)
        assert rx.gamma_minus == pytest.approx(0.5, abs=1e-6)
        assert rx.gamma_plus == pytest.approx(0.5, abs=1e-6)
        assert rx.r_minus == pytest.approx(4.0, abs=1e-3)
        assert rx.r_plus == pytest.approx(5.0, abs=1e-3)

    def test_clamp_counting(self):
        # only custom callbacks route through the clamp floor
        rx = nh.Reactions(
            gamma=None, r=4.0,
            f=lambda s: s ** (-0.5), fp=lambda s: -0.5 * s ** (-1.5),
            F=lambda s: 2.0 * s ** 0.5)
        before = rx.clamp_events
        rx.f_abs(np.array([1e-15, 1.0]))
        assert rx.clamp_events == before + 1
        powers = nh.Reactions.powers(0.5, 4.0)
        powers.f_abs(np.array([0.0, 1e-15, 1.0]))
        assert powers.clamp_events == 0

    def test_gamma_range_enforced(self):
        with pytest.raises(ValueError):
            nh.Reactions.powers(1.0, 4.0)
        with pytest.raises(ValueError):
            nh.Reactions.powers(-0.1, 4.0)


class TestProblem:
    def test_p_star_2d(self, mesh8):
        prob = make_model_problem(mesh8)
        # N = 2, p_idx = 1.5: critical exponent 2*1.5/(2-1.5) = 6
        assert prob.p_star == pytest.approx(6.0, abs=1e-9)

    def test_p_star_unconstrained(self, power_problem):
        # p_idx = 2.5 >= N = 2 leaves no Sobolev ceiling
        assert power_problem.p_star == np.inf

    def test_with_lambda(self, model_problem8):
        other = model_problem8.with_lambda(0.5)
        assert other.lam == 0.5
        assert other.nf is model_problem8.nf
        assert model_problem8.lam != 0.5

    def test_lambda_positive_required(self, mesh8):
        with pytest.raises(ValueError):
            make_model_problem(mesh8, lam=0.0)

    def test_mu_qp_geometry(self, mesh8):
        nf = nh.NFunction.double_phase(1.5, 3.0, nh.coordinate_weight(0))
        prob = nh.build_problem(nf, nh.Kirchhoff.constant(1.0),
                                nh.Reactions.powers(0.5, 4.0), 1e-3, mesh8)
        np.testing.assert_allclose(prob.mu_qp().ravel(),
                                   mesh8.qp_flat[:, 0], rtol=1e-13)

    def test_summary_serializable(self, model_problem8):
        import json
        json.dumps(model_problem8.summary())

    def test_x_samples_cover_mesh(self, mesh8):
        xs = _mesh_x_samples(mesh8)
        assert xs.shape[1] == 2
        assert np.all(xs >= 0.0) and np.all(xs <= 1.0)
        assert xs.shape[0] >= 3


class TestHypothesisAudit:
    def test_model_problem_passes(self, model_problem8):
        rep = nh.check_hypotheses(model_problem8)
        assert rep.all_ok, rep.as_dict()
        # coupling margin: q_idx*eta + l_plus = 3*0 + 2 = 2 < r_minus - 1 = 3
        assert rep.ok_coupling

    def test_r_equal_two_fails_coupling(self, mesh8):
        prob = make_model_problem(mesh8)
        bad = nh.build_problem(prob.nf, prob.kirchhoff,
                               nh.Reactions.powers(0.5, 2.0), prob.lam, mesh8)
        rep = nh.check_hypotheses(bad)
        assert not rep.all_ok
        assert not rep.ok_coupling
        # q_idx*eta + l_plus = 2 >= r_minus - 1 = 1 is the violated line
        assert any("coupling" in n for n in rep.notes)

    def test_supercritical_g_fails(self, mesh8):
        prob = make_model_problem(mesh8)
        bad = nh.build_problem(prob.nf, prob.kirchhoff,
                               nh.Reactions.powers(0.5, 6.5), prob.lam, mesh8)
        rep = nh.check_hypotheses(bad)
        assert not rep.ok_superlinear

    def test_growing_kirchhoff_tightens_coupling(self, mesh8):
        # m(s) = 1 + 0.1 s has eta = 1: coupling 3*1 + 2 = 5 >= 3 fails
        prob = make_model_problem(
            mesh8, kirchhoff=nh.Kirchhoff.affine_power(1.0, 0.1, 1.0))
        rep = nh.check_hypotheses(prob)
        assert not rep.ok_coupling

    def test_slow_kirchhoff_growth_passes(self, mesh8):
        # m(s) = 1 + 0.1 s^0.1 has eta = 0.1: coupling 3*0.1 + 2 = 2.3 < 3
        prob = make_model_problem(
            mesh8, kirchhoff=nh.Kirchhoff.affine_power(1.0, 0.1, 0.1))
        rep = nh.check_hypotheses(prob)
        assert rep.all_ok, rep.as_dict()

    def test_theta_between_one_and_eta_plus_one(self, mesh8):
        for kir in (nh.Kirchhoff.constant(1.0),
                    nh.Kirchhoff.affine_power(1.0, 1.0, 1.0),
                    nh.Kirchhoff.affine_power(0.0, 1.0, 2.0)):
            prob = make_model_problem(mesh8, kirchhoff=kir)
            assert 1.0 <= prob.theta <= prob.eta + 1.0 + 1e-12

    def test_report_dict_round_trip(self, model_problem8):
        import json
        d = nh.check_hypotheses(model_problem8).as_dict()
        assert json.loads(json.dumps(d)) == d
