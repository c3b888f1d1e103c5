import numpy as np
import pytest

import nehari as nh
from nehari.energy import (FiberingEvaluator, check_basic_estimates, energy,
                           energy_value, fibering, grad_J, kirchhoff_A,
                           kirchhoff_B, operator_apply, phi_value,
                           reaction_growth_ratios, residual_norm)

from conftest import SEED, make_model_problem
from oracles import central_difference


class TestKirchhoffBracket:
    def test_power_closed_form(self, power_problem):
        # H = s^p, m = 1: A = p*phi and B = (p-1)*A exactly
        p = 2.5
        u = nh.sine_mode(power_problem.mesh)
        gm = u.grad_mag()
        phi = phi_value(power_problem, u)
        A = kirchhoff_A(power_problem, gm)
        B = kirchhoff_B(power_problem, gm)
        assert A == pytest.approx(p * phi, rel=1e-13)
        assert B == pytest.approx((p - 1.0) * A, rel=1e-13)

    def test_zero_field(self, power_problem):
        zero = np.zeros(power_problem.mesh.n_cells)
        assert kirchhoff_A(power_problem, zero) == 0.0
        assert kirchhoff_B(power_problem, zero) == 0.0

    def test_bracket_holds_random(self, model_problem8, rng):
        for _ in range(10):
            u = nh.random_fe_function(model_problem8.mesh, rng)
            rep = check_basic_estimates(model_problem8, u)
            assert rep.ok, rep

    def test_bracket_with_growing_kirchhoff(self, mesh8, rng):
        prob = make_model_problem(
            mesh8, kirchhoff=nh.Kirchhoff.affine_power(1.0, 1.0, 1.0))
        for _ in range(10):
            u = nh.random_fe_function(mesh8, rng)
            rep = check_basic_estimates(prob, u)
            assert rep.ok, rep


class TestEnergy:
    def test_scalar_closed_form_power_case(self, power_problem):
        # J(t u) = a t^p / p - lam b t^(1-gamma)/(1-gamma) - c t^r / r
        mesh = power_problem.mesh
        u = nh.sine_mode(mesh)
        au = np.abs(u.at_qp())
        a = 2.5 * phi_value(power_problem, u)
        b = float(np.sum(mesh.qw * au ** 0.5))
        c = float(np.sum(mesh.qw * au ** 4.0))
        lam = power_problem.lam
        for t in (0.3, 1.0, 2.7):
            want = (a * t ** 2.5 / 2.5 - lam * b * t ** 0.5 / 0.5
                    - c * t ** 4.0 / 4.0)
            got = energy_value(power_problem, u * t)
            assert got == pytest.approx(want, rel=1e-12), t

    def test_breakdown_total(self, model_problem8, rng):
        u = nh.random_fe_function(model_problem8.mesh, rng)
        br = energy(model_problem8, u)
        assert br.total == br.kirchhoff - br.singular - br.superlinear
        assert br.kirchhoff > 0 and br.singular > 0 and br.superlinear > 0
        assert energy_value(model_problem8, u) == br.total

    def test_evenness_exact(self, model_problem8, rng):
        for _ in range(5):
            u = nh.random_fe_function(model_problem8.mesh, rng)
            assert energy_value(model_problem8, u) == energy_value(model_problem8, -u)

    def test_sign_definite_abs_invariance(self, model_problem8):
        u = nh.sine_mode(model_problem8.mesh)
        assert energy_value(model_problem8, abs(-u)) == energy_value(model_problem8, u)

    def test_fibering_evenness(self, model_problem8, rng):
        u = nh.random_fe_function(model_problem8.mesh, rng)
        for t in (0.5, 1.0, 3.0):
            assert fibering(model_problem8, u, t) == fibering(model_problem8, -u, t)


class TestGradient:
    def test_rejects_zero(self, model_problem8):
        with pytest.raises(ValueError):
            grad_J(model_problem8, nh.FeFunction.zero(model_problem8.mesh))

    def test_pairing_matches_dpsi(self, model_problem8, rng):
        # <grad J(u), u> = psi_u'(1), an algebraic identity of the assembly
        for _ in range(5):
            u = nh.random_fe_function(model_problem8.mesh, rng)
            ev = FiberingEvaluator(model_problem8, u)
            pair = float(grad_J(model_problem8, u) @ u.values)
            assert pair == pytest.approx(ev.dpsi(1.0),
                                         abs=1e-11 * (1.0 + ev.dpsi_scale(1.0)))

    def test_directional_derivative_fd(self, mesh8, rng):
        # Kirchhoff coefficient on so the m(phi)-chain rule is exercised
        prob = make_model_problem(
            mesh8, kirchhoff=nh.Kirchhoff.affine_power(1.0, 1.0, 1.0))
        for _ in range(5):
            u = nh.random_fe_function(mesh8, rng, kind="positive")
            v = nh.random_fe_function(mesh8, rng)
            g = float(grad_J(prob, u) @ v.values)
            best = np.inf
            for eps in (1e-4, 1e-5):
                fd = central_difference(
                    lambda s: energy_value(prob, nh.FeFunction(
                        mesh8, u.values + s * v.values)), 0.0, eps)
                best = min(best, abs(fd - g) / (1.0 + abs(g)))
            assert best <= 1e-5

    def test_residual_norm_interior_rows(self, model_problem8, rng):
        u = nh.random_fe_function(model_problem8.mesh, rng)
        r = grad_J(model_problem8, u)
        assert residual_norm(model_problem8, u) == pytest.approx(
            float(np.linalg.norm(r[model_problem8.mesh.interior])), rel=1e-15)
        assert np.all(r[model_problem8.mesh.boundary] == 0.0)


class TestOperatorMonotonicity:
    def test_strictly_positive_pairing(self, model_problem8, rng):
        mesh = model_problem8.mesh
        for _ in range(20):
            u = nh.random_fe_function(mesh, rng)
            v = nh.random_fe_function(mesh, rng)
            du = u.values - v.values
            pair = float((operator_apply(model_problem8, u)
                          - operator_apply(model_problem8, v)) @ du)
            assert pair > 1e-14


class TestFiberingMaps:
    def test_derivative_consistency(self, model_problem8, rng):
        u = nh.random_fe_function(model_problem8.mesh, rng)
        ev = FiberingEvaluator(model_problem8, u)
        for t in (0.2, 1.0, 5.0):
            fd1 = central_difference(ev.psi, t, 1e-6 * t)
            assert abs(fd1 - ev.dpsi(t)) <= 1e-6 * (1.0 + ev.dpsi_scale(t)), t
            fd2 = central_difference(ev.dpsi, t, 1e-6 * t)
            assert abs(fd2 - ev.d2psi(t)) <= 1e-6 * (1.0 + ev.d2psi_scale(t)), t

    def test_scaling_identities(self, model_problem8, rng):
        for _ in range(5):
            u = nh.random_fe_function(model_problem8.mesh, rng)
            ev_u = FiberingEvaluator(model_problem8, u)
            for t in (0.1, 0.9, 4.0):
                ev_tu = FiberingEvaluator(model_problem8, u * t)
                scale0 = 1.0 + abs(ev_u.psi(t))
                assert abs(ev_u.psi(t) - ev_tu.psi(1.0)) <= 1e-11 * scale0
                scale1 = 1.0 + ev_u.dpsi_scale(t) * t
                assert abs(t * ev_u.dpsi(t) - ev_tu.dpsi(1.0)) <= 1e-11 * scale1
                scale2 = 1.0 + ev_u.d2psi_scale(t) * t * t
                assert abs(t * t * ev_u.d2psi(t) - ev_tu.d2psi(1.0)) <= 1e-11 * scale2

    def test_psi_at_one_is_energy(self, model_problem8, rng):
        u = nh.random_fe_function(model_problem8.mesh, rng)
        ev = FiberingEvaluator(model_problem8, u)
        assert ev.psi(1.0) == pytest.approx(energy_value(model_problem8, u),
                                            rel=1e-13)

    def test_t_must_be_positive(self, model_problem8):
        ev = FiberingEvaluator(model_problem8, nh.sine_mode(model_problem8.mesh))
        for bad in (0.0, -1.0):
            with pytest.raises(ValueError):
                ev.psi(bad)

    def test_zero_direction_rejected(self, model_problem8):
        with pytest.raises(ValueError):
            FiberingEvaluator(model_problem8, nh.FeFunction.zero(model_problem8.mesh))

    def test_singular_term_dominates_small_t(self, model_problem8):
        # psi(t) -> 0- as t -> 0+ through the -t^(1-gamma) term, so psi
        # must be negative for small t along any nonzero ray
        ev = FiberingEvaluator(model_problem8, nh.sine_mode(model_problem8.mesh))
        assert ev.psi(1e-8) < 0.0
        # and superlinear growth wins for large t on the minus side
        assert ev.psi(1e6) < 0.0


class TestReactionRatios:
    def test_bounded_and_positive(self, model_problem8, rng):
        vals = []
        for _ in range(10):
            u = nh.random_fe_function(model_problem8.mesh, rng)
            r = reaction_growth_ratios(model_problem8, u)
            assert np.isfinite(r.ratio_F) and r.ratio_F > 0
            assert np.isfinite(r.ratio_G_upper) and r.ratio_G_upper > 0
            assert r.ratio_G_lower > 0
            vals.append(r.ratio_F)
        # empirical constants stay within a sane dynamic range on one mesh
        assert max(vals) / min(vals) < 1e3
