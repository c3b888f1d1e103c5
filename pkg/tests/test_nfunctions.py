import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import nehari as nh
from nehari.nfunctions import DEFAULT_X_SAMPLES

from oracles import central_difference, log_threshold_oracle

X0 = np.array([[0.25, 0.5]])


def builtin_pairs():
    """Every built-in kind with both weight choices, per its own parameters."""
    out = [("power", nh.NFunction.power(2.0))]
    for mu, tag in ((nh.constant_weight(1.0), "mu=1"),
                    (nh.coordinate_weight(0), "mu=x0")):
        out.append((f"double_phase {tag}",
                    nh.NFunction.double_phase(1.5, 3.0, mu)))
        out.append((f"log_double_phase {tag}",
                    nh.NFunction.log_double_phase(1.5, 3.0, mu)))
        out.append((f"log_perturbed {tag}",
                    nh.NFunction.log_perturbed_double_phase(1.5, 3.0, mu)))
    return out


class TestPointEvaluations:
    def test_power_values(self):
        nf = nh.NFunction.power(2.0)
        s = np.array([3.0])
        assert nf.h(X0, s)[0] == 9.0
        assert nf.dh(X0, s)[0] == 6.0
        assert nf.d2h(X0, s)[0] == 2.0

    def test_double_phase_values(self):
        nf = nh.NFunction.double_phase(1.5, 3.0, nh.constant_weight(1.0))
        s = np.array([1.0])
        assert nf.h(X0, s)[0] == pytest.approx(2.0, rel=1e-15)
        assert nf.dh(X0, s)[0] == pytest.approx(4.5, rel=1e-15)

    def test_all_kinds_vanish_at_zero(self):
        for name, nf in builtin_pairs():
            assert nf.h(X0, np.array([0.0]))[0] == 0.0, name

    def test_negative_s_rejected(self):
        nf = nh.NFunction.log_double_phase(1.5, 3.0, nh.constant_weight(1.0))
        for method in (nf.h, nf.dh, nf.d2h):
            with pytest.raises(ValueError):
                method(X0, np.array([-1.0]))

    def test_strict_monotonicity_and_positivity(self):
        s = np.geomspace(1e-4, 1e4, 120)
        x = np.tile(X0, (s.size, 1))
        for name, nf in builtin_pairs():
            assert np.all(nf.h(x, s) > 0), name
            assert np.all(nf.dh(x, s) > 0), name


class TestDerivativesAgainstFiniteDifferences:
    TOL = 1e-6

    @pytest.mark.parametrize("name,nf", builtin_pairs())
    def test_first_derivative(self, name, nf):
        s_grid = np.geomspace(1e-4, 1e4, 60)
        for s in s_grid:
            h = 1e-6 * s
            fd = central_difference(
                lambda v: nf.h(X0, np.array([v]))[0], float(s), h)
            dh = nf.dh(X0, np.array([s]))[0]
            assert abs(fd - dh) <= self.TOL * (1.0 + abs(dh)), (name, s)

    @pytest.mark.parametrize("name,nf", builtin_pairs())
    def test_second_derivative(self, name, nf):
        s_grid = np.geomspace(1e-3, 1e3, 40)
        for s in s_grid:
            h = 1e-5 * s
            fd = central_difference(
                lambda v: nf.dh(X0, np.array([v]))[0], float(s), h)
            d2h = nf.d2h(X0, np.array([s]))[0]
            assert abs(fd - d2h) <= self.TOL * (1.0 + abs(d2h)), (name, s)

    def test_fused_forms_match_products(self):
        s = np.geomspace(1e-4, 1e4, 50)
        x = np.tile(X0, (s.size, 1))
        for name, nf in builtin_pairs():
            np.testing.assert_allclose(nf.dh_s(x, s), s * nf.dh(x, s),
                                       rtol=1e-13, err_msg=name)
            np.testing.assert_allclose(nf.d2h_s2(x, s), s * s * nf.d2h(x, s),
                                       rtol=1e-13, err_msg=name)


class TestIndexEstimation:
    def test_power_closed_form(self):
        rep = nh.estimate_indices(nh.NFunction.power(2.0))
        assert (rep.p_idx, rep.q_idx) == (2.0, 2.0)
        assert (rep.l_minus, rep.l_plus) == (1.0, 1.0)

    def test_double_phase_limits(self):
        nf = nh.NFunction.double_phase(1.5, 3.0, nh.constant_weight(1.0))
        rep = nh.estimate_indices(nf)
        assert rep.p_idx == pytest.approx(1.5, abs=1e-3)
        assert rep.q_idx == pytest.approx(3.0, abs=1e-3)
        assert rep.l_minus == pytest.approx(0.5, abs=1e-3)
        assert rep.l_plus == pytest.approx(2.0, abs=1e-3)

    def test_log_threshold_against_bisection_oracle(self):
        t0_oracle = log_threshold_oracle()
        assert abs(t0_oracle - np.e * np.log(np.e + t0_oracle)) <= 1e-12
        t0 = nh.solve_log_threshold()
        assert t0 == pytest.approx(t0_oracle, rel=1e-12)

    def test_log_kind_report(self):
        nf = nh.NFunction.log_double_phase(1.5, 3.0, nh.constant_weight(1.0))
        rep = nh.estimate_indices(nf)
        t0 = log_threshold_oracle()
        kappa = np.e / (np.e + t0)
        assert 0.0 < rep.kappa < 1.0
        assert rep.kappa == pytest.approx(kappa, rel=1e-12)
        assert rep.t0 == pytest.approx(t0, rel=1e-12)
        assert rep.p_idx == 1.5
        assert rep.l_minus == 0.5
        assert rep.q_idx <= 3.0 + rep.kappa + 1e-12

    def test_ordering_invariants_all_kinds(self):
        for name, nf in builtin_pairs():
            rep = nh.estimate_indices(nf)
            assert 1.0 < rep.p_idx <= rep.q_idx, name
            assert 0.0 < rep.l_minus <= rep.l_plus, name

    def test_nonfinite_ratio_reports_sample(self):
        def h(x, s):
            return np.where(s <= 2e3, s ** 2, np.inf)

        def dh(x, s):
            return np.where(s <= 2e3, 2.0 * s, np.inf)

        def d2h(x, s):
            return np.full_like(np.asarray(s, dtype=float), 2.0)

        nf = nh.NFunction.custom(h, dh, d2h, p_hint=2.0)
        with pytest.raises(FloatingPointError):
            nh.estimate_indices(nf)

    def test_custom_cubic_indices(self):
        nf = nh.NFunction.custom(
            lambda x, s: np.asarray(s, dtype=float) ** 3,
            lambda x, s: 3.0 * np.asarray(s, dtype=float) ** 2,
            lambda x, s: 6.0 * np.asarray(s, dtype=float),
            p_hint=3.0)
        rep = nh.estimate_indices(nf)
        assert rep.p_idx == pytest.approx(3.0, abs=1e-6)
        assert rep.q_idx == pytest.approx(3.0, abs=1e-6)
        assert rep.l_minus == pytest.approx(2.0, abs=1e-6)
        assert rep.l_plus == pytest.approx(2.0, abs=1e-6)

    def test_custom_wrong_derivative_rejected(self):
        with pytest.raises(ValueError):
            nh.NFunction.custom(
                lambda x, s: np.asarray(s, dtype=float) ** 3,
                lambda x, s: 2.0 * np.asarray(s, dtype=float) ** 2,
                lambda x, s: 6.0 * np.asarray(s, dtype=float),
                p_hint=3.0)


class TestEnvelopes:
    def test_point_values(self):
        assert nh.envelope_under(1.0, 2.0, 3.0) == 1.0
        assert nh.envelope_under(0.5, 2.0, 3.0) == 0.125
        assert nh.envelope_over(2.0, 2.0, 3.0) == 8.0

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            nh.envelope_under(1.0, 3.0, 2.0)
        with pytest.raises(ValueError):
            nh.envelope_over(-1.0, 2.0, 3.0)
        with pytest.raises(ValueError):
            nh.envelope_under(1.0, -1.0, 2.0)
        # zero lower exponent is allowed: constant-to-power families need it
        assert nh.envelope_under(4.0, 0.0, 1.0) == 1.0
        assert nh.envelope_over(4.0, 0.0, 1.0) == 4.0

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(t=st.floats(1e-8, 1e8), alpha=st.floats(0.1, 5.0),
           spread=st.floats(0.0, 5.0))
    def test_product_identity(self, t, alpha, spread):
        beta = alpha + spread
        under = float(nh.envelope_under(t, alpha, beta))
        over = float(nh.envelope_over(t, alpha, beta))
        target = t ** (alpha + beta)
        assert under * over == pytest.approx(target, rel=1e-12)


class TestGrowthSandwich:
    def test_pure_square_is_tight(self):
        s = np.geomspace(1e-3, 1e3, 200)
        rep = nh.check_growth_sandwich(lambda v: v ** 2, lambda v: 2.0 * v,
                                       1.0, 1.0, s)
        assert rep.ok
        assert rep.max_rel_violation <= 1e-13

    def test_double_phase_density_at_fixed_point(self):
        nf = nh.NFunction.double_phase(1.5, 3.0, nh.constant_weight(1.0))
        s = np.geomspace(1e-3, 1e3, 200)
        x_of = lambda v: np.tile(X0, (np.asarray(v).size, 1))
        rep = nh.check_growth_sandwich(
            lambda v: nf.h(x_of(v), v), lambda v: nf.dh(x_of(v), v),
            0.5, 2.0, s)
        assert rep.ok, rep
        assert rep.max_rel_violation <= 1e-10

    def test_kirchhoff_primitive_sandwich(self):
        # m(s) = 1+s has ratio indices [0, 1], so M is sandwiched by [1, 2]
        kir = nh.Kirchhoff.affine_power(1.0, 1.0, 1.0)
        s = np.geomspace(1e-3, 1e3, 200)
        rep = nh.check_growth_sandwich(kir.M, kir.m, 0.0, 1.0, s)
        assert rep.ok, rep


class TestIndexBounds:
    @pytest.mark.parametrize("name,nf", builtin_pairs())
    def test_builtin_bounds_hold(self, name, nf):
        rep = nh.estimate_indices(nf)
        chk = nh.check_index_bounds(nf, rep)
        assert chk.ok, (name, chk)


class TestWeights:
    def test_negative_constant_rejected(self):
        with pytest.raises(ValueError):
            nh.constant_weight(-0.5)

    def test_coordinate_weight_reads_axis(self):
        mu = nh.coordinate_weight(0)
        x = np.array([[0.25, 0.75], [0.5, 0.1]])
        np.testing.assert_allclose(mu(x), [0.25, 0.5])
