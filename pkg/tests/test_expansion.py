import numpy as np
import pytest
from hypothesis import given, strategies as st

from starlab import classify_expansion, integrate_alpha, linear_clock, linear_clock_inverse
from starlab.errors import CollapseReached, InvalidParams, WrongClassification
from starlab.expansion import (COLLAPSE, LINEAR, POSITIVE_DELTA, SELF_SIMILAR,
                               alpha_closed_form, fit_collapse_exponent,
                               integrate_to_collapse, linear_growth_bounds_ok,
                               self_similar_alpha_of_s, thermo_expansion_gate)


class TestClassification:
    def test_escape_speed_is_self_similar(self):
        p = classify_expansion(-0.5, 1.0, 1.0)
        assert p.classification == SELF_SIMILAR
        assert p.a1_star == pytest.approx(1.0)

    def test_zero_delta_is_linear(self):
        p = classify_expansion(0.0, 1.0, 1.0)
        assert p.classification == LINEAR

    def test_below_escape_collapses(self):
        assert classify_expansion(-0.5, 1.0, 0.5).classification == COLLAPSE

    def test_positive_delta(self):
        assert classify_expansion(1.0, 1.0, 0.0).classification == POSITIVE_DELTA

    def test_invalid_a0(self):
        with pytest.raises(InvalidParams):
            classify_expansion(0.0, -1.0, 1.0)

    @given(delta=st.floats(-3.0, 3.0), a0=st.floats(0.1, 5.0), a1=st.floats(-2.0, 4.0))
    def test_classification_total(self, delta, a0, a1):
        p = classify_expansion(delta, a0, a1)
        assert p.classification in (SELF_SIMILAR, LINEAR, COLLAPSE, POSITIVE_DELTA)
        if delta < 0:
            assert p.a1_star == pytest.approx(np.sqrt(2 * abs(delta) / a0))
        if np.isfinite(p.beta1):
            assert p.beta1 <= p.beta2


class TestIntegration:
    def test_self_similar_closed_form(self):
        p = classify_expansion(-0.5, 1.0, 1.0)
        path = integrate_alpha(p, 10.0)
        exact = alpha_closed_form(p, path.t_samples)
        assert np.max(np.abs(path.alpha - exact) / exact) < 1e-8
        assert path.alpha_at(1.0) == pytest.approx(2.5 ** (2.0 / 3.0), rel=1e-10)

    def test_linear_exact(self):
        p = classify_expansion(0.0, 2.0, 3.0)
        path = integrate_alpha(p, 5.0)
        assert path.alpha_at(4.0) == pytest.approx(14.0, abs=1e-10)

    def test_ode_residual_on_dense_output(self):
        p = classify_expansion(1.0, 1.0, 0.0)
        path = integrate_alpha(p, 5.0)
        # alpha''(0) = delta / a0^2 = 1; FD on the integrated alpha'
        h = 1e-5
        app = (path.alpha_prime_at(h) - path.alpha_prime_at(0.0)) / h
        assert app == pytest.approx(1.0, abs=1e-6)
        t = np.linspace(0.1, 4.9, 50)
        app = (path.alpha_prime_at(t + h) - path.alpha_prime_at(t - h)) / (2 * h)
        assert np.max(np.abs(app * path.alpha_at(t) ** 2 - 1.0)) < 1e-6

    def test_monotone_growth(self):
        for delta, a1 in ((1.0, 0.0), (0.0, 1.0)):
            path = integrate_alpha(classify_expansion(delta, 1.0, a1), 8.0)
            tail = path.alpha[path.t_samples > 1.0]
            assert np.all(np.diff(tail) > 0)

    def test_linear_growth_bounds(self):
        path = integrate_alpha(classify_expansion(-0.5, 1.0, 1.5), 8.0)
        assert linear_growth_bounds_ok(path)

    def test_collapse(self):
        p = classify_expansion(-0.5, 1.0, 0.5)
        path = integrate_to_collapse(p)
        assert path.T_collapse is not None and path.T_collapse > 0
        assert abs(fit_collapse_exponent(path) - 2.0 / 3.0) < 0.02

    def test_collapse_reached_carries_path(self):
        p = classify_expansion(-0.5, 1.0, 0.5)
        with pytest.raises(CollapseReached) as exc:
            integrate_alpha(p, 1e6)
        assert exc.value.path is not None
        assert exc.value.t_collapse == pytest.approx(exc.value.path.T_collapse)


class TestClocks:
    def test_self_similar_clock_closed_form(self):
        p = classify_expansion(-0.5, 1.0, 1.0)
        path = integrate_alpha(p, 10.0)
        assert path.s_at(0.0) == 0.0
        assert path.s_at(1.0) == pytest.approx((2.0 / 3.0) * np.log(2.5), abs=1e-9)
        b = np.sqrt(2 * 0.5)
        s = path.s_at(path.t_samples)
        closed = (np.log(path.alpha) - np.log(1.0)) / b
        assert np.max(np.abs(s - closed)) < 1e-9
        # round trip: alpha_bar(s(t)) = alpha(t)
        assert np.max(np.abs(self_similar_alpha_of_s(p, s) - path.alpha)
                      / path.alpha) < 1e-10

    def test_self_similar_clock_requires_branch(self, iso0):
        from starlab import self_similar_clock
        path = integrate_alpha(classify_expansion(0.0, 1.0, 1.0), 1.0)
        with pytest.raises(WrongClassification):
            self_similar_clock(path)

    def test_linear_clock(self):
        assert linear_clock(1.0, 2.0, 0.0) == 0.0
        assert linear_clock(1.0, 2.0, 1.0) == pytest.approx(np.log(3.0) / 2.0, rel=1e-12)
        t = np.linspace(0.0, 7.0, 40)
        assert np.max(np.abs(linear_clock_inverse(1.0, 2.0, linear_clock(1.0, 2.0, t))
                             - t)) < 1e-12 * 7
        # a1 = 0 limit
        assert linear_clock(2.0, 0.0, 3.0) == pytest.approx(1.5)

    def test_numerical_tau_matches_closed_form(self):
        path = integrate_alpha(classify_expansion(0.0, 1.0, 2.0), 3.0)
        assert np.max(np.abs(path.tau_samples
                             - linear_clock(1.0, 2.0, path.t_samples))) < 1e-10


class TestGate:
    def test_gate(self):
        assert thermo_expansion_gate(1.0, 3.0)
        assert not thermo_expansion_gate(1.0, 2.9)
        assert thermo_expansion_gate(0.5, 1.5)

    def test_gate_invalid(self):
        with pytest.raises(InvalidParams):
            thermo_expansion_gate(-1.0, 3.0)
