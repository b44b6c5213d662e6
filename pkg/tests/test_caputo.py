import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracrd.caputo import l1_weights, solve_linear_fode, solve_logistic_fode
from fracrd.errors import ConvergenceError, DomainError
from fracrd.special import MLParams, ml_eval


class TestWeights:
    def test_b0_is_one_for_all_alpha(self):
        for alpha in (0.1, 0.5, 0.9, 1.0):
            assert l1_weights(alpha, 0.1, 4).b[0] == 1.0

    def test_alpha_one_degenerates_to_backward_euler(self):
        b = l1_weights(1.0, 0.1, 4).b
        assert np.array_equal(b, [1.0, 0.0, 0.0, 0.0])

    def test_b1_half_alpha(self):
        b = l1_weights(0.5, 0.1, 4).b
        assert b[1] == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-15)

    def test_scale(self):
        w = l1_weights(0.5, 0.25, 3)
        assert w.scale == pytest.approx(0.25**-0.5 / math.gamma(1.5), rel=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(alpha=st.floats(0.05, 1.0), n=st.integers(1, 200))
    def test_telescoping(self, alpha, n):
        b = l1_weights(alpha, 0.1, n).b
        assert b.sum() == pytest.approx(n ** (1.0 - alpha), rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(alpha=st.floats(0.05, 0.999), n=st.integers(2, 200))
    def test_strictly_decreasing_positive(self, alpha, n):
        b = l1_weights(alpha, 0.1, n).b
        assert np.all(b > 0)
        assert np.all(np.diff(b) < 0)

    def test_validation(self):
        with pytest.raises(DomainError):
            l1_weights(0.0, 0.1, 4)
        with pytest.raises(DomainError):
            l1_weights(1.2, 0.1, 4)
        with pytest.raises(DomainError):
            l1_weights(0.5, -0.1, 4)
        with pytest.raises(DomainError):
            l1_weights(0.5, 0.1, 0)


class TestLinearFode:
    def test_zero_rate_preserves_initial_value(self):
        trace = solve_linear_fode(0.5, 0.0, 3.0, 0.1, 1.0)
        assert np.all(trace.values == 3.0)
        assert trace.times[0] == 0.0
        assert np.all(np.diff(trace.times) > 0)

    def test_alpha_one_matches_exp(self):
        trace = solve_linear_fode(1.0, 1.0, 1.0, 2.0**-10, 1.0)
        assert trace.values[-1] == pytest.approx(math.exp(-1.0), abs=3e-4)

    def test_half_alpha_matches_mittag_leffler(self):
        exact = ml_eval(MLParams(alpha=0.5, z=-1.0))
        trace = solve_linear_fode(0.5, 1.0, 1.0, 2.0**-10, 1.0)
        assert trace.values[-1] == pytest.approx(exact, abs=5e-4)

    def test_error_decreases_under_halving(self):
        exact = ml_eval(MLParams(alpha=0.5, z=-1.0))
        errs = [
            abs(solve_linear_fode(0.5, 1.0, 1.0, 2.0**-k, 1.0).values[-1] - exact)
            for k in (6, 8, 10)
        ]
        assert errs[0] > errs[1] > errs[2]

    def test_trace_covers_interval_for_nondividing_dt(self):
        trace = solve_linear_fode(0.5, 1.0, 1.0, 0.3, 1.0)
        assert trace.times[0] == 0.0
        assert trace.times[-1] == 1.0

    def test_validation(self):
        with pytest.raises(DomainError):
            solve_linear_fode(0.5, -1.0, 1.0, 0.1, 1.0)
        with pytest.raises(DomainError):
            solve_linear_fode(0.5, 1.0, 1.0, 2.0, 1.0)


class TestLogisticFode:
    def test_zero_is_fixed_point(self):
        trace, blow = solve_logistic_fode(0.5, 0.0, 0.01, 1.0)
        assert np.all(trace.values == 0.0)
        assert blow is None

    @pytest.mark.parametrize("y0", [1.0, 2.0])
    def test_alpha_one_blow_time_under_refinement(self, y0):
        exact = math.log(1.0 + 1.0 / y0)
        estimates = []
        dt = exact / 100.0
        for _ in range(8):
            _, blow = solve_logistic_fode(1.0, y0, dt, 10.0 * exact)
            assert blow is not None
            estimates.append(blow)
            if len(estimates) >= 2 and abs(estimates[-1] - estimates[-2]) < 2.5e-3 * blow:
                break
            dt *= 0.5
        assert estimates[-1] == pytest.approx(exact, rel=0.01)

    def test_trace_strictly_increasing(self):
        trace, blow = solve_logistic_fode(0.7, 0.5, 0.01, 2.0)
        assert blow is not None
        assert np.all(np.diff(trace.values) > 0)

    def test_no_blowup_when_horizon_short(self):
        trace, blow = solve_logistic_fode(0.5, 0.01, 0.001, 0.05)
        assert blow is None
        assert trace.times[-1] == pytest.approx(0.05, rel=1e-9)

    def test_dt_floor_collapse_reported(self):
        with pytest.raises(ConvergenceError):
            solve_logistic_fode(1.0, 50.0, 0.5, 1.0, dt_floor=0.4)

    def test_validation(self):
        with pytest.raises(DomainError):
            solve_logistic_fode(0.5, -1.0, 0.01, 1.0)
        with pytest.raises(DomainError):
            solve_logistic_fode(0.5, 1.0, 0.01, 1.0, blow_threshold=0.5)
