import numpy as np
import pytest

from asbox.errors import LineSearchError
from asbox.geometry import Box, direction, project
from asbox.line_search import (LineSearchParams, backtrack, eps_series_bound,
                               power_eps_schedule)


def quadratic_1d(t):
    # f(x) = x^2/2 along x = 1 + t*(-1)
    x = 1.0 - t
    return 0.5 * x * x


class TestBacktrack:
    def test_relaxation_absorbs_everything(self):
        # eps so large the first trial always passes
        params = LineSearchParams(beta=0.5, c1=0.1, eps_k=100.0)
        res = backtrack(lambda t: 50.0, f0=0.0, slope=-1.0, params=params)
        assert res.t == 1.0 and res.j == 0 and res.evals == 1

    def test_hand_evaluated_quadratic(self):
        # f(x)=x^2/2 at x=1, p=-1: f(0)=0 <= 0.5 - 1e-4 so t=1 accepted
        params = LineSearchParams(beta=0.1, c1=1e-4, eps_k=0.0)
        res = backtrack(quadratic_1d, f0=0.5, slope=-1.0, params=params)
        assert res.t == 1.0 and res.j == 0

    def test_backtracks_when_first_trial_fails(self):
        # steep quadratic: f(x)=5x^2, x=1, p=-f'(x)=-10
        def val(t):
            x = 1.0 - 10.0 * t
            return 5.0 * x * x

        params = LineSearchParams(beta=0.5, c1=0.1, eps_k=0.0)
        res = backtrack(val, f0=5.0, slope=-100.0, params=params)
        assert 0 < res.t < 1.0
        assert res.evals == res.j + 1

    def test_minimality_of_j(self):
        # the step one level above the accepted one must fail the test
        rng = np.random.default_rng(4)
        params = LineSearchParams(beta=0.5, c1=1e-2, eps_k=0.0)
        for _ in range(200):
            curvature = rng.uniform(0.5, 50.0)
            x0 = rng.uniform(0.5, 2.0)

            def val(t, a=curvature, x=x0):
                z = x - t * a * x
                return 0.5 * a * z * z

            f0 = 0.5 * curvature * x0 * x0
            slope = -(curvature * x0) ** 2
            res = backtrack(val, f0, slope, params)
            if res.j > 0:
                t_prev = params.beta ** (res.j - 1)
                assert val(t_prev) > f0 + params.c1 * t_prev * slope

    def test_budget_exhaustion_raises_with_last_t(self):
        params = LineSearchParams(beta=0.5, c1=0.5, eps_k=0.0, max_backtracks=5)
        with pytest.raises(LineSearchError) as err:
            backtrack(lambda t: 10.0, f0=0.0, slope=-1.0, params=params)
        assert err.value.last_t == pytest.approx(0.5 ** 5)

    def test_step_lower_bound_on_random_quadratics(self):
        # t >= min(1, 2*beta*(1-c1)/L) on strongly convex quadratics
        rng = np.random.default_rng(12)
        violations = 0
        for _ in range(1000):
            n = rng.integers(1, 6)
            eigs = rng.uniform(0.2, 30.0, n)
            lipschitz = eigs.max()
            q, _ = np.linalg.qr(rng.normal(size=(n, n)))
            a_mat = q @ np.diag(eigs) @ q.T
            box = Box.cube(n, radius=rng.uniform(0.5, 3.0))
            x = project(rng.normal(0, 1, n), box)
            center = rng.normal(0, 1, n)
            grad = a_mat @ (x - center)
            p = direction(x, grad, box)
            if not p.any():
                continue
            beta = rng.uniform(0.05, 0.9)
            c1 = rng.uniform(1e-4, 0.5)

            def val(t):
                z = project(x + t * p, box)
                return 0.5 * (z - center) @ a_mat @ (z - center)

            res = backtrack(val, val(0.0), float(grad @ p),
                            LineSearchParams(beta=beta, c1=c1, eps_k=0.0))
            t_min = min(1.0, 2.0 * beta * (1.0 - c1) / lipschitz)
            if res.t < t_min * (1.0 - 1e-12):
                violations += 1
        assert violations == 0


class TestEpsSchedule:
    def test_power_schedule_values(self):
        eps = power_eps_schedule(1.1)
        assert eps(0) == 1.0
        assert eps(9) == pytest.approx(10.0 ** -1.1)

    def test_nonsummable_exponent_rejected(self):
        with pytest.raises(ValueError):
            power_eps_schedule(1.0)

    def test_series_bound_upper_bounds_partial_sums(self):
        bound = eps_series_bound(1.1, terms=1000)
        eps = power_eps_schedule(1.1)
        partial = sum(eps(k) for k in range(100_000))
        assert partial < bound

    def test_params_validation(self):
        with pytest.raises(ValueError):
            LineSearchParams(beta=1.0, c1=0.1)
        with pytest.raises(ValueError):
            LineSearchParams(beta=0.5, c1=0.0)
        with pytest.raises(ValueError):
            LineSearchParams(beta=0.5, c1=0.1, eps_k=-1.0)
