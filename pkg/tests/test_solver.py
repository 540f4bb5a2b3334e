import math

import numpy as np
import pytest

from asbox.errors import InfeasiblePointError, InvalidWeightsError, NoViolatorError
from asbox.geometry import Box, direction, project, stationarity, ternary_indicator
from asbox.problems import QuadraticSumProblem, QuadraticSuiteSpec, quadratic_suite
from asbox.sampling import CategoricalSampler, RngStreams, WeightVector
from asbox.solver import (SolverConfig, complexity_bound, decrease_constant,
                          init_state, run, step, violator_probability_check)


def one_dim_problem(centers, box=None, weights=None, curvatures=None):
    centers = np.asarray(centers, float).reshape(-1, 1)
    count = centers.shape[0]
    if curvatures is None:
        curvatures = np.ones(count)
    mats = np.array([[[a]] for a in curvatures])
    return QuadraticSumProblem(mats, centers, box or Box(np.zeros(1), np.ones(1)),
                               weights=weights)


def homogeneous_suite(n=4, count=5, seed=0):
    return quadratic_suite(QuadraticSuiteSpec(
        n=n, n_components=count, condition=10.0, heterogeneity=0.0, seed=seed))


class TestStep:
    def test_full_sample_phase_always_accepts(self):
        prob = homogeneous_suite()
        cfg = SolverConfig(n0=prob.n_components, max_iters=10, seed=0)
        state = init_state(prob, cfg, np.zeros(prob.n))
        for _ in range(5):
            prev_n = state.n_k
            state, trace = step(state, prob, cfg)
            assert trace.accepted and not trace.increased
            assert trace.r_residual is None
            assert state.n_k == prev_n

    def test_homogeneous_problem_never_grows(self):
        prob = homogeneous_suite()
        t_min = min(1.0, 2 * 0.1 * (1 - 1e-4) / prob.lipschitz())
        cfg = SolverConfig(n0=2, c1=1e-4, c=0.5 * 1e-4 * t_min, C=1.0,
                           max_iters=100, seed=1, metric_every=0)
        state = init_state(prob, cfg, np.zeros(prob.n))
        for _ in range(100):
            state, trace = step(state, prob, cfg)
            assert not trace.increased
        assert state.n_k == 2

    def test_planted_violator_grows_when_additional_sample_hits_it(self):
        # component 1's far-off center flips its indicator at x0: whenever the
        # additional draw differs from the mini-batch component, r > 0
        prob = one_dim_problem([0.4, 3.0])
        x0 = np.array([0.5])
        ind1 = ternary_indicator(x0, prob.component_grad(0, x0), prob.box)
        ind2 = ternary_indicator(x0, prob.component_grad(1, x0), prob.box)
        assert ind1.states.tolist() == [2] and ind2.states.tolist() == [3]
        cfg = SolverConfig(n0=1, max_iters=1, seed=0)
        increases = 0
        for seed in range(300):
            state = init_state(prob, dataclass_replace(cfg, seed=seed), x0)
            state, trace = step(state, prob, cfg)
            if trace.increased:
                increases += 1
                assert trace.r_residual > 0 or not trace.accepted
                assert state.n_k == 2
        # increase happens exactly when the two singleton draws differ,
        # which has probability 1/2 under uniform weights
        p = 0.5
        sigma = math.sqrt(p * (1 - p) / 300)
        assert abs(increases / 300 - p) < 4 * sigma

    def test_acceptance_decoupled_from_indicator_residual(self):
        # k=0 relaxation is large, so the decrease test passes for the
        # violator too: candidate accepted while the sample still grows
        prob = one_dim_problem([0.4, 3.0])
        cfg = SolverConfig(n0=1, max_iters=1, seed=0)
        seen = False
        for seed in range(100):
            state = init_state(prob, dataclass_replace(cfg, seed=seed),
                               np.array([0.5]))
            state, trace = step(state, prob, cfg)
            if trace.increased and trace.accepted and trace.r_residual > 0:
                seen = True
                break
        assert seen

    def test_rejected_step_keeps_iterate_bit_exact(self):
        # with a negligible relaxation the far component rejects the move
        prob = one_dim_problem([0.4, 3.0])
        cfg = SolverConfig(n0=1, max_iters=1, seed=0,
                           eps_schedule=lambda k: 1e-14)
        x0 = np.array([0.5])
        rejections = 0
        for seed in range(100):
            state = init_state(prob, dataclass_replace(cfg, seed=seed), x0)
            state, trace = step(state, prob, cfg)
            if not trace.accepted:
                rejections += 1
                assert np.array_equal(state.x, x0)
                assert trace.increased
        assert rejections > 0

    def test_sample_size_monotone_and_growth_matches_flag(self):
        prob = quadratic_suite(QuadraticSuiteSpec(
            n=3, n_components=12, heterogeneity=2.0, seed=5))
        cfg = SolverConfig(n0=1, max_iters=60, seed=2, metric_every=0)
        state = init_state(prob, cfg, np.zeros(3))
        for _ in range(60):
            prev = state.n_k
            state, trace = step(state, prob, cfg)
            assert state.n_k >= prev
            if trace.increased:
                assert state.n_k > prev or prev == prob.n_components
            else:
                assert state.n_k == prev

    def test_growth_policies(self):
        prob = quadratic_suite(QuadraticSuiteSpec(
            n=2, n_components=50, heterogeneity=5.0, seed=3))
        for growth, check in [
            ("increment", lambda a, b: b == a + 1),
            ("geometric", lambda a, b: b == min(50, max(a + 1, math.ceil(a * 1.5)))),
            ("full", lambda a, b: b == 50),
        ]:
            cfg = SolverConfig(n0=1, growth=growth, growth_factor=1.5,
                               max_iters=30, seed=0,
                               eps_schedule=lambda k: 1e-14, metric_every=0)
            state = init_state(prob, cfg, np.zeros(2))
            saw_growth = False
            for _ in range(30):
                prev = state.n_k
                state, trace = step(state, prob, cfg)
                if trace.increased and prev < 50:
                    saw_growth = True
                    assert check(prev, state.n_k)
                if state.n_k == 50:
                    break
            assert saw_growth

    def test_feasibility_bit_exact_along_run(self):
        prob = quadratic_suite(QuadraticSuiteSpec(
            n=4, n_components=6, heterogeneity=0.5, seed=7,
            box=Box.cube(4, radius=0.3)))
        cfg = SolverConfig(n0=2, max_iters=80, seed=4, metric_every=0)
        iterates = []
        run(prob, cfg, np.zeros(4),
            callback=lambda st, tr: iterates.append(st.x.copy()) and False)
        assert len(iterates) == 80
        for x in iterates:
            assert np.array_equal(project(x, prob.box), x)


def dataclass_replace(cfg, **kw):
    import dataclasses
    return dataclasses.replace(cfg, **kw)


class TestRun:
    def test_zero_budget_returns_start(self):
        prob = homogeneous_suite()
        cfg = SolverConfig(n0=1, max_iters=0)
        x0 = np.full(prob.n, 0.01)
        state, traces = run(prob, cfg, x0)
        assert traces == []
        assert np.array_equal(state.x, x0)

    def test_infeasible_start_rejected(self):
        prob = homogeneous_suite()
        cfg = SolverConfig(n0=1, max_iters=1)
        with pytest.raises(InfeasiblePointError):
            run(prob, cfg, np.full(prob.n, 5.0))

    def test_full_sample_phase_absorbing(self):
        prob = quadratic_suite(QuadraticSuiteSpec(
            n=2, n_components=6, heterogeneity=2.0, seed=1))
        cfg = SolverConfig(n0=1, growth="full", max_iters=40, seed=3,
                           eps_schedule=lambda k: 1e-14, metric_every=0)
        _, traces = run(prob, cfg, np.zeros(2))
        ks = [t.k for t in traces if t.n_k == prob.n_components]
        if ks:
            first = min(ks)
            for t in traces:
                if t.k >= first:
                    assert t.n_k == prob.n_components

    def test_same_seed_bit_identical(self):
        prob = quadratic_suite(QuadraticSuiteSpec(
            n=3, n_components=8, heterogeneity=0.4, seed=2))
        cfg = SolverConfig(n0=2, max_iters=50, seed=11, metric_every=10)
        s1, t1 = run(prob, cfg, np.zeros(3))
        s2, t2 = run(prob, cfg, np.zeros(3))
        assert np.array_equal(s1.x, s2.x)
        assert [t.__dict__ for t in t1] == [t.__dict__ for t in t2]

    def test_fev_budget_stops_run(self):
        prob = homogeneous_suite()
        cfg = SolverConfig(n0=2, max_iters=10**6, fev_budget=500, seed=0,
                           metric_every=0)
        state, traces = run(prob, cfg, np.zeros(prob.n))
        assert state.fev >= 500
        assert traces[-2].fev < 500

    def test_metric_cadence(self):
        prob = homogeneous_suite()
        cfg = SolverConfig(n0=2, max_iters=25, seed=0, metric_every=10)
        _, traces = run(prob, cfg, np.zeros(prob.n))
        for t in traces:
            if t.k % 10 == 0:
                assert t.f_full is not None and t.stationarity is not None
            else:
                assert t.f_full is None

    def test_stationarity_stop(self):
        prob = homogeneous_suite()
        cfg = SolverConfig(n0=prob.n_components, max_iters=5000, seed=0,
                           stationarity_tol=1e-3, metric_every=0,
                           eps_schedule=lambda k: 1e-4 * 0.5 ** k)
        state, traces = run(prob, cfg, np.zeros(prob.n))
        assert traces[-1].stationarity < 1e-3
        assert len(traces) < 5000

    def test_fs_phase_descent_inequality(self):
        # forced full-sample run: every step must decrease f up to the
        # guaranteed slope term and the iteration's relaxation
        prob = quadratic_suite(QuadraticSuiteSpec(
            n=5, n_components=6, heterogeneity=0.3, seed=9,
            box=Box.cube(5, radius=0.5)))
        lipschitz = prob.lipschitz()
        cfg = SolverConfig(n0=prob.n_components, c1=1e-4, beta=0.1,
                           max_iters=300, seed=1, metric_every=0)
        xs = [np.zeros(5)]
        run(prob, cfg, xs[0],
            callback=lambda st, tr: xs.append(st.x.copy()) and False)
        t_min = min(1.0, 2 * cfg.beta * (1 - cfg.c1) / lipschitz)
        eps = cfg.eps_schedule
        violations = 0
        for k in range(len(xs) - 1):
            f_k = prob.full_value(xs[k])
            f_next = prob.full_value(xs[k + 1])
            d_norm = stationarity(xs[k], prob.full_grad(xs[k]), prob.box)
            bound = f_k - cfg.c1 * t_min * d_norm ** 2 + eps(k)
            if f_next > bound + 1e-12 * max(1.0, abs(f_k)):
                violations += 1
        assert violations == 0


class TestNonnegativityEquivalence:
    """The general box solver restricted to bounds (0, +inf) must replay the
    binary-indicator variant bit for bit; the reference below codes that
    variant directly from its case splits."""

    @staticmethod
    def reference_run(problem, cfg, x0, iters):
        streams = RngStreams(cfg.seed)
        sampler = CategoricalSampler(problem.weights)
        x = x0.copy()
        n_k = cfg.n0
        total = problem.n_components
        history = []
        for k in range(iters):
            eps_k = cfg.eps_schedule(k)
            if n_k < total:
                rows = sampler.draw(n_k, streams.batch)
                scale = np.full(n_k, 1.0 / n_k)
            else:
                rows = np.arange(total)
                scale = problem.weights.w
            fhat, g = problem.batch_value_grad(rows, scale, x)
            p = np.maximum(x - g, 0.0) - x
            slope = float(np.dot(g, p))
            t = 1.0
            while True:
                trial = np.maximum(x + t * p, 0.0)
                if problem.batch_value(rows, scale, trial) \
                        <= fhat + cfg.c1 * t * slope + eps_k:
                    break
                t *= cfg.beta
            x_bar = np.maximum(x + t * p, 0.0)
            if n_k >= total:
                x = x_bar
                history.append((x.copy(), n_k))
                continue
            d_rows = sampler.draw(cfg.d_size, streams.additional)
            d_scale = np.full(cfg.d_size, 1.0 / cfg.d_size)
            fd_x, gd = problem.batch_value_grad(d_rows, d_scale, x)
            s = np.maximum(x - gd, 0.0) - x
            binary_n = (x < g).astype(np.int8)
            binary_d = (x < gd).astype(np.int8)
            r = float(np.linalg.norm(binary_n.astype(float)
                                     - binary_d.astype(float)))
            fd_bar = problem.batch_value(d_rows, d_scale, x_bar)
            decrease = fd_bar <= fd_x - cfg.c * float(np.dot(s, s)) \
                + cfg.C * eps_k
            if r == 0.0 and decrease:
                n_next = n_k
            else:
                n_next = min(total, max(n_k + 1, math.ceil(n_k * cfg.growth_factor)))
            if decrease:
                x = x_bar
            history.append((x.copy(), n_next))
            n_k = n_next
        return history

    def test_box_solver_replays_nonneg_variant(self):
        rng = np.random.default_rng(0)
        for trial in range(5):
            count = int(rng.integers(4, 9))
            n = int(rng.integers(2, 5))
            mats = np.stack([np.eye(n) * rng.uniform(0.5, 3.0)
                             for _ in range(count)])
            centers = rng.normal(0.5, 1.0, (count, n))
            prob = QuadraticSumProblem(mats, centers, Box.nonnegative(n))
            cfg = SolverConfig(n0=2, max_iters=30, seed=trial, metric_every=0)
            x0 = np.abs(rng.normal(0.2, 0.3, n))
            expected = self.reference_run(prob, cfg, x0, 30)
            state = init_state(prob, cfg, x0)
            for k in range(30):
                state, trace = step(state, prob, cfg)
                x_ref, n_ref = expected[k]
                assert np.array_equal(state.x, x_ref), f"iterate {k} differs"
                assert state.n_k == n_ref, f"sample size {k} differs"


class TestComplexityBound:
    def test_two_components_uniform(self):
        w = WeightVector.uniform(2)
        # q = 1/2 so the sampling term is exactly 2; zero gap kills the rest
        assert complexity_bound(2, w, c_b=1.0, f_low=1.0, C=1.0, eps_bar=0.0,
                                c_bar=0.1, nu=0.5) == 2

    def test_zero_gap_leaves_sampling_term(self):
        w = WeightVector(np.array([0.25, 0.25, 0.5]))
        q = 0.25 ** 2
        expected = math.ceil(2 / q)
        assert complexity_bound(3, w, c_b=2.0, f_low=2.0, C=5.0, eps_bar=0.0,
                                c_bar=1e-3, nu=0.1) == expected

    def test_hand_arithmetic_full_formula(self):
        w = WeightVector(np.array([0.2, 0.3, 0.5]))
        q = 0.2 ** 2
        first = math.ceil(2 / q)                      # 50
        second = math.ceil((1.0 + 1.0 * 0.5) / (0.01 * 0.1 ** 2))  # 15000
        got = complexity_bound(3, w, c_b=1.0, f_low=0.0, C=1.0, eps_bar=0.5,
                               c_bar=0.01, nu=0.1)
        assert got == first + second == 15050

    def test_zero_weight_rejected(self):
        w = WeightVector(np.array([0.0, 1.0]))
        with pytest.raises(InvalidWeightsError):
            complexity_bound(2, w, 1.0, 0.0, 1.0, 0.0, 0.1, 0.1)

    def test_large_component_count_no_underflow(self):
        # q = (1/400)^399 underflows double precision; the exact-arithmetic
        # bound must still come out finite and enormous
        w = WeightVector.uniform(400)
        bound = complexity_bound(400, w, 1.0, 0.0, 1.0, 0.1, 1e-4, 1e-2)
        assert bound > 10 ** 100

    def test_decrease_constant_three_way_min(self):
        got = decrease_constant(c=1e-4, c1=1e-4, beta=0.1, lipschitz=1.0)
        assert got == pytest.approx(2e-5 * (1 - 1e-4), rel=1e-15)
        assert decrease_constant(c=1e-9, c1=0.5, beta=0.5, lipschitz=1.0) == 1e-9


class TestViolatorProbability:
    @staticmethod
    def _context_from_component(prob, x0, comp):
        # mini-batch context as if the batch had drawn `comp`
        grad = prob.component_grad(comp, x0)
        ind = ternary_indicator(x0, grad, prob.box)
        p = direction(x0, grad, prob.box)
        return ind, project(x0 + 0.5 * p, prob.box)

    def test_single_violator_frequency_matches_weight(self):
        # two benign components share the mini-batch indicator structure, the
        # third (weight 0.3) has a flipped one
        w = WeightVector(np.array([0.35, 0.35, 0.3]))
        prob = one_dim_problem([0.45, 0.45, 3.0], weights=w)
        x0 = np.array([0.5])
        ind, x_bar = self._context_from_component(prob, x0, 0)
        freq = violator_probability_check(
            prob, x0, x_bar, ind, eps_k=0.0, c=1e-4, C=1.0, trials=100_000,
            stream=np.random.default_rng(0))
        sigma = math.sqrt(0.3 * 0.7 / 100_000)
        assert freq >= 0.3 - 4 * sigma
        assert abs(freq - 0.3) < 4 * sigma

    def test_all_components_violate(self):
        prob = one_dim_problem([3.0, 4.0, 5.0])
        x0 = np.array([0.5])
        # reference indicator built from a gradient with the opposite structure
        ind = ternary_indicator(x0, np.array([5.0]), prob.box)
        freq = violator_probability_check(
            prob, x0, x0.copy(), ind, eps_k=0.0, c=1e-4, C=1.0, trials=10_000,
            stream=np.random.default_rng(1))
        assert freq == 1.0

    def test_one_hot_violator(self):
        w = WeightVector(np.array([0.0, 1.0]))
        prob = one_dim_problem([0.45, 3.0], weights=w)
        x0 = np.array([0.5])
        ind = ternary_indicator(x0, prob.component_grad(0, x0), prob.box)
        freq = violator_probability_check(
            prob, x0, x0.copy(), ind, eps_k=0.0, c=1e-4, C=1.0, trials=5_000,
            stream=np.random.default_rng(2))
        assert freq == 1.0

    def test_no_violator_raises(self):
        prob = homogeneous_suite()
        x0 = np.zeros(prob.n)
        grad = prob.full_grad(x0)
        ind = ternary_indicator(x0, grad, prob.box)
        with pytest.raises(NoViolatorError):
            violator_probability_check(
                prob, x0, x0.copy(), ind, eps_k=10.0, c=1e-9, C=1.0,
                trials=100, stream=np.random.default_rng(3))
