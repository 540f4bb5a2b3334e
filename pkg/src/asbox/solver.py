"""Adaptive-sample-size projected-gradient solver with additional sampling.

One ``step`` draws a mini-batch, takes a nonmonotone-Armijo projected-gradient
trial step, then draws a small independent sample that (a) decides by the
keep-sample condition whether the mini-batch size must grow and (b) accepts or
rejects the candidate by the decrease part of that condition alone. Once the
sample size reaches the full count the method becomes deterministic projected
gradient (the full-sample phase is absorbing). With bounds (0, +inf) this is
exactly the nonnegativity-constrained variant.

Evaluation cost is charged to ``state.fev`` in scalar-product units using the
problem's per-component cost constants; diagnostic metrics (full objective,
stationarity, distance to a reference) are computed out-of-band at a
configurable cadence and cost nothing.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import InfeasiblePointError, InvalidWeightsError, NoViolatorError
from .geometry import direction, project, residual, stationarity, ternary_indicator
from .line_search import LineSearchParams, backtrack, power_eps_schedule
from .sampling import (CategoricalSampler, RngStreams, SamplePlan,
                       minibatch_value, minibatch_value_grad)

__all__ = [
    "SolverConfig",
    "SolverState",
    "IterationTrace",
    "init_state",
    "step",
    "run",
    "complexity_bound",
    "violator_probability_check",
]

GROWTH_POLICIES = ("increment", "geometric", "full")


@dataclass(frozen=True)
class SolverConfig:
    """All algorithm inputs. Defaults are the reference experiment settings
    (beta=0.1, c1=c=1e-4, C=1, D=1, eps_k=(k+1)^-1.1)."""

    n0: int = 3
    beta: float = 0.1
    c1: float = 1e-4
    c: float = 1e-4
    C: float = 1.0
    d_size: int = 1
    growth: str = "geometric"
    growth_factor: float = 1.1
    eps_schedule: Callable[[int], float] = field(default=power_eps_schedule(1.1))
    max_iters: int = 1000
    fev_budget: float = math.inf
    seed: int = 0
    metric_every: int = 10
    stationarity_tol: Optional[float] = None  # diagnostic stop, for tests
    max_backtracks: int = 60

    def __post_init__(self):
        for name in ("beta", "c1", "c"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0,1), got {v}")
        if self.C <= 0.0:
            raise ValueError(f"C must be positive, got {self.C}")
        if self.n0 < 1:
            raise ValueError(f"n0 must be >= 1, got {self.n0}")
        if self.d_size < 1:
            raise ValueError(f"d_size must be >= 1, got {self.d_size}")
        if self.growth not in GROWTH_POLICIES:
            raise ValueError(f"growth must be one of {GROWTH_POLICIES}")
        if self.growth == "geometric" and self.growth_factor <= 1.0:
            raise ValueError("geometric growth needs factor > 1")


@dataclass
class SolverState:
    x: np.ndarray
    k: int
    n_k: int
    n_total: int
    fev: int
    streams: RngStreams
    sampler: CategoricalSampler

    @property
    def phase(self):
        return "FS" if self.n_k >= self.n_total else "MB"


@dataclass
class IterationTrace:
    """One row per iteration; metric fields describe the post-step iterate
    x_{k+1} paired with the cumulative cost that produced it, and stay None
    off the metric cadence."""

    k: int
    n_k: int
    t_k: float
    j: int
    fhat: Optional[float]
    accepted: bool
    increased: bool
    r_residual: Optional[float]
    fev: int
    f_full: Optional[float] = None
    stationarity: Optional[float] = None
    dist_to_ref: Optional[float] = None


def init_state(problem, config, x0):
    x0 = np.asarray(x0, dtype=float)
    if not np.array_equal(project(x0, problem.box), x0):
        raise InfeasiblePointError("x0 is not in the box (pre-project it)")
    if config.n0 > problem.n_components:
        raise ValueError(f"n0={config.n0} exceeds component count "
                         f"{problem.n_components}")
    return SolverState(
        x=x0.copy(), k=0, n_k=config.n0, n_total=problem.n_components, fev=0,
        streams=RngStreams(config.seed), sampler=CategoricalSampler(problem.weights))


def _grown_size(n_k, n_total, config):
    if config.growth == "increment":
        nxt = n_k + 1
    elif config.growth == "geometric":
        nxt = max(n_k + 1, math.ceil(n_k * config.growth_factor))
    else:
        nxt = n_total
    return min(n_total, nxt)


def step(state, problem, config):
    """Execute one full iteration and return (next state, trace row)."""
    box = problem.box
    eps_k = config.eps_schedule(state.k)
    fev = state.fev
    in_full = state.n_k >= state.n_total

    if in_full:
        plan = SamplePlan.full_sample(state.n_total)
    else:
        plan = SamplePlan(state.sampler.draw(state.n_k, state.streams.batch))
    fhat, grad = minibatch_value_grad(problem, plan, state.x)
    fev += plan.size * problem.value_grad_cost

    p = direction(state.x, grad, box)
    slope = float(np.dot(grad, p))

    def value_at(t):
        return minibatch_value(problem, plan, project(state.x + t * p, box))

    ls = backtrack(value_at, fhat, slope,
                   LineSearchParams(config.beta, config.c1, eps_k,
                                    config.max_backtracks))
    fev += ls.evals * plan.size * problem.value_cost
    # reprojection only strips last-ulp rounding: x + t*p is a convex
    # combination of two feasible points
    x_bar = project(state.x + ls.t * p, box)

    if in_full:
        accepted = True
        increased = False
        r = None
        x_next = x_bar
        n_next = state.n_k
    else:
        d_plan = SamplePlan(
            state.sampler.draw(config.d_size, state.streams.additional))
        fd_x, grad_d = minibatch_value_grad(problem, d_plan, state.x)
        fev += d_plan.size * problem.value_grad_cost
        s_k = direction(state.x, grad_d, box)
        r = residual(ternary_indicator(state.x, grad, box),
                     ternary_indicator(state.x, grad_d, box))
        fd_bar = minibatch_value(problem, d_plan, x_bar)
        fev += d_plan.size * problem.value_cost

        decrease_ok = (fd_bar
                       <= fd_x - config.c * float(np.dot(s_k, s_k))
                       + config.C * eps_k)
        keep_sample = (r == 0.0) and decrease_ok
        n_next = state.n_k if keep_sample else _grown_size(
            state.n_k, state.n_total, config)
        increased = not keep_sample
        accepted = decrease_ok  # acceptance ignores the indicator residual
        x_next = x_bar if accepted else state.x

    trace = IterationTrace(
        k=state.k, n_k=state.n_k, t_k=ls.t, j=ls.j, fhat=fhat,
        accepted=accepted, increased=increased, r_residual=r, fev=fev)
    next_state = SolverState(
        x=x_next, k=state.k + 1, n_k=n_next, n_total=state.n_total, fev=fev,
        streams=state.streams, sampler=state.sampler)
    return next_state, trace


def default_metrics(problem, reference=None):
    """Full objective, stationarity and optional distance to a reference
    point; evaluated outside the cost ledger."""

    def metrics(x):
        value, grad = problem.full_value_grad(x)
        out = {"f_full": value,
               "stationarity": stationarity(x, grad, problem.box)}
        if reference is not None:
            out["dist_to_ref"] = float(np.linalg.norm(x - reference))
        return out

    return metrics


def run(problem, config, x0, metrics=None, callback=None):
    """Iterate ``step`` until the iteration or cost budget is exhausted.

    ``metrics`` (default: full objective + stationarity) is evaluated every
    ``config.metric_every`` rows; ``callback(state, trace)`` returning truthy
    stops early. Returns (final state, list of trace rows).
    """
    state = init_state(problem, config, x0)
    if metrics is None and config.metric_every > 0:
        metrics = default_metrics(problem)
    traces = []
    while state.k < config.max_iters and state.fev < config.fev_budget:
        state, trace = step(state, problem, config)
        want_metrics = (metrics is not None and config.metric_every > 0
                        and trace.k % config.metric_every == 0)
        if config.stationarity_tol is not None or want_metrics:
            measured = metrics(state.x) if metrics is not None else {}
            if config.stationarity_tol is not None and \
                    "stationarity" not in measured:
                measured["stationarity"] = stationarity(
                    state.x, problem.full_grad(state.x), problem.box)
            if want_metrics or config.stationarity_tol is not None:
                trace.f_full = measured.get("f_full")
                trace.stationarity = measured.get("stationarity")
                trace.dist_to_ref = measured.get("dist_to_ref")
        traces.append(trace)
        if config.stationarity_tol is not None and \
                trace.stationarity is not None and \
                trace.stationarity < config.stationarity_tol:
            break
        if callback is not None and callback(state, trace):
            break
    return state, traces


def complexity_bound(n_components, weights, c_b, f_low, C, eps_bar, c_bar, nu):
    """Worst-case expected iteration count to drive the stationarity measure
    below nu: ceil((N-1)/q) + ceil((C_b - f_low + C*eps_bar)/(c_bar*nu^2)),
    with q = (min_i w_i)^(N-1).

    Deliberately conservative; the first term bounds the mini-batch phase
    via the smallest probability of drawing a violator, the second the
    full-sample phase via the accumulated guaranteed decrease. Exact rational
    arithmetic keeps the first term meaningful even where the float power
    q would underflow (large N).
    """
    if nu <= 0.0 or c_bar <= 0.0:
        raise ValueError("nu and c_bar must be positive")
    if weights.min_weight <= 0.0:
        raise InvalidWeightsError(
            "all weights must be positive (q would vanish)")
    q = Fraction(weights.min_weight) ** (n_components - 1)
    mb_term = math.ceil(Fraction(n_components - 1) / q)
    fs_term = math.ceil(Fraction(c_b - f_low + C * eps_bar)
                        / (Fraction(c_bar) * Fraction(nu) ** 2))
    return mb_term + fs_term


def decrease_constant(c, c1, beta, lipschitz):
    """min{c, c1, 2 c1 (1-c1) beta / L}: the guaranteed per-iteration decrease
    coefficient entering the complexity bound."""
    return min(c, c1, 2.0 * c1 * (1.0 - c1) * beta / lipschitz)


def violator_probability_check(problem, x, x_bar, indicator, eps_k, c, C,
                               trials, stream, weights=None):
    """Monte-Carlo frequency of a singleton additional sample hitting a
    component that violates the keep-sample condition at (x, x_bar).

    Raises NoViolatorError when no component violates; callers plant one.
    The frequency concentrates on the total weight of the violating set, so
    it is at least min_i w_i up to sampling error whenever a violator exists.
    """
    w = weights if weights is not None else problem.weights
    violators = []
    for jj in range(problem.n_components):
        fj_x, gj = problem.component_value_grad(jj, x)
        s = direction(x, gj, problem.box)
        r = residual(indicator, ternary_indicator(x, gj, problem.box))
        fj_bar = problem.component_value(jj, x_bar)
        ok = (r == 0.0) and (fj_bar <= fj_x - c * float(np.dot(s, s)) + C * eps_k)
        if not ok:
            violators.append(jj)
    if not violators:
        raise NoViolatorError("no component violates the keep-sample condition")
    draws = CategoricalSampler(w).draw(trials, stream)
    return float(np.isin(draws, np.asarray(violators)).mean())
