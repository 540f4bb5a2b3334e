"""Comparison methods: projected stochastic gradient (PSGM) and a simplified
stochastic log-barrier interior-point method (SIPM-lite).

SIPM-lite is a deliberately simplified stand-in, not a replication of the
published method: it follows a prescribed decreasing barrier sequence, keeps
iterates inside a shrunken box instead of using fraction-to-the-boundary
rules, and defaults to a constant gradient step. Both baselines charge
evaluation cost with the same per-component constants as the adaptive solver
so cost-axis comparisons are fair.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InfeasiblePointError
from .sampling import CategoricalSampler, RngStreams, SamplePlan, minibatch_grad
from .geometry import project
from .solver import IterationTrace, default_metrics

__all__ = [
    "PsgmConfig",
    "SipmConfig",
    "constant_steps",
    "default_mu_schedule",
    "psgm_step",
    "sipm_step",
    "run_psgm",
    "run_sipm",
]


def constant_steps(alpha):
    if alpha <= 0.0:
        raise ValueError(f"step size must be positive, got {alpha}")
    return lambda k: alpha


def default_mu_schedule(mu0=0.1):
    """Decreasing barrier parameters mu_k = mu0 (k+1)^(-1/2) (k counted from 0)."""
    if mu0 <= 0.0:
        raise ValueError(f"mu0 must be positive, got {mu0}")
    return lambda k: mu0 / math.sqrt(k + 1.0)


@dataclass(frozen=True)
class PsgmConfig:
    batch_size: int = 16
    step_schedule: Callable[[int], float] = field(default=constant_steps(0.1))
    max_iters: int = 1000
    fev_budget: float = math.inf
    seed: int = 0
    metric_every: int = 10

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass(frozen=True)
class SipmConfig:
    batch_size: int = 16
    mu_schedule: Callable[[int], float] = field(default=default_mu_schedule())
    step_schedule: Callable[[int], float] = field(default=constant_steps(0.1))
    fraction_margin: float = 0.1
    max_iters: int = 1000
    fev_budget: float = math.inf
    seed: int = 0
    metric_every: int = 10

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0.0 < self.fraction_margin < 1.0:
            raise ValueError("fraction_margin must be in (0,1)")


def _batch_grad(problem, sampler, stream, batch_size, x):
    plan = SamplePlan(sampler.draw(batch_size, stream))
    return minibatch_grad(problem, plan, x)


def psgm_step(x, problem, cfg, k, sampler, stream):
    """x' = project(x - alpha_k * batch gradient)."""
    ghat = _batch_grad(problem, sampler, stream, cfg.batch_size, x)
    alpha = cfg.step_schedule(k)
    return project(x - alpha * ghat, problem.box)


def _barrier_grad(x, box):
    # barrier -sum log(x-l) - sum log(u-x) over the finite sides only
    grad = np.zeros_like(x)
    lo_fin = np.isfinite(box.lower)
    hi_fin = np.isfinite(box.upper)
    grad[lo_fin] -= 1.0 / (x[lo_fin] - box.lower[lo_fin])
    grad[hi_fin] += 1.0 / (box.upper[hi_fin] - x[hi_fin])
    return grad


def _shrunken_box(box, delta):
    # cap keeps the shrunken box nonempty on narrow coordinates
    lo = box.lower.copy()
    hi = box.upper.copy()
    d = np.minimum(delta, 0.45 * (hi - lo))
    lo_fin = np.isfinite(lo)
    hi_fin = np.isfinite(hi)
    lo[lo_fin] += d[lo_fin]
    hi[hi_fin] -= d[hi_fin]
    return lo, hi


def sipm_step(x, problem, cfg, k, sampler, stream):
    """Barrier-augmented gradient step clipped into the shrunken box
    [l + delta_k, u - delta_k], delta_k = fraction_margin * mu_k."""
    box = problem.box
    lo_fin = np.isfinite(box.lower)
    hi_fin = np.isfinite(box.upper)
    if np.any(x[lo_fin] <= box.lower[lo_fin]) or np.any(x[hi_fin] >= box.upper[hi_fin]):
        raise InfeasiblePointError("SIPM iterate must be strictly interior")
    ghat = _batch_grad(problem, sampler, stream, cfg.batch_size, x)
    mu = cfg.mu_schedule(k)
    alpha = cfg.step_schedule(k)
    raw = x - alpha * (ghat + mu * _barrier_grad(x, box))
    delta = np.full(box.n, cfg.fraction_margin * mu)
    lo, hi = _shrunken_box(box, delta)
    return np.minimum(np.maximum(raw, lo), hi)


def _run_baseline(problem, cfg, x0, step_fn, metrics):
    x = np.asarray(x0, dtype=float).copy()
    streams = RngStreams(cfg.seed)
    sampler = CategoricalSampler(problem.weights)
    if metrics is None and cfg.metric_every > 0:
        metrics = default_metrics(problem)
    fev = 0
    k = 0
    traces = []
    while k < cfg.max_iters and fev < cfg.fev_budget:
        x = step_fn(x, problem, cfg, k, sampler, streams.batch)
        fev += cfg.batch_size * problem.grad_cost
        trace = IterationTrace(
            k=k, n_k=cfg.batch_size, t_k=cfg.step_schedule(k), j=0, fhat=None,
            accepted=True, increased=False, r_residual=None, fev=fev)
        if metrics is not None and cfg.metric_every > 0 \
                and k % cfg.metric_every == 0:
            measured = metrics(x)
            trace.f_full = measured.get("f_full")
            trace.stationarity = measured.get("stationarity")
            trace.dist_to_ref = measured.get("dist_to_ref")
        traces.append(trace)
        k += 1
    return x, traces


def run_psgm(problem, cfg, x0, metrics=None):
    """Run PSGM under the iteration/cost budgets; trace schema matches the
    adaptive solver's."""
    return _run_baseline(problem, cfg, x0, psgm_step, metrics)


def run_sipm(problem, cfg, x0, metrics=None):
    """Run SIPM-lite; the start point is nudged strictly inside the box if it
    sits on a finite bound."""
    box = problem.box
    x0 = np.asarray(x0, dtype=float).copy()
    mu0 = cfg.mu_schedule(0)
    lo, hi = _shrunken_box(box, np.full(box.n, cfg.fraction_margin * mu0))
    x0 = np.minimum(np.maximum(x0, lo), hi)
    return _run_baseline(problem, cfg, x0, sipm_step, metrics)
