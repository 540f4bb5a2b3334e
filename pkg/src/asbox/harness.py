"""Experiment harness: configuration files, the evaluation-cost ledger,
reference solutions, trace CSV emission and the complexity-bound report.

The cost unit is one n-dimensional scalar product. Every method is charged
through the same per-event price table (mirrored by the problems' cost
constants), so cost-axis comparisons are method-agnostic; metric logging is
out-of-band and free.
"""

import configparser
import dataclasses
import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .baselines import (PsgmConfig, SipmConfig, constant_steps,
                        default_mu_schedule, run_psgm, run_sipm)
from .data_io import load_dataset, synthetic_logistic_dataset
from .errors import AsboxError
from .geometry import direction, project, stationarity
from .line_search import (LineSearchParams, backtrack, eps_series_bound,
                          power_eps_schedule)
from .problems import (LogisticRegressionProblem, NeuralNetProblem,
                       NnArchitecture, QuadraticSuiteSpec, quadratic_suite,
                       default_initial_point)
from .sampling import RngStreams
from .solver import (SolverConfig, complexity_bound, decrease_constant,
                     default_metrics, run)

__all__ = [
    "FevLedger",
    "unit_cost",
    "ExperimentConfig",
    "load_config",
    "build_problem",
    "reference_solution",
    "run_experiment",
    "bound_report",
    "tune_psgm_step",
    "CSV_COLUMNS",
]

PSGM_TUNING_GRID = (1.0, 0.1, 0.01)

CSV_COLUMNS = ("k", "method", "n_k", "t_k", "fhat", "f_full", "stationarity",
               "dist_to_ref", "fev", "accepted", "increased", "r_residual")

_EVENT_COSTS = {
    "logistic_value": lambda h, n: 1,
    "logistic_grad": lambda h, n: 1,
    "nn_forward": lambda h, n: h + 1,
    "nn_backward": lambda h, n: 2 * h + 1,
    "quadratic_value": lambda h, n: n,
    "quadratic_grad": lambda h, n: n,
    "metric": lambda h, n: 0,  # diagnostics are free by design
}


def unit_cost(kind, hidden_dim=None, dim=None):
    """Scalar-product price of one evaluation event."""
    try:
        return _EVENT_COSTS[kind](hidden_dim, dim)
    except KeyError:
        raise ValueError(f"unknown evaluation event {kind!r}") from None
    except TypeError:
        raise ValueError(f"event {kind!r} needs its dimension argument") from None


@dataclass
class FevLedger:
    """Monotone counter of scalar-product-equivalent work."""

    total: int = 0

    def account(self, kind, count=1, hidden_dim=None, dim=None):
        if count < 0:
            raise ValueError("event count must be nonnegative")
        self.total += unit_cost(kind, hidden_dim, dim) * count
        return self


@dataclass
class ExperimentConfig:
    problem: str = "quadratic"          # quadratic | logreg | nn | synth-logreg
    method: str = "asbox"               # asbox | psgm | sipm
    out_dir: str = "traces"
    seeds: tuple = (0, 1, 2, 3, 4)
    metric_every: int = 10
    max_iters: int = 1000
    fev_budget: float = math.inf
    data_path: Optional[str] = None
    reference_path: Optional[str] = None
    nn_hidden: int = 16
    quadratic: QuadraticSuiteSpec = field(
        default_factory=lambda: QuadraticSuiteSpec(n=10, n_components=20,
                                                   heterogeneity=0.1))
    synth: dict = field(default_factory=lambda: dict(
        n_samples=2000, n_features=50, noise=0.1, seed=0))
    asbox: SolverConfig = field(default_factory=SolverConfig)
    psgm_batch: int = 16
    psgm_alpha: Optional[float] = None  # None -> grid-tuned per problem
    sipm_batch: int = 16
    sipm_alpha: float = 0.1
    sipm_mu0: float = 0.1
    sipm_margin: float = 0.1
    bound_nu: float = 1e-2

    def __post_init__(self):
        if self.method not in ("asbox", "psgm", "sipm"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.problem not in ("quadratic", "logreg", "nn", "synth-logreg"):
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.problem in ("logreg", "nn"):
            if not self.data_path:
                raise ValueError(f"problem {self.problem!r} needs a data path")
            if not os.path.exists(self.data_path):
                raise FileNotFoundError(self.data_path)


def _get(parser, section, key, conv, default):
    if parser.has_option(section, key):
        return conv(parser.get(section, key))
    return default


def load_config(path):
    """Read the flat INI experiment file ([experiment] plus per-method
    sections); unspecified keys keep the reference defaults."""
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep key case: c and C are different knobs
    with open(path, "r", encoding="utf-8") as fh:
        parser.read_file(fh)
    exp = "experiment"
    seeds = _get(parser, exp, "seeds", str, "0 1 2 3 4")
    quad = QuadraticSuiteSpec(
        n=_get(parser, "quadratic", "n", int, 10),
        n_components=_get(parser, "quadratic", "n_components", int, 20),
        condition=_get(parser, "quadratic", "condition", float, 10.0),
        heterogeneity=_get(parser, "quadratic", "heterogeneity", float, 0.1),
        seed=_get(parser, "quadratic", "seed", int, 0),
    )
    solver = SolverConfig(
        n0=_get(parser, "asbox", "n0", int, 3),
        beta=_get(parser, "asbox", "beta", float, 0.1),
        c1=_get(parser, "asbox", "c1", float, 1e-4),
        c=_get(parser, "asbox", "c", float, 1e-4),
        C=_get(parser, "asbox", "C", float, 1.0),
        d_size=_get(parser, "asbox", "d_size", int, 1),
        growth=_get(parser, "asbox", "growth", str, "geometric"),
        growth_factor=_get(parser, "asbox", "growth_factor", float, 1.1),
        eps_schedule=power_eps_schedule(
            _get(parser, "asbox", "eps_exponent", float, 1.1)),
    )
    synth = dict(
        n_samples=_get(parser, "synth", "n_samples", int, 2000),
        n_features=_get(parser, "synth", "n_features", int, 50),
        noise=_get(parser, "synth", "noise", float, 0.1),
        seed=_get(parser, "synth", "seed", int, 0),
    )
    return ExperimentConfig(
        problem=_get(parser, exp, "problem", str, "quadratic"),
        method=_get(parser, exp, "method", str, "asbox"),
        out_dir=_get(parser, exp, "out", str, "traces"),
        seeds=tuple(int(s) for s in seeds.split()),
        metric_every=_get(parser, exp, "metric_every", int, 10),
        max_iters=_get(parser, exp, "max_iters", int, 1000),
        fev_budget=_get(parser, exp, "fev_budget", float, math.inf),
        data_path=_get(parser, exp, "data", str, None),
        reference_path=_get(parser, exp, "reference", str, None),
        nn_hidden=_get(parser, "nn", "hidden_dim", int, 16),
        quadratic=quad,
        synth=synth,
        asbox=solver,
        psgm_batch=_get(parser, "psgm", "batch_size", int, 16),
        psgm_alpha=_get(parser, "psgm", "alpha", float, None),
        sipm_batch=_get(parser, "sipm", "batch_size", int, 16),
        sipm_alpha=_get(parser, "sipm", "alpha", float, 0.1),
        sipm_mu0=_get(parser, "sipm", "mu0", float, 0.1),
        sipm_margin=_get(parser, "sipm", "fraction_margin", float, 0.1),
        bound_nu=_get(parser, "bound", "nu", float, 1e-2),
    )


def build_problem(cfg):
    if cfg.problem == "quadratic":
        return quadratic_suite(cfg.quadratic)
    if cfg.problem == "synth-logreg":
        return LogisticRegressionProblem(synthetic_logistic_dataset(**cfg.synth))
    dataset = load_dataset(cfg.data_path)
    if cfg.problem == "logreg":
        return LogisticRegressionProblem(dataset)
    arch = NnArchitecture(input_dim=dataset.n_features, hidden_dim=cfg.nn_hidden)
    return NeuralNetProblem(dataset, arch)


def reference_solution(problem, tol=1e-10, max_iters=200_000, cache_path=None):
    """Deterministic full-gradient projected descent down to ||d(x)|| <= tol.

    With a known gradient Lipschitz constant the step is fixed at
    min(1, 1/L), which any Armijo test would accept and which keeps working
    below the scale where objective differences drown in float rounding;
    otherwise plain backtracking is used. The result is cached as .npy when a
    path is given; a cached point is re-verified against the tolerance.
    """
    if cache_path and os.path.exists(cache_path):
        x = np.load(cache_path)
        res = stationarity(x, problem.full_grad(x), problem.box)
        if res > tol:
            raise AsboxError(
                f"cached reference at {cache_path} has stationarity {res:.3e} "
                f"> tol {tol:.3e}; delete it to recompute")
        return x
    x = project(np.zeros(problem.n), problem.box)
    t_fixed = None
    if hasattr(problem, "lipschitz"):
        t_fixed = min(1.0, 1.0 / problem.lipschitz())
    params = LineSearchParams(beta=0.5, c1=1e-4, eps_k=0.0, max_backtracks=200)
    for _ in range(max_iters):
        grad = problem.full_grad(x)
        p = direction(x, grad, problem.box)
        if float(np.linalg.norm(p)) <= tol:
            if cache_path:
                np.save(cache_path, x)
            return x
        if t_fixed is not None:
            t = t_fixed
        else:
            t = backtrack(
                lambda t_: problem.full_value(project(x + t_ * p, problem.box)),
                problem.full_value(x), float(np.dot(grad, p)), params).t
        x = project(x + t * p, problem.box)
    raise AsboxError(f"reference solve exhausted {max_iters} iterations "
                     f"before reaching tol {tol:.3e}")


def tune_psgm_step(problem, x0, grid=PSGM_TUNING_GRID, fev_budget=None,
                   batch_size=16, seed=997):
    """Pick the constant PSGM step from a small grid by final full objective
    on a held-out budget (separate seed, so tuning never sees the runs)."""
    if fev_budget is None:
        fev_budget = 50 * batch_size * problem.grad_cost
    best_alpha, best_value = None, math.inf
    for alpha in grid:
        cfg = PsgmConfig(batch_size=batch_size,
                         step_schedule=constant_steps(alpha),
                         max_iters=10**9, fev_budget=fev_budget, seed=seed,
                         metric_every=0)
        x, _ = run_psgm(problem, cfg, x0)
        value = problem.full_value(x)
        if value < best_value:
            best_alpha, best_value = alpha, value
    return best_alpha


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trace_csv(path, method, traces):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for t in traces:
            row = (t.k, method, t.n_k, float(t.t_k), t.fhat, t.f_full,
                   t.stationarity, t.dist_to_ref, t.fev, t.accepted,
                   t.increased, t.r_residual)
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _run_one(problem, cfg, seed, reference, psgm_alpha=None):
    streams = RngStreams(seed)
    x0 = default_initial_point(problem.box, streams.init)
    metrics = default_metrics(problem, reference=reference)
    if cfg.method == "asbox":
        solver_cfg = dataclasses.replace(
            cfg.asbox, seed=seed, max_iters=cfg.max_iters,
            fev_budget=cfg.fev_budget, metric_every=cfg.metric_every)
        _, traces = run(problem, solver_cfg, x0, metrics=metrics)
    elif cfg.method == "psgm":
        alpha = psgm_alpha if psgm_alpha is not None else 0.1
        pcfg = PsgmConfig(batch_size=cfg.psgm_batch,
                          step_schedule=constant_steps(alpha),
                          max_iters=cfg.max_iters, fev_budget=cfg.fev_budget,
                          seed=seed, metric_every=cfg.metric_every)
        _, traces = run_psgm(problem, pcfg, x0, metrics=metrics)
    else:
        scfg = SipmConfig(batch_size=cfg.sipm_batch,
                          mu_schedule=default_mu_schedule(cfg.sipm_mu0),
                          step_schedule=constant_steps(cfg.sipm_alpha),
                          fraction_margin=cfg.sipm_margin,
                          max_iters=cfg.max_iters, fev_budget=cfg.fev_budget,
                          seed=seed, metric_every=cfg.metric_every)
        _, traces = run_sipm(problem, scfg, x0, metrics=metrics)
    return traces


def run_experiment(cfg, problem=None):
    """Run cfg.method for every seed and write one trace CSV per run.

    Returns the list of files written. Identical configs and seeds produce
    byte-identical files.
    """
    if problem is None:
        problem = build_problem(cfg)
    reference = None
    if cfg.reference_path:
        os.makedirs(os.path.dirname(cfg.reference_path) or ".", exist_ok=True)
        reference = reference_solution(problem, cache_path=cfg.reference_path)
    psgm_alpha = cfg.psgm_alpha
    if cfg.method == "psgm" and psgm_alpha is None:
        streams = RngStreams(cfg.seeds[0])
        x0 = default_initial_point(problem.box, streams.init)
        psgm_alpha = tune_psgm_step(problem, x0, batch_size=cfg.psgm_batch)
    os.makedirs(cfg.out_dir, exist_ok=True)
    written = []
    for seed in cfg.seeds:
        traces = _run_one(problem, cfg, seed, reference, psgm_alpha)
        path = os.path.join(cfg.out_dir, f"{cfg.method}_seed{seed}.csv")
        write_trace_csv(path, cfg.method, traces)
        written.append(path)
    return written


@dataclass
class BoundReport:
    bound: int
    observed: list
    mean_observed: float
    applicable: bool
    lines: list


def bound_report(cfg, problem=None):
    """Theoretical iterations-to-nu bound next to the observed counts.

    The comparison is asserted only when at least one run actually grew its
    sample (otherwise the heterogeneity assumption behind the bound has no
    evidence and the report says so instead).
    """
    if problem is None:
        problem = build_problem(cfg)
    if not hasattr(problem, "lipschitz"):
        raise AsboxError("bound report needs a problem with a known gradient "
                         "Lipschitz constant (quadratic or logreg)")
    nu = cfg.bound_nu
    sc = cfg.asbox
    lipschitz = problem.lipschitz()
    c_bar = decrease_constant(sc.c, sc.c1, sc.beta, lipschitz)
    eps_bar = eps_series_bound()
    observed = []
    grew = False
    c_b = -math.inf
    for seed in cfg.seeds:
        streams = RngStreams(seed)
        x0 = default_initial_point(problem.box, streams.init)
        c_b = max(c_b, problem.full_value(x0))
        solver_cfg = dataclasses.replace(
            sc, seed=seed, max_iters=cfg.max_iters, fev_budget=cfg.fev_budget,
            stationarity_tol=nu, metric_every=cfg.metric_every)
        _, traces = run(problem, solver_cfg, x0)
        grew = grew or any(t.increased for t in traces)
        reached = traces and traces[-1].stationarity is not None \
            and traces[-1].stationarity < nu
        observed.append(len(traces) if reached else math.inf)
    bound = complexity_bound(problem.n_components, problem.weights, c_b,
                             0.0, sc.C, eps_bar, c_bar, nu)
    mean_observed = float(np.mean(observed))
    if bound < 10 ** 9:
        bound_str = str(bound)
    else:
        digits = str(bound)
        bound_str = f"{digits[0]}.{digits[1:5]}e+{len(digits) - 1}"
    lines = [
        f"target stationarity nu = {nu:g}",
        f"decrease constant = {c_bar:.6g} (L = {lipschitz:.6g})",
        f"expected-iteration bound = {bound_str}",
        f"observed iterations per seed = {observed}",
        f"mean observed = {mean_observed:g}",
    ]
    if not grew:
        lines.append("note: no run grew its sample; the heterogeneity "
                     "assumption is not evidenced, bound reported only")
    else:
        lines.append("bound holds" if mean_observed <= bound
                     else "BOUND VIOLATED")
    return BoundReport(bound=bound, observed=observed,
                       mean_observed=mean_observed, applicable=grew,
                       lines=lines)
