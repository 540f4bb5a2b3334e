"""Weighted index sampling for mini-batches and additional samples, plus
the mini-batch objective/gradient estimators.

A master seed is split into named single-consumer streams ("batch",
"additional", "init") so the additional sample is drawn independently of the
mini-batch by construction, and experiments replay bit-identically.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidWeightsError

__all__ = [
    "WeightVector",
    "SamplePlan",
    "RngStreams",
    "CategoricalSampler",
    "draw_sample",
    "draw_additional",
    "minibatch_value",
    "minibatch_grad",
    "minibatch_value_grad",
]

WEIGHT_SUM_TOL = 1e-12

STREAM_NAMES = ("batch", "additional", "init")


@dataclass(frozen=True)
class WeightVector:
    """Probability weights over the N components: w_i >= 0, sum w_i = 1."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "w", w)
        if w.ndim != 1 or w.shape[0] < 1:
            raise InvalidWeightsError("weights must be a nonempty 1-d vector")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InvalidWeightsError("weights must be finite and nonnegative")
        if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidWeightsError(f"weights sum to {w.sum()!r}, expected 1")

    @classmethod
    def uniform(cls, n):
        return cls(np.full(n, 1.0 / n))

    @property
    def n(self):
        return self.w.shape[0]

    @property
    def min_weight(self):
        return float(self.w.min())


@dataclass(frozen=True)
class SamplePlan:
    """A multiset of component indices (i.i.d. draws keep duplicates).

    ``full=True`` marks the exact full-sample mode where every index appears
    once and estimators switch to the weighted sum.
    """

    indices: np.ndarray
    full: bool = False

    @property
    def size(self):
        return self.indices.shape[0]

    @classmethod
    def full_sample(cls, n_components):
        return cls(np.arange(n_components, dtype=np.int64), full=True)


class RngStreams:
    """Named, disjoint generators spawned deterministically from one seed."""

    def __init__(self, seed):
        children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
        for name, ss in zip(STREAM_NAMES, children):
            setattr(self, name, np.random.default_rng(ss))


class CategoricalSampler:
    """O(1)-per-draw categorical sampling via the alias method (Vose setup).

    The solver and harness draw millions of indices, so the O(N) table is
    built once per weight vector and reused.
    """

    def __init__(self, weights):
        w = weights.w
        n = w.shape[0]
        scaled = w * n
        self.prob = np.ones(n)
        self.alias = np.arange(n)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        scaled = scaled.copy()
        while small and large:
            s = small.pop()
            l = large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = l
            scaled[l] -= 1.0 - scaled[s]
            (small if scaled[l] < 1.0 else large).append(l)
        for rest in (small, large):
            for i in rest:
                self.prob[i] = 1.0

    def draw(self, size, stream):
        cols = stream.integers(0, self.prob.shape[0], size=size)
        keep = stream.random(size) < self.prob[cols]
        return np.where(keep, cols, self.alias[cols]).astype(np.int64)


def draw_sample(weights, size, stream):
    """Draw ``size`` i.i.d. component indices with P(i) = w_i."""
    if size < 1:
        raise ValueError(f"sample size must be >= 1, got {size}")
    return SamplePlan(CategoricalSampler(weights).draw(size, stream))


def draw_additional(weights, d_size, stream):
    """Draw the additional sample; the stream must be the dedicated
    "additional" stream so the draw is independent of the mini-batch."""
    return draw_sample(weights, d_size, stream)


def _row_scale(problem, plan):
    if plan.full:
        return plan.indices, problem.weights.w
    scale = np.full(plan.size, 1.0 / plan.size)
    return plan.indices, scale


def minibatch_value(problem, plan, x):
    """Mean of f_i over the plan; exact weighted sum f(x) in full mode."""
    rows, scale = _row_scale(problem, plan)
    return problem.batch_value(rows, scale, x)


def minibatch_grad(problem, plan, x):
    rows, scale = _row_scale(problem, plan)
    return problem.batch_value_grad(rows, scale, x)[1]


def minibatch_value_grad(problem, plan, x):
    rows, scale = _row_scale(problem, plan)
    return problem.batch_value_grad(rows, scale, x)
