"""Box feasible sets, projections, projected-gradient directions and the
ternary indicator machinery used by the additional-sampling test.

Everything here is a pure function over immutable inputs; extended bounds are
represented by the IEEE infinities (projection only ever compares against
them, so no inf arithmetic occurs).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InfeasiblePointError

__all__ = [
    "Box",
    "TernaryIndicator",
    "project",
    "direction",
    "ternary_indicator",
    "residual",
    "stationarity",
]

BELOW_LOWER = 1
INTERIOR = 2
ABOVE_UPPER = 3


@dataclass(frozen=True)
class Box:
    """Per-coordinate bounds ``lower <= x <= upper`` (equality pins a coordinate).

    ``-inf`` lower and ``+inf`` upper entries mean the side is unconstrained;
    NaN is rejected.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo.ndim != 1 or hi.ndim != 1:
            raise ValueError("bounds must be 1-d vectors")
        if lo.shape != hi.shape:
            raise DimensionMismatchError(lo.shape[0], hi.shape[0], "upper bound")
        if np.isnan(lo).any() or np.isnan(hi).any():
            raise ValueError("bounds must not contain NaN")
        if np.any(lo > hi):
            bad = int(np.argmax(lo > hi))
            raise ValueError(f"lower[{bad}]={lo[bad]} exceeds upper[{bad}]={hi[bad]}")

    @property
    def n(self):
        return self.lower.shape[0]

    @classmethod
    def unbounded(cls, n):
        return cls(np.full(n, -np.inf), np.full(n, np.inf))

    @classmethod
    def nonnegative(cls, n):
        return cls(np.zeros(n), np.full(n, np.inf))

    @classmethod
    def cube(cls, n, radius=1.0):
        return cls(np.full(n, -radius), np.full(n, radius))

    def contains(self, x):
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


@dataclass(frozen=True)
class TernaryIndicator:
    """Per-coordinate membership of x - g relative to the box.

    States: 1 below the lower bound, 2 inside (ties included), 3 above the
    upper bound. With an infinite bound the corresponding outer state is
    unreachable; with lower=0, upper=+inf this collapses to the binary
    below/inside indicator of the nonnegativity case.
    """

    states: np.ndarray


def _check_len(v, n, what):
    if v.shape[0] != n:
        raise DimensionMismatchError(n, v.shape[0], what)


def project(y, box):
    """Orthogonal projection onto the box: componentwise min(max(y, l), u)."""
    y = np.asarray(y, dtype=float)
    _check_len(y, box.n, "point")
    if not np.all(np.isfinite(y)):
        raise ValueError("point to project must be finite")
    return np.minimum(np.maximum(y, box.lower), box.upper)


def direction(x, g, box):
    """Projected-gradient direction p = project(x - g) - x for feasible x.

    Feasibility of x is required bit-exactly (all iterates are produced by
    ``project``, so no tolerance is needed); x + p is always feasible and p
    satisfies g'p <= -||p||^2.
    """
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    _check_len(x, box.n, "point")
    _check_len(g, box.n, "gradient")
    if not np.array_equal(project(x, box), x):
        raise InfeasiblePointError("x is not in the box")
    return project(x - g, box) - x


def ternary_indicator(x, g, box):
    """Classify each coordinate of x - g as below/inside/above the box."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    _check_len(x, box.n, "point")
    _check_len(g, box.n, "gradient")
    z = x - g
    states = np.full(box.n, INTERIOR, dtype=np.int8)
    states[z < box.lower] = BELOW_LOWER
    states[z > box.upper] = ABOVE_UPPER
    return TernaryIndicator(states)


def residual(a, b):
    """Euclidean norm of the componentwise indicator-state difference.

    Zero exactly when the two indicators agree, i.e. when both gradients
    induce the same projection structure.
    """
    if a.states.shape != b.states.shape:
        raise DimensionMismatchError(a.states.shape[0], b.states.shape[0],
                                     "indicator")
    diff = a.states.astype(np.float64) - b.states.astype(np.float64)
    return float(np.linalg.norm(diff))


def stationarity(x, full_grad, box):
    """Optimality measure ||project(x - grad f(x)) - x||; zero iff stationary."""
    return float(np.linalg.norm(direction(x, full_grad, box)))
