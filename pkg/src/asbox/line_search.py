"""Nonmonotone Armijo backtracking over the mini-batch estimator.

The relaxation term eps_k lets the estimated objective increase temporarily;
any summable schedule is admissible. The search only sees a scalar closure of
the step size, so evaluation-cost accounting stays with the caller.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple

from .errors import LineSearchError

__all__ = ["LineSearchParams", "LineSearchResult", "backtrack", "power_eps_schedule"]


@dataclass(frozen=True)
class LineSearchParams:
    beta: float           # backtracking factor, in (0,1)
    c1: float             # Armijo slope fraction, in (0,1)
    eps_k: float = 0.0    # this iteration's relaxation, >= 0
    max_backtracks: int = 60  # beta=0.1 puts t at 1e-60 here, far past double precision

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must be in (0,1), got {self.beta}")
        if not 0.0 < self.c1 < 1.0:
            raise ValueError(f"c1 must be in (0,1), got {self.c1}")
        if self.eps_k < 0.0:
            raise ValueError(f"eps_k must be >= 0, got {self.eps_k}")


class LineSearchResult(NamedTuple):
    t: float        # accepted step, beta**j
    j: int          # number of backtracks
    evals: int      # value_fn calls made (j + 1)


def backtrack(value_fn: Callable[[float], float], f0, slope,
              params: LineSearchParams) -> LineSearchResult:
    """Smallest j >= 0 with value_fn(beta**j) <= f0 + c1*beta**j*slope + eps_k.

    ``slope`` is the directional derivative at t=0 and must be nonpositive
    (guaranteed for projected-gradient directions); ``f0`` is the estimator
    value at t=0. Raises LineSearchError, carrying the last step tried, if the
    budget runs out, which usually signals an inconsistent value/gradient pair.
    """
    t = 1.0
    for j in range(params.max_backtracks + 1):
        if value_fn(t) <= f0 + params.c1 * t * slope + params.eps_k:
            return LineSearchResult(t=t, j=j, evals=j + 1)
        t *= params.beta
    raise LineSearchError(last_t=t / params.beta, backtracks=params.max_backtracks)


def power_eps_schedule(exponent=1.1):
    """Summable relaxation schedule eps_k = (k+1)^(-exponent), k counted from 0."""
    if exponent <= 1.0:
        raise ValueError("exponent must exceed 1 for a summable series")

    def eps(k):
        return float(k + 1) ** (-exponent)

    return eps


def eps_series_bound(exponent=1.1, terms=100_000):
    """Upper bound on sum_k (k+1)^(-exponent): partial sum plus integral tail."""
    import numpy as np

    ks = np.arange(1, terms + 1, dtype=float)
    partial = float(np.sum(ks ** (-exponent)))
    tail = terms ** (1.0 - exponent) / (exponent - 1.0)
    return partial + tail
