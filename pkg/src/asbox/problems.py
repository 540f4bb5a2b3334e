"""Concrete weighted finite-sum objectives.

Each problem exposes component oracles f_i / grad f_i, batched evaluation over
an index multiset with per-row scales (the single entry point the estimators
use), and its per-evaluation cost in scalar-product units so every method is
charged identically.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import Box, project
from .sampling import WeightVector

__all__ = [
    "WeightedSumProblem",
    "LogisticRegressionProblem",
    "NnArchitecture",
    "NeuralNetProblem",
    "QuadraticSumProblem",
    "QuadraticSuiteSpec",
    "quadratic_suite",
    "logistic_component",
    "nn_component",
    "default_initial_point",
]

CROSS_ENTROPY_CLAMP = 1e-12  # avoids log(0) at saturated outputs


def _check_box_dim(box, n):
    if box.n != n:
        raise ValueError(f"box dimension {box.n} != decision dimension {n}")


class WeightedSumProblem:
    """Base contract: N component oracles with weights and a feasible box.

    Subclasses set ``n``, ``n_components``, ``weights``, ``box`` and the cost
    constants ``value_cost`` / ``grad_cost`` / ``value_grad_cost`` (scalar
    products per component evaluation), and implement ``batch_value`` /
    ``batch_value_grad`` over (rows, scale) pairs.
    """

    def batch_value(self, rows, scale, x):
        raise NotImplementedError

    def batch_value_grad(self, rows, scale, x):
        raise NotImplementedError

    def component_value(self, i, x):
        rows = np.array([i], dtype=np.int64)
        return self.batch_value(rows, np.ones(1), x)

    def component_value_grad(self, i, x):
        rows = np.array([i], dtype=np.int64)
        return self.batch_value_grad(rows, np.ones(1), x)

    def component_grad(self, i, x):
        return self.component_value_grad(i, x)[1]

    def full_value(self, x):
        """Exact weighted objective f(x) = sum_i w_i f_i(x)."""
        rows = np.arange(self.n_components, dtype=np.int64)
        return self.batch_value(rows, self.weights.w, x)

    def full_value_grad(self, x):
        rows = np.arange(self.n_components, dtype=np.int64)
        return self.batch_value_grad(rows, self.weights.w, x)

    def full_grad(self, x):
        return self.full_value_grad(x)[1]


class LogisticRegressionProblem(WeightedSumProblem):
    """f_i(x) = log(1 + exp(-b_i a_i'x)) over sparse rows a_i, labels b_i in {-1,1}.

    One a_i'x dot per value, one scaled-row accumulation per gradient: cost 1
    unit each, 2 for a combined evaluation.
    """

    value_cost = 1
    grad_cost = 1
    value_grad_cost = 2

    def __init__(self, dataset, box=None, weights=None):
        if set(np.unique(dataset.labels)) - {-1.0, 1.0}:
            raise ValueError("labels must be encoded in {-1, +1} (see encode_labels)")
        self.dataset = dataset
        self.n = dataset.n_features
        self.n_components = dataset.n_samples
        self.weights = weights or WeightVector.uniform(self.n_components)
        self.box = box or Box.cube(self.n)
        _check_box_dim(self.box, self.n)

    def batch_value(self, rows, scale, x):
        d = self.dataset
        return _kernels.logistic_batch_value(
            d.indptr, d.indices, d.values, d.labels, np.asarray(x, float),
            np.asarray(rows, np.int64), np.asarray(scale, float))

    def batch_value_grad(self, rows, scale, x):
        d = self.dataset
        return _kernels.logistic_batch_value_grad(
            d.indptr, d.indices, d.values, d.labels, np.asarray(x, float),
            np.asarray(rows, np.int64), np.asarray(scale, float))

    def lipschitz(self):
        """max_i ||a_i||^2 / 4 bounds every component gradient's Lipschitz constant."""
        d = self.dataset
        sq = np.bincount(
            np.repeat(np.arange(d.n_samples), np.diff(d.indptr)),
            weights=d.values ** 2, minlength=d.n_samples)
        return float(sq.max()) / 4.0


@dataclass(frozen=True)
class NnArchitecture:
    """Single-hidden-layer net sigma(W2 tanh(W1 a + b1) + b2), flattened as
    (W1 row-major | b1 | W2 | b2)."""

    input_dim: int
    hidden_dim: int

    @property
    def total_params(self):
        h, m = self.hidden_dim, self.input_dim
        return h * m + h + h + 1

    def unflatten(self, params):
        h, m = self.hidden_dim, self.input_dim
        if params.shape[0] != self.total_params:
            raise ValueError(
                f"expected {self.total_params} parameters, got {params.shape[0]}")
        w1 = params[: h * m].reshape(h, m)
        b1 = params[h * m: h * m + h]
        w2 = params[h * m + h: h * m + 2 * h]
        b2 = float(params[-1])
        return w1, b1, w2, b2

    def flatten(self, w1, b1, w2, b2):
        return np.concatenate([np.ravel(w1), b1, w2, np.atleast_1d(float(b2))])


class NeuralNetProblem(WeightedSumProblem):
    """Per-sample cross-entropy of the 1-hidden-layer net; labels {-1,1} are
    remapped to y = (b+1)/2.

    Costs count matrix-vector rows as unit dots: forward = hidden+1, backward
    = 2*hidden+1, so a gradient (forward required) is 3*hidden+2.
    """

    def __init__(self, dataset, arch, box=None, weights=None):
        if set(np.unique(dataset.labels)) - {-1.0, 1.0}:
            raise ValueError("labels must be encoded in {-1, +1} (see encode_labels)")
        if arch.input_dim != dataset.n_features:
            raise ValueError(
                f"architecture input_dim {arch.input_dim} != dataset features "
                f"{dataset.n_features}")
        self.dataset = dataset
        self.arch = arch
        self.y01 = (dataset.labels + 1.0) / 2.0
        self.n = arch.total_params
        self.n_components = dataset.n_samples
        self.weights = weights or WeightVector.uniform(self.n_components)
        self.box = box or Box.cube(self.n)
        _check_box_dim(self.box, self.n)
        h = arch.hidden_dim
        self.value_cost = h + 1
        self.grad_cost = 3 * h + 2
        self.value_grad_cost = 3 * h + 2

    def batch_value(self, rows, scale, x):
        d = self.dataset
        w1, b1, w2, b2 = self.arch.unflatten(np.asarray(x, float))
        return _kernels.nn_batch_value(
            d.indptr, d.indices, d.values, self.y01, w1, b1, w2, b2,
            np.asarray(rows, np.int64), np.asarray(scale, float),
            clamp=CROSS_ENTROPY_CLAMP)

    def batch_value_grad(self, rows, scale, x):
        d = self.dataset
        w1, b1, w2, b2 = self.arch.unflatten(np.asarray(x, float))
        value, gw1, gb1, gw2, gb2 = _kernels.nn_batch_value_grad(
            d.indptr, d.indices, d.values, self.y01, w1, b1, w2, b2,
            np.asarray(rows, np.int64), np.asarray(scale, float),
            clamp=CROSS_ENTROPY_CLAMP)
        return value, self.arch.flatten(gw1, gb1, gw2, gb2)


class QuadraticSumProblem(WeightedSumProblem):
    """Synthetic components f_i(x) = (x-m_i)'A_i(x-m_i)/2 with SPD A_i.

    Dense matrix-vector work: n units for a value or a gradient alone, n+1
    when the shared A(x-m) product serves both.
    """

    def __init__(self, matrices, centers, box, weights=None):
        self.matrices = np.asarray(matrices, float)       # (N, n, n)
        self.centers = np.asarray(centers, float)         # (N, n)
        self.n_components, self.n = self.centers.shape
        self.weights = weights or WeightVector.uniform(self.n_components)
        self.box = box
        _check_box_dim(self.box, self.n)
        self.value_cost = self.n
        self.grad_cost = self.n
        self.value_grad_cost = self.n + 1

    def batch_value(self, rows, scale, x):
        d = x[None, :] - self.centers[rows]
        ad = np.einsum("rij,rj->ri", self.matrices[rows], d)
        return float(0.5 * np.dot(scale, np.einsum("ri,ri->r", d, ad)))

    def batch_value_grad(self, rows, scale, x):
        d = x[None, :] - self.centers[rows]
        ad = np.einsum("rij,rj->ri", self.matrices[rows], d)
        value = float(0.5 * np.dot(scale, np.einsum("ri,ri->r", d, ad)))
        grad = scale @ ad
        return value, grad

    def aggregate(self):
        """Weighted-sum quadratic data (A_bar, rhs): full gradient is A_bar x - rhs."""
        w = self.weights.w
        a_bar = np.einsum("r,rij->ij", w, self.matrices)
        rhs = np.einsum("r,rij,rj->i", w, self.matrices, self.centers)
        return a_bar, rhs

    def lipschitz(self):
        return float(max(np.linalg.eigvalsh(a).max() for a in self.matrices))


@dataclass(frozen=True)
class QuadraticSuiteSpec:
    n: int
    n_components: int
    condition: float = 10.0
    heterogeneity: float = 0.0
    box: Box = None
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.n_components < 1:
            raise ValueError("n and n_components must be positive")
        if self.condition < 1.0:
            raise ValueError("condition number must be >= 1")
        if self.heterogeneity < 0.0:
            raise ValueError("heterogeneity must be >= 0")


def quadratic_suite(spec, weights=None):
    """Build the synthetic suite; heterogeneity 0 makes all components identical.

    The shared base A0 has eigenvalues geomspaced in [1, condition]; each
    component adds heterogeneity * (PSD perturbation), so every A_i stays
    positive definite and the weighted sum is strongly convex.
    """
    rng = np.random.default_rng(spec.seed)
    n, count = spec.n, spec.n_components
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    base = q @ np.diag(np.geomspace(1.0, spec.condition, n)) @ q.T
    base = (base + base.T) / 2.0
    center = rng.uniform(-1.0, 1.0, n)
    matrices = np.empty((count, n, n))
    centers = np.empty((count, n))
    for i in range(count):
        g = rng.standard_normal((n, n))
        matrices[i] = base + spec.heterogeneity * (g.T @ g) / n
        centers[i] = center + spec.heterogeneity * rng.standard_normal(n)
    box = spec.box or Box.cube(n)
    return QuadraticSumProblem(matrices, centers, box, weights=weights)


def logistic_component(i, x, dataset):
    """(value, gradient) of the i-th logistic loss; overflow-safe margins."""
    if not 0 <= i < dataset.n_samples:
        raise IndexError(f"sample index {i} out of range [0, {dataset.n_samples})")
    rows = np.array([i], dtype=np.int64)
    return _kernels.logistic_batch_value_grad(
        dataset.indptr, dataset.indices, dataset.values, dataset.labels,
        np.asarray(x, float), rows, np.ones(1))


def nn_component(i, params, arch, dataset):
    """(value, gradient) of the i-th cross-entropy loss for flattened params."""
    if not 0 <= i < dataset.n_samples:
        raise IndexError(f"sample index {i} out of range [0, {dataset.n_samples})")
    w1, b1, w2, b2 = arch.unflatten(np.asarray(params, float))
    rows = np.array([i], dtype=np.int64)
    y01 = (dataset.labels + 1.0) / 2.0
    value, gw1, gb1, gw2, gb2 = _kernels.nn_batch_value_grad(
        dataset.indptr, dataset.indices, dataset.values, y01, w1, b1, w2, b2,
        rows, np.ones(1), clamp=CROSS_ENTROPY_CLAMP)
    return value, arch.flatten(gw1, gb1, gw2, gb2)


def default_initial_point(box, stream, radius=0.01):
    """Uniform draw from [-radius, radius]^n (the "init" stream), projected."""
    return project(stream.uniform(-radius, radius, box.n), box)
