"""Hot batched-oracle kernels: numba-jitted loops with a pure-numpy fallback.

The numba path is used when numba imports cleanly; set ``ASBOX_DISABLE_NUMBA=1``
to force the numpy path (``benchmarks/bench_kernels.py`` times both). All
kernels take CSR arrays (indptr/indices/values, 0-based), a ``rows`` index
array selecting samples (repeats allowed), and a ``scale`` array aligned with
``rows`` (1/B for mini-batch means, w_i for the exact weighted sum), so a
single kernel serves both estimator modes.
"""

import os

import numpy as np

__all__ = [
    "NUMBA_ENABLED",
    "logistic_batch_value",
    "logistic_batch_value_grad",
    "nn_batch_value",
    "nn_batch_value_grad",
]


def _log1pexp(z):
    # log(1 + exp(z)) without overflow for large |z|
    out = np.empty_like(z)
    pos = z > 0
    out[pos] = z[pos] + np.log1p(np.exp(-z[pos]))
    out[~pos] = np.log1p(np.exp(z[~pos]))
    return out


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _flatten_rows(indptr, rows):
    """Flat CSR positions for a batch of rows plus the owning-segment ids."""
    starts = indptr[rows]
    lens = indptr[rows + 1] - starts
    total = int(lens.sum())
    seg = np.repeat(np.arange(rows.shape[0]), lens)
    pos = np.arange(total) - np.repeat(np.cumsum(lens) - lens, lens)
    flat = starts[seg] + pos
    return flat, seg


def _row_dots(indptr, indices, values, x, rows):
    flat, seg = _flatten_rows(indptr, rows)
    prods = values[flat] * x[indices[flat]]
    return np.bincount(seg, weights=prods, minlength=rows.shape[0]), flat, seg


def logistic_batch_value_numpy(indptr, indices, values, labels, x, rows, scale):
    dots, _, _ = _row_dots(indptr, indices, values, x, rows)
    margins = labels[rows] * dots
    return float(np.dot(scale, _log1pexp(-margins)))


def logistic_batch_value_grad_numpy(indptr, indices, values, labels, x, rows, scale):
    dots, flat, seg = _row_dots(indptr, indices, values, x, rows)
    b = labels[rows]
    margins = b * dots
    value = float(np.dot(scale, _log1pexp(-margins)))
    coef = -scale * b * _sigmoid(-margins)
    grad = np.bincount(
        indices[flat], weights=coef[seg] * values[flat], minlength=x.shape[0]
    )
    return value, grad


def _densify(indptr, indices, values, rows, n_features):
    flat, seg = _flatten_rows(indptr, rows)
    dense = np.zeros((rows.shape[0], n_features))
    dense[seg, indices[flat]] = values[flat]
    return dense


def nn_batch_value_numpy(indptr, indices, values, y01, w1, b1, w2, b2, rows, scale,
                         clamp=1e-12):
    a = _densify(indptr, indices, values, rows, w1.shape[1])
    h1 = np.tanh(a @ w1.T + b1)
    yhat = np.clip(_sigmoid(h1 @ w2 + b2), clamp, 1.0 - clamp)
    y = y01[rows]
    losses = -y * np.log(yhat) - (1.0 - y) * np.log(1.0 - yhat)
    return float(np.dot(scale, losses))


def nn_batch_value_grad_numpy(indptr, indices, values, y01, w1, b1, w2, b2, rows,
                              scale, clamp=1e-12):
    a = _densify(indptr, indices, values, rows, w1.shape[1])
    z1 = a @ w1.T + b1
    h1 = np.tanh(z1)
    yhat = np.clip(_sigmoid(h1 @ w2 + b2), clamp, 1.0 - clamp)
    y = y01[rows]
    losses = -y * np.log(yhat) - (1.0 - y) * np.log(1.0 - yhat)
    value = float(np.dot(scale, losses))
    dz2 = scale * (yhat - y)
    gw2 = dz2 @ h1
    gb2 = float(dz2.sum())
    dz1 = np.outer(dz2, w2) * (1.0 - h1 * h1)
    gw1 = dz1.T @ a
    gb1 = dz1.sum(axis=0)
    return value, gw1, gb1, gw2, gb2


_DISABLED = os.environ.get("ASBOX_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("disabled via ASBOX_DISABLE_NUMBA")
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

if NUMBA_ENABLED:

    @njit(cache=True)
    def _log1pexp_s(z):
        if z > 0.0:
            return z + np.log1p(np.exp(-z))
        return np.log1p(np.exp(z))

    @njit(cache=True)
    def _sigmoid_s(z):
        if z >= 0.0:
            return 1.0 / (1.0 + np.exp(-z))
        e = np.exp(z)
        return e / (1.0 + e)

    @njit(cache=True)
    def logistic_batch_value_numba(indptr, indices, values, labels, x, rows, scale):
        total = 0.0
        for r in range(rows.shape[0]):
            i = rows[r]
            dot = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                dot += values[p] * x[indices[p]]
            total += scale[r] * _log1pexp_s(-labels[i] * dot)
        return total

    @njit(cache=True)
    def logistic_batch_value_grad_numba(indptr, indices, values, labels, x, rows,
                                        scale):
        total = 0.0
        grad = np.zeros(x.shape[0])
        for r in range(rows.shape[0]):
            i = rows[r]
            dot = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                dot += values[p] * x[indices[p]]
            m = labels[i] * dot
            total += scale[r] * _log1pexp_s(-m)
            coef = -scale[r] * labels[i] * _sigmoid_s(-m)
            for p in range(indptr[i], indptr[i + 1]):
                grad[indices[p]] += coef * values[p]
        return total, grad

    @njit(cache=True)
    def nn_batch_value_numba(indptr, indices, values, y01, w1t, b1, w2, b2,
                             rows, scale, clamp):
        # transposed first layer (features x hidden): per nonzero the hidden
        # slice w1t[c, :] is contiguous and SIMD-friendly
        h = w1t.shape[1]
        total = 0.0
        z1 = np.empty(h)
        for r in range(rows.shape[0]):
            i = rows[r]
            for j in range(h):
                z1[j] = b1[j]
            for p in range(indptr[i], indptr[i + 1]):
                c = indices[p]
                v = values[p]
                for j in range(h):
                    z1[j] += w1t[c, j] * v
            z2 = b2
            for j in range(h):
                z2 += w2[j] * np.tanh(z1[j])
            yhat = _sigmoid_s(z2)
            if yhat < clamp:
                yhat = clamp
            elif yhat > 1.0 - clamp:
                yhat = 1.0 - clamp
            y = y01[i]
            total += scale[r] * (-y * np.log(yhat) - (1.0 - y) * np.log(1.0 - yhat))
        return total

    @njit(cache=True)
    def nn_batch_value_grad_numba(indptr, indices, values, y01, w1t, b1, w2, b2,
                                  rows, scale, clamp):
        h = w1t.shape[1]
        total = 0.0
        gw1t = np.zeros_like(w1t)
        gb1 = np.zeros_like(b1)
        gw2 = np.zeros_like(w2)
        gb2 = 0.0
        z1 = np.empty(h)
        h1 = np.empty(h)
        dz1 = np.empty(h)
        for r in range(rows.shape[0]):
            i = rows[r]
            lo, hi = indptr[i], indptr[i + 1]
            for j in range(h):
                z1[j] = b1[j]
            for p in range(lo, hi):
                c = indices[p]
                v = values[p]
                for j in range(h):
                    z1[j] += w1t[c, j] * v
            z2 = b2
            for j in range(h):
                h1[j] = np.tanh(z1[j])
                z2 += w2[j] * h1[j]
            yhat = _sigmoid_s(z2)
            if yhat < clamp:
                yhat = clamp
            elif yhat > 1.0 - clamp:
                yhat = 1.0 - clamp
            y = y01[i]
            total += scale[r] * (-y * np.log(yhat) - (1.0 - y) * np.log(1.0 - yhat))
            dz2 = scale[r] * (yhat - y)
            gb2 += dz2
            for j in range(h):
                gw2[j] += dz2 * h1[j]
                dz1[j] = dz2 * w2[j] * (1.0 - h1[j] * h1[j])
                gb1[j] += dz1[j]
            for p in range(lo, hi):
                c = indices[p]
                v = values[p]
                for j in range(h):
                    gw1t[c, j] += dz1[j] * v
        return total, gw1t, gb1, gw2, gb2

    logistic_batch_value = logistic_batch_value_numba
    logistic_batch_value_grad = logistic_batch_value_grad_numba

    def nn_batch_value(indptr, indices, values, y01, w1, b1, w2, b2, rows, scale,
                       clamp=1e-12):
        w1t = np.ascontiguousarray(w1.T)
        return nn_batch_value_numba(indptr, indices, values, y01, w1t, b1, w2,
                                    b2, rows, scale, clamp)

    def nn_batch_value_grad(indptr, indices, values, y01, w1, b1, w2, b2, rows,
                            scale, clamp=1e-12):
        w1t = np.ascontiguousarray(w1.T)
        total, gw1t, gb1, gw2, gb2 = nn_batch_value_grad_numba(
            indptr, indices, values, y01, w1t, b1, w2, b2, rows, scale, clamp)
        return total, np.ascontiguousarray(gw1t.T), gb1, gw2, gb2

else:
    logistic_batch_value = logistic_batch_value_numpy
    logistic_batch_value_grad = logistic_batch_value_grad_numpy
    nn_batch_value = nn_batch_value_numpy
    nn_batch_value_grad = nn_batch_value_grad_numpy
