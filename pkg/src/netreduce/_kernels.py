"""Hot numeric kernels: numba-jitted loops with a vectorized numpy fallback.

The jitted path is used by default whenever numba imports. Set the
environment variable ``NETREDUCE_PURE_NUMPY=1`` before import to force the
numpy path (useful for debugging and for the kernel benchmark).

Both paths implement the same algorithms (same tie-breaking, same
empty-cluster repair order); they agree to floating-point roundoff, which
``benchmarks/bench_kernels.py`` and ``tests/test_kernels.py`` check.
"""

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("NETREDUCE_PURE_NUMPY", "").strip() in ("1", "true", "yes")

try:
    if _FORCE_NUMPY:
        raise ImportError("numba disabled by NETREDUCE_PURE_NUMPY")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA


# ---------------------------------------------------------------------------
# RK4 integration of x' = A x + b (constant forcing), y = C x + d_u,
# from zero initial state. Returns (out, n_done); n_done < steps means the
# state magnitude exceeded `limit` at step n_done and integration stopped.
# ---------------------------------------------------------------------------


def _rk4_lti_loops(a, b, c, d_u, dt, steps, limit):
    n = a.shape[0]
    n_out = c.shape[0]
    x = np.zeros(n)
    out = np.zeros((steps + 1, n_out))
    out[0] = c @ x + d_u
    h2 = dt / 2.0
    h6 = dt / 6.0
    for i in range(steps):
        k1 = a @ x + b
        k2 = a @ (x + h2 * k1) + b
        k3 = a @ (x + h2 * k2) + b
        k4 = a @ (x + dt * k3) + b
        x = x + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        bad = False
        for j in range(n):
            if not np.isfinite(x[j]) or np.abs(x[j]) > limit:
                bad = True
                break
        if bad:
            return out, i
        out[i + 1] = c @ x + d_u
    return out, steps


def rk4_lti_numpy(a, b, c, d_u, dt, steps, limit):
    n = a.shape[0]
    x = np.zeros(n)
    out = np.zeros((steps + 1, c.shape[0]))
    out[0] = c @ x + d_u
    h2 = dt / 2.0
    h6 = dt / 6.0
    for i in range(steps):
        k1 = a @ x + b
        k2 = a @ (x + h2 * k1) + b
        k3 = a @ (x + h2 * k2) + b
        k4 = a @ (x + dt * k3) + b
        x = x + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)) or np.abs(x).max() > limit:
            return out, i
        out[i + 1] = c @ x + d_u
    return out, steps


# ---------------------------------------------------------------------------
# Lloyd iterations on rows of x from given initial centroids. Assignment
# ties go to the lowest cluster index; an emptied cluster is reseeded from
# the point farthest from its assigned centroid (ascending cluster order).
# Stops when the assignment is unchanged or after max_iter sweeps.
# Returns (labels, centroids, wcss, n_iter).
# ---------------------------------------------------------------------------


def _lloyd_loops(x, centroids, max_iter):
    n, dim = x.shape
    k = centroids.shape[0]
    cent = centroids.copy()
    labels = np.full(n, -1, dtype=np.int64)
    n_iter = 0
    for _ in range(max_iter):
        n_iter += 1
        new_labels = np.empty(n, dtype=np.int64)
        dist_own = np.empty(n)
        for i in range(n):
            best = 0
            best_d = np.inf
            for j in range(k):
                d = 0.0
                for t in range(dim):
                    diff = x[i, t] - cent[j, t]
                    d += diff * diff
                if d < best_d:
                    best_d = d
                    best = j
            new_labels[i] = best
            dist_own[i] = best_d
        counts = np.zeros(k, dtype=np.int64)
        for i in range(n):
            counts[new_labels[i]] += 1
        for j in range(k):
            if counts[j] == 0:
                far = -1
                far_d = -1.0
                for i in range(n):
                    if counts[new_labels[i]] > 1 and dist_own[i] > far_d:
                        far_d = dist_own[i]
                        far = i
                counts[new_labels[far]] -= 1
                new_labels[far] = j
                counts[j] = 1
                dist_own[far] = 0.0
        done = True
        for i in range(n):
            if new_labels[i] != labels[i]:
                done = False
                break
        labels = new_labels
        if done:
            break
        cent = np.zeros((k, dim))
        for i in range(n):
            for t in range(dim):
                cent[labels[i], t] += x[i, t]
        for j in range(k):
            for t in range(dim):
                cent[j, t] /= counts[j]
    wcss = 0.0
    for i in range(n):
        for t in range(dim):
            diff = x[i, t] - cent[labels[i], t]
            wcss += diff * diff
    return labels, cent, wcss, n_iter


def lloyd_numpy(x, centroids, max_iter):
    n, _ = x.shape
    k = centroids.shape[0]
    cent = centroids.copy()
    labels = np.full(n, -1, dtype=np.int64)
    n_iter = 0
    for _ in range(max_iter):
        n_iter += 1
        d2 = ((x[:, None, :] - cent[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        dist_own = d2[np.arange(n), new_labels]
        counts = np.bincount(new_labels, minlength=k)
        for j in range(k):
            if counts[j] == 0:
                movable = counts[new_labels] > 1
                far = int(np.argmax(np.where(movable, dist_own, -1.0)))
                counts[new_labels[far]] -= 1
                new_labels[far] = j
                counts[j] = 1
                dist_own[far] = 0.0
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
        cent = np.zeros_like(cent)
        np.add.at(cent, labels, x)
        cent /= counts[:, None]
    wcss = float(((x - cent[labels]) ** 2).sum())
    return labels, cent, wcss, n_iter


if HAVE_NUMBA:
    rk4_lti = njit(cache=True)(_rk4_lti_loops)
    lloyd = njit(cache=True)(_lloyd_loops)
else:
    rk4_lti = rk4_lti_numpy
    lloyd = lloyd_numpy
