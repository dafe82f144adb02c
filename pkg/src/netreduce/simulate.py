"""Time-domain step-response simulation of full and reduced networks.

Builds state-space realizations of the feedback loop y = G(u - f L y) and
integrates step responses with fixed-step RK4 (numba kernel with a numpy
fallback, see _kernels). The reduced network is simulated in its own k-node
form and compared to the full response after broadcasting through the
partition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import _kernels
from .errors import Diverged, GridMismatch, IllPosed, ImproperTF
from .transfer import RationalTF


@dataclass(frozen=True, eq=False)
class StateSpace:
    """State-space system x' = A x + B u, y = C x + D u."""

    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)

    def __post_init__(self):
        a, b, c, d = (
            np.array(m, dtype=float, ndmin=2) for m in (self.a, self.b, self.c, self.d)
        )
        ns, ni, no = a.shape[0], b.shape[1], c.shape[0]
        if a.shape != (ns, ns) or b.shape != (ns, ni) or c.shape != (no, ns) or d.shape != (no, ni):
            raise ValueError("inconsistent state-space dimensions")
        for m in (a, b, c, d):
            if m.size and not np.all(np.isfinite(m)):
                raise ValueError("state-space matrices must be finite")
        for name, m in (("a", a), ("b", b), ("c", c), ("d", d)):
            object.__setattr__(self, name, m)

    @property
    def dims(self):
        """(states, inputs, outputs)."""
        return (self.a.shape[0], self.b.shape[1], self.c.shape[0])

    def freq_response(self, s):
        """C (sI - A)^-1 B + D at a complex point."""
        ns = self.a.shape[0]
        if ns == 0:
            return self.d.astype(complex)
        x = np.linalg.solve(s * np.eye(ns) - self.a, self.b.astype(complex))
        return self.c @ x + self.d


def realize(tf):
    """Controllable canonical realization of a proper rational function.

    The strictly proper part lands in (A, B, C); the constant part in D.
    A constant gain yields an empty state.
    """
    if not isinstance(tf, RationalTF):
        raise ImproperTF("realize expects a RationalTF")
    den = np.asarray(tf.den, dtype=float)  # monic by construction
    num = np.zeros_like(den)
    num[: len(tf.num)] = tf.num
    r = len(den) - 1
    d_gain = num[r]
    num_sp = num[:r] - d_gain * den[:r]
    if r == 0:
        z = np.zeros((0, 0))
        return StateSpace(a=z, b=np.zeros((0, 1)), c=np.zeros((1, 0)), d=[[d_gain]])
    a = np.zeros((r, r))
    a[:-1, 1:] = np.eye(r - 1)
    a[-1, :] = -den[:r]
    b = np.zeros((r, 1))
    b[-1, 0] = 1.0
    c = num_sp.reshape(1, r)
    return StateSpace(a=a, b=b, c=c, d=[[d_gain]])


def block_diag_nodes(nodes):
    """Block-diagonal MIMO system of per-node SISO realizations."""
    systems = [realize(g) if isinstance(g, RationalTF) else g for g in nodes]
    n = len(systems)
    ns = sum(s.a.shape[0] for s in systems)
    a = np.zeros((ns, ns))
    b = np.zeros((ns, n))
    c = np.zeros((n, ns))
    d = np.zeros((n, n))
    pos = 0
    for i, s in enumerate(systems):
        r = s.a.shape[0]
        a[pos : pos + r, pos : pos + r] = s.a
        b[pos : pos + r, i] = s.b[:, 0]
        c[i, pos : pos + r] = s.c[0]
        d[i, i] = s.d[0, 0]
        pos += r
    return StateSpace(a=a, b=b, c=c, d=d)


def coupling_block(coupling, l):
    """MIMO realization of y -> f(s) (L y): one coupling copy per channel.

    For an integrator coupling f = 1/s this is the minimal block
    (A = 0_{n x n}, B = L, C = I, D = 0).
    """
    f_ss = realize(coupling) if isinstance(coupling, RationalTF) else coupling
    l = np.asarray(l, dtype=float)
    n = l.shape[0]
    r = f_ss.a.shape[0]
    eye = np.eye(n)
    a = np.kron(eye, f_ss.a)
    b = np.kron(eye, f_ss.b) @ l
    c = np.kron(eye, f_ss.c)
    d = float(f_ss.d[0, 0]) * l
    return StateSpace(a=a, b=b, c=c, d=d)


def close_loop(nodes, coupling, l):
    """Closed loop u -> y of the negative feedback y = G(u - f L y).

    ``nodes`` is a sequence of RationalTF or SISO StateSpace systems,
    ``coupling`` the coupling dynamics, ``l`` the Laplacian. Raises IllPosed
    when the feedthrough loop I + D_G D_H is singular.
    """
    plant = block_diag_nodes(nodes) if not isinstance(nodes, StateSpace) else nodes
    fb = coupling_block(coupling, l)
    n = plant.c.shape[0]
    w = np.eye(n) + plant.d @ fb.d
    if np.linalg.cond(w) > 1e12:
        raise IllPosed("feedthrough loop matrix is singular")
    w_inv = np.linalg.solve(w, np.eye(n))

    ag, bg, cg, dg = plant.a, plant.b, plant.c, plant.d
    ah, bh, ch, dh = fb.a, fb.b, fb.c, fb.d
    # y = w_inv (cg x_g - dg ch x_h + dg u)
    c_g = w_inv @ cg
    c_h = -w_inv @ (dg @ ch)
    d_u = w_inv @ dg
    a = np.block(
        [
            [ag - bg @ dh @ c_g, -bg @ ch - bg @ dh @ c_h],
            [bh @ c_g, ah + bh @ c_h],
        ]
    )
    b = np.vstack([bg - bg @ dh @ d_u, bh @ d_u])
    c = np.hstack([c_g, c_h])
    return StateSpace(a=a, b=b, c=c, d=d_u)


@dataclass(frozen=True, eq=False)
class SimResult:
    """Sampled step response: uniform times and one output column per node."""

    times: np.ndarray = field(repr=False)
    outputs: np.ndarray = field(repr=False)
    input_spec: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        y = np.asarray(self.outputs, dtype=float)
        if t.ndim != 1 or y.shape[0] != t.size:
            raise ValueError("times and outputs disagree")
        dt = np.diff(t)
        if t.size > 1 and (np.any(dt <= 0) or np.abs(dt - dt[0]).max() > 1e-9 * dt[0]):
            raise ValueError("times must be strictly increasing and uniform")
        if not np.all(np.isfinite(y)):
            raise ValueError("outputs must be finite")


def step_response(sys, input_node, t_end, dt, state_limit=1e12):
    """Fixed-step RK4 step response from rest.

    The input is a unit step on ``input_node`` (zero elsewhere), applied
    from t = 0. Outputs are sampled every ``dt``. Raises Diverged when any
    state magnitude exceeds ``state_limit``.
    """
    ns, ni, _ = sys.dims
    if dt <= 0 or t_end < dt:
        raise ValueError("need dt > 0 and t_end >= dt")
    if not 0 <= input_node < ni:
        raise ValueError(f"input_node {input_node} out of range [0, {ni})")
    steps = int(round(t_end / dt))
    b = sys.b[:, input_node].copy()
    d_u = sys.d[:, input_node].copy()
    if ns == 0:
        times = np.arange(steps + 1) * dt
        outputs = np.tile(d_u, (steps + 1, 1))
        return SimResult(times=times, outputs=outputs, input_spec=f"unit step at node {input_node}")
    out, n_done = _kernels.rk4_lti(
        np.ascontiguousarray(sys.a),
        np.ascontiguousarray(b),
        np.ascontiguousarray(sys.c),
        np.ascontiguousarray(d_u),
        float(dt),
        steps,
        float(state_limit),
    )
    if n_done < steps:
        raise Diverged(f"state magnitude exceeded {state_limit:g} at t={(n_done + 1) * dt:g}")
    times = np.arange(steps + 1) * dt
    return SimResult(times=times, outputs=out, input_spec=f"unit step at node {input_node}")


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    """Per-node and per-group deviations between full and reduced responses."""

    per_node: np.ndarray
    per_group: np.ndarray
    full_l2: np.ndarray = field(repr=False, default=None)


def broadcast_outputs(reduced_outputs, partition):
    """Expand k aggregate output columns to n node columns via the partition."""
    y = np.asarray(reduced_outputs, dtype=float)
    if y.shape[1] == partition.n:
        return y
    if y.shape[1] != partition.k:
        raise GridMismatch(
            f"reduced outputs have {y.shape[1]} columns, expected k={partition.k} or n={partition.n}"
        )
    return y[:, partition.assignment]


def compare_responses(full, reduced, partition):
    """Relative L2 deviations between full node outputs and broadcast aggregates.

    Per node: ||y_i - yhat_(i)||_2 / ||y_i||_2 over the trajectory; per
    group: the maximum over member nodes. Requires matching time grids.
    """
    t_f = np.asarray(full.times)
    t_r = np.asarray(reduced.times)
    if t_f.size != t_r.size or np.abs(t_f - t_r).max() > 1e-9 * max(1.0, t_f[-1]):
        raise GridMismatch("time grids differ")
    y = np.asarray(full.outputs, dtype=float)
    yhat = broadcast_outputs(reduced.outputs, partition)
    if y.shape != yhat.shape:
        raise GridMismatch(f"output shapes differ: {y.shape} vs {yhat.shape}")
    diff = np.sqrt(((y - yhat) ** 2).sum(axis=0))
    base = np.sqrt((y**2).sum(axis=0))
    per_node = np.where(base > 0, diff / np.where(base > 0, base, 1.0), np.where(diff > 0, np.inf, 0.0))
    per_group = np.array([per_node[idx].max() for idx in partition.blocks()])
    return ComparisonReport(per_node=per_node, per_group=per_group, full_l2=base)


def aggregate_rational(members):
    """Closed-form rational aggregate (sum_i 1/g_i)^-1 of a node group.

    Forms the exact polynomial fraction sum (members rescaled to monic
    numerators to keep products well-scaled). Intended for realizing reduced
    models at desk scale; the pointwise AggregateEvaluator remains the
    evaluation contract elsewhere.
    """
    members = list(members)
    if not members:
        raise ValueError("aggregate of an empty group")
    num_total = None  # running denominator of sum(den_i/num_i)
    den_total = None  # running numerator of the sum
    for g in members:
        num = np.asarray(g.num, dtype=float)
        den = np.asarray(g.den, dtype=float)
        lead = num[np.nonzero(num)[0][-1]] if np.any(num) else None
        if lead is None:
            raise ValueError("aggregate member has zero numerator")
        num = num / lead
        den = den / lead
        if num_total is None:
            num_total, den_total = num, den
        else:
            den_total = npoly.polyadd(npoly.polymul(den_total, num), npoly.polymul(num_total, den))
            num_total = npoly.polymul(num_total, num)
    return RationalTF(num_total, den_total)


def realize_reduced(reduced):
    """Closed-loop state space of a reduced model (k aggregate nodes).

    Aggregates are realized through their closed-form rational forms; the
    frequency response of the result matches the evaluator-based reduced
    transfer matrix wherever both are defined.
    """
    agg_tfs = [aggregate_rational(a.members) for a in reduced.aggregates]
    return close_loop(agg_tfs, reduced.coupling, reduced.l_k)
