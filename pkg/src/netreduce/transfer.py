"""Rational transfer functions, node/coupling dynamics, and the network model.

A :class:`RationalTF` stores numerator and denominator coefficients in
ascending powers of ``s`` and is kept in canonical form (denominator monic,
trailing zero coefficients trimmed). :class:`NetworkModel` bundles per-node
dynamics, the coupling dynamics, and the graph Laplacian that closes the
feedback loop around them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CouplingVanishes,
    NotPassiveOnGrid,
    NotSymmetric,
    PoleAtS,
    ZeroNumerator,
)

_COEF_TOL = 1e-12


def _polyval(coeffs, s):
    """Horner evaluation of a polynomial with ascending coefficients."""
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


def _trim(coeffs):
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0.0:
        out.pop()
    return out


@dataclass(frozen=True, eq=False)
class RationalTF:
    """A proper SISO rational transfer function num(s)/den(s).

    Coefficients are real, in ascending powers of ``s``. On construction the
    denominator is trimmed and normalized to be monic, and properness
    (deg num <= deg den) is enforced. Two instances compare equal when their
    canonical coefficients agree within 1e-12.
    """

    num: tuple
    den: tuple

    def __init__(self, num, den):
        num = _trim([float(c) for c in num])
        den = _trim([float(c) for c in den])
        if not den or all(c == 0.0 for c in den):
            raise ValueError("denominator must have a nonzero coefficient")
        if len(num) > len(den):
            raise ValueError(
                f"improper transfer function: deg(num)={len(num) - 1} > deg(den)={len(den) - 1}"
            )
        lead = den[-1]
        num = tuple(c / lead for c in num)
        den = tuple(c / lead for c in den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __eq__(self, other):
        if not isinstance(other, RationalTF):
            return NotImplemented
        return _coeffs_close(self.num, other.num) and _coeffs_close(self.den, other.den)

    __hash__ = None

    @property
    def degree(self):
        return len(self.den) - 1

    def __call__(self, s):
        return tf_eval(self, s)

    def inverse_at(self, s):
        """Evaluate 1/g at ``s`` = den(s)/num(s); raises PoleAtS at zeros of g."""
        nv = _polyval(self.num, s)
        if abs(nv) <= 1e-14 * max(abs(c) for c in self.num):
            raise PoleAtS(f"inverse dynamics has a pole at s={s}")
        return _polyval(self.den, s) / nv

    def to_dict(self):
        return {"num": list(self.num), "den": list(self.den)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["num"], d["den"])


def _coeffs_close(a, b):
    m = max(len(a), len(b))
    a = list(a) + [0.0] * (m - len(a))
    b = list(b) + [0.0] * (m - len(b))
    return all(abs(x - y) <= _COEF_TOL for x, y in zip(a, b))


def tf_eval(tf, s):
    """Evaluate ``tf`` at complex ``s`` by Horner's rule on both polynomials.

    Raises
    ------
    PoleAtS
        If |den(s)| falls below 1e-14 times the largest denominator
        coefficient magnitude, signalling evaluation at or near a pole.
    """
    dv = _polyval(tf.den, s)
    if abs(dv) <= 1e-14 * max(abs(c) for c in tf.den):
        raise PoleAtS(f"evaluation at or near a pole: s={s}")
    return _polyval(tf.num, s) / dv


class AggregateEvaluator:
    """Pointwise evaluator of the harmonic aggregate of a node group.

    Evaluates ``(sum_i 1/g_i(s))^-1`` without forming a common denominator;
    the evaluation-based representation is the contract. Callable and safe
    to share across threads.
    """

    def __init__(self, members):
        members = tuple(members)
        if not members:
            raise ValueError("aggregate of an empty group")
        for i, g in enumerate(members):
            if all(c == 0.0 for c in g.num):
                raise ZeroNumerator(f"member {i} has zero numerator; inverse undefined")
        self.members = members

    def __call__(self, s):
        total = 0j
        for g in self.members:
            total += g.inverse_at(s)
        if total == 0:
            raise PoleAtS(f"aggregate has a pole at s={s}")
        return 1.0 / total

    def __len__(self):
        return len(self.members)


def aggregate_tf(members):
    """Build the aggregate-dynamics evaluator for a group of transfer functions."""
    return AggregateEvaluator(members)


def first_order_swing(m, d):
    """First-order swing node 1/(m s + d); output strictly passive for d > 0."""
    if m <= 0 or d <= 0:
        raise ValueError("swing node requires m > 0 and d > 0")
    return RationalTF((1.0,), (d, m))


def sample_swing_nodes(n, rng, m_range=(1.0, 3.0), d_range=(0.5, 1.5)):
    """Draw ``n`` first-order swing nodes with uniform coefficients.

    Returns (nodes, m, d) so the analytic passivity certificate
    gamma = 1/min(d) stays available to callers.
    """
    m = rng.uniform(m_range[0], m_range[1], size=n)
    d = rng.uniform(d_range[0], d_range[1], size=n)
    nodes = tuple(first_order_swing(mi, di) for mi, di in zip(m, d))
    return nodes, m, d


@dataclass(frozen=True, eq=False)
class NetworkModel:
    """Nodes G(s) = diag{g_i}, coupling f(s), and Laplacian L of the loop."""

    nodes: tuple
    coupling: RationalTF
    laplacian: np.ndarray = field(repr=False)

    def __init__(self, nodes, coupling, laplacian):
        nodes = tuple(nodes)
        lap = np.array(laplacian, dtype=float)
        n = len(nodes)
        if n < 2:
            raise ValueError("network needs at least two nodes")
        if lap.shape != (n, n):
            raise ValueError(f"laplacian shape {lap.shape} does not match {n} nodes")
        scale = max(1.0, np.abs(lap).max())
        if np.abs(lap - lap.T).max() > 1e-12 * scale:
            raise NotSymmetric("laplacian is not symmetric")
        if np.abs(lap.sum(axis=1)).max() > 1e-10 * n * scale:
            raise ValueError("laplacian row sums are not zero")
        off = lap - np.diag(np.diag(lap))
        if off.max() > 1e-12 * scale:
            raise ValueError("laplacian has positive off-diagonal entries")
        lap.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "laplacian", lap)

    @property
    def n(self):
        return len(self.nodes)


@dataclass(frozen=True, eq=False)
class PassivityReport:
    """Grid certificate for passivity/boundedness quantities.

    gamma bounds |g_i(jw)|^2 / Re(g_i(jw)) over nodes and grid, m_eta bounds
    |1/g_i(jw)|, f_lower is the minimum coupling magnitude. This is a grid
    certificate, not a proof: quantities are tested on finitely many
    frequencies only.
    """

    gamma: float
    m_eta: float
    f_lower: float
    eta: float
    grid: np.ndarray = field(repr=False)
    coupling_real_on_axis: bool = True
    coupling_max_imag: float = 0.0

    def __post_init__(self):
        if not (self.gamma > 0 and self.m_eta > 0 and self.f_lower > 0):
            raise ValueError("gamma, m_eta and f_lower must be positive")
        g = np.asarray(self.grid, dtype=float)
        if g.size == 0 or np.any(np.diff(g) <= 0):
            raise ValueError("grid must be nonempty and strictly increasing")


def log_grid(omega_min, omega_max, n_points):
    """Strictly increasing logarithmic frequency grid."""
    if not (omega_min > 0 and omega_max > omega_min):
        raise ValueError("need 0 < omega_min < omega_max")
    if n_points < 2:
        raise ValueError("need at least two grid points")
    return np.logspace(np.log10(omega_min), np.log10(omega_max), n_points)


def passivity_check(model, eta, grid_size, omega_min=1e-3):
    """Numeric passivity/boundedness certificate on a log frequency grid.

    Sweeps ``omega in [omega_min, eta]`` (omega_min excludes a coupling pole
    at the origin, e.g. f = 1/s) with at most ``grid_size`` points, targeting
    200 points per decade. Raises NotPassiveOnGrid when some node has
    Re(g(jw)) <= 0 on the grid and CouplingVanishes when the coupling
    magnitude estimate drops below 1e-12.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    decades = np.log10(eta / omega_min)
    n_points = int(min(grid_size, max(2, round(200 * decades))))
    grid = log_grid(omega_min, eta, n_points)

    gamma = 0.0
    m_eta = 0.0
    for i, g in enumerate(model.nodes):
        vals = np.array([tf_eval(g, 1j * w) for w in grid])
        re = vals.real
        if np.any(re <= 0):
            w_bad = grid[np.argmax(re <= 0)]
            raise NotPassiveOnGrid(f"node {i}: Re(g(jw)) <= 0 at omega={w_bad:g}")
        gamma = max(gamma, float(np.max(np.abs(vals) ** 2 / re)))
        m_eta = max(m_eta, float(np.max(1.0 / np.abs(vals))))

    f_vals = np.array([tf_eval(model.coupling, 1j * w) for w in grid])
    f_lower = float(np.min(np.abs(f_vals)))
    if f_lower < 1e-12:
        raise CouplingVanishes(f"coupling magnitude {f_lower:g} below 1e-12 on grid")
    max_imag = float(np.max(np.abs(f_vals.imag)))
    real_on_axis = max_imag <= 1e-12 * max(1.0, float(np.max(np.abs(f_vals))))

    return PassivityReport(
        gamma=gamma,
        m_eta=m_eta,
        f_lower=f_lower,
        eta=float(eta),
        grid=grid,
        coupling_real_on_axis=real_on_axis,
        coupling_max_imag=max_imag,
    )
