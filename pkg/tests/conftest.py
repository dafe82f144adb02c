import numpy as np
import pytest

from netreduce import NetworkModel, RationalTF, WsbmParams, laplacian, sample_adjacency
from netreduce.transfer import sample_swing_nodes

# block sizes, connection probabilities and weights of the synthetic
# three-group test case used throughout the suite
EQ15_SIZES = (20, 40, 20)
EQ15_Q = [[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]]
EQ15_W = [[20.0, 0.4, 0.8], [0.4, 20.0, 0.7], [0.8, 0.7, 20.0]]

COUPLING_INTEGRATOR = RationalTF((1.0,), (0.0, 1.0))  # f(s) = 1/s


@pytest.fixture(scope="session")
def eq15_params():
    return WsbmParams(EQ15_SIZES, EQ15_Q, EQ15_W)


def make_swing_model(params, seed, coupling=COUPLING_INTEGRATOR):
    """Sampled network with first-order swing nodes; returns (model, gamma)."""
    lap = laplacian(sample_adjacency(params, seed))
    rng = np.random.default_rng([seed, 1])
    nodes, _, d = sample_swing_nodes(params.n, rng)
    return NetworkModel(nodes=nodes, coupling=coupling, laplacian=lap), 1.0 / d.min()


def random_wsbm(rng, k=None, strong=True):
    """Random WSBM parameters with a positive intra/inter margin."""
    while True:
        kk = k or int(rng.integers(2, 5))
        sizes = tuple(int(s) for s in rng.integers(8, 30, size=kk))
        q = np.full((kk, kk), 0.0)
        w = np.zeros((kk, kk))
        for i in range(kk):
            for j in range(i, kk):
                if i == j:
                    q[i, i] = rng.uniform(0.6, 1.0)
                    w[i, i] = rng.uniform(5.0, 25.0)
                else:
                    q[i, j] = q[j, i] = rng.uniform(0.02, 0.1)
                    w[i, j] = w[j, i] = rng.uniform(0.05, 0.6)
        params = WsbmParams(sizes, q, w)
        b = params.b
        rho = max(sizes) / min(sizes)
        off = b.sum(axis=1) - np.diag(b)
        delta = np.diag(b).min() - 2 * rho * off.max()
        if not strong or delta > 0:
            return params
