"""netreduce: structure-preserving reduction of networked dynamical systems.

Pipeline: spectral clustering of the graph Laplacian identifies coherent
node groups, each group is replaced by its harmonic aggregate dynamics, and
a refined spectral embedding yields the coupling matrix of a small reduced
network with the same feedback structure as the original.
"""

__version__ = "0.1.0"

from ._kernels import USING_NUMBA
from .errors import (
    ConfigError,
    CouplingVanishes,
    DegenerateEmbedding,
    DisconnectedGraph,
    Diverged,
    EmptyBlock,
    GridMismatch,
    IllPosed,
    ImproperTF,
    KTooLarge,
    NearSingular,
    NetreduceError,
    NotOrthonormal,
    NotPassiveOnGrid,
    NotSymmetric,
    PoleAtS,
    RankDeficientWarning,
    ReductionFailed,
    SingularS,
    TiedSpectrumWarning,
    ZeroNumerator,
)
from .evaluation import (
    ErrorReport,
    FreqGrid,
    band_error,
    eval_t_hat_k,
    eval_t_k,
    eval_t_yu,
    hinf_grid,
    spectral_norm,
    theorem1_bound,
)
from .graphs import (
    BlockSpectrum,
    Partition,
    WsbmParams,
    block_spectrum_oracle,
    concentration_stat,
    expected_laplacian,
    laplacian,
    sample_adjacency,
)
from .reduction import (
    RefinementResult,
    ReducedModel,
    block_ideal_check,
    reduced_laplacian,
    refine_embedding,
    run_algorithm_1,
)
from .simulate import (
    ComparisonReport,
    SimResult,
    StateSpace,
    aggregate_rational,
    broadcast_outputs,
    close_loop,
    compare_responses,
    realize,
    realize_reduced,
    step_response,
)
from .spectral import (
    SinThetaReport,
    SpectralData,
    bottom_k_eig,
    cluster_embedding,
    sin_theta,
    wcss_of,
)
from .transfer import (
    AggregateEvaluator,
    NetworkModel,
    PassivityReport,
    RationalTF,
    aggregate_tf,
    first_order_swing,
    log_grid,
    passivity_check,
    sample_swing_nodes,
    tf_eval,
)
