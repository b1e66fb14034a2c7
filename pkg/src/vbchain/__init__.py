"""Spectral and simulation diagnostics for variance bounding of reversible Markov chains."""
from .errors import *  # noqa: F401,F403
from .functional import Functional, as_functional
from .kernel import (
    JointDistribution,
    ReversibleKernel,
    binomial_base,
    build_data_augmentation,
    build_example9,
    from_matrix,
    kernel_power,
    lazy_mixture,
    random_reversible_kernel,
    stationary_solve,
)
from .mh_continuous import (
    Target,
    SamplerSpec,
    check_mt_good,
    check_umid,
    langevin,
    random_walk,
    rejection_probability,
    state_dependent,
    transformed_increment_density,
)
from .mh_finite import ProposalTable, build_sub_mh, scale_proposal
from .peskun import dominates_off_diagonal, ordering_report
from .simulate import (
    Example9Walk,
    Trace,
    batch_means_variance,
    clt_diagnostic,
    replicate_sums,
    simulate_path,
)
from .spectral import Classification, SpectralDecomposition, classify, eigendecompose
from .variance import (
    asymptotic_variance_exact,
    autocovariance,
    finite_n_variance,
    variance_bound_K,
    variance_report,
)

__version__ = "0.1.0"
