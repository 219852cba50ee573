"""Independence-preserving transformations and the laws they characterize.

Four distribution families (generalized inverse Gaussian, asymmetric
Laplace, shifted exponential, shifted truncated exponential), three planar
involutions with Jacobian determinant -1, the predicted input/output law
pairings, and a verification harness that checks the map identities,
density transport, output marginals, independence, and fixed-point
stationarity numerically.
"""

from .distributions import (
    DistributionSpec,
    SampleBatch,
    cdf,
    log_normalizer,
    log_pdf,
    normalizer,
    pdf,
    sample,
    support,
)
from .harness import (
    ExperimentConfig,
    default_case_params,
    emit_plot_data,
    perturbed_laws,
    run_experiment,
    write_report,
)
from .rng import make_generator, substreams, uniform_open
from .specfun import DoubleRangeError, bessel_k, log_bessel_k
from .stats import (
    TestReport,
    distance_correlation,
    independence_test,
    ks_one_sample,
)
from .theorems import (
    LawQuadruple,
    TheoremCase,
    density_transport_residual,
    fixed_point_case,
    iterate_chain,
    predicted_laws,
    swapped_case,
    transform_of,
)
from .transforms import (
    TransformSpec,
    apply,
    f1_partials,
    f3_domain_map_check,
    involution_defect,
    jacobian_det,
    region_matrix,
    region_of,
)

__version__ = "0.1.0"

__all__ = [
    "DistributionSpec",
    "SampleBatch",
    "cdf",
    "log_normalizer",
    "log_pdf",
    "normalizer",
    "pdf",
    "sample",
    "support",
    "ExperimentConfig",
    "default_case_params",
    "emit_plot_data",
    "perturbed_laws",
    "run_experiment",
    "write_report",
    "make_generator",
    "substreams",
    "uniform_open",
    "DoubleRangeError",
    "bessel_k",
    "log_bessel_k",
    "TestReport",
    "distance_correlation",
    "independence_test",
    "ks_one_sample",
    "LawQuadruple",
    "TheoremCase",
    "density_transport_residual",
    "fixed_point_case",
    "iterate_chain",
    "predicted_laws",
    "swapped_case",
    "transform_of",
    "TransformSpec",
    "apply",
    "f1_partials",
    "f3_domain_map_check",
    "involution_defect",
    "jacobian_det",
    "region_matrix",
    "region_of",
]
