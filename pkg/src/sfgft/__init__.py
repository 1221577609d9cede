"""Sampling-set-adaptive graph Fourier transforms with spectral folding.

The package covers four layers: the folded transform itself (core),
interpolators and error analysis (reconstruct), sampling-set selection and
sensor partitioning (sampling), and a synthetic spatial-process experiment
harness (experiment). File codecs live in io, the command-line interface
in cli.
"""

from .core import (
    DEFAULT_BAND_TOL,
    InnerProduct,
    SamplingSet,
    SFBasis,
    VariationOperator,
    add_ridge,
    analyze,
    band_split,
    build_inner_product,
    compute_sf_gft,
    fixed_gft,
    synthesize,
)
from .errors import (
    CholeskyFailure,
    DimensionMismatch,
    EigFailure,
    EmptyPartition,
    InfeasibleSize,
    MatrixFormatError,
    NumericalError,
    SfgftError,
    SingularBlock,
    SingularCovariance,
    SingularNormalMatrix,
    TooLarge,
    ValidationError,
    ZeroSignal,
)
from .experiment import (
    BandwidthCurve,
    ExperimentArtifacts,
    ExperimentConfig,
    FrequencyCurves,
    GPField,
    ResultRow,
    ResultTable,
    build_graph,
    estimate_bandwidth,
    frequency_curves,
    gen_field,
    gp_covariance,
    run_table1,
    sample_gp,
    draw_test_signals,
)
from .reconstruct import (
    ErrMetricReport,
    HighBandCovarianceReport,
    ReconstructionReport,
    bandlimited_interpolate,
    err_metric,
    error_decomposition,
    high_freq_covariance_check,
    mmse_estimate,
    mmse_spectral,
    reconstruction_report,
    sf_interpolate,
    sf_interpolation_matrix,
    snr_db_from_err,
)
from .sampling import (
    Partition,
    SamplingObjective,
    approx_objective,
    brute_force_select,
    exact_objective,
    greedy_select,
    partition_baseline,
    partition_greedy,
)
from .verify import verification_report

__version__ = "0.1.0"
