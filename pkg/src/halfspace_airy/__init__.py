"""Numerics for half-space interlacing ensembles and their Airy limits."""

from .errors import (
    BudgetError,
    ConditioningError,
    ConfigurationError,
    ConstructionError,
    DiagonalAmbiguityError,
    EvaluationError,
    HalfspaceError,
    InconsistencyError,
    InvalidInputError,
    LatticeError,
    NumericalError,
    OutputError,
    SingularityError,
    SizeLimitError,
    UsageError,
)
from .skewlin import (
    KernelValue,
    SkewMatrix,
    assemble_block_skew,
    pfaffian,
    pfaffian_bruteforce,
)
from .contour import (
    Contour,
    ContourOffsets,
    ContourPiece,
    QuadratureRule,
    integrate,
    integrate_double,
    make_circle,
    make_gamma,
    make_ray_pair,
)
from .kernels import (
    BlockKernel,
    LatticeSpec,
    ScalingParams,
    airy_embedding_kernel,
    airy_limit_scaled,
    airy_point,
    crossover_gauge,
    equal_time_limit_kernel,
    eval_G,
    eval_S,
    gauge_kernel,
    geo_process_kernel,
    kernel_airy_extended,
    kernel_cross,
    kernel_geo,
    kernel_limit,
    kernel_preN,
    scaled_gue_kernel,
)
from .fredholm import (
    GapProbabilityResult,
    ReferenceMeasure,
    UniformLattice,
    correlation_rho,
    f2_airy_reference,
    factorial_moment_predict,
    gap_discretized,
    gap_series,
)
from .ensembles import (
    BrownianEnsembleSample,
    GeomLineEnsemble,
    IncreasingPath,
    Partition,
    WindowMoments,
    empirical_onepoint,
    rescale_samples,
    run_glauber,
    sample_avoiding_rbm,
    sample_interlacing_rejection,
    sample_pfaffian_schur_glauber,
    sample_reverse_walk,
)

__version__ = "0.1.0"
