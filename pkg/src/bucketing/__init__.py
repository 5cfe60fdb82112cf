"""Bucketing codes for the statistical high-dimensional nearest-neighbor problem."""

from .errors import (
    BucketingError,
    DimensionMismatch,
    DomainError,
    MassError,
    NegativeEntry,
    NotNormalized,
    OutOfRange,
    RoundingInfeasible,
    SupportViolation,
    TooLarge,
)
from .codes import (
    BucketingCode,
    ShellAnalytics,
    classical_code,
    code_from_descriptor,
    code_success_exact,
    code_work,
    concatenate,
    empty_code,
    full_space_code,
    shell_analytics,
    shell_capture_probability,
    shell_code,
    tensor_power,
    typeclass_code,
)
from .information import (
    AttainablePoint,
    InfoQuery,
    InfoResult,
    ScanReport,
    WorkBound,
    attainable_point,
    asymmetric_comparisons,
    conjecture_scan,
    direct_lower_bound,
    info_closed_form,
    info_numeric,
    is_subconjugate,
    subconjugate_frontier,
    work_lower_bound,
)
from .probmodel import (
    DatasetPair,
    NonnegMatrix,
    ProbabilityMatrix,
    bernoulli_matrix,
    generate_dataset,
    kl_extended,
    make_matrix,
    matrix_from_json,
    mutual_information,
    tensor,
)
from .rng import derive_rng
from .simharness import (
    ExperimentResult,
    ExponentRow,
    baseline_exponents,
    cauchy_baseline,
    exponent_table,
    run_experiment,
    sparse_hash_experiment,
    write_csv,
)

__all__ = [
    "AttainablePoint",
    "BucketingCode",
    "ExperimentResult",
    "ExponentRow",
    "InfoQuery",
    "InfoResult",
    "ScanReport",
    "ShellAnalytics",
    "WorkBound",
    "asymmetric_comparisons",
    "attainable_point",
    "baseline_exponents",
    "cauchy_baseline",
    "classical_code",
    "code_from_descriptor",
    "code_success_exact",
    "code_work",
    "concatenate",
    "conjecture_scan",
    "derive_rng",
    "direct_lower_bound",
    "empty_code",
    "exponent_table",
    "full_space_code",
    "info_closed_form",
    "info_numeric",
    "is_subconjugate",
    "run_experiment",
    "shell_analytics",
    "shell_capture_probability",
    "shell_code",
    "sparse_hash_experiment",
    "subconjugate_frontier",
    "tensor",
    "tensor_power",
    "typeclass_code",
    "work_lower_bound",
    "write_csv",
    "BucketingError",
    "DimensionMismatch",
    "DomainError",
    "MassError",
    "NegativeEntry",
    "NotNormalized",
    "OutOfRange",
    "RoundingInfeasible",
    "SupportViolation",
    "TooLarge",
    "DatasetPair",
    "NonnegMatrix",
    "ProbabilityMatrix",
    "bernoulli_matrix",
    "generate_dataset",
    "kl_extended",
    "make_matrix",
    "matrix_from_json",
    "mutual_information",
    "tensor",
]
