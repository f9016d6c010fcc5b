"""Gaussian toolkit for entanglement distribution through correlated lossy environments.

Covariance-matrix symplectic algebra, classification of the correlated
two-mode environment, direct and swap-based distribution protocols (closed
forms cross-checked against finite-squeezing pipelines), and a correlation
plane scanner behind the ``entdist`` CLI.
"""

from .environment import (
    BonaFideResult,
    EnvClass,
    EnvKind,
    EnvironmentParams,
    bona_fide_check,
    classify_environment,
    eb_threshold,
    eb_threshold_nbar,
    env_pts,
    is_separable,
)
from .errors import DomainError
from .protocols import (
    EprVariances,
    ProtocolResult,
    coherent_info_asymptotic,
    direct_eps_asymptotic,
    direct_output_cm,
    direct_output_closed,
    direct_output_pipeline,
    direct_spectrum_asymptotic,
    epr_variances_from_cm,
    one_mode_output_cm,
    one_mode_output_closed,
    one_mode_output_pipeline,
    run_direct,
    run_swap,
    swap_coherent_info_determinant,
    swap_conditional_cm,
    swap_conditional_pipeline,
    swap_epr_variances_asymptotic,
    swap_eps_asymptotic,
    swap_noiseless_cm,
    swap_noiseless_pipeline,
    bell_port_variances,
)
from .scanner import (
    DISTILLABLE_EPS,
    Activation,
    CellClass,
    Contour,
    Protocol,
    ScanGrid,
    ScanSpec,
    boundary_curves,
    eps_field,
    scan,
    separable_activation_exists,
)
from .symplectic import (
    CovarianceMatrix,
    EntanglementReport,
    SymplecticTransform,
    apply_symplectic,
    beam_splitter,
    coherent_information,
    entanglement_report,
    h,
    homodyne_condition,
    log_negativity,
    make_env_cm,
    make_epr_cm,
    partial_trace,
    partial_transpose,
    pts_min_eigenvalue,
    symplectic_eigenvalues,
    symplectic_eigenvalues_two_mode,
    symplectic_form,
    von_neumann_entropy,
)

__all__ = [
    "Activation",
    "BonaFideResult",
    "CellClass",
    "Contour",
    "CovarianceMatrix",
    "DISTILLABLE_EPS",
    "DomainError",
    "EntanglementReport",
    "EnvClass",
    "EnvKind",
    "EnvironmentParams",
    "EprVariances",
    "Protocol",
    "ProtocolResult",
    "ScanGrid",
    "ScanSpec",
    "SymplecticTransform",
    "apply_symplectic",
    "beam_splitter",
    "bona_fide_check",
    "boundary_curves",
    "classify_environment",
    "coherent_info_asymptotic",
    "coherent_information",
    "direct_eps_asymptotic",
    "direct_output_closed",
    "direct_output_cm",
    "direct_output_pipeline",
    "direct_spectrum_asymptotic",
    "eb_threshold",
    "eb_threshold_nbar",
    "entanglement_report",
    "env_pts",
    "epr_variances_from_cm",
    "eps_field",
    "h",
    "homodyne_condition",
    "is_separable",
    "log_negativity",
    "make_env_cm",
    "make_epr_cm",
    "one_mode_output_closed",
    "one_mode_output_cm",
    "one_mode_output_pipeline",
    "partial_trace",
    "partial_transpose",
    "pts_min_eigenvalue",
    "run_direct",
    "run_swap",
    "scan",
    "separable_activation_exists",
    "swap_coherent_info_determinant",
    "swap_conditional_cm",
    "swap_conditional_pipeline",
    "swap_epr_variances_asymptotic",
    "swap_eps_asymptotic",
    "swap_noiseless_cm",
    "swap_noiseless_pipeline",
    "bell_port_variances",
    "symplectic_eigenvalues",
    "symplectic_eigenvalues_two_mode",
    "symplectic_form",
    "von_neumann_entropy",
]
