"""Resonance spectra of rational Anosov torus maps.

Construct hyperbolic rational maps of the complex 2-torus as generator words,
predict their full resonance spectrum in closed form from fixed-point data,
and verify the prediction against truncated composition-operator matrices on
anisotropically weighted Fourier bases.
"""

__version__ = "0.1.0"

from .map_algebra import (
    INF,
    Atom,
    IndeterminatePointError,
    MapWord,
    PoleInChainError,
    TorusPoint,
    WordSyntaxError,
    atom_F,
    atom_Finv,
    atom_G,
    atom_I,
    atom_R,
    complex_jacobian,
    concat,
    evaluate,
    evaluate_lifted,
    inverse,
    lifted_jacobian,
    linear_part,
    orientation,
    parse_word,
    psi_word,
    simplify,
    u_block,
    word_power,
    word_to_text,
    xi_word,
)
from .cone_geometry import QuadrantWeight
from .fixed_points import (
    FixedPointData,
    FixedPointError,
    FixedPointRecord,
    all_fixed_point_data,
    sector_fixed_point,
    verify_conjugate_pairs,
)
from .gl2z import (
    HomotopicMap,
    StandardForm,
    TargetInfeasible,
    build_homotopic_map,
    is_hyperbolic,
    matrix_to_word,
    random_hyperbolic,
    reduce,
)
from .resonance_theory import (
    EigenvalueEntry,
    SpectrumModel,
    closed_form_multipliers_psi,
    closed_trace,
    counting_function,
    decay_classification,
    embedding_eta_formula,
    embedding_gaps,
    embedding_singular_values,
    enumerate_eigenvalues,
    fit_stretched_rate,
    leading_moduli,
    psi_cases,
    spectral_determinant,
    spectrum_model_from_fixed_points,
    spectrum_model_from_word,
    spectrum_model_psi,
)
from .operator_numerics import (
    AssembledOperator,
    MatchReport,
    TruncationSizeError,
    assemble_operator,
    match_spectra,
    numeric_trace_power,
    operator_spectrum,
    write_spectrum_csv,
)
from .dynamics_checks import (
    CertificateReport,
    CertificationError,
    auto_weight,
    check_psec,
    find_connecting_torus,
    is_area_preserving,
    resolve_cases,
    verify_reversing_symmetry,
)

__all__ = [
    "INF",
    "AssembledOperator",
    "Atom",
    "CertificateReport",
    "CertificationError",
    "EigenvalueEntry",
    "FixedPointData",
    "FixedPointError",
    "FixedPointRecord",
    "HomotopicMap",
    "IndeterminatePointError",
    "MapWord",
    "MatchReport",
    "PoleInChainError",
    "QuadrantWeight",
    "SpectrumModel",
    "StandardForm",
    "TargetInfeasible",
    "TorusPoint",
    "TruncationSizeError",
    "WordSyntaxError",
    "all_fixed_point_data",
    "assemble_operator",
    "atom_F",
    "atom_Finv",
    "atom_G",
    "atom_I",
    "atom_R",
    "auto_weight",
    "build_homotopic_map",
    "check_psec",
    "closed_form_multipliers_psi",
    "closed_trace",
    "complex_jacobian",
    "concat",
    "counting_function",
    "decay_classification",
    "embedding_eta_formula",
    "embedding_gaps",
    "embedding_singular_values",
    "enumerate_eigenvalues",
    "evaluate",
    "evaluate_lifted",
    "find_connecting_torus",
    "fit_stretched_rate",
    "inverse",
    "is_area_preserving",
    "is_hyperbolic",
    "leading_moduli",
    "lifted_jacobian",
    "linear_part",
    "match_spectra",
    "matrix_to_word",
    "numeric_trace_power",
    "operator_spectrum",
    "orientation",
    "parse_word",
    "psi_cases",
    "psi_word",
    "random_hyperbolic",
    "reduce",
    "resolve_cases",
    "sector_fixed_point",
    "simplify",
    "spectral_determinant",
    "spectrum_model_from_fixed_points",
    "spectrum_model_from_word",
    "spectrum_model_psi",
    "u_block",
    "verify_conjugate_pairs",
    "verify_reversing_symmetry",
    "word_power",
    "word_to_text",
    "write_spectrum_csv",
    "xi_word",
]
