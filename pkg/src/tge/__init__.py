"""Exact analysis toolkit for finite graphs of circles glued along power maps.

A graph spec consists of finitely many vertex circles and edge circles; each
edge circle covers its source circle with some degree p >= 1 and winds around
its range circle q != 0 times.  The package computes path and loop counts on
the resulting compact graph, growth entropies of the associated shift maps,
and exact normal forms in the generator algebra attached to the graph.
"""

__version__ = "0.1.0"

from .graph_core import (
    CircleEdge,
    CircleGraph,
    DiscreteWord,
    Symbol,
    SymbolGraph,
    enumerate_words,
    load_graph,
    parse_graph_spec,
)
from .exact_matrix import (
    ExactMatrix,
    SmithNormalForm,
    SpectralResult,
    determinant,
    power_trace,
    row_sums,
    smith_normal_form,
    spectral_radius,
    strong_components,
)
from .laurent_algebra import GaussianRational, LaurentPoly
from .path_counting import (
    LoopCountEntry,
    LoopCountTable,
    WordWeight,
    count_range_paths,
    count_source_paths,
    covering_matrix,
    cyclic_exponent_matrix,
    edge_count_matrix,
    loop_count,
    loop_table,
    loop_weight,
    mat_Lambda,
    mat_P,
    mat_Q,
    mat_Q_abs,
    periodic_point_count,
    symbol_matrix,
    torus_solutions_bruteforce,
    winding_matrix,
    winding_matrix_abs,
    word_weight,
    word_weights,
)
from .entropy_report import (
    ConjectureVerdict,
    EntropyReport,
    LoopEntropyEstimate,
    analyze,
    block_entropy,
    block_entropy_transpose,
    conjecture_check,
    ht_phi,
    ht_psi_lower,
    loop_entropy_estimate,
)
from .bimodule_engine import (
    BasisReport,
    BimoduleVector,
    LaurentMatrix,
    act_left,
    act_left_monomial,
    act_right,
    admissible_tuples,
    basis_vector,
    inner,
    left_action_block,
    left_action_matrix,
    monomial_vector,
    psi_embed,
    std_basis,
    tuple_source,
    verify_basis,
)
from .monomial_rewriter import (
    ChiResult,
    MatrixUnitReport,
    MonomialSum,
    MonomialTerm,
    chi_m,
    matrix_to_sum,
    matrix_unit_check,
    normal_equal,
    normalize,
    parse_expression,
    phi,
    psi_core,
    render_sum,
)
from .errors import (
    CapExceededError,
    DegenerateLoopError,
    ExpressionSyntaxError,
    GraphFormatError,
    GraphValidationError,
    NormalizationError,
    SpectralConvergenceError,
    TgeError,
)

__all__ = [
    "BasisReport",
    "BimoduleVector",
    "CapExceededError",
    "ChiResult",
    "CircleEdge",
    "CircleGraph",
    "ConjectureVerdict",
    "DegenerateLoopError",
    "DiscreteWord",
    "EntropyReport",
    "ExactMatrix",
    "ExpressionSyntaxError",
    "GaussianRational",
    "GraphFormatError",
    "GraphValidationError",
    "LaurentMatrix",
    "LaurentPoly",
    "LoopCountEntry",
    "LoopCountTable",
    "LoopEntropyEstimate",
    "MatrixUnitReport",
    "MonomialSum",
    "MonomialTerm",
    "NormalizationError",
    "SmithNormalForm",
    "SpectralConvergenceError",
    "SpectralResult",
    "Symbol",
    "SymbolGraph",
    "TgeError",
    "WordWeight",
    "act_left",
    "act_left_monomial",
    "act_right",
    "admissible_tuples",
    "analyze",
    "basis_vector",
    "block_entropy",
    "block_entropy_transpose",
    "chi_m",
    "conjecture_check",
    "count_range_paths",
    "count_source_paths",
    "covering_matrix",
    "cyclic_exponent_matrix",
    "determinant",
    "edge_count_matrix",
    "enumerate_words",
    "ht_phi",
    "ht_psi_lower",
    "inner",
    "left_action_block",
    "left_action_matrix",
    "load_graph",
    "loop_count",
    "loop_entropy_estimate",
    "loop_table",
    "loop_weight",
    "mat_Lambda",
    "mat_P",
    "mat_Q",
    "mat_Q_abs",
    "matrix_to_sum",
    "matrix_unit_check",
    "monomial_vector",
    "normal_equal",
    "normalize",
    "parse_expression",
    "parse_graph_spec",
    "periodic_point_count",
    "phi",
    "power_trace",
    "psi_core",
    "psi_embed",
    "render_sum",
    "row_sums",
    "smith_normal_form",
    "spectral_radius",
    "std_basis",
    "strong_components",
    "symbol_matrix",
    "torus_solutions_bruteforce",
    "tuple_source",
    "verify_basis",
    "winding_matrix",
    "winding_matrix_abs",
    "word_weight",
    "word_weights",
    "__version__",
]
