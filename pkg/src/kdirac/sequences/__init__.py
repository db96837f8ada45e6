"""Explicit operator sequences for k = 2 and k = 3 and their verification."""

from .operators import (
    Erratum,
    OperatorDef,
    Term,
    apply_errata,
    dump_operator,
    dump_operators,
    load_errata,
    load_table,
    operator_def,
    parse_operators,
)
from .verify import (
    NotQPullbackError,
    SymbolMatrix,
    apply_chain,
    apply_operator,
    errata_search,
    square_convention,
    symbol_blocks,
    symbol_chain,
    symbol_matrix,
    symbolic_checks,
    verify_complex,
    verify_symbol_exactness,
)
from .words import format_element, normal_form, symbolic_composite

__all__ = [
    "Erratum",
    "OperatorDef",
    "Term",
    "apply_errata",
    "dump_operator",
    "dump_operators",
    "load_errata",
    "load_table",
    "operator_def",
    "parse_operators",
    "NotQPullbackError",
    "SymbolMatrix",
    "apply_chain",
    "apply_operator",
    "errata_search",
    "square_convention",
    "symbol_blocks",
    "symbol_chain",
    "symbol_matrix",
    "symbolic_checks",
    "verify_complex",
    "verify_symbol_exactness",
    "format_element",
    "normal_form",
    "symbolic_composite",
]
