"""Expression language for explicit form formulas and their verification."""
from .algebra import (CapabilityError, UnsupportedEntryError, WeightError, conjugate_count,
                      evaluate_formal, expand_conjugates, orbit_charpoly, single_values, sum_value, weight)
from .bindings import UnboundSymbolError, binding_set
from .parser import ParseError, parse, to_text
from .verify import (DatasetError, FormulaEntry, Report, load_dataset, parse_dataset, summary_line,
                     verify_dataset, verify_entry)

__all__ = [
    "CapabilityError", "UnsupportedEntryError", "WeightError", "conjugate_count", "evaluate_formal",
    "expand_conjugates", "orbit_charpoly", "single_values", "sum_value", "weight",
    "UnboundSymbolError", "binding_set", "ParseError", "parse", "to_text",
    "DatasetError", "FormulaEntry", "Report", "load_dataset", "parse_dataset", "summary_line",
    "verify_dataset", "verify_entry",
]
