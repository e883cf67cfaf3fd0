"""Table algebras, the built-in quadric rings and idempotent decompositions."""

from .idempotents import (
    ExponentFitError,
    GroupingError,
    IdempotentDecomposition,
    InvalidTableError,
    NotSemisimpleError,
    c1_spectrum,
    coarse_grouping,
    count_field_factors,
    exponent_denominator,
    fit_exponents,
    groups,
    is_semisimple,
    lattice_round,
    primitive_idempotents,
    radical_dimension,
    trace_form,
)
from .quadric import (
    builtin_quadric_table,
    coarse_idempotents,
    fine_minus_idempotents,
    fine_plus_idempotents,
    hyperplane_class,
    xi_roots,
)
from .table import (
    AlgebraElement,
    AlgebraTable,
    Failure,
    GradedBasis,
    ValidationReport,
    element_close,
    table_from_products,
    validate_table,
)
from .tableio import TableParseError, TableValidationWarning, ingest_table, parse_table, table_to_text, write_table


def multiply(t: AlgebraTable, x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return t.multiply(x, y)
