from .common import (complex_type, as_element, identity, matrix_unit, commutator, norm,
                     smallest_singular_value, invert, parse_matrix_literal, format_matrix_literal)
from .superoperator import SuperOp, superop_norm, sampled_norm_estimate, vectorize, unvectorize
from .nest_algebra import (NestAlgebraSpec, build_nest_algebra, full_algebra, upper_triangular_algebra,
                           contains, project, commutant_basis)
