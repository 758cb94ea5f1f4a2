from .similarity import (SimilaritySolution, BoundCheck, automorphism_similarity, similarity_residual,
                         check_endomorphism, check_multiplicative)
from .derivation import (DerivationSolution, inner_derivation_solve, derivation_space_basis, sample_derivation,
                         leibniz_defect)
from .flows import (extract_flow_generator, relate_flows, conjugate_flow, FlowDistanceBound, flow_distance_bound,
                    CHECK_TIMES)
