from .closed_form import closed_form_cocycle, closed_form_from_generator
from .dyson import DysonResult, dyson_cocycle, dyson_tail_bound, commutator_series, time_ordered_sum, DEFAULT_ORDER, DEFAULT_NODES
from .ode import ode_cocycle, ode_cocycle_path, DEFAULT_STEPS
from .cocycle_handle import (CocycleBase, ClosedFormCocycle, DysonCocycle, OdeCocycle, TabulatedCocycle,
                             FunctionCocycle, SimilarCocycle, CoboundaryCocycle, make_cocycle, COCYCLE_METHODS)
from .perturbation import (PerturbedFlow, perturbed_flow_eval, cocycle_defect, cocycle_defects, cocycle_defect_grid, cocycle_path,
                           PerturbationBounds, perturbation_distance_bounds, derivative_at_zero, EVAL_METHODS)
from .decomposition import (mollified_similarity, similar_cocycle, DifferentiabilityEstimate, differentiability_estimate,
                            SimilarityThreshold, similarity_threshold, rough_coboundary, DEFAULT_H_LIST)
