from .expm import matrix_exponential
from .flow_handle import (FlowBase, InnerFlow, CocyclePerturbedFlow, TabulatedFlow, ConjugatedFlow,
                          identity_flow, hamiltonian_flow, eval_flow, flow_superoperator)
from .growth import GrowthBound, growth_bound, flow_norms, refine_grid, bound_holds, uniform_continuity_modulus
from .generator import generator_superop, DEFAULT_H_STEP
