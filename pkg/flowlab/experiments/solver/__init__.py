from .generator_extraction import GeneratorExtraction, SOLVER_COLUMNS, format_spec
from .flow_relation import FlowRelation
