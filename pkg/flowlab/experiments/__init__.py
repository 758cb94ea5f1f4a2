from .task_base import TaskExperiment
from .perturbation import MethodAgreement, CocycleLaw, DistanceBounds
from .solver import GeneratorExtraction, FlowRelation
from .smoothing import MollificationProfile, CocycleDecomposition
from .verification import PropertySuite, verify_suite

EXPERIMENTS = {
    experiment.task: experiment
    for experiment in (MethodAgreement, CocycleLaw, DistanceBounds, GeneratorExtraction, FlowRelation,
                       MollificationProfile, CocycleDecomposition, PropertySuite)
}
