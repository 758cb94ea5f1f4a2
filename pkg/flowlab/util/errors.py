class FlowlabError(Exception):
    pass

class DimensionError(FlowlabError, ValueError):
    pass

class NestSpecError(FlowlabError, ValueError):
    pass

class MatrixLiteralError(FlowlabError, ValueError):
    pass

class FlowDomainError(FlowlabError, ValueError):
    """Requested time lies outside the range a flow can be evaluated on."""

class MatrixExponentialOverflow(FlowlabError, OverflowError):
    pass

class GeneratorStepError(FlowlabError):
    """Finite-difference refinement made the generator estimate worse."""

class DysonDivergenceError(FlowlabError):
    pass

class SingularCocycleError(FlowlabError):
    pass

class NotAnAutomorphismError(FlowlabError):
    pass

class SimilarityAmbiguityError(FlowlabError):
    """Null space of the similarity system is not one-dimensional."""

class NotADerivationError(FlowlabError):
    pass

class NotInnerError(FlowlabError):
    pass

class SmoothingGrowthError(FlowlabError):
    pass

class SingularSimilarityError(FlowlabError):
    pass

class ScenarioError(FlowlabError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line  = line
        where = []
        if field is not None:
            where.append("field '{}'".format(field))
        if line is not None:
            where.append("line {}".format(line))
        if where:
            message = "{} ({})".format(message, ", ".join(where))
        super().__init__(message)
