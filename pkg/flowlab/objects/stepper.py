import logging

logger = logging.getLogger(__name__)

DEBUG_MODE = False

def set_debug_mode(mode):
    global DEBUG_MODE
    DEBUG_MODE = mode

class Stepper:
    """Wraps an ``execute(phi) -> {"score", "step", "register"}`` callable for the optimizers.

    Plain steps only count evaluations; ``callback`` steps (one per optimizer
    iteration) are recorded as a trace.
    """
    def __init__(self, execute, n_param, verbose=True):
        self.execute    = execute
        self.n_param    = n_param
        self.verbose    = verbose
        self.reset()

    def step(self, phi, evaluate=False):
        report          = self.execute(phi)
        score           = report["score"]

        if evaluate:
            self.score.append(score)
            self.phi.append(phi)
            self.iteration.append(self.step_count)
            self.register.append(report["register"])
            self.report(report)
        else:
            self.step_count += report["step"]

        return score

    def callback(self, phi):
        self.step(phi, evaluate=True)

    def reset(self):
        self.step_count = 0
        self.score      = []
        self.phi        = []
        self.iteration  = []
        self.register   = []

    def report(self, report):
        if not self.verbose:
            return
        if DEBUG_MODE:
            logger.debug("iteration [%d] %s", len(self.iteration), report)
        else:
            logger.info("iteration [%d] score %.6e", len(self.iteration), report["score"])

def test_stepper_records_callbacks():
    calls = []
    def execute(phi):
        calls.append(phi)
        return {"score": phi*phi, "step": 1, "register": {"phi": phi}}
    stepper = Stepper(execute, n_param=1, verbose=False)
    assert stepper.step(3.) == 9.
    stepper.callback(2.)
    assert stepper.step_count == 1
    assert stepper.score == [4.]
    assert stepper.register == [{"phi": 2.}]
    stepper.reset()
    assert stepper.score == [] and stepper.step_count == 0

if __name__ == "__main__":
    test_stepper_records_callbacks()
