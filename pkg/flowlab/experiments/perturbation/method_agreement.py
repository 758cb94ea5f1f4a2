import logging
import numpy as np
from ..task_base import TaskExperiment
from ...util.cocycle import make_cocycle
from ...util.visualize import show_cocycle_norms

logger = logging.getLogger(__name__)

class MethodAgreement(TaskExperiment):
    """u_t^P by every applicable method on the time grid; each row reports the worst gap to the other methods."""
    task            = "perturb"
    columns         = ("t", "method", "norm_u", "discrepancy", "pass")
    residual_column = "discrepancy"

    def __init__(self, scenario):
        super().__init__(scenario)
        self.methods = ("dyson", "ode") + (("closed_form",) if scenario.flow.is_inner else ())
        self.cocycles = {method: make_cocycle(method, scenario.flow, scenario.perturbation) for method in self.methods}
        for t in scenario.time_grid:
            self.submit(self._evaluate, t=float(t))

    def _evaluate(self, job):
        return {method: u.at(job.t) for method, u in self.cocycles.items()}

    def analyze(self):
        table = self.new_table()
        tol = self.scenario.tolerances["method_agreement"]
        self.norms = {method: [] for method in self.methods}
        self.times = []
        for job in self.finished_jobs():
            self.times.append(job.t)
            for method in self.methods:
                u = job.result[method]
                others = [np.linalg.norm(u - job.result[m]) for m in self.methods if m != method]
                discrepancy = float(max(others)) if others else 0.
                self.norms[method].append(float(np.linalg.norm(u)))
                table.add_row(t=job.t, method=method, norm_u=self.norms[method][-1],
                              discrepancy=discrepancy, **{"pass": discrepancy <= tol})
        return table

    def visualize(self, path=None):
        show_cocycle_norms(self.times, self.norms, path=path)
