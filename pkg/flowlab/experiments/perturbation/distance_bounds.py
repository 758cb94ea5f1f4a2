import logging
import numpy as np
from ..task_base import TaskExperiment
from ...util.flow import growth_bound
from ...util.cocycle import make_cocycle, cocycle_path, perturbation_distance_bounds

logger = logging.getLogger(__name__)

class DistanceBounds(TaskExperiment):
    """Distance of the perturbed flow and cocycle from the unperturbed ones, against the exponential estimates."""
    task    = "bounds"
    columns = ("t", "method", "norm_u", "lhs_flow", "rhs_flow", "lhs_cocycle", "rhs_bound", "pass")

    def __init__(self, scenario):
        super().__init__(scenario)
        self.submit(self._bounds, method=scenario.method)

    def _bounds(self, job):
        scenario = self.scenario
        bound = growth_bound(scenario.flow, scenario.time_grid)
        u = make_cocycle(job.method, scenario.flow, scenario.perturbation)
        values = cocycle_path(u, scenario.time_grid)
        return [(float(t), u_t, perturbation_distance_bounds(scenario.flow, scenario.perturbation, t, bound, u=u_t))
                for t, u_t in zip(scenario.time_grid, values)]

    def analyze(self):
        table = self.new_table()
        for job in self.finished_jobs():
            for t, u_t, estimate in job.result:
                table.add_row(t=t, method=job.method, norm_u=float(np.linalg.norm(u_t)),
                              lhs_flow=estimate.lhs_flow, rhs_flow=estimate.rhs_flow,
                              lhs_cocycle=estimate.lhs_cocycle, rhs_bound=estimate.rhs,
                              **{"pass": estimate.passed})
        return table
