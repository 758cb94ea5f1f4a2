import logging
import numpy as np
from ..task_base import TaskExperiment
from ...util.flow import growth_bound
from ...util.cocycle import make_cocycle, cocycle_defect_grid, cocycle_path, perturbation_distance_bounds
from ...util.visualize import show_defect_grid

logger = logging.getLogger(__name__)

class CocycleLaw(TaskExperiment):
    """Cocycle defects of u^P over time_grid x time_grid, with the norm estimate at every grid time."""
    task            = "verify_cocycle"
    columns         = ("t", "method", "norm_u", "cocycle_defect_max", "lhs_cocycle", "rhs_bound", "pass")
    residual_column = "cocycle_defect_max"

    def __init__(self, scenario):
        super().__init__(scenario)
        self.submit(self._defects, method=scenario.method)

    def _defects(self, job):
        scenario = self.scenario
        u = make_cocycle(job.method, scenario.flow, scenario.perturbation)
        bound = growth_bound(scenario.flow, scenario.time_grid)
        return {
            "defects" : cocycle_defect_grid(scenario.flow, u, scenario.time_grid),
            "values"  : cocycle_path(u, scenario.time_grid),
            "bound"   : bound,
        }

    def analyze(self):
        table = self.new_table()
        scenario = self.scenario
        tol = scenario.tolerances["cocycle_defect"]
        self.defects = None
        for job in self.finished_jobs():
            defects = job.result["defects"]
            self.defects = defects.max(axis=2)
            for j, t in enumerate(scenario.time_grid):
                u = job.result["values"][j]
                estimate = perturbation_distance_bounds(scenario.flow, scenario.perturbation, t, job.result["bound"], u=u)
                defect = float(defects[:, j, :].max())
                table.add_row(t=float(t), method=job.method, norm_u=float(np.linalg.norm(u)),
                              cocycle_defect_max=defect, lhs_cocycle=estimate.lhs_cocycle, rhs_bound=estimate.rhs,
                              **{"pass": defect <= tol and estimate.lhs_cocycle <= estimate.rhs*(1 + 1e-12)})
        return table

    def visualize(self, path=None):
        if self.defects is not None:
            show_defect_grid(self.scenario.time_grid, self.defects, path=path)
