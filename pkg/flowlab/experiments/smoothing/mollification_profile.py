import logging
import numpy as np
from ..task_base import TaskExperiment
from ...util.algebra import norm
from ...util.flow import growth_bound
from ...util.smoothing import (ProfileRow, analytic_smooth, analyticity_check, gaussian_weight_integral,
                               weight_integral_oracle, smoothing_norm_bound)
from ...util.smoothing.mollifier import GROWTH_GRID
from ...util.visualize import show_profile

logger = logging.getLogger(__name__)

ANALYTICITY_POINT = 0.5
ANALYTICITY_TOL = 1e-8

class MollificationProfile(TaskExperiment):
    """A_n of the scenario observable over n_list.

    Every row must respect the norm bound of the growth bound and settle under node doubling;
    the last row must also lie within the smoothing tolerance of A.
    """
    task            = "smooth"
    columns         = ("n", "diff_frobenius", "norm_frobenius", "quad_error_estimate", "pass")
    residual_column = "quad_error_estimate"

    def __init__(self, scenario):
        super().__init__(scenario)
        self.A     = scenario.default_observable()
        self.bound = growth_bound(scenario.flow, GROWTH_GRID)
        self.xi    = self.bound.xi if scenario.xi is None else scenario.xi
        for n in scenario.n_list:
            self.submit(self._smooth, n=n)

    def _smooth(self, job):
        return analytic_smooth(self.scenario.flow, self.A, job.n, xi=self.xi, bound=self.bound)

    def analyze(self):
        table = self.new_table()
        scale = norm(self.A)
        jobs  = self.finished_jobs()
        self.rows = []
        for k, job in enumerate(jobs):
            result = job.result
            row = ProfileRow(n=job.n, diff_frobenius=norm(result.A_n - self.A), norm_frobenius=norm(result.A_n),
                             quad_error_estimate=result.quad_error_estimate)
            self.rows.append(row)
            passed = row.quad_error_estimate <= 1e-8*max(1., row.norm_frobenius)
            passed = passed and row.norm_frobenius <= smoothing_norm_bound(self.bound, job.n, self.xi)*scale*(1 + 1e-10)
            if k == len(jobs) - 1:
                passed = passed and row.diff_frobenius <= self.scenario.tolerances["smoothing"]*scale
            table.add_row(**row._asdict(), **{"pass": passed})

        n_last = self.scenario.n_list[-1]
        self.information["xi"] = self.xi
        self.information["weight integral"] = gaussian_weight_integral(n_last, self.xi)
        self.information["weight integral oracle"] = weight_integral_oracle(n_last, self.xi)
        if self.scenario.flow.is_inner and jobs:
            mismatch = analyticity_check(self.scenario.flow, jobs[0].result, z=ANALYTICITY_POINT)
            self.information["analyticity mismatch"] = mismatch
            if mismatch > ANALYTICITY_TOL:
                logger.warning("analyticity mismatch %.3e at n=%g", mismatch, jobs[0].n)
        return table

    def visualize(self, path=None):
        show_profile(self.rows, path=path)
