import logging
import numpy as np
from ..task_base import TaskExperiment
from ...util.algebra import identity, invert
from ...util.errors import SingularSimilarityError
from ...util.cocycle import (make_cocycle, CoboundaryCocycle, mollified_similarity, similar_cocycle,
                             differentiability_estimate, similarity_threshold, cocycle_defects)

logger = logging.getLogger(__name__)

STABILITY_T0 = 0.3
ROUGHNESS = 0.2
THRESHOLD_EPS = 1e-2

class CocycleDecomposition(TaskExperiment):
    """u_t = w v_t alpha_t(w^{-1}) for each n of n_list, with w the Gaussian average of u.

    u is the perturbation cocycle when the scenario has one, else the coboundary of 1 + 0.2 R
    for a seeded random R in the algebra.
    """
    task            = "decompose"
    columns         = ("n", "norm_w_minus_1", "stability_u", "stability_v", "defect_v", "pass")
    residual_column = "defect_v"

    def __init__(self, scenario):
        super().__init__(scenario)
        flow = scenario.flow
        if scenario.perturbation is not None:
            self.u = make_cocycle(scenario.method, flow, scenario.perturbation)
        else:
            rng = np.random.default_rng(scenario.seed)
            R = np.where(scenario.spec.mask, rng.normal(size=flow.dim*(flow.dim,)) + 1.j*rng.normal(size=flow.dim*(flow.dim,)), 0)
            self.u = CoboundaryCocycle(flow, identity(flow.dim) + ROUGHNESS*R/np.linalg.norm(R))
        grid = scenario.time_grid
        self.points = np.unique(grid[[0, len(grid)//2, -1]])
        self.stability_u = differentiability_estimate(self.u, STABILITY_T0).stability
        for n in scenario.n_list:
            self.submit(self._decompose, n=n)
        self.submit(self._threshold, n=None)

    def _decompose(self, job):
        flow = self.scenario.flow
        w = mollified_similarity(self.u, flow, job.n)
        v = similar_cocycle(w, self.u)
        defect = max(max(cocycle_defects(flow, v, s, t)) for s in self.points for t in self.points)
        w_inv = invert(w, SingularSimilarityError)
        roundtrip = max(np.linalg.norm(w@v.at(t)@flow.apply(t, w_inv) - self.u.at(t)) for t in self.points)
        return {
            "norm_w_minus_1" : float(np.linalg.norm(w - identity(flow.dim))),
            "stability_v"    : differentiability_estimate(v, STABILITY_T0).stability,
            "defect_v"       : float(defect),
            "roundtrip"      : float(roundtrip),
        }

    def _threshold(self, job):
        return similarity_threshold(self.u, self.scenario.flow, THRESHOLD_EPS)

    def analyze(self):
        table = self.new_table()
        tol = self.scenario.tolerances
        for job in self.finished_jobs():
            if job.n is None:
                self.information["similarity threshold"] = {"eps": THRESHOLD_EPS, "n": job.result.n,
                                                            "norm_w_minus_1": job.result.norm_w_minus_1,
                                                            "found": job.result.found}
                continue
            result = job.result
            passed = result["defect_v"] <= tol["cocycle_defect"] and result["roundtrip"] <= tol["roundtrip"]
            table.add_row(n=job.n, norm_w_minus_1=result["norm_w_minus_1"], stability_u=self.stability_u,
                          stability_v=result["stability_v"], defect_v=result["defect_v"], **{"pass": passed})
        return table
