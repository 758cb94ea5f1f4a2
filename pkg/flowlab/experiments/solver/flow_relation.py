import logging
import numpy as np
from .generator_extraction import SOLVER_COLUMNS, format_spec
from ..task_base import TaskExperiment
from ...util.algebra import SuperOp
from ...util.flow import identity_flow, growth_bound, generator_superop
from ...util.cocycle import PerturbedFlow
from ...util.solver import relate_flows, flow_distance_bound, CHECK_TIMES

logger = logging.getLogger(__name__)

BOUND_GRID = np.linspace(-1, 1, 21)

class FlowRelation(TaskExperiment):
    """P with delta_flow = delta_reference + ad P, its antisymmetry, and the distance estimate at the check times.

    A perturbed scenario flow also gets its generator shift against ad(iP) checked.
    """
    task            = "relate"
    columns         = SOLVER_COLUMNS
    residual_column = "residual"

    def __init__(self, scenario):
        super().__init__(scenario)
        self.reference = scenario.reference_flow or identity_flow(scenario.dim)
        self.submit(self._relate, op="relate_flows")
        if isinstance(scenario.flow, PerturbedFlow):
            self.submit(self._generator_shift, op="generator_shift")
        self.submit(self._distance, op="flow_distance_bound")

    def _relate(self, job):
        forward  = relate_flows(self.scenario.flow, self.reference, self.scenario.spec)
        backward = relate_flows(self.reference, self.scenario.flow, self.scenario.spec)
        return forward, float(np.linalg.norm(forward.P + backward.P))

    def _generator_shift(self, job):
        flow = self.scenario.flow
        shift = generator_superop(flow) - generator_superop(flow.base)
        return shift.distance(SuperOp.ad(1.j*flow.P))

    def _distance(self, job):
        bound = growth_bound(self.reference, BOUND_GRID)
        return [flow_distance_bound(self.scenario.flow, self.reference, t, bound) for t in CHECK_TIMES]

    def analyze(self):
        table = self.new_table()
        tol  = self.scenario.tolerances
        spec = format_spec(self.scenario.spec)
        for job in self.finished_jobs():
            if job.op == "relate_flows":
                forward, antisymmetry = job.result
                self.information["P"] = forward.P
                table.add_row(spec=spec, op=job.op, residual=forward.residual, lhs=forward.verification,
                              rhs=tol["verification"], gauge=forward.gauge,
                              **{"pass": forward.residual <= tol["residual"] and forward.verification <= tol["verification"]})
                table.add_row(spec=spec, op="antisymmetry", residual=None, lhs=antisymmetry, rhs=tol["antisymmetry"],
                              gauge=forward.gauge, **{"pass": antisymmetry <= tol["antisymmetry"]})
            elif job.op == "generator_shift":
                table.add_row(spec=spec, op=job.op, residual=None, lhs=job.result, rhs=tol["generator_shift"],
                              gauge="", **{"pass": job.result <= tol["generator_shift"]})
            else:
                for estimate in job.result:
                    table.add_row(spec=spec, op="{}(t={})".format(job.op, estimate.t), residual=None,
                                  lhs=estimate.lhs, rhs=estimate.rhs, gauge="", **{"pass": estimate.passed})
        return table
