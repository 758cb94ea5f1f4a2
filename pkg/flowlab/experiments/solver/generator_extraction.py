import logging
from ..task_base import TaskExperiment
from ...util.solver import extract_flow_generator, automorphism_similarity, CHECK_TIMES

logger = logging.getLogger(__name__)

SOLVER_COLUMNS = ("spec", "op", "residual", "lhs", "rhs", "gauge", "pass")

def format_spec(spec) -> str:
    return "({}, [{}])".format(spec.dim, ", ".join(str(d) for d in spec.nest_dims))

class GeneratorExtraction(TaskExperiment):
    """Inner generator of the scenario flow, and the similarity implementing alpha_t at the check times."""
    task            = "extract"
    columns         = SOLVER_COLUMNS
    residual_column = "residual"

    def __init__(self, scenario):
        super().__init__(scenario)
        self.submit(self._extract, op="extract_flow_generator")
        for t in CHECK_TIMES:
            self.submit(self._similarity, op="automorphism_similarity(t={})".format(t), t=t)

    def _extract(self, job):
        return extract_flow_generator(self.scenario.flow, self.scenario.spec)

    def _similarity(self, job):
        return automorphism_similarity(self.scenario.flow.superoperator(job.t), self.scenario.spec)

    def analyze(self):
        table = self.new_table()
        tol  = self.scenario.tolerances
        spec = format_spec(self.scenario.spec)
        for job in self.finished_jobs():
            solution = job.result
            if job.op == "extract_flow_generator":
                self.information["generator"] = solution.P
                table.add_row(spec=spec, op=job.op, residual=solution.residual, lhs=solution.verification,
                              rhs=tol["verification"], gauge=solution.gauge,
                              **{"pass": solution.residual <= tol["residual"] and solution.verification <= tol["verification"]})
                continue
            check = solution.bound_check
            passed = solution.residual <= tol["residual"] and (check is None or check.passed)
            if check is not None:
                self.information["spectral bound t={}".format(job.t)] = [check.lhs_spectral, check.rhs_spectral]
            table.add_row(spec=spec, op=job.op, residual=solution.residual,
                          lhs=None if check is None else check.lhs, rhs=None if check is None else check.rhs,
                          gauge=solution.normalization, **{"pass": passed})
        return table
