import logging
from ..objects import Job, JobTable, ReportTable, serial_take_data

logger = logging.getLogger(__name__)

class TaskExperiment:
    """One scenario task: jobs are prepared at construction, run by ``execute``,
    turned into a ReportTable by ``analyze`` and optionally plotted by ``visualize``.
    """
    task            = None
    columns         = ()
    residual_column = None

    def __init__(self, scenario):
        self.name        = type(self).__name__
        self.scenario    = scenario
        self.job_table   = JobTable(name=self.task)
        self.table       = None
        self.information = {}

    def submit(self, routine, **conditions):
        conditions["routine"] = routine
        self.job_table.submit(Job(conditions))

    def execute(self, take_data=serial_take_data):
        take_data(self.job_table)

    def new_table(self) -> ReportTable:
        self.table = ReportTable(self.task, self.columns, residual_column=self.residual_column)
        errors = [job.error for job in self.job_table.table if job.error is not None]
        if errors:
            self.table.error = "; ".join(sorted(set(errors)))
        return self.table

    def finished_jobs(self):
        return [job for job in self.job_table.table if job.end_flag and job.error is None]

    def analyze(self) -> ReportTable:
        raise NotImplementedError("This is abstract class")

    def visualize(self, path=None):
        pass

    def reset(self):
        self.job_table.reset()
        self.table = None
