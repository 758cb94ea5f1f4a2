import logging
from ..util.errors import FlowlabError

logger = logging.getLogger(__name__)

class Job:
    """One condition of an experiment. ``routine(job)`` computes its result."""
    def __init__(self, conditions):
        self.result     = None
        self.error      = None
        self.end_flag   = False
        self.__dict__.update(conditions)

class JobTable:
    def __init__(self, name=None):
        self.reset()
        self.name = name

    def submit(self, job):
        self.table.append(job)

    def reset(self):
        self.table  = []

    @property
    def finished(self):
        return all(job.end_flag for job in self.table)

def serial_take_data(job_table):
    """Run every job of the table in submission order.

    A FlowlabError inside a routine is stored on the job and the table moves on.
    """
    for job in job_table.table:
        if job.end_flag:
            continue
        try:
            job.result = job.routine(job)
        except FlowlabError as e:
            logger.warning("%s: job failed: %s", job_table.name, e)
            job.error = "{}: {}".format(type(e).__name__, e)
        job.end_flag = True

def test_serial_take_data():
    from ..util.errors import NotInnerError
    def routine(job):
        if job.x < 0:
            raise NotInnerError("negative")
        return 2*job.x
    table = JobTable(name="doubling")
    for x in (1, -1, 3):
        table.submit(Job({"x": x, "routine": routine}))
    serial_take_data(table)
    assert table.finished
    assert [job.result for job in table.table] == [2, None, 6]
    assert table.table[1].error == "NotInnerError: negative"

if __name__ == "__main__":
    test_serial_take_data()
