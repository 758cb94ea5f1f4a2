import csv
import io
import json
import logging
import os
import tempfile
import numpy as np

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "flowlab.report/1"
RNG_NAME      = "numpy.random.PCG64"

def format_cell(value):
    """CSV text of a cell; floats keep full precision so reruns compare byte for byte."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return repr(complex(value))
    if value is None:
        return ""
    return str(value)

def atomic_write(path, text):
    """Write ``text`` to a sibling temporary file, then rename it over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise

class ReportTable:
    """Rows of one task. The header is fixed at construction and every row must match it."""
    def __init__(self, task, columns, residual_column=None):
        self.task            = task
        self.columns         = tuple(columns)
        self.residual_column = residual_column
        self.rows            = []
        self.error           = None
        self.wall_time_ms    = None

    def add_row(self, **values):
        if set(values) != set(self.columns):
            missing = set(self.columns) - set(values)
            extra   = set(values) - set(self.columns)
            raise KeyError("{} row mismatch, missing {} extra {}".format(self.task, sorted(missing), sorted(extra)))
        self.rows.append(values)

    @property
    def passed(self) -> bool:
        if self.error is not None:
            return False
        if "pass" not in self.columns:
            return True
        return all(bool(row["pass"]) for row in self.rows)

    @property
    def max_residual(self):
        if self.residual_column is None:
            return None
        values = [float(row[self.residual_column]) for row in self.rows if row[self.residual_column] is not None]
        if len(values) == 0:
            return None
        return max(values)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(row[c]) for c in self.columns])
        return buffer.getvalue()

class Report:
    """Per-task tables plus free-form information of one scenario run.

    ``passed`` is the conjunction of the table pass flags.
    """
    def __init__(self, name="noname", seed=None):
        self.name = name
        self.seed = seed
        self.tables = {}
        self.dictionary = {
            "name"  : self.name
        }

    def add_information(self, key, data):
        self.dictionary[key] = data

    def add_table(self, table):
        self.tables[table.task] = table
        return table

    @property
    def passed(self) -> bool:
        return all(table.passed for table in self.tables.values())

    def summary(self, timings=False) -> dict:
        tasks = []
        for table in self.tables.values():
            tasks.append({
                "scenario"     : self.name,
                "task"         : table.task,
                "pass"         : table.passed,
                "max_residual" : table.max_residual,
                "wall_time_ms" : table.wall_time_ms if timings else None,
                "error"        : table.error,
            })
        return {
            "schema"      : REPORT_SCHEMA,
            "scenario"    : self.name,
            "seed"        : self.seed,
            "rng"         : RNG_NAME,
            "pass"        : self.passed,
            "tasks"       : tasks,
            "information" : {k: v for k, v in self.dictionary.items() if k != "name"},
        }

    def save(self, out_dir, timings=False):
        """Write ``<task>.csv`` per table and ``summary.json`` into ``out_dir``."""
        os.makedirs(out_dir, exist_ok=True)
        for table in self.tables.values():
            atomic_write(os.path.join(out_dir, table.task + ".csv"), table.to_csv())
        text = json.dumps(self.summary(timings=timings), indent=2, sort_keys=True, default=_json_default)
        atomic_write(os.path.join(out_dir, "summary.json"), text + "\n")
        logger.info("report %s written to %s", self.name, out_dir)

def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        # matrix literal convention
        return obj.real if obj.imag == 0 else [obj.real, obj.imag]
    raise TypeError("{} is not JSON serializable".format(type(obj).__name__))

def test_report_pass_is_conjunction():
    report = Report(name="example", seed=1)
    table = report.add_table(ReportTable("bounds", ["t", "lhs", "rhs", "pass"], residual_column="lhs"))
    table.add_row(**{"t": 0.5, "lhs": 0.1, "rhs": 0.2, "pass": True})
    assert report.passed
    table.add_row(**{"t": 1.0, "lhs": 0.3, "rhs": 0.2, "pass": False})
    assert not report.passed
    assert table.max_residual == 0.3

def test_report_save_is_deterministic(tmp_path):
    def build():
        report = Report(name="example", seed=3)
        table = report.add_table(ReportTable("smooth", ["n", "diff_frobenius", "pass"]))
        table.add_row(**{"n": 4.0, "diff_frobenius": 1/3, "pass": True})
        table.wall_time_ms = 12.5
        report.add_information("xi", np.float64(0.25))
        return report
    build().save(str(tmp_path/"a"))
    build().save(str(tmp_path/"b"))
    for name in ("smooth.csv", "summary.json"):
        assert (tmp_path/"a"/name).read_bytes() == (tmp_path/"b"/name).read_bytes()
    assert (tmp_path/"a"/"smooth.csv").read_text().splitlines()[0] == "n,diff_frobenius,pass"
    summary = json.loads((tmp_path/"a"/"summary.json").read_text())
    assert summary["schema"] == REPORT_SCHEMA
    assert summary["tasks"][0]["wall_time_ms"] is None
    assert not any(name.startswith(".tmp_") for name in os.listdir(str(tmp_path/"a")))
