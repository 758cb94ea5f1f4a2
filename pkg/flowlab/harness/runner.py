import logging
import os
import time
from .scenario import Scenario, load_scenario
from ..experiments import EXPERIMENTS
from ..objects import Report, ReportTable
from ..util.errors import FlowlabError

logger = logging.getLogger(__name__)

def run_task(scenario : Scenario, task : str, out_dir : str = None, plot : bool = False) -> tuple:
    """(table, information) of one task. A FlowlabError ends the task with an error table instead of raising."""
    experiment_class = EXPERIMENTS[task]
    start = time.perf_counter()
    try:
        experiment = experiment_class(scenario)
        experiment.execute()
        table = experiment.analyze()
        information = experiment.information
        if plot and out_dir is not None:
            experiment.visualize(path=os.path.join(out_dir, task + ".png"))
    except FlowlabError as e:
        logger.warning("task %s of %s failed: %s", task, scenario.name, e)
        table = ReportTable(task, experiment_class.columns, residual_column=experiment_class.residual_column)
        table.error = "{}: {}".format(type(e).__name__, e)
        information = {}
    table.wall_time_ms = 1e3*(time.perf_counter() - start)
    return table, information

def run(scenario : Scenario, out_dir : str, timings : bool = False, plot : bool = False) -> Report:
    """Execute the tasks of ``scenario`` in order and write the report into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    report = Report(name=scenario.name, seed=scenario.seed)
    for task in scenario.tasks:
        logger.info("scenario %s: task %s", scenario.name, task)
        table, information = run_task(scenario, task, out_dir, plot)
        report.add_table(table)
        if information:
            report.add_information(task, information)
    report.save(out_dir, timings=timings)
    return report

def run_scenario(config_path : str, out_dir : str, timings : bool = False, plot : bool = False) -> Report:
    """Parse the scenario file and run it.

    Raises:
        ScenarioError: the file does not parse; nothing is written
    """
    scenario = load_scenario(config_path)
    return run(scenario, out_dir, timings=timings, plot=plot)

def test_run_scenario_minimal(tmp_path):
    import json
    from .scenario import MINIMAL
    config = tmp_path/"minimal.json"
    config.write_text(MINIMAL)
    report = run_scenario(str(config), str(tmp_path/"out"))
    assert report.passed
    summary = json.loads((tmp_path/"out"/"summary.json").read_text())
    assert summary["pass"] and summary["tasks"][0]["task"] == "verify_cocycle"
    assert summary["tasks"][0]["wall_time_ms"] is None
    header = (tmp_path/"out"/"verify_cocycle.csv").read_text().splitlines()[0]
    assert header == "t,method,norm_u,cocycle_defect_max,lhs_cocycle,rhs_bound,pass"

def test_run_scenario_method_agreement(tmp_path):
    import json
    config = {
        "name": "rank_one_perturbation",
        "algebra": {"dim": 2, "nest_dims": [0, 1, 2]},
        "flow": {"type": "inner", "generator": [[[0, 1], 0], [0, 0]]},
        "perturbation": [[0, 1], [0, 0]],
        "time_grid": [-2, -1, 0, 1, 2],
        "tasks": ["perturb"],
    }
    (tmp_path/"c.json").write_text(json.dumps(config, indent=2))
    report = run_scenario(str(tmp_path/"c.json"), str(tmp_path/"out"))
    assert report.passed
    assert report.tables["perturb"].max_residual < 1e-7

def test_run_scenario_bounds_relate_decompose(tmp_path):
    import json
    import numpy as np
    config = {
        "name": "related_pair",
        "algebra": {"dim": 2, "nest_dims": [0, 1, 2]},
        "flow": {"type": "inner", "generator": [[[0, 1], 0], [0, 0]]},
        "reference_flow": {"type": "perturbed", "method": "closed_form",
                           "base": {"type": "inner", "generator": [[[0, 1], 0], [0, 0]]},
                           "P": [[0, 1], [0, 0]]},
        "perturbation": [[0, 1], [0, 0]],
        "method": "closed_form",
        "time_grid": [-1, 0, 1],
        "n_list": [1, 10],
        "tasks": ["bounds", "relate", "decompose"],
    }
    (tmp_path/"c.json").write_text(json.dumps(config, indent=2))
    report = run_scenario(str(tmp_path/"c.json"), str(tmp_path/"out"))
    assert report.passed
    headers = {
        "bounds"    : "t,method,norm_u,lhs_flow,rhs_flow,lhs_cocycle,rhs_bound,pass",
        "relate"    : "spec,op,residual,lhs,rhs,gauge,pass",
        "decompose" : "n,norm_w_minus_1,stability_u,stability_v,defect_v,pass",
    }
    for task, header in headers.items():
        lines = (tmp_path/"out"/(task + ".csv")).read_text().splitlines()
        assert lines[0] == header and len(lines) > 1
    summary = json.loads((tmp_path/"out"/"summary.json").read_text())
    assert summary["pass"] and [task["task"] for task in summary["tasks"]] == ["bounds", "relate", "decompose"]
    assert np.allclose(report.dictionary["relate"]["P"], [[0, -1.j], [0, 0]], atol=1e-6)

def test_run_scenario_rejects_unsorted_grid(tmp_path):
    import pytest
    from .scenario import MINIMAL
    from ..util.errors import ScenarioError
    config = tmp_path/"bad.json"
    config.write_text(MINIMAL.replace("[-1, 0, 1]", "[1, 0, -1]"))
    with pytest.raises(ScenarioError) as info:
        run_scenario(str(config), str(tmp_path/"out"))
    assert info.value.field == "time_grid"
    assert not (tmp_path/"out").exists()

def test_failed_task_is_recorded(tmp_path):
    import json
    config = {
        "name": "growth_alarm",
        "algebra": {"dim": 2, "nest_dims": [0, 2]},
        "flow": {"type": "inner", "generator": [[3, 0], [0, 0]]},
        "time_grid": [0, 1],
        "n_list": [1],
        "tasks": ["smooth", "extract"],
    }
    (tmp_path/"c.json").write_text(json.dumps(config))
    report = run_scenario(str(tmp_path/"c.json"), str(tmp_path/"out"))
    assert not report.passed
    assert report.tables["smooth"].error.startswith("SmoothingGrowthError")
    assert report.tables["extract"].passed
    summary = json.loads((tmp_path/"out"/"summary.json").read_text())
    assert [task["task"] for task in summary["tasks"]] == ["smooth", "extract"]

if __name__ == "__main__":
    import pathlib
    import tempfile
    with tempfile.TemporaryDirectory() as directory:
        test_run_scenario_minimal(pathlib.Path(directory))
