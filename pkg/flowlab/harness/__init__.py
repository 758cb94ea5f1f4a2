from .scenario import Scenario, parse_scenario, load_scenario, build_flow, TASKS, DEFAULT_TOLERANCES
from .runner import run, run_scenario, run_task
from .cli import main
