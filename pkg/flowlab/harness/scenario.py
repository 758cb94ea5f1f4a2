"""
Scenario files: JSON documents describing one algebra, one flow and the tasks to run on it.

    {
      "name": "closed_form_inner",
      "seed": 1,
      "algebra": {"dim": 2, "nest_dims": [0, 2]},
      "flow": {"type": "inner", "generator": [[[0, 1], 0], [0, 0]]},
      "perturbation": [[0, 1], [0, 0]],
      "time_grid": [-2, -1, 0, 1, 2],
      "tolerances": {"cocycle_defect": 1e-8},
      "tasks": ["perturb", "verify_cocycle"]
    }

Flow descriptions nest: {"type": "perturbed", "base": <flow>, "P": <matrix>, "method": "ode"}.
"""
import json
import logging
import re
from dataclasses import dataclass, field
from typing import Optional
import numpy as np
from ..util.algebra import NestAlgebraSpec, build_nest_algebra, parse_matrix_literal, contains, matrix_unit
from ..util.flow import FlowBase, InnerFlow, identity_flow
from ..util.cocycle import PerturbedFlow, COCYCLE_METHODS
from ..util.errors import FlowlabError, ScenarioError

logger = logging.getLogger(__name__)

TASKS = ("perturb", "verify_cocycle", "bounds", "extract", "relate", "smooth", "decompose", "suite")
FLOW_TYPES = ("inner", "identity", "perturbed")
NEEDS_PERTURBATION = ("perturb", "verify_cocycle", "bounds")

DEFAULT_TOLERANCES = {
    "cocycle_defect"   : 1e-8,
    "method_agreement" : 1e-7,
    "residual"         : 1e-6,
    "verification"     : 1e-6,
    "antisymmetry"     : 1e-8,
    "generator_shift"  : 1e-6,
    "smoothing"        : 0.01,
    "roundtrip"        : 1e-9,
}
DEFAULT_N_LIST = (1., 10., 100., 1000., 10000.)

@dataclass(frozen=True)
class Scenario:
    name: str
    spec: NestAlgebraSpec
    flow: FlowBase
    time_grid: np.ndarray
    tasks: tuple
    tolerances: dict
    seed: int = 0
    perturbation: Optional[np.ndarray] = None
    method: str = "ode"
    reference_flow: Optional[FlowBase] = None
    observable: Optional[np.ndarray] = None
    n_list: tuple = DEFAULT_N_LIST
    xi: Optional[float] = None
    level: str = "quick"
    source: dict = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.spec.dim

    def default_observable(self) -> np.ndarray:
        if self.observable is not None:
            return self.observable
        return matrix_unit(self.dim, 0, self.dim - 1)

class _Locator:
    """Line numbers of keys in the raw text, for diagnostics."""
    def __init__(self, text):
        self.text = text

    def line(self, key):
        match = re.search(r'"{}"\s*:'.format(re.escape(key)), self.text)
        if match is None:
            return None
        return self.text.count("\n", 0, match.start()) + 1

def _fail(locator, message, path):
    key = path.split(".")[-1].split("[")[0]
    raise ScenarioError(message, field=path, line=locator.line(key))

def _matrix(locator, literal, path, dim):
    try:
        A = parse_matrix_literal(literal, field=path)
    except FlowlabError as e:
        _fail(locator, str(e), path)
    if A.shape[0] != dim:
        _fail(locator, "{} has dim {}, the algebra has dim {}".format(path, A.shape[0], dim), path)
    return A

def _in_algebra(locator, spec, A, path):
    if not contains(spec, A):
        _fail(locator, "{} is not in the nest algebra".format(path), path)
    return A

def build_flow(description, spec : NestAlgebraSpec, locator=None, path="flow") -> FlowBase:
    """FlowBase from a flow description; generators and perturbations must lie in the algebra."""
    locator = locator or _Locator("")
    if not isinstance(description, dict) or description.get("type") not in FLOW_TYPES:
        _fail(locator, "{}.type must be one of {}".format(path, list(FLOW_TYPES)), path + ".type")
    kind = description["type"]
    if kind == "identity":
        return identity_flow(spec.dim)
    if kind == "inner":
        if "generator" not in description:
            _fail(locator, "inner flow needs a generator", path + ".generator")
        G = _matrix(locator, description["generator"], path + ".generator", spec.dim)
        return InnerFlow(_in_algebra(locator, spec, G, path + ".generator"))
    for key in ("base", "P"):
        if key not in description:
            _fail(locator, "perturbed flow needs '{}'".format(key), "{}.{}".format(path, key))
    method = description.get("method", "ode")
    if method not in COCYCLE_METHODS:
        _fail(locator, "{}.method must be one of {}".format(path, list(COCYCLE_METHODS)), path + ".method")
    base = build_flow(description["base"], spec, locator, path + ".base")
    P = _in_algebra(locator, spec, _matrix(locator, description["P"], path + ".P", spec.dim), path + ".P")
    if method == "closed_form" and not base.is_inner:
        _fail(locator, "closed_form needs an inner base flow", path + ".method")
    return PerturbedFlow(base, P, method=method)

def _number_list(locator, values, path):
    if not isinstance(values, list) or len(values) == 0:
        _fail(locator, "{} must be a non-empty array of numbers".format(path), path)
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        _fail(locator, "{} must hold numbers only".format(path), path)
    array = np.array(values, dtype=float)
    if not np.all(np.isfinite(array)):
        _fail(locator, "{} must be finite".format(path), path)
    return array

def parse_scenario(text : str) -> Scenario:
    """Scenario from JSON text.

    Raises:
        ScenarioError: malformed JSON or a field that fails validation, with its path and line
    """
    locator = _Locator(text)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError("invalid JSON: {}".format(e.msg), line=e.lineno)
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object", line=1)

    for key in ("name", "algebra", "flow", "time_grid", "tasks"):
        if key not in raw:
            raise ScenarioError("missing required field", field=key)
    if not isinstance(raw["name"], str) or raw["name"] == "":
        _fail(locator, "name must be a non-empty string", "name")

    algebra = raw["algebra"]
    if not isinstance(algebra, dict) or not isinstance(algebra.get("dim"), int) or not isinstance(algebra.get("nest_dims"), list):
        _fail(locator, "algebra must be {\"dim\": int, \"nest_dims\": [int, ...]}", "algebra")
    try:
        spec = build_nest_algebra(algebra["dim"], algebra["nest_dims"])
    except FlowlabError as e:
        _fail(locator, str(e), "algebra.nest_dims")

    flow = build_flow(raw["flow"], spec, locator)

    time_grid = _number_list(locator, raw["time_grid"], "time_grid")
    if np.any(np.diff(time_grid) <= 0):
        _fail(locator, "time_grid must be sorted and strictly increasing", "time_grid")

    tasks = raw["tasks"]
    if not isinstance(tasks, list) or len(tasks) == 0:
        _fail(locator, "tasks must be a non-empty array", "tasks")
    for k, task in enumerate(tasks):
        if task not in TASKS:
            _fail(locator, "unknown task '{}', choose from {}".format(task, list(TASKS)), "tasks[{}]".format(k))

    perturbation = None
    if raw.get("perturbation") is not None:
        perturbation = _in_algebra(locator, spec, _matrix(locator, raw["perturbation"], "perturbation", spec.dim), "perturbation")
    for task in tasks:
        if task in NEEDS_PERTURBATION and perturbation is None:
            _fail(locator, "task '{}' needs a perturbation".format(task), "perturbation")

    tolerances = dict(DEFAULT_TOLERANCES)
    given = raw.get("tolerances", {})
    if not isinstance(given, dict):
        _fail(locator, "tolerances must be an object", "tolerances")
    for key, value in given.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not value >= 0:
            _fail(locator, "tolerance '{}' must be a nonnegative number".format(key), "tolerances.{}".format(key))
        tolerances[key] = float(value)

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        _fail(locator, "seed must be a nonnegative integer", "seed")
    method = raw.get("method", "ode")
    if method not in COCYCLE_METHODS:
        _fail(locator, "method must be one of {}".format(list(COCYCLE_METHODS)), "method")
    if method == "closed_form" and not flow.is_inner:
        _fail(locator, "closed_form needs an inner flow", "method")

    reference_flow = None
    if raw.get("reference_flow") is not None:
        reference_flow = build_flow(raw["reference_flow"], spec, locator, "reference_flow")
    observable = None
    if raw.get("observable") is not None:
        observable = _matrix(locator, raw["observable"], "observable", spec.dim)
    n_list = DEFAULT_N_LIST
    if raw.get("n_list") is not None:
        n_array = _number_list(locator, raw["n_list"], "n_list")
        if np.any(n_array <= 0) or np.any(np.diff(n_array) <= 0):
            _fail(locator, "n_list must be positive and increasing", "n_list")
        n_list = tuple(float(n) for n in n_array)
    xi = raw.get("xi")
    if xi is not None and (not isinstance(xi, (int, float)) or isinstance(xi, bool)):
        _fail(locator, "xi must be a number", "xi")
    level = raw.get("level", "quick")
    if level not in ("quick", "full"):
        _fail(locator, "level must be quick or full", "level")

    logger.debug("parsed scenario %s with tasks %s", raw["name"], tasks)
    return Scenario(name=raw["name"], spec=spec, flow=flow, time_grid=time_grid, tasks=tuple(tasks),
                    tolerances=tolerances, seed=seed, perturbation=perturbation, method=method,
                    reference_flow=reference_flow, observable=observable, n_list=n_list,
                    xi=None if xi is None else float(xi), level=level, source=raw)

def load_scenario(path) -> Scenario:
    with open(path, "r") as f:
        return parse_scenario(f.read())

MINIMAL = """{
  "name": "minimal",
  "algebra": {"dim": 2, "nest_dims": [0, 1, 2]},
  "flow": {"type": "identity"},
  "perturbation": [[0, 0], [0, 0]],
  "time_grid": [-1, 0, 1],
  "tasks": ["verify_cocycle"]
}"""

def test_parse_minimal():
    scenario = parse_scenario(MINIMAL)
    assert scenario.name == "minimal" and scenario.dim == 2
    assert scenario.tasks == ("verify_cocycle",)
    assert scenario.tolerances["cocycle_defect"] == 1e-8
    assert np.allclose(scenario.default_observable(), [[0, 1], [0, 0]])

def test_parse_perturbed_flow():
    text = """{
      "name": "nested",
      "algebra": {"dim": 2, "nest_dims": [0, 2]},
      "flow": {"type": "perturbed", "method": "closed_form",
               "base": {"type": "inner", "generator": [[[0, 1], 0], [0, 0]]},
               "P": [[0, 1], [0, 0]]},
      "time_grid": [0, 1],
      "tasks": ["extract"]
    }"""
    scenario = parse_scenario(text)
    assert isinstance(scenario.flow, PerturbedFlow)
    assert np.allclose(scenario.flow.generator, [[1.j, 1.j], [0, 0]])

def test_parse_errors_name_field_and_line():
    import pytest
    unsorted = MINIMAL.replace("[-1, 0, 1]", "[1, 0, -1]")
    with pytest.raises(ScenarioError) as info:
        parse_scenario(unsorted)
    assert info.value.field == "time_grid" and info.value.line == 6
    with pytest.raises(ScenarioError) as info:
        parse_scenario(MINIMAL.replace('"nest_dims": [0, 1, 2]', '"nest_dims": [0, 2, 1]'))
    assert info.value.field == "algebra.nest_dims"
    with pytest.raises(ScenarioError) as info:
        parse_scenario(MINIMAL.replace('"verify_cocycle"', '"fly"'))
    assert info.value.field == "tasks[0]"
    with pytest.raises(ScenarioError) as info:
        parse_scenario(MINIMAL.replace("[[0, 0], [0, 0]]", "[[0, 0], [1, 0]]"))
    assert info.value.field == "perturbation"
    with pytest.raises(ScenarioError) as info:
        parse_scenario(MINIMAL[:-3])
    assert info.value.line is not None

if __name__ == "__main__":
    test_parse_minimal()
    test_parse_perturbed_flow()
    test_parse_errors_name_field_and_line()
