"""
Command line front end.

    flowlab run <config.json> --out <dir>
    flowlab verify --level quick|full --seed <n> --out <dir>
    flowlab smooth|perturb|extract --dim 2 --nest-dims 0 1 2 --generator '[[[0, 1], 0], [0, 0]]' ... --out <dir>

Exit codes: 0 every table passed, 1 some property failed, 2 usage or parse error.
"""
import argparse
import json
import logging
import os
import sys
from .scenario import parse_scenario
from .runner import run, run_scenario
from ..experiments import verify_suite
from ..objects import atomic_write, set_debug_mode
from ..util.errors import ScenarioError

logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

def _matrix_argument(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError("not a JSON matrix literal: {}".format(e.msg))

def _add_algebra_arguments(parser):
    parser.add_argument("--name", default=None)
    parser.add_argument("--dim", type=int, required=True)
    parser.add_argument("--nest-dims", type=int, nargs="+", required=True)
    parser.add_argument("--generator", type=_matrix_argument, default=None,
                        help="generator of the inner flow; the identity flow when omitted")
    parser.add_argument("--seed", type=int, default=0)

def _add_output_arguments(parser):
    parser.add_argument("--out", required=True)
    parser.add_argument("--timings", action="store_true", help="record wall_time_ms in summary.json")
    parser.add_argument("--plot", action="store_true", help="write PNG figures next to the CSVs")

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowlab", description="Flows and cocycle perturbations on nest algebras")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    parser.add_argument("--debug", action="store_true", help="log every property case")
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="run a scenario file")
    run_parser.add_argument("config")
    _add_output_arguments(run_parser)

    verify = commands.add_parser("verify", help="randomized property sweep")
    verify.add_argument("--level", choices=("quick", "full"), default="quick")
    verify.add_argument("--seed", type=int, default=1)
    _add_output_arguments(verify)

    smooth = commands.add_parser("smooth", help="mollification profile of one observable")
    _add_algebra_arguments(smooth)
    smooth.add_argument("--observable", type=_matrix_argument, default=None)
    smooth.add_argument("--n-list", type=float, nargs="+", default=None)
    smooth.add_argument("--xi", type=float, default=None)
    _add_output_arguments(smooth)

    perturb = commands.add_parser("perturb", help="perturbation cocycle by every method, plus its cocycle law")
    _add_algebra_arguments(perturb)
    perturb.add_argument("--perturbation", type=_matrix_argument, required=True)
    perturb.add_argument("--time-grid", type=float, nargs="+", default=[-2., -1., 0., 1., 2.])
    perturb.add_argument("--method", choices=("dyson", "ode", "closed_form"), default="ode")
    _add_output_arguments(perturb)

    extract = commands.add_parser("extract", help="inner generator of a flow")
    _add_algebra_arguments(extract)
    _add_output_arguments(extract)
    return parser

def shortcut_config(args) -> dict:
    """Scenario document equivalent to a single-task shortcut."""
    flow = {"type": "identity"} if args.generator is None else {"type": "inner", "generator": args.generator}
    config = {
        "name"      : args.name or args.command,
        "seed"      : args.seed,
        "algebra"   : {"dim": args.dim, "nest_dims": args.nest_dims},
        "flow"      : flow,
        "time_grid" : [0, 1],
    }
    if args.command == "smooth":
        config["tasks"] = ["smooth"]
        for key, value in (("observable", args.observable), ("n_list", args.n_list), ("xi", args.xi)):
            if value is not None:
                config[key] = value
    elif args.command == "perturb":
        config.update(tasks=["perturb", "verify_cocycle"], perturbation=args.perturbation,
                      time_grid=args.time_grid, method=args.method)
    else:
        config["tasks"] = ["extract"]
    return config

def _configure_logging(verbose):
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

def run_verify(args):
    report = verify_suite(args.seed, args.level)
    report.save(args.out, timings=args.timings)
    coverage = json.dumps(report.dictionary["coverage"], indent=2, sort_keys=True)
    atomic_write(os.path.join(args.out, "coverage.json"), coverage + "\n")
    return report

def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_PASS
    _configure_logging(args.verbose)
    set_debug_mode(args.debug)

    try:
        if args.command == "run":
            report = run_scenario(args.config, args.out, timings=args.timings, plot=args.plot)
        elif args.command == "verify":
            report = run_verify(args)
        else:
            scenario = parse_scenario(json.dumps(shortcut_config(args), indent=2))
            report = run(scenario, args.out, timings=args.timings, plot=args.plot)
    except (ScenarioError, OSError) as e:
        logger.error("%s", e)
        return EXIT_USAGE

    for task, table in report.tables.items():
        logger.info("%s: %s", task, "pass" if table.passed else "FAIL")
    return EXIT_PASS if report.passed else EXIT_FAIL

def test_cli_usage_errors(tmp_path):
    assert main([]) == EXIT_USAGE
    assert main(["run", str(tmp_path/"missing.json"), "--out", str(tmp_path/"out")]) == EXIT_USAGE
    bad = tmp_path/"bad.json"
    bad.write_text('{"name": "x",\n "algebra": {"dim": 2, "nest_dims": [0, 2]},\n "flow": {"type": "circle"}}')
    assert main(["run", str(bad), "--out", str(tmp_path/"out")]) == EXIT_USAGE

def test_cli_shortcuts(tmp_path):
    generator = '[[[0, 1], 0], [0, 0]]'
    assert main(["extract", "--dim", "2", "--nest-dims", "0", "1", "2", "--generator", generator,
                 "--out", str(tmp_path/"extract")]) == EXIT_PASS
    assert (tmp_path/"extract"/"extract.csv").exists()
    assert main(["perturb", "--dim", "2", "--nest-dims", "0", "1", "2", "--generator", generator,
                 "--perturbation", "[[0, 1], [0, 0]]", "--out", str(tmp_path/"perturb")]) == EXIT_PASS
    assert main(["smooth", "--dim", "2", "--nest-dims", "0", "1", "2", "--generator", generator,
                 "--n-list", "1", "100", "10000", "--xi", "0", "--out", str(tmp_path/"smooth")]) == EXIT_PASS
    rows = (tmp_path/"smooth"/"smooth.csv").read_text().splitlines()
    assert rows[0] == "n,diff_frobenius,norm_frobenius,quad_error_estimate,pass" and len(rows) == 4

def test_cli_run_is_byte_identical(tmp_path):
    from .scenario import MINIMAL
    config = tmp_path/"minimal.json"
    config.write_text(MINIMAL)
    for run_name in ("a", "b"):
        assert main(["run", str(config), "--out", str(tmp_path/run_name)]) == EXIT_PASS
    for name in ("verify_cocycle.csv", "summary.json"):
        assert (tmp_path/"a"/name).read_bytes() == (tmp_path/"b"/name).read_bytes()

if __name__ == "__main__":
    sys.exit(main())
