"""
Randomized property sweeps over every module.

Each property draws one random case per call from default_rng([seed, property index, case])
and returns a score; the property passes when the worst score over its cases stays below
its threshold. Composite properties divide each check by its own tolerance and use threshold 1.

    level   dims    cases   heavy cases
    quick   <= 3    50      10
    full    <= 6    1000    200
"""
import json
import logging
import os
import tempfile
from dataclasses import dataclass
import numpy as np
from scipy.linalg import expm
from ..task_base import TaskExperiment
from ...objects import Report, ReportTable, stepper
from ...util.algebra import (SuperOp, invert, build_nest_algebra, contains, project, commutant_basis, matrix_unit, norm,
                             parse_matrix_literal, format_matrix_literal, superop_norm, sampled_norm_estimate)
from ...util.flow import (InnerFlow, identity_flow, hamiltonian_flow, eval_flow, flow_superoperator, matrix_exponential,
                          growth_bound, refine_grid, bound_holds, flow_norms, uniform_continuity_modulus,
                          generator_superop)
from ...util.cocycle import (make_cocycle, dyson_cocycle, ode_cocycle, closed_form_cocycle, cocycle_defect,
                             cocycle_defects, cocycle_defect_grid, perturbed_flow_eval, perturbation_distance_bounds,
                             PerturbedFlow, FunctionCocycle, derivative_at_zero, EVAL_METHODS, mollified_similarity,
                             similar_cocycle, differentiability_estimate, similarity_threshold, rough_coboundary)
from ...util.solver import (automorphism_similarity, inner_derivation_solve, derivation_space_basis,
                            extract_flow_generator, relate_flows, conjugate_flow, flow_distance_bound)
from ...util.smoothing import (analytic_smooth, smoothing_convergence_profile, analyticity_check, smoothing_norm_bound,
                               gaussian_weight_integral, weight_integral_oracle)
from ...util.smoothing.mollifier import GROWTH_GRID
from ...util.sampling import NestElementSampler, UnitarySampler, DerivationSampler
from ...util.errors import FlowlabError, SingularSimilarityError

logger = logging.getLogger(__name__)

LEVELS = {
    "quick" : {"max_dim": 3, "cases": 50, "heavy_cases": 10},
    "full"  : {"max_dim": 6, "cases": 1000, "heavy_cases": 200},
}
SUITE_COLUMNS = ("property", "module", "cases", "worst", "threshold", "pass")
DERIVATION_SPECS = ((3, (0, 1, 2, 3)), (4, (0, 2, 4)))
ROUGH_OMEGA = 40.
ROUGH_H_LIST = (1e-3, 5e-4, 2.5e-4)

@dataclass(frozen=True)
class Property:
    name: str
    module: str
    operations: tuple
    threshold: float
    check: object
    heavy: bool = False
    single: bool = False

    def cases(self, level) -> int:
        if self.single:
            return 1
        return LEVELS[level]["heavy_cases" if self.heavy else "cases"]

def _random_spec(rng, max_dim, min_dim=2):
    dim  = int(rng.integers(min_dim, max_dim + 1))
    cuts = rng.choice(np.arange(1, dim), size=int(rng.integers(0, dim)), replace=False)
    return build_nest_algebra(dim, [0] + sorted(int(c) for c in cuts) + [dim])

def _element(spec, rng, kind="general", max_norm=1.5):
    return NestElementSampler(spec, max_norm, kind).draw(rng)

def _complex_normal(rng, dim):
    return rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim))

def _hamiltonian_case(rng, max_dim, kind="hermitian"):
    spec = _random_spec(rng, max_dim)
    h = _element(spec, rng, kind)
    return spec, h, hamiltonian_flow(h), _element(spec, rng)

def _flag(ok):
    return 0. if ok else np.inf

# algebra_core

def check_nest_closure(rng, max_dim):
    spec = _random_spec(rng, max_dim)
    dim  = spec.dim
    A, B = _element(spec, rng), _element(spec, rng)
    AB   = A@B
    outside = norm(AB - project(spec, AB))/(1e-12*(1 + norm(AB)))
    X = _complex_normal(rng, dim)
    idempotent = _flag(np.array_equal(project(spec, project(spec, X)), project(spec, X)))
    commutant = commutant_basis(spec)
    if len(commutant) != 1:
        return np.inf
    C = commutant[0]
    scalar = norm(C - np.trace(C)/dim*np.eye(dim))/1e-10
    units = _flag(all(contains(spec, matrix_unit(dim, i, j)) == ((i, j) in spec.units)
                      for i in range(dim) for j in range(dim)))
    literal = _flag(np.array_equal(parse_matrix_literal(format_matrix_literal(A)), A))
    norms = _flag(norm(A, "spectral") <= norm(A)*(1 + 1e-12) <= np.sqrt(dim)*norm(A, "spectral")*(1 + 1e-12))
    return max(outside, idempotent, scalar, units, literal, norms)

def check_superop_norms(rng, max_dim):
    dim = int(rng.integers(2, max_dim + 1))
    X = _complex_normal(rng, dim)
    X *= rng.uniform(0.1, 2.)/norm(X)
    target = norm(X, "spectral")
    S = SuperOp.left_multiplication(X)
    induced = abs(superop_norm(S) - target)/(1e-12*target)
    seed = int(rng.integers(2**31))
    sampled = abs(sampled_norm_estimate(S, trials=4, seed=seed).value - target)/(1e-8*target)
    Q = UnitarySampler(dim).draw(rng)
    unitary = abs(superop_norm(SuperOp.conjugation(Q, Q.T.conj()), "spectral_sampled", trials=4, seed=seed) - 1)/1e-9
    return max(induced, sampled, unitary)

# flow_engine

def check_expm_accuracy(rng, max_dim):
    dim = int(rng.integers(1, max_dim + 1))
    G = _complex_normal(rng, dim)
    G *= rng.uniform(0, 5.)/norm(G)
    exact = expm(G)
    return norm(matrix_exponential(G) - exact)/norm(exact)

def check_flow_group_law(rng, max_dim):
    spec = _random_spec(rng, max_dim)
    G = _element(spec, rng)
    flow = InnerFlow(G)
    A = _element(spec, rng)
    s, t = rng.uniform(-1, 1, size=2)
    scale = max(norm(A), 1e-300)*np.exp(2*(abs(s) + abs(t))*norm(G))
    group = norm(eval_flow(flow, s + t, A) - eval_flow(flow, s, eval_flow(flow, t, A)))/scale
    tabulated = norm(flow_superoperator(flow, t).apply(A) - eval_flow(flow, t, A))/scale
    inside = _flag(contains(spec, eval_flow(flow, t, A), tol=1e-12*scale))
    return max(max(group, tabulated)/1e-12, inside)

def check_growth_bound(rng, max_dim):
    spec = _random_spec(rng, max_dim)
    flow = InnerFlow(_element(spec, rng))
    grid = np.linspace(-1, 1, 11)
    bound = growth_bound(flow, grid)
    refined = refine_grid(grid)
    certified = _flag(bound_holds(bound, refined, flow_norms(flow, refined)))
    modulus = uniform_continuity_modulus(flow, rng.uniform(-1, 1), [1e-2, 1e-4, 1e-6])
    shrinking = _flag(modulus[0] >= modulus[1] >= modulus[2])
    return max(certified, shrinking, modulus[-1]/1e-4)

def check_generator_matches_ad(rng, max_dim):
    spec = _random_spec(rng, max_dim)
    G = _element(spec, rng)
    return generator_superop(InnerFlow(G)).distance(SuperOp.ad(G))

# dyson_perturbation

def check_cocycle_law(rng, max_dim):
    spec, h, flow, P = _hamiltonian_case(rng, max_dim)
    u = make_cocycle("ode", flow, P)
    worst = float(np.max(cocycle_defect_grid(flow, u, np.linspace(-2, 2, 9))))
    dyson = make_cocycle("dyson", flow, P)
    for s, t in rng.uniform(-1, 1, size=(2, 2)):
        worst = max(worst, cocycle_defect(flow, dyson, s, t))
    return worst

def check_method_triangle(rng, max_dim):
    """dyson, ode and closed_form pairwise for |t| <= 2; the commutator series is checked at |t| <= 1."""
    spec, h, flow, P = _hamiltonian_case(rng, max_dim)
    t = rng.uniform(-2, 2)
    values = [dyson_cocycle(flow, P, t).u, ode_cocycle(flow, P, t), closed_form_cocycle(h, P, t)]
    worst = max(norm(a - b) for a in values for b in values)
    B = _element(spec, rng)
    reference = perturbed_flow_eval(flow, P, t/2, B, "closed_form")
    scale = max(1., norm(B))
    for method in EVAL_METHODS:
        worst = max(worst, norm(perturbed_flow_eval(flow, P, t/2, B, method) - reference)/scale)
    return worst

def check_norm_estimate(rng, max_dim):
    spec, h, flow, P = _hamiltonian_case(rng, max_dim, kind="real_diagonal")
    grid = np.linspace(-2, 2, 21)
    bound = growth_bound(flow, grid)
    t = rng.choice(grid[grid != 0])
    bounds = perturbation_distance_bounds(flow, P, t, bound, "ode")
    return max(bounds.lhs_cocycle/bounds.rhs, bounds.lhs_flow/bounds.rhs_flow)

def check_generator_shift(rng, max_dim):
    spec = _random_spec(rng, max_dim)
    base = InnerFlow(_element(spec, rng, max_norm=1.))
    P = _element(spec, rng)
    perturbed = PerturbedFlow(base, P)
    shift = generator_superop(perturbed) - generator_superop(base)
    return shift.distance(SuperOp.ad(1.j*P))

# inner_solver

def check_automorphism_similarity(rng, max_dim):
    """Solver residual over 1e-8, and the scaled ||T - I|| over 4 ||sigma - id|| when ||sigma - id|| < 1."""
    spec = _random_spec(rng, max_dim)
    T0 = np.eye(spec.dim) + rng.uniform(0.01, 0.2)*_element(spec, rng, max_norm=1.)
    solution = automorphism_similarity(SuperOp.conjugation(T0), spec)
    score = solution.residual/1e-8
    if solution.bound_check is not None:
        score = max(score, solution.bound_check.lhs/solution.bound_check.rhs)
    return score

def check_derivations_inner(rng, max_dim):
    dim, nest_dims = DERIVATION_SPECS[int(rng.integers(len(DERIVATION_SPECS)))]
    spec = build_nest_algebra(dim, nest_dims)
    if len(derivation_space_basis(spec)) != spec.algebra_dimension - 1:
        return np.inf
    return inner_derivation_solve(DerivationSampler(spec).draw(rng), spec).residual/1e-8

def check_extract_roundtrip(rng, max_dim):
    spec = _random_spec(rng, max_dim)
    P0 = _element(spec, rng, "trace_free")
    solution = extract_flow_generator(InnerFlow(P0), spec)
    return max(norm(solution.P - P0), solution.residual, solution.verification)/1e-6

def check_relate_flows(rng, max_dim):
    spec = _random_spec(rng, max_dim)
    flowA = InnerFlow(_element(spec, rng, max_norm=1.))
    flowB = InnerFlow(_element(spec, rng, max_norm=1.))
    forward  = relate_flows(flowA, flowB, spec)
    backward = relate_flows(flowB, flowA, spec)
    antisymmetry = norm(forward.P + backward.P)/1e-8
    distance = flow_distance_bound(flowA, flowB, 0.5, growth_bound(flowB, np.linspace(-1, 1, 21)))
    return max(forward.residual/1e-6, forward.verification/1e-6, antisymmetry, _flag(distance.passed))

def check_conjugate_flow(rng, max_dim):
    spec = _random_spec(rng, max_dim)
    S = np.eye(spec.dim) + 0.3*_element(spec, rng, max_norm=1.)
    S_inv = np.linalg.inv(S)
    sigma, sigma_inv = SuperOp.conjugation(S, S_inv), SuperOp.conjugation(S_inv, S)
    flow = InnerFlow(_element(spec, rng))
    inner = conjugate_flow(sigma, sigma_inv, flow)
    tabulated = conjugate_flow(SuperOp(sigma.matrix), SuperOp(sigma_inv.matrix), flow)
    if not inner.is_inner or tabulated.is_inner:
        return np.inf
    t = rng.uniform(-1, 1)
    A = _element(spec, rng)
    expected = tabulated.apply(t, A)
    scale = max(1., norm(expected))
    inside = _flag(contains(spec, inner.apply(t, A), tol=1e-9*scale))
    return max(norm(inner.apply(t, A) - expected)/(1e-9*scale), inside)

# smoothing

def check_smoothing(rng, max_dim):
    """Linearity, convergence at n = 1e4, the norm bounds at xi = 0 and xi = 0.5, and agreement with the entire extension."""
    spec, h, flow, A = _hamiltonian_case(rng, max_dim)
    B = _element(spec, rng)
    bound = growth_bound(flow, GROWTH_GRID)
    a, b = rng.normal(size=2) + 1.j*rng.normal(size=2)
    left  = analytic_smooth(flow, a*A + b*B, 9., xi=0.5, bound=bound).A_n
    smoothed_A = analytic_smooth(flow, A, 9., xi=0.5, bound=bound).A_n
    right = a*smoothed_A + b*analytic_smooth(flow, B, 9., xi=0.5, bound=bound).A_n
    linearity = norm(left - right)/(1e-10*(1 + abs(a)*norm(A) + abs(b)*norm(B)))
    profile = smoothing_convergence_profile(flow, A, [1., 1e4], bound=bound)
    convergence = profile[-1].diff_frobenius/(0.01*norm(A))
    contraction = norm(analytic_smooth(flow, A, 2., xi=0., bound=bound).A_n)/(bound.M*norm(A)*(1 + 1e-10))
    shifted = norm(smoothed_A)/(smoothing_norm_bound(bound, 9., 0.5)*norm(A)*(1 + 1e-10))
    smoothed = analytic_smooth(flow, A, 4., xi=0., bound=bound)
    analytic = analyticity_check(flow, smoothed, z=0.3 + 0.2j)/(1e-8*max(1., norm(A)))
    return max(linearity, convergence, contraction, shifted, analytic)

def check_weight_integral(rng, max_dim):
    n  = float(np.exp(rng.uniform(np.log(0.5), np.log(100.))))
    xi = rng.uniform(-5, 5)
    exact = gaussian_weight_integral(n, xi)
    pinned = abs(gaussian_weight_integral(4., 2.) - 1.1379379)/1e-6
    return max(abs(weight_integral_oracle(n, xi) - exact)/(1e-12*exact), pinned)

# cocycle_tools

def check_similar_cocycle(rng, max_dim):
    spec, h, flow, P = _hamiltonian_case(rng, max_dim)
    u = make_cocycle("closed_form", flow, P)
    w = mollified_similarity(u, flow, 100.)
    v = similar_cocycle(w, u)
    w_inv = invert(w, SingularSimilarityError)
    worst = 0.
    for s, t in rng.uniform(-2, 2, size=(3, 2)):
        worst = max(worst, max(cocycle_defects(flow, v, s, t))/1e-8,
                    norm(w@v.at(t)@flow.apply(t, w_inv) - u.at(t))/1e-9)
    return worst

def check_rough_decomposition(rng, max_dim):
    """stability(v) <= stability(u)/10 after averaging a rough coboundary at n = omega^2/16."""
    dim = int(rng.integers(2, max_dim + 1))
    u = rough_coboundary(dim, ROUGH_OMEGA, 0.2, rng)
    w = mollified_similarity(u, u.flow, ROUGH_OMEGA**2/16)
    v = similar_cocycle(w, u)
    stability_u = differentiability_estimate(u, 0.3, ROUGH_H_LIST).stability
    stability_v = differentiability_estimate(v, 0.3, ROUGH_H_LIST).stability
    roundtrip = norm(w@v.at(0.3)@u.flow.apply(0.3, invert(w, SingularSimilarityError)) - u.at(0.3))
    return max(10*stability_v/stability_u, max(cocycle_defects(u.flow, v, 0.5, -0.25))/1e-8, roundtrip/1e-9)

def check_cocycle_derivative(rng, max_dim):
    spec, h, flow, P = _hamiltonian_case(rng, max_dim)
    u = make_cocycle("closed_form", flow, P)
    estimate = differentiability_estimate(u, 0.)
    return max(norm(estimate.derivative - 1.j*P)/1e-6, norm(derivative_at_zero(u, 1e-4, inverse=True) + 1.j*P)/1e-6,
               estimate.stability/1e-5)

def check_differentiability_kink(rng, max_dim):
    """A kink of slope jump 2K must read as stability >= ||K||; its smooth counterpart as < 1e-6."""
    dim = int(rng.integers(2, max_dim + 1))
    K = _complex_normal(rng, dim)
    K *= rng.uniform(0.1, 1.)/norm(K)
    t0 = rng.uniform(-1, 1)
    flow = identity_flow(dim)
    kinked = FunctionCocycle(flow, lambda t: np.eye(dim) + abs(t - t0)*K)
    smooth = FunctionCocycle(flow, lambda t: np.eye(dim) + (t - t0)*K + (t - t0)**2*K@K)
    return max(norm(K)/differentiability_estimate(kinked, t0).stability,
               differentiability_estimate(smooth, t0).stability/1e-6)

def check_similarity_threshold(rng, max_dim):
    dim = int(rng.integers(2, max_dim + 1))
    u = rough_coboundary(dim, 10., 0.3, rng)
    eps = 1e-2
    result = similarity_threshold(u, u.flow, eps)
    if not result.found:
        return np.inf
    minimal = True
    if result.n > 1:
        try:
            minimal = norm(mollified_similarity(u, u.flow, result.n/2) - np.eye(dim)) >= eps
        except SingularSimilarityError:
            pass
    return max(result.norm_w_minus_1/eps, _flag(minimal))

# cli_harness

SCENARIO_CHECK = {
    "name": "suite_minimal",
    "algebra": {"dim": 2, "nest_dims": [0, 1, 2]},
    "flow": {"type": "inner", "generator": [[[0, 1], 0.5], [0, 0]]},
    "perturbation": [[0.2, 0.6], [0, [0, -0.1]]],
    "time_grid": [-1, 0, 1],
    "tasks": ["perturb", "verify_cocycle", "extract"],
}

def check_scenario_run(rng, max_dim):
    """The same scenario run twice writes byte-identical passing reports."""
    from ...harness.runner import run_scenario
    with tempfile.TemporaryDirectory() as directory:
        config = os.path.join(directory, "scenario.json")
        with open(config, "w") as f:
            json.dump(SCENARIO_CHECK, f)
        outputs = []
        for run in ("a", "b"):
            out_dir = os.path.join(directory, run)
            report = run_scenario(config, out_dir)
            if not report.passed:
                return np.inf
            files = {}
            for name in sorted(os.listdir(out_dir)):
                with open(os.path.join(out_dir, name), "rb") as f:
                    files[name] = f.read()
            outputs.append(files)
    return _flag(outputs[0] == outputs[1])

PROPERTIES = (
    Property("nest_closure", "algebra_core",
             ("build_nest_algebra", "contains", "project", "commutant_basis", "matrix_unit", "norm",
              "parse_matrix_literal/format_matrix_literal"), 1., check_nest_closure),
    Property("superop_norms", "algebra_core", ("superop_norm", "sampled_norm_estimate"), 1., check_superop_norms,
             heavy=True),
    Property("expm_accuracy", "flow_engine", ("matrix_exponential",), 1e-11, check_expm_accuracy),
    Property("flow_group_law", "flow_engine", ("eval_flow", "flow_superoperator"), 1., check_flow_group_law),
    Property("growth_bound_certified", "flow_engine", ("growth_bound", "uniform_continuity_modulus"), 1.,
             check_growth_bound),
    Property("generator_matches_ad", "flow_engine", ("generator_superop",), 1e-6, check_generator_matches_ad),
    Property("cocycle_law", "dyson_perturbation", ("ode_cocycle", "ode_cocycle_path", "dyson_cocycle", "cocycle_defect"),
             1e-8, check_cocycle_law, heavy=True),
    Property("method_triangle", "dyson_perturbation",
             ("dyson_cocycle", "ode_cocycle", "closed_form_cocycle", "perturbed_flow_eval"), 1e-7,
             check_method_triangle, heavy=True),
    Property("norm_estimate", "dyson_perturbation", ("perturbation_distance_bounds", "growth_bound"), 1. + 1e-12,
             check_norm_estimate, heavy=True),
    Property("generator_shift", "dyson_perturbation", ("perturbed_flow_eval", "generator_superop"), 1e-6,
             check_generator_shift, heavy=True),
    Property("automorphism_similarity", "inner_solver", ("automorphism_similarity",), 1.,
             check_automorphism_similarity),
    Property("derivations_inner", "inner_solver", ("derivation_space_basis", "inner_derivation_solve"), 1.,
             check_derivations_inner),
    Property("extract_roundtrip", "inner_solver", ("extract_flow_generator",), 1., check_extract_roundtrip),
    Property("relate_flows", "inner_solver", ("relate_flows",), 1., check_relate_flows, heavy=True),
    Property("conjugate_flow", "inner_solver", ("conjugate_flow",), 1., check_conjugate_flow),
    Property("smoothing", "smoothing", ("analytic_smooth", "smoothing_convergence_profile", "analyticity_check",
                                        "smoothing_norm_bound"), 1.,
             check_smoothing),
    Property("weight_integral_oracle", "smoothing", ("gaussian_weight_integral", "weight_integral_oracle"), 1.,
             check_weight_integral),
    Property("similar_cocycle_law", "cocycle_tools", ("mollified_similarity", "similar_cocycle", "cocycle_defect"), 1.,
             check_similar_cocycle),
    Property("rough_decomposition", "cocycle_tools",
             ("mollified_similarity", "similar_cocycle", "differentiability_estimate"), 1.,
             check_rough_decomposition, heavy=True),
    Property("cocycle_derivative", "cocycle_tools", ("differentiability_estimate",), 1., check_cocycle_derivative),
    Property("differentiability_kink", "cocycle_tools", ("differentiability_estimate",), 1.,
             check_differentiability_kink),
    Property("similarity_threshold", "cocycle_tools", ("similarity_threshold",), 1., check_similarity_threshold,
             heavy=True),
    Property("scenario_run", "cli_harness", ("run_scenario",), 0., check_scenario_run, single=True),
)

OPERATIONS = (
    "build_nest_algebra", "contains", "project", "commutant_basis", "matrix_unit", "norm",
    "parse_matrix_literal/format_matrix_literal", "superop_norm", "sampled_norm_estimate",
    "matrix_exponential", "eval_flow", "flow_superoperator", "growth_bound", "uniform_continuity_modulus",
    "generator_superop", "dyson_cocycle", "ode_cocycle", "ode_cocycle_path", "closed_form_cocycle",
    "cocycle_defect", "perturbed_flow_eval", "perturbation_distance_bounds", "automorphism_similarity",
    "inner_derivation_solve", "derivation_space_basis", "extract_flow_generator", "relate_flows", "conjugate_flow",
    "analytic_smooth", "smoothing_convergence_profile", "analyticity_check", "gaussian_weight_integral",
    "weight_integral_oracle", "smoothing_norm_bound", "mollified_similarity", "similar_cocycle", "differentiability_estimate",
    "similarity_threshold", "run_scenario", "verify_suite",
)

def coverage_manifest(level, properties=PROPERTIES) -> dict:
    """op -> names of the properties exercising it; verify_suite is covered by the sweep itself.

    ``level_note`` states the case counts, since quick runs the heavy properties on far fewer cases than full.
    """
    operations = {op: [] for op in OPERATIONS}
    for prop in properties:
        for op in prop.operations:
            operations.setdefault(op, []).append(prop.name)
    operations["verify_suite"] = [prop.name for prop in properties]
    counts = LEVELS[level]
    heavy = sorted(prop.name for prop in properties if prop.heavy)
    note = "{}: {} cases per property, {} per heavy property ({}); full runs {} and {}".format(
        level, counts["cases"], counts["heavy_cases"], ", ".join(heavy) or "none",
        LEVELS["full"]["cases"], LEVELS["full"]["heavy_cases"])
    return {
        "level"      : level,
        "level_note" : note,
        "operations" : operations,
        "uncovered"  : sorted(op for op, names in operations.items() if len(names) == 0),
    }

def run_property(prop, index, seed, level):
    """Worst score of ``prop`` over its cases; a FlowlabError counts as an infinite score."""
    max_dim = LEVELS[level]["max_dim"]
    worst = 0.
    for case in range(prop.cases(level)):
        rng = np.random.default_rng([seed, index, case])
        try:
            score = float(prop.check(rng, max_dim))
        except FlowlabError as e:
            logger.warning("%s case %d raised %s: %s", prop.name, case, type(e).__name__, e)
            score = np.inf
        if stepper.DEBUG_MODE:
            logger.debug("%s case %d seed %s score %.6e", prop.name, case, [seed, index, case], score)
        worst = max(worst, score)
    logger.info("%s worst %.3e (threshold %.1e)", prop.name, worst, prop.threshold)
    return worst

def verify_suite(seed=1, level="quick", properties=PROPERTIES) -> Report:
    """Run every property at ``level``; the report carries the ``suite`` table and the coverage manifest."""
    if level not in LEVELS:
        raise ValueError("Unknown level, choose from {}".format(tuple(LEVELS)))
    report = Report(name="suite", seed=seed)
    table = report.add_table(ReportTable("suite", SUITE_COLUMNS))
    for index, prop in enumerate(properties):
        worst = run_property(prop, index, seed, level)
        table.add_row(**{"property": prop.name, "module": prop.module, "cases": prop.cases(level), "worst": worst,
                         "threshold": prop.threshold, "pass": bool(worst <= prop.threshold)})
    report.add_information("level", level)
    report.add_information("coverage", coverage_manifest(level, properties))
    return report

class PropertySuite(TaskExperiment):
    """The ``suite`` task of a scenario: the sweep at the scenario level, seeded by the scenario seed."""
    task            = "suite"
    columns         = SUITE_COLUMNS
    residual_column = None

    def __init__(self, scenario):
        super().__init__(scenario)
        self.submit(self._sweep)

    def _sweep(self, job):
        return verify_suite(self.scenario.seed, self.scenario.level)

    def analyze(self):
        table = self.new_table()
        for job in self.finished_jobs():
            for row in job.result.tables["suite"].rows:
                table.add_row(**row)
            self.information["coverage"] = job.result.dictionary["coverage"]
        return table

def test_coverage_manifest_covers_every_operation():
    manifest = coverage_manifest("full")
    assert manifest["uncovered"] == []
    assert set(OPERATIONS) <= set(manifest["operations"])
    note = coverage_manifest("quick")["level_note"]
    assert note.startswith("quick: 50 cases per property, 10 per heavy property") and note.endswith("full runs 1000 and 200")

def test_property_cases_scale_with_level():
    light = [prop for prop in PROPERTIES if not prop.heavy and not prop.single][0]
    heavy = [prop for prop in PROPERTIES if prop.heavy][0]
    assert light.cases("quick") == 50 and light.cases("full") == 1000
    assert heavy.cases("quick") == 10 and heavy.cases("full") == 200

def test_light_properties_pass_on_a_few_cases():
    names = ("nest_closure", "expm_accuracy", "flow_group_law", "generator_matches_ad", "automorphism_similarity",
             "derivations_inner", "weight_integral_oracle", "differentiability_kink", "cocycle_derivative")
    for index, prop in enumerate(PROPERTIES):
        if prop.name not in names:
            continue
        for case in range(3):
            score = prop.check(np.random.default_rng([5, index, case]), 3)
            assert score <= prop.threshold, (prop.name, case, score)

def test_verify_suite_is_deterministic():
    chosen = tuple(prop for prop in PROPERTIES if prop.name in ("expm_accuracy", "weight_integral_oracle"))
    first  = verify_suite(3, "quick", chosen)
    second = verify_suite(3, "quick", chosen)
    assert first.tables["suite"].to_csv() == second.tables["suite"].to_csv()
    assert first.passed
    header = first.tables["suite"].to_csv().splitlines()[0]
    assert header == "property,module,cases,worst,threshold,pass"

def test_failing_property_is_reported():
    broken = (Property("broken", "flow_engine", ("eval_flow",), 1., lambda rng, max_dim: 2.),)
    report = verify_suite(1, "quick", broken)
    assert not report.passed
    assert report.dictionary["coverage"]["operations"]["eval_flow"] == ["broken"]

if __name__ == "__main__":
    test_coverage_manifest_covers_every_operation()
    test_property_cases_scale_with_level()
    test_light_properties_pass_on_a_few_cases()
    test_verify_suite_is_deterministic()
