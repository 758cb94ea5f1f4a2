import logging
from dataclasses import dataclass
import numpy as np
from scipy.linalg import solve
from .cocycle_handle import CocycleBase, OdeCocycle, make_cocycle, COCYCLE_METHODS
from .dyson import commutator_series, DEFAULT_ORDER, DEFAULT_NODES
from .ode import ode_cocycle_path, DEFAULT_STEPS
from ..algebra import SuperOp, as_element, identity, smallest_singular_value, superop_norm
from ..flow import FlowBase, CocyclePerturbedFlow, GrowthBound
from ..errors import SingularCocycleError

logger = logging.getLogger(__name__)

EVAL_METHODS = COCYCLE_METHODS + ("commutator",)

class PerturbedFlow(CocyclePerturbedFlow):
    """alpha^P_t = Ad u^P_t o alpha_t with u^P built by ``method``.

    Over an inner base Ad e^{tG} the result is again inner, with generator G + iP.
    """
    def __init__(self, base : FlowBase, P, method="ode", order=DEFAULT_ORDER, nodes_per_level=DEFAULT_NODES,
                 steps=DEFAULT_STEPS):
        super().__init__(make_cocycle(method, base, P, order=order, nodes_per_level=nodes_per_level, steps=steps))
        self.P      = self.cocycle.P
        self.method = method

    @property
    def generator(self):
        if self.base.generator is None:
            return None
        return self.base.generator + 1.j*self.P

def _conjugate(u, B):
    if smallest_singular_value(u) <= 1e-10:
        logger.warning("perturbation cocycle is singular")
        raise SingularCocycleError("u_t is singular")
    return solve(u.T, (u@B).T).T

def perturbed_flow_eval(flow : FlowBase, P, t : float, B, method : str = "ode") -> np.ndarray:
    """alpha^P_t(B) = u_t alpha_t(B) u_t^{-1}; ``commutator`` sums the nested-commutator series instead."""
    B = as_element(B, flow.dim)
    t = float(t)
    if method == "commutator":
        return commutator_series(flow, P, t).apply(flow.apply(t, B))
    if method not in COCYCLE_METHODS:
        raise ValueError("Unknown method, choose from {}".format(EVAL_METHODS))
    u = make_cocycle(method, flow, P).at(t)
    return _conjugate(u, flow.apply(t, B))

def cocycle_defects(flow : FlowBase, u : CocycleBase, s : float, t : float) -> tuple:
    """(||u_{s+t} - u_t alpha_t(u_s)||_F, ||u_{s+t} - u_s alpha_s(u_t)||_F)."""
    if s == 0 or t == 0:
        return 0., 0.
    us, ut, ust = u.at(s), u.at(t), u.at(s + t)
    return (float(np.linalg.norm(ust - ut@flow.apply(t, us))),
            float(np.linalg.norm(ust - us@flow.apply(s, ut))))

def cocycle_defect(flow : FlowBase, u : CocycleBase, s : float, t : float) -> float:
    return cocycle_defects(flow, u, s, t)[0]

def cocycle_path(u : CocycleBase, times) -> np.ndarray:
    """u_t for every t in ``times``; an ODE cocycle is swept once instead of integrated per time."""
    times = np.asarray(times, dtype=float)
    if isinstance(u, OdeCocycle) and len(times) > 0:
        span = max(float(np.max(np.abs(times))), 1.)
        return ode_cocycle_path(u.flow, u.P, times, steps_per_unit=int(np.ceil(u.steps/span)))
    return np.array([u.at(t) for t in times])

def cocycle_defect_grid(flow : FlowBase, u : CocycleBase, points) -> np.ndarray:
    """Both defects over the square grid points x points, each u_t evaluated once.

    Returns:
        np.ndarray: shape (len(points), len(points), 2), entry [i, j] for (s, t) = (points[i], points[j])
    """
    points = np.asarray(points, dtype=float)
    needed = sorted(set(points.tolist()) | {s + t for s in points.tolist() for t in points.tolist()})
    lookup = dict(zip(needed, cocycle_path(u, needed)))
    table = np.zeros((len(points), len(points), 2))
    for i, s in enumerate(points):
        for j, t in enumerate(points):
            if s == 0 or t == 0:
                continue
            ust = lookup[s + t]
            table[i, j, 0] = np.linalg.norm(ust - lookup[t]@flow.apply(t, lookup[s]))
            table[i, j, 1] = np.linalg.norm(ust - lookup[s]@flow.apply(s, lookup[t]))
    return table

@dataclass(frozen=True)
class PerturbationBounds:
    """lhs_cocycle <= rhs is the cocycle estimate; lhs_flow is held to rhs_flow.

    rhs_flow doubles the rate in the exponent, one factor 2 per nested commutator.
    """
    lhs_flow: float
    lhs_cocycle: float
    rhs: float
    rhs_flow: float

    @property
    def passed(self) -> bool:
        return self.lhs_cocycle <= self.rhs*(1 + 1e-12) and self.lhs_flow <= self.rhs_flow*(1 + 1e-12)

def perturbation_distance_bounds(flow : FlowBase, P, t : float, bound : GrowthBound, method : str = "ode",
                                 u : np.ndarray = None) -> PerturbationBounds:
    """Distance of the perturbed flow and its cocycle from the unperturbed ones, against M e^{xi|t|}(e^{M|t|p} - 1).

    lhs_flow is the exact sup over Frobenius-unit B, the Frobenius-induced norm of (Ad u_t - id) o alpha_t.
    """
    P = as_element(P, flow.dim)
    t = float(t)
    if u is None:
        u = make_cocycle(method, flow, P).at(t)
    p = np.linalg.norm(P)
    lhs_cocycle = float(np.linalg.norm(u - identity(flow.dim)))
    if lhs_cocycle == 0:
        lhs_flow = 0.
    else:
        shift = SuperOp.conjugation(u) - SuperOp.identity(flow.dim)
        lhs_flow = superop_norm(shift.compose(flow.superoperator(t)))
    prefactor = bound.at(t)
    rhs      = float(prefactor*np.expm1(bound.M*abs(t)*p))
    rhs_flow = float(prefactor*np.expm1(2*bound.M*abs(t)*p))
    return PerturbationBounds(lhs_flow=lhs_flow, lhs_cocycle=lhs_cocycle, rhs=rhs, rhs_flow=rhs_flow)

def derivative_at_zero(u : CocycleBase, h : float, inverse : bool = False) -> np.ndarray:
    """Richardson-extrapolated one-sided slope of u_t (or u_t^{-1}) at 0; tends to iP (or -iP)."""
    def slope(step):
        value = u.inverse_at(step) if inverse else u.at(step)
        return (value - identity(u.dim))/step
    return 2*slope(h/2) - slope(h)

def test_perturbed_flow_trivial_cases():
    from ..flow import InnerFlow
    flow = InnerFlow(np.array([[0.2j, 1.], [0., -0.1j]]))
    B = np.array([[1., 2.], [0., 3.j]])
    P = np.array([[0.3, 0.2], [0., 0.1]])
    for method in ("ode", "closed_form", "commutator"):
        assert np.allclose(perturbed_flow_eval(flow, P, 0., B, method), B, atol=1e-12)
        assert np.allclose(perturbed_flow_eval(flow, np.zeros((2, 2)), 1.1, B, method), flow.apply(1.1, B), atol=1e-12)

def test_perturbed_flow_is_inner_for_inner_base():
    from ..flow import hamiltonian_flow, InnerFlow
    rng = np.random.default_rng(5)
    h = rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3))
    h = h + h.T.conj()
    h *= 1./np.linalg.norm(h)
    P = rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3))
    P *= 1./np.linalg.norm(P)
    B = rng.normal(size=(3, 3))
    expected = InnerFlow(1.j*(h + P)).apply(1.5, B)
    for method in EVAL_METHODS:
        assert np.allclose(perturbed_flow_eval(hamiltonian_flow(h), P, 1.5, B, method), expected, atol=1e-8)
    assert np.allclose(PerturbedFlow(hamiltonian_flow(h), P).generator, 1.j*(h + P))

def test_cocycle_defect_examples():
    from ..flow import InnerFlow, hamiltonian_flow
    from .cocycle_handle import FunctionCocycle
    h = np.array([[1., 0.], [0., 0.]])
    P = np.array([[0., 1.], [0., 0.]])
    flow = hamiltonian_flow(h)
    u = make_cocycle("closed_form", flow, P)
    assert cocycle_defect(flow, u, 0., 1.3) == 0 and cocycle_defect(flow, u, 0.4, 0.) == 0
    rng = np.random.default_rng(0)
    for s, t in rng.uniform(-2, 2, size=(10, 2)):
        assert max(cocycle_defects(flow, u, s, t)) < 1e-9
    E12 = np.array([[0, 1], [0, 0]])
    bad_flow = InnerFlow(np.array([[0.5, 0.], [1., -0.5]]))
    bad = FunctionCocycle(bad_flow, lambda t: np.eye(2) + t*E12)
    worst = max(cocycle_defect(bad_flow, bad, s, t) for s in np.linspace(-2, 2, 9) for t in np.linspace(-2, 2, 9))
    assert worst > 0.01

def test_cocycle_defect_grid_ode():
    from ..flow import hamiltonian_flow
    h = np.array([[0.5, 0.3j], [-0.3j, -0.2]])
    P = np.array([[0.2, 0.7], [0.1j, 0.]])
    flow = hamiltonian_flow(h)
    grid = np.linspace(-2, 2, 9)
    table = cocycle_defect_grid(flow, make_cocycle("ode", flow, P), grid)
    assert table.shape == (9, 9, 2)
    assert table.max() < 1e-8

def test_distance_bounds_examples():
    from ..flow import identity_flow, InnerFlow, growth_bound
    bound = GrowthBound(M=1., xi=0.)
    zero = perturbation_distance_bounds(identity_flow(2), np.zeros((2, 2)), 1., bound)
    assert zero.lhs_flow == 0 and zero.lhs_cocycle == 0 and zero.rhs == 0
    E12 = np.array([[0, 1], [0, 0]])
    result = perturbation_distance_bounds(identity_flow(2), E12, 1., bound)
    assert np.isclose(result.lhs_cocycle, 1.) and np.isclose(result.rhs, np.e - 1)
    assert result.passed
    rng = np.random.default_rng(9)
    for _ in range(10):
        h = np.triu(rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3)), 1) + np.diag(rng.normal(size=3))
        h *= rng.uniform(0, 1.5)/np.linalg.norm(h)
        P = np.triu(rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3)))
        P *= rng.uniform(0, 1.5)/np.linalg.norm(P)
        flow = InnerFlow(1.j*h)
        bound = growth_bound(flow, np.linspace(-2, 2, 41))
        for t in (-2., 0.3, 1.):
            assert perturbation_distance_bounds(flow, P, t, bound, method="closed_form").passed

def test_derivative_at_zero():
    from ..flow import hamiltonian_flow
    h = np.array([[0.3, 0.5], [0.5, -1.]])
    P = np.array([[0.1, 1.], [0.j, -0.4]])
    u = make_cocycle("closed_form", hamiltonian_flow(h), P)
    assert np.allclose(derivative_at_zero(u, 1e-4), 1.j*P, atol=1e-6)
    assert np.allclose(derivative_at_zero(u, 1e-4, inverse=True), -1.j*P, atol=1e-6)

if __name__ == "__main__":
    test_perturbed_flow_trivial_cases()
    test_perturbed_flow_is_inner_for_inner_base()
    test_cocycle_defect_examples()
