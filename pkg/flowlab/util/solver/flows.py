import logging
from dataclasses import dataclass, replace
import numpy as np
from .derivation import DerivationSolution, inner_derivation_solve
from ..algebra import NestAlgebraSpec, SuperOp, superop_norm, invert
from ..flow import FlowBase, InnerFlow, ConjugatedFlow, GrowthBound, generator_superop, matrix_exponential, DEFAULT_H_STEP
from ..cocycle import ode_cocycle
from ..errors import NotInnerError, SingularCocycleError, SingularSimilarityError

logger = logging.getLogger(__name__)

CHECK_TIMES = (0.5, 1.)
INVERSE_TOL = 1e-10

def _reconjugation_error(flow : FlowBase, spec : NestAlgebraSpec, implementer) -> float:
    """max over check times and basis E of ||alpha_t(E) - X_t E X_t^{-1}||_F for X_t = implementer(t)."""
    worst = 0.
    for t in CHECK_TIMES:
        X = implementer(t)
        X_inv = invert(X, NotInnerError)
        for E in spec.basis():
            worst = max(worst, float(np.linalg.norm(flow.apply(t, E) - X@E@X_inv)))
    return worst

def extract_flow_generator(flow : FlowBase, spec : NestAlgebraSpec, h_step : float = DEFAULT_H_STEP) -> DerivationSolution:
    """Trace-free P with alpha_t = Ad e^{tP}, verified by reconjugation at t = 0.5 and 1."""
    solution = inner_derivation_solve(generator_superop(flow, h_step), spec)
    verification = _reconjugation_error(flow, spec, lambda t: matrix_exponential(t*solution.P))
    if verification > 1e-6:
        logger.warning("extracted generator reconjugates with error %.3e", verification)
    return replace(solution, verification=verification)

def relate_flows(flowA : FlowBase, flowB : FlowBase, spec : NestAlgebraSpec, h_step : float = DEFAULT_H_STEP) -> DerivationSolution:
    """P with delta_A = delta_B + ad P.

    The check conjugates beta_t by the cocycle of beta for the perturbation -iP,
    which is e^{tP} whenever beta fixes P.
    """
    if flowA.dim != flowB.dim:
        raise ValueError("flows have dims {} and {}".format(flowA.dim, flowB.dim))
    D = generator_superop(flowA, h_step) - generator_superop(flowB, h_step)
    solution = inner_derivation_solve(D, spec)
    worst = 0.
    for t in CHECK_TIMES:
        w = ode_cocycle(flowB, -1.j*solution.P, t)
        w_inv = invert(w, SingularCocycleError)
        for E in spec.basis():
            worst = max(worst, float(np.linalg.norm(flowA.apply(t, E) - w@flowB.apply(t, E)@w_inv)))
    if worst > 1e-6:
        logger.warning("related flows reconjugate with error %.3e", worst)
    return replace(solution, verification=worst)

@dataclass(frozen=True)
class FlowDistanceBound:
    t: float
    lhs: float
    rhs: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs*(1 + 1e-12) + 1e-14

def flow_distance_bound(flowA : FlowBase, flowB : FlowBase, t : float, bound : GrowthBound) -> FlowDistanceBound:
    """||alpha_t o beta_{-t} - id|| against M_beta e^{xi_beta |t|} ||alpha_t - beta_t||, frobenius_induced."""
    t = float(t)
    A_t, B_t = flowA.superoperator(t), flowB.superoperator(t)
    lhs = superop_norm(A_t.compose(flowB.superoperator(-t)) - SuperOp.identity(flowA.dim))
    rhs = bound.at(t)*superop_norm(A_t - B_t)
    return FlowDistanceBound(t=t, lhs=lhs, rhs=rhs)

def conjugate_flow(sigma : SuperOp, sigma_inv : SuperOp, flow : FlowBase) -> FlowBase:
    """sigma o alpha_t o sigma^{-1}; stays inner with generator S G S^{-1} when sigma = Ad S and alpha is inner.

    Raises:
        SingularSimilarityError: sigma_inv is not the inverse of sigma
    """
    defect = sigma.compose(sigma_inv).distance(SuperOp.identity(sigma.dim))
    if defect > INVERSE_TOL*max(1., np.linalg.norm(sigma.matrix)*np.linalg.norm(sigma_inv.matrix)):
        raise SingularSimilarityError("sigma o sigma_inv differs from the identity by {:.3e}".format(defect))
    if flow.is_inner and sigma.implementer is not None:
        S = sigma.implementer
        return InnerFlow(S@flow.generator@invert(S, SingularSimilarityError))
    return ConjugatedFlow(sigma, sigma_inv, flow)

def _random_triangular(rng, dim, size):
    X = np.triu(rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim)))
    return size*X/np.linalg.norm(X)

def test_extract_flow_generator():
    from ..algebra import build_nest_algebra, upper_triangular_algebra
    from ..flow import identity_flow
    spec = upper_triangular_algebra(3)
    assert np.allclose(extract_flow_generator(identity_flow(3), spec).P, 0)
    rng = np.random.default_rng(8)
    P0 = _random_triangular(rng, 3, 1.)
    P0 -= np.trace(P0)/3*np.eye(3)
    solution = extract_flow_generator(InnerFlow(P0), spec)
    assert np.linalg.norm(solution.P - P0) < 1e-7
    assert solution.verification < 1e-6
    traced = np.array([[1., 0.5], [0., 0.2j]])
    shifted = extract_flow_generator(InnerFlow(traced), build_nest_algebra(2, [0, 1, 2])).P
    assert np.allclose(shifted, traced - np.trace(traced)/2*np.eye(2), atol=1e-7)

def test_relate_flows():
    from ..algebra import upper_triangular_algebra
    from ..flow import identity_flow
    rng = np.random.default_rng(10)
    spec = upper_triangular_algebra(3)
    A = InnerFlow(_random_triangular(rng, 3, 1.))
    B = InnerFlow(_random_triangular(rng, 3, 1.))
    assert np.allclose(relate_flows(A, A, spec).P, 0)
    forward, backward = relate_flows(A, B, spec), relate_flows(B, A, spec)
    assert np.allclose(forward.P, -backward.P, atol=1e-8)
    assert forward.verification < 1e-6
    P0 = A.generator
    from_identity = relate_flows(A, identity_flow(3), spec)
    assert np.allclose(from_identity.P, P0 - np.trace(P0)/3*np.eye(3), atol=1e-7)

def test_flow_distance_bound():
    from ..flow import growth_bound
    rng = np.random.default_rng(11)
    A = InnerFlow(_random_triangular(rng, 2, 1.))
    B = InnerFlow(_random_triangular(rng, 2, 1.))
    bound = growth_bound(B, np.linspace(-1, 1, 21))
    for t in CHECK_TIMES:
        assert flow_distance_bound(A, B, t, bound).passed

def test_conjugate_flow():
    import pytest
    from ..flow import TabulatedFlow
    rng = np.random.default_rng(12)
    flow = InnerFlow(_random_triangular(rng, 2, 1.))
    same = conjugate_flow(SuperOp.identity(2), SuperOp.identity(2), flow)
    assert np.allclose(same.generator, flow.generator)
    S = np.array([[1., 2.], [0., 1.]])
    sigma = SuperOp.conjugation(S)
    sigma_inv = SuperOp.conjugation(np.linalg.inv(S))
    conjugated = conjugate_flow(sigma, sigma_inv, flow)
    assert conjugated.is_inner
    A = rng.normal(size=(2, 2))
    for t in (-0.6, 1.2):
        expected = sigma.apply(flow.apply(t, sigma_inv.apply(A)))
        assert np.allclose(conjugated.apply(t, A), expected, atol=1e-10)
    table = TabulatedFlow.from_flow(flow, np.linspace(-2, 2, 41))
    general = conjugate_flow(sigma, sigma_inv, table)
    assert not general.is_inner
    s, t = 0.3, 0.5
    assert np.allclose(general.apply(s + t, A), general.apply(s, general.apply(t, A)), atol=1e-10)
    with pytest.raises(SingularSimilarityError):
        conjugate_flow(sigma, sigma, flow)

if __name__ == "__main__":
    test_extract_flow_generator()
    test_relate_flows()
    test_conjugate_flow()
