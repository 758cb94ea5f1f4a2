"""
Splitting a cocycle as u_t = w v_t alpha_t(w^{-1}) with w near 1 and v smooth,
and the finite-difference diagnostics that grade how differentiable a cocycle is.

w is the Gaussian average sqrt(n/pi) int u_t e^{-n t^2} dt, evaluated by
Gauss-Hermite after t = s/sqrt(n) on the nodes with |s| <= 8, so u is only
needed on [-8/sqrt(n), 8/sqrt(n)].
"""
import logging
from dataclasses import dataclass
import numpy as np
from .cocycle_handle import CocycleBase, SimilarCocycle, CoboundaryCocycle
from .perturbation import cocycle_path
from ..algebra import identity, smallest_singular_value
from ..flow import FlowBase, InnerFlow
from ..quadrature import truncated_gauss_hermite
from ..errors import DimensionError, FlowDomainError, SingularCocycleError, SingularSimilarityError

logger = logging.getLogger(__name__)

DEFAULT_HERMITE_NODES = 64
DEFAULT_H_LIST = (1e-4, 5e-5, 2.5e-5)
SIMILARITY_SINGULAR_TOL = 1e-8
SUPPORT_HALF_WIDTH = 8.

def mollified_similarity(u : CocycleBase, flow : FlowBase, n : float, nodes : int = DEFAULT_HERMITE_NODES) -> np.ndarray:
    """w = (1/sqrt(pi)) sum_k w_k u(s_k/sqrt(n)) over the nodes with |s_k| <= 8.

    u is only evaluated on [-8/sqrt(n), 8/sqrt(n)], in one sweep for an ODE cocycle.

    Raises:
        FlowDomainError: that support leaves the time range of u
        SingularSimilarityError: w is not safely invertible; a larger n moves w toward u_0 = 1
    """
    if u.dim != flow.dim:
        raise DimensionError("cocycle has dim {}, flow has dim {}".format(u.dim, flow.dim))
    if not n > 0:
        raise ValueError("n must be positive, got {}".format(n))
    half = SUPPORT_HALF_WIDTH/np.sqrt(n)
    lo, hi = u.time_range()
    if -half < lo or half > hi:
        raise FlowDomainError("mollifier support [{:.4g}, {:.4g}] exceeds the cocycle range [{}, {}]".format(
            -half, half, lo, hi))
    s, weights = truncated_gauss_hermite(nodes, SUPPORT_HALF_WIDTH)
    values = cocycle_path(u, s/np.sqrt(n))
    w = np.tensordot(weights, values, axes=(0, 0))/np.sqrt(np.pi)
    sigma = smallest_singular_value(w)
    if sigma <= SIMILARITY_SINGULAR_TOL:
        logger.warning("mollified similarity singular at n=%g (sigma_min %.3e)", n, sigma)
        raise SingularSimilarityError("w is singular at n = {} (smallest singular value {:.3e}); increase n".format(n, sigma))
    return w

def similar_cocycle(w, u : CocycleBase, flow : FlowBase = None) -> SimilarCocycle:
    """v_t = w^{-1} u_t alpha_t(w); a cocycle whenever u is."""
    if flow is not None and flow is not u.flow:
        raise ValueError("similar_cocycle uses the base flow of u")
    try:
        return SimilarCocycle(w, u)
    except SingularCocycleError as e:
        raise SingularSimilarityError(str(e))

@dataclass(frozen=True)
class DifferentiabilityEstimate:
    """derivative: central difference at the finest step.
    stability: spread of the last three central differences, or the extrapolated
    one-sided gap when larger (a kink leaves a gap that does not close as h -> 0).
    """
    derivative: np.ndarray
    stability: float
    central_spread: float
    one_sided_gap: float

def differentiability_estimate(u : CocycleBase, t0 : float, h_list=DEFAULT_H_LIST) -> DifferentiabilityEstimate:
    h_list = [float(h) for h in h_list]
    if len(h_list) < 2 or any(b >= a for a, b in zip(h_list[:-1], h_list[1:])) or h_list[-1] <= 0:
        raise ValueError("h_list must hold at least two decreasing positive steps")
    center = u.at(t0)
    central, gaps = [], []
    for h in h_list:
        plus, minus = u.at(t0 + h), u.at(t0 - h)
        central.append((plus - minus)/(2*h))
        gaps.append(np.linalg.norm((plus - center)/h - (center - minus)/h))
    last = central[-3:]
    spread = max(np.linalg.norm(a - b) for a in last for b in last)
    h_prev, h_last = h_list[-2], h_list[-1]
    gap = gaps[-1] - h_last*(gaps[-2] - gaps[-1])/(h_prev - h_last)
    gap = max(0., float(gap))
    return DifferentiabilityEstimate(derivative=central[-1], stability=float(max(spread, gap)),
                                     central_spread=float(spread), one_sided_gap=gap)

@dataclass(frozen=True)
class SimilarityThreshold:
    n: float
    norm_w_minus_1: float
    found: bool

def similarity_threshold(u : CocycleBase, flow : FlowBase, eps : float, n0 : float = 1., n_max : float = 1e8,
                         nodes : int = DEFAULT_HERMITE_NODES) -> SimilarityThreshold:
    """Smallest n in n0, 2 n0, 4 n0, ... (up to n_max) with ||w(n) - 1||_F < eps."""
    n = float(n0)
    distance = np.inf
    while n <= n_max:
        try:
            distance = float(np.linalg.norm(mollified_similarity(u, flow, n, nodes) - identity(u.dim)))
        except SingularSimilarityError:
            distance = np.inf
        if distance < eps:
            return SimilarityThreshold(n=n, norm_w_minus_1=distance, found=True)
        n *= 2
    logger.info("no n <= %g brings ||w - 1|| below %g (last %.3e)", n_max, eps, distance)
    return SimilarityThreshold(n=n/2, norm_w_minus_1=distance, found=False)

def rough_coboundary(dim : int, omega : float, eps : float, rng) -> CoboundaryCocycle:
    """u_t = c^{-1} alpha_t(c) over Ad e^{i omega t diag(0, 1, ..)} with c = 1 + eps R, R strictly upper triangular.

    Oscillates at frequencies omega, 2 omega, ..., smooth but rough on the scale 1/omega.
    """
    flow = InnerFlow(1.j*omega*np.diag(np.arange(dim, dtype=float)))
    R = np.triu(rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim)), 1)
    if dim > 1:
        R /= np.linalg.norm(R)
    return CoboundaryCocycle(flow, identity(dim) + eps*R)

def test_mollified_similarity_examples():
    from ..flow import identity_flow, hamiltonian_flow
    from .cocycle_handle import FunctionCocycle, make_cocycle
    flow = identity_flow(2)
    one = FunctionCocycle(flow, lambda t: np.eye(2))
    assert np.allclose(mollified_similarity(one, flow, 3.), np.eye(2))
    h = np.array([[1., 0.], [0., 0.]])
    P = np.array([[0., 1.], [0., 0.]])
    base = hamiltonian_flow(h)
    u = make_cocycle("closed_form", base, P)
    distances = [np.linalg.norm(mollified_similarity(u, base, n) - np.eye(2)) for n in (1., 10., 100.)]
    assert distances[0] > distances[1] > distances[2]
    w10, w20 = mollified_similarity(u, base, 1e4), mollified_similarity(u, base, 2e4)
    assert np.linalg.norm(w10 - w20) < np.linalg.norm(mollified_similarity(u, base, 10.) - mollified_similarity(u, base, 20.))

def test_mollified_similarity_singular():
    import pytest
    from ..flow import identity_flow
    from .cocycle_handle import FunctionCocycle
    flow = identity_flow(2)
    odd = FunctionCocycle(flow, lambda t: np.diag([1., t]))
    with pytest.raises(SingularSimilarityError):
        mollified_similarity(odd, flow, 1.)

def test_similar_cocycle_round_trip_and_law():
    from ..flow import InnerFlow
    from .cocycle_handle import make_cocycle
    from .perturbation import cocycle_defects
    rng = np.random.default_rng(4)
    flow = InnerFlow(np.array([[0.4j, 0.8], [0., -0.3j]]))
    u = make_cocycle("closed_form", flow, np.array([[0.2, 0.6], [0., -0.1j]]))
    w = np.eye(2) + 0.3*(rng.normal(size=(2, 2)) + 1.j*rng.normal(size=(2, 2)))
    v = similar_cocycle(w, u, flow)
    assert np.allclose(similar_cocycle(np.eye(2), u).at(0.8), u.at(0.8))
    for s, t in rng.uniform(-2, 2, size=(10, 2)):
        assert max(cocycle_defects(flow, v, s, t)) < 1e-8
        assert np.linalg.norm(w@v.at(t)@flow.apply(t, np.linalg.inv(w)) - u.at(t)) < 1e-10

def test_differentiability_estimate_examples():
    from ..flow import hamiltonian_flow, identity_flow
    from .cocycle_handle import FunctionCocycle, make_cocycle
    h = np.array([[0.5, 0.2], [0.2, -0.3]])
    P = np.array([[0.1, 0.4], [0., 0.2j]])
    u = make_cocycle("closed_form", hamiltonian_flow(h), P)
    estimate = differentiability_estimate(u, 0.)
    assert np.allclose(estimate.derivative, 1.j*P, atol=1e-7)
    assert estimate.stability < 1e-6
    constant = FunctionCocycle(identity_flow(2), lambda t: np.eye(2))
    assert np.allclose(differentiability_estimate(constant, 0.3).derivative, 0)
    kinked = FunctionCocycle(identity_flow(2), lambda t: np.array([[1., abs(t)], [0., 1.]]))
    for h_list in ([1e-2, 5e-3, 2.5e-3], [1e-4, 5e-5, 2.5e-5]):
        assert differentiability_estimate(kinked, 0., h_list).stability >= 0.1

def test_mollified_similarity_tabulated():
    import pytest
    from ..flow import hamiltonian_flow
    from .cocycle_handle import TabulatedCocycle, make_cocycle
    base = hamiltonian_flow(np.diag([1., 0.]))
    P = np.array([[0., 1.], [0., 0.]])
    u = make_cocycle("closed_form", base, P)
    tab = TabulatedCocycle.from_cocycle(u, np.linspace(-3, 3, 601))
    w = mollified_similarity(tab, base, 9.)
    assert np.allclose(w, mollified_similarity(u, base, 9.), atol=1e-4)
    assert np.allclose(mollified_similarity(make_cocycle("ode", base, P), base, 9.), mollified_similarity(u, base, 9.), atol=1e-8)
    v = similar_cocycle(w, tab)
    for t in (-2.9, 0.37, 1.23, 3.):
        assert np.linalg.norm(w@v.at(t)@base.apply(t, np.linalg.inv(w)) - tab.at(t)) < 1e-10
    with pytest.raises(FlowDomainError):
        mollified_similarity(tab, base, 4.)

def test_differentiability_estimate_tabulated_kink():
    from ..flow import identity_flow
    from .cocycle_handle import TabulatedCocycle
    times = np.linspace(-0.1, 0.1, 201)
    kinked = TabulatedCocycle(identity_flow(2), times, [np.array([[1., abs(t)], [0., 1.]]) for t in times])
    estimate = differentiability_estimate(kinked, 0., [1e-2, 5e-3, 2.5e-3])
    assert estimate.stability >= 0.1
    assert np.allclose(estimate.derivative, 0, atol=1e-12)

def test_rough_coboundary_decomposition():
    from .perturbation import cocycle_defects
    rng = np.random.default_rng(6)
    omega = 40.
    h_list = [1e-3, 5e-4, 2.5e-4]
    u = rough_coboundary(3, omega, 0.2, rng)
    w = mollified_similarity(u, u.flow, omega**2/16)
    v = similar_cocycle(w, u)
    stability_u = differentiability_estimate(u, 0.3, h_list).stability
    stability_v = differentiability_estimate(v, 0.3, h_list).stability
    assert stability_v <= stability_u/10
    assert max(cocycle_defects(u.flow, v, 0.5, -0.25)) < 1e-8

def test_similarity_threshold():
    rng = np.random.default_rng(7)
    u = rough_coboundary(2, 10., 0.3, rng)
    result = similarity_threshold(u, u.flow, 1e-2)
    assert result.found and result.norm_w_minus_1 < 1e-2
    w = mollified_similarity(u, u.flow, result.n)
    assert np.isclose(np.linalg.norm(w - np.eye(2)), result.norm_w_minus_1)

if __name__ == "__main__":
    test_mollified_similarity_examples()
    test_mollified_similarity_tabulated()
    test_similar_cocycle_round_trip_and_law()
    test_differentiability_estimate_examples()
    test_differentiability_estimate_tabulated_kink()
    test_rough_coboundary_decomposition()
