"""
Time-ordered (Dyson) series for u' = i u alpha_t(P), u_0 = 1:

    u_t = 1 + sum_n i^n int_0^t dt_1 int_0^{t_1} dt_2 ... alpha_{t_n}(P) ... alpha_{t_1}(P)

Level n is rebuilt from level n-1 on the nodes of one composite Gauss-Legendre
grid, F_n = C (F_{n-1} L) with L(s) = i alpha_s(P) and C the cumulative
integration matrix, so every level costs one pass over the grid.
"""
import logging
import math
from dataclasses import dataclass
import numpy as np
from scipy.special import gammainc
from ..algebra import SuperOp, as_element, identity
from ..quadrature import time_ordered_grid
from ..flow import FlowBase, GrowthBound, growth_bound
from ..errors import DysonDivergenceError

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 20
DEFAULT_NODES = 32
BUDGET_RTOL   = 1e-10
MAX_DOUBLINGS = 3
BOUND_POINTS = 41

@dataclass(frozen=True)
class DysonResult:
    u: np.ndarray
    truncation_order: int
    tail_bound: float
    quadrature_budget: float

def dyson_tail_bound(t : float, P_norm : float, bound : GrowthBound, order : int) -> float:
    """sum_{k > order} x^k / k! with x = |t| M e^{xi|t|} ||P||."""
    x = abs(t)*bound.at(t)*P_norm
    if x == 0:
        return 0.
    return float(np.exp(x)*gammainc(order + 1, x))

def orbit_on_nodes(flow : FlowBase, P : np.ndarray, nodes) -> np.ndarray:
    """alpha_s(P) stacked over the nodes."""
    return np.array([flow.apply(s, P) for s in nodes])

def time_ordered_sum(L : np.ndarray, grid, order : int, divergence_norm : float = None) -> np.ndarray:
    """Partial sum through ``order`` of the series solving Y' = Y L(s), Y_0 = 1, at s = grid.t.

    ``L`` holds L(s) on grid.nodes, shape (m, k, k). Levels are added in increasing order.
    """
    size  = L.shape[1]
    total = np.eye(size, dtype=complex)
    level = np.broadcast_to(np.eye(size, dtype=complex), L.shape)
    for n in range(1, order + 1):
        integrand = level@L
        total = total + np.tensordot(grid.weights, integrand, axes=(0, 0))
        if divergence_norm is not None and np.linalg.norm(total) > divergence_norm:
            raise DysonDivergenceError("partial sum of order {} has norm {:.3e} > {:.3e}".format(n, np.linalg.norm(total), divergence_norm))
        if n < order:
            level = np.tensordot(grid.cumulative, integrand, axes=(1, 0))
    return total

def bound_window(t : float, time_range=(-np.inf, np.inf)) -> np.ndarray:
    """Grid on [-T, T], T the smallest power of two >= max(|t|, 2) that the flow range allows, else |t|.

    Repeated calls over one flow share a cached growth bound.
    """
    T = 2.**max(1, math.ceil(math.log2(max(abs(t), 2.))))
    lo, hi = time_range
    if -T < lo or T > hi:
        T = abs(t)
    return np.linspace(-T, T, BOUND_POINTS)

def _series_at(flow, P, t, order, nodes, divergence_norm):
    grid = time_ordered_grid(t, nodes)
    L = 1.j*orbit_on_nodes(flow, P, grid.nodes)
    return time_ordered_sum(L, grid, order, divergence_norm)

def dyson_cocycle(flow : FlowBase, P : np.ndarray, t : float, order : int = DEFAULT_ORDER,
                  nodes_per_level : int = DEFAULT_NODES, bound : GrowthBound = None) -> DysonResult:
    """Truncated Dyson series of the perturbation cocycle u_t^P.

    Args:
        flow (FlowBase): base flow alpha
        P (np.ndarray): perturbation
        t (float): time, either sign
        order (int): truncation order N
        nodes_per_level (int): Gauss-Legendre nodes per unit panel
        bound (GrowthBound, optional): certified growth bound on [-|t|, |t|]; fitted on bound_window(t) when omitted
    Returns:
        DysonResult: partial sum, tail bound, and the node-doubling quadrature change
    """
    if order < 0:
        raise ValueError("order must be nonnegative, got {}".format(order))
    if nodes_per_level < 2:
        raise ValueError("nodes_per_level must be at least 2, got {}".format(nodes_per_level))
    P = as_element(P, flow.dim)
    t = float(t)
    P_norm = np.linalg.norm(P)
    if t == 0 or P_norm == 0:
        return DysonResult(u=identity(flow.dim), truncation_order=order, tail_bound=0., quadrature_budget=0.)
    if bound is None:
        bound = growth_bound(flow, bound_window(t, flow.time_range()))
    x = abs(t)*bound.at(t)*P_norm
    divergence_norm = np.sqrt(flow.dim)*np.exp(2*x)

    nodes = nodes_per_level
    u = _series_at(flow, P, t, order, nodes, divergence_norm)
    budget = np.inf
    for _ in range(MAX_DOUBLINGS):
        nodes *= 2
        finer = _series_at(flow, P, t, order, nodes, divergence_norm)
        budget = float(np.linalg.norm(finer - u))
        u = finer
        if budget <= BUDGET_RTOL*np.linalg.norm(u):
            break
    else:
        logger.warning("dyson quadrature at t=%g not settled after %d doublings (change %.3e)", t, MAX_DOUBLINGS, budget)
    return DysonResult(u=u, truncation_order=order, tail_bound=dyson_tail_bound(t, P_norm, bound, order),
                       quadrature_budget=budget)

def commutator_series(flow : FlowBase, P : np.ndarray, t : float, order : int = DEFAULT_ORDER,
                      nodes_per_level : int = DEFAULT_NODES) -> SuperOp:
    """Ad u_t^P as the time-ordered series of the superoperators i ad(alpha_s(P))."""
    P = as_element(P, flow.dim)
    grid = time_ordered_grid(float(t), nodes_per_level)
    L = np.array([1.j*SuperOp.ad(K).matrix for K in orbit_on_nodes(flow, P, grid.nodes)])
    return SuperOp(time_ordered_sum(L, grid, order))

def test_dyson_trivial_cases():
    from ..flow import identity_flow, InnerFlow
    flow = InnerFlow(np.diag([1.j, 0.]))
    result = dyson_cocycle(flow, np.zeros((2, 2)), 1.3)
    assert np.array_equal(result.u, np.eye(2)) and result.tail_bound == 0
    P = np.array([[0.2, 1.], [0.5j, -0.3]])
    result = dyson_cocycle(identity_flow(2), P, 0.7, order=1)
    assert np.allclose(result.u, np.eye(2) + 0.7j*P, atol=1e-14)

def test_dyson_matches_closed_form():
    from ..flow import InnerFlow
    E12 = np.array([[0, 1], [0, 0]])
    result = dyson_cocycle(InnerFlow(np.diag([1.j, 0.])), E12, 1., order=30)
    assert np.allclose(result.u, [[1, np.exp(1.j) - 1], [0, 1]], atol=1e-8)
    assert result.tail_bound >= 0 and result.quadrature_budget < 1e-9

def test_dyson_negative_time_is_inverse_direction():
    from ..flow import InnerFlow
    from .closed_form import closed_form_cocycle
    h = np.array([[0.4, 0.3 - 0.2j], [0.3 + 0.2j, -0.1]])
    P = np.array([[0.1, 0.6], [0.2j, 0.5]])
    for t in (-1.5, 2.):
        result = dyson_cocycle(InnerFlow(1.j*h), P, t)
        assert np.allclose(result.u, closed_form_cocycle(h, P, t), atol=1e-9)

def test_commutator_series_is_conjugation_by_cocycle():
    from ..flow import InnerFlow
    from .closed_form import closed_form_cocycle
    h = np.diag([1., 0.])
    P = np.array([[0.3, 0.5], [0., -0.2]])
    U = commutator_series(InnerFlow(1.j*h), P, 1.2)
    u = closed_form_cocycle(h, P, 1.2)
    assert np.allclose(U.matrix, SuperOp.conjugation(u).matrix, atol=1e-9)

def test_bound_window():
    assert np.array_equal(bound_window(0.3), np.linspace(-2, 2, BOUND_POINTS))
    assert np.array_equal(bound_window(-2.5), np.linspace(-4, 4, BOUND_POINTS))
    assert np.array_equal(bound_window(0.5, (-1., 1.)), np.linspace(-0.5, 0.5, BOUND_POINTS))

def test_tail_bound_decreases_with_order():
    bound = GrowthBound(M=1., xi=0.)
    tails = [dyson_tail_bound(2., 1.5, bound, N) for N in (5, 10, 20)]
    assert tails[0] > tails[1] > tails[2] > 0
    assert np.isclose(tails[0], np.exp(3.) - sum(3.**k/math.factorial(k) for k in range(6)))

if __name__ == "__main__":
    test_dyson_trivial_cases()
    test_bound_window()
    test_dyson_matches_closed_form()
