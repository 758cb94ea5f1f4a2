import logging
from dataclasses import dataclass
import numpy as np
from .flow_handle import FlowBase, InnerFlow, identity_flow
from ..algebra import superop_norm
from ..errors import FlowDomainError

logger = logging.getLogger(__name__)

XI_MARGIN = 1e-6
REFINE_FACTOR = 10

@dataclass(frozen=True)
class GrowthBound:
    """||alpha_t|| <= M e^{xi |t|}."""
    M: float
    xi: float

    def __post_init__(self):
        if not self.M >= 1:
            raise ValueError("growth bound needs M >= 1, got {}".format(self.M))

    def at(self, t : float) -> float:
        return self.M*np.exp(self.xi*abs(t))

def flow_norms(flow : FlowBase, times, kind="frobenius_induced") -> np.ndarray:
    return np.array([superop_norm(flow.superoperator(t), kind) for t in times])

def refine_grid(grid, factor : int = REFINE_FACTOR) -> np.ndarray:
    """Sorted grid with ``factor - 1`` equally spaced points inserted in every gap."""
    grid = np.unique(np.asarray(grid, dtype=float))
    if len(grid) < 2:
        return grid
    pieces = [np.linspace(a, b, factor, endpoint=False) for a, b in zip(grid[:-1], grid[1:])]
    return np.concatenate(pieces + [grid[-1:]])

def _fit(times, norms) -> GrowthBound:
    nonzero = times != 0
    xi = 0.
    if np.any(nonzero):
        xi = max(0., float(np.max(np.log(norms[nonzero])/np.abs(times[nonzero]))))
    xi += XI_MARGIN
    M = max(1., float(np.max(norms*np.exp(-xi*np.abs(times)))))
    return GrowthBound(M=M, xi=xi)

def bound_holds(bound : GrowthBound, times, norms, rtol : float = 1e-12) -> bool:
    return bool(np.all(norms <= bound.M*np.exp(bound.xi*np.abs(times))*(1 + rtol)))

def growth_bound(flow : FlowBase, grid, kind : str = "frobenius_induced") -> GrowthBound:
    """Fit (M, xi) with ||alpha_t|| <= M e^{xi|t|} on ``grid``, then certify it on the 10x refined grid.

    When the refined grid violates the fit, the fit is redone on the union of both grids.
    Bounds are cached on the flow per grid and norm.

    Args:
        flow (FlowBase): the flow
        grid (array-like): sample times, 0 allowed
        kind (str): superoperator norm
    Returns:
        GrowthBound: the certified pair
    """
    grid = np.unique(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise FlowDomainError("growth_bound needs a nonempty grid")
    cache = flow.__dict__.setdefault("_growth_bounds", {})
    key = (kind, grid.tobytes())
    if key in cache:
        return cache[key]
    norms = flow_norms(flow, grid, kind)
    bound = _fit(grid, norms)

    refined = refine_grid(grid)
    refined_norms = flow_norms(flow, refined, kind)
    if not bound_holds(bound, refined, refined_norms):
        logger.info("growth bound M=%.6g xi=%.6g violated on refined grid, refitting", bound.M, bound.xi)
        bound = _fit(refined, refined_norms)
    logger.debug("growth bound M=%.6g xi=%.6g on %d points", bound.M, bound.xi, len(refined))
    cache[key] = bound
    return bound

def uniform_continuity_modulus(flow : FlowBase, t0 : float, h_list) -> np.ndarray:
    """||alpha_{t0+h} - alpha_{t0}|| (frobenius_induced) for each h."""
    reference = flow.superoperator(t0)
    return np.array([superop_norm(flow.superoperator(t0 + h) - reference) for h in h_list])

def test_growth_bound_examples():
    grid = np.linspace(-2, 2, 41)
    bound = growth_bound(identity_flow(3), grid)
    assert np.isclose(bound.M, 1) and np.isclose(bound.xi, 0, atol=1e-5)
    H = np.array([[1, 0.5j], [-0.5j, -2]])
    bound = growth_bound(InnerFlow(1.j*H), grid)
    assert np.isclose(bound.M, 1) and np.isclose(bound.xi, 0, atol=1e-5)

def test_growth_bound_nilpotent_refined_grid():
    flow = InnerFlow(np.array([[0, 1], [0, 0]]))
    grid = np.round(np.linspace(-2, 2, 41), 12)
    bound = growth_bound(flow, grid)
    fine = np.linspace(-2, 2, 401)
    assert bound_holds(bound, fine, flow_norms(flow, fine), rtol=1e-9)
    assert bound.M >= 1
    assert growth_bound(flow, list(grid)[::-1]) is bound
    assert growth_bound(InnerFlow(flow.generator), grid) == bound

def test_growth_bound_random_flows():
    rng = np.random.default_rng(8)
    grid = np.linspace(-2, 2, 21)
    for _ in range(10):
        dim = rng.integers(2, 5)
        G = rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim))
        G *= rng.uniform(0, 2)/np.linalg.norm(G)
        flow = InnerFlow(G)
        bound = growth_bound(flow, grid)
        fine = refine_grid(grid)
        assert bound_holds(bound, fine, flow_norms(flow, fine), rtol=1e-9)

def test_growth_bound_rejects_empty_grid():
    import pytest
    with pytest.raises(FlowDomainError):
        growth_bound(identity_flow(2), [])

def test_uniform_continuity_modulus_vanishes():
    flow = InnerFlow(np.array([[0.5j, 1], [0, -0.5j]]))
    modulus = uniform_continuity_modulus(flow, 0.3, [1e-1, 1e-2, 1e-3])
    assert np.all(np.diff(modulus) < 0)
    assert modulus[-1] < 1e-2

if __name__ == "__main__":
    test_growth_bound_examples()
    test_growth_bound_nilpotent_refined_grid()
    test_growth_bound_random_flows()
