import logging
import numpy as np
from .flow_handle import FlowBase, InnerFlow, identity_flow
from ..algebra import SuperOp
from ..errors import GeneratorStepError

logger = logging.getLogger(__name__)

DEFAULT_H_STEP = 1e-2
CANCELLATION_FLOOR = 1e-10

def central_difference(flow : FlowBase, h : float) -> np.ndarray:
    return (flow.superoperator(h).matrix - flow.superoperator(-h).matrix)/(2*h)

def generator_superop(flow : FlowBase, h_step : float = DEFAULT_H_STEP) -> SuperOp:
    """Infinitesimal generator lim (alpha_t - id)/t as a superoperator.

    Central differences at h and h/2 are combined by one Richardson step.
    A third difference at h/4 guards against cancellation: if halving the step
    makes successive differences grow, the step is too small.

    Raises:
        GeneratorStepError: refinement increased the discrepancy
    """
    if not h_step > 0:
        raise ValueError("h_step must be positive, got {}".format(h_step))
    d1 = central_difference(flow, h_step)
    d2 = central_difference(flow, h_step/2)
    d4 = central_difference(flow, h_step/4)
    e1 = np.linalg.norm(d2 - d1)
    e2 = np.linalg.norm(d4 - d2)
    scale = max(1., np.linalg.norm(d2))
    if e2 > e1 > 0 and e2 > CANCELLATION_FLOOR*scale:
        logger.warning("generator refinement grew from %.3e to %.3e at h=%g", e1, e2, h_step)
        raise GeneratorStepError("step {} too small: refinement discrepancy grew from {:.3e} to {:.3e}".format(h_step, e1, e2))
    return SuperOp((4*d2 - d1)/3)

def test_generator_examples():
    assert np.allclose(generator_superop(identity_flow(2)).matrix, 0)
    G = np.diag([1.j, 0])
    E12 = np.array([[0, 1], [0, 0]])
    D = generator_superop(InnerFlow(G))
    assert np.allclose(D.apply(E12), 1.j*E12, atol=1e-8)

def test_generator_matches_commutator_and_is_derivation():
    rng = np.random.default_rng(1)
    for dim in (2, 3, 4):
        G = rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim))
        G *= 2/np.linalg.norm(G)
        D = generator_superop(InnerFlow(G))
        assert np.allclose(D.matrix, SuperOp.ad(G).matrix, atol=1e-7)
        A = rng.normal(size=(dim, dim))
        B = rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim))
        leibniz = D.apply(A@B) - D.apply(A)@B - A@D.apply(B)
        assert np.linalg.norm(leibniz) <= 1e-7*np.linalg.norm(A)*np.linalg.norm(B)*np.linalg.norm(G)
        assert np.allclose(D.apply(A + B), D.apply(A) + D.apply(B))

class _NoisyFlow(FlowBase):
    """Linear in t plus a jump of size 1e-9 at t = 0, mimicking roundoff."""
    def __init__(self):
        super().__init__(2)
        self.slope = SuperOp.ad(np.array([[0., 1.], [0., 0.]])).matrix
        self.noise = np.eye(4)

    def superoperator(self, t):
        return SuperOp(np.eye(4) + t*self.slope + 1e-9*np.sign(t)*self.noise)

def test_generator_step_too_small():
    import pytest
    with pytest.raises(GeneratorStepError):
        generator_superop(_NoisyFlow(), h_step=1e-2)

if __name__ == "__main__":
    test_generator_examples()
    test_generator_matches_commutator_and_is_derivation()
