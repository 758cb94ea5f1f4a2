import logging
import numpy as np
from scipy.linalg import solve, LinAlgError
from .expm import matrix_exponential
from ..algebra import SuperOp, as_element, identity, smallest_singular_value, invert
from ..errors import DimensionError, FlowDomainError, SingularCocycleError

logger = logging.getLogger(__name__)

SINGULAR_TOL = 1e-10
IMPLEMENTER_CACHE_SIZE = 4096

class FlowBase:
    """One-parameter group t -> alpha_t of automorphisms of dim x dim matrices.

    Subclasses implement ``superoperator``; ``apply`` may be overridden by a
    cheaper direct evaluation.
    """
    variant = "abstract"

    def __init__(self, dim):
        self.dim = int(dim)

    def superoperator(self, t : float) -> SuperOp:
        raise NotImplementedError("This is abstract class")

    def apply(self, t : float, A : np.ndarray) -> np.ndarray:
        return self.superoperator(t).apply(as_element(A, self.dim))

    @property
    def generator(self):
        """G with alpha_t = Ad e^{tG} when the flow is known to be inner, else None."""
        return None

    @property
    def is_inner(self) -> bool:
        return self.generator is not None

    def time_range(self) -> tuple:
        return (-np.inf, np.inf)

    def __repr__(self):
        return "{}(dim={})".format(type(self).__name__, self.dim)

class InnerFlow(FlowBase):
    """alpha_t(A) = e^{tG} A e^{-tG}; the Hamiltonian convention is G = ih."""
    variant = "inner"

    def __init__(self, G, name=None):
        G = as_element(G)
        super().__init__(G.shape[0])
        G.setflags(write=False)
        self._generator   = G
        self.name         = name
        self._implementers = {}

    @property
    def generator(self):
        return self._generator

    def implementer(self, t : float) -> tuple:
        """(e^{tG}, e^{-tG}), read-only and memoized per t."""
        t = float(t)
        pair = self._implementers.get(t)
        if pair is None:
            pair = (matrix_exponential(t*self._generator), matrix_exponential(-t*self._generator))
            for X in pair:
                X.setflags(write=False)
            if len(self._implementers) < IMPLEMENTER_CACHE_SIZE:
                self._implementers[t] = pair
        return pair

    def apply(self, t, A):
        A = as_element(A, self.dim)
        X, X_inv = self.implementer(t)
        return X@A@X_inv

    def superoperator(self, t):
        X, X_inv = self.implementer(t)
        return SuperOp.conjugation(X, X_inv)

def identity_flow(dim : int) -> InnerFlow:
    return InnerFlow(np.zeros((dim, dim)), name="identity")

def hamiltonian_flow(h : np.ndarray) -> InnerFlow:
    """Ad e^{ith}."""
    return InnerFlow(1.j*as_element(h))

class CocyclePerturbedFlow(FlowBase):
    """beta_t = Ad u_t o alpha_t for an alpha-cocycle u (anything with ``at(t)`` and ``flow``)."""
    variant = "perturbed"

    def __init__(self, cocycle):
        super().__init__(cocycle.flow.dim)
        self.base    = cocycle.flow
        self.cocycle = cocycle

    def _unit(self, t):
        u = self.cocycle.at(t)
        if smallest_singular_value(u) <= SINGULAR_TOL:
            logger.warning("cocycle singular at t=%g", t)
            raise SingularCocycleError("u_t is singular at t = {}".format(t))
        return u

    def apply(self, t, A):
        u = self._unit(t)
        B = self.base.apply(t, A)
        try:
            return solve(u.T, (u@B).T).T
        except LinAlgError as e:
            raise SingularCocycleError(str(e))

    def superoperator(self, t):
        u = self._unit(t)
        return SuperOp.conjugation(u, invert(u)).compose(self.base.superoperator(t))

    def time_range(self):
        return self.cocycle.time_range()

class TabulatedFlow(FlowBase):
    """Superoperators sampled on a sorted time grid, linearly interpolated in between."""
    variant = "tabulated"

    def __init__(self, times, superops):
        times = np.asarray(times, dtype=float)
        if times.ndim != 1 or len(times) == 0 or len(times) != len(superops):
            raise DimensionError("tabulated flow needs one superoperator per time")
        if np.any(np.diff(times) <= 0):
            raise FlowDomainError("tabulated flow times must be strictly increasing")
        dims = {S.dim for S in superops}
        if len(dims) != 1:
            raise DimensionError("tabulated superoperators have mixed dims {}".format(sorted(dims)))
        super().__init__(dims.pop())
        self.times    = times
        self.superops = list(superops)

    @classmethod
    def from_flow(cls, flow : FlowBase, times) -> "TabulatedFlow":
        return cls(times, [flow.superoperator(t) for t in times])

    def time_range(self):
        return (float(self.times[0]), float(self.times[-1]))

    def superoperator(self, t):
        lo, hi = self.time_range()
        if not lo <= t <= hi:
            raise FlowDomainError("t = {} outside tabulated range [{}, {}]".format(t, lo, hi))
        k = int(np.searchsorted(self.times, t, side="right")) - 1
        if k >= len(self.times) - 1:
            return self.superops[-1]
        weight = (t - self.times[k])/(self.times[k + 1] - self.times[k])
        if weight == 0:
            return self.superops[k]
        return SuperOp((1 - weight)*self.superops[k].matrix + weight*self.superops[k + 1].matrix)

class ConjugatedFlow(FlowBase):
    """sigma o alpha_t o sigma^{-1}."""
    variant = "conjugated"

    def __init__(self, sigma : SuperOp, sigma_inv : SuperOp, flow : FlowBase):
        if sigma.dim != flow.dim or sigma_inv.dim != flow.dim:
            raise DimensionError("sigma has dim {}, flow has dim {}".format(sigma.dim, flow.dim))
        super().__init__(flow.dim)
        self.sigma     = sigma
        self.sigma_inv = sigma_inv
        self.flow      = flow

    def apply(self, t, A):
        return self.sigma.apply(self.flow.apply(t, self.sigma_inv.apply(A)))

    def superoperator(self, t):
        return self.sigma.compose(self.flow.superoperator(t)).compose(self.sigma_inv)

    def time_range(self):
        return self.flow.time_range()

def eval_flow(flow : FlowBase, t : float, A : np.ndarray) -> np.ndarray:
    return flow.apply(float(t), A)

def flow_superoperator(flow : FlowBase, t : float) -> SuperOp:
    return flow.superoperator(float(t))

def test_eval_flow_examples():
    E12 = np.array([[0, 1], [0, 0]])
    flow = InnerFlow(np.diag([1.j, 0]))
    for t in (0., 0.3, -1.7):
        assert np.allclose(eval_flow(flow, t, E12), np.exp(1.j*t)*E12, atol=1e-14)
    D = np.diag([1., 2.])
    assert np.allclose(eval_flow(InnerFlow(np.diag([0.3, -1.j])), 2., D), D)
    assert np.allclose(eval_flow(identity_flow(3), 5., np.arange(9).reshape(3, 3)), np.arange(9).reshape(3, 3))
    X, X_inv = flow.implementer(0.3)
    assert flow.implementer(0.3)[0] is X and not X.flags.writeable
    assert np.allclose(X@X_inv, np.eye(2), atol=1e-14)

def test_flow_superoperator_matches_eval():
    rng = np.random.default_rng(0)
    G = rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3))
    G *= 1.5/np.linalg.norm(G)
    flow = InnerFlow(G)
    assert np.allclose(flow_superoperator(flow, 0.).matrix, np.eye(9), atol=1e-12)
    A = rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3))
    assert np.allclose(flow_superoperator(flow, 0.7).apply(A), eval_flow(flow, 0.7, A), atol=1e-12)
    composed = flow_superoperator(flow, 0.4).compose(flow_superoperator(flow, -1.1))
    assert np.allclose(composed.matrix, flow_superoperator(flow, -0.7).matrix, atol=1e-10)

def test_inner_flow_group_and_automorphism_laws():
    rng = np.random.default_rng(11)
    for _ in range(20):
        dim = rng.integers(2, 7)
        G = rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim))
        G *= rng.uniform(0, 2)/np.linalg.norm(G)
        flow = InnerFlow(G)
        A = rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim))
        B = rng.normal(size=(dim, dim))
        s, t = rng.uniform(-2, 2, size=2)
        assert np.linalg.norm(flow.apply(s, flow.apply(t, A)) - flow.apply(s + t, A)) <= 1e-9*np.linalg.norm(A)
        lhs = flow.apply(t, A@B)
        assert np.linalg.norm(lhs - flow.apply(t, A)@flow.apply(t, B)) <= 1e-9*np.linalg.norm(lhs)

def test_inner_flow_preserves_nest_algebra():
    from ..algebra import build_nest_algebra, project, contains
    rng = np.random.default_rng(4)
    spec = build_nest_algebra(4, [0, 2, 4])
    flow = InnerFlow(project(spec, rng.normal(size=(4, 4)) + 1.j*rng.normal(size=(4, 4))))
    A = project(spec, rng.normal(size=(4, 4)))
    for t in (-2., 0.5, 2.):
        assert contains(spec, flow.apply(t, A), tol=1e-9)

def test_tabulated_flow():
    import pytest
    flow  = InnerFlow(np.diag([1.j, 0]))
    table = TabulatedFlow.from_flow(flow, np.linspace(-1, 1, 201))
    A = np.array([[0, 1], [0, 0]])
    assert np.allclose(table.apply(0.5, A), flow.apply(0.5, A))
    assert np.allclose(table.apply(0.503, A), flow.apply(0.503, A), atol=1e-4)
    with pytest.raises(FlowDomainError):
        table.apply(1.5, A)

def test_conjugated_flow():
    rng = np.random.default_rng(2)
    S = np.eye(3) + 0.3*rng.normal(size=(3, 3))
    G = 1.j*np.diag([1., -0.5, 2.])
    sigma = SuperOp.conjugation(S)
    flow = ConjugatedFlow(sigma, SuperOp.conjugation(np.linalg.inv(S)), InnerFlow(G))
    expected = InnerFlow(S@G@np.linalg.inv(S))
    A = rng.normal(size=(3, 3))
    for t in (-1., 0.25, 2.):
        assert np.allclose(flow.apply(t, A), expected.apply(t, A), atol=1e-10)

if __name__ == "__main__":
    test_eval_flow_examples()
    test_flow_superoperator_matches_eval()
    test_inner_flow_group_and_automorphism_laws()
