import logging
import numpy as np
from .closed_form import closed_form_from_generator
from .dyson import dyson_cocycle, DEFAULT_ORDER, DEFAULT_NODES
from .ode import ode_cocycle, DEFAULT_STEPS
from ..algebra import as_element, identity, smallest_singular_value, invert
from ..flow import FlowBase, InnerFlow, GrowthBound, growth_bound
from ..errors import FlowDomainError, SingularCocycleError

logger = logging.getLogger(__name__)

INVERTIBILITY_TOL = 1e-10
COCYCLE_METHODS = ("dyson", "ode", "closed_form")

class CocycleBase:
    """A map t -> u_t over a base flow, tagged with how it was produced."""
    provenance = "abstract"

    def __init__(self, flow : FlowBase):
        self.flow = flow
        self.dim  = flow.dim

    def at(self, t : float) -> np.ndarray:
        raise NotImplementedError("This is abstract class")

    def __call__(self, t):
        return self.at(t)

    def time_range(self) -> tuple:
        return self.flow.time_range()

    def inverse_at(self, t : float) -> np.ndarray:
        u = self.at(t)
        if smallest_singular_value(u) <= INVERTIBILITY_TOL:
            raise SingularCocycleError("u_t singular at t = {}".format(t))
        return invert(u)

    def __repr__(self):
        return "{}(provenance={}, dim={})".format(type(self).__name__, self.provenance, self.dim)

class ClosedFormCocycle(CocycleBase):
    """u_t^P = e^{t(G+iP)} e^{-tG} over an inner base flow Ad e^{tG}."""
    provenance = "closed_form"

    def __init__(self, flow : InnerFlow, P):
        if not flow.is_inner:
            raise FlowDomainError("closed_form cocycle needs an inner base flow")
        super().__init__(flow)
        self.P = as_element(P, flow.dim)

    def at(self, t):
        return closed_form_from_generator(self.flow.generator, self.P, float(t))

class DysonCocycle(CocycleBase):
    provenance = "dyson"

    def __init__(self, flow, P, order=DEFAULT_ORDER, nodes_per_level=DEFAULT_NODES, bound : GrowthBound = None):
        super().__init__(flow)
        self.P               = as_element(P, flow.dim)
        self.order           = order
        self.nodes_per_level = nodes_per_level
        self.bound           = bound

    def result(self, t):
        return dyson_cocycle(self.flow, self.P, float(t), self.order, self.nodes_per_level, bound=self.bound)

    def at(self, t):
        return self.result(t).u

class OdeCocycle(CocycleBase):
    provenance = "ode"

    def __init__(self, flow, P, steps=DEFAULT_STEPS):
        super().__init__(flow)
        self.P     = as_element(P, flow.dim)
        self.steps = steps

    def at(self, t):
        return ode_cocycle(self.flow, self.P, float(t), self.steps)

class TabulatedCocycle(CocycleBase):
    """Samples u on a sorted grid, linearly interpolated; rejects times off the grid range."""
    provenance = "tabulated"

    def __init__(self, flow, times, values):
        super().__init__(flow)
        times = np.asarray(times, dtype=float)
        values = np.array([as_element(u, flow.dim) for u in values])
        if len(times) != len(values) or len(times) == 0:
            raise ValueError("tabulated cocycle needs one value per time")
        if np.any(np.diff(times) <= 0):
            raise FlowDomainError("tabulated cocycle times must be strictly increasing")
        self.times  = times
        self.values = values

    @classmethod
    def from_cocycle(cls, cocycle : CocycleBase, times) -> "TabulatedCocycle":
        return cls(cocycle.flow, times, [cocycle.at(t) for t in times])

    def time_range(self):
        return (float(self.times[0]), float(self.times[-1]))

    def at(self, t):
        t = float(t)
        lo, hi = self.time_range()
        if not lo <= t <= hi:
            raise FlowDomainError("t = {} outside tabulated range [{}, {}]".format(t, lo, hi))
        k = int(np.searchsorted(self.times, t, side="right")) - 1
        if k >= len(self.times) - 1:
            return self.values[-1].copy()
        weight = (t - self.times[k])/(self.times[k + 1] - self.times[k])
        return (1 - weight)*self.values[k] + weight*self.values[k + 1]

class FunctionCocycle(CocycleBase):
    """Wraps a callable t -> u_t; no cocycle law is assumed."""
    provenance = "function"

    def __init__(self, flow, func, time_range=None):
        super().__init__(flow)
        self.func = func
        self._range = time_range

    def time_range(self):
        return self._range if self._range is not None else self.flow.time_range()

    def at(self, t):
        return as_element(self.func(float(t)), self.dim)

class SimilarCocycle(CocycleBase):
    """v_t = w^{-1} u_t alpha_t(w)."""
    provenance = "similar"

    def __init__(self, w, cocycle : CocycleBase):
        super().__init__(cocycle.flow)
        w = as_element(w, self.dim)
        if smallest_singular_value(w) <= INVERTIBILITY_TOL:
            raise SingularCocycleError("similarity element w is singular")
        self.w       = w
        self.w_inv   = invert(w)
        self.cocycle = cocycle

    def time_range(self):
        return self.cocycle.time_range()

    def at(self, t):
        t = float(t)
        return self.w_inv@self.cocycle.at(t)@self.flow.apply(t, self.w)

class CoboundaryCocycle(CocycleBase):
    """u_t = c^{-1} alpha_t(c); a cocycle for every invertible c."""
    provenance = "coboundary"

    def __init__(self, flow, c):
        super().__init__(flow)
        c = as_element(c, flow.dim)
        if smallest_singular_value(c) <= INVERTIBILITY_TOL:
            raise SingularCocycleError("coboundary element is singular")
        self.c     = c
        self.c_inv = invert(c)

    def at(self, t):
        return self.c_inv@self.flow.apply(float(t), self.c)

def make_cocycle(method : str, flow : FlowBase, P, order=DEFAULT_ORDER, nodes_per_level=DEFAULT_NODES,
                 steps=DEFAULT_STEPS) -> CocycleBase:
    """The perturbation cocycle u^P over ``flow`` built by ``method``."""
    if method == "dyson":
        return DysonCocycle(flow, P, order=order, nodes_per_level=nodes_per_level)
    if method == "ode":
        return OdeCocycle(flow, P, steps=steps)
    if method == "closed_form":
        return ClosedFormCocycle(flow, P)
    raise ValueError("Unknown cocycle method, choose from {}".format(COCYCLE_METHODS))

def test_cocycle_starts_at_identity():
    from ..flow import hamiltonian_flow
    h = np.array([[0.5, 0.2], [0.2, -1.]])
    P = np.array([[0.1, 1.], [0., 0.3j]])
    flow = hamiltonian_flow(h)
    for method in COCYCLE_METHODS:
        assert np.allclose(make_cocycle(method, flow, P).at(0.), np.eye(2), atol=1e-12)

def test_methods_agree():
    from ..flow import hamiltonian_flow
    rng = np.random.default_rng(12)
    h = rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3))
    h = (h + h.T.conj())
    h *= 1.2/np.linalg.norm(h)
    P = rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3))
    P *= 1.5/np.linalg.norm(P)
    flow = hamiltonian_flow(h)
    cocycles = [make_cocycle(method, flow, P) for method in COCYCLE_METHODS]
    for t in (-2., 1.3):
        values = [u.at(t) for u in cocycles]
        for a in values:
            for b in values:
                assert np.linalg.norm(a - b) < 1e-7

def test_similar_and_coboundary_cocycles():
    from ..flow import InnerFlow
    flow = InnerFlow(np.array([[0.3j, 1.], [0., -0.2j]]))
    u = make_cocycle("closed_form", flow, np.array([[0.2, 0.5], [0., 0.1]]))
    w = np.array([[1.2, 0.3], [0., 0.9]])
    v = SimilarCocycle(w, u)
    for t in (-1., 0.5):
        assert np.allclose(w@v.at(t)@flow.apply(t, np.linalg.inv(w)), u.at(t))
    assert np.allclose(SimilarCocycle(np.eye(2), u).at(0.7), u.at(0.7))
    c = CoboundaryCocycle(flow, w)
    s, t = 0.4, -1.1
    assert np.allclose(c.at(s + t), c.at(s)@flow.apply(s, c.at(t)))

def test_tabulated_cocycle_range():
    import pytest
    from ..flow import identity_flow
    table = TabulatedCocycle(identity_flow(2), [0., 1.], [np.eye(2), 2*np.eye(2)])
    assert np.allclose(table.at(0.25), 1.25*np.eye(2))
    with pytest.raises(FlowDomainError):
        table.at(-0.5)

if __name__ == "__main__":
    test_cocycle_starts_at_identity()
    test_methods_agree()
