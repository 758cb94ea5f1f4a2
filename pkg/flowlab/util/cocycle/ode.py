import logging
import numpy as np
from ..algebra import as_element, identity
from ..flow import FlowBase, matrix_exponential

logger = logging.getLogger(__name__)

DEFAULT_STEPS = 2000
DEFAULT_STEPS_PER_UNIT = 1000

def _half_step_orbit(flow, P, start, stop, steps):
    """alpha_s(P) on s = start + j delta/2, j = 0 .. 2 steps.

    Inner flows propagate e^{sG} by the half-step exponential instead of
    exponentiating at every node.
    """
    G = flow.generator
    delta = (stop - start)/steps
    if G is None:
        return [flow.apply(s, P) for s in np.linspace(start, stop, 2*steps + 1)]
    step     = matrix_exponential(0.5*delta*G)
    step_inv = matrix_exponential(-0.5*delta*G)
    X        = matrix_exponential(start*G)
    X_inv    = matrix_exponential(-start*G)
    orbit = [X@P@X_inv]
    for _ in range(2*steps):
        X     = X@step
        X_inv = step_inv@X_inv
        orbit.append(X@P@X_inv)
    return orbit

def _rk4_segment(u, flow, P, start, stop, steps):
    """Advance u' = i u alpha_s(P) from ``start`` to ``stop`` with ``steps`` classical RK4 steps."""
    delta = (stop - start)/steps
    orbit = _half_step_orbit(flow, P, start, stop, steps)
    for n in range(steps):
        K0, K1, K2 = orbit[2*n], orbit[2*n + 1], orbit[2*n + 2]
        k1 = 1.j*u@K0
        k2 = 1.j*(u + 0.5*delta*k1)@K1
        k3 = 1.j*(u + 0.5*delta*k2)@K1
        k4 = 1.j*(u + delta*k3)@K2
        u  = u + (delta/6)*(k1 + 2*k2 + 2*k3 + k4)
    return u

def ode_cocycle(flow : FlowBase, P : np.ndarray, t : float, steps : int = DEFAULT_STEPS) -> np.ndarray:
    """u_t^P by ``steps`` uniform RK4 steps on [0, t]."""
    if steps < 1:
        raise ValueError("steps must be positive, got {}".format(steps))
    P = as_element(P, flow.dim)
    t = float(t)
    if t == 0:
        return identity(flow.dim)
    return _rk4_segment(identity(flow.dim), flow, P, 0., t, steps)

def ode_cocycle_path(flow : FlowBase, P : np.ndarray, times, steps_per_unit : int = DEFAULT_STEPS_PER_UNIT) -> np.ndarray:
    """u_t^P for every t in ``times`` from one sweep outward from 0 in each direction.

    Each segment between consecutive targets gets ceil(length * steps_per_unit) steps.

    Returns:
        np.ndarray: shape (len(times), dim, dim), in the order of ``times``
    """
    P = as_element(P, flow.dim)
    times = np.asarray(times, dtype=float)
    out = np.zeros((len(times), flow.dim, flow.dim), dtype=complex)
    for sign in (1., -1.):
        targets = sorted({abs(t) for t in times if np.sign(t) == sign})
        u, position = identity(flow.dim), 0.
        for target in targets:
            steps = max(1, int(np.ceil((target - position)*steps_per_unit)))
            u = _rk4_segment(u, flow, P, sign*position, sign*target, steps)
            position = target
            out[times == sign*target] = u
    out[times == 0] = identity(flow.dim)
    return out

def test_ode_trivial_cases():
    from ..flow import InnerFlow, identity_flow
    flow = InnerFlow(np.array([[0.5j, 1.], [0., 0.]]))
    assert np.allclose(ode_cocycle(flow, np.zeros((2, 2)), 1.4, steps=10), np.eye(2))
    P = np.array([[0.3, 1.], [-0.2j, 0.1]])
    assert np.allclose(ode_cocycle(identity_flow(2), P, 1., steps=1000), matrix_exponential(1.j*P), atol=1e-10)

def test_ode_matches_closed_form():
    from ..flow import InnerFlow
    from .closed_form import closed_form_cocycle
    rng = np.random.default_rng(3)
    h = rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3))
    h = h + h.T.conj()
    h *= 1.5/np.linalg.norm(h)
    P = rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3))
    P *= 1.5/np.linalg.norm(P)
    flow = InnerFlow(1.j*h)
    for t in (-2., 0.7):
        assert np.allclose(ode_cocycle(flow, P, t), closed_form_cocycle(h, P, t), atol=1e-9)

def test_ode_path_matches_single_runs():
    from ..flow import InnerFlow, TabulatedFlow
    h = np.array([[1., 0.5], [0., -0.5]])
    P = np.array([[0., 1.], [0., 0.2]])
    flow  = InnerFlow(1.j*h)
    times = np.array([0.5, -1., 0., 1.5, -0.25])
    path  = ode_cocycle_path(flow, P, times, steps_per_unit=500)
    for t, u in zip(times, path):
        assert np.allclose(u, ode_cocycle(flow, P, t, steps=2000), atol=1e-10)
    table = TabulatedFlow.from_flow(flow, np.linspace(-1, 1, 2001))
    assert np.allclose(ode_cocycle(table, P, 1., steps=1000), ode_cocycle(flow, P, 1., steps=1000), atol=1e-6)

if __name__ == "__main__":
    test_ode_trivial_cases()
    test_ode_matches_closed_form()
    test_ode_path_matches_single_runs()
