"""
Gaussian mollification of flow orbits.

    A_n = sqrt(n/pi) ∫ alpha_t(A) exp(-n t^2 - xi t) dt

Completing the square, t = s/sqrt(n) - xi/(2n), turns the weight into exp(-s^2)
times exp(xi^2/(4n)), so A_n is a Gauss–Hermite sum over the shifted orbit.
The same substitution evaluates the entire extension f_n(z) = alpha_z(A_n)
at complex z, the imaginary shift becoming an oscillating factor on the weights.
"""
import logging
from collections import namedtuple
from dataclasses import dataclass
from typing import Optional
import numpy as np
from scipy.integrate import quad
from scipy.special import erfcx
from ..algebra import as_element, norm
from ..flow import FlowBase, GrowthBound, growth_bound, matrix_exponential
from ..quadrature import truncated_gauss_hermite
from ..errors import FlowDomainError, SmoothingGrowthError

logger = logging.getLogger(__name__)

DEFAULT_HERMITE_NODES = 64
MIN_NODES = 8
SUPPORT_HALF_WIDTH = 8.
ORACLE_HALF_WIDTH = 12.
GROWTH_GRID = np.linspace(-2, 2, 41)

ProfileRow = namedtuple("ProfileRow", ["n", "diff_frobenius", "norm_frobenius", "quad_error_estimate"])

@dataclass(frozen=True)
class SmoothingResult:
    A_n: np.ndarray
    n: float
    xi: float
    quad_error_estimate: float
    weight_integral: float
    A: Optional[np.ndarray] = None

def gaussian_weight_integral(n : float, xi : float) -> float:
    """∫ exp(-n t^2 - xi t) dt = exp(xi^2/(4n)) sqrt(pi/n)."""
    if not n > 0:
        raise ValueError("n must be positive, got {}".format(n))
    return float(np.exp(xi*xi/(4*n))*np.sqrt(np.pi/n))

def weight_integral_oracle(n : float, xi : float) -> float:
    """Adaptive quadrature of the same integral over 12 standard deviations around its peak."""
    if not n > 0:
        raise ValueError("n must be positive, got {}".format(n))
    center = -xi/(2*n)
    half = ORACLE_HALF_WIDTH/np.sqrt(n)
    value, _ = quad(lambda t: np.exp(-n*t*t - xi*t), center - half, center + half,
                    points=[center], epsabs=0., epsrel=1e-13, limit=200)
    return float(value)

def smoothing_norm_bound(bound : GrowthBound, n : float, xi : float) -> float:
    """C with ||A_n|| <= C ||A|| whenever ||alpha_t|| <= M e^{xi_0|t|}.

    C = M sqrt(n/pi) int exp(-n t^2 + xi_0|t| - xi t) dt, split at 0 and written with erfcx;
    C = M when xi = xi_0 = 0.
    """
    if not n > 0:
        raise ValueError("n must be positive, got {}".format(n))
    root = 2*np.sqrt(n)
    halves = [erfcx(-(bound.xi - xi)/root), erfcx(-(bound.xi + xi)/root)]
    return float(bound.M*0.5*sum(halves))

def _hermite_rule(nodes):
    return truncated_gauss_hermite(nodes, SUPPORT_HALF_WIDTH)

def _check_support(flow, center, n):
    lo, hi = flow.time_range()
    half = SUPPORT_HALF_WIDTH/np.sqrt(n)
    if center - half < lo or center + half > hi:
        raise FlowDomainError("mollifier support [{:.4g}, {:.4g}] exceeds the flow range [{}, {}]".format(
            center - half, center + half, lo, hi))

def _hermite_sum(flow, A, n, xi, nodes, shift=0., y=0.):
    """exp(xi^2/(4n) + n y^2)/sqrt(pi) sum_k w_k e^{2i s_k y sqrt(n)} alpha_{shift + t_k}(A)."""
    s, weights = _hermite_rule(nodes)
    root = np.sqrt(n)
    total = np.zeros((flow.dim, flow.dim), dtype=complex)
    for s_k, w_k in zip(s, weights):
        phase = np.exp(2.j*s_k*y*root) if y != 0 else 1.
        total = total + w_k*phase*flow.apply(shift + s_k/root - xi/(2*n), A)
    return np.exp(xi*xi/(4*n) + n*y*y)/np.sqrt(np.pi)*total

def analytic_smooth(flow : FlowBase, A, n : float, xi : float = None, nodes : int = DEFAULT_HERMITE_NODES,
                    bound : GrowthBound = None) -> SmoothingResult:
    """A_n by Gauss–Hermite, with the node-doubling difference as error estimate.

    ``bound`` is fitted on [-2, 2] when not given, also when xi is explicit, so the growth alarm
    always runs; xi defaults to its exponent.

    Raises:
        SmoothingGrowthError: the growth exponent of the flow exceeds sqrt(n)
        FlowDomainError: the flow cannot be evaluated on the mollifier support
    """
    if not n > 0:
        raise ValueError("n must be positive, got {}".format(n))
    if nodes < MIN_NODES:
        raise ValueError("at least {} Hermite nodes are needed, got {}".format(MIN_NODES, nodes))
    A = as_element(A, flow.dim)
    if bound is None:
        bound = growth_bound(flow, GROWTH_GRID)
    if xi is None:
        xi = bound.xi
    if bound.xi > np.sqrt(n):
        raise SmoothingGrowthError("flow growth {:.4g} exceeds sqrt(n) = {:.4g}".format(bound.xi, np.sqrt(n)))
    _check_support(flow, -xi/(2*n), n)

    A_n    = _hermite_sum(flow, A, n, xi, nodes)
    finer  = _hermite_sum(flow, A, n, xi, 2*nodes)
    error  = float(np.linalg.norm(finer - A_n))
    if error > 1e-8*max(1., norm(A_n)):
        logger.warning("smoothing quadrature at n=%g moved by %.3e on node doubling", n, error)
    return SmoothingResult(A_n=A_n, n=float(n), xi=float(xi), quad_error_estimate=error,
                           weight_integral=gaussian_weight_integral(n, xi), A=A)

def smoothing_convergence_profile(flow : FlowBase, A, n_list, xi : float = 0., nodes : int = DEFAULT_HERMITE_NODES,
                                  bound : GrowthBound = None) -> list:
    """ProfileRow(n, ||A_n - A||_F, ||A_n||_F, quad_error_estimate) for each n; the growth bound is fitted once."""
    n_list = [float(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list[:-1], n_list[1:])):
        raise ValueError("n_list must be increasing")
    A = as_element(A, flow.dim)
    if bound is None:
        bound = growth_bound(flow, GROWTH_GRID)
    rows = []
    for n in n_list:
        result = analytic_smooth(flow, A, n, xi=xi, nodes=nodes, bound=bound)
        rows.append(ProfileRow(n=n, diff_frobenius=norm(result.A_n - A), norm_frobenius=norm(result.A_n),
                               quad_error_estimate=result.quad_error_estimate))
    return rows

def entire_extension(flow : FlowBase, smoothed : SmoothingResult, z : complex, nodes : int = DEFAULT_HERMITE_NODES) -> np.ndarray:
    """f_n(z) from the shifted-contour integral; equals alpha_z(A_n) when that is defined."""
    if smoothed.A is None:
        raise ValueError("the smoothing result does not carry its source element")
    z = complex(z)
    return _hermite_sum(flow, smoothed.A, smoothed.n, smoothed.xi, nodes, shift=z.real, y=z.imag)

def analyticity_check(flow : FlowBase, smoothed : SmoothingResult, z : complex = 0., radius_samples : int = 9,
                      nodes : int = DEFAULT_HERMITE_NODES) -> float:
    """max ||alpha_w(A_n) - f_n(w)||_F over w = z + s, s on radius_samples points of [-1, 1].

    alpha_w at complex w is Ad e^{wG}, so the flow has to be inner.
    """
    if not flow.is_inner:
        raise FlowDomainError("analyticity_check needs an inner flow")
    G = flow.generator
    worst = 0.
    for s in np.linspace(-1, 1, radius_samples):
        w = complex(z) + s
        direct = matrix_exponential(w*G)@smoothed.A_n@matrix_exponential(-w*G)
        worst = max(worst, float(np.linalg.norm(direct - entire_extension(flow, smoothed, w, nodes))))
    return worst

def test_weight_integral():
    assert np.isclose(gaussian_weight_integral(1., 0.), np.sqrt(np.pi))
    assert abs(gaussian_weight_integral(4., 2.) - 1.1379379) < 1e-6
    assert gaussian_weight_integral(3., 1.5) == gaussian_weight_integral(3., -1.5)
    for n, xi in ((4., 2.), (1., 0.), (0.5, -3.), (100., 7.)):
        exact = gaussian_weight_integral(n, xi)
        assert abs(weight_integral_oracle(n, xi) - exact) <= 1e-12*exact
    assert abs(weight_integral_oracle(4., 2.) - np.exp(4/64)*np.sqrt(np.pi/4)) > 0.1

def test_analytic_smooth_examples():
    from ..flow import identity_flow, InnerFlow
    A = np.array([[1., 2.], [0., 3.j]])
    flat = analytic_smooth(identity_flow(2), A, 7., xi=0.)
    assert np.allclose(flat.A_n, A, atol=1e-13)
    scaled = analytic_smooth(identity_flow(2), A, 4., xi=2.)
    assert np.allclose(scaled.A_n, np.exp(0.25)*A)
    assert np.isclose(scaled.weight_integral*np.sqrt(4/np.pi), np.exp(0.25))
    E12 = np.array([[0., 1.], [0., 0.]])
    flow = InnerFlow(np.diag([1.j, 0.]))
    for n in (1., 4., 50.):
        result = analytic_smooth(flow, E12, n, xi=0.)
        assert np.allclose(result.A_n, np.exp(-1/(4*n))*E12, atol=1e-12)
        assert result.quad_error_estimate >= 0

def test_convergence_profile():
    from ..flow import identity_flow, InnerFlow
    E12 = np.array([[0., 1.], [0., 0.]])
    assert all(row.diff_frobenius < 1e-13 for row in smoothing_convergence_profile(identity_flow(2), E12, [1, 10]))
    rows = smoothing_convergence_profile(InnerFlow(np.diag([1.j, 0.])), E12, [1, 10, 100, 1000])
    assert [row.n for row in rows] == [1., 10., 100., 1000.]
    for row, expected in zip(rows, (0.2212, 0.02469, 0.002497, 0.0002500)):
        assert abs(row.diff_frobenius - expected) <= 5e-4*expected

def test_smoothing_properties():
    import pytest
    from ..flow import InnerFlow, hamiltonian_flow
    rng = np.random.default_rng(13)
    for dim in (2, 3, 4):
        G = rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim))
        G *= 1/np.linalg.norm(G)
        flow = InnerFlow(G)
        A = rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim))
        B = rng.normal(size=(dim, dim))
        left = analytic_smooth(flow, A + B, 9., xi=0.5).A_n
        right = analytic_smooth(flow, A, 9., xi=0.5).A_n + analytic_smooth(flow, B, 9., xi=0.5).A_n
        assert np.linalg.norm(left - right) < 1e-10
        assert norm(analytic_smooth(flow, A, 1e4, xi=0.).A_n - A) < 0.01*norm(A)
        h = G + G.T.conj()
        unitary = hamiltonian_flow(h)
        bound = growth_bound(unitary, GROWTH_GRID)
        assert norm(analytic_smooth(unitary, A, 2., xi=0., bound=bound).A_n) <= bound.M*norm(A)*(1 + 1e-10)
        assert np.isclose(smoothing_norm_bound(GrowthBound(M=1., xi=0.), 2., 0.), 1.)
        for n, xi in ((2., 0.7), (9., -1.5)):
            C = smoothing_norm_bound(bound, n, xi)
            assert C >= bound.M
            assert norm(analytic_smooth(unitary, A, n, xi=xi).A_n) <= C*norm(A)*(1 + 1e-10)
    with pytest.raises(SmoothingGrowthError):
        analytic_smooth(InnerFlow(np.diag([3., 0.])), np.eye(2), 1.)
    E12 = np.array([[0., 1.], [0., 0.]])
    with pytest.raises(SmoothingGrowthError):
        analytic_smooth(InnerFlow(np.diag([20., 0.])), E12, 1., xi=0.)
    with pytest.raises(SmoothingGrowthError):
        smoothing_convergence_profile(InnerFlow(np.diag([20., 0.])), E12, [1., 10.])

def test_analyticity_check():
    import pytest
    from ..flow import identity_flow, InnerFlow, TabulatedFlow
    A = np.array([[1., 2.], [0., 1.]])
    assert analyticity_check(identity_flow(2), analytic_smooth(identity_flow(2), A, 3., xi=0.)) < 1e-12
    flow = InnerFlow(np.diag([1.j, 0.]))
    smoothed = analytic_smooth(flow, np.array([[0., 1.], [0., 0.]]), 4., xi=0.)
    assert analyticity_check(flow, smoothed, z=0.5) < 1e-9
    assert analyticity_check(flow, smoothed, z=0.3 + 0.2j) < 1e-9
    G = np.array([[0.5j, 1.], [0., -0.2]])
    general = InnerFlow(G)
    result = analytic_smooth(general, A, 16., xi=0.3)
    assert analyticity_check(general, result, z=0.1j) < 1e-8
    with pytest.raises(FlowDomainError):
        analyticity_check(TabulatedFlow.from_flow(flow, [-1., 0., 1.]), smoothed)

if __name__ == "__main__":
    test_weight_integral()
    test_analytic_smooth_examples()
    test_convergence_profile()
    test_analyticity_check()
