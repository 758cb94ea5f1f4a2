"""
Gauss rules used by the Dyson series and the Gaussian mollifiers.

Gauss–Hermite:  ∫ exp(-s^2) g(s) ds ≈ Σ w_k g(s_k)
Gauss–Legendre: ∫_a^b f(t) dt     ≈ Σ w_k f(t_k)

The composite rule on [0, t] also carries a cumulative integration matrix C
with (C f)_j ≈ ∫_0^{t_j} f, exact for polynomials of degree < nodes on each
panel. Iterated time-ordered integrals are then repeated applications of C.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial.hermite import hermgauss

def gauss_hermite(n : int) -> tuple:
    """Nodes and weights for ∫ exp(-s^2) g(s) ds."""
    return hermgauss(n)

def truncated_gauss_hermite(n : int, half_width : float) -> tuple:
    """Gauss-Hermite nodes with |s| <= half_width; the dropped weights are below exp(-half_width^2)."""
    s, weights = hermgauss(n)
    keep = np.abs(s) <= half_width
    return s[keep], weights[keep]

def gauss_legendre(a : float, b : float, n : int) -> tuple:
    """Nodes and weights on [a, b]."""
    x, w = legendre.leggauss(n)
    return 0.5*(b - a)*x + 0.5*(b + a), 0.5*(b - a)*w

@lru_cache(maxsize=32)
def _reference_panel(n : int) -> tuple:
    """Legendre nodes/weights on [-1, 1] and Q with Q[j, k] = ∫_{-1}^{x_j} l_k."""
    x, w = legendre.leggauss(n)
    vander = legendre.legvander(x, n - 1)
    antiderivative = np.zeros((n, n))
    for m in range(n):
        coefficients = np.zeros(n)
        coefficients[m] = 1
        antiderivative[:, m] = legendre.legval(x, legendre.legint(coefficients, lbnd=-1))
    Q = antiderivative@np.linalg.inv(vander)
    for array in (x, w, Q):
        array.setflags(write=False)
    return x, w, Q

@dataclass(frozen=True)
class TimeOrderedGrid:
    """Composite Gauss–Legendre rule on the segment from 0 to t (t may be negative).

    nodes are ordered by increasing |s|; weights and cumulative carry the sign of t.
    """
    t: float
    nodes: np.ndarray
    weights: np.ndarray
    cumulative: np.ndarray

def time_ordered_grid(t : float, nodes_per_panel : int, panel_width : float = 1.) -> TimeOrderedGrid:
    panels = max(1, int(math.ceil(abs(t)/panel_width)))
    x, w, Q = _reference_panel(nodes_per_panel)
    h = t/panels
    size = panels*nodes_per_panel
    nodes      = np.zeros(size)
    weights    = np.zeros(size)
    cumulative = np.zeros((size, size))
    for p in range(panels):
        sl = slice(p*nodes_per_panel, (p + 1)*nodes_per_panel)
        nodes[sl]   = p*h + 0.5*h*(x + 1)
        weights[sl] = 0.5*h*w
        cumulative[sl, :p*nodes_per_panel] = weights[:p*nodes_per_panel]
        cumulative[sl, sl] = 0.5*h*Q
    return TimeOrderedGrid(t=t, nodes=nodes, weights=weights, cumulative=cumulative)

def test_gauss_rules():
    x, w = gauss_hermite(20)
    assert np.isclose(np.sum(w), np.sqrt(np.pi))
    assert np.isclose(np.sum(w*x**2), np.sqrt(np.pi)/2)
    s, w = truncated_gauss_hermite(64, 8.)
    assert len(s) < 64 and np.max(np.abs(s)) <= 8.
    assert abs(np.sum(w) - np.sqrt(np.pi)) < 1e-14
    t, w = gauss_legendre(0, 2, 8)
    assert np.isclose(np.sum(w*t**3), 4)

def test_time_ordered_grid_cumulative():
    for t in (2.5, -1.3):
        grid = time_ordered_grid(t, 12)
        assert np.isclose(np.sum(grid.weights*np.cos(grid.nodes)), np.sin(t))
        assert np.allclose(grid.cumulative@np.cos(grid.nodes), np.sin(grid.nodes), atol=1e-12)
        assert np.all(np.diff(np.abs(grid.nodes)) > 0)

def test_iterated_integral_is_simplex_volume():
    grid = time_ordered_grid(1.7, 16)
    f = np.ones_like(grid.nodes)
    for _ in range(4):
        f = grid.cumulative@f
    assert np.isclose(f[-1], grid.nodes[-1]**4/24)

if __name__ == "__main__":
    test_gauss_rules()
    test_time_ordered_grid_cumulative()
    test_iterated_integral_is_simplex_volume()
