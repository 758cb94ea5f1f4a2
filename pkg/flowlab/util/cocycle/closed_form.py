import numpy as np
from ..algebra import as_element
from ..flow import matrix_exponential

def closed_form_cocycle(h : np.ndarray, P : np.ndarray, t : float) -> np.ndarray:
    """u_t^P = e^{it(h+P)} e^{-ith} for the base flow Ad e^{ith}."""
    h = as_element(h)
    P = as_element(P, h.shape[0])
    return matrix_exponential(1.j*t*(h + P))@matrix_exponential(-1.j*t*h)

def closed_form_from_generator(G : np.ndarray, P : np.ndarray, t : float) -> np.ndarray:
    """Same cocycle written for a base flow Ad e^{tG} (G = ih)."""
    G = as_element(G)
    P = as_element(P, G.shape[0])
    return matrix_exponential(t*(G + 1.j*P))@matrix_exponential(-t*G)

def test_closed_form_examples():
    rng = np.random.default_rng(0)
    P = rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3))
    assert np.allclose(closed_form_cocycle(np.zeros((3, 3)), P, 0.8), matrix_exponential(0.8j*P))
    h = np.diag([1., -2., 0.5])
    D = np.diag([0.3, 1.j, 2.])
    assert np.allclose(closed_form_cocycle(h, D, 1.1), matrix_exponential(1.1j*D))
    u = closed_form_cocycle(np.diag([1., 0.]), np.array([[0, 1], [0, 0]]), 1.)
    assert np.allclose(u, [[1, -0.4596976941318602 + 0.8414709848078965j], [0, 1]], atol=1e-12)

def test_closed_form_conventions_agree():
    h = np.array([[0.2, 1.], [0., -0.4]])
    P = np.array([[0., 0.3j], [0., 0.7]])
    assert np.allclose(closed_form_cocycle(h, P, -1.3), closed_form_from_generator(1.j*h, P, -1.3))

if __name__ == "__main__":
    test_closed_form_examples()
    test_closed_form_conventions_agree()
