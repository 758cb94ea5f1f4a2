import logging
import numpy as np
from scipy.linalg import solve
from ..algebra.common import as_element, complex_type
from ..errors import MatrixExponentialOverflow

logger = logging.getLogger(__name__)

# degree-13 Pade coefficients and the scaling threshold for that degree
PADE_COEFFICIENTS = np.array([
    64764752532480000., 32382376266240000., 7771770303897600.,
    1187353796428800., 129060195264000., 10559470521600.,
    670442572800., 33522128640., 1323241920.,
    40840800., 960960., 16380., 182., 1.,
])
THETA_13 = 5.371920351148152
OVERFLOW_NORM = 700.

def squaring_count(frobenius_norm : float) -> int:
    if frobenius_norm <= THETA_13:
        return 0
    return int(np.ceil(np.log2(frobenius_norm/THETA_13)))

def _pade13(A):
    c   = PADE_COEFFICIENTS
    eye = np.eye(A.shape[0], dtype=complex_type)
    A2  = A@A
    A4  = A2@A2
    A6  = A2@A4
    U   = A@(A6@(c[13]*A6 + c[11]*A4 + c[9]*A2) + c[7]*A6 + c[5]*A4 + c[3]*A2 + c[1]*eye)
    V   = A6@(c[12]*A6 + c[10]*A4 + c[8]*A2) + c[6]*A6 + c[4]*A4 + c[2]*A2 + c[0]*eye
    return solve(V - U, V + U)

def matrix_exponential(G : np.ndarray) -> np.ndarray:
    """e^G by scaling and squaring around a fixed degree-13 Pade kernel.

    The squaring count comes from the Frobenius norm of ``G``.

    Raises:
        MatrixExponentialOverflow: ||G||_F > 700
    """
    G = as_element(G)
    size = np.linalg.norm(G, "fro")
    if size > OVERFLOW_NORM:
        logger.warning("matrix exponential of an element with Frobenius norm %.3e", size)
        raise MatrixExponentialOverflow("||G||_F = {:.3e} exceeds {}".format(size, OVERFLOW_NORM))
    if size == 0:
        return np.eye(G.shape[0], dtype=complex_type)
    s = squaring_count(size)
    F = _pade13(G/2.**s)
    for _ in range(s):
        F = F@F
    return F

def test_matrix_exponential_examples():
    assert np.array_equal(matrix_exponential(np.zeros((3, 3))), np.eye(3))
    assert np.allclose(matrix_exponential([[0, 1], [0, 0]]), [[1, 1], [0, 1]], atol=1e-15)
    assert np.allclose(matrix_exponential(np.diag([1.j*np.pi, 0])), np.diag([-1, 1]), atol=1e-14)

def test_matrix_exponential_against_scipy():
    from scipy.linalg import expm
    rng = np.random.default_rng(7)
    for _ in range(200):
        dim = rng.integers(1, 7)
        G = rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim))
        G *= rng.uniform(0, 10)/np.linalg.norm(G)
        reference = expm(G)
        error = np.linalg.norm(matrix_exponential(G) - reference)/np.linalg.norm(reference)
        assert error <= 1e-12

def test_matrix_exponential_overflow():
    import pytest
    with pytest.raises(MatrixExponentialOverflow):
        matrix_exponential(800*np.eye(2))

if __name__ == "__main__":
    test_matrix_exponential_examples()
    test_matrix_exponential_against_scipy()
