import logging
from collections import namedtuple
import numpy as np
from .common import complex_type, as_element, matrix_unit, invert
from ..errors import DimensionError, NotAnAutomorphismError
from ...objects import Stepper
from ...optimizer import optimizer

logger = logging.getLogger(__name__)

SUPEROP_NORM_KINDS = ("frobenius_induced", "spectral_sampled")

NormEstimate = namedtuple("NormEstimate", ["value", "trials", "witness"])

def vectorize(A : np.ndarray) -> np.ndarray:
    """Column-stacking vectorization, vec(XAY) = (Y^T kron X) vec(A)."""
    return np.reshape(A, -1, order="F")

def unvectorize(v : np.ndarray, dim : int) -> np.ndarray:
    return np.reshape(v, (dim, dim), order="F")

class SuperOp:
    """Linear map on dim x dim elements, stored as a dim^2 x dim^2 matrix on vec(A).

    ``implementer`` is set when the map is known to be Ad S; it lets conjugated
    inner flows stay inner.
    """
    def __init__(self, matrix, implementer=None):
        matrix = np.array(matrix, dtype=complex_type)
        dim = int(round(np.sqrt(matrix.shape[0])))
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or dim*dim != matrix.shape[0]:
            raise DimensionError("superoperator matrix must be dim^2 x dim^2, got {}".format(matrix.shape))
        if not np.all(np.isfinite(matrix)):
            raise DimensionError("superoperator has non-finite entries")
        matrix.setflags(write=False)
        self.dim         = dim
        self.matrix      = matrix
        self.implementer = implementer

    def apply(self, A : np.ndarray) -> np.ndarray:
        A = as_element(A, self.dim)
        return unvectorize(self.matrix@vectorize(A), self.dim)

    __call__ = apply

    def compose(self, other : "SuperOp") -> "SuperOp":
        """self after other."""
        if other.dim != self.dim:
            raise DimensionError("cannot compose superoperators of dims {} and {}".format(self.dim, other.dim))
        implementer = None
        if self.implementer is not None and other.implementer is not None:
            implementer = self.implementer@other.implementer
        return SuperOp(self.matrix@other.matrix, implementer=implementer)

    def __add__(self, other):
        return SuperOp(self.matrix + other.matrix)

    def __sub__(self, other):
        return SuperOp(self.matrix - other.matrix)

    def __mul__(self, scalar):
        return SuperOp(scalar*self.matrix)

    __rmul__ = __mul__

    def distance(self, other : "SuperOp") -> float:
        """Frobenius norm of the difference of the two matrices."""
        return float(np.linalg.norm(self.matrix - other.matrix))

    @classmethod
    def identity(cls, dim : int) -> "SuperOp":
        return cls(np.eye(dim*dim), implementer=np.eye(dim, dtype=complex_type))

    @classmethod
    def zero(cls, dim : int) -> "SuperOp":
        return cls(np.zeros((dim*dim, dim*dim)))

    @classmethod
    def from_map(cls, func, dim : int) -> "SuperOp":
        """Tabulate a linear map by its action on the matrix units (column k is vec f(E_k))."""
        matrix = np.zeros((dim*dim, dim*dim), dtype=complex_type)
        for k in range(dim*dim):
            i, j = k % dim, k // dim
            matrix[:, k] = vectorize(as_element(func(matrix_unit(dim, i, j)), dim))
        return cls(matrix)

    @classmethod
    def conjugation(cls, X : np.ndarray, X_inv : np.ndarray = None) -> "SuperOp":
        """Ad X : A -> X A X^{-1}."""
        X = as_element(X)
        if X_inv is None:
            X_inv = invert(X, NotAnAutomorphismError)
        return cls(np.kron(X_inv.T, X), implementer=X)

    @classmethod
    def left_multiplication(cls, X : np.ndarray) -> "SuperOp":
        X = as_element(X)
        return cls(np.kron(np.eye(X.shape[0]), X))

    @classmethod
    def right_multiplication(cls, X : np.ndarray) -> "SuperOp":
        X = as_element(X)
        return cls(np.kron(X.T, np.eye(X.shape[0])))

    @classmethod
    def ad(cls, P : np.ndarray) -> "SuperOp":
        """ad P : B -> PB - BP."""
        P = as_element(P)
        eye = np.eye(P.shape[0])
        return cls(np.kron(eye, P) - np.kron(P.T, eye))

class _RatioModel:
    """Objective for the local ascent: minus ||S(A)||_2 / ||A||_2 over real-parameterized A."""
    def __init__(self, superop):
        self.superop = superop
        self.dim     = superop.dim

    def element(self, phi):
        half = self.dim*self.dim
        return unvectorize(phi[:half] + 1.j*phi[half:], self.dim)

    def ratio(self, A):
        size = np.linalg.norm(A, 2)
        if size == 0:
            return 0.
        return float(np.linalg.norm(self.superop.apply(A), 2)/size)

    def execute(self, phi):
        return {
            "score"    : -self.ratio(self.element(phi)),
            "step"     : 1,
            "register" : {},
        }

def sampled_norm_estimate(S : SuperOp, trials : int = 16, seed : int = 0, iteration : int = 50) -> NormEstimate:
    """Lower estimate of the spectral-norm-induced norm of ``S``.

    Random trial elements plus the top Frobenius singular direction seed a
    local L-BFGS ascent; the returned value is the largest ratio seen.
    """
    rng    = np.random.default_rng(seed)
    model  = _RatioModel(S)
    dim    = S.dim
    starts = []
    _, _, vh = np.linalg.svd(S.matrix)
    starts.append(unvectorize(vh[0].conj(), dim))
    for _ in range(trials - 1):
        starts.append(rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim)))

    best_value, best_element = -np.inf, None
    for A in starts:
        value = model.ratio(A)
        if value > best_value:
            best_value, best_element = value, A

    stepper = Stepper(execute=model.execute, n_param=2*dim*dim, verbose=False)
    initp   = np.concatenate([vectorize(best_element).real, vectorize(best_element).imag])
    result  = optimizer["lbfgs"](model=stepper, p_seed=seed, iteration=iteration, initp=initp)
    ascended = model.element(result.x)
    value = model.ratio(ascended)
    if value > best_value:
        best_value, best_element = value, ascended
    logger.debug("sampled superoperator norm %.6e after %d trials", best_value, len(starts))
    return NormEstimate(value=best_value, trials=len(starts), witness=best_element)

def superop_norm(S : SuperOp, kind : str = "frobenius_induced", trials : int = 16, seed : int = 0) -> float:
    """Induced norm of a superoperator.

    Args:
        S (SuperOp): the map
        kind (str): ``frobenius_induced`` (exact, largest singular value of the matrix)
            or ``spectral_sampled`` (lower estimate, see sampled_norm_estimate)
    Returns:
        float: the norm
    """
    if kind == "frobenius_induced":
        return float(np.linalg.norm(S.matrix, 2))
    if kind == "spectral_sampled":
        return sampled_norm_estimate(S, trials=trials, seed=seed).value
    raise ValueError("Unknown superoperator norm, choose from {}".format(SUPEROP_NORM_KINDS))

def test_conjugation_matches_direct():
    import pytest
    rng = np.random.default_rng(0)
    X = rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3)) + 3*np.eye(3)
    A = rng.normal(size=(3, 3))
    S = SuperOp.conjugation(X)
    assert np.allclose(S.apply(A), X@A@np.linalg.inv(X))
    assert np.allclose(SuperOp.ad(X).apply(A), X@A - A@X)
    assert np.allclose(SuperOp.left_multiplication(X).apply(A), X@A)
    assert np.allclose(SuperOp.right_multiplication(X).apply(A), A@X)
    assert np.allclose(SuperOp.from_map(lambda B: X@B@np.linalg.inv(X), 3).matrix, S.matrix)
    with pytest.raises(NotAnAutomorphismError):
        SuperOp.conjugation(np.array([[1., 2.], [2., 4.]]))

def test_superop_norm_examples():
    from scipy.stats import unitary_group
    assert np.isclose(superop_norm(SuperOp.identity(3)), 1)
    assert np.isclose(superop_norm(SuperOp.identity(3), "spectral_sampled"), 1)
    U = unitary_group.rvs(3, random_state=1)
    S = SuperOp.conjugation(U)
    assert np.isclose(superop_norm(S), 1)
    assert np.isclose(superop_norm(S, "spectral_sampled"), 1)
    assert np.isclose(superop_norm(SuperOp.conjugation(np.diag([2, 0.5]))), 4)

def test_sampled_norm_bounds():
    rng = np.random.default_rng(5)
    for dim in (2, 3):
        S = SuperOp(rng.normal(size=(dim*dim, dim*dim)))
        estimate = sampled_norm_estimate(S, trials=8, seed=2)
        witness  = estimate.witness
        assert estimate.trials == 8
        assert estimate.value <= superop_norm(S)*np.sqrt(dim)*(1 + 1e-12)
        assert np.isclose(estimate.value, np.linalg.norm(S.apply(witness), 2)/np.linalg.norm(witness, 2))
        _, _, vh = np.linalg.svd(S.matrix)
        top = unvectorize(vh[0].conj(), dim)
        assert estimate.value >= np.linalg.norm(S.apply(top), 2)/np.linalg.norm(top, 2) - 1e-12

if __name__ == "__main__":
    test_conjugation_matches_direct()
    test_superop_norm_examples()
    test_sampled_norm_bounds()
