import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional
import numpy as np
from scipy.linalg import lstsq, null_space
from .similarity import check_endomorphism
from ..algebra import NestAlgebraSpec, SuperOp, unvectorize, identity, norm
from ..errors import NotADerivationError, NotInnerError

logger = logging.getLogger(__name__)

LEIBNIZ_TOL  = 1e-7
RESIDUAL_TOL = 1e-6

@dataclass(frozen=True)
class DerivationSolution:
    """P with D = ad P on the algebra, trace-free.

    ``verification`` is filled by the flow pipelines: the largest reconjugation
    mismatch over basis elements at the check times.
    """
    P: np.ndarray
    residual: float
    gauge: str = "trace_free"
    verification: Optional[float] = field(default=None)

def derivation_residual(D : SuperOp, spec : NestAlgebraSpec, P : np.ndarray) -> float:
    scale = 1 + norm(P)
    return max(norm(D.apply(E) - (P@E - E@P))/scale for E in spec.basis())

def leibniz_defect(D : SuperOp, spec : NestAlgebraSpec) -> float:
    """max ||D(EF) - D(E)F - ED(F)||_F over basis pairs, relative to the scale of D."""
    basis  = spec.basis()
    images = [D.apply(E) for E in basis]
    scale  = max(1., max(norm(X) for X in images))
    worst  = 0.
    for a, E in enumerate(basis):
        for b, F in enumerate(basis):
            worst = max(worst, norm(D.apply(E@F) - images[a]@F - E@images[b])/scale)
    return worst

def inner_derivation_solve(D : SuperOp, spec : NestAlgebraSpec) -> DerivationSolution:
    """Least-squares P in the algebra with D(E) = PE - EP on every basis element.

    Raises:
        NotADerivationError: D leaves the algebra or breaks the Leibniz rule
        NotInnerError: no P in the algebra reproduces D
    """
    check_endomorphism(D, spec, error=NotADerivationError)
    defect = leibniz_defect(D, spec)
    if defect > LEIBNIZ_TOL:
        raise NotADerivationError("Leibniz residual {:.3e} exceeds {}".format(defect, LEIBNIZ_TOL))
    dim = spec.dim
    B   = spec.basis_matrix()
    eye = np.eye(dim)
    basis = spec.basis()
    system = np.vstack([(np.kron(E.T, eye) - np.kron(eye, E))@B for E in basis])
    target = np.concatenate([np.reshape(D.apply(E), -1, order="F") for E in basis])
    try:
        x, _, _, _ = lstsq(system, target)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NotInnerError("least-squares solve failed: {}".format(e))
    P = unvectorize(B@x, dim)
    P = P - np.trace(P)/dim*identity(dim)
    residual = derivation_residual(D, spec, P)
    if residual > RESIDUAL_TOL:
        logger.warning("derivation is not inner within the algebra (residual %.3e)", residual)
        raise NotInnerError("residual {:.3e} exceeds {}".format(residual, RESIDUAL_TOL))
    return DerivationSolution(P=P, residual=residual)

def _unit_products(spec):
    position = {unit: m for m, unit in enumerate(spec.units)}
    def product(a, c):
        (i, j), (p, q) = spec.units[a], spec.units[c]
        return position[(i, q)] if j == p else None
    return product

@lru_cache(maxsize=None)
def _derivation_coefficients(spec : NestAlgebraSpec) -> np.ndarray:
    """Null space of the Leibniz constraints on x with D(E_m) = sum_a x[a, m] E_a.

    The constraint matrix is never stored whole; its Gram matrix is accumulated one
    left factor E_b at a time.
    """
    k, dim = spec.algebra_dimension, spec.dim
    product = _unit_products(spec)
    gram = np.zeros((k*k, k*k))
    for b in range(k):
        block = np.zeros((k*dim*dim, k*k))
        for c in range(k):
            offset = c*dim*dim
            m = product(b, c)
            for a in range(k):
                i, j = spec.units[a]
                if m is not None:
                    block[offset + i + j*dim, a*k + m] += 1
                ac = product(a, c)
                if ac is not None:
                    p, q = spec.units[ac]
                    block[offset + p + q*dim, a*k + b] -= 1
                ba = product(b, a)
                if ba is not None:
                    p, q = spec.units[ba]
                    block[offset + p + q*dim, a*k + c] -= 1
        gram += block.T@block
    coefficients = null_space(gram)
    logger.debug("derivation space of %r has dimension %d", spec, coefficients.shape[1])
    return coefficients

def derivation_space_basis(spec : NestAlgebraSpec) -> list:
    """Basis of the derivations of the algebra, each extended by zero off the algebra.

    For a nest algebra every derivation is inner, so the dimension is (number of units) - 1.
    """
    k = spec.algebra_dimension
    B = spec.basis_matrix()
    out = []
    for column in _derivation_coefficients(spec).T:
        X = np.reshape(column, (k, k))
        out.append(SuperOp(B@X@B.T))
    return out

def sample_derivation(spec : NestAlgebraSpec, rng) -> SuperOp:
    """Random complex combination of the derivation basis, Frobenius-normalized."""
    basis = derivation_space_basis(spec)
    coefficients = rng.normal(size=len(basis)) + 1.j*rng.normal(size=len(basis))
    matrix = sum(c*D.matrix for c, D in zip(coefficients, basis))
    return SuperOp(matrix/np.linalg.norm(matrix))

def test_inner_derivation_examples():
    from ..algebra import build_nest_algebra
    spec = build_nest_algebra(2, [0, 1, 2])
    zero = inner_derivation_solve(SuperOp.zero(2), spec)
    assert np.allclose(zero.P, 0) and zero.gauge == "trace_free"
    P0 = np.array([[0, 1.j], [0, 0]])
    solution = inner_derivation_solve(SuperOp.ad(P0), spec)
    assert np.allclose(solution.P, P0, atol=1e-10)
    assert solution.residual < 1e-10

def test_inner_derivation_round_trip():
    from ..algebra import build_nest_algebra, project
    rng = np.random.default_rng(2)
    spec = build_nest_algebra(4, [0, 2, 4])
    for _ in range(5):
        P0 = project(spec, rng.normal(size=(4, 4)) + 1.j*rng.normal(size=(4, 4)))
        P0 -= np.trace(P0)/4*np.eye(4)
        solution = inner_derivation_solve(SuperOp.ad(P0), spec)
        assert np.linalg.norm(solution.P - P0) < 1e-9
        assert abs(np.trace(solution.P)) < 1e-12

def test_inner_derivation_rejects():
    import pytest
    from ..algebra import build_nest_algebra
    spec = build_nest_algebra(2, [0, 1, 2])
    with pytest.raises(NotADerivationError):
        inner_derivation_solve(SuperOp.identity(2), spec)
    with pytest.raises(NotADerivationError):
        inner_derivation_solve(SuperOp.ad(np.array([[0., 0.], [1., 0.]])), spec)

def test_derivation_space_is_inner():
    from ..algebra import build_nest_algebra
    rng = np.random.default_rng(3)
    for dim, nest in ((3, [0, 1, 2, 3]), (4, [0, 2, 4]), (2, [0, 2])):
        spec = build_nest_algebra(dim, nest)
        assert len(derivation_space_basis(spec)) == spec.algebra_dimension - 1
        for _ in range(5):
            D = sample_derivation(spec, rng)
            assert leibniz_defect(D, spec) < 1e-10
            assert inner_derivation_solve(D, spec).residual < 1e-8

if __name__ == "__main__":
    test_inner_derivation_examples()
    test_inner_derivation_round_trip()
    test_derivation_space_is_inner()
