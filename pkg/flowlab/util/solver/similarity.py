import logging
from dataclasses import dataclass
from typing import Optional
import numpy as np
from ..algebra import (NestAlgebraSpec, SuperOp, contains, superop_norm, smallest_singular_value,
                       unvectorize, norm)
from ..errors import DimensionError, NotAnAutomorphismError, SimilarityAmbiguityError

logger = logging.getLogger(__name__)

MAPS_INTO_TOL      = 1e-9
MULTIPLICATIVE_TOL = 1e-8
RESIDUAL_TOL       = 1e-6
NULL_TOL           = 1e-8
TOP_LEFT_FLOOR     = 1e-8
INVERTIBLE_TOL     = 1e-10

@dataclass(frozen=True)
class BoundCheck:
    """lhs = min over scalars of ||lambda T - I||, rhs = 4 ||sigma - id||, in two norm pairs."""
    lhs: float
    rhs: float
    lhs_spectral: float
    rhs_spectral: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs

@dataclass(frozen=True)
class SimilaritySolution:
    T: np.ndarray
    residual: float
    normalization: str
    bound_check: Optional[BoundCheck] = None

def check_endomorphism(sigma : SuperOp, spec : NestAlgebraSpec, error=NotAnAutomorphismError) -> None:
    """Raise ``error`` unless sigma maps every basis unit of the algebra back into it."""
    if sigma.dim != spec.dim:
        raise DimensionError("superoperator has dim {}, algebra has dim {}".format(sigma.dim, spec.dim))
    for (i, j), E in zip(spec.units, spec.basis()):
        image = sigma.apply(E)
        if not contains(spec, image, tol=MAPS_INTO_TOL*max(1., norm(image))):
            raise error("image of E_{}{} leaves the algebra".format(i, j))

def check_multiplicative(sigma : SuperOp, spec : NestAlgebraSpec) -> None:
    basis  = spec.basis()
    images = [sigma.apply(E) for E in basis]
    for a, E in enumerate(basis):
        for b, F in enumerate(basis):
            defect = norm(sigma.apply(E@F) - images[a]@images[b])
            if defect > MULTIPLICATIVE_TOL*max(1., norm(images[a])*norm(images[b])):
                raise NotAnAutomorphismError("sigma is not multiplicative on {} x {} (defect {:.3e})".format(
                    spec.units[a], spec.units[b], defect))

def fix_gauge(T : np.ndarray) -> tuple:
    """Scale T so T[0, 0] = 1, or to determinant one when that entry is too small."""
    if abs(T[0, 0]) >= TOP_LEFT_FLOOR*max(1., norm(T)):
        return T/T[0, 0], "unit_top_left"
    det = np.linalg.det(T)
    return T/det**(1./T.shape[0]), "det_one"

def similarity_residual(sigma : SuperOp, spec : NestAlgebraSpec, T : np.ndarray) -> float:
    scale = 1 + norm(T)
    return max(norm(sigma.apply(E)@T - T@E)/scale for E in spec.basis())

def similarity_bound_check(sigma : SuperOp, T : np.ndarray, trials : int = 16, seed : int = 0) -> BoundCheck:
    """Compare the scalar multiple of T closest to I with 4 ||sigma - id||."""
    dim = T.shape[0]
    lam = np.conj(np.trace(T))/norm(T)**2
    shifted = lam*T - np.eye(dim)
    distance = sigma - SuperOp.identity(dim)
    return BoundCheck(lhs=norm(shifted), rhs=4*superop_norm(distance),
                      lhs_spectral=norm(shifted, "spectral"),
                      rhs_spectral=4*superop_norm(distance, "spectral_sampled", trials=trials, seed=seed))

def automorphism_similarity(sigma : SuperOp, spec : NestAlgebraSpec, check_bound : bool = True) -> SimilaritySolution:
    """Invertible T in the algebra with sigma(A) = T A T^{-1}.

    T spans the null space of the stacked system sigma(E_b) T - T E_b = 0 over the basis.

    Raises:
        NotAnAutomorphismError: sigma leaves the algebra, is not multiplicative, or no T fits
        SimilarityAmbiguityError: the null space is not one-dimensional
    """
    check_endomorphism(sigma, spec)
    check_multiplicative(sigma, spec)
    dim = spec.dim
    B   = spec.basis_matrix()
    eye = np.eye(dim)
    rows = [(np.kron(eye, sigma.apply(E)) - np.kron(E.T, eye))@B for E in spec.basis()]
    try:
        _, s, vh = np.linalg.svd(np.vstack(rows))
    except np.linalg.LinAlgError as e:
        raise NotAnAutomorphismError("similarity system: {}".format(e))
    null_dim = int(np.sum(s <= NULL_TOL*max(1., s[0])))
    if null_dim != 1:
        logger.warning("similarity null space has dimension %d", null_dim)
        raise SimilarityAmbiguityError("null space of the similarity system has dimension {}".format(null_dim))
    T = unvectorize(B@vh[-1].conj(), dim)
    if smallest_singular_value(T) <= INVERTIBLE_TOL*max(1., norm(T)):
        raise NotAnAutomorphismError("the intertwiner T is singular")
    T, normalization = fix_gauge(T)
    residual = similarity_residual(sigma, spec, T)
    if residual > RESIDUAL_TOL:
        raise NotAnAutomorphismError("similarity residual {:.3e} exceeds {}".format(residual, RESIDUAL_TOL))

    bound = None
    if check_bound and superop_norm(sigma - SuperOp.identity(dim)) < 1:
        bound = similarity_bound_check(sigma, T)
    logger.debug("similarity residual %.3e gauge %s", residual, normalization)
    return SimilaritySolution(T=T, residual=residual, normalization=normalization, bound_check=bound)

def test_similarity_identity():
    from ..algebra import build_nest_algebra
    spec = build_nest_algebra(3, [0, 1, 3])
    solution = automorphism_similarity(SuperOp.identity(3), spec)
    assert np.allclose(solution.T, np.eye(3))
    assert solution.residual < 1e-12 and solution.normalization == "unit_top_left"
    assert solution.bound_check.lhs < 1e-12

def test_similarity_recovers_implementer():
    from ..algebra import build_nest_algebra
    from ..flow import matrix_exponential
    spec = build_nest_algebra(2, [0, 1, 2])
    T0 = np.array([[1., 1.], [0., 1.]])
    solution = automorphism_similarity(SuperOp.conjugation(T0), spec)
    assert np.allclose(solution.T, T0, atol=1e-10)
    E12 = np.array([[0., 1.], [0., 0.]])
    small = automorphism_similarity(SuperOp.conjugation(matrix_exponential(0.1*E12)), spec)
    assert small.bound_check is not None and small.bound_check.passed

def test_similarity_det_one_gauge():
    from ..algebra import full_algebra
    T0 = np.array([[0., 1.], [1., 0.]])
    solution = automorphism_similarity(SuperOp.conjugation(T0), full_algebra(2))
    assert solution.normalization == "det_one"
    assert np.isclose(np.linalg.det(solution.T), 1)
    assert solution.residual < 1e-10

def test_similarity_rejects_non_automorphisms():
    import pytest
    from ..algebra import build_nest_algebra
    spec = build_nest_algebra(2, [0, 1, 2])
    with pytest.raises(NotAnAutomorphismError):
        automorphism_similarity(SuperOp.conjugation(np.array([[0., 1.], [1., 0.]])), spec)
    with pytest.raises(NotAnAutomorphismError):
        automorphism_similarity(2*SuperOp.identity(2), spec)

def test_prop_bound_random_small_automorphisms():
    from ..algebra import build_nest_algebra, project
    from ..flow import matrix_exponential
    rng = np.random.default_rng(21)
    spec = build_nest_algebra(3, [0, 1, 3])
    checked = 0
    while checked < 30:
        X = project(spec, rng.normal(size=(3, 3)) + 1.j*rng.normal(size=(3, 3)))
        X *= rng.uniform(0, 0.4)/norm(X)
        sigma = SuperOp.conjugation(matrix_exponential(X))
        if superop_norm(sigma - SuperOp.identity(3)) >= 1:
            continue
        solution = automorphism_similarity(sigma, spec)
        assert solution.residual < 1e-8
        assert solution.bound_check.passed
        checked += 1

if __name__ == "__main__":
    test_similarity_identity()
    test_similarity_recovers_implementer()
    test_similarity_det_one_gauge()
