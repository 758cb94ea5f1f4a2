import logging
import numpy as np
from scipy.stats import unitary_group
from ..algebra import NestAlgebraSpec, full_algebra, project, contains, norm
from ..solver import sample_derivation

logger = logging.getLogger(__name__)

ELEMENT_KINDS = ("general", "hermitian", "real_diagonal", "trace_free")

class SamplerBase():
    """Random draws for the property sweeps; every draw takes an explicit generator."""
    name = "abstract"

    def draw(self, rng):
        raise NotImplementedError("This is abstract class")

    def sample(self, count, seed=0):
        """draw ``count`` elements from a generator seeded by ``seed``

        Arguments:
            count {int} -- number of samples

        Returns:
            list -- list of drawn elements
        """
        rng = np.random.default_rng(seed)
        return [self.draw(rng) for _ in range(count)]

class UnitarySampler(SamplerBase):
    """Haar-random unitaries of size dim."""
    name = "unitary"

    def __init__(self, dim : int) -> None:
        self.dim = dim

    def draw(self, rng):
        return unitary_group.rvs(self.dim, random_state=rng)

class NestElementSampler(SamplerBase):
    """Elements of a nest algebra with Frobenius norm uniform in (0, max_norm].

    kind:
        general        any element of the algebra
        hermitian      self-adjoint elements (block diagonal for a proper nest)
        real_diagonal  elements of the algebra with real diagonal
        trace_free     general elements shifted to trace zero
    """
    name = "nest_element"

    def __init__(self, spec : NestAlgebraSpec, max_norm : float = 1.5, kind : str = "general") -> None:
        if kind not in ELEMENT_KINDS:
            raise ValueError("Unknown element kind, choose from {}".format(ELEMENT_KINDS))
        self.spec     = spec
        self.max_norm = max_norm
        self.kind     = kind

    def draw(self, rng):
        dim = self.spec.dim
        X = rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim))
        if self.kind == "hermitian":
            X = np.where(self.spec.mask & self.spec.mask.T, X + X.T.conj(), 0)
        else:
            X = project(self.spec, X)
        if self.kind == "real_diagonal":
            X[np.diag_indices(dim)] = X.diagonal().real
        if self.kind == "trace_free":
            X -= np.trace(X)/dim*np.eye(dim)
        size = norm(X)
        if size == 0:
            return X
        return X*rng.uniform(0, self.max_norm)/size

class DerivationSampler(SamplerBase):
    """Unit-norm derivations of a nest algebra, uniform over directions of the Leibniz null space."""
    name = "derivation"

    def __init__(self, spec : NestAlgebraSpec) -> None:
        self.spec = spec

    def draw(self, rng):
        return sample_derivation(self.spec, rng)

def test_unitary_sampler():
    sampler = UnitarySampler(3)
    for u in sampler.sample(20):
        assert np.allclose(u@u.T.conj(), np.eye(3))
    first, second = sampler.sample(2, seed=5), sampler.sample(2, seed=5)
    assert all(np.array_equal(a, b) for a, b in zip(first, second))

def test_nest_element_sampler():
    from ..algebra import build_nest_algebra
    spec = build_nest_algebra(4, [0, 2, 4])
    for kind in ELEMENT_KINDS:
        for X in NestElementSampler(spec, 1.5, kind).sample(20, seed=1):
            assert contains(spec, X)
            assert norm(X) <= 1.5 + 1e-12
            if kind == "hermitian":
                assert np.allclose(X, X.T.conj())
            if kind == "real_diagonal":
                assert np.allclose(X.diagonal().imag, 0)
            if kind == "trace_free":
                assert abs(np.trace(X)) < 1e-12
    H = NestElementSampler(full_algebra(3), 1., "hermitian").sample(1)[0]
    assert np.count_nonzero(np.abs(H) > 0) == 9

def test_derivation_sampler():
    from ..algebra import upper_triangular_algebra
    from ..solver import inner_derivation_solve
    spec = upper_triangular_algebra(3)
    for D in DerivationSampler(spec).sample(5, seed=2):
        assert np.isclose(np.linalg.norm(D.matrix), 1)
        assert inner_derivation_solve(D, spec).residual < 1e-8

if __name__ == "__main__":
    test_unitary_sampler()
    test_nest_element_sampler()
    test_derivation_sampler()
