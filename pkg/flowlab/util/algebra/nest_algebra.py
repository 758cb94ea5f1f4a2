import numpy as np
import networkx as nx
from scipy.linalg import null_space
from .common import complex_type, as_element, matrix_unit, norm
from .superoperator import vectorize, unvectorize
from ..errors import DimensionError, NestSpecError

DEFAULT_MEMBERSHIP_TOL = 1e-10

class NestAlgebraSpec:
    """Finite nest 0 = d_0 < d_1 < ... < d_k = dim and its block upper-triangular algebra.

    The nest is held as a chain digraph over its blocks; (i, j) is in the pattern
    iff the block of j is reachable from the block of i.
    """
    def __init__(self, dim : int, nest_dims, membership_tol : float = DEFAULT_MEMBERSHIP_TOL) -> None:
        nest_dims = tuple(int(d) for d in nest_dims)
        if dim < 1:
            raise NestSpecError("dim must be positive, got {}".format(dim))
        if len(nest_dims) < 2 or nest_dims[0] != 0 or nest_dims[-1] != dim:
            raise NestSpecError("nest_dims must start at 0 and end at {}, got {}".format(dim, list(nest_dims)))
        if any(a >= b for a, b in zip(nest_dims[:-1], nest_dims[1:])):
            raise NestSpecError("nest_dims must be strictly increasing, got {}".format(list(nest_dims)))
        if membership_tol < 0:
            raise NestSpecError("membership_tol must be nonnegative")

        self.dim            = int(dim)
        self.nest_dims      = nest_dims
        self.membership_tol = float(membership_tol)

        self.chain = nx.DiGraph()
        self.chain.add_nodes_from(range(len(nest_dims) - 1))
        self.chain.add_edges_from((p, p + 1) for p in range(len(nest_dims) - 2))
        reach = nx.transitive_closure_dag(self.chain)

        block = np.searchsorted(nest_dims, np.arange(dim), side="right") - 1
        mask  = np.zeros((dim, dim), dtype=bool)
        for i in range(dim):
            for j in range(dim):
                mask[i, j] = block[i] == block[j] or reach.has_edge(block[i], block[j])
        mask.setflags(write=False)
        self.block = block
        self.mask  = mask
        self.units = tuple((i, j) for i in range(dim) for j in range(dim) if mask[i, j])

    def __repr__(self):
        return "NestAlgebraSpec(dim={}, nest_dims={})".format(self.dim, list(self.nest_dims))

    def __eq__(self, other):
        return isinstance(other, NestAlgebraSpec) and (self.dim, self.nest_dims) == (other.dim, other.nest_dims)

    def __hash__(self):
        return hash((self.dim, self.nest_dims))

    @property
    def algebra_dimension(self) -> int:
        return len(self.units)

    def basis(self) -> list:
        """Matrix units E_ij of the pattern, row-major."""
        return [matrix_unit(self.dim, i, j) for i, j in self.units]

    def basis_matrix(self) -> np.ndarray:
        """dim^2 x k matrix whose columns are vec(E) for the basis units."""
        B = np.zeros((self.dim*self.dim, len(self.units)), dtype=complex_type)
        for k, (i, j) in enumerate(self.units):
            B[i + j*self.dim, k] = 1
        return B

    def projections(self) -> list:
        """Nest projections Q_m onto the first d_m coordinates."""
        out = []
        for d in self.nest_dims:
            Q = np.zeros((self.dim, self.dim), dtype=complex_type)
            Q[:d, :d] = np.eye(d)
            out.append(Q)
        return out

def build_nest_algebra(dim : int, nest_dims) -> NestAlgebraSpec:
    return NestAlgebraSpec(dim, nest_dims)

def full_algebra(dim : int) -> NestAlgebraSpec:
    """Trivial nest {0, H}; also stands in for the quasi-triangular algebra at finite dimension."""
    return NestAlgebraSpec(dim, [0, dim])

def upper_triangular_algebra(dim : int) -> NestAlgebraSpec:
    return NestAlgebraSpec(dim, range(dim + 1))

def _check_dim(spec, A):
    A = as_element(A)
    if A.shape[0] != spec.dim:
        raise DimensionError("element has dim {}, algebra has dim {}".format(A.shape[0], spec.dim))
    return A

def contains(spec : NestAlgebraSpec, A : np.ndarray, tol : float = None) -> bool:
    """True iff every entry outside the pattern has modulus <= tol.

    The default tolerance is ``membership_tol`` relative to the Frobenius norm of ``A``.
    """
    A = _check_dim(spec, A)
    if tol is None:
        tol = spec.membership_tol*norm(A, "frobenius")
    outside = np.abs(A[~spec.mask])
    return bool(outside.size == 0 or outside.max() <= tol)

def project(spec : NestAlgebraSpec, A : np.ndarray) -> np.ndarray:
    A = _check_dim(spec, A)
    return np.where(spec.mask, A, 0)

def commutant_basis(spec : NestAlgebraSpec) -> list:
    """Frobenius-orthonormal basis of {X in the algebra : XA = AX for every A in the algebra}."""
    dim = spec.dim
    B   = spec.basis_matrix()
    eye = np.eye(dim)
    rows = []
    for E in spec.basis():
        rows.append((np.kron(E.T, eye) - np.kron(eye, E))@B)
    coefficients = null_space(np.vstack(rows))
    return [unvectorize(B@c, dim) for c in coefficients.T]

def test_build_nest_algebra_examples():
    full = build_nest_algebra(2, [0, 2])
    assert full.algebra_dimension == 4
    tri = build_nest_algebra(2, [0, 1, 2])
    assert tri.units == ((0, 0), (0, 1), (1, 1))
    assert build_nest_algebra(4, [0, 2, 4]).algebra_dimension == 12

def test_build_nest_algebra_rejects_bad_nests():
    import pytest
    for dims in ([0, 2, 1, 3], [1, 3], [0, 2], [0, 1, 1, 3]):
        with pytest.raises(NestSpecError):
            build_nest_algebra(3, dims)

def test_pattern_matches_invariant_subspaces():
    rng = np.random.default_rng(0)
    spec = build_nest_algebra(5, [0, 1, 3, 5])
    A = project(spec, rng.normal(size=(5, 5)))
    for Q in spec.projections():
        assert np.allclose(Q@A@Q, A@Q)
    for i, j in spec.units:
        E = matrix_unit(5, i, j)
        assert all(np.allclose(Q@E@Q, E@Q) for Q in spec.projections())

def test_contains_and_project():
    spec = build_nest_algebra(2, [0, 1, 2])
    assert contains(spec, np.eye(2), tol=0)
    assert not contains(spec, [[0, 0], [1, 0]], tol=1e-12)
    A = np.array([[1, 2], [3, 4]])
    assert np.allclose(project(spec, A), [[1, 2], [0, 4]])
    rng = np.random.default_rng(1)
    spec = build_nest_algebra(4, [0, 2, 4])
    A = rng.normal(size=(4, 4)) + 1.j*rng.normal(size=(4, 4))
    B = rng.normal(size=(4, 4))
    assert contains(spec, project(spec, A), tol=0)
    assert np.array_equal(project(spec, project(spec, A)), project(spec, A))
    assert np.allclose(project(spec, 2*A + B), 2*project(spec, A) + project(spec, B))

def test_pattern_closed_under_products():
    spec  = build_nest_algebra(5, [0, 2, 3, 5])
    units = set(spec.units)
    for E in spec.basis():
        for F in spec.basis():
            product = E@F
            nonzero = list(zip(*np.nonzero(product)))
            assert len(nonzero) == 0 or (len(nonzero) == 1 and nonzero[0] in units)

def test_commutant_is_trivial():
    for dim, dims in [(2, [0, 1, 2]), (3, [0, 3]), (4, [0, 2, 4]), (1, [0, 1]), (4, [0, 1, 2, 3, 4])]:
        basis = commutant_basis(build_nest_algebra(dim, dims))
        assert len(basis) == 1
        X = basis[0]
        scalar = np.trace(X)/dim
        assert np.linalg.norm(X - scalar*np.eye(dim)) < 1e-10
        assert np.isclose(np.linalg.norm(X), 1)

if __name__ == "__main__":
    test_build_nest_algebra_examples()
    test_pattern_matches_invariant_subspaces()
    test_contains_and_project()
    test_pattern_closed_under_products()
    test_commutant_is_trivial()
