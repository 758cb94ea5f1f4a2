import numpy as np
from ..errors import DimensionError, MatrixLiteralError, SingularCocycleError

complex_type = np.complex128

NORM_KINDS = ("spectral", "frobenius")

def as_element(A, dim=None) -> np.ndarray:
    """Coerce ``A`` into an algebra element (square complex128 array with finite entries).

    Args:
        A: array-like square matrix
        dim (int, optional): required dimension
    Returns:
        np.ndarray: complex128 copy of ``A``
    """
    A = np.array(A, dtype=complex_type)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionError("element must be a non-empty square matrix, got shape {}".format(A.shape))
    if dim is not None and A.shape[0] != dim:
        raise DimensionError("element has dim {}, expected {}".format(A.shape[0], dim))
    if not np.all(np.isfinite(A)):
        raise DimensionError("element has non-finite entries")
    return A

def identity(dim : int) -> np.ndarray:
    return np.eye(dim, dtype=complex_type)

def matrix_unit(dim : int, i : int, j : int) -> np.ndarray:
    E = np.zeros((dim, dim), dtype=complex_type)
    E[i, j] = 1
    return E

def commutator(A : np.ndarray, B : np.ndarray) -> np.ndarray:
    return A@B - B@A

def norm(A : np.ndarray, kind : str = "frobenius") -> float:
    """Spectral (largest singular value) or Frobenius norm of an element."""
    if kind == "spectral":
        return float(np.linalg.norm(A, 2))
    if kind == "frobenius":
        return float(np.linalg.norm(A, "fro"))
    raise ValueError("Unknown norm kind, choose from {}".format(NORM_KINDS))

def smallest_singular_value(A : np.ndarray) -> float:
    return float(np.linalg.svd(A, compute_uv=False)[-1])

def invert(A : np.ndarray, error=SingularCocycleError) -> np.ndarray:
    """A^{-1}, raising ``error`` where numpy raises LinAlgError."""
    try:
        return np.linalg.inv(A)
    except np.linalg.LinAlgError as e:
        raise error(str(e))

def parse_matrix_literal(literal, field="matrix") -> np.ndarray:
    """Decode the JSON matrix literal: rows of entries, each a real or a [re, im] pair."""
    if not isinstance(literal, (list, tuple)) or len(literal) == 0:
        raise MatrixLiteralError("{} must be a non-empty array of rows".format(field))
    dim = len(literal)
    A = np.zeros((dim, dim), dtype=complex_type)
    for i, row in enumerate(literal):
        if not isinstance(row, (list, tuple)) or len(row) != dim:
            raise MatrixLiteralError("{} row {} must have {} entries".format(field, i, dim))
        for j, entry in enumerate(row):
            if isinstance(entry, (list, tuple)):
                if len(entry) != 2:
                    raise MatrixLiteralError("{}[{}][{}] must be [re, im]".format(field, i, j))
                A[i, j] = complex(float(entry[0]), float(entry[1]))
            elif isinstance(entry, (int, float)) and not isinstance(entry, bool):
                A[i, j] = float(entry)
            else:
                raise MatrixLiteralError("{}[{}][{}] is neither a number nor [re, im]".format(field, i, j))
    if not np.all(np.isfinite(A)):
        raise MatrixLiteralError("{} has non-finite entries".format(field))
    return A

def format_matrix_literal(A : np.ndarray) -> list:
    """Inverse of parse_matrix_literal; real entries are written as plain numbers."""
    rows = []
    for row in np.asarray(A, dtype=complex_type):
        entries = []
        for z in row:
            if z.imag == 0:
                entries.append(float(z.real))
            else:
                entries.append([float(z.real), float(z.imag)])
        rows.append(entries)
    return rows

def test_norm():
    assert np.isclose(norm(identity(3), "frobenius"), np.sqrt(3))
    assert np.isclose(norm(np.diag([3, -4j]), "spectral"), 4)
    assert np.isclose(norm(np.array([[0, 2], [0, 0]]), "spectral"), 2)

def test_norm_submultiplicative():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        dim = rng.integers(2, 7)
        A = rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim))
        B = rng.normal(size=(dim, dim)) + 1.j*rng.normal(size=(dim, dim))
        for kind in NORM_KINDS:
            assert norm(A@B, kind) <= norm(A, kind)*norm(B, kind)*(1 + 1e-12)

def test_invert():
    import pytest
    from ..errors import NotInnerError
    A = np.array([[2., 1.j], [0., 0.5]])
    assert np.allclose(invert(A)@A, np.eye(2))
    with pytest.raises(SingularCocycleError):
        invert(np.array([[1., 2.], [2., 4.]]))
    with pytest.raises(NotInnerError):
        invert(np.zeros((2, 2)), error=NotInnerError)

def test_matrix_literal():
    A = parse_matrix_literal([[1, [0, 2]], [0, [3.5, -1]]])
    assert np.allclose(A, [[1, 2j], [0, 3.5 - 1j]])
    assert format_matrix_literal(A) == [[1.0, [0.0, 2.0]], [0.0, [3.5, -1.0]]]

def test_matrix_literal_rejects_ragged():
    import pytest
    with pytest.raises(MatrixLiteralError):
        parse_matrix_literal([[1, 2], [3]])
    with pytest.raises(MatrixLiteralError):
        parse_matrix_literal([[1, "a"], [0, 1]])

if __name__ == "__main__":
    test_norm()
    test_norm_submultiplicative()
    test_invert()
    test_matrix_literal()
