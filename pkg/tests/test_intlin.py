import itertools
import math

import pytest
from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors
from sympy.polys.domains import ZZ

from cayleyci.algebra.intlin import (
    IntMatrix, det, hnf, inverse_unimodular, is_unimodular, snf, solve_integer, xgcd,
)
from cayleyci.algebra import intlin
from cayleyci.algebra.lattice import span
from cayleyci.errors import InvalidInputError, VerificationError


def _sympy_factors(A: IntMatrix) -> list[int]:
    factors = invariant_factors(Matrix(A.to_rows()), domain=ZZ)
    return [abs(int(x)) for x in factors if int(x) != 0]


def test_snf_reference_matrix():
    A = IntMatrix.from_rows([[12, 6, 4, 8], [3, 9, 6, 12], [2, 16, 14, 28], [20, 10, 10, 20]])
    dec = snf(A)
    assert dec.diagonal == [1, 10, 30]
    assert dec.rank == 3
    assert dec.U @ A @ dec.V == dec.D
    assert is_unimodular(dec.U) and is_unimodular(dec.V)


def test_snf_matches_sympy_on_random_matrices(rng):
    for _ in range(40):
        n = rng.randint(1, 4)
        A = IntMatrix(n, n, tuple(rng.randint(-9, 9) for _ in range(n * n)))
        if not any(A.entries):
            continue
        dec = snf(A)
        assert dec.U @ A @ dec.V == dec.D
        assert dec.diagonal == _sympy_factors(A)


def _minor_gcds(A: IntMatrix) -> list[int]:
    """d_1⋯d_k = 全部 k 阶子式的最大公约数"""
    M = Matrix(A.to_rows())
    out = []
    for k in range(1, min(A.rows, A.cols) + 1):
        g = 0
        for rows in itertools.combinations(range(A.rows), k):
            for cols in itertools.combinations(range(A.cols), k):
                g = math.gcd(g, int(M.extract(list(rows), list(cols)).det()))
        if g == 0:
            break
        out.append(g)
    return out


def test_snf_divisibility_chain_matches_minors(rng):
    for _ in range(40):
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        A = IntMatrix(rows, cols, tuple(rng.randint(-9, 9) for _ in range(rows * cols)))
        dec = snf(A)
        assert dec.U @ A @ dec.V == dec.D
        for a, b in zip(dec.diagonal, dec.diagonal[1:]):
            assert b % a == 0
        products, acc = [], 1
        for d in dec.diagonal:
            acc *= d
            products.append(acc)
        assert products == _minor_gcds(A)


def test_snf_rectangular():
    A = IntMatrix.from_rows([[2, 4]])
    assert snf(A).diagonal == [2]
    A = IntMatrix.from_rows([[2, 0], [0, 3]])
    assert snf(A).diagonal == [1, 6]


def test_hnf_row_lattice():
    A = IntMatrix.from_rows([[2, 0], [0, 1], [2, 1]])
    H, U = hnf(A)
    assert U @ A == H
    assert is_unimodular(U)
    assert H.to_rows() == [[2, 0], [0, 1], [0, 0]]


def test_lattice_basis_is_transposed_row_form():
    H, _ = hnf(IntMatrix.from_rows([[1, 1], [0, 2]]))
    assert H.to_rows() == [[1, 1], [0, 2]]
    assert span([[1, 1], [0, 2]], 2).basis == H.transpose()


def test_hnf_reduces_above_pivots(rng):
    for _ in range(30):
        A = IntMatrix(3, 3, tuple(rng.randint(-6, 6) for _ in range(9)))
        H, U = hnf(A)
        assert U @ A == H
        rows = H.to_rows()
        for r, row in enumerate(rows):
            if not any(row):
                continue
            j = next(c for c, x in enumerate(row) if x)
            assert row[j] > 0
            for above in rows[:r]:
                assert 0 <= above[j] < row[j]


def test_det_exact():
    assert det(IntMatrix.from_rows([[2, 1], [1, 1]])) == 1
    assert det(IntMatrix.from_rows([[0, 1], [1, 0]])) == -1
    assert det(IntMatrix.from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 10]])) == -3
    assert det(IntMatrix.from_rows([[1, 2], [2, 4]])) == 0


def test_det_matches_sympy(rng):
    for _ in range(30):
        n = rng.randint(1, 4)
        A = IntMatrix(n, n, tuple(rng.randint(-20, 20) for _ in range(n * n)))
        assert det(A) == int(Matrix(A.to_rows()).det())


def test_det_requires_square():
    with pytest.raises(InvalidInputError):
        det(IntMatrix.from_rows([[1, 2, 3]]))


def test_solve_integer():
    A = IntMatrix.from_rows([[2, 0], [0, 3]])
    assert solve_integer(A, (4, 9)) == (2, 3)
    assert solve_integer(A, (1, 0)) is None
    B = IntMatrix.from_rows([[1, 1], [1, -1]])
    x = solve_integer(B, (3, 1))
    assert B.apply(x) == (3, 1)
    assert solve_integer(B, (1, 0)) is None


def test_inverse_unimodular():
    A = IntMatrix.from_rows([[2, 1], [1, 1]])
    inv = inverse_unimodular(A)
    assert (A @ inv).is_identity()
    assert inv.to_rows() == [[1, -1], [-1, 2]]
    with pytest.raises(InvalidInputError):
        inverse_unimodular(IntMatrix.from_rows([[2, 0], [0, 1]]))


def test_inverse_unimodular_self_check(monkeypatch):
    broken = IntMatrix.from_rows([[1, 1], [0, 1]])
    monkeypatch.setattr(intlin, "hnf", lambda A: (broken, IntMatrix.identity(2)))
    with pytest.raises(VerificationError):
        inverse_unimodular(IntMatrix.from_rows([[2, 1], [1, 1]]))


def test_xgcd():
    x, y, g = xgcd(240, 46)
    assert g == 2 and 240 * x + 46 * y == 2
    x, y, g = xgcd(-7, 3)
    assert g == 1 and -7 * x + 3 * y == 1


def test_matrix_validation():
    with pytest.raises(InvalidInputError):
        IntMatrix.from_rows([[1, 2], [3]])
    with pytest.raises(InvalidInputError):
        IntMatrix(1, 1, (True,))
    with pytest.raises(InvalidInputError):
        IntMatrix.from_rows([])


def test_matrix_from_json_accepts_big_integer_strings():
    big = 2 ** 70
    M = IntMatrix.from_json([[str(big), 0], [0, 1]])
    assert M[0, 0] == big
    with pytest.raises(InvalidInputError):
        IntMatrix.from_json([[1.5, 0], [0, 1]])
    with pytest.raises(InvalidInputError):
        IntMatrix.from_json([[True]])
    with pytest.raises(InvalidInputError):
        IntMatrix.from_json("[[1]]")
