import pytest

from cayleyci.algebra import IntMatrix, INFINITE, Lattice, coordinates, index, simultaneous_basis, span, standardize
from cayleyci.algebra.intlin import is_unimodular
from cayleyci.errors import InvalidInputError, PreconditionError


def test_span_uses_canonical_basis():
    L = span([[2, 0], [0, 1], [2, 1]], 2)
    assert L == Lattice.standard(2, 2)
    assert L == span([[2, 1], [0, -1]], 2)
    assert L.rank == 2


def test_index():
    assert index(span([[2, 0], [0, 1], [2, 1]], 2)) == 2
    assert index(span([[4, 0], [0, 1]], 2)) == 4
    assert index(span([[1, 1], [1, -1]], 2)) == 2
    assert index(span([[1, 0]], 2)) is INFINITE
    assert index(span([[3]], 1)) == 3


def test_span_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        span([], 2)
    with pytest.raises(InvalidInputError):
        span([[0, 0]], 2)
    with pytest.raises(InvalidInputError):
        span([[1, 0, 0]], 2)


def test_simultaneous_basis_rebuilds_lattice():
    for vectors in ([[4, 0], [0, 1]], [[2, 2], [0, 6]], [[1, 2, 3], [4, 5, 6]], [[6, 0, 0], [0, 10, 0], [0, 0, 15]]):
        L = span(vectors, len(vectors[0]))
        Y, a = simultaneous_basis(L)
        assert is_unimodular(Y)
        assert all(b % x == 0 for x, b in zip(a, a[1:]))
        assert span([[ai * x for x in Y.col(i)] for i, ai in enumerate(a)], L.n) == L


def test_standardize_swap_case():
    L = span([[1, 0], [0, 2]], 2)
    sigma = standardize(L)
    assert is_unimodular(sigma)
    assert L.image(sigma) == span([[2, 0], [0, 1]], 2)


def test_standardize_diagonal_index_two():
    L = span([[1, 1], [1, -1]], 2)
    sigma = standardize(L)
    assert L.image(sigma) == Lattice.standard(2, 2)


def test_standardize_three_dimensions():
    L = span([[1, 0, 0], [0, 1, 0], [0, 0, 6]], 3)
    assert L.image(standardize(L)) == Lattice.standard(3, 6)


def test_standardize_preconditions():
    with pytest.raises(PreconditionError):
        standardize(span([[4, 0], [0, 1]], 2))
    with pytest.raises(PreconditionError):
        standardize(span([[1, 0]], 2))
    with pytest.raises(PreconditionError):
        standardize(span([[2]], 1))


def test_coordinates():
    L = Lattice.standard(2, 2)
    x = coordinates(L, (4, 3))
    assert L.basis.apply(x) == (4, 3)
    assert coordinates(L, (1, 0)) is None
    assert L.contains((-2, 5))
    with pytest.raises(InvalidInputError):
        coordinates(L, (1, 0, 0))


def test_saturation_and_index_in():
    L = span([[2, 2]], 2)
    assert L.saturation() == span([[1, 1]], 2)
    assert L.index_in(L.saturation()) == 2
    assert Lattice.standard(2, 3).index_in(span([[1, 0], [0, 1]], 2)) == 3
    assert L.index_in(span([[1, 0], [0, 1]], 2)) is INFINITE


def test_lattice_rejects_dependent_basis():
    with pytest.raises(InvalidInputError):
        Lattice(2, IntMatrix.from_columns([[1, 0], [2, 0]]))
