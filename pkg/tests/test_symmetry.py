import pytest

from cayleyci.algebra import IntMatrix, coordinates, span
from cayleyci.analyzers.symmetry import (
    HAut, LinearMapSearch, ambient_transporter, extends_to_ambient, independent_subset,
    lattice_transporter, set_stabilizer, transporter,
)
from cayleyci.errors import InvalidInputError, PreconditionError
from cayleyci.graphs import validate


def _preserves(S, tau):
    L = S.span()
    images = set()
    for s in S.vectors:
        images.add(L.basis.apply(tau.matrix.apply(coordinates(L, s))))
    return images == S.as_set()


def test_stabilizer_orders(square_grid, triangular, two_component, stretched):
    assert set_stabilizer(square_grid.span(), square_grid).order == 8
    assert set_stabilizer(triangular.span(), triangular).order == 12
    assert set_stabilizer(two_component.span(), two_component).order == 12
    for m in (2, 3, 5):
        S = stretched(m)
        assert set_stabilizer(S.span(), S).order == 8


def test_stabilizer_elements_preserve_set(triangular):
    stab = set_stabilizer(triangular.span(), triangular)
    assert all(_preserves(triangular, tau) for tau in stab)
    identity = HAut(IntMatrix.identity(2))
    assert identity in stab
    assert HAut(-IntMatrix.identity(2)) in stab


def test_directed_stabilizer():
    S = validate([[1, 0], [0, 1]], 2, "directed")
    stab = set_stabilizer(S.span(), S)
    assert stab.order == 2


def test_stabilizer_requires_matching_span(square_grid):
    with pytest.raises(PreconditionError):
        set_stabilizer(span([[2, 0], [0, 1]], 2), square_grid)


def test_rank_one_stabilizer_in_plane():
    S = validate([[1, 0], [3, 0]], 2, "undirected")
    assert set_stabilizer(S.span(), S).order == 2


def test_transporter(square_grid):
    S2 = validate([[1, 1], [0, 1]], 2, "undirected")
    tau = transporter(square_grid.span(), square_grid, S2)
    assert tau is not None
    L = square_grid.span()
    images = {L.basis.apply(tau.matrix.apply(s)) for s in square_grid.vectors}
    assert images == S2.as_set()
    S3 = validate([[1, 0], [0, 1], [1, 1]], 2, "undirected")
    assert transporter(L, square_grid, S3) is None


def test_lattice_transporter_between_different_lattices(stretched):
    S, S2 = stretched(3), stretched(5)
    M = lattice_transporter(S.span(), S, S2.span(), S2)
    assert M is not None
    assert abs(M[0, 0]) + abs(M[0, 1]) == 1


def test_extends_to_ambient_full_rank():
    L = span([[2, 0], [0, 1]], 2)
    swap = HAut(IntMatrix.from_rows([[0, 1], [1, 0]]))
    assert extends_to_ambient(L, swap) is None
    M = extends_to_ambient(L, HAut(-IntMatrix.identity(2)))
    assert M == -IntMatrix.identity(2)
    shear = HAut(IntMatrix.from_rows([[1, 0], [2, 1]]))
    M = extends_to_ambient(L, shear)
    assert M is not None and M.apply((2, 0)) == (2, 2)


def test_extends_to_ambient_rank_deficient():
    L = span([[2, 0]], 2)
    M = extends_to_ambient(L, HAut(IntMatrix.from_rows([[-1]])))
    assert M is not None
    assert M.apply((2, 0)) == (-2, 0)
    with pytest.raises(InvalidInputError):
        extends_to_ambient(L, HAut(IntMatrix.identity(2)))


def test_ambient_transporter(square_grid, stretched):
    S2 = validate([[1, 1], [0, 1]], 2, "undirected")
    M = ambient_transporter(square_grid, S2)
    assert M is not None and square_grid.apply(M) == S2
    assert ambient_transporter(stretched(4), validate([[2, 0], [0, 2]], 2, "undirected")) is None
    assert ambient_transporter(square_grid, validate([[1, 0]], 2, "undirected")) is None


def test_ambient_transporter_rank_deficient():
    S = validate([[2, 0]], 2, "undirected")
    S2 = validate([[2, 2]], 2, "undirected")
    M = ambient_transporter(S, S2)
    assert M is not None and S.apply(M) == S2
    assert ambient_transporter(S, validate([[4, 0]], 2, "undirected")) is None


def test_linear_map_search_basis():
    vectors = [(1, 0), (2, 0), (0, 1), (1, 1)]
    assert independent_subset(vectors) == [(1, 0), (0, 1)]
    search = LinearMapSearch(vectors)
    assert search.r == 2
    assert search.evaluate(list(search.basis), (3, 4)) == [3, 4]
    swapped = [tuple(reversed(b)) for b in search.basis]
    assert search.evaluate(swapped, (3, 4)) == [4, 3]


def test_linear_map_search_respects_negation(square_grid):
    search = LinearMapSearch(square_grid.vectors)
    assert search.symmetric
    assert len(list(search.maps(square_grid.vectors))) == 8
    # 第一个像 4 种，第二个像排除 ±t 后剩 2 种
    assert search.candidates == 4 + 4 * 2
    lopsided = [(1, 0), (-1, 0), (0, 1), (1, 1)]
    assert list(search.maps(lopsided)) == []
    assert search.candidates == 2
