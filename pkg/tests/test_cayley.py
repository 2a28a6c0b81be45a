import pytest

from cayleyci.algebra import INFINITE, IntMatrix
from cayleyci.errors import InvalidInputError, PreconditionError
from cayleyci.graphs import ConnectionSet, Mode, ResidueSet, ball, component_count, residue_window, torus, validate


def test_validate_closes_undirected_sets():
    S = validate([[1, 0]], 2, "undirected")
    assert S.vectors == ((-1, 0), (1, 0))
    D = validate([[1, 0]], 2, "directed")
    assert D.vectors == ((1, 0),)
    assert D.underlying() == ((-1, 0), (1, 0))


def test_validate_rejects_malformed_input():
    with pytest.raises(InvalidInputError):
        validate([[0, 0]], 2, "undirected")
    with pytest.raises(InvalidInputError):
        validate([], 2, "undirected")
    with pytest.raises(InvalidInputError):
        validate([[1, 0, 0]], 2, "undirected")
    with pytest.raises(InvalidInputError):
        validate([[True, 0]], 2, "undirected")
    with pytest.raises(InvalidInputError):
        validate([[1, 0]], 2, "sideways")


def test_mode_parse():
    assert Mode.parse("DIRECTED") is Mode.DIRECTED
    assert Mode.parse(Mode.UNDIRECTED) is Mode.UNDIRECTED


def test_connection_set_json():
    S = ConnectionSet.from_json({"n": 2, "mode": "undirected", "set": [[2, 0], [0, 1], [2, 1]]})
    assert len(S) == 6
    assert ConnectionSet.from_json(S.to_json()) == S
    big = ConnectionSet.from_json({"n": 1, "set": [[str(2 ** 60)]]})
    assert (2 ** 60,) in big
    with pytest.raises(InvalidInputError):
        ConnectionSet.from_json({"n": 2})
    with pytest.raises(InvalidInputError):
        ConnectionSet.from_json({"n": 2, "set": [[1.0, 0]]})
    with pytest.raises(InvalidInputError):
        ConnectionSet.from_json([[1, 0]])


def test_apply_matrix(square_grid):
    M = IntMatrix.from_rows([[1, 1], [0, 1]])
    image = square_grid.apply(M)
    assert image.as_set() == {(1, 0), (-1, 0), (1, 1), (-1, -1)}


def test_component_count(two_component):
    assert component_count(two_component) == 2
    assert component_count(validate([[4, 0], [0, 1]], 2, "undirected")) == 4
    assert component_count(validate([[1, 0]], 2, "undirected")) is INFINITE
    assert component_count(validate([[2], [3]], 1, "directed")) == 1


def test_ball(square_grid):
    g1 = ball(square_grid, 1)
    assert g1.order == 5
    assert len(g1.arcs) == 8
    assert g1.vertices[0] == (0, 0)
    g2 = ball(square_grid, 2)
    assert g2.order == 13
    assert g2.is_symmetric()
    with pytest.raises(PreconditionError):
        ball(square_grid, -1)


def test_torus(square_grid):
    g = torus(square_grid, 5)
    assert g.order == 25
    assert len(g.arcs) == 100
    assert g.component_count() == 1
    with pytest.raises(PreconditionError):
        torus(square_grid, 2)


def test_torus_components_match_index():
    S = validate([[4, 0], [0, 1]], 2, "undirected")
    assert torus(S, 12).component_count() == 4


def test_torus_directed_arcs():
    S = validate([[1, 0], [0, 1]], 2, "directed")
    g = torus(S, 3)
    assert len(g.arcs) == 18
    assert not g.is_symmetric()


def test_residue_set_closure():
    R = ResidueSet(5, frozenset({1}))
    assert R.classes == {1, 4}
    assert R.contains(-6) and not R.contains(10)
    with pytest.raises(InvalidInputError):
        ResidueSet(5, frozenset({0}))
    with pytest.raises(InvalidInputError):
        ResidueSet(1, frozenset({1}))


def test_residue_window():
    R = ResidueSet(5, frozenset({1, 4}))
    g = residue_window(R, 5)
    assert g.order == 11
    assert g.has_arc((0,), (1,)) and g.has_arc((0,), (4,)) and g.has_arc((0,), (-4,))
    assert not g.has_arc((0,), (2,))
    with pytest.raises(PreconditionError):
        residue_window(R, 4)


def test_to_networkx_and_induced(square_grid):
    g = ball(square_grid, 2)
    nxg = g.to_networkx()
    assert nxg.number_of_nodes() == 13
    assert nxg.number_of_edges() == len(g.arcs)
    inner = g.induced(ball(square_grid, 1).vertices)
    assert inner.order == 5 and len(inner.arcs) == 8
