import random

import pytest

from cayleyci.algebra import INFINITE, IntMatrix, index, is_unimodular, simultaneous_basis
from cayleyci.analyzers.decision import (
    CiVerdict, IsoKind, Linearity, Reason, are_isomorphic, decide_ci, equivariance_check,
    index_bound, maps_onto, non_ci_witness, random_unimodular, torus_normality, verify_linearity,
    z_iso_decide,
)
from cayleyci.analyzers.quotient import product_condition
from cayleyci.analyzers.symmetry import ambient_transporter
from cayleyci.errors import InvalidInputError, PreconditionError
from cayleyci.graphs import ball, component_count, validate


def _check_witness(S, verdict):
    witness = verdict.witness
    assert witness is not None
    S2 = witness.connection_set
    assert component_count(S2) == component_count(S)
    assert maps_onto(S, S2, witness.lattice_map)
    assert ambient_transporter(S, S2) is None
    return S2


def test_product_condition_holds(two_component):
    verdict = decide_ci(two_component)
    assert verdict.is_ci
    assert verdict.reason is Reason.PRODUCT_CONDITION_HOLDS
    assert verdict.components == 2
    assert verdict.witness is None
    assert not verdict.uncertain


def test_connected_grid_is_ci(square_grid):
    verdict = decide_ci(square_grid)
    assert verdict.is_ci
    assert verdict.components == 1
    assert verdict.reason is Reason.PRODUCT_CONDITION_HOLDS


@pytest.mark.parametrize("m", [2, 3, 5])
def test_product_condition_fails(stretched, m):
    S = stretched(m)
    verdict = decide_ci(S)
    assert not verdict.is_ci
    assert verdict.reason is Reason.PRODUCT_CONDITION_FAILS
    S2 = _check_witness(S, verdict)
    assert are_isomorphic(S, S2).kind is IsoKind.COMPONENTWISE


def test_index_obstruction(stretched):
    S = stretched(11)
    assert index_bound(2, 11) == 12
    verdict = decide_ci(S)
    assert verdict.reason is Reason.INDEX_OBSTRUCTION
    assert verdict.certificate.stabilizer_order == 8
    _check_witness(S, verdict)


def test_components_not_squarefree(stretched):
    S = stretched(4)
    verdict = decide_ci(S)
    assert verdict.reason is Reason.COMPONENTS_NOT_SQUAREFREE
    assert verdict.certificate is None
    S2 = _check_witness(S, verdict)
    assert simultaneous_basis(S.span())[1] == [1, 4]
    assert simultaneous_basis(S2.span())[1] == [2, 2]


def test_components_infinite():
    S = validate([[1, 0]], 2, "undirected")
    verdict = decide_ci(S)
    assert verdict.reason is Reason.COMPONENTS_INFINITE
    assert verdict.components is INFINITE
    S2 = _check_witness(S, verdict)
    assert S2 != S
    assert index(S2.span()) is INFINITE


def test_rank_one_ambient_is_rigid():
    S = validate([[1], [3]], 1, "undirected")
    verdict = decide_ci(S)
    assert verdict.is_ci
    assert verdict.reason is Reason.N1_RIGIDITY


def test_directed_product_condition():
    S = validate([[2, 0], [0, 1], [-2, 0], [0, -1]], 2, "directed")
    assert decide_ci(S).reason is Reason.PRODUCT_CONDITION_FAILS


def test_verdict_consistency(two_component):
    with pytest.raises(InvalidInputError):
        CiVerdict(two_component, True, Reason.PRODUCT_CONDITION_FAILS, 2)


def test_non_ci_witness_requires_negative_reason(two_component, stretched):
    with pytest.raises(PreconditionError):
        non_ci_witness(two_component, Reason.PRODUCT_CONDITION_HOLDS)
    S = stretched(3)
    cert = product_condition(S.span(), S)
    S2 = non_ci_witness(S, Reason.PRODUCT_CONDITION_FAILS, cert)
    assert S2 is not None
    assert ambient_transporter(S, S2) is None


def test_are_isomorphic_ambient(square_grid):
    shear = IntMatrix.from_rows([[1, 1], [0, 1]])
    image = square_grid.apply(shear)
    witness = are_isomorphic(square_grid, image)
    assert witness.kind is IsoKind.AMBIENT_AUTOMORPHISM
    assert witness.verify()
    assert image.apply(witness.inverse().matrix) == square_grid


def test_are_isomorphic_componentwise_composes(stretched):
    S = stretched(3)
    S2 = decide_ci(S).witness.connection_set
    forward = are_isomorphic(S, S2)
    assert forward.kind is IsoKind.COMPONENTWISE
    assert forward.verify()
    back = forward.inverse()
    assert back.verify()
    loop = forward.then(back)
    assert loop.lattice_matrix().is_identity()


def test_are_isomorphic_negative(square_grid, triangular, stretched):
    assert not are_isomorphic(square_grid, triangular)
    assert are_isomorphic(stretched(2), stretched(3)).kind is IsoKind.NONE
    rank_one = validate([[1, 0], [2, 0]], 2, "undirected")
    assert not are_isomorphic(rank_one, square_grid)


def test_are_isomorphic_rejects_mixed_modes(square_grid):
    directed = validate([[1, 0], [0, 1]], 2, "directed")
    with pytest.raises(InvalidInputError):
        are_isomorphic(square_grid, directed)
    with pytest.raises(InvalidInputError):
        are_isomorphic(square_grid, validate([[1]], 1, "undirected"))


def test_z_iso_decide():
    assert z_iso_decide([1, 3], [-1, -3]) == -1
    assert z_iso_decide([1, 3], [3, 1]) == 1
    assert z_iso_decide([1, -1, 3, -3], [1, -1, 2, -2]) is None
    with pytest.raises(InvalidInputError):
        z_iso_decide([0, 1], [1])


def test_verify_linearity(square_grid):
    vertices = ball(square_grid, 3).vertices
    identity = {v: v for v in vertices}
    assert verify_linearity(square_grid, identity, 3) is Linearity.LINEAR
    swap = {v: (v[1], v[0]) for v in vertices}
    assert verify_linearity(square_grid, swap, 3) is Linearity.LINEAR
    broken = dict(identity)
    broken[(1, 0)], broken[(2, 0)] = (2, 0), (1, 0)
    assert verify_linearity(square_grid, broken, 3) is Linearity.NOT_LINEAR


def test_verify_linearity_preconditions(square_grid):
    vertices = ball(square_grid, 3).vertices
    with pytest.raises(PreconditionError):
        verify_linearity(square_grid, {v: v for v in vertices}, 1)
    shifted = {v: (v[0] + 1, v[1]) for v in vertices}
    with pytest.raises(PreconditionError):
        verify_linearity(square_grid, shifted, 3)


@pytest.mark.parametrize("fixture, expected", [("square_grid", 8), ("triangular", 12)])
def test_torus_normality(request, fixture, expected):
    S = request.getfixturevalue(fixture)
    report = torus_normality(S, 7)
    assert report.coincide
    assert report.automorphisms == report.stabilizer == expected


def test_torus_normality_requires_connected(two_component):
    with pytest.raises(PreconditionError):
        torus_normality(two_component, 7)


def test_random_unimodular(rng):
    for _ in range(20):
        assert is_unimodular(random_unimodular(rng, 3))
    a = random_unimodular(random.Random(5), 2)
    b = random_unimodular(random.Random(5), 2)
    assert a == b


def test_equivariance_quick(two_component, stretched):
    report = equivariance_check(two_component, trials=5, seed=11)
    assert report.passed
    assert report.reason is Reason.PRODUCT_CONDITION_HOLDS
    assert equivariance_check(stretched(3), trials=3, seed=11).passed
