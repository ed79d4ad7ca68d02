"""
Test the brute-force path algebra oracle
"""
from fractions import Fraction

import pytest

from app.models import PresentationModel
from app.services.algebra_service import AlgebraService, Presentation, algebra_service, rotation_class
from app.services.catalog_service import catalog_service
from app.services.prepro_service import prepro_service
from app.services.quiver_service import dynkin_shape, make_quiver
from app.services.series_service import MatSeries, TruncSeries, mat_inv


def loops(k):
    return make_quiver([0], [(0, 0)] * k)


def commutative_plane():
    q = loops(2)
    rho = algebra_service.make_poly(q, [(Fraction(1), (0, 1)), (Fraction(-1), (1, 0))])
    return Presentation(q, [rho])


def test_free_algebra_dims():
    p = Presentation(loops(2), [])
    assert algebra_service.brute_algebra_dims(p, 5) == TruncSeries([1, 2, 4, 8, 16, 32])


def test_free_algebra_matches_inverse_of_one_minus_hV():
    q = make_quiver([0, 1], [(0, 1), (1, 0), (1, 1)])
    hV = MatSeries.from_int_matrix([[0, 1], [1, 1]], 5, power=1)
    expected = mat_inv(MatSeries.identity(2, 5) - hV)
    assert algebra_service.brute_algebra_matrix(Presentation(q, []), 5) == expected


def test_commutative_polynomial_ring():
    p = commutative_plane()
    assert algebra_service.brute_algebra_dims(p, 6) == TruncSeries([1, 2, 3, 4, 5, 6, 7])
    # commutative, so A/[A,A] = A
    assert algebra_service.brute_cyclic_dims(p, 6) == TruncSeries([1, 2, 3, 4, 5, 6, 7])
    assert algebra_service.compute_L_circ(p, 4) == TruncSeries([0, 0, 1, 0, 0])


def test_quantum_plane():
    p = catalog_service.quantum_plane(2)
    assert algebra_service.brute_algebra_dims(p, 8) == TruncSeries(list(range(1, 10)))
    # xy - 2yx is not a commutator
    assert algebra_service.compute_L_circ(p, 3) == TruncSeries.zero(3)


def test_two_loop_preprojective():
    p = prepro_service.preprojective_presentation(loops(2))
    assert algebra_service.brute_algebra_dims(p, 3) == TruncSeries([1, 4, 15, 56])


def test_partial_preprojective_a2():
    p = prepro_service.partial_preprojective(dynkin_shape("A", 2), ["0"], 4).presentation
    assert algebra_service.brute_algebra_dims(p, 4) == TruncSeries([2, 2, 1, 0, 0])
    assert algebra_service.brute_cyclic_dims(p, 4) == TruncSeries([2, 0, 0, 0, 0])


def test_necklace_counts():
    q = loops(2)
    assert [algebra_service.necklace_count(q, r) for r in range(5)] == [1, 2, 3, 4, 6]


def test_commutator_subspace_quotient_is_necklaces():
    q = loops(2)
    for r in range(1, 6):
        assert algebra_service.commutator_subspace(q, r).quotient_dim == algebra_service.necklace_count(q, r)


def test_commutator_subspace_counts_open_paths():
    q = make_quiver([0, 1], [(0, 1)])
    sub = algebra_service.commutator_subspace(q, 1)
    assert sub.rank == 1
    assert sub.quotient_dim == 0


def test_rotation_class():
    assert rotation_class((1, 0, 1)) == (0, 1, 1)


def test_enumerate_paths_is_deterministic():
    q = loops(2)
    paths = algebra_service.enumerate_paths(q, 2)
    assert [p.edges for p in paths] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert [p.tail for p in algebra_service.enumerate_paths(make_quiver([0, 1], []), 0)] == [0, 1]


def test_path_cap():
    with pytest.raises(RuntimeError, match="path cap exceeded"):
        AlgebraService(path_cap=10).enumerate_paths(loops(2), 4)


def test_make_poly_checks_composition_and_homogeneity():
    q = make_quiver([0, 1], [(0, 1), (0, 1)])
    with pytest.raises(ValueError, match="do not compose"):
        algebra_service.make_poly(q, [(Fraction(1), (0, 1))])
    q = loops(2)
    with pytest.raises(ValueError, match="homogeneous"):
        algebra_service.make_poly(q, [(Fraction(1), (0,)), (Fraction(1), (0, 1))])


def test_presentation_from_model():
    model = PresentationModel.model_validate({
        "quiver": {"vertices": ["v"], "edges": [{"tail": "v", "head": "v", "name": "x"},
                                               {"tail": "v", "head": "v", "name": "y"}]},
        "relations": [[{"coeff": "1", "path": ["x", "y"]}, {"coeff": "-1", "path": ["y", "x"]}]],
    })
    p = algebra_service.presentation_from_model(model)
    assert algebra_service.brute_algebra_dims(p, 3) == TruncSeries([1, 2, 3, 4])


def test_unknown_edge_in_relation():
    model = PresentationModel.model_validate({
        "quiver": {"vertices": ["v"], "edges": [{"tail": "v", "head": "v", "name": "x"}]},
        "relations": [[{"path": ["z"]}]],
    })
    with pytest.raises(ValueError, match="unknown edge"):
        algebra_service.presentation_from_model(model)


def test_relation_dims_drop_dependent_relations():
    q = loops(2)
    rho = algebra_service.make_poly(q, [(Fraction(1), (0, 1))])
    p = Presentation(q, [rho, rho])
    assert algebra_service.relation_dims(p, 3) == [[[0, 0, 1, 0]]]


def test_anick_defect_vanishes_for_preprojective():
    p = prepro_service.preprojective_presentation(loops(2))
    hA = algebra_service.brute_algebra_matrix(p, 5)
    hV = MatSeries.from_int_matrix([[4]], 5, power=1)
    hL = MatSeries.from_int_matrix([[1]], 5, power=2)
    assert algebra_service.anick_defect(p, hA, hV, hL).is_zero()


def test_anick_defect_detects_a_non_complete_intersection():
    # x^2 = 0 in one variable: h(A) = 1 + t, but 1/(1 - t + t^2) predicts 1 + t + 0t^2 - t^3
    q = loops(1)
    p = Presentation(q, [algebra_service.make_poly(q, [(Fraction(1), (0, 0))])])
    hA = algebra_service.brute_algebra_matrix(p, 4)
    assert hA[0, 0] == TruncSeries([1, 1, 0, 0, 0])
    defect = algebra_service.anick_defect(p, hA, MatSeries.from_int_matrix([[1]], 4, power=1),
                                          MatSeries.from_int_matrix([[1]], 4, power=2))
    assert not defect.is_zero()
