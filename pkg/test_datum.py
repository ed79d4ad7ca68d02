"""
Test (V,L)-data and their closed-form series
"""
import pytest

from app.models import DatumModel
from app.services.algebra_service import algebra_service
from app.services.catalog_service import catalog_service
from app.services.datum_service import datum_service
from app.services.prepro_service import prepro_service
from app.services.quiver_service import affine_shape, make_quiver
from app.services.series_service import MatSeries, TruncSeries, power_product, sym_exp


def two_loops():
    return prepro_service.preprojective_datum(make_quiver([0], [(0, 0), (0, 0)]))


def test_free_datum_cartan_polynomial():
    d = datum_service.free_datum([1, 1])
    assert datum_service.cartan_poly(d, 3)[0, 0] == TruncSeries([1, -2, 0, 0])
    assert datum_service.hilbert_A(d, 3)[0, 0] == TruncSeries([1, 2, 4, 8])
    assert datum_service.lambda_poly(d, 3) == TruncSeries.one(3)


def test_odd_generator():
    d = datum_service.free_datum([], odd=[1])
    assert datum_service.cartan_poly(d, 3)[0, 0] == TruncSeries([1, 1, 0, 0])
    assert datum_service.zeta(d, 20) == power_product({k: 1 for k in range(1, 21, 2)}, 20)


def test_partitions_from_one_generator():
    assert datum_service.zeta(datum_service.free_datum([1]), 5) == TruncSeries([1, 1, 2, 3, 5, 7])


def test_two_loop_preprojective_series():
    d = two_loops()
    assert d.m == (0, 0, 1)
    assert datum_service.hilbert_A(d, 3)[0, 0] == TruncSeries([1, 4, 15, 56])
    assert datum_service.lambda_poly(d, 4) == TruncSeries([1, 0, -1, 0, 0])
    assert datum_service.hilbert_OA(d, 2) == TruncSeries([1, 4, 20])


def test_hilbert_OA_matches_cyclic_oracle():
    d = two_loops()
    cyclic = algebra_service.brute_cyclic_dims(d.presentation, 4)
    assert datum_service.hilbert_OA(d, 4) == sym_exp(cyclic - 1)


def test_zeta_of_affine_a1():
    d = prepro_service.preprojective_datum(affine_shape("A", 1))
    assert datum_service.zeta(d, 4) == TruncSeries([1, 0, 2, 0, 5])


def test_lambda_from_m():
    d = datum_service.make_datum(1, [[[0, 2]]], m=[0, 0, 2, 1])
    assert datum_service.lambda_poly(d, 7) == power_product({2: 2, 3: 1}, 7)


def test_hochschild_euler_identity():
    d = two_loops()
    hh = datum_service.hochschild_series(d, 8)
    assert hh.hHH2 == TruncSeries.monomial(2, 1, 8)
    assert hh.hHH0.coeffs[0] == 1
    assert datum_service.euler_defect(d, hh).is_zero()


def test_sym_hh1_series():
    d = two_loops()
    # h(O(Pi)) = 1, 4, 20, 80 divided once more by 1 - t^2
    assert datum_service.sym_hh1_series(d, 3) == TruncSeries([1, 4, 21, 84])
    assert datum_service.sym_hh1_series(d, 6) == sym_exp(datum_service.hochschild_series(d, 6).hHH1)


@pytest.mark.parametrize("d", [
    datum_service.make_datum(1, [[[0, 2]]], m=[0, 0, 2, 1]),
    datum_service.datum_from_presentation(catalog_service.quantum_plane()),
], ids=["explicit", "quantum plane"])
def test_hilbert_OA_is_zeta_times_sym_of_m(d):
    m = TruncSeries.from_poly(list(d.m), 7)
    assert datum_service.hilbert_OA(d, 7) == datum_service.zeta(d, 7) * sym_exp(m)


def test_expected_rep_dimension():
    # 4d^2 arrows, d^2 relations, one trace relation
    assert datum_service.expected_rep_dimension(two_loops(), [2]) == 13
    with pytest.raises(ValueError):
        datum_service.expected_rep_dimension(two_loops(), [2, 2])


def test_free_product_of_two_polynomial_rings():
    first = prepro_service.preprojective_datum(make_quiver([0], [(0, 0)]))
    renamed = make_quiver([0], [(0, 0)]).model_copy(update={"edges": [
        make_quiver([0], [(0, 0)]).edges[0].model_copy(update={"name": "b"})]})
    second = prepro_service.preprojective_datum(renamed)
    product = datum_service.free_product(first, second, 4)
    assert product[0, 0] == TruncSeries([1, 4, 14, 48, 164])
    combined = datum_service.free_product_datum(first, second)
    assert algebra_service.brute_algebra_matrix(combined.presentation, 4) == product


def test_circle_product_with_trivial_D_is_h_of_A():
    d = two_loops()
    N = 6
    hV, hL = datum_service.hV(d, N), datum_service.hL(d, N)
    one = MatSeries.identity(1, N)
    assert datum_service.circ_product_hilbert(hV, hL, one, N) == datum_service.hilbert_A(d, N)
    assert datum_service.circ_product_OA(hV, hL, one, TruncSeries.one(N), d.m, N) == datum_service.hilbert_OA(d, N)


def test_circle_product_order_mismatch():
    d = two_loops()
    with pytest.raises(ValueError, match="order mismatch"):
        datum_service.circ_product_hilbert(datum_service.hV(d, 3), datum_service.hL(d, 3),
                                           MatSeries.identity(1, 3), 5)


def test_make_datum_validation():
    with pytest.raises(ValueError, match="weight 0"):
        datum_service.make_datum(1, [[[0, 1]]], m=[1, 0])
    with pytest.raises(ValueError, match="m is required"):
        datum_service.make_datum(1, [[[0, 1]]], [[[0, 0, 1]]])


def test_attached_presentation_must_agree():
    d = two_loops()
    with pytest.raises(ValueError, match="disagrees"):
        datum_service.make_datum(1, [[[0, 3]]], [[[0, 0, 1]]], None, d.presentation)


def test_datum_from_model():
    model = DatumModel.model_validate({"dimsV": [[[0, 2]]]})
    d = datum_service.datum_from_model(model)
    assert d.dim_I == 1
    assert datum_service.hilbert_A(d, 2)[0, 0] == TruncSeries([1, 2, 4])


def test_datum_model_needs_one_source():
    with pytest.raises(ValueError):
        DatumModel.model_validate({})
