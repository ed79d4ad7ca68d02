"""
Test Haar sampling and the Monte Carlo matrix integrals
"""
import numpy as np
import pytest
from pydantic import ValidationError

from app.models import MCEstimate
from app.services.datum_service import datum_service
from app.services.prepro_service import prepro_service
from app.services.quiver_service import make_quiver
from app.services.randmat_service import (
    ComplexSeries,
    RandmatService,
    compare_to_target,
    dense_integrand_series,
    ds_exact,
    ds_threshold,
    haar_unitary,
    integrand_series,
    torus_exact,
)
from app.services.series_service import TruncSeries


def two_loops():
    return prepro_service.preprojective_datum(make_quiver([0], [(0, 0), (0, 0)]))


def test_haar_unitary_is_unitary():
    rng = np.random.default_rng(3)
    for d in (1, 2, 5):
        u = haar_unitary(d, rng)
        assert np.allclose(u @ u.conj().T, np.eye(d), atol=1e-12)
    with pytest.raises(ValueError):
        haar_unitary(0, rng)


def test_ds_exact_values():
    assert ds_exact([(1, 2, 2)]) == 2
    assert ds_exact([(1, 1, 1), (2, 1, 1)]) == 2
    assert ds_exact([(3, 2, 2)]) == 18
    assert ds_exact([(1, 2, 1)]) == 0


def test_ds_threshold():
    assert ds_threshold([(1, 2, 2), (2, 1, 0)]) == 4


def test_complex_exp_of_log_geometric():
    log = np.array([0] + [1 / k for k in range(1, 6)], dtype=complex)
    assert np.allclose(ComplexSeries.exp(log, 5).coeffs, np.ones(6))


def test_integrand_matches_dense_operators():
    rng = np.random.default_rng(5)
    for d in (two_loops(), datum_service.free_datum([1, 1])):
        g = [haar_unitary(2, rng)]
        fast = integrand_series(d, g, 5)
        dense = dense_integrand_series(d, g, 5)
        assert np.allclose(fast.coeffs, dense.coeffs, atol=1e-8)


def test_integrand_needs_one_unitary_per_vertex():
    with pytest.raises(ValueError):
        integrand_series(two_loops(), [], 3)


def test_torus_oracle_in_dimension_one():
    d = two_loops()
    g = [haar_unitary(1, np.random.default_rng(1))]
    exact = torus_exact(d, 6)
    assert exact == TruncSeries([1, 4, 9, 16, 25, 36, 49])
    assert np.allclose(integrand_series(d, g, 6).coeffs, [float(x) for x in exact.coeffs])


def test_seeded_runs_do_not_depend_on_threads():
    d = two_loops()
    first = RandmatService(threads=1).mc_matrix_integral(d, [2], 3, samples=50, seed=9)
    second = RandmatService(threads=4).mc_matrix_integral(d, [2], 3, samples=50, seed=9)
    assert first == second


def test_dimension_one_integral_is_exact():
    estimate = RandmatService(threads=2).mc_matrix_integral(datum_service.free_datum([1, 1]), [1], 3, samples=10)
    assert np.allclose(estimate.mean, [1, 2, 3, 4])
    assert all(check.passed for check in compare_to_target(estimate, [1, 2, 3, 4]))


def test_divide_lambda():
    d = two_loops()
    plain = RandmatService(threads=1).mc_matrix_integral(d, [1], 3, samples=5)
    divided = RandmatService(threads=1).mc_matrix_integral(d, [1], 3, samples=5, divide_lambda=True)
    # (1 - t)^-4 (1 - t^2) divided by 1 - t^2
    assert np.allclose(divided.mean, [1, 4, 10, 20])
    assert np.allclose(plain.mean, [1, 4, 9, 16])


def test_matrix_integral_validation():
    service = RandmatService(threads=1)
    with pytest.raises(ValueError, match="dimension vector"):
        service.mc_matrix_integral(two_loops(), [1, 1], 3, samples=10)
    with pytest.raises(ValueError, match="2 samples"):
        service.mc_matrix_integral(two_loops(), [1], 3, samples=1)


def test_ds_moment_of_trace():
    estimate = RandmatService(threads=2).ds_moment(4, [(1, 1, 1)], samples=2000, seed=7)
    assert not estimate.notes
    assert all(check.passed for check in compare_to_target(estimate, [ds_exact([(1, 1, 1)])]))


def test_ds_moment_below_stable_range():
    estimate = RandmatService(threads=1).ds_moment(1, [(1, 2, 2)], samples=20, seed=7)
    assert estimate.notes


def test_compare_to_target():
    estimate = MCEstimate(mean=(1.0, 2.5), mean_imag=(0.0, 0.0), stderr=(0.0, 0.1), samples=10, seed=0, dims=(2,))
    checks = compare_to_target(estimate, [1.0, 2.0])
    assert checks[0].passed and checks[0].sigmas is None
    assert not checks[1].passed
    assert checks[1].sigmas == pytest.approx(5.0)


def test_stderr_shrinks_with_more_samples():
    service = RandmatService(threads=2)
    small = service.ds_moment(4, [(1, 1, 1)], samples=2000, seed=13)
    large = service.ds_moment(4, [(1, 1, 1)], samples=4000, seed=13)
    # doubling the samples divides the standard error by about sqrt(2)
    assert 0.6 < large.stderr[0] / small.stderr[0] < 0.82


def test_estimates_are_frozen_records():
    estimate = MCEstimate(mean=(1.0,), mean_imag=(0.0,), stderr=(0.1,), samples=2, seed=0, dims=(1,))
    with pytest.raises(ValidationError):
        estimate.samples = 3
    assert estimate.to_json()["dims"] == ["1"]
    check = compare_to_target(estimate, [1.0])[0]
    assert check.passed and check.index == 0
