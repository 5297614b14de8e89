"""Information bounds: quantum limit, measurement information, working points."""

import numpy as np
import pytest

from homsense import (
    BeamGeometry,
    Deflection,
    DomainError,
    NoiseModel,
    NonIdentifiableError,
    QuadratureSpec,
    classical_fisher_information,
    cramer_rao_std,
    envelope,
    fisher_surface,
    optimal_working_point,
    qfi_moment_oracle,
    quantum_fisher_information,
)

SIGMA_K = 0.029e6
D = 0.335
GEOM = BeamGeometry(sigma_k=SIGMA_K, d=D)
H = 2.0 * SIGMA_K**2 * D**2
IDEAL = NoiseModel(gamma=0.0, nu=1.0)


def test_quantum_limit_closed_form():
    value = quantum_fisher_information(GEOM)
    assert value == pytest.approx(H, rel=1e-12)
    assert value == pytest.approx(1.888e8, rel=1e-3)


def test_quantum_limit_scaling():
    doubled = BeamGeometry(sigma_k=SIGMA_K, d=2.0 * D)
    assert quantum_fisher_information(doubled) == pytest.approx(4.0 * H, rel=1e-12)
    narrow = BeamGeometry(sigma_k=1e-3 * SIGMA_K, d=D)
    assert quantum_fisher_information(narrow) == pytest.approx(1e-6 * H, rel=1e-12)


def test_moment_oracle_matches_closed_form():
    value = qfi_moment_oracle(lambda k: envelope(k, SIGMA_K), GEOM)
    assert value == pytest.approx(H, rel=1e-9)


def test_moment_oracle_shift_invariant():
    shift = 0.7 * SIGMA_K
    value = qfi_moment_oracle(lambda k: envelope(k - shift, SIGMA_K), GEOM)
    assert value == pytest.approx(H, rel=1e-8)


def test_moment_oracle_narrow_density():
    value = qfi_moment_oracle(lambda k: envelope(k, 1e-4 * SIGMA_K), GEOM)
    assert value < 1e-7 * H


def test_moment_oracle_rejects_unnormalized():
    with pytest.raises(DomainError, match="not normalized"):
        qfi_moment_oracle(lambda k: 2.0 * envelope(k, SIGMA_K), GEOM)


def test_ideal_information_is_flat_at_quantum_limit():
    for theta in np.linspace(0.1e-3, 2.0e-3, 20):
        result = classical_fisher_information(Deflection(theta), GEOM, IDEAL)
        assert abs(result.value / H - 1.0) < 1e-6


def test_noisy_information_reference_point():
    result = classical_fisher_information(
        Deflection(1.01e-3), GEOM, NoiseModel(gamma=0.5, nu=0.85)
    )
    assert result.value == pytest.approx(12882966.442215487, rel=1e-6)
    assert result.per_outcome[0] == 0.0
    assert result.per_outcome[1] == pytest.approx(1717259.034284833, rel=1e-6)
    assert result.per_outcome[2] == pytest.approx(11165707.407930654, rel=1e-6)


def test_per_outcome_terms_sum_to_total():
    result = classical_fisher_information(
        Deflection(0.7e-3), GEOM, NoiseModel(gamma=0.2, nu=0.9)
    )
    assert sum(result.per_outcome) == pytest.approx(result.value, rel=1e-9)


def test_never_exceeds_quantum_limit():
    rng = np.random.default_rng(21)
    for _ in range(200):
        noise = NoiseModel(gamma=rng.uniform(0, 0.95), nu=rng.uniform(0, 1))
        theta = Deflection(rng.uniform(-2.5e-3, 2.5e-3))
        result = classical_fisher_information(theta, GEOM, noise)
        assert result.value <= H * (1.0 + 1e-6)
        assert result.value >= 0.0


def test_zero_visibility_kills_information():
    result = classical_fisher_information(
        Deflection(1.0e-3), GEOM, NoiseModel(gamma=0.3, nu=0.0)
    )
    assert result.value < 1e-12 * H
    assert result.per_outcome == (0.0, 0.0, 0.0)


def test_total_loss_kills_information():
    result = classical_fisher_information(
        Deflection(1.0e-3), GEOM, NoiseModel(gamma=1.0, nu=0.9)
    )
    assert result.value == 0.0


def test_even_in_deflection():
    noise = NoiseModel(gamma=0.25, nu=0.8)
    plus = classical_fisher_information(Deflection(0.9e-3), GEOM, noise)
    minus = classical_fisher_information(Deflection(-0.9e-3), GEOM, noise)
    assert plus.value == pytest.approx(minus.value, rel=1e-9)


def test_tightening_tolerance_stays_within_error_estimate():
    noise = NoiseModel(gamma=0.4, nu=0.9)
    loose = classical_fisher_information(
        Deflection(1.3e-3), GEOM, noise, quad=QuadratureSpec(rel_tol=1e-9)
    )
    tight = classical_fisher_information(
        Deflection(1.3e-3), GEOM, noise, quad=QuadratureSpec(rel_tol=5e-10)
    )
    assert abs(loose.value - tight.value) <= loose.quadrature_error_estimate


def test_bound_std_reference_values():
    assert cramer_rao_std(H, 10_000) * 1e6 == pytest.approx(0.7278505, rel=1e-6)
    assert cramer_rao_std(H, 10_000, half_convention=True) * 1e6 == pytest.approx(
        0.3639253, rel=1e-6
    )
    # single-shot half-width bound depends only on spread and distance
    assert cramer_rao_std(H, 1, half_convention=True) == pytest.approx(
        1.0 / (2.0 * np.sqrt(2.0) * SIGMA_K * D), rel=1e-12
    )


def test_bound_std_scaling_and_domain():
    base = cramer_rao_std(H, 1000)
    assert cramer_rao_std(H, 4000) == pytest.approx(base / 2.0, rel=1e-12)
    with pytest.raises(DomainError):
        cramer_rao_std(0.0, 1000)
    with pytest.raises(DomainError):
        cramer_rao_std(H, 0)


def test_working_point_flat_ideal_case():
    point = optimal_working_point(GEOM, IDEAL, (0.1e-3, 2.0e-3), grid_points=32)
    assert point.flat
    assert point.delta_theta == pytest.approx(1.05e-3, rel=1e-9)
    assert point.fisher_information == pytest.approx(H, rel=1e-6)


def test_working_point_zero_visibility():
    with pytest.raises(NonIdentifiableError):
        optimal_working_point(GEOM, NoiseModel(0.1, 0.0), (0.1e-3, 2.0e-3))


def test_working_point_noisy_reference():
    # independently located maximum sits at the range start for this noise
    point = optimal_working_point(
        GEOM, NoiseModel(gamma=0.1, nu=0.85), (0.1e-3, 2.0e-3), grid_points=64
    )
    assert not point.flat
    assert abs(point.delta_theta - 0.1e-3) < 1e-6
    assert point.fisher_information == pytest.approx(5.9355375e7, rel=1e-6)


def test_working_point_validation():
    with pytest.raises(DomainError):
        optimal_working_point(GEOM, IDEAL, (2.0e-3, 0.1e-3))
    with pytest.raises(DomainError):
        optimal_working_point(GEOM, IDEAL, (0.1e-3, 2.0e-3), grid_points=8)


def test_surface_ideal_equals_quantum_limit():
    sigma_grid = np.array([0.02e6, 0.03e6, 0.04e6])
    d_grid = np.array([0.2, 0.3, 0.4])
    surface = fisher_surface(sigma_grid, d_grid, Deflection(0.52e-3), IDEAL)
    assert surface.shape == (3, 3)
    for i, sk in enumerate(sigma_grid):
        for j, dist in enumerate(d_grid):
            assert surface[i, j] == pytest.approx(2.0 * sk**2 * dist**2, rel=1e-6)


def test_surface_monotone_and_dominated_by_ideal():
    sigma_grid = np.array([0.02e6, 0.03e6, 0.04e6])
    d_grid = np.array([0.2, 0.3, 0.4])
    ideal = fisher_surface(sigma_grid, d_grid, Deflection(0.52e-3), IDEAL)
    noisy = fisher_surface(
        sigma_grid, d_grid, Deflection(0.52e-3), NoiseModel(gamma=0.3, nu=0.85)
    )
    assert np.all(np.diff(ideal, axis=0) > 0)
    assert np.all(np.diff(ideal, axis=1) > 0)
    assert np.all(noisy <= ideal * (1.0 + 1e-9))


def test_surface_grid_validation():
    with pytest.raises(DomainError):
        fisher_surface([0.03e6, 0.02e6], [0.2, 0.3], 0.5e-3, IDEAL)
    with pytest.raises(DomainError):
        fisher_surface([0.02e6, 0.03e6], [-0.2, 0.3], 0.5e-3, IDEAL)
