"""Closed-form probability model: envelope, outcome densities, loss map."""

import numpy as np
import pytest

from homsense import (
    BeamGeometry,
    ConfigurationError,
    Deflection,
    DomainError,
    NoiseModel,
    coincidence_density,
    conditional_outcome_probabilities,
    envelope,
    loss_map,
    outcome_densities,
    position_to_momentum,
)

SIGMA_K = 0.029e6
D = 0.335
GEOM = BeamGeometry(sigma_k=SIGMA_K, d=D)
GEOM_K0 = BeamGeometry(sigma_k=SIGMA_K, d=D, k0=2.0 * np.pi / 810e-9)


def test_geometry_validation():
    with pytest.raises(DomainError):
        BeamGeometry(sigma_k=0.0, d=D)
    with pytest.raises(DomainError):
        BeamGeometry(sigma_k=SIGMA_K, d=-1.0)
    with pytest.raises(DomainError):
        BeamGeometry(sigma_k=SIGMA_K, d=D, k0=0.0)


def test_noise_validation():
    with pytest.raises(DomainError):
        NoiseModel(gamma=-0.1, nu=1.0)
    with pytest.raises(DomainError):
        NoiseModel(gamma=0.0, nu=1.2)
    NoiseModel(gamma=0.0, nu=0.0)
    NoiseModel(gamma=1.0, nu=1.0)


def test_deflection_validation():
    with pytest.raises(DomainError):
        Deflection(float("nan"))
    assert float(Deflection(1.0e-3)) == 1.0e-3


def test_position_to_momentum_origin():
    assert position_to_momentum(0.0, GEOM_K0) == 0.0


def test_position_to_momentum_value():
    k = position_to_momentum(1.0e-3, GEOM_K0)
    assert k == pytest.approx(GEOM_K0.k0 * 1.0e-3 / D, rel=1e-12)
    assert k == pytest.approx(2.3153e4, rel=1e-3)


def test_position_to_momentum_linearity():
    rng = np.random.default_rng(11)
    y = rng.uniform(-5e-3, 5e-3, size=50)
    np.testing.assert_allclose(
        position_to_momentum(2.0 * y, GEOM_K0),
        2.0 * position_to_momentum(y, GEOM_K0),
        rtol=1e-12,
    )


def test_position_to_momentum_requires_carrier():
    with pytest.raises(ConfigurationError, match="k0"):
        position_to_momentum(1.0e-3, GEOM)


def test_envelope_peak_value():
    # 1/sqrt(4 pi sigma_k^2) at the stated spread, in meters
    assert envelope(0.0, SIGMA_K) == pytest.approx(9.72740661289235e-6, rel=1e-9)


def test_envelope_even():
    rng = np.random.default_rng(12)
    dk = rng.normal(scale=np.sqrt(2.0) * SIGMA_K, size=200)
    np.testing.assert_array_equal(envelope(dk, SIGMA_K), envelope(-dk, SIGMA_K))


def test_envelope_rejects_bad_spread():
    with pytest.raises(DomainError):
        envelope(0.0, 0.0)


def test_coincidence_dip_at_zero_deflection():
    dk = np.linspace(-4, 4, 101) * np.sqrt(2.0) * SIGMA_K
    np.testing.assert_array_equal(coincidence_density(dk, 0.0, GEOM), 0.0)


def test_coincidence_reaches_envelope_at_half_period():
    theta = 0.52e-3
    dk = np.pi / (theta * D)
    value = coincidence_density(dk, Deflection(theta), GEOM)
    assert value == pytest.approx(envelope(dk, SIGMA_K), rel=1e-12)


def test_coincidence_zero_spacing():
    # zeros sit at multiples of 2 pi / (deflection * distance)
    theta = 0.52e-3
    spacing = 2.0 * np.pi / (theta * D)
    assert spacing == pytest.approx(0.0361e6, abs=0.0005e6)
    for m in (1, 2, 3):
        at_zero = coincidence_density(m * spacing, theta, GEOM)
        between = coincidence_density((m + 0.5) * spacing, theta, GEOM)
        assert at_zero < 1e-20 * envelope(0.0, SIGMA_K)
        assert between > 0.0


def test_coincidence_antisymmetric_peak():
    dk = np.linspace(-2, 2, 51) * np.sqrt(2.0) * SIGMA_K
    peak = coincidence_density(dk, 0.0, GEOM, exchange_symmetry="antisymmetric")
    np.testing.assert_allclose(peak, envelope(dk, SIGMA_K), rtol=1e-12)
    with pytest.raises(ConfigurationError):
        coincidence_density(dk, 0.0, GEOM, exchange_symmetry="bogus")


def test_outcome_densities_ideal_limit():
    dk = np.linspace(-3, 3, 31) * np.sqrt(2.0) * SIGMA_K
    triple = outcome_densities(dk, 1.01e-3, GEOM, NoiseModel(gamma=0.0, nu=1.0))
    np.testing.assert_array_equal(triple.p0, 0.0)
    np.testing.assert_allclose(
        triple.p2, coincidence_density(dk, 1.01e-3, GEOM), rtol=1e-12
    )


def test_outcome_densities_total_loss():
    dk = np.linspace(-3, 3, 31) * np.sqrt(2.0) * SIGMA_K
    triple = outcome_densities(dk, 1.01e-3, GEOM, NoiseModel(gamma=1.0, nu=0.9))
    np.testing.assert_allclose(triple.p0, envelope(dk, SIGMA_K), rtol=1e-12)
    np.testing.assert_array_equal(triple.p1, 0.0)
    np.testing.assert_array_equal(triple.p2, 0.0)


def _random_draws(seed, size):
    rng = np.random.default_rng(seed)
    return {
        "gamma": rng.uniform(0.0, 1.0, size),
        "nu": rng.uniform(0.0, 1.0, size),
        "theta": rng.uniform(-3e-3, 3e-3, size),
        "dk": rng.normal(scale=6e4, size=size),
        "sigma_k": rng.uniform(0.01e6, 0.05e6, size),
        "d": rng.uniform(0.1, 0.5, size),
    }


def test_density_normalization_random_draws():
    draws = _random_draws(13, 1000)
    for i in range(1000):
        geom = BeamGeometry(sigma_k=draws["sigma_k"][i], d=draws["d"][i])
        noise = NoiseModel(gamma=draws["gamma"][i], nu=draws["nu"][i])
        triple = outcome_densities(draws["dk"][i], draws["theta"][i], geom, noise)
        total = triple.p0 + triple.p1 + triple.p2
        reference = envelope(draws["dk"][i], geom.sigma_k)
        assert abs(total / reference - 1.0) < 1e-12


def test_conditional_normalization_random_draws():
    draws = _random_draws(14, 1000)
    for i in range(1000):
        geom = BeamGeometry(sigma_k=draws["sigma_k"][i], d=draws["d"][i])
        noise = NoiseModel(gamma=draws["gamma"][i], nu=draws["nu"][i])
        triple = conditional_outcome_probabilities(
            draws["dk"][i], draws["theta"][i], geom, noise
        )
        assert abs(triple.p0 + triple.p1 + triple.p2 - 1.0) < 1e-12
        assert triple.p0 >= 0.0 and triple.p1 >= 0.0 and triple.p2 >= 0.0


def test_conditional_antibunching_point():
    theta = 0.8e-3
    dk = np.pi / (theta * D)
    triple = conditional_outcome_probabilities(
        dk, theta, GEOM, NoiseModel(gamma=0.0, nu=1.0)
    )
    assert triple.p0 == 0.0
    assert triple.p1 == pytest.approx(0.0, abs=1e-12)
    assert triple.p2 == pytest.approx(1.0, rel=1e-12)


def test_conditional_bunching_point():
    triple = conditional_outcome_probabilities(
        0.03e6, 0.0, GEOM, NoiseModel(gamma=0.0, nu=1.0)
    )
    assert triple.p0 == 0.0
    assert triple.p1 == pytest.approx(1.0, rel=1e-12)
    assert triple.p2 == 0.0


def test_loss_map_identity_routing():
    triple = loss_map(0.3, 0.7, 0.0)
    assert triple == (0.0, 0.7, 0.3)


def test_loss_map_total_loss():
    triple = loss_map(0.3, 0.7, 1.0)
    assert triple.p0 == pytest.approx(1.0, rel=1e-12)
    assert triple.p1 == pytest.approx(0.0, abs=1e-15)
    assert triple.p2 == 0.0


def test_loss_map_rejects_unnormalized():
    with pytest.raises(DomainError, match="2.000e-01"):
        loss_map(0.5, 0.7, 0.3)


def test_loss_map_matches_conditionals_random_draws():
    draws = _random_draws(15, 1000)
    for i in range(1000):
        geom = BeamGeometry(sigma_k=draws["sigma_k"][i], d=draws["d"][i])
        noise = NoiseModel(gamma=draws["gamma"][i], nu=draws["nu"][i])
        ideal = conditional_outcome_probabilities(
            draws["dk"][i], draws["theta"][i], geom,
            NoiseModel(gamma=0.0, nu=noise.nu),
        )
        routed = loss_map(ideal.p2, ideal.p1, noise.gamma)
        direct = conditional_outcome_probabilities(
            draws["dk"][i], draws["theta"][i], geom, noise
        )
        assert abs(routed.p0 - direct.p0) < 1e-12
        assert abs(routed.p1 - direct.p1) < 1e-12
        assert abs(routed.p2 - direct.p2) < 1e-12


def test_specific_noisy_triple_matches_loss_map():
    noise = NoiseModel(gamma=0.3, nu=0.85)
    dk = 0.02e6
    theta = 1.01e-3
    ideal = conditional_outcome_probabilities(
        dk, theta, GEOM, NoiseModel(gamma=0.0, nu=0.85)
    )
    routed = loss_map(ideal.p2, ideal.p1, noise.gamma)
    c = envelope(dk, SIGMA_K)
    direct = outcome_densities(dk, theta, GEOM, noise)
    assert direct.p0 == pytest.approx(routed.p0 * c, rel=1e-12)
    assert direct.p1 == pytest.approx(routed.p1 * c, rel=1e-12)
    assert direct.p2 == pytest.approx(routed.p2 * c, rel=1e-12)


def test_densities_even_in_both_arguments():
    rng = np.random.default_rng(16)
    noise = NoiseModel(gamma=0.2, nu=0.9)
    for _ in range(100):
        dk = rng.normal(scale=6e4)
        theta = rng.uniform(-2e-3, 2e-3)
        a = outcome_densities(dk, theta, GEOM, noise)
        b = outcome_densities(-dk, theta, GEOM, noise)
        c = outcome_densities(dk, -theta, GEOM, noise)
        assert a == b == c
