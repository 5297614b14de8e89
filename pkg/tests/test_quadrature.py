"""Adaptive Simpson and Gauss-Hermite integration over the momentum axis."""

import numpy as np
import pytest

from homsense import (
    DomainError,
    QuadratureError,
    QuadratureSpec,
    envelope,
    integrate,
    integrate_envelope_weighted,
)

SIGMA_K = 0.029e6
D = 0.335
DK_STD = np.sqrt(2.0) * SIGMA_K

SIMPSON = QuadratureSpec()
HERMITE = QuadratureSpec(rule="gauss-hermite")


def test_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(rule="midpoint")
    with pytest.raises(DomainError):
        QuadratureSpec(half_range=4.0)
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureSpec(max_subdivisions=0)


def test_envelope_unit_mass_both_rules():
    for spec in (SIMPSON, HERMITE):
        result = integrate(lambda dk: envelope(dk, SIGMA_K), SIGMA_K, spec)
        assert result.value == pytest.approx(1.0, abs=1e-9)
        assert result.error_estimate >= 0.0


def test_envelope_weighted_second_moment_both_rules():
    # envelope-weighted (dk*d)^2 integrates to the closed-form 2 sigma_k^2 d^2
    expected = 2.0 * SIGMA_K**2 * D**2
    for spec in (SIMPSON, HERMITE):
        result = integrate_envelope_weighted(lambda dk: (dk * D) ** 2, SIGMA_K, spec)
        assert result.value == pytest.approx(expected, rel=1e-9)


def test_rules_agree_on_oscillatory_integrand():
    a = 1.01e-3 * D

    def smooth(dk):
        return (dk * D) ** 2 * (1.0 + np.cos(dk * a))

    simpson = integrate_envelope_weighted(smooth, SIGMA_K, SIMPSON)
    hermite = integrate_envelope_weighted(smooth, SIGMA_K, HERMITE)
    assert hermite.value == pytest.approx(simpson.value, rel=1e-8)


def test_error_estimate_honest_under_tightening():
    a = 1.9e-3 * D

    def smooth(dk):
        return np.cos(dk * a) ** 2

    loose = integrate_envelope_weighted(smooth, SIGMA_K, QuadratureSpec(rel_tol=1e-7))
    tight = integrate_envelope_weighted(
        smooth, SIGMA_K, QuadratureSpec(rel_tol=5e-8)
    )
    assert abs(loose.value - tight.value) <= max(loose.error_estimate, 1e-15)


def test_offcenter_spike_resolved():
    center = 2.7183 * DK_STD
    width = DK_STD / 50.0

    def spike(dk):
        z = (dk - center) / width
        return np.exp(-0.5 * z * z) / (width * np.sqrt(2.0 * np.pi))

    result = integrate(spike, SIGMA_K, QuadratureSpec(rel_tol=1e-9))
    assert result.value == pytest.approx(1.0, rel=1e-8)


def test_simpson_exhaustion_reports_achieved_tolerance():
    def rough(dk):
        return np.abs(np.sin(dk / DK_STD * 40.0)) * envelope(dk, SIGMA_K)

    with pytest.raises(QuadratureError) as info:
        integrate(rough, SIGMA_K, QuadratureSpec(rel_tol=1e-13, max_subdivisions=4))
    assert info.value.achieved_tolerance is not None
    assert info.value.achieved_tolerance > 1e-13


def test_hermite_stalls_honestly_near_fringe_pole():
    # almost-singular denominator puts poles close to the real axis, which
    # defeats polynomial convergence; the ladder must refuse, not guess
    a = 1.01e-3 * D

    def near_pole(dk):
        return 1.0 / (1.0 + 1e-7 - np.cos(dk * a))

    with pytest.raises(QuadratureError) as info:
        integrate_envelope_weighted(near_pole, SIGMA_K, HERMITE)
    assert info.value.achieved_tolerance is not None
    assert info.value.achieved_tolerance > 0.0


def test_negative_sigma_rejected():
    with pytest.raises(DomainError):
        integrate(lambda dk: dk, -1.0, SIMPSON)
    with pytest.raises(DomainError):
        integrate_envelope_weighted(lambda dk: dk, 0.0, SIMPSON)
