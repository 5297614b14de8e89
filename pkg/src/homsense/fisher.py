"""Quantum and classical Fisher information for the deflection parameter.

The quantum bound 2*sigma_k^2*d^2 depends only on the beam geometry.  The
classical information of the three-outcome measurement is an integral over
the momentum difference and degrades with loss and visibility; at ideal
noise the integrand collapses algebraically to envelope * (delta_k*d)^2 and
the quantum bound is recovered.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, NonIdentifiableError
from .model import (
    SYMMETRIC,
    BeamGeometry,
    NoiseModel,
    _angle,
    exchange_sign,
)
from .optimize import golden_section_max
from .quadrature import QuadratureSpec, integrate, integrate_envelope_weighted

# below this fraction of the quantum bound the model carries no usable
# information about the deflection
_IDENTIFIABILITY_FLOOR = 1.0e-12
_FLATNESS_TOL = 1.0e-6
_REFINE_TOL_RAD = 1.0e-7
_DENOMINATOR_FLOOR = 1.0e-300


@dataclass(frozen=True)
class FisherResult:
    """Classical Fisher information with its per-outcome decomposition.

    per_outcome holds the contributions of the zero, one and two detector
    terms; the zero-detector probability does not depend on the deflection,
    so its contribution is exactly zero.
    """

    value: float
    per_outcome: Tuple[float, float, float]
    quadrature_error_estimate: float


@dataclass(frozen=True)
class WorkingPoint:
    """Deflection maximizing the classical information over a search range."""

    delta_theta: float
    fisher_information: float
    flat: bool = False


def quantum_fisher_information(geometry: BeamGeometry) -> float:
    """Measurement-independent information bound 2*sigma_k^2*d^2."""
    return 2.0 * geometry.sigma_k**2 * geometry.d**2


def qfi_moment_oracle(
    spectral_density: Callable,
    geometry: BeamGeometry,
    quad: Optional[QuadratureSpec] = None,
) -> float:
    """Quantum bound from moments of a user-supplied momentum density.

    Cross-checks the closed form: integrates the density's first and second
    moments and returns the variance times d^2.  The density must be
    normalized; a unit-mass check guards against silent misuse.
    """
    quad = quad or QuadratureSpec()
    sigma_k = geometry.sigma_k
    mass, mass_err = integrate(lambda k: spectral_density(k), sigma_k, quad)
    tol = max(100.0 * quad.rel_tol, 10.0 * mass_err)
    if abs(mass - 1.0) > tol:
        raise DomainError(
            f"spectral density is not normalized: mass deviates from 1 by "
            f"{abs(mass - 1.0):.3e}"
        )
    first, _ = integrate(lambda k: k * spectral_density(k), sigma_k, quad)
    second, _ = integrate(lambda k: k * k * spectral_density(k), sigma_k, quad)
    variance = second / mass - (first / mass) ** 2
    return variance * geometry.d**2


def _smooth_factors(deflection, geometry, noise, sign):
    """Fisher integrand with the envelope factored out, split by outcome.

    Returns callables for the one- and two-detector terms.  Denominators
    that vanish algebraically (visibility exactly 1) are cancelled in closed
    form instead of floored.
    """
    dt = _angle(deflection)
    d = geometry.d
    gamma, nu = noise.gamma, noise.nu
    one_minus = 1.0 - gamma
    amp = 0.5 * one_minus**2 * nu  # fringe-derivative prefactor

    def derivative_sq(delta_k):
        phase = delta_k * dt * d
        return (amp * delta_k * d * np.sin(phase)) ** 2

    if nu == 1.0 and gamma == 0.0:
        def one_term(delta_k):
            phase = delta_k * dt * d
            return 0.5 * (delta_k * d) ** 2 * (1.0 + sign * np.cos(phase))
    else:
        def one_term(delta_k):
            phase = delta_k * dt * d
            denom = (
                0.5 * one_minus * (1.0 + 3.0 * gamma)
                - sign * 0.5 * one_minus**2 * nu * np.cos(phase)
            )
            return derivative_sq(delta_k) / np.maximum(denom, _DENOMINATOR_FLOOR)

    if nu == 1.0:
        def two_term(delta_k):
            phase = delta_k * dt * d
            return (
                0.5 * one_minus**2 * (delta_k * d) ** 2 * (1.0 - sign * np.cos(phase))
            )
    else:
        def two_term(delta_k):
            phase = delta_k * dt * d
            denom = 0.5 * one_minus**2 * (1.0 + sign * nu * np.cos(phase))
            return derivative_sq(delta_k) / np.maximum(denom, _DENOMINATOR_FLOOR)

    return one_term, two_term


def classical_fisher_information(
    deflection,
    geometry: BeamGeometry,
    noise: NoiseModel,
    quad: Optional[QuadratureSpec] = None,
    exchange_symmetry=SYMMETRIC,
) -> FisherResult:
    """Fisher information of the three-outcome measurement about the deflection.

    Integrates (d p_i / d deflection)^2 / p_i over the momentum difference
    for the one- and two-detector outcomes; the zero-detector term vanishes
    identically.  Total loss or zero visibility gives exactly zero.
    """
    quad = quad or QuadratureSpec()
    sign = exchange_sign(exchange_symmetry)
    if noise.gamma == 1.0 or noise.nu == 0.0:
        return FisherResult(0.0, (0.0, 0.0, 0.0), 0.0)
    one_term, two_term = _smooth_factors(deflection, geometry, noise, sign)
    f1, err1 = integrate_envelope_weighted(one_term, geometry.sigma_k, quad)
    f2, err2 = integrate_envelope_weighted(two_term, geometry.sigma_k, quad)
    return FisherResult(f1 + f2, (0.0, f1, f2), err1 + err2)


def cramer_rao_std(fisher_information, n_samples, half_convention=False) -> float:
    """Cramer-Rao lower bound on the estimator standard deviation.

    The default convention is 1/sqrt(N*F).  With half_convention=True the
    companion convention 1/(2*sqrt(N*F)) is returned; both appear in the
    metrology literature and the command line reports the two side by side.
    """
    if fisher_information <= 0.0:
        raise DomainError("Fisher information must be positive (no identifiability)")
    if n_samples < 1:
        raise DomainError("n_samples must be at least 1")
    bound = 1.0 / np.sqrt(n_samples * fisher_information)
    return 0.5 * bound if half_convention else bound


def optimal_working_point(
    geometry: BeamGeometry,
    noise: NoiseModel,
    search_range: Tuple[float, float],
    grid_points: int = 256,
    quad: Optional[QuadratureSpec] = None,
    exchange_symmetry=SYMMETRIC,
) -> WorkingPoint:
    """Deflection with maximal classical information over a closed interval.

    A dense grid localizes the global maximum (the information is typically
    multimodal under noise), then golden-section search refines around the
    best grid point.  A flat profile is reported as such with the interval
    midpoint; an all-zero profile raises NonIdentifiableError.
    """
    lo, hi = float(search_range[0]), float(search_range[1])
    if not hi > lo:
        raise DomainError("search_range must have positive length")
    if grid_points < 16:
        raise DomainError("grid_points must be at least 16")
    quad = quad or QuadratureSpec()

    def info(delta_theta):
        return classical_fisher_information(
            delta_theta, geometry, noise, quad, exchange_symmetry
        ).value

    grid = np.linspace(lo, hi, grid_points)
    values = np.array([info(t) for t in grid])
    h = quantum_fisher_information(geometry)
    if values.max() < _IDENTIFIABILITY_FLOOR * h:
        raise NonIdentifiableError(
            "Fisher information vanishes over the whole search range; "
            "the deflection is not identifiable under this noise model"
        )
    spread = values.max() - values.min()
    if spread <= _FLATNESS_TOL * values.max():
        mid = 0.5 * (lo + hi)
        return WorkingPoint(mid, info(mid), flat=True)
    best = int(np.argmax(values))
    bracket_lo = grid[max(best - 1, 0)]
    bracket_hi = grid[min(best + 1, grid_points - 1)]
    refined, value = golden_section_max(info, bracket_lo, bracket_hi, _REFINE_TOL_RAD)
    # the refinement never beats an edge grid point by construction, so
    # clamp back when the maximum sits on the interval boundary
    if values[best] >= value:
        refined, value = grid[best], values[best]
    return WorkingPoint(float(refined), float(value), flat=False)


def fisher_surface(
    sigma_k_grid: Sequence[float],
    d_grid: Sequence[float],
    deflection,
    noise: NoiseModel,
    quad: Optional[QuadratureSpec] = None,
    exchange_symmetry=SYMMETRIC,
) -> np.ndarray:
    """Classical information on a (sigma_k, d) grid, shape (len(sigma_k), len(d))."""
    sigma_k_grid = np.asarray(sigma_k_grid, dtype=float)
    d_grid = np.asarray(d_grid, dtype=float)
    for name, grid in (("sigma_k_grid", sigma_k_grid), ("d_grid", d_grid)):
        if grid.ndim != 1 or grid.size == 0:
            raise DomainError(f"{name} must be a nonempty one-dimensional grid")
        if np.any(grid <= 0.0):
            raise DomainError(f"{name} values must be positive")
        if grid.size > 1 and np.any(np.diff(grid) <= 0.0):
            raise DomainError(f"{name} must be strictly increasing")
    quad = quad or QuadratureSpec()
    surface = np.empty((sigma_k_grid.size, d_grid.size))
    for i, sk in enumerate(sigma_k_grid):
        for j, dist in enumerate(d_grid):
            geom = BeamGeometry(sigma_k=float(sk), d=float(dist))
            surface[i, j] = classical_fisher_information(
                deflection, geom, noise, quad, exchange_symmetry
            ).value
    return surface
