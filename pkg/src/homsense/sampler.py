"""Seeded Monte Carlo generation of measurement records and slit-scan patterns.

Event generation is chunked: every chunk of 2**16 events owns a private
generator derived from (master_seed, stream_index, chunk_index), so results
are identical no matter how chunks are scheduled.  The momentum difference
is sampled from its Gaussian marginal and the detection outcome by
inverse-transform over the three conditional probabilities in fixed order.
"""

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigurationError, DomainError
from .model import (
    SYMMETRIC,
    BeamGeometry,
    NoiseModel,
    _angle,
    conditional_outcome_probabilities,
    exchange_sign,
    envelope,
    outcome_densities,
)

_CHUNK = 2**16
# keeps the pattern stream disjoint from simulate_run's chunk streams
_PATTERN_STREAM_TAG = 0x5CA1AB1E
BINOMIAL = "binomial"
POISSON = "poisson"


class Outcome(IntEnum):
    ZERO_DETECTORS = 0
    ONE_DETECTOR = 1
    TWO_DETECTORS = 2


class EventRecord(NamedTuple):
    """One measurement: momentum difference plus detection outcome."""

    delta_k: float
    outcome: Outcome


@dataclass(frozen=True)
class RngSeed:
    """Deterministic stream identity: same (master_seed, stream_index), same draws."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if self.master_seed < 0 or self.master_seed >= 2**64:
            raise DomainError("master_seed must fit in an unsigned 64-bit integer")
        if self.stream_index < 0:
            raise DomainError("stream_index must be nonnegative")

    def chunk_generator(self, chunk_index):
        seq = np.random.SeedSequence(
            (self.master_seed, self.stream_index, chunk_index)
        )
        return np.random.default_rng(seq)

    def derive(self, offset):
        """Independent child stream, used for per-trial seeding in studies."""
        return RngSeed(self.master_seed, self.stream_index * 1_000_003 + 1 + offset)


class EventBatch:
    """Array-backed sequence of EventRecord."""

    def __init__(self, delta_k, outcome):
        self.delta_k = np.asarray(delta_k, dtype=float)
        self.outcome = np.asarray(outcome, dtype=np.int8)
        if self.delta_k.shape != self.outcome.shape or self.delta_k.ndim != 1:
            raise DomainError("delta_k and outcome must be matching 1-d arrays")

    def __len__(self):
        return self.delta_k.size

    def __getitem__(self, index):
        if isinstance(index, slice):
            return EventBatch(self.delta_k[index], self.outcome[index])
        return EventRecord(float(self.delta_k[index]), Outcome(int(self.outcome[index])))

    def __iter__(self):
        for dk, out in zip(self.delta_k, self.outcome):
            yield EventRecord(float(dk), Outcome(int(out)))

    def outcome_counts(self):
        return np.bincount(self.outcome, minlength=3)


@dataclass
class InterferencePattern:
    """Binned coincidence counts over the momentum difference.

    Fields:
        bin_centers: momentum differences (1/m), strictly increasing.
        counts: coincidences observed per bin.
        exposure: trials per bin.
        model_overlay: optional two-detector model density at the centers.
    """

    bin_centers: np.ndarray
    counts: np.ndarray
    exposure: int
    model_overlay: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        self.bin_centers = np.asarray(self.bin_centers, dtype=float)
        self.counts = np.asarray(self.counts)
        if self.bin_centers.ndim != 1 or self.bin_centers.size == 0:
            raise DomainError("bin_centers must be a nonempty 1-d array")
        if self.bin_centers.size > 1 and np.any(np.diff(self.bin_centers) <= 0.0):
            raise DomainError("bin_centers must be strictly increasing")
        if self.counts.shape != self.bin_centers.shape:
            raise DomainError("counts must match bin_centers in shape")
        if self.exposure < 1:
            raise DomainError("exposure must be at least 1")
        if np.any(self.counts < 0) or np.any(self.counts > self.exposure):
            raise DomainError("counts must lie in [0, exposure]")


def _draw_outcomes(delta_k, deflection, geometry, noise, uniforms, exchange_symmetry):
    p0, p1, _ = conditional_outcome_probabilities(
        delta_k, deflection, geometry, noise, exchange_symmetry
    )
    return (uniforms >= p0).astype(np.int8) + (uniforms >= p0 + p1).astype(np.int8)


def sample_event(
    deflection,
    geometry: BeamGeometry,
    noise: NoiseModel,
    rng_state: np.random.Generator,
    exchange_symmetry=SYMMETRIC,
) -> EventRecord:
    """Draw one measurement record from the supplied generator state."""
    delta_k = rng_state.normal(0.0, math.sqrt(2.0) * geometry.sigma_k)
    u = rng_state.uniform()
    out = _draw_outcomes(
        np.asarray([delta_k]), deflection, geometry, noise, np.asarray([u]),
        exchange_symmetry,
    )
    return EventRecord(float(delta_k), Outcome(int(out[0])))


def simulate_run(
    n_events,
    deflection,
    geometry: BeamGeometry,
    noise: NoiseModel,
    seed: RngSeed,
    exchange_symmetry=SYMMETRIC,
) -> EventBatch:
    """Generate n_events independent records, deterministic in the seed."""
    if n_events < 1:
        raise DomainError("n_events must be at least 1")
    sigma = math.sqrt(2.0) * geometry.sigma_k
    chunks_dk = []
    chunks_out = []
    for chunk_index in range(math.ceil(n_events / _CHUNK)):
        size = min(_CHUNK, n_events - chunk_index * _CHUNK)
        rng = seed.chunk_generator(chunk_index)
        delta_k = rng.normal(0.0, sigma, size)
        uniforms = rng.uniform(size=size)
        chunks_dk.append(delta_k)
        chunks_out.append(
            _draw_outcomes(delta_k, deflection, geometry, noise, uniforms, exchange_symmetry)
        )
    return EventBatch(np.concatenate(chunks_dk), np.concatenate(chunks_out))


def coincidence_rate_profile(
    bin_centers,
    deflection,
    geometry: BeamGeometry,
    noise: NoiseModel,
    window: Optional[float] = None,
    slit_width: Optional[float] = None,
    exchange_symmetry=SYMMETRIC,
):
    """Per-trial coincidence probability at each scan position.

    The two-detector density integrated over the momentum acceptance window:
    the slit window k0*slit_width/d when a slit width is given, otherwise an
    explicit window, otherwise the bin spacing.  A finite slit averages the
    fringe, which rescales the visibility by sin(a*W/2)/(a*W/2) with
    a = deflection*d; the envelope varies negligibly across the window and
    is evaluated at the bin center.
    """
    bin_centers = np.asarray(bin_centers, dtype=float)
    if slit_width is not None:
        if slit_width <= 0.0:
            raise DomainError("slit_width must be positive")
        if geometry.k0 is None:
            raise ConfigurationError(
                "slit_width requires geometry.k0 to convert the slit to a "
                "momentum window"
            )
        window = geometry.k0 * slit_width / geometry.d
    elif window is None:
        if bin_centers.size < 2:
            raise DomainError("cannot infer a window from a single bin")
        window = float(np.median(np.diff(bin_centers)))
    if window <= 0.0:
        raise DomainError("window must be positive")

    sign = exchange_sign(exchange_symmetry)
    gamma, nu = noise.gamma, noise.nu
    c = envelope(bin_centers, geometry.sigma_k)
    a = _angle(deflection) * geometry.d
    washout = np.sinc(a * window / (2.0 * np.pi))
    fringe = nu * washout * np.cos(a * bin_centers)
    density = 0.5 * (1.0 - gamma) ** 2 * c * (1.0 + sign * fringe)
    return np.clip(density * window, 0.0, 1.0)


def scan_pattern(
    bin_spec,
    exposure_per_bin,
    deflection,
    geometry: BeamGeometry,
    noise: NoiseModel,
    seed: RngSeed,
    slit_width: Optional[float] = None,
    counting: str = BINOMIAL,
    exchange_symmetry=SYMMETRIC,
) -> InterferencePattern:
    """Synthetic slit-scan interference pattern.

    bin_spec is either a (low, high, n_bins) triple or an explicit array of
    bin centers (1/m).  Each bin draws its coincidences independently:
    Binomial(exposure, q) for triggered acquisition, or Poisson with the
    same mean for rate-based acquisition, with q from
    coincidence_rate_profile.
    """
    if isinstance(bin_spec, (tuple, list)) and len(bin_spec) == 3:
        low, high, n_bins = bin_spec
        if n_bins < 2:
            raise DomainError("need at least 2 bins")
        if not high > low:
            raise DomainError("bin range must have positive length")
        centers = np.linspace(float(low), float(high), int(n_bins))
    else:
        centers = np.asarray(bin_spec, dtype=float)
    limit = 8.0 * math.sqrt(2.0) * geometry.sigma_k
    if np.max(np.abs(centers)) > limit:
        raise DomainError(
            "bin centers exceed the supported momentum range "
            f"(+-{limit:.3e} 1/m)"
        )
    if exposure_per_bin < 1:
        raise DomainError("exposure_per_bin must be at least 1")
    if counting not in (BINOMIAL, POISSON):
        raise ConfigurationError(
            f"counting must be '{BINOMIAL}' or '{POISSON}', got {counting!r}"
        )

    q = coincidence_rate_profile(
        centers, deflection, geometry, noise,
        slit_width=slit_width, exchange_symmetry=exchange_symmetry,
    )
    rng = np.random.default_rng(
        np.random.SeedSequence(
            (seed.master_seed, seed.stream_index, _PATTERN_STREAM_TAG)
        )
    )
    if counting == BINOMIAL:
        counts = rng.binomial(int(exposure_per_bin), q)
    else:
        counts = np.minimum(
            rng.poisson(float(exposure_per_bin) * q), int(exposure_per_bin)
        )
    overlay = outcome_densities(
        centers, deflection, geometry, noise, exchange_symmetry
    ).p2
    return InterferencePattern(
        bin_centers=centers,
        counts=counts,
        exposure=int(exposure_per_bin),
        model_overlay=overlay,
    )
