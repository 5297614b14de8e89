"""Fixed-schema CSV input and output.

All files use a mandatory header row, comma separators, '.' decimals and LF
line endings so that equal inputs produce byte-identical files on every
platform.  Floats are written with 12 significant digits.
"""

from typing import Tuple

import numpy as np

from .errors import ConfigurationError
from .sampler import EventBatch, InterferencePattern
from .units import M_TO_MM, PER_M_TO_PER_UM, RAD_TO_MRAD

FISHER_HEADER = "delta_theta_mrad,fisher_rad2"
PATTERN_HEADER = "delta_k_per_um,counts,exposure,model_density"
EVENTS_HEADER = "event_index,delta_k_per_um,outcome"
SURFACE_HEADER = "sigma_k_per_um,d_mm,fisher_rad2"
STUDY_HEADER = "trial,estimate_mrad"


def _fmt(value):
    return f"{float(value):.12g}"


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as handle:
        handle.write(header + "\n")
        for row in rows:
            handle.write(",".join(row) + "\n")


def _read_rows(path, expected_header):
    try:
        with open(path, "r", newline="") as handle:
            lines = handle.read().split("\n")
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ConfigurationError(f"{path}:1: file is empty, expected header "
                                 f"{expected_header!r}")
    header = lines[0].rstrip("\r")
    if header != expected_header:
        raise ConfigurationError(
            f"{path}:1: expected header {expected_header!r}, found {header!r}"
        )
    return [line.rstrip("\r") for line in lines[1:]]


def _parse_fields(path, line_number, line, n_fields):
    parts = line.split(",")
    if len(parts) != n_fields:
        raise ConfigurationError(
            f"{path}:{line_number}: expected {n_fields} fields, found {len(parts)}"
        )
    return parts


def write_fisher_scan(path, delta_theta_rad, fisher_rad2):
    rows = (
        (_fmt(t * RAD_TO_MRAD), _fmt(f))
        for t, f in zip(delta_theta_rad, fisher_rad2)
    )
    _write_rows(path, FISHER_HEADER, rows)


def write_pattern(path, pattern: InterferencePattern):
    overlay = pattern.model_overlay
    if overlay is None:
        overlay = np.full(pattern.bin_centers.size, np.nan)
    rows = (
        (
            _fmt(k * PER_M_TO_PER_UM),
            str(int(c)),
            str(int(pattern.exposure)),
            # density over the per-um axis
            _fmt(m / PER_M_TO_PER_UM),
        )
        for k, c, m in zip(pattern.bin_centers, pattern.counts, overlay)
    )
    _write_rows(path, PATTERN_HEADER, rows)


def read_pattern(path) -> InterferencePattern:
    lines = _read_rows(path, PATTERN_HEADER)
    centers, counts, exposures, overlay = [], [], [], []
    for offset, line in enumerate(lines):
        number = offset + 2
        parts = _parse_fields(path, number, line, 4)
        try:
            centers.append(float(parts[0]) / PER_M_TO_PER_UM)
            counts.append(int(parts[1]))
            exposures.append(int(parts[2]))
            overlay.append(float(parts[3]) * PER_M_TO_PER_UM)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{number}: {exc}") from exc
    if not centers:
        raise ConfigurationError(f"{path}:2: no data rows")
    if len(set(exposures)) != 1:
        raise ConfigurationError(f"{path}: exposure must be identical in every row")
    return InterferencePattern(
        bin_centers=np.asarray(centers),
        counts=np.asarray(counts),
        exposure=exposures[0],
        model_overlay=np.asarray(overlay),
    )


def write_events(path, batch: EventBatch):
    rows = (
        (str(i), _fmt(dk * PER_M_TO_PER_UM), str(int(out)))
        for i, (dk, out) in enumerate(zip(batch.delta_k, batch.outcome))
    )
    _write_rows(path, EVENTS_HEADER, rows)


def read_events(path) -> EventBatch:
    lines = _read_rows(path, EVENTS_HEADER)
    delta_k, outcomes = [], []
    for offset, line in enumerate(lines):
        number = offset + 2
        parts = _parse_fields(path, number, line, 3)
        try:
            index = int(parts[0])
            delta_k.append(float(parts[1]) / PER_M_TO_PER_UM)
            outcome = int(parts[2])
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{number}: {exc}") from exc
        if index != offset:
            raise ConfigurationError(
                f"{path}:{number}: event_index must be consecutive from 0"
            )
        if outcome not in (0, 1, 2):
            raise ConfigurationError(
                f"{path}:{number}: outcome must be 0, 1 or 2, found {outcome}"
            )
        outcomes.append(outcome)
    if not delta_k:
        raise ConfigurationError(f"{path}:2: no data rows")
    return EventBatch(np.asarray(delta_k), np.asarray(outcomes))


def write_surface(path, sigma_k_grid, d_grid, surface):
    rows = (
        (_fmt(sk * PER_M_TO_PER_UM), _fmt(dist * M_TO_MM), _fmt(surface[i, j]))
        for i, sk in enumerate(sigma_k_grid)
        for j, dist in enumerate(d_grid)
    )
    _write_rows(path, SURFACE_HEADER, rows)


def write_study(path, estimates_rad):
    rows = (
        (str(i), _fmt(est * RAD_TO_MRAD)) for i, est in enumerate(estimates_rad)
    )
    _write_rows(path, STUDY_HEADER, rows)


def study_summary_text(study) -> str:
    """Single structured-text record summarizing a variance study."""
    lines = [
        f"n_trials = {study.n_trials}",
        f"n_events = {study.n_events_per_trial}",
        f"empirical_var = {_fmt(study.empirical_variance)}",
        f"crb_var = {_fmt(study.crb_variance)}",
        f"ratio = {_fmt(study.ratio)}",
        f"bias = {_fmt(study.bias)}",
    ]
    return "\n".join(lines) + "\n"


def sniff_csv(path) -> Tuple[str, str]:
    """Identify a CSV by its header; returns (kind, header)."""
    try:
        with open(path, "r", newline="") as handle:
            header = handle.readline().rstrip("\r\n")
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc
    kinds = {
        EVENTS_HEADER: "events",
        PATTERN_HEADER: "pattern",
        FISHER_HEADER: "fisher",
        SURFACE_HEADER: "surface",
        STUDY_HEADER: "study",
    }
    if header not in kinds:
        raise ConfigurationError(
            f"{path}:1: unrecognized header {header!r}"
        )
    return kinds[header], header
