"""Optional plaintext run configuration.

The file format is `key = value` lines grouped under `[section]` headers,
with `#` comments and blank lines ignored.  Unknown sections or keys are
rejected with the offending line number.  Command-line flags override file
values, which override the built-in defaults (the tabletop parameters used
throughout the documentation).
"""

from dataclasses import dataclass
from typing import Optional

from .errors import ConfigurationError, DomainError
from .model import ANTISYMMETRIC, SYMMETRIC, BeamGeometry, NoiseModel
from .quadrature import QuadratureSpec
from .sampler import RngSeed
from .units import MM_TO_M, MRAD_TO_RAD, PER_UM_TO_PER_M, wavelength_nm_to_wavenumber

_SCHEMA = {
    "geometry": {
        "sigma_k_per_um": float,
        "d_mm": float,
        "wavelength_nm": float,
        "exchange_symmetry": str,
    },
    "noise": {"gamma": float, "nu": float},
    "run": {"delta_theta_mrad": float, "seed": int, "stream": int},
    "quadrature": {
        "rule": str,
        "half_range": float,
        "rel_tol": float,
        "max_subdivisions": int,
    },
    "output": {"out": str, "plot": str},
}

DEFAULT_SIGMA_K_PER_UM = 0.029
DEFAULT_D_MM = 335.0
DEFAULT_WAVELENGTH_NM = 810.0
DEFAULT_GAMMA = 0.0
DEFAULT_NU = 1.0
DEFAULT_SEED = 1
DEFAULT_STREAM = 0


@dataclass
class RunConfig:
    """Fully resolved run parameters in SI units."""

    geometry: BeamGeometry
    noise: NoiseModel
    quadrature: QuadratureSpec
    seed: RngSeed
    exchange_symmetry: str = SYMMETRIC
    delta_theta: Optional[float] = None
    out: Optional[str] = None
    plot: Optional[str] = None


def parse_config_file(path) -> dict:
    """Parse a config file into {section: {key: typed value}}."""
    try:
        with open(path, "r") as handle:
            raw_lines = handle.readlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc

    values: dict = {}
    section = None
    for number, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigurationError(
                    f"{path}:{number}: unknown section [{section}]"
                )
            values.setdefault(section, {})
            continue
        if "=" not in line:
            raise ConfigurationError(
                f"{path}:{number}: expected 'key = value', found {line!r}"
            )
        if section is None:
            raise ConfigurationError(
                f"{path}:{number}: key outside any [section]"
            )
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in _SCHEMA[section]:
            raise ConfigurationError(
                f"{path}:{number}: unknown key {key!r} in section [{section}]"
            )
        if key in values[section]:
            raise ConfigurationError(
                f"{path}:{number}: duplicate key {key!r}"
            )
        caster = _SCHEMA[section][key]
        try:
            values[section][key] = caster(raw_value)
        except ValueError as exc:
            raise ConfigurationError(
                f"{path}:{number}: cannot parse {key} value {raw_value!r}: {exc}"
            ) from exc
    return values


def _pick(flag_value, file_section, key, default):
    if flag_value is not None:
        return flag_value
    if key in file_section:
        return file_section[key]
    return default


def resolve_run_config(args) -> RunConfig:
    """Merge command-line flags, optional config file and defaults."""
    file_values = {}
    config_path = getattr(args, "config", None)
    if config_path:
        file_values = parse_config_file(config_path)
    geo = file_values.get("geometry", {})
    noi = file_values.get("noise", {})
    run = file_values.get("run", {})
    qua = file_values.get("quadrature", {})
    out = file_values.get("output", {})

    sigma_k_per_um = _pick(getattr(args, "sigma_k", None), geo, "sigma_k_per_um",
                           DEFAULT_SIGMA_K_PER_UM)
    d_mm = _pick(getattr(args, "d", None), geo, "d_mm", DEFAULT_D_MM)
    wavelength_nm = _pick(getattr(args, "wavelength", None), geo, "wavelength_nm",
                          DEFAULT_WAVELENGTH_NM)
    exchange = _pick(getattr(args, "exchange_symmetry", None), geo,
                     "exchange_symmetry", SYMMETRIC)
    if exchange not in (SYMMETRIC, ANTISYMMETRIC):
        raise ConfigurationError(
            f"exchange_symmetry must be '{SYMMETRIC}' or '{ANTISYMMETRIC}', "
            f"got {exchange!r}"
        )
    gamma = _pick(getattr(args, "gamma", None), noi, "gamma", DEFAULT_GAMMA)
    nu = _pick(getattr(args, "nu", None), noi, "nu", DEFAULT_NU)
    delta_theta_mrad = _pick(getattr(args, "delta_theta", None), run,
                             "delta_theta_mrad", None)
    seed = _pick(getattr(args, "seed", None), run, "seed", DEFAULT_SEED)
    stream = _pick(getattr(args, "stream", None), run, "stream", DEFAULT_STREAM)
    rule = _pick(getattr(args, "quad_rule", None), qua, "rule", None)
    half_range = _pick(getattr(args, "half_range", None), qua, "half_range", None)
    rel_tol = _pick(getattr(args, "rel_tol", None), qua, "rel_tol", None)
    max_subdivisions = _pick(getattr(args, "max_subdivisions", None), qua,
                             "max_subdivisions", None)
    out_path = _pick(getattr(args, "out", None), out, "out", None)
    plot_path = _pick(getattr(args, "plot", None), out, "plot", None)

    try:
        geometry = BeamGeometry(
            sigma_k=float(sigma_k_per_um) * PER_UM_TO_PER_M,
            d=float(d_mm) * MM_TO_M,
            k0=wavelength_nm_to_wavenumber(float(wavelength_nm)),
        )
        noise = NoiseModel(gamma=float(gamma), nu=float(nu))
        quad_kwargs = {}
        if rule is not None:
            quad_kwargs["rule"] = rule
        if half_range is not None:
            quad_kwargs["half_range"] = float(half_range)
        if rel_tol is not None:
            quad_kwargs["rel_tol"] = float(rel_tol)
        if max_subdivisions is not None:
            quad_kwargs["max_subdivisions"] = int(max_subdivisions)
        quadrature = QuadratureSpec(**quad_kwargs)
        rng_seed = RngSeed(master_seed=int(seed), stream_index=int(stream))
    except (ValueError, DomainError) as exc:
        # bad values arriving through flags or the file are configuration
        # mistakes, not runtime numerical failures
        raise ConfigurationError(str(exc)) from exc

    return RunConfig(
        geometry=geometry,
        noise=noise,
        quadrature=quadrature,
        seed=rng_seed,
        exchange_symmetry=exchange,
        delta_theta=(None if delta_theta_mrad is None
                     else float(delta_theta_mrad) * MRAD_TO_RAD),
        out=out_path,
        plot=plot_path,
    )
