"""Command-line interface.

Eight subcommands cover the model, information bounds, simulation and
estimation paths.  Inputs are given in tabletop units (inverse micrometers,
millimeters, milliradians, nanometers); outputs are fixed-schema CSV files
plus optional rendered figures.  Exit codes: 0 success, 2 configuration
error, 3 numerical failure.
"""

import argparse
import sys

import numpy as np

from . import io
from .config import resolve_run_config
from .errors import ConfigurationError, HomSenseError
from .estimator import fit_pattern, mle_deflection, variance_study
from .fisher import (
    classical_fisher_information,
    cramer_rao_std,
    fisher_surface,
    optimal_working_point,
    quantum_fisher_information,
)
from .sampler import scan_pattern, simulate_run
from .units import (
    MM_TO_M,
    MRAD_TO_RAD,
    PER_UM_TO_PER_M,
    RAD_TO_MRAD,
    RAD_TO_URAD,
    UM_TO_M,
    PER_M_TO_PER_UM,
)

_FMT = "{:.12g}"


def _print_kv(key, value):
    if isinstance(value, bool):
        text = "true" if value else "false"
    elif isinstance(value, float):
        text = _FMT.format(value)
    else:
        text = str(value)
    print(f"{key} = {text}")


def _require_delta_theta(cfg):
    if cfg.delta_theta is None:
        raise ConfigurationError(
            "a deflection is required: pass --delta-theta or set "
            "delta_theta_mrad in the [run] section"
        )
    return cfg.delta_theta


def _out_path(cfg, default_name):
    return cfg.out if cfg.out else default_name


def cmd_pattern(args):
    cfg = resolve_run_config(args)
    deflection = _require_delta_theta(cfg)
    half = args.k_range * PER_UM_TO_PER_M
    slit = args.slit_width * UM_TO_M if args.slit_width is not None else None
    pattern = scan_pattern(
        (-half, half, args.bins),
        args.exposure,
        deflection,
        cfg.geometry,
        cfg.noise,
        cfg.seed,
        slit_width=slit,
        counting=args.counting,
        exchange_symmetry=cfg.exchange_symmetry,
    )
    path = _out_path(cfg, "pattern.csv")
    io.write_pattern(path, pattern)
    _print_kv("written", path)
    if cfg.plot:
        from . import plots

        plots.render_pattern(pattern, cfg.plot)
        _print_kv("figure", cfg.plot)
    return 0


def cmd_fisher(args):
    cfg = resolve_run_config(args)
    thetas = np.linspace(
        args.theta_min * MRAD_TO_RAD, args.theta_max * MRAD_TO_RAD, args.points
    )
    values = [
        classical_fisher_information(
            t, cfg.geometry, cfg.noise, cfg.quadrature, cfg.exchange_symmetry
        ).value
        for t in thetas
    ]
    path = _out_path(cfg, "fisher.csv")
    io.write_fisher_scan(path, thetas, values)
    _print_kv("written", path)
    if cfg.plot:
        from . import plots

        plots.render_fisher_scan(
            thetas, values, quantum_fisher_information(cfg.geometry), cfg.plot
        )
        _print_kv("figure", cfg.plot)
    return 0


def cmd_qfi(args):
    cfg = resolve_run_config(args)
    h = quantum_fisher_information(cfg.geometry)
    bound = cramer_rao_std(h, args.n)
    half = cramer_rao_std(h, args.n, half_convention=True)
    _print_kv("qfi_rad2", h)
    _print_kv("n", args.n)
    _print_kv("crb_std_urad", bound * RAD_TO_URAD)
    _print_kv("crb_std_half_urad", half * RAD_TO_URAD)
    return 0


def cmd_simulate(args):
    cfg = resolve_run_config(args)
    deflection = _require_delta_theta(cfg)
    batch = simulate_run(
        args.n_events, deflection, cfg.geometry, cfg.noise, cfg.seed,
        cfg.exchange_symmetry,
    )
    path = _out_path(cfg, "events.csv")
    io.write_events(path, batch)
    _print_kv("written", path)
    counts = batch.outcome_counts()
    _print_kv("zero_one_two", f"{counts[0]},{counts[1]},{counts[2]}")
    return 0


def cmd_estimate(args):
    cfg = resolve_run_config(args)
    kind, _ = io.sniff_csv(args.input)
    bracket = (args.bracket_min * MRAD_TO_RAD, args.bracket_max * MRAD_TO_RAD)
    if kind == "events":
        batch = io.read_events(args.input)
        estimate = mle_deflection(
            batch, cfg.geometry, cfg.noise, bracket, cfg.quadrature,
            cfg.exchange_symmetry,
        )
        _print_kv("source", "events")
        _print_kv("n_events", len(batch))
        _print_kv("delta_theta_mrad", estimate.value * RAD_TO_MRAD)
        _print_kv("std_mrad", estimate.std * RAD_TO_MRAD)
        _print_kv("log_likelihood", estimate.log_likelihood_at_max)
        _print_kv("at_boundary", estimate.at_boundary)
    elif kind == "pattern":
        pattern = io.read_pattern(args.input)
        fit = fit_pattern(
            pattern, cfg.geometry, bracket=bracket,
            exchange_symmetry=cfg.exchange_symmetry,
        )
        _print_kv("source", "pattern")
        _print_kv("delta_theta_mrad", fit.delta_theta_hat * RAD_TO_MRAD)
        _print_kv("sigma_k_per_um", fit.sigma_k_hat * PER_M_TO_PER_UM)
        _print_kv("visibility", fit.visibility_hat)
        _print_kv("amplitude", fit.amplitude_hat)
        _print_kv("residual_rms", fit.residual_rms)
        _print_kv("converged", fit.converged)
        _print_kv("visibility_clamped", fit.visibility_clamped)
        _print_kv("degenerate", fit.degenerate)
    else:
        raise ConfigurationError(
            f"{args.input}: expected an events or pattern CSV, found {kind}"
        )
    return 0


def cmd_study(args):
    cfg = resolve_run_config(args)
    deflection = _require_delta_theta(cfg)
    study = variance_study(
        args.trials,
        args.n_events,
        deflection,
        cfg.geometry,
        cfg.noise,
        cfg.seed,
        quad=cfg.quadrature,
        exchange_symmetry=cfg.exchange_symmetry,
    )
    path = _out_path(cfg, "study.csv")
    io.write_study(path, study.estimates)
    sys.stdout.write(io.study_summary_text(study))
    _print_kv("bias_flagged", study.bias_flagged)
    _print_kv("written", path)
    if cfg.plot:
        from . import plots

        crb_std = np.sqrt(study.crb_variance)
        plots.render_study(study.estimates, deflection, crb_std, cfg.plot)
        _print_kv("figure", cfg.plot)
    return 0


def cmd_working_point(args):
    cfg = resolve_run_config(args)
    point = optimal_working_point(
        cfg.geometry,
        cfg.noise,
        (args.theta_min * MRAD_TO_RAD, args.theta_max * MRAD_TO_RAD),
        grid_points=args.grid_points,
        quad=cfg.quadrature,
        exchange_symmetry=cfg.exchange_symmetry,
    )
    _print_kv("delta_theta_mrad", point.delta_theta * RAD_TO_MRAD)
    _print_kv("fisher_rad2", point.fisher_information)
    _print_kv("flat", point.flat)
    return 0


def cmd_surface(args):
    cfg = resolve_run_config(args)
    deflection = _require_delta_theta(cfg)
    sigma_grid = np.linspace(
        args.sigma_k_min * PER_UM_TO_PER_M,
        args.sigma_k_max * PER_UM_TO_PER_M,
        args.sigma_k_points,
    )
    d_grid = np.linspace(
        args.d_min * MM_TO_M, args.d_max * MM_TO_M, args.d_points
    )
    surface = fisher_surface(
        sigma_grid, d_grid, deflection, cfg.noise, cfg.quadrature,
        cfg.exchange_symmetry,
    )
    path = _out_path(cfg, "surface.csv")
    io.write_surface(path, sigma_grid, d_grid, surface)
    _print_kv("written", path)
    if cfg.plot:
        from . import plots

        plots.render_surface(sigma_grid, d_grid, surface, cfg.plot)
        _print_kv("figure", cfg.plot)
    return 0


def _add_common(parser):
    parser.add_argument("--config", help="optional key=value config file")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--plot", help="render a PNG figure to this path")


def _add_geometry(parser):
    parser.add_argument("--sigma-k", type=float, dest="sigma_k",
                        help="momentum spread (1/um), default 0.029")
    parser.add_argument("--d", type=float,
                        help="source-detector distance (mm), default 335")
    parser.add_argument("--wavelength", type=float,
                        help="carrier wavelength (nm), default 810")


def _add_noise(parser):
    parser.add_argument("--gamma", type=float, help="loss probability, default 0")
    parser.add_argument("--nu", type=float, help="visibility, default 1")
    parser.add_argument("--exchange-symmetry", dest="exchange_symmetry",
                        choices=["symmetric", "antisymmetric"],
                        help="fringe convention, default symmetric (dip)")


def _add_quadrature(parser):
    parser.add_argument("--quad-rule", dest="quad_rule",
                        choices=["adaptive-simpson", "gauss-hermite"])
    parser.add_argument("--half-range", type=float, dest="half_range")
    parser.add_argument("--rel-tol", type=float, dest="rel_tol")
    parser.add_argument("--max-subdivisions", type=int, dest="max_subdivisions")


def _add_seed(parser):
    parser.add_argument("--seed", type=int, help="master seed, default 1")
    parser.add_argument("--stream", type=int, help="stream index, default 0")


def _add_delta_theta(parser):
    parser.add_argument("--delta-theta", type=float, dest="delta_theta",
                        help="deflection (mrad)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="homsense",
        description="Two-photon interference toolkit for transverse "
                    "deflection sensing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", help="synthetic slit-scan interference pattern")
    for add in (_add_common, _add_geometry, _add_noise, _add_seed, _add_delta_theta):
        add(p)
    p.add_argument("--k-range", type=float, dest="k_range", default=0.15,
                   help="half range of bin centers (1/um)")
    p.add_argument("--bins", type=int, default=151)
    p.add_argument("--exposure", type=int, default=100000, help="trials per bin")
    p.add_argument("--slit-width", type=float, dest="slit_width",
                   help="scanning slit width (um)")
    p.add_argument("--counting", choices=["binomial", "poisson"],
                   default="binomial")
    p.set_defaults(handler=cmd_pattern)

    p = sub.add_parser("fisher", help="classical information vs deflection")
    for add in (_add_common, _add_geometry, _add_noise, _add_quadrature):
        add(p)
    p.add_argument("--theta-min", type=float, dest="theta_min", default=0.1,
                   help="scan start (mrad)")
    p.add_argument("--theta-max", type=float, dest="theta_max", default=2.0,
                   help="scan end (mrad)")
    p.add_argument("--points", type=int, default=41)
    p.set_defaults(handler=cmd_fisher)

    p = sub.add_parser("qfi", help="quantum bound and both Cramer-Rao conventions")
    for add in (_add_common, _add_geometry):
        add(p)
    p.add_argument("--n", type=int, default=10000, help="detection events")
    p.set_defaults(handler=cmd_qfi)

    p = sub.add_parser("simulate", help="write a seeded event record CSV")
    for add in (_add_common, _add_geometry, _add_noise, _add_seed, _add_delta_theta):
        add(p)
    p.add_argument("--n-events", type=int, dest="n_events", required=True)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate the deflection from a CSV")
    for add in (_add_common, _add_geometry, _add_noise, _add_quadrature):
        add(p)
    p.add_argument("input", help="events or pattern CSV")
    p.add_argument("--bracket-min", type=float, dest="bracket_min", default=0.0,
                   help="search bracket start (mrad)")
    p.add_argument("--bracket-max", type=float, dest="bracket_max", default=5.0,
                   help="search bracket end (mrad)")
    p.set_defaults(handler=cmd_estimate)

    p = sub.add_parser("study", help="Monte Carlo variance vs the bound")
    for add in (_add_common, _add_geometry, _add_noise, _add_quadrature,
                _add_seed, _add_delta_theta):
        add(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--n-events", type=int, dest="n_events", required=True)
    p.set_defaults(handler=cmd_study)

    p = sub.add_parser("working-point",
                       help="deflection maximizing the information")
    for add in (_add_common, _add_geometry, _add_noise, _add_quadrature):
        add(p)
    p.add_argument("--theta-min", type=float, dest="theta_min", default=0.1)
    p.add_argument("--theta-max", type=float, dest="theta_max", default=2.0)
    p.add_argument("--grid-points", type=int, dest="grid_points", default=256)
    p.set_defaults(handler=cmd_working_point)

    p = sub.add_parser("surface", help="information over (sigma_k, d)")
    for add in (_add_common, _add_geometry, _add_noise, _add_quadrature,
                _add_delta_theta):
        add(p)
    p.add_argument("--sigma-k-min", type=float, dest="sigma_k_min", default=0.01)
    p.add_argument("--sigma-k-max", type=float, dest="sigma_k_max", default=0.05)
    p.add_argument("--sigma-k-points", type=int, dest="sigma_k_points", default=9)
    p.add_argument("--d-min", type=float, dest="d_min", default=100.0)
    p.add_argument("--d-max", type=float, dest="d_max", default=500.0)
    p.add_argument("--d-points", type=int, dest="d_points", default=9)
    p.set_defaults(handler=cmd_surface)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HomSenseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
