"""Command-line interface.

Subcommands map one-to-one onto the library layers: ``link-budget`` prints
the optical-chain quantities for one geometry, ``evaluate`` scores a single
(mu, L0, F_t) point, ``optimize`` finds the best point for one end-to-end
distance, ``sweep`` and ``tradeoff`` produce the standard curves, and
``validate`` runs the built-in oracle checks.

Exit codes: 0 on success, 1 when a validation oracle check fails, 2 on
usage, parse, or parameter errors, 3 when the request is infeasible.
Curves are written as CSV under one versioned schema; single optima,
single points, and validation reports are JSON documents.  The worker
count for sweeps is taken from the SATQNET_WORKERS environment variable
so that command lines stay reproducible.
"""

import argparse
import contextlib
import logging
import sys

from .config import (
    PLATFORM_PRESETS,
    SCENARIO_PRESETS,
    build_network_model,
    build_network_models,
    load_config,
)
from .errors import ConfigParseError, SatqnetError, ValidationError
from .link_budget import (
    atmospheric_efficiency,
    corrected_tx_gain,
    coupling_efficiency,
    diffraction_bpe_efficiency,
    slant_distance,
    taper_alpha,
    zenith_cosine,
)
from .optimizer import (
    optimize_over_altitudes,
    rate_fidelity_tradeoff,
    sweep_distance,
)
from .performance_model import evaluate_point
from .photon_source import ArmPair, SourceModel, initial_fidelity, overall_gain, qber
from .results import (
    grid_rows,
    optimum_document,
    optimum_row,
    point_document,
    sweep_rows,
    tradeoff_rows,
    validation_document,
    write_csv,
    write_json,
)
from .validation import run_all_checks

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

DEFAULT_LINK_BUDGET_MU = 0.01

# Fixed per-scenario distances for the rate-versus-fidelity curves (km).
TRADEOFF_DISTANCE_KM = {"A": 1000.0, "B": 6000.0, "C": 15000.0}

DEFAULT_SWEEP_KM = tuple(float(l) for l in range(1000, 20001, 1000))


@contextlib.contextmanager
def _open_out(path: str):
    """Yield a writable text stream; ``-`` means stdout and is not closed."""
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as stream:
            yield stream


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", required=True,
                        help=f"scenario preset ({', '.join(SCENARIO_PRESETS)})")
    parser.add_argument("--platform", required=True,
                        help=f"platform preset ({', '.join(PLATFORM_PRESETS)})")
    parser.add_argument("--config", default=None, metavar="FILE",
                        help="TOML file overriding preset values")


def _add_out(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default="-", metavar="PATH",
                        help="output destination; - streams to stdout")


def _cmd_link_budget(args: argparse.Namespace) -> int:
    """Print the optical-chain quantities for one altitude and separation."""
    scenario_cfg, platform_cfg = load_config(args.scenario, args.platform,
                                             args.config)
    model = build_network_model(scenario_cfg, platform_cfg, args.altitude)
    geom = model.geometry(args.l0 * 1e3)
    chain = model.chain
    distance = slant_distance(geom)
    eta_diff = diffraction_bpe_efficiency(chain.transmitter,
                                          chain.receiver.diameter_m, distance)
    eta_atm = atmospheric_efficiency(chain.atmosphere.eta_zenith, geom)
    eta_cpl = coupling_efficiency(chain.atmosphere)
    eta = chain.channel_efficiency(geom)
    n_bar = chain.background_mean()
    y0 = chain.background_click()
    src = SourceModel(mu=args.mu, f_hz=model.f_hz, e_d=model.e_d,
                      e_0=model.e_0)
    arms = ArmPair.symmetric(eta, y0)
    gain = overall_gain(src, arms)
    error_rate = qber(src, arms)
    rows = [
        ("scenario", scenario_cfg.name),
        ("platform", platform_cfg.name),
        ("altitude_km", args.altitude),
        ("L0_km", args.l0),
        ("wavelength_nm", platform_cfg.transition_wavelength_nm),
        ("slant_km", distance / 1e3),
        ("zenith_cosine", zenith_cosine(geom)),
        ("taper_alpha", taper_alpha(chain.transmitter.obscuration_gamma)),
        ("tx_gain_corrected", corrected_tx_gain(chain.transmitter)),
        ("eta_diffraction", eta_diff),
        ("eta_atmosphere", eta_atm),
        ("eta_coupling", eta_cpl),
        ("eta_channel", eta),
        ("n_bar", n_bar),
        ("y0", y0),
        ("mu", args.mu),
        ("Q_mu", gain),
        ("QBER", error_rate),
        ("F_init", initial_fidelity(error_rate)),
    ]
    for name, value in rows:
        print(f"{name} = {value!r}" if isinstance(value, float)
              else f"{name} = {value}")
    return EXIT_OK


def _cmd_evaluate(args: argparse.Namespace) -> int:
    """Score one (mu, L0, F_t) point and emit it as a JSON document."""
    scenario_cfg, platform_cfg = load_config(args.scenario, args.platform,
                                             args.config)
    model = build_network_model(scenario_cfg, platform_cfg, args.altitude)
    point = evaluate_point(model, args.mu, args.l0 * 1e3, args.ft,
                           args.distance * 1e3)
    document = point_document(point, model.scenario, model.platform_name)
    with _open_out(args.out) as stream:
        write_json(stream, document)
    if not point.feasible:
        print(f"point infeasible: {point.reason}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_optimize(args: argparse.Namespace) -> int:
    """Grid-optimize the end-to-end rate for one distance."""
    scenario_cfg, platform_cfg = load_config(args.scenario, args.platform,
                                             args.config)
    if args.altitude is not None:
        models = (build_network_model(scenario_cfg, platform_cfg,
                                      args.altitude),)
    else:
        models = build_network_models(scenario_cfg, platform_cfg)
    optimum = optimize_over_altitudes(models, args.distance * 1e3,
                                      grid=scenario_cfg.grid_spec(),
                                      collect_grid=args.full_grid is not None)
    with _open_out(args.out) as stream:
        write_csv(stream, [optimum_row(optimum)])
    if args.json is not None:
        with _open_out(args.json) as stream:
            write_json(stream, optimum_document(optimum))
    if args.full_grid is not None:
        with _open_out(args.full_grid) as stream:
            write_csv(stream, grid_rows(optimum))
    if optimum.best is None:
        print("no feasible point on the search grid", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    """Optimize across a distance list and emit the rate-distance curve."""
    scenario_cfg, platform_cfg = load_config(args.scenario, args.platform,
                                             args.config)
    models = build_network_models(scenario_cfg, platform_cfg)
    if args.distances is not None:
        try:
            distances_km = [float(item) for item in args.distances.split(",")]
        except ValueError as exc:
            raise ValidationError(
                f"--distances must be a comma-separated list of km: {exc}"
            ) from exc
    else:
        distances_km = list(DEFAULT_SWEEP_KM)
    optima = sweep_distance(models, [l * 1e3 for l in distances_km],
                            grid=scenario_cfg.grid_spec())
    with _open_out(args.out) as stream:
        write_csv(stream, sweep_rows(optima))
    return EXIT_OK


def _cmd_tradeoff(args: argparse.Namespace) -> int:
    """Emit the best rate at each target fidelity for one distance."""
    scenario_cfg, platform_cfg = load_config(args.scenario, args.platform,
                                             args.config)
    models = build_network_models(scenario_cfg, platform_cfg)
    distance_km = args.distance
    if distance_km is None:
        distance_km = TRADEOFF_DISTANCE_KM[scenario_cfg.name]
    points = rate_fidelity_tradeoff(models, distance_km * 1e3,
                                    grid=scenario_cfg.grid_spec())
    rows = tradeoff_rows(points, distance_km * 1e3, models[0].scenario,
                         models[0].platform_name)
    with _open_out(args.out) as stream:
        write_csv(stream, rows)
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    """Run the oracle checks and print a residual table."""
    checks = run_all_checks()
    header = (f"{'check':<28} {'status':<6} {'value':>14} {'reference':>14} "
              f"{'residual':>10} {'tolerance':>10}")
    print(header)
    print("-" * len(header))
    for check in checks:
        print(f"{check.name:<28} {'PASS' if check.passed else 'FAIL':<6} "
              f"{check.value:>14.6g} {check.reference:>14.6g} "
              f"{check.residual:>10.3g} {check.tolerance:>10.3g}  "
              f"{check.detail}")
    failed = sum(1 for check in checks if not check.passed)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    if args.json is not None:
        with _open_out(args.json) as stream:
            write_json(stream, validation_document(checks))
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Assemble the argument parser for all subcommands."""
    parser = argparse.ArgumentParser(
        prog="satqnet",
        description="Satellite-assisted quantum repeater network performance",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="increase log verbosity (-v info, -vv debug)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("link-budget",
                       help="print optical-chain quantities for one geometry")
    _add_common(p)
    p.add_argument("--altitude", type=float, required=True, metavar="KM")
    p.add_argument("--l0", type=float, required=True, metavar="KM",
                   help="ground-station separation; 0 means zenith")
    p.add_argument("--mu", type=float, default=DEFAULT_LINK_BUDGET_MU,
                   help="mean pair number for the gain and error lines")
    p.set_defaults(func=_cmd_link_budget)

    p = sub.add_parser("evaluate", help="score a single (mu, L0, F_t) point")
    _add_common(p)
    p.add_argument("--altitude", type=float, required=True, metavar="KM")
    p.add_argument("--distance", type=float, required=True, metavar="KM",
                   help="end-to-end distance")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--l0", type=float, required=True, metavar="KM")
    p.add_argument("--ft", type=float, required=True,
                   help="target fidelity")
    _add_out(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("optimize",
                       help="maximize the rate over (mu, L0, F_t)")
    _add_common(p)
    p.add_argument("--distance", type=float, required=True, metavar="KM")
    p.add_argument("--altitude", type=float, default=None, metavar="KM",
                   help="restrict to one altitude (default: all preset ones)")
    _add_out(p)
    p.add_argument("--json", default=None, metavar="PATH",
                   help="also write the optimum as a JSON document")
    p.add_argument("--full-grid", default=None, metavar="PATH",
                   help="also write every evaluated grid point as CSV")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("sweep", help="rate-versus-distance curve")
    _add_common(p)
    p.add_argument("--distances", default=None, metavar="KM,KM,...",
                   help="comma-separated distances "
                        "(default 1000..20000 step 1000)")
    _add_out(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("tradeoff", help="rate-versus-target-fidelity curve")
    _add_common(p)
    p.add_argument("--distance", type=float, default=None, metavar="KM",
                   help="end-to-end distance (default per scenario)")
    _add_out(p)
    p.set_defaults(func=_cmd_tradeoff)

    p = sub.add_parser("validate", help="run the built-in oracle checks")
    p.add_argument("--json", default=None, metavar="PATH",
                   help="also write the report as a JSON document")
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    """CLI entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SatqnetError as exc:
        print(f"error: {exc} [{exc.reason}]", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
