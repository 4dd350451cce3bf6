"""Command-line driver.

Subcommands ``outage``, ``capacity-region``, ``diversity-sweep`` and
``validate`` read an optional config file (see :mod:`overlaytc.config`),
apply flag overrides and write one CSV or JSON result file.  Exit codes:
0 success, 1 invalid input, 2 validation failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any

from . import __version__
from .capacity import (
    capacity_line_blind,
    capacity_line_exclusion,
    diversity_capacity,
)
from .config import ExperimentConfig, build_config, read_config_file
from .errors import InfeasibleError, OverlayError
from .outage import (
    exact_rayleigh_outage,
    invert_outage_to_density,
    lemma1_bounds,
    outage_asymptotic,
    outage_mc,
)
from .rng import THREADS_ENV
from .scenario import AD_HOC, BASE_STATION, Overlay, ReceiverKind, Receiver, data_link, interferer_density

EXIT_OK, EXIT_INVALID, EXIT_VALIDATION, EXIT_IO = 0, 1, 2, 3
UNITS = "densities per m^2, distances in m, throughput in bit/s/Hz per m^2"


@dataclass
class Result:
    command: str
    columns: list[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)
    passed: bool = True


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

OUTAGE_COLUMNS = [
    "point", "sweep_value", "lambda_a", "lambda_u", "sir_threshold", "ad_hoc_distance",
    "cellular_distance", "interferer_density", "trials", "outages", "p_hat",
    "ci_half_width", "reportable", "asymptotic", "lemma1_lower", "lemma1_upper",
    "exact_rayleigh",
]


def cmd_outage(config: ExperimentConfig) -> Result:
    """Monte Carlo outage with asymptotic, bound and exact predictions per sweep point."""
    res = Result("outage", OUTAGE_COLUMNS)
    receiver = config.receiver
    for i, (value, params) in enumerate(config.sweep_points()):
        density = interferer_density(params, receiver)
        link_distance, fading = data_link(params, receiver)
        est = outage_mc(params, receiver, config.trials, config.master_seed, threads=config.threads)
        bounds = lemma1_bounds(
            density, link_distance, fading, params.interference_fading, params.delta, params.sir_threshold
        )
        exact = None
        if fading.shape == 1:
            exact = exact_rayleigh_outage(density, link_distance, params.delta, params.sir_threshold)
        res.rows.append({
            "point": i,
            "sweep_value": value,
            "lambda_a": params.lambda_a,
            "lambda_u": params.lambda_u,
            "sir_threshold": params.sir_threshold,
            "ad_hoc_distance": params.ad_hoc_distance,
            "cellular_distance": params.cellular_distance,
            "interferer_density": density,
            "trials": est.trials,
            "outages": est.outages,
            "p_hat": est.p_hat,
            "ci_half_width": est.ci_half_width,
            "reportable": est.reportable,
            "asymptotic": outage_asymptotic(params, receiver),
            "lemma1_lower": bounds.lower,
            "lemma1_upper": bounds.upper,
            "exact_rayleigh": exact,
        })
    res.summary["receiver"] = receiver.label
    return res


def cmd_capacity_region(config: ExperimentConfig) -> Result:
    """Boundary polylines of the blind and mutual-exclusion capacity regions."""
    params = config.params
    blind = capacity_line_blind(params)
    excl = capacity_line_exclusion(params)
    res = Result("capacity-region", ["curve", "vertex", "lambda_u", "lambda_a"])
    curves = [
        ("blind_line", blind.boundary()),
        ("exclusion_line", excl.as_line().boundary()),
        ("exclusion_rectangle", excl.boundary()),
    ]
    for name, vertices in curves:
        for k, (u, a) in enumerate(vertices):
            res.rows.append({"curve": name, "vertex": k, "lambda_u": u, "lambda_a": a})
    res.summary.update({
        "C1": blind.bound,
        "C2": excl.bound,
        "channel_fraction": params.channel_fraction,
        "exclusion_bound_u": excl.bound_u,
        "exclusion_bound_a": excl.bound_a,
    })
    return res


def cmd_diversity_sweep(config: ExperimentConfig) -> Result:
    """C1 and C2 versus ad hoc diversity order, cellular order offset by a constant."""
    res = Result("diversity-sweep", ["L1", "L2", "C1", "C2", "relative_gap"])
    if config.sweep_variable not in (None, "diversity_adhoc"):
        raise OverlayError("diversity-sweep sweeps diversity_adhoc only")
    for value, params in config.sweep_points("diversity_adhoc", range(1, 17)):
        params = params.replace(diversity_cellular=params.diversity_adhoc + config.diversity_offset)
        c1, c2 = diversity_capacity(params)
        res.rows.append({
            "L1": params.diversity_adhoc,
            "L2": params.diversity_cellular,
            "C1": c1,
            "C2": c2,
            "relative_gap": (c2 - c1) / c1,
        })
    res.summary["diversity_offset"] = config.diversity_offset
    return res


def _empirical_capacity(params, trials, seed, threads):
    """Simulated C1 (blind) or C2 (exclusion) plus the per-receiver densities."""
    invert = lambda receiver, var: invert_outage_to_density(  # noqa: E731
        params, receiver, var, params.outage_target, trials, seed, threads=threads
    )
    frac = params.channel_fraction
    if params.overlay is Overlay.BLIND:
        bs = invert(BASE_STATION, "lambda_a")
        ah = invert(ReceiverKind(Receiver.AD_HOC, True), "lambda_a")
        return params.lambda_u / frac + min(bs, ah), bs, ah
    bs_u = invert(BASE_STATION, "lambda_u")
    ah_a = invert(AD_HOC, "lambda_a")
    return bs_u / frac + ah_a / (1.0 - frac), bs_u, ah_a


def cmd_validate(config: ExperimentConfig) -> Result:
    """Compare analytic and simulated capacity intercepts; fails above tolerance."""
    res = Result(
        "validate",
        ["outage_target", "analytic", "empirical", "rel_error", "base_station_density",
         "ad_hoc_density", "passed"],
    )
    if config.sweep_variable not in (None, "outage_target"):
        raise OverlayError("validate sweeps outage_target only")
    for eps, params in config.sweep_points("outage_target", (0.02, 0.05, 0.1)):
        if params.overlay is Overlay.BLIND:
            analytic = capacity_line_blind(params).bound
        else:
            analytic = capacity_line_exclusion(params).bound
        empirical, bs, ah = _empirical_capacity(params, config.trials, config.master_seed, config.threads)
        rel = abs(empirical - analytic) / analytic
        ok = rel < config.tolerance
        res.passed &= ok
        res.rows.append({
            "outage_target": params.outage_target,
            "analytic": analytic,
            "empirical": empirical,
            "rel_error": rel,
            "base_station_density": bs,
            "ad_hoc_density": ah,
            "passed": ok,
        })
    res.summary.update({"tolerance": config.tolerance, "all_passed": res.passed})
    return res


COMMANDS = {
    "outage": cmd_outage,
    "capacity-region": cmd_capacity_region,
    "diversity-sweep": cmd_diversity_sweep,
    "validate": cmd_validate,
}


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def _cell(v) -> Any:
    """JSON-safe scalar; non-finite floats become strings."""
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, Overlay):
        return v.value
    return v


def _text(v) -> str:
    v = _cell(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(result: Result, config: ExperimentConfig) -> str:
    resolved = config.resolved()
    if config.output_format == "json":
        doc = {
            "command": result.command,
            "version": __version__,
            "units": UNITS,
            "config": {k: _cell(v) for k, v in resolved.items()},
            "summary": {k: _cell(v) for k, v in result.summary.items()},
            "columns": result.columns,
            "rows": [{c: _cell(row.get(c)) for c in result.columns} for row in result.rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# overlaytc {__version__} {result.command}\n")
    buf.write(f"# units: {UNITS}\n")
    for k, v in resolved.items():
        buf.write(f"# config {k} = {_text(v)}\n")
    for k, v in result.summary.items():
        buf.write(f"# summary {k} = {_text(v)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_text(row.get(c)) for c in result.columns])
    return buf.getvalue()


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--tolerance", type=float, help="relative tolerance for validate")
    common.add_argument(
        "--threads", type=int, help=f"worker threads (default: ${THREADS_ENV} or 1)"
    )
    common.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override any config key, e.g. --set params.sir_threshold=3",
    )
    parser = argparse.ArgumentParser(
        prog="overlaytc",
        description="Outage and transmission-capacity experiments for ad hoc networks "
        "overlaid on a cellular uplink.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(fn.__doc__ or "").strip() or None)
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    raw = read_config_file(args.config) if args.config else {}
    for item in args.set:
        if "=" not in item:
            raise OverlayError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        raw[k.strip()] = v.strip()
    flags = {
        "master_seed": args.seed,
        "trials": args.trials,
        "output.path": args.out,
        "output.format": args.format,
        "tolerance": args.tolerance,
        "threads": args.threads,
    }
    for k, v in flags.items():
        if v is not None:
            raw[k] = str(v)
    return build_config(raw)


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = load_config(args)
        result = COMMANDS[args.command](config)
        text = render(result, config)
    except OSError as exc:
        print(f"overlaytc: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except InfeasibleError as exc:
        print(f"overlaytc: infeasible: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OverlayError, ValueError) as exc:
        print(f"overlaytc: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        if config.output_path:
            with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"overlaytc: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO

    if not result.passed:
        print("overlaytc: validation failed", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK
