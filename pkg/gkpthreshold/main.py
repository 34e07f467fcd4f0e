"""Command-line entry point.

    python -m gkpthreshold.main thresholds --format csv
    python -m gkpthreshold.main noise-table --gate cz --symbolic
    python -m gkpthreshold.main mc --gate i --sigma2 0.02 --samples 1000 --seed 7
    python -m gkpthreshold.main distill --sigma2 4.44e-3

Records go to stdout (and to ``--out`` when given); logs, progress and error
messages go to stderr. Exit status: 0 ok, 2 usage or contract error, 3 numerical
failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import ValidationError

from gkpthreshold.core.config import (
    RunOptions,
    configure_logging,
    load_run_options,
    settings,
    validate_variance,
)
from gkpthreshold.core.exceptions import (
    ConfigurationError,
    ContractViolation,
    GKPThresholdException,
    NumericalFailure,
    require,
)
from gkpthreshold.models.covariance import NoiseModel
from gkpthreshold.models.records import DistillationConfig, MCConfig, OutputRecord, db_to_sigma2
from gkpthreshold.models.schedule import Gate
from gkpthreshold.services import output

logger = logging.getLogger("gkpthreshold.main")


class _ArgumentParser(argparse.ArgumentParser):
    """Raises instead of exiting so run() controls the exit status."""

    def error(self, message):
        raise ConfigurationError(message)


def _pft_list(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty p_FT list")
    return values


def _common(parser: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    parser.add_argument("--format", choices=("json", "csv"), default=s, help="output format (default json)")
    parser.add_argument("--out", default=s, help="also write the output to this file")
    parser.add_argument("--config", default=None, help="JSON file whose keys mirror the flags")
    parser.add_argument("--log-level", dest="log_level", default=s, help=f"default {settings.LOG_LEVEL}")
    parser.add_argument("--stamp", action="store_true", default=s, help="add a UTC timestamp to metadata")


def _gate(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gate", choices=[g.value for g in Gate], type=str.lower, default=argparse.SUPPRESS)


def _noise_level(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--sigma2", type=float, default=argparse.SUPPRESS, help="noise variance σ²")
    group.add_argument("--db", type=float, default=argparse.SUPPRESS, help="squeezing in dB")


def build_parser() -> argparse.ArgumentParser:
    s = argparse.SUPPRESS
    parser = _ArgumentParser(prog="gkpthreshold", description=settings.APP_NAME)
    parser.add_argument("--version", action="version", version=settings.APP_VERSION)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("thresholds", help="σ² and squeezing needed for each p_FT")
    p.add_argument("--pft", type=_pft_list, default=s, help="comma-separated thresholds")
    _gate(p)
    _common(p)

    p = sub.add_parser("curve", help="p_err against squeezing in dB")
    p.add_argument("--db-min", dest="db_min", type=float, default=s)
    p.add_argument("--db-max", dest="db_max", type=float, default=s)
    p.add_argument("--points", type=int, default=s)
    _gate(p)
    _common(p)

    p = sub.add_parser("noise-table", help="error-matrix evolution through one gate")
    _gate(p)
    p.add_argument("--symbolic", action="store_true", default=s, help="exact δ/ε coefficients")
    _noise_level(p)
    _common(p)

    p = sub.add_parser("mc", help="Monte Carlo estimate of a gate's logical error rate")
    _gate(p)
    _noise_level(p)
    p.add_argument("--samples", type=int, default=s)
    p.add_argument("--seed", type=int, default=s, help=f"default {settings.DEFAULT_SEED}")
    p.add_argument(
        "--count-convention",
        dest="count_convention",
        choices=("half_cell", "exact_modular"),
        default=s,
    )
    _common(p)

    p = sub.add_parser("distill", help="photon-count distillation statistics")
    _noise_level(p)
    p.add_argument("--blur-variance", dest="blur_variance", type=float, default=s)
    p.add_argument("--envelope-variance", dest="envelope_variance", type=float, default=s)
    p.add_argument("--truncation", type=int, default=s)
    p.add_argument("--product-override", dest="product_override", type=float, default=s)
    _common(p)
    return parser


def _load_options(args: argparse.Namespace) -> RunOptions:
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    # a noise level given on the command line replaces either one from the file
    if "sigma2" in overrides:
        overrides["db"] = None
    elif "db" in overrides:
        overrides["sigma2"] = None
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigurationError(f"--config: no such file {args.config}", {"config": args.config})
        try:
            json.loads(path.read_text(encoding="utf-8"))
        except (ValueError, UnicodeDecodeError) as exc:
            raise ConfigurationError(f"--config: not valid JSON ({exc})", {"config": args.config})
    try:
        opts = load_run_options(args.config, **overrides)
    except ValidationError as exc:
        raise ConfigurationError(_first_error(exc), {"config": args.config} if args.config else None)
    if opts.sigma2 is not None and opts.db is not None:
        raise ConfigurationError("--sigma2 and --db are mutually exclusive", {"sigma2": opts.sigma2, "db": opts.db})
    return opts


def _checked(model, **fields):
    """Build an input model from user values; a rejected value is a usage error."""
    try:
        return model(**fields)
    except ValidationError as exc:
        raise ConfigurationError(_first_error(exc), {"model": model.__name__})


def _sigma2(opts: RunOptions, required: bool) -> Optional[float]:
    if opts.sigma2 is not None:
        require(validate_variance(opts.sigma2), "--sigma2 must be positive", sigma2=opts.sigma2)
        return opts.sigma2
    if opts.db is not None:
        return db_to_sigma2(opts.db)
    if required:
        raise ContractViolation("one of --sigma2 or --db is required")
    return None


def _level_parameters(opts: RunOptions, sigma2: float) -> Dict:
    params = {"sigma2": sigma2}
    if opts.db is not None:
        params["db"] = opts.db
    return params


# Commands

def _cmd_thresholds(opts: RunOptions) -> OutputRecord:
    from gkpthreshold.services.threshold import threshold_table

    gate = Gate.parse(opts.gate)
    rows = threshold_table(opts.pft, gate)
    for r in rows:
        logger.info("p_FT=%-8g sigma2=%.3e  %.1f dB", r.p_ft, r.sigma2, r.squeezing_db)
    return output.build_record(
        "thresholds",
        {"pft": list(opts.pft), "gate": gate.value},
        output.threshold_rows(rows),
        stamp=opts.stamp,
    )


def _cmd_curve(opts: RunOptions) -> OutputRecord:
    from gkpthreshold.services.threshold import EXPERIMENTAL_MILESTONES_DB, curve

    gate = Gate.parse(opts.gate)
    points = curve(opts.db_min, opts.db_max, opts.points, gate)
    return output.build_record(
        "curve",
        {"db_min": opts.db_min, "db_max": opts.db_max, "points": opts.points, "gate": gate.value},
        output.curve_rows(points),
        stamp=opts.stamp,
        experimental_milestones_db=list(EXPERIMENTAL_MILESTONES_DB),
    )


def _cmd_noise_table(opts: RunOptions) -> OutputRecord:
    from gkpthreshold.services.cluster_gates import propagate

    gate = Gate.parse(opts.gate)
    sigma2 = _sigma2(opts, required=False)
    if opts.symbolic and sigma2 is not None:
        raise ConfigurationError("--symbolic cannot be combined with --sigma2 or --db")
    trace = propagate(gate)
    noise = NoiseModel.from_sigma2(sigma2) if sigma2 is not None else None
    params = {"gate": gate.value, "symbolic": noise is None}
    if noise is not None:
        params.update(_level_parameters(opts, sigma2))
    return output.build_record("noise-table", params, output.noise_table_rows(trace, noise), stamp=opts.stamp)


def _cmd_mc(opts: RunOptions) -> OutputRecord:
    from gkpthreshold.services.cluster_gates import propagate
    from gkpthreshold.services.shift_mc import simulate
    from gkpthreshold.services.threshold import p_err_gate, p_fail

    gate = Gate.parse(opts.gate)
    sigma2 = _sigma2(opts, required=True)
    cfg = _checked(
        MCConfig,
        gate=gate,
        sigma2=sigma2,
        samples=opts.samples,
        seed=opts.seed,
        count_convention=opts.count_convention,
    )
    result = simulate(cfg)

    trace = propagate(gate)
    noise = NoiseModel.from_sigma2(sigma2)
    sigma = sigma2**0.5
    step_fail = {}
    for ev in trace.err_vars:
        label = f"step{ev.step}" if ev.rail == "single" else f"step{ev.step}_{ev.rail}"
        step_fail[label] = p_fail(ev.variance.multiple_of_sigma2(), sigma)
    rows = output.mc_rows(result, p_err_gate(gate, sigma2), step_fail, trace.final.at(noise))

    params = {"gate": gate.value, "samples": cfg.samples, "count_convention": cfg.count_convention}
    params.update(_level_parameters(opts, sigma2))
    return output.build_record(
        "mc",
        params,
        rows,
        seed=cfg.seed,
        stamp=opts.stamp,
        chunk_size=cfg.chunk_size,
        failures=result.failures,
    )


def _cmd_distill(opts: RunOptions) -> OutputRecord:
    from gkpthreshold.services.magic_distill import distill_stats

    sigma2 = _sigma2(opts, required=True)
    if opts.blur_variance is not None and opts.product_override is not None:
        raise ConfigurationError("--blur-variance and --product-override are mutually exclusive")
    cfg = _checked(
        DistillationConfig,
        sigma2=sigma2,
        blur_variance=opts.blur_variance,
        envelope_variance=opts.envelope_variance,
        truncation=opts.truncation,
        product_override=opts.product_override,
    )
    result = distill_stats(cfg)
    params = _level_parameters(opts, sigma2)
    params.update(
        blur_variance=opts.blur_variance,
        envelope_variance=opts.envelope_variance,
        truncation=opts.truncation,
        product_override=opts.product_override,
    )
    return output.build_record(
        "distill",
        params,
        output.distill_rows(result),
        stamp=opts.stamp,
        distillation_threshold=settings.DISTILLATION_THRESHOLD,
    )


COMMANDS = {
    "thresholds": _cmd_thresholds,
    "curve": _cmd_curve,
    "noise-table": _cmd_noise_table,
    "mc": _cmd_mc,
    "distill": _cmd_distill,
}


def _emit(text: str, out: Optional[str]) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()
    if out:
        Path(out).write_bytes(text.encode("utf-8"))


def _first_error(exc: ValidationError) -> str:
    err = exc.errors()[0]
    loc = ".".join(str(p) for p in err.get("loc", ()))
    flag = f"--{loc.replace('_', '-')}" if loc else "input"
    return f"{flag}: {err.get('msg', 'invalid value')}"


def run(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, run one analysis, write its record. Returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        opts = _load_options(args)
        configure_logging(opts.log_level)
        record = COMMANDS[args.command](opts)
        _emit(output.render(record, opts.format), opts.out)
        return 0
    except SystemExit as exc:
        # --help / --version
        return int(exc.code or 0)
    except ValidationError as exc:
        # inputs were checked above, so this is a result model rejecting a computed value
        err = exc.errors()[0]
        field = ".".join(str(p) for p in err.get("loc", ()))
        print(f"error: {exc.title}.{field}: {err.get('msg', 'invalid value')}", file=sys.stderr)
        return NumericalFailure.exit_code
    except GKPThresholdException as exc:
        detail = f" {exc.meta}" if exc.meta else ""
        print(f"error: {exc}{detail}", file=sys.stderr)
        return exc.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
