"""Command-line entry point: ``vetl <subcommand>``. Exit codes: 0 ok, 2 validation error, 3 runtime error."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import yaml

from . import engine
from .core import Config, ConfigError, ProvisioningError, config_from_dict, config_to_dict, load_config
from .forecaster import TrainingError
from .modelfile import load_model, save_model
from .offline import fit
from .workload import BUILTIN_MODELS, generate_trace, load_trace, load_workload, save_trace

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3

DEFAULT_CONFIG = {
    "schema_version": 1,
    "provision": {
        "onprem_cores": 4,
        "buffer_bytes": 300_000_000,
        "cloud_budget_credits": 500.0,
        "uplink_bytes_per_s": 10_000_000,
        "downlink_bytes_per_s": 10_000_000,
    },
}


def _parse_value(text: str):
    return yaml.safe_load(text)


def resolve_config(args) -> Config:
    """Config file (or built-in defaults), then ``--set`` overrides, then explicit flags."""
    if args.config:
        doc = config_to_dict(load_config(args.config).params)
    else:
        doc = {k: (dict(v) if isinstance(v, dict) else v) for k, v in DEFAULT_CONFIG.items()}
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        parts = key.split(".")
        target = doc
        for p in parts[:-1]:
            target = target.setdefault(p, {})
            if not isinstance(target, dict):
                raise ConfigError(f"--set {key}: {p} is not a section")
        target[parts[-1]] = _parse_value(value)
    if args.seed is not None:
        doc["seed"] = args.seed
    return config_from_dict(doc)


def _out(args, name: str) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen_trace(args) -> int:
    cfg = resolve_config(args)
    model = load_workload(args.workload)
    trace = generate_trace(model, args.duration, cfg.seed)
    path = Path(args.out) if args.out else _out(args, "trace.jsonl")
    path.parent.mkdir(parents=True, exist_ok=True)
    save_trace(trace, path)
    print(f"segments={len(trace)} path={path}")
    return EXIT_OK


def _workload_for(args, trace):
    if args.workload:
        return load_workload(args.workload)
    if trace.model_id in BUILTIN_MODELS:
        return load_workload(trace.model_id)
    raise ConfigError(f"trace model {trace.model_id!r} is not built in; pass --workload")


def cmd_fit(args) -> int:
    cfg = resolve_config(args)
    trace = load_trace(args.trace)
    model = _workload_for(args, trace)
    offline = cfg.offline
    if args.labeled_fraction is not None:
        offline = replace(offline, labeled_fraction=args.labeled_fraction)
    fitted, report = fit(trace, model, cfg.provision, cfg.horizon, offline, cfg.training, seed=cfg.seed)
    path = Path(args.out) if args.out else _out(args, "model.json")
    path.parent.mkdir(parents=True, exist_ok=True)
    save_model(fitted, path)
    for stage, seconds in report.timings_s.items():
        print(f"stage={stage} seconds={seconds:.4f}")
    print(
        f"configs={len(fitted.config_indices)} categories={fitted.n_categories} "
        f"training_samples={report.n_training_samples} val_mae={report.val_mae:.4f} path={path}"
    )
    return EXIT_OK


def _load_run_inputs(args):
    cfg = resolve_config(args)
    fitted = load_model(args.model)
    traces = [load_trace(p) for p in args.trace]
    horizon = replace(fitted.horizon, switch_period_s=cfg.horizon.switch_period_s)
    return cfg, fitted, traces, horizon


def _options(cfg: Config, args, mode: str = "both") -> engine.RunOptions:
    return engine.RunOptions(
        mode=mode,
        type_b=not getattr(args, "no_type_b", False),
        fine_tune=cfg.training.fine_tune,
        timeline_bin_s=cfg.timeline_bin_s,
        seed=cfg.seed,
    )


def _emit(report: engine.MetricsReport, args, stem: str) -> None:
    paths = engine.write_report(report, args.out_dir, stem)
    print(report.summary_line())
    for kind, p in paths.items():
        print(f"{kind}={p}")


def cmd_ingest(args) -> int:
    cfg, fitted, traces, horizon = _load_run_inputs(args)
    report = engine.run_streams(traces, fitted, cfg.provision, horizon, _options(cfg, args))
    _emit(report, args, "ingest")
    return EXIT_OK


def cmd_baseline(args) -> int:
    cfg, fitted, traces, _ = _load_run_inputs(args)
    if len(traces) != 1:
        raise ConfigError("baselines take exactly one trace")
    trace = traces[0]
    if args.kind == "static":
        if args.knob_config is None:
            report = engine.best_feasible_static(trace, fitted, cfg.provision, args.budget or float("inf"))
            if report is None:
                print("infeasible=true reason=no-static-configuration-keeps-up")
                return EXIT_OK
        else:
            config = int(args.knob_config) if args.knob_config.isdigit() else args.knob_config
            report = engine.run_static_baseline(trace, fitted, config, cfg.provision, cfg.timeline_bin_s)
    else:
        report = engine.run_optimum_baseline(
            trace, fitted, cfg.provision, budget_core_s=args.budget, planned_interval_s=fitted.horizon.planned_interval_s
        )
    _emit(report, args, f"baseline_{args.kind}")
    return EXIT_OK


def cmd_ablate(args) -> int:
    cfg, fitted, traces, horizon = _load_run_inputs(args)
    if len(traces) != 1:
        raise ConfigError("ablations take exactly one trace")
    for mode in args.mode or engine.MODES:
        report = engine.run_ablation(traces[0], fitted, cfg.provision, mode, horizon, _options(cfg, args, mode))
        _emit(report, args, f"ablate_{mode}")
    return EXIT_OK


def parse_summary(text: str) -> dict[str, str]:
    out = {}
    for token in text.split():
        k, _, v = token.partition("=")
        out[k] = v
    return out


def cmd_report(args) -> int:
    files = [Path(p) for p in args.summaries] or sorted(Path(args.out_dir).glob("*_summary.txt"))
    if not files:
        raise ConfigError(f"no *_summary.txt files in {args.out_dir}")
    cols = ["mode", "quality_total", "quality_normalized", "work_core_s", "cloud_credits", "buffer_high_water_bytes"]
    rows = []
    for f in files:
        try:
            s = parse_summary(f.read_text())
        except OSError as e:
            raise ConfigError(f"cannot read {f}: {e}") from None
        rows.append([f.name.removesuffix("_summary.txt")] + [s.get(c, "-") for c in cols])
    header = ["run"] + cols
    widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(len(header))]
    lines = ["  ".join(str(v).ljust(w) for v, w in zip(r, widths)).rstrip() for r in [header] + rows]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    _out(args, "report.txt").write_text(text)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _global_flags() -> argparse.ArgumentParser:
    # accepted before or after the subcommand; SUPPRESS keeps a subcommand from
    # clobbering values given before it (each parser needs its own action objects)
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="YAML configuration file")
    common.add_argument("--seed", type=int, help="overrides the config seed")
    common.add_argument("--out-dir", help="directory for output files (default: out)")
    common.add_argument("--verbose", "-v", action="count")
    common.add_argument(
        "--set", action="append", metavar="KEY=VALUE", help="override a config key, e.g. provision.onprem_cores=8"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vetl", description=__doc__, parents=[_global_flags()])
    parser.set_defaults(config=None, seed=None, out_dir="out", verbose=0, set=None)
    common = _global_flags()
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-trace", parents=[common], help="generate a synthetic trace")
    p.add_argument("--workload", default="default", help="workload model file or built-in name")
    p.add_argument("--duration", type=float, required=True, help="seconds of content")
    p.add_argument("--out", help="trace file (default: OUT_DIR/trace.jsonl)")
    p.set_defaults(func=cmd_gen_trace)

    p = sub.add_parser("fit", parents=[common], help="run the offline phase")
    p.add_argument("--trace", required=True)
    p.add_argument("--workload", help="workload model (default: the trace's built-in model)")
    p.add_argument("--labeled-fraction", type=float)
    p.add_argument("--out", help="model file (default: OUT_DIR/model.json)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("ingest", parents=[common], help="run online ingestion")
    p.add_argument("--model", required=True)
    p.add_argument("--trace", required=True, action="append", help="repeat for several streams")
    p.add_argument("--no-type-b", action="store_true", help="classify from the upcoming segment (test mode)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("baseline", parents=[common], help="run the static or optimum baseline")
    p.add_argument("kind", choices=["static", "optimum"])
    p.add_argument("--model", required=True)
    p.add_argument("--trace", required=True, action="append")
    p.add_argument("--knob-config", help="static: configuration id or filtered-set position (default: best feasible)")
    p.add_argument("--budget", type=float, help="work budget in core*s")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("ablate", parents=[common], help="run ablation modes")
    p.add_argument("--model", required=True)
    p.add_argument("--trace", required=True, action="append")
    p.add_argument("--mode", action="append", choices=engine.MODES, help="repeatable; default all four")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("report", parents=[common], help="tabulate summary files")
    p.add_argument("summaries", nargs="*")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ProvisioningError, TrainingError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
