"""Command-line entry point: run experiments, reproduce presets, tune, export.

Configs are flat key=value text files (comments start with '#'); --set
overrides take precedence over file values. Every run writes results.csv, a
manifest echoing the effective configuration, and a gnuplot script when the
run sweeps pilot sizes.
"""

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .frameio import save_frame, write_plot_script, write_results
from .harness import ExperimentConfig, run_experiment, tune_parameter
from .methods import DEFAULT_METHODS, METHOD_REGISTRY, MethodSpec
from .presets import PRESET_NAMES, get_preset
from .scene import (
    NoiseSpec,
    generate_scene,
    generate_signals,
    synthesize_channel,
    transmit,
)

_SCALAR_KEYS = {
    "n_tx": int,
    "n_rx": int,
    "n_paths": int,
    "snr_db": float,
    "signal_kind": str,
    "test_len": int,
    "episodes": int,
    "impulse_fraction": float,
    "impulse_max_amplitude": float,
    "master_seed": int,
}

_DEFAULTS = {
    "n_tx": 4,
    "n_rx": 8,
    "n_paths": 25,
    "snr_db": -10.0,
    "signal_kind": "gaussian",
    "test_len": 500,
    "episodes": 250,
    "impulse_fraction": 0.10,
    "impulse_max_amplitude": 1.5,
    "master_seed": 1,
    "pilot_sizes": (10, 15, 20, 25, 50, 100),
    "methods": DEFAULT_METHODS,
}


class ConfigError(ValueError):
    pass


def _parse_methods(text):
    specs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        name, params = parts[0], {}
        for assignment in parts[1:]:
            if "=" not in assignment:
                raise ConfigError(f"bad method parameter {assignment!r} (expected k=v)")
            key, value = assignment.split("=", 1)
            if value.lower() in ("true", "false"):
                params[key] = value.lower() == "true"
            else:
                try:
                    params[key] = float(value)
                except ValueError:
                    params[key] = value
        try:
            specs.append(MethodSpec(name, params))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if not specs:
        raise ConfigError("methods list is empty")
    return tuple(specs)


def _parse_entry(key, value):
    if key in _SCALAR_KEYS:
        caster = _SCALAR_KEYS[key]
        try:
            return caster(value)
        except ValueError:
            raise ConfigError(f"field {key!r}: cannot parse {value!r} as {caster.__name__}")
    if key == "pilot_sizes":
        try:
            return tuple(int(v) for v in value.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"field 'pilot_sizes': bad list {value!r}")
    if key == "methods":
        return _parse_methods(value)
    raise ConfigError(f"unknown key {key!r}")


def parse_config(path, overrides=()):
    """Build an ExperimentConfig from a key=value file plus --set overrides."""
    values = dict(_DEFAULTS)
    if path is not None:
        text = Path(path).read_text()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            try:
                values[key] = _parse_entry(key, value)
            except ConfigError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        values[key] = _parse_entry(key, value)

    methods = values["methods"]
    if methods and isinstance(methods[0], str):
        methods = tuple(MethodSpec(name) for name in methods)
    try:
        return ExperimentConfig(
            n_tx=values["n_tx"],
            n_rx=values["n_rx"],
            n_paths=values["n_paths"],
            snr_db=values["snr_db"],
            signal_kind=values["signal_kind"],
            pilot_sizes=tuple(values["pilot_sizes"]),
            test_len=values["test_len"],
            episodes=values["episodes"],
            impulse=NoiseSpec(
                values["snr_db"],
                values["impulse_fraction"],
                values["impulse_max_amplitude"],
            ),
            methods=methods,
            master_seed=values["master_seed"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _config_lines(cfg):
    lines = [
        f"n_tx={cfg.n_tx}",
        f"n_rx={cfg.n_rx}",
        f"n_paths={cfg.n_paths}",
        f"snr_db={cfg.snr_db}",
        f"signal_kind={cfg.signal_kind}",
        f"pilot_sizes={','.join(str(p) for p in cfg.pilot_sizes)}",
        f"test_len={cfg.test_len}",
        f"episodes={cfg.episodes}",
        f"impulse_fraction={cfg.impulse.impulse_fraction}",
        f"impulse_max_amplitude={cfg.impulse.impulse_max_amplitude}",
        f"master_seed={cfg.master_seed}",
    ]
    method_text = ",".join(
        spec.name
        + "".join(
            f":{k}={v}" for k, v in sorted(spec.params.items()) if isinstance(v, float)
        )
        for spec in cfg.methods
    )
    lines.append(f"methods={method_text}")
    return lines


def _write_manifest(out_dir, cfg, extra_lines=()):
    path = out_dir / "manifest.txt"
    with open(path, "w") as fh:
        fh.write(f"artifact_version={__version__}\n")
        for line in extra_lines:
            fh.write(line + "\n")
        for line in _config_lines(cfg):
            fh.write(line + "\n")


def _emit(out_dir, cfg, rows, reference=None, extra_manifest=()):
    out_dir.mkdir(parents=True, exist_ok=True)
    write_results(rows, out_dir / "results.csv", reference=reference)
    _write_manifest(out_dir, cfg, extra_manifest)
    if len(cfg.pilot_sizes) > 1:
        write_plot_script(rows, "results.csv", out_dir / "results.gp")
    failed = sorted(
        {row.method for row in rows if row.episodes_ok == 0}
    )
    if failed:
        print(f"warning: methods with zero successful episodes: {', '.join(failed)}")
        return 1
    return 0


def _cmd_run(args):
    overrides = list(args.set or ())
    if args.seed is not None:
        overrides.append(f"master_seed={args.seed}")
    cfg = parse_config(args.config, overrides)
    rows = run_experiment(cfg, jobs=args.jobs)
    return _emit(Path(args.out), cfg, rows)


def _cmd_reproduce(args):
    try:
        cfg, reference, description = get_preset(args.preset)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"valid presets: {', '.join(PRESET_NAMES)}", file=sys.stderr)
        return 2
    for item in args.set or ():
        key, value = item.split("=", 1)
        if key == "episodes":
            from dataclasses import replace

            cfg = replace(cfg, episodes=int(value))
        elif key == "master_seed":
            from dataclasses import replace

            cfg = replace(cfg, master_seed=int(value))
        else:
            raise ConfigError(f"presets only accept episodes/master_seed overrides, got {key!r}")
    rows = run_experiment(cfg, jobs=args.jobs)
    return _emit(
        Path(args.out),
        cfg,
        rows,
        reference=reference,
        extra_manifest=[f"preset={args.preset}", f"description={description}"],
    )


def _cmd_tune(args):
    cfg = parse_config(args.config, args.set or ())
    grid = [float(v) for v in args.grid.split(",") if v.strip()]
    best = tune_parameter(cfg, args.method, grid, jobs=args.jobs)
    tunable = METHOD_REGISTRY[args.method].tunable
    print(f"{args.method}.{tunable}={best:g}")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "tuned.txt").write_text(f"{args.method}.{tunable}={best:g}\n")
    return 0


def export_frame(cfg, seed, path):
    """Generate one pilot frame from (config, seed) and write it as CSV."""
    import numpy as np

    from .scene import PilotFrame

    seeds = [int(s) for s in np.random.SeedSequence(seed).generate_state(3, np.uint64)]
    scene = generate_scene(cfg.n_tx, cfg.n_rx, cfg.n_paths, seeds[0])
    h = synthesize_channel(scene)
    s_block = generate_signals(
        cfg.signal_kind, cfg.n_tx, cfg.pilot_sizes[0], np.eye(cfg.n_tx), seeds[1]
    )
    x_block, r_v = transmit(h, s_block, cfg.impulse, seeds[2])
    frame = PilotFrame(s_block=s_block, x_block=x_block, true_h=h, true_r_v=r_v)
    out = Path(path)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    save_frame(frame, out)
    return frame


def _cmd_export_frame(args):
    cfg = parse_config(args.config, args.set or ())
    seed = args.seed if args.seed is not None else cfg.master_seed
    export_frame(cfg, seed, args.path)
    print(f"wrote {args.path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="drbeam",
        description="Distributionally robust receive beamforming simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--set", action="append", metavar="KEY=VALUE")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=None)

    p_run = sub.add_parser("run", parents=[common], help="run a configured experiment")
    p_run.add_argument("--config", required=False, default=None)
    p_run.add_argument("--out", required=True)
    p_run.set_defaults(func=_cmd_run)

    p_rep = sub.add_parser("reproduce", parents=[common], help="run a named preset")
    p_rep.add_argument("--preset", required=True)
    p_rep.add_argument("--out", required=True)
    p_rep.set_defaults(func=_cmd_reproduce)

    p_tune = sub.add_parser("tune", parents=[common], help="grid-tune one method")
    p_tune.add_argument("--config", required=False, default=None)
    p_tune.add_argument("--method", required=True)
    p_tune.add_argument("--grid", required=True, metavar="V1,V2,...")
    p_tune.add_argument("--out", default=None)
    p_tune.set_defaults(func=_cmd_tune)

    p_exp = sub.add_parser(
        "export-frame", parents=[common], help="write one generated pilot frame as CSV"
    )
    p_exp.add_argument("--config", required=False, default=None)
    p_exp.add_argument("path")
    p_exp.set_defaults(func=_cmd_export_frame)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
