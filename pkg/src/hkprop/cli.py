"""Command-line experiment driver.

Subcommands map one-to-one to the study's experiments; each consumes a JSON
config (or a built-in preset), derives every random number from the
configured seed, and writes CSV/JSON outputs whose bytes depend only on the
config.  Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

import argparse
import copy
import json
import os
import sys

from . import __version__
from .analysis import (TrajectoryCountQuery, chebyshev_min_trajectories,
                       clt_trajectory_estimate)
from .experiments import (ConfigError, ExperimentConfig, NumericalFailure,
                          run_dim_sweep, run_harmonic_error, run_initial_error,
                          run_morse_converge, run_position_density, run_spectrum)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


# ------------------------------------------------------------------ presets

def _preset_initial_error(scale):
    top = 100 * 2 ** (13 if scale == "paper" else 10)
    return {
        "system": {"kind": "harmonic", "m": 1.0, "omega": 1.0},
        "initial_state": {"q0": -1.0, "p0": 0.0, "gamma": 2.0, "hbar": 1.0},
        "sampling": {"scheme": "sqrt-husimi"},
        "run": {"dt": 1.0, "n_steps": 0, "n_trajectories": top, "seed": 1},
        "grid": {"x_min": -12.0, "x_max": 10.0, "n_points": 1024},
        "output": {"directory": ".", "formats": ["csv"]},
    }


def _preset_dim_sweep(scale):
    cfg = _preset_initial_error(scale)
    cfg["run"]["n_trajectories"] = 100 * 2 ** (13 if scale == "paper" else 6)
    return cfg


def _preset_harmonic_error(scale):
    paper = scale == "paper"
    return {
        "system": {"kind": "harmonic", "m": 1.0, "omega": 1.0},
        "initial_state": {"q0": -1.0, "p0": 0.0, "gamma": 2.0, "hbar": 1.0},
        "sampling": {"scheme": "sqrt-husimi"},
        "run": {"dt": 0.19634954084936207, "n_steps": 32,
                "n_trajectories": 2 ** 16 if paper else 2 ** 12,
                "seed": 1, "k_runs": 100 if paper else 20,
                "exact_classical": True},
        "grid": {"x_min": -12.0, "x_max": 10.0, "n_points": 512},
        "output": {"directory": ".", "formats": ["csv"]},
    }


def _preset_morse(scale, chi=0.01):
    paper = scale == "paper"
    steps = 2020 if chi >= 0.0075 else 1960
    grid = {"x_min": -200.0, "x_max": 10000.0, "n_points": 16384} \
        if chi >= 0.0075 else {"x_min": -200.0, "x_max": 1500.0, "n_points": 4096}
    return {
        "system": {"kind": "morse", "chi": chi, "omega_eq": 0.0041,
                   "v_eq": 0.1, "q_eq": 20.95, "m": 1.0},
        "initial_state": {"q0": 0.0, "p0": 0.0, "gamma": 0.00456, "hbar": 1.0},
        "sampling": {"scheme": "sqrt-husimi"},
        "run": {"dt": 8.0, "n_steps": steps,
                "n_trajectories": 100 * 2 ** (13 if paper else 8), "seed": 11},
        "grid": grid,
        "output": {"directory": ".", "formats": ["csv"]},
    }


def _preset_density(scale):
    cfg = _preset_morse(scale)
    cfg["run"]["n_trajectories"] = 100 * 2 ** 14 if scale == "paper" else 800
    return cfg


def _preset_spectrum(scale):
    cfg = _preset_morse(scale)
    cfg["sampling"] = {"scheme": "husimi"}
    cfg["run"]["n_steps"] = 4096 if scale == "paper" else 2048
    cfg["run"]["n_trajectories"] = 2 ** 14 if scale == "paper" else 2 ** 12
    return cfg


PRESETS = {
    "initial-error": _preset_initial_error,
    "dim-sweep": _preset_dim_sweep,
    "harmonic-error": _preset_harmonic_error,
    "morse-converge": _preset_morse,
    "density": _preset_density,
    "spectrum": _preset_spectrum,
}

MORSE_CHECKPOINTS = {0.005: (196, 1960), 0.01: (202, 2020)}


def load_config(subcommand, args):
    """Resolve the effective config dict: file or preset, then overrides."""
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError("config: cannot read %s (%s)" % (args.config, exc))
        except json.JSONDecodeError as exc:
            raise ConfigError("config: invalid JSON at line %d column %d: %s"
                              % (exc.lineno, exc.colno, exc.msg))
    else:
        cfg = copy.deepcopy(PRESETS[subcommand](args.preset))
    if args.seed is not None:
        cfg.setdefault("run", {})["seed"] = args.seed
    if args.n is not None:
        cfg.setdefault("run", {})["n_trajectories"] = args.n
    if args.out_dir is not None:
        cfg.setdefault("output", {})["directory"] = args.out_dir
    return cfg


# ------------------------------------------------------------------ output

def format_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_result_csv(result, config, path):
    """Header comment block (config hash, seed, version), then the table.

    Floats are printed with repr(), the shortest round-trip representation,
    so identical configs reproduce identical bytes.
    """
    lines = []
    lines.append("# experiment: %s" % result.name)
    lines.append("# config_hash: %s" % config.config_hash())
    lines.append("# seed: %d" % config.run.seed)
    lines.append("# version: %s" % __version__)
    for key in sorted(result.meta):
        lines.append("# %s: %s" % (key, format_cell(result.meta[key])))
    lines.append(",".join(result.columns))
    for row in result.rows:
        lines.append(",".join(format_cell(v) for v in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _run_and_write(result, config):
    out_dir = config.output.directory
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "%s_%s.csv" % (result.name, config.config_hash()))
    write_result_csv(result, config, path)
    print(path)
    return EXIT_OK


# ------------------------------------------------------------------- parser

def build_parser():
    parser = argparse.ArgumentParser(
        prog="hkprop",
        description="Herman-Kluk wavefunction propagation experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file (strict schema)")
        p.add_argument("--preset", choices=["desk", "paper"], default="desk",
                       help="built-in parameter set when no config is given")
        p.add_argument("--seed", type=int, help="override run.seed")
        p.add_argument("--n", type=int, help="override run.n_trajectories")
        p.add_argument("--out-dir", help="override output.directory")
        p.add_argument("--workers", type=int, default=1,
                       help="worker threads (results are worker-count independent)")

    add_common(sub.add_parser("initial-error", help="initial sampling error vs N"))

    p = sub.add_parser("dim-sweep", help="initial sampling error vs dimension")
    add_common(p)
    p.add_argument("--d-max", type=int, default=4, help="largest dimension (<= 8)")

    add_common(sub.add_parser("harmonic-error", help="time-resolved harmonic error"))

    p = sub.add_parser("morse-converge", help="N vs 2N error in a Morse well")
    add_common(p)
    p.add_argument("--checkpoints", help="comma-separated step checkpoints")
    p.add_argument("--repeats", type=int, default=None,
                   help="seed repetitions averaged (desk default 5)")

    add_common(sub.add_parser("density", help="position densities vs reference"))

    p = sub.add_parser("spectrum", help="autocorrelation spectra vs reference")
    add_common(p)
    p.add_argument("--damping-hwhm", type=float, default=None,
                   help="Gaussian damping half-width at half-maximum (time units)")

    p = sub.add_parser("plan", help="trajectory counts for a target accuracy")
    p.add_argument("--sigma2", type=float, required=True, help="variance estimate")
    p.add_argument("--epsilon", type=float, required=True, help="error threshold")
    p.add_argument("--p", type=float, required=True, help="exceedance probability")
    p.add_argument("--out-dir", default=None)
    return parser


def cmd_plan(args):
    try:
        query = TrajectoryCountQuery(sigma2=args.sigma2, epsilon=args.epsilon, p=args.p)
    except ValueError as exc:
        raise ConfigError(str(exc))
    payload = {
        "sigma2": args.sigma2,
        "epsilon": args.epsilon,
        "p": args.p,
        "chebyshev": chebyshev_min_trajectories(query),
    }
    try:
        payload["clt"] = clt_trajectory_estimate(query)
    except ValueError:
        payload["clt"] = "not-applicable"
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        path = os.path.join(args.out_dir, "plan.json")
        with open(path, "w") as fh:
            fh.write(text + "\n")
        print(path)
    else:
        print(text)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plan":
            return cmd_plan(args)
        cfg_dict = load_config(args.command, args)
        config = ExperimentConfig.from_dict(cfg_dict)
        if args.command == "initial-error":
            result = run_initial_error(config)
        elif args.command == "dim-sweep":
            result = run_dim_sweep(config, d_max=args.d_max)
        elif args.command == "harmonic-error":
            result = run_harmonic_error(config, workers=args.workers)
        elif args.command == "morse-converge":
            if args.checkpoints:
                checkpoints = [int(x) for x in args.checkpoints.split(",")]
            else:
                chi = config.system.chi
                checkpoints = list(MORSE_CHECKPOINTS.get(chi, (config.run.n_steps,)))
            repeats = args.repeats if args.repeats is not None else 5
            result = run_morse_converge(config, checkpoints=checkpoints,
                                        repeats=repeats, workers=args.workers)
        elif args.command == "density":
            result = run_position_density(config, workers=args.workers)
        elif args.command == "spectrum":
            result = run_spectrum(config, damping_hwhm=args.damping_hwhm,
                                  workers=args.workers)
        else:
            raise ConfigError("unknown command %r" % args.command)
        return _run_and_write(result, config)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, OverflowError) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
