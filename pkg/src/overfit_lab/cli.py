"""Command line front end.

    overfit-lab <subcommand> [--config FILE] [--key value ...] --out PATH

Subcommands: condnum, learning-curve, smin-study, kernel-interp, truncation,
spectrum-dump.  Any config key can be overridden with ``--key value``; the
environment variable OVERFIT_LAB_SEED overrides master_seed (explicit flags
still win).  Exit codes: 0 success, 1 validation error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import csvio, plotting
from .config import CONFIG_KEYS, parse_config
from .errors import NumericError, OverfitLabError
from .experiments import run_experiment
from .spectra import make_spectrum

SUBCOMMANDS = {
    "condnum": "condnum",
    "learning-curve": "learning_curve",
    "smin-study": "smin_study",
    "kernel-interp": "kernel_interp",
    "truncation": "truncation",
    "spectrum-dump": None,
}

PLOT_DEFAULTS = {
    "condnum": ("ratio_to_theory", True, False),
    "learning_curve": ("mse", True, True),
    "smin_study": ("s_min_over_n_lambda_n", True, True),
    "kernel_interp": ("mse", True, True),
    "truncation": ("truncation_gap", True, False),
}


def _split_overrides(tokens):
    """Turn leftover ``--key value`` pairs into an override dict."""
    overrides = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--"):
            raise OverfitLabError(f"unexpected argument {tok!r}")
        key = tok[2:].replace("-", "_")
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            if i + 1 >= len(tokens):
                raise OverfitLabError(f"flag --{key} is missing a value")
            value = tokens[i + 1]
            i += 1
        if key not in CONFIG_KEYS:
            raise OverfitLabError(f"unknown flag --{key}")
        overrides[key] = value
        i += 1
    return overrides


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="overfit-lab",
        description="kernel interpolation experiments with controlled eigen-decay",
    )
    parser.add_argument("subcommand", choices=sorted(SUBCOMMANDS))
    parser.add_argument("--config", help="path to a key = value config file")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--plot", help="optional SVG plot path")
    args, leftover = parser.parse_known_args(argv)

    try:
        overrides = _split_overrides(leftover)
        env_seed = os.environ.get("OVERFIT_LAB_SEED")
        if env_seed is not None and "master_seed" not in overrides:
            overrides["master_seed"] = env_seed
        text = ""
        if args.config:
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        if SUBCOMMANDS[args.subcommand] is not None:
            overrides["experiment"] = SUBCOMMANDS[args.subcommand]
        cfg = parse_config(text, overrides)

        if args.subcommand == "spectrum-dump":
            length = cfg.spectrum_length or cfg.eta * max(cfg.n_grid)
            spec = make_spectrum(cfg.spectrum, cfg.a, length)
            csvio.write_spectrum_csv(spec, args.out)
            return 0

        report = run_experiment(cfg)
        csvio.write_csv(report, args.out)
        if args.plot:
            y_field, log_x, log_y = PLOT_DEFAULTS[cfg.experiment]
            plotting.render_plot(report, args.plot, y_field=y_field,
                                 log_x=log_x, log_y=log_y)
        return 0
    except (NumericError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except (OverfitLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
