"""haarwalk command line.

    haarwalk run --config cfg.json
    haarwalk preset fig3b --set run.master_seed=3 --out results/
    haarwalk converge --in results/figS13_segments.csv --threshold 0.02 --groups 10
    haarwalk haar-test --n 25 --samples 10000 --seed 0

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__
from .harness import (PRESETS, ConfigError, HarnessIOError, detect_convergence, load_config,
                      read_csv, run_experiment, run_preset, write_outputs)
from .metrics import ConvergenceSpec, ensemble_stats
from .multiphoton import haar_two_photon_probability, pair_probabilities
from .randomness import haar_unitary, parse_seed

EXIT_CONFIG = 2
EXIT_IO = 3


def _cmd_run(args):
    cfg = load_config(args.config)
    if not any(cfg.output.get(k) for k in ("csv_path", "json_path", "svg_path")):
        raise ConfigError("output: no csv_path, json_path or svg_path given")
    write_outputs(run_experiment(cfg))
    print(f"results written for {cfg.experiment}")


def _cmd_preset(args):
    table = run_preset(args.id, args.set, out_dir=args.out)
    print(f"{args.id}: {len(table.rows)} rows written to {args.out}")


def _cmd_converge(args):
    rows = read_csv(args.input)
    try:
        spec = ConvergenceSpec(args.threshold, args.groups)
        result = detect_convergence(rows, spec, metric=args.metric)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    text = json.dumps(result, indent=2)
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise HarnessIOError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    else:
        print(text)


def haar_test(n: int, samples: int, seed: int) -> dict:
    """First- and second-moment checks of the Haar sampler against closed forms."""
    if n < 2 or samples < 2:
        raise ConfigError("haar-test needs n >= 2 and samples >= 2")
    us = np.array([haar_unitary(n, seed, s) for s in range(samples)])
    p = np.abs(us) ** 2
    mean, se = p.mean(axis=0), p.std(axis=0, ddof=1) / np.sqrt(samples)
    z1 = float(np.max(np.abs(mean - 1.0 / n) / se))

    pairs = np.array([pair_probabilities(u[:, 0], u[:, 1]) for u in us])
    iu = np.triu_indices(n, 1)
    pp = pairs[:, iu[0], iu[1]].mean(axis=1)
    target = haar_two_photon_probability(n)
    z2 = float(abs(pp.mean() - target) / (pp.std(ddof=1) / np.sqrt(samples)))

    stats = ensemble_stats(p[:, :, 0])
    return {
        "n": n, "samples": samples, "seed": seed,
        "max_entry_deviation": float(np.max(np.abs(mean - 1.0 / n))),
        "max_entry_z": z1,
        "two_photon_mean": float(pp.mean()), "two_photon_target": target, "two_photon_z": z2,
        "diag_norm_column0": stats.diag_norm,
        "pass": bool(z1 < 5 and z2 < 5),
    }


def _cmd_haar_test(args):
    print(json.dumps(haar_test(args.n, args.samples, args.seed), indent=2))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="haarwalk", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"haarwalk {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("preset", help=f"run a named preset ({', '.join(PRESETS)})")
    p.add_argument("id")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config field, e.g. run.samples=100")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_preset)

    p = sub.add_parser("converge", help="convergence lengths from a result CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--groups", type=int, default=1)
    p.add_argument("--metric", default="diag_norm", choices=["diag_norm", "m2_norm", "offdiag_norm"])
    p.add_argument("--out")
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("haar-test", help="statistical self-test of the Haar sampler")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=parse_seed, default=0)
    p.set_defaults(func=_cmd_haar_test)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
