"""Command-line entry point.

    rae sample          --config cfg.yaml --out data.txt
    rae infer           --dataset data.txt [--config cfg.yaml]
    rae sweep-lmax      --config cfg.yaml --out sweep.csv
    rae bias-study      --config cfg.yaml --out bias.csv
    rae compare-runtime --config cfg.yaml --out report.json
    rae fisher-scan     --pi -0.22 --lambda 0.08 --l-max 10

Failures exit nonzero with a single ``error: <Kind>: <message>`` line on stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, ExperimentConfig, load_config
from .datasets import DatasetFile
from . import experiments as ex


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    return cfg.with_overrides(seed=args.seed, out=args.out, workers=args.workers)


def cmd_sample(args) -> None:
    cfg = _config(args)
    ds = ex.sample(cfg)
    if cfg.out is None:
        sys.stdout.write(ds.to_text())
    else:
        ds.write(cfg.out)


def cmd_infer(args) -> None:
    cfg = _config(args)
    path = args.dataset or cfg.dataset
    if path is None:
        raise ConfigError("infer needs --dataset or a dataset key in the config")
    ds = DatasetFile.read(path)
    cfg = cfg.with_overrides(dataset=path, observable=ds.observable)
    _emit(ex.dumps(ex.infer(cfg, ds)), cfg.out)


def cmd_sweep(args) -> None:
    cfg = _config(args)
    _emit(ex.sweep_csv(ex.sweep_lmax(cfg)), cfg.out)


def cmd_bias(args) -> None:
    cfg = _config(args)
    _emit(ex.sweep_csv(ex.bias_study(cfg)), cfg.out)


def cmd_compare(args) -> None:
    cfg = _config(args)
    _emit(ex.dumps(ex.compare_runtime(cfg)), cfg.out)


def cmd_fisher(args) -> None:
    cfg = _config(args)
    pi = cfg.pi_guess if args.pi is None else args.pi
    lam = cfg.lambda_guess if args.lam is None else args.lam
    l_max = cfg.l_max if args.l_max is None else args.l_max
    _emit(ex.fisher_csv(ex.fisher_table(pi, lam, args.l_min, l_max)), cfg.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rae", description="Robust amplitude estimation experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--seed", type=int, metavar="N")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--workers", type=int, metavar="N")

    for name, fn, help_ in [
        ("sample", cmd_sample, "draw parity outcomes for each configured layer count"),
        ("sweep-lmax", cmd_sweep, "RMSE/bias/sigma of MLE trials for each L_max"),
        ("bias-study", cmd_bias, "L_max sweep under coherent over-rotation (simulator only)"),
        ("compare-runtime", cmd_compare, "standard sampling vs RAE at equal circuit depth"),
    ]:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)

    p = sub.add_parser("infer", parents=[common], help="run MLE trials on an existing dataset file")
    p.add_argument("--dataset", metavar="PATH")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("fisher-scan", parents=[common], help="Fisher information per query over L")
    p.add_argument("--pi", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--l-min", type=int, default=0)
    p.add_argument("--l-max", type=int)
    p.set_defaults(func=cmd_fisher)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - every failure becomes one stderr line
        msg = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
