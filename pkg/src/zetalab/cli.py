"""``zetalab`` command line."""
from __future__ import annotations

import argparse
import logging
import sys

from . import pipeline, zeta
from .config import OUTPUT_ENV, load_config
from .errors import ConfigError, ProvenanceError, ZetaLabError

EXIT_USAGE = 2
EXIT_INPUT = 3


def _common(p):
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--t-max", type=float, dest="t_max")
    p.add_argument("--divisor-limit", type=int, dest="divisor_limit")
    p.add_argument("--c-step", type=float, dest="c_step")
    p.add_argument("--workers", type=int)
    p.add_argument("--checkpoint-every", type=int, dest="checkpoint_every")
    p.add_argument("--output-dir", dest="output_dir",
                   help=f"relative paths resolve against ${OUTPUT_ENV}")
    p.add_argument("--small-t-threshold", type=float, dest="eval.small_t_threshold", metavar="T")
    p.add_argument("--rs-terms", type=int, dest="eval.rs_correction_terms", metavar="N")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="zetalab", description="Mean-square error terms of zeta and the divisor problem.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("sieve", "build the divisor table"),
                        ("grid", "sample |zeta(1/2+it)|^2 (resumable)"),
                        ("error-terms", "build E, E*, R and E1"),
                        ("moments", "run the moment scan and write moments.csv"),
                        ("run", "sieve, grid, error-terms, moments and verify in turn")]:
        _common(sub.add_parser(name, help=help_))
    p = sub.add_parser("verify", help="write report.csv and report.json")
    _common(p)
    p.add_argument("--suite", choices=("identities", "main-terms", "growth", "all"))
    p = sub.add_parser("export-plot", help="plot-ready CSV of E, E*, R against t")
    _common(p)
    p.add_argument("--stride", type=int, default=None)
    p = sub.add_parser("zeta", help="evaluate Z(t) at single points")
    p.add_argument("t", type=float, nargs="+")
    p.add_argument("--small-t-threshold", type=float, default=zeta.DEFAULT_CONFIG.small_t_threshold)
    p.add_argument("--rs-terms", type=int, default=zeta.DEFAULT_CONFIG.rs_correction_terms)
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


_OVERRIDES = ("t_max", "divisor_limit", "c_step", "workers", "checkpoint_every",
              "output_dir", "suite", "eval.small_t_threshold", "eval.rs_correction_terms")


def _cmd_zeta(args):
    cfg = zeta.EvalConfig(small_t_threshold=args.small_t_threshold,
                          rs_correction_terms=args.rs_terms)
    print("t,Z,abs_zeta_sq")
    for t in args.t:
        z = zeta.hardy_z(t, cfg)
        print(f"{t!r},{z!r},{z * z!r}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "zeta":
            return _cmd_zeta(args)
        cfg = load_config(args.config, {k: getattr(args, k, None) for k in _OVERRIDES})
        if args.command == "sieve":
            print(pipeline.cmd_sieve(cfg))
        elif args.command == "grid":
            print(pipeline.cmd_grid(cfg))
        elif args.command == "error-terms":
            print(pipeline.cmd_error_terms(cfg))
        elif args.command == "moments":
            print(pipeline.cmd_moments(cfg))
        elif args.command == "export-plot":
            print(pipeline.cmd_export_plot(cfg, args.stride))
        else:
            report = (pipeline.cmd_verify(cfg) if args.command == "verify"
                      else pipeline.run_all(cfg))
            sys.stdout.write(report.to_csv())
            return report.exit_code
    except ConfigError as exc:
        print(f"zetalab: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, ProvenanceError) as exc:
        print(f"zetalab: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ZetaLabError as exc:
        print(f"zetalab: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
