"""Command-line entry points.

Exit codes: 0 success, 1 verification failure, 2 input error.
Parallelism for sweeps is capped by the SVMPATH_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .construct import (
    DecompositionError,
    StretchFactor,
    StrictnessError,
    admissible_constructions,
    build_instance,
    choose_stretch,
    generate_2d_arc_instance,
    mu_of_q,
)
from .goldfarb import GoldfarbParams
from .instance_io import (
    InstanceFormatError,
    parse_rational,
    read_instance,
    regenerate,
    write_instance,
)
from .qp import CertificateError, build_kkt_certificate, nu_from_mu
from .report_io import (
    rational_json,
    sweep_report_csv,
    write_shadow_svg,
    write_sweep_report,
)
from .sweep import SweepMismatchError, sweep_constructed, sweep_refined

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2


def _params_from_args(args) -> GoldfarbParams:
    return GoldfarbParams(args.d, parse_rational(args.eps), parse_rational(args.gamma))


def cmd_gen(args) -> int:
    params = _params_from_args(args)
    if params.dim < 2:
        print("gen: need --d >= 2 to place the two-point class", file=sys.stderr)
        return EXIT_INPUT
    if params.dim == 2:
        print("warning: d=2 yields a single breakpoint; the path bound is trivial", file=sys.stderr)
    if args.stretch == "auto":
        stretch_factor = choose_stretch(params)
    else:
        stretch_factor = StretchFactor(parse_rational(args.stretch))
    instance = build_instance(params, stretch_factor)
    write_instance(instance, args.out)
    count = 2 ** params.dim // 4
    print(f"wrote {args.out}: n={instance.n_points} points, "
          f"{count} breakpoints, mu_bar={instance.calibration.mu_bar}")
    return EXIT_OK


def cmd_gen_arc(args) -> int:
    instance = generate_2d_arc_instance(args.n_plus)
    write_instance(instance, args.out)
    print(f"wrote {args.out}: n={instance.n_points} points (2D arc demo)")
    return EXIT_OK


def cmd_verify(args) -> int:
    instance = read_instance(args.instance)
    if instance.params is None:
        print("verify: only constructed instances carry certificates", file=sys.stderr)
        return EXIT_INPUT

    fresh = regenerate(instance)
    if fresh != instance:
        print(json.dumps({"ok": False, "error": "instance differs from its header parameters"}))
        return EXIT_VERIFY

    ell = instance.stretch.inverse
    summary = []
    try:
        constructions = admissible_constructions(instance.params, instance.stretch)
        for pair, decomp in constructions:
            cert = build_kkt_certificate(pair, instance.params, ell)
            summary.append(
                {
                    "sigma": "".join("+" if s == 1 else "-" for s in pair.sigma),
                    "mu": rational_json(mu_of_q(pair.q[-1], instance.calibration)),
                    "facet_multiplier": rational_json(next(iter(cert.facet_multipliers.values()))),
                    "objective": rational_json((pair.p - pair.q).norm_sq()),
                    "support": [[k, s] for k, s in sorted(
                        (k, pair.sigma[k - 1]) for k in range(1, instance.params.dim + 1)
                    )],
                    "max_weight": rational_json(decomp.mu_sigma),
                }
            )
        sweep_constructed(instance, [c[0] for c in constructions], [c[1] for c in constructions])
    except (CertificateError, SweepMismatchError, StrictnessError, DecompositionError) as exc:
        print(json.dumps({"ok": False, "error": str(exc)}))
        return EXIT_VERIFY
    print(json.dumps({"ok": True, "certificates": len(summary), "sigmas": summary}))
    return EXIT_OK


def cmd_sweep(args) -> int:
    instance = read_instance(args.instance)
    report = sweep_refined(
        instance, parse_rational(args.mu_lo), parse_rational(args.mu_hi), args.steps, args.refine
    )
    meta = {
        "instance": str(args.instance),
        "mu_lo": rational_json(parse_rational(args.mu_lo)),
        "mu_hi": rational_json(parse_rational(args.mu_hi)),
        "steps": args.steps,
        "refine_depth": args.refine,
    }
    write_sweep_report(report, args.out, meta)
    if args.csv:
        Path(args.csv).write_text(sweep_report_csv(report, args.precision), encoding="utf-8")
    n = instance.n_points
    nu_hi = nu_from_mu(parse_rational(args.mu_lo), n)
    nu_lo = nu_from_mu(parse_rational(args.mu_hi), n)
    print(
        f"bends={report.bend_count} (lower bound {report.lower_bound}), "
        f"distinct support sets={report.distinct_support_sets}, "
        f"nu range [{nu_lo}, {nu_hi}]"
    )
    return EXIT_OK


def cmd_shadow_svg(args) -> int:
    params = _params_from_args(args)
    if params.dim > 12:
        print("shadow-svg: hull size 2^d; --d is capped at 12", file=sys.stderr)
        return EXIT_INPUT
    write_shadow_svg(params, args.out)
    print(f"wrote {args.out}: {2 ** params.dim} vertices")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svmpath",
        description="Exact worst-case SVM regularization-path instances",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a constructed instance file")
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--eps", default="1/3")
    gen.add_argument("--gamma", default="1/16")
    gen.add_argument("--stretch", default="20000", help="stretch factor, or 'auto'")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    arc = sub.add_parser("gen-arc", help="generate the 2D arc demo instance")
    arc.add_argument("--n-plus", type=int, default=20)
    arc.add_argument("--out", required=True)
    arc.set_defaults(func=cmd_gen_arc)

    verify = sub.add_parser("verify", help="re-derive and certify an instance file")
    verify.add_argument("instance")
    verify.set_defaults(func=cmd_verify)

    swp = sub.add_parser("sweep", help="sweep the regularization parameter")
    swp.add_argument("instance")
    swp.add_argument("--mu-lo", default="8/10")
    swp.add_argument("--mu-hi", default="1")
    swp.add_argument("--steps", type=int, default=512)
    swp.add_argument("--refine", type=int, default=6)
    swp.add_argument("--out", required=True)
    swp.add_argument("--csv", default=None, help="also write an approximate CSV view")
    swp.add_argument("--precision", type=int, default=12)
    swp.set_defaults(func=cmd_sweep)

    svg = sub.add_parser("shadow-svg", help="draw the 2D shadow polygon")
    svg.add_argument("--d", type=int, required=True)
    svg.add_argument("--eps", default="1/3")
    svg.add_argument("--gamma", default="1/16")
    svg.add_argument("--out", required=True)
    svg.set_defaults(func=cmd_shadow_svg)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (InstanceFormatError, FileNotFoundError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CertificateError, SweepMismatchError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
