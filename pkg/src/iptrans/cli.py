"""Command line front end.

Subcommands: ``besselk``, ``sample``, ``transform``, ``stat``, ``verify``,
``chain``, ``plot-data``.  The default seed is 12345 unless the environment
variable ``IPTRANS_SEED`` overrides it; every subcommand that consumes
randomness also takes an explicit ``--seed``.  ``verify`` accepts a JSON
config file plus flag overrides, flags winning, and exits 0 exactly when
every check in the report passed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import distributions as dists
from . import transforms
from .distributions import DistributionSpec, sample
from .harness import (
    ExperimentConfig,
    atomic_write_text,
    default_seed,
    emit_plot_data,
    run_experiment,
    write_report,
)
from .specfun import DoubleRangeError, bessel_k, log_bessel_k
from .stats import independence_test, ks_one_sample
from .theorems import TheoremCase

__all__ = ["main"]

_FAMILIES = ("gig", "al", "sexp", "stexp")
_THEOREMS = ("gig", "al", "sexp")
_MODES = ("identity", "montecarlo", "chain", "power")


_PARAM_ALIASES = {"lambda": "lam", "lambda1": "lam1", "lambda2": "lam2"}


def _parse_params(text: str | None) -> dict[str, float]:
    """Parse 'k=v,k=v' into a float dict; 'lambda' spellings are accepted."""
    if not text:
        return {}
    out = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise ValueError(f"expected k=v in --params, got {piece!r}")
        key, _, value = piece.partition("=")
        key = key.strip()
        out[_PARAM_ALIASES.get(key, key)] = float(value)
    return out


def _dist_from_args(family: str, params_text: str | None) -> DistributionSpec:
    return DistributionSpec.from_config(
        {"family": family, "params": _parse_params(params_text)}
    )


def _read_csv_columns(path: str) -> np.ndarray:
    """Read a numeric CSV, skipping comment lines and one optional header."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cells = [c.strip() for c in line.split(",")]
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                if rows:
                    raise
                continue  # header line
    if not rows:
        raise ValueError(f"no numeric rows in {path}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"ragged CSV in {path}")
    return np.asarray(rows, dtype=float)


def _print_checks(report: dict) -> None:
    print(f"{report['theorem']} {report['mode']} seed={report['seed']} n={report['n']}")
    for check in report["checks"]:
        verdict = "pass" if check["pass"] else "FAIL"
        extra = f" p={check['p_value']:.6g}" if "p_value" in check else ""
        print(
            f"  {check['name']:<28s} statistic={check['statistic']:<12.6g} "
            f"threshold={check['threshold']:<12.6g} {verdict}{extra}"
        )
    print("PASS" if report["pass"] else "FAIL")


def _cmd_besselk(args) -> int:
    if args.log:
        print(repr(log_bessel_k(args.nu, args.x)))
    else:
        print(repr(bessel_k(args.nu, args.x)))
    return 0


def _cmd_sample(args) -> int:
    spec = _dist_from_args(args.dist, args.params)
    seed = default_seed() if args.seed is None else args.seed
    batch = sample(spec, args.n, seed, backend=args.backend)
    lines = [
        f"# spec={spec.label()} seed={seed} n={args.n} backend={batch.backend}",
        "value",
    ]
    lines.extend(f"{v:.17g}" for v in batch.values)
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _transform_spec_from_args(args) -> transforms.TransformSpec:
    if args.kind == "f1":
        if args.alpha is None or args.beta is None:
            raise ValueError("f1 needs --alpha and --beta")
        return transforms.TransformSpec.f1(args.alpha, args.beta)
    if args.kind == "f3":
        if args.c1 is None or args.c2 is None:
            raise ValueError("f3 needs --c1 and --c2")
        return transforms.TransformSpec.f3(args.c1, args.c2)
    return transforms.TransformSpec.f2()


def _cmd_transform(args) -> int:
    spec = _transform_spec_from_args(args)
    if args.infile:
        pairs = _read_csv_columns(args.infile)
        if pairs.shape[1] != 2:
            raise ValueError("batch transform expects a two-column CSV of x,y")
        u, v = transforms.apply(spec, pairs[:, 0], pairs[:, 1])
        lines = ["u,v"] + [f"{a:.17g},{b:.17g}" for a, b in zip(u, v)]
        text = "\n".join(lines) + "\n"
        if args.out:
            atomic_write_text(args.out, text)
        else:
            sys.stdout.write(text)
        return 0
    if args.x is None or args.y is None:
        raise ValueError("either --x/--y or --in is required")
    u, v = transforms.apply(spec, args.x, args.y)
    region = transforms.region_of(spec, args.x, args.y)
    jac = transforms.jacobian_det(spec, args.x, args.y)
    print(f"u = {float(u)!r}")
    print(f"v = {float(v)!r}")
    print(f"region = {str(region)}")
    print(f"jacobian = {float(jac)!r}")
    return 0


def _cmd_stat(args) -> int:
    data = _read_csv_columns(args.csv)
    if args.which == "ks":
        spec = _dist_from_args(args.dist, args.params)
        values = data[:, args.col]
        report = ks_one_sample(values, lambda t: dists.cdf(spec, t), name="ks")
    else:
        if data.shape[1] < 2:
            raise ValueError("dcor needs a two-column CSV of x,y")
        seed = default_seed() if args.seed is None else args.seed
        report = independence_test(
            data[:, args.xcol],
            data[:, args.ycol],
            permutations=args.permutations,
            seed=seed,
            name="dcor",
        )
    out = report.to_dict()
    print(json.dumps(out, sort_keys=True, indent=2))
    return 0 if report.passed else 1


def _experiment_config(args, mode_override: str | None = None) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_file(args.config)
    else:
        cfg = ExperimentConfig()
    overrides: dict[str, object] = {}
    if args.theorem is not None:
        overrides["theorem"] = args.theorem
    if mode_override is not None:
        overrides["mode"] = mode_override
    elif getattr(args, "mode", None) is not None:
        overrides["mode"] = args.mode
    if args.params is not None:
        overrides["params"] = _parse_params(args.params)
    for field in ("n", "seed", "steps", "chains", "permutations",
                  "independence_n", "perturb", "identity_points", "out"):
        value = getattr(args, field.replace("-", "_"), None)
        if value is not None:
            overrides[field] = value
    return dataclasses.replace(cfg, **overrides)


def _cmd_verify(args, mode_override: str | None = None) -> int:
    cfg = _experiment_config(args, mode_override).resolved()
    report = run_experiment(cfg)
    _print_checks(report)
    if cfg.out:
        write_report(report, cfg.out)
        print(f"report written to {cfg.out}")
    return 0 if report["pass"] else 1


def _cmd_plot_data(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    if args.dist:
        target: DistributionSpec | TheoremCase = _dist_from_args(args.dist, args.params)
    elif args.theorem:
        params = _parse_params(args.params) or None
        if params is None:
            from .harness import default_case_params

            params = default_case_params(args.theorem, "montecarlo")
        target = TheoremCase.from_config({"theorem": args.theorem, "params": params})
    else:
        raise ValueError("plot-data needs --dist or --theorem")
    paths = emit_plot_data(target, n=args.n, seed=seed, bins=args.bins, out=args.out)
    for path in paths:
        print(path)
    return 0


def _add_verify_flags(parser: argparse.ArgumentParser, with_mode: bool) -> None:
    parser.add_argument("--theorem", choices=_THEOREMS)
    if with_mode:
        parser.add_argument("--mode", choices=_MODES)
    parser.add_argument("--params", help="case parameters as k=v,k=v")
    parser.add_argument("--n", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--chains", type=int)
    parser.add_argument("--permutations", type=int)
    parser.add_argument("--independence-n", dest="independence_n", type=int)
    parser.add_argument("--perturb", type=float)
    parser.add_argument("--identity-points", dest="identity_points", type=int)
    parser.add_argument("--out", help="write the JSON report here")
    parser.add_argument("--config", help="JSON config file; flags override it")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iptrans",
        description="Independence-preserving transformations: sampling, "
        "maps, and verification of the predicted output laws.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("besselk", help="modified Bessel function of the second kind")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--log", action="store_true", help="print log K instead")
    p.set_defaults(func=_cmd_besselk)

    p = sub.add_parser("sample", help="draw from one of the four families")
    p.add_argument("--dist", choices=_FAMILIES, required=True)
    p.add_argument("--params", required=True, help="k=v,k=v for the family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--backend", choices=("inverse_cdf", "rejection"),
                   default="inverse_cdf")
    p.add_argument("--out", help="CSV path; stdout if omitted")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("transform", help="apply one of the three maps")
    p.add_argument("--kind", choices=("f1", "f2", "f3"), required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--in", dest="infile", help="batch mode: CSV of x,y pairs")
    p.add_argument("--out", help="batch mode: CSV of u,v pairs; stdout if omitted")
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("stat", help="KS and distance-correlation tests on CSV data")
    stat_sub = p.add_subparsers(dest="which", required=True)
    ks = stat_sub.add_parser("ks", help="one-sample KS against a family")
    ks.add_argument("--csv", required=True)
    ks.add_argument("--col", type=int, default=0)
    ks.add_argument("--dist", choices=_FAMILIES, required=True)
    ks.add_argument("--params", required=True)
    ks.set_defaults(func=_cmd_stat)
    dc = stat_sub.add_parser("dcor", help="permutation independence test")
    dc.add_argument("--csv", required=True)
    dc.add_argument("--xcol", type=int, default=0)
    dc.add_argument("--ycol", type=int, default=1)
    dc.add_argument("--permutations", type=int, default=200)
    dc.add_argument("--seed", type=int)
    dc.set_defaults(func=_cmd_stat)

    p = sub.add_parser("verify", help="run one verification mode, write a report")
    _add_verify_flags(p, with_mode=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("chain", help="shorthand for verify --mode chain")
    _add_verify_flags(p, with_mode=False)
    p.set_defaults(func=lambda a: _cmd_verify(a, mode_override="chain"))

    p = sub.add_parser("plot-data", help="histogram-vs-density CSVs")
    p.add_argument("--dist", choices=_FAMILIES)
    p.add_argument("--theorem", choices=_THEOREMS)
    p.add_argument("--params")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--bins", type=int, default=60)
    p.add_argument("--out", required=True, help="output CSV path (or prefix)")
    p.set_defaults(func=_cmd_plot_data)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DoubleRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
