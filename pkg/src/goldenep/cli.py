"""Command line harness: ``goldenep {generate,solve,compare,counterexample,rate}``.

Exit codes: 0 on success, 2 on usage or input errors, 1 on numerical failure.
"""

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

from . import __version__
from ._validation import DimensionError, InvariantError
from .analysis import counterexample_run, rate_certificate
from .core import NotStronglyPseudomonotoneError
from .instgen import (
    GeneratorConfig,
    InstanceFormatError,
    config_to_dict,
    generate,
    load_instance,
    save_instance,
)
from .prox import ProxConvergenceError, ProxSettings
from .solvers import (
    PHI,
    DiminishingStep,
    StepSizeError,
    gra_solve,
    mgra1_solve,
    mgra2_solve,
    step_from_fraction,
)

log = logging.getLogger("goldenep")

ALGORITHMS = ("gra", "mgra1", "mgra2")
# step choices p_i for GRA plus the two diminishing-step variants
BENCHMARK_RUNS = ("gra:p=0.9", "gra:p=0.7", "gra:p=0.5", "gra:p=0.3", "mgra1:base=1", "mgra2:base=1")


class UsageError(Exception):
    pass


def _fmt(x):
    return repr(float(x))


# -- instance sources ---------------------------------------------------------


def _add_generator_flags(parser, required_dim=False):
    parser.add_argument("--dim", type=int, required=required_dim, help="problem dimension m")
    parser.add_argument("--seed", type=int, default=0, help="64-bit unsigned seed")
    parser.add_argument("--eig-neg", type=float, nargs=2, default=(-2.0, 0.0), metavar=("LO", "HI"))
    parser.add_argument("--eig-pos", type=float, nargs=2, default=(0.0, 2.0), metavar=("LO", "HI"))
    parser.add_argument("--q-range", type=float, nargs=2, default=(-2.0, 2.0), metavar=("LO", "HI"))
    parser.add_argument("--box", type=float, nargs=2, default=(-2.0, 5.0), metavar=("LO", "HI"))
    parser.add_argument("--start-range", type=float, nargs=2, default=(0.0, 1.0), metavar=("LO", "HI"))


def _generator_config(args):
    if args.dim is None or args.dim < 1:
        raise UsageError(f"--dim must be a positive integer, got {args.dim}")
    if not 0 <= args.seed < 2**64:
        raise UsageError(f"--seed must be a 64-bit unsigned integer, got {args.seed}")
    return GeneratorConfig(
        dimension=args.dim,
        seed=args.seed,
        eig_neg_range=tuple(args.eig_neg),
        eig_pos_range=tuple(args.eig_pos),
        q_range=tuple(args.q_range),
        box_range=tuple(args.box),
        start_range=tuple(args.start_range),
    )


def _resolve_instance(args):
    """Return ``(instance, source)`` from exactly one of --instance / --dim."""
    if (args.instance is None) == (args.dim is None):
        raise UsageError("give exactly one instance source: --instance PATH or --dim M")
    if args.instance is not None:
        return load_instance(args.instance), {"instance_path": str(args.instance)}
    config = _generator_config(args)
    return generate(config), {"generator": config_to_dict(config)}


# -- run specs ----------------------------------------------------------------


def parse_run_spec(text):
    """Parse ``algo[:key=value,...]``, e.g. ``gra:p=0.9`` or ``mgra2:base=1,label=b``."""
    algo, _, rest = text.partition(":")
    algo = algo.strip().lower()
    if algo not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algo!r} in run spec {text!r}")
    spec = {"algorithm": algo}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"malformed item {item!r} in run spec {text!r}")
        key = key.strip()
        if key in ("p", "lam", "base"):
            spec[key] = float(value)
        elif key == "max_iter":
            spec[key] = int(value)
        elif key in ("label", "instance"):
            spec[key] = value.strip()
        else:
            raise UsageError(f"unknown key {key!r} in run spec {text!r}")
    if algo == "gra":
        if "lam" not in spec:
            p = spec.setdefault("p", 0.9)
            if not 0.0 < p < 1.0:
                raise UsageError(f"GRA fraction p must lie in (0, 1), got {p}")
    else:
        spec.setdefault("base", 1.0)
        if spec["base"] <= 0:
            raise UsageError(f"base must be positive, got {spec['base']}")
    if "label" not in spec:
        if algo == "gra":
            spec["label"] = f"gra(lam={spec['lam']:g})" if "lam" in spec else f"gra(p={spec['p']:g})"
        else:
            spec["label"] = f"{algo}(base={spec['base']:g})"
    return spec


def run_spec(instance, spec, stop_residual, max_iter, prox, residual_lam, residual_every):
    """Run one spec; returns ``(trace, extra_metadata)``."""
    algo = spec["algorithm"]
    max_iter = spec.get("max_iter", max_iter)
    common = dict(
        stop_residual=stop_residual,
        max_iter=max_iter,
        prox_settings=prox,
        residual_every=residual_every,
        record_iterates=False,
    )
    if algo == "gra":
        k = instance.constants
        lam = spec["lam"] if "lam" in spec else step_from_fraction(spec["p"], k)
        cert = rate_certificate(lam, k)
        trace = gra_solve(instance, lam, residual_lam=residual_lam, **common)
        return trace, {"lam": lam, "certificate": asdict(cert)}
    solve = mgra1_solve if algo == "mgra1" else mgra2_solve
    trace = solve(instance, DiminishingStep(spec["base"]), residual_lam=residual_lam, **common)
    return trace, {}


def _write_csv(path, header, rows):
    if path is None or str(path) == "-":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _trace_rows(trace):
    return [
        (int(n), _fmt(d), _fmt(t))
        for n, d, t in zip(trace.n, trace.residuals, trace.elapsed)
    ]


def _prox_from(args):
    return ProxSettings(args.prox_tol, args.max_inner_iter)


def _constants_dict(instance):
    return asdict(instance.constants)


# -- subcommands --------------------------------------------------------------


def cmd_generate(args):
    config = _generator_config(args)
    instance = generate(config)
    save_instance(instance, args.out)
    log.info("wrote m=%d instance (seed %d) to %s", config.dimension, config.seed, args.out)
    return 0


def cmd_solve(args):
    instance, source = _resolve_instance(args)
    text = args.algorithm
    if args.algorithm == "gra":
        text += f":lam={args.lam!r}" if args.lam is not None else f":p={args.p!r}"
    else:
        text += f":base={args.base!r}"
    spec = parse_run_spec(text)
    constants = instance.constants
    if args.residual_lam is not None:
        residual_lam = args.residual_lam
    elif args.algorithm == "gra":
        residual_lam = None
    else:
        residual_lam = step_from_fraction(args.residual_p, constants)
    trace, extra = run_spec(
        instance,
        spec,
        args.stop_residual,
        args.max_iter,
        _prox_from(args),
        residual_lam,
        args.residual_every,
    )
    if residual_lam is None:
        residual_lam = extra["lam"]

    out = Path(args.out)
    _write_csv(out, ("n", "D_n", "elapsed_seconds"), _trace_rows(trace))
    meta = {
        "command": "solve",
        "version": __version__,
        **source,
        "seed": instance.seed,
        "algorithm": spec["algorithm"],
        "run_spec": spec,
        "stop_residual": args.stop_residual,
        "max_iter": args.max_iter,
        "prox_tol": args.prox_tol,
        "max_inner_iter": args.max_inner_iter,
        "residual_every": args.residual_every,
        "residual_lam": residual_lam,
        "constants": _constants_dict(instance),
        "termination": trace.reason,
        "n_iter": trace.n_iter,
        "final_residual": float(trace.residuals[-1]),
        **extra,
    }
    out.with_suffix(".json").write_text(json.dumps(meta, indent=2))
    log.info("%s: %s after %d iterations, D=%.3e", spec["label"], trace.reason,
             trace.n_iter, trace.residuals[-1])
    return 0


def cmd_compare(args):
    runs = list(args.run or [])
    if args.preset == "benchmark":
        runs = list(BENCHMARK_RUNS) + runs
    if not runs:
        raise UsageError("no run specs given (use --run ALGO[:k=v,...] or --preset benchmark)")
    specs = [parse_run_spec(r) for r in runs]
    instance, source = _resolve_instance(args)
    for spec in specs:
        other = spec.get("instance")
        if other is not None and (
            args.instance is None or Path(other).resolve() != Path(args.instance).resolve()
        ):
            raise UsageError(f"run {spec['label']!r} names a different instance ({other}); "
                             "all runs must share one instance")
    residual_lam = step_from_fraction(args.residual_p, instance.constants)
    prox = _prox_from(args)

    def job(spec):
        return run_spec(instance, spec, args.stop_residual, args.max_iter, prox,
                        residual_lam, args.residual_every)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(job, specs))
    else:
        results = [job(s) for s in specs]

    rows = []
    summary = []
    for spec, (trace, extra) in zip(specs, results):
        rows.extend((spec["algorithm"], spec["label"], *row) for row in _trace_rows(trace))
        summary.append({"label": spec["label"], "run_spec": spec, "termination": trace.reason,
                        "n_iter": trace.n_iter, **extra})
    _write_csv(args.out, ("algorithm", "label", "n", "D_n", "elapsed_seconds"), rows)
    if args.out not in (None, "-"):
        meta = {
            "command": "compare",
            "version": __version__,
            **source,
            "seed": instance.seed,
            "stop_residual": args.stop_residual,
            "max_iter": args.max_iter,
            "prox_tol": args.prox_tol,
            "max_inner_iter": args.max_inner_iter,
            "residual_every": args.residual_every,
            "residual_lam": residual_lam,
            "constants": _constants_dict(instance),
            "runs": summary,
        }
        Path(args.out).with_suffix(".json").write_text(json.dumps(meta, indent=2))
    return 0


def cmd_counterexample(args):
    if args.n < 2:
        raise UsageError(f"--n must be at least 2, got {args.n}")
    if args.base <= 0 or args.base / 2.0 >= 1.0:
        raise UsageError(f"--base {args.base} gives steps outside (0, 1); need 0 < base < 2")
    x = counterexample_run(args.x0, args.y1, DiminishingStep(args.base), args.n)
    rows = [(n, _fmt(x[n]), _fmt(x[n + 1] / x[n]) if x[n] != 0 else "")
            for n in range(args.n)]
    _write_csv(args.out, ("n", "x_n", "ratio"), rows)
    return 0


def cmd_rate(args):
    instance, source = _resolve_instance(args)
    constants = instance.constants
    if args.lam is not None:
        lam = args.lam
    else:
        if not 0.0 < args.p < 1.0:
            raise UsageError(f"--p must lie in (0, 1), got {args.p}")
        lam = step_from_fraction(args.p, constants)
    cert = rate_certificate(lam, constants)
    out = {
        **source,
        "lam": lam,
        "lam_max": PHI / (4.0 * constants.c_max),
        "constants": asdict(constants),
        "certificate": {k: v for k, v in asdict(cert).items() if v is not None},
    }
    print(json.dumps(out, indent=2))
    return 0


# -- parser -------------------------------------------------------------------


def _add_solver_flags(parser):
    parser.add_argument("--stop-residual", type=float, default=1e-10)
    parser.add_argument("--max-iter", type=int, default=1_000_000)
    parser.add_argument("--prox-tol", type=float, default=1e-12)
    parser.add_argument("--max-inner-iter", type=int, default=10_000)
    parser.add_argument("--residual-every", type=int, default=1,
                        help="evaluate D_n only every k-th iteration")
    parser.add_argument("--residual-p", type=float, default=0.9,
                        help="D_n uses lam = p*phi/(4 c1) (MGRA runs and compare)")


def build_parser():
    parser = argparse.ArgumentParser(prog="goldenep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random Nash-Cournot instance")
    _add_generator_flags(p, required_dim=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run one algorithm and write a trace CSV")
    p.add_argument("--instance")
    _add_generator_flags(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, default="gra")
    p.add_argument("--p", type=float, default=0.9, help="GRA step fraction of phi/(4 c1)")
    p.add_argument("--lam", type=float, help="explicit GRA step")
    p.add_argument("--base", type=float, default=1.0, help="diminishing steps base/(n+1)")
    p.add_argument("--residual-lam", type=float)
    _add_solver_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="run several algorithms on one instance")
    p.add_argument("--instance")
    _add_generator_flags(p)
    p.add_argument("--run", action="append", metavar="SPEC",
                   help="ALGO[:key=value,...], keys p, lam, base, label, max_iter, instance")
    p.add_argument("--preset", choices=("benchmark",),
                   help="'benchmark': GRA with p in {0.9,0.7,0.5,0.3}, MGRA1 and MGRA2")
    p.add_argument("--jobs", type=int, default=1)
    _add_solver_flags(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("counterexample", help="scalar MGRA1 recurrence and its ratios")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--base", type=float, default=1.0)
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--y1", type=float, default=1.0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("rate", help="print the rate certificate for a GRA step")
    p.add_argument("--instance")
    _add_generator_flags(p)
    p.add_argument("--p", type=float, default=0.9)
    p.add_argument("--lam", type=float)
    p.set_defaults(func=cmd_rate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ProxConvergenceError, NotStronglyPseudomonotoneError) as exc:
        print(f"goldenep: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (StepSizeError, InvariantError, DimensionError, InstanceFormatError,
            FileNotFoundError) as exc:
        print(f"goldenep: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
