"""Command-line front end.

    noisybs unitary gen --m 8 --seed 1 --out u.json
    noisybs prob noisy --unitary u.json --outcome "0 2 5" --x 0.5 -l 2
    noisybs sample --unitary u.json --n 3 --x 0.5 -l 2 --count 1000 --seed 7 --out s.csv
    noisybs cutoff --n 16 --x 0.5 --eps 0.1 --delta 0.1
    noisybs validate decomposition --out report.json

``--config FILE`` reads a JSON object whose keys are option names (dashes or
underscores); options given on the command line win.  Errors exit with
status 2 and a message on stderr; ``validate`` exits 1 when a check fails.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import io
from .distinguishability import dist_cutoff, dist_prob_exact
from .gaussian import (
    GaussianNoiseSpec,
    exact_prob_general,
    noisy_prob_analytic,
    noisy_prob_decomposition,
    noisy_prob_mc,
    select_cutoff,
)
from .loss import LossSpec, lossy_prob, lossy_truncated
from .marginal import MarginalOracle, sample_many
from .numerics import RngStream, haar_unitary, load_matrix, save_matrix
from .outcomes import is_collision_free, multiplicity, parse_outcome, to_ordered
from .validation import CHECKS, bench_marginal


class UsageError(Exception):
    pass


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"missing required option --{name.replace('_', '-')}")


def _gaussian_x(args) -> float:
    if args.x is not None:
        return GaussianNoiseSpec.direct(args.x).x
    if args.x1 is not None or args.gamma is not None:
        _need(args, "x1", "gamma")
        return GaussianNoiseSpec.scaled(args.x1, args.gamma).x
    raise UsageError("give --x or both --x1 and --gamma")


def _loss_eta(args) -> float:
    if args.eta is not None:
        return LossSpec(eta_direct=args.eta).eta
    if args.eta1 is not None or args.depth is not None:
        _need(args, "eta1", "depth")
        return LossSpec(eta1=args.eta1, depth=args.depth).eta
    raise UsageError("give --eta or both --eta1 and --depth")


def _emit(value: float) -> None:
    print(repr(float(value)))


# ----------------------------------------------------------------- commands

def cmd_unitary(args) -> int:
    _need(args, "m", "seed", "out")
    save_matrix(args.out, haar_unitary(args.m, RngStream(args.seed)))
    return 0


def cmd_prob(args) -> int:
    _need(args, "unitary", "outcome")
    u = load_matrix(args.unitary)
    r = parse_outcome(args.outcome)
    z = to_ordered(r, u.shape[0])
    if args.model == "exact":
        value = exact_prob_general(u, z)
    elif args.model == "noisy":
        x = _gaussian_x(args)
        if not is_collision_free(z):
            raise UsageError("noisy probabilities are defined for collision-free outcomes")
        if args.method == "mc":
            _need(args, "seed")
            value, err = noisy_prob_mc(u, z, x, args.samples, RngStream(args.seed))
            print(f"# stderr {err!r}", file=sys.stderr)
        elif args.l is not None:
            value = noisy_prob_decomposition(u, z, x, args.l)
        elif args.method == "decomposition":
            value = noisy_prob_decomposition(u, z, x)
        else:
            value = noisy_prob_analytic(u, z, x)
    elif args.model == "dist":
        _need(args, "x")
        value = dist_prob_exact(u, z, args.x)
    else:
        _need(args, "n")
        eta = _loss_eta(args)
        # lossy_prob is per unordered outcome; the ordered value carries the orderings
        base = lossy_prob(u, args.n, z, eta) if args.l is None else lossy_truncated(u, args.n, z, eta, args.l)
        value = base * multiplicity(z)
    if args.unordered:
        value /= multiplicity(z)
    _emit(value)
    return 0


def cmd_marginal(args) -> int:
    _need(args, "unitary", "n", "prefix", "l")
    u = load_matrix(args.unitary)
    oracle = MarginalOracle(u, args.n, _gaussian_x(args), args.l, cache=False)
    prefix = parse_outcome(args.prefix)
    if args.raw:
        _emit(oracle.raw(prefix))
    else:
        _emit(oracle.value(prefix))
    return 0


def cmd_sample(args) -> int:
    _need(args, "unitary", "n", "l", "count", "seed")
    u = load_matrix(args.unitary)
    records = sample_many(u, args.n, _gaussian_x(args), args.l, args.count, args.seed,
                          audit=args.audit is not None)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            io.write_samples(fh, records)
    else:
        io.write_samples(sys.stdout, records)
    if args.audit is not None:
        with open(args.audit, "w", encoding="utf-8") as fh:
            io.write_audit(fh, records)
    return 0


def cmd_cutoff(args) -> int:
    _need(args, "n", "eps", "delta")
    x = _gaussian_x(args)
    rule = select_cutoff if args.model == "gaussian" else dist_cutoff
    print(rule(args.n, x, args.eps, args.delta))
    return 0


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        key, text = item.split("=", 1)
        try:
            params[key.replace("-", "_")] = json.loads(text)
        except json.JSONDecodeError:
            params[key.replace("-", "_")] = text
    return params


def cmd_validate(args) -> int:
    params = dict(args.params or {})
    params.update(_parse_params(args.param))
    if args.check == "decay" and "threads" not in params:
        params["threads"] = args.threads
    try:
        report = CHECKS[args.check](**params)
    except TypeError as exc:
        raise UsageError(f"bad parameters for {args.check}: {exc}") from None
    text = json.dumps(report, indent=1, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if report["pass"] else 1


def cmd_bench(args) -> int:
    ns = args.n or list(range(6, 13))
    result = bench_marginal(n_values=ns, l=args.l, batch=args.batch)
    lo, hi = 2.0, 2.0 * args.l + 2.0
    result["slope_window"] = [lo, hi]
    result["pass"] = lo <= result["slope"] <= hi
    text = json.dumps(result, indent=1, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if result["pass"] else 1


# ----------------------------------------------------------------- parser

def _noise_options(p, loss: bool = False):
    p.add_argument("--x", type=float, help="noise parameter x in [0, 1]")
    p.add_argument("--x1", type=float, help="per-layer x1 (with --gamma)")
    p.add_argument("--gamma", type=int, help="depth exponent, x = x1**gamma")
    if loss:
        p.add_argument("--eta", type=float, help="transmission")
        p.add_argument("--eta1", type=float, help="per-layer transmission (with --depth)")
        p.add_argument("--depth", type=int, help="number of lossy layers, eta = eta1**depth")


def build_parser() -> tuple[argparse.ArgumentParser, list]:
    parser = argparse.ArgumentParser(prog="noisybs", description="Noisy boson sampling simulator")
    parser.add_argument("--config", help="JSON file of option defaults")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker cap")
    sub = parser.add_subparsers(dest="command", required=True)
    leaves = []

    p = sub.add_parser("unitary", help="Haar-random unitaries")
    usub = p.add_subparsers(dest="action", required=True)
    g = usub.add_parser("gen", help="draw a Haar unitary and save it as JSON")
    g.add_argument("--m", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_unitary)
    leaves.append(g)

    p = sub.add_parser("prob", help="probability of one outcome")
    p.add_argument("model", choices=["exact", "noisy", "dist", "loss"])
    p.add_argument("--unitary")
    p.add_argument("--outcome", help='mode indices, e.g. "0 2 5"')
    p.add_argument("--n", type=int, help="photon number (loss model)")
    _noise_options(p, loss=True)
    p.add_argument("-l", type=int, dest="l", help="degree cutoff")
    p.add_argument("--unordered", action="store_true", help="per-r value instead of per-z")
    p.add_argument("--method", choices=["analytic", "decomposition", "mc"], default="analytic")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_prob)
    leaves.append(p)

    p = sub.add_parser("marginal", help="truncated marginal of a prefix")
    p.add_argument("--unitary")
    p.add_argument("--n", type=int)
    p.add_argument("--prefix")
    _noise_options(p)
    p.add_argument("-l", type=int, dest="l")
    p.add_argument("--raw", action="store_true", help="raw polynomial value for repeated modes")
    p.set_defaults(func=cmd_marginal)
    leaves.append(p)

    p = sub.add_parser("sample", help="draw samples with the truncated sampler")
    p.add_argument("--unitary")
    p.add_argument("--n", type=int)
    _noise_options(p)
    p.add_argument("-l", type=int, dest="l")
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.add_argument("--audit", help="JSON-lines path for per-step weights")
    p.set_defaults(func=cmd_sample)
    leaves.append(p)

    p = sub.add_parser("cutoff", help="degree cutoff for a target error")
    p.add_argument("--n", type=int)
    _noise_options(p)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--model", choices=["gaussian", "dist"], default="gaussian")
    p.set_defaults(func=cmd_cutoff)
    leaves.append(p)

    p = sub.add_parser("validate", help="run a validation check")
    p.add_argument("check", choices=sorted(CHECKS))
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="check parameter (JSON value)")
    p.add_argument("--out", help="report path")
    p.set_defaults(func=cmd_validate, params=None)
    leaves.append(p)

    p = sub.add_parser("bench", help="timing benchmarks")
    bsub = p.add_subparsers(dest="target", required=True)
    b = bsub.add_parser("marginal", help="marginal evaluation time against N")
    b.add_argument("--n", type=int, nargs="+")
    b.add_argument("-l", type=int, dest="l", default=1)
    b.add_argument("--batch", type=int, default=1024)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    leaves.append(b)
    return parser, leaves


def _load_config(argv) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    with open(known.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = _load_config(argv)
        parser, leaves = build_parser()
        for leaf in leaves:
            leaf.set_defaults(**cfg)
        if "threads" in cfg:
            parser.set_defaults(threads=cfg["threads"])
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, ValueError, IndexError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"noisybs: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
