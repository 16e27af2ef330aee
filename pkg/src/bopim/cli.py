"""Command-line driver: ``bopim {optimize,greedy,random,validate,uq,simulate}``.

Exit codes: 0 success, 1 input or I/O error, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .baselines import greedy_celf, random_baseline
from .diffusion import estimate_spread
from .errors import ConfigError, InputError
from .manifest import baseline_manifest, bopim_manifest, write_manifest
from .metrics_uq import VALIDATION_HEADER, posterior_box_stats, topk_inclusion_proportions, validate_surrogate
from .optimizer import BopimConfig, run_bopim
from .shrinkage_gibbs import PRIORS, GibbsConfig
from .temporal_graph import DEFAULT_COLUMNS, load_graph

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("bopim")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="TOML file of flag defaults; flags override it")
    p.add_argument("--graph", type=Path, required=True, help="contact list, one 'u v t' per line")
    p.add_argument("--columns", default=DEFAULT_COLUMNS, help="column order, e.g. 't u v'")
    p.add_argument("--snapshots", "-T", type=int, default=10, help="number of equal-duration snapshots")
    p.add_argument("--k", type=int, required=True, help="seed set size")
    p.add_argument("--lambda", dest="lam", type=float, required=True, help="infection probability")
    p.add_argument("--sims", type=int, default=1000, help="Monte Carlo replicates per evaluation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1, help="worker threads for Monte Carlo replicates")


def _bopim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--prior", choices=PRIORS, default="hs")
    p.add_argument("--n0", type=int, default=20, help="initial degree-proportional samples")
    p.add_argument("--b", type=int, default=5, help="acquisition rounds")
    p.add_argument("--iter", type=int, default=6000, help="Gibbs sweeps per fit")
    p.add_argument("--burn", type=int, default=1000, help="burn-in sweeps per fit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bopim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run BOPIM and write a run manifest")
    _common(p)
    _bopim_flags(p)
    p.add_argument("--out", type=Path, required=True, help="manifest JSON path")

    for name, help_ in (("greedy", "greedy seed selection with CELF"), ("random", "random seed set baseline")):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.add_argument("--out", type=Path, required=True, help="manifest JSON path")

    p = sub.add_parser("validate", help="out-of-sample surrogate validation (CSV)")
    _common(p)
    _bopim_flags(p)
    p.add_argument("--ntest", type=int, default=100, help="held-out seed sets")
    p.add_argument("--sampling", choices=("random", "degree", "both"), default="degree")
    p.add_argument("--out", type=Path, help="CSV path (default: stdout)")

    p = sub.add_parser("uq", help="posterior box statistics and top-k inclusion proportions (CSV)")
    _common(p)
    _bopim_flags(p)
    p.add_argument("--out", type=Path, required=True, help="per-node summary CSV path")
    p.add_argument("--draws-out", type=Path, help="optional raw posterior draw CSV")

    p = sub.add_parser("simulate", help="Monte Carlo spread of a given seed set (JSON to stdout)")
    p.add_argument("--config", type=Path)
    p.add_argument("--graph", type=Path, required=True)
    p.add_argument("--columns", default=DEFAULT_COLUMNS)
    p.add_argument("--snapshots", "-T", type=int, default=10)
    p.add_argument("--seeds", required=True, help="comma-separated node ids as they appear in the file")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--sims", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    """Parse ``argv``; keys of an optional ``--config`` TOML file become flag defaults."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    subparsers = parser._subparsers._group_actions[0].choices
    command = next((a for a in argv if a in subparsers), None)
    if known.config is None or command is None:
        return parser.parse_args(argv)
    with open(known.config, "rb") as fh:
        values = tomllib.load(fh)
    sub = subparsers[command]
    dests = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in values.items():
        dest = key.replace("-", "_")
        dest = "lam" if dest == "lambda" else dest
        if dest not in dests or dest in ("config", "help"):
            raise ConfigError(f"unknown config key {key!r} for {command}")
        defaults[dest] = value
    for action in sub._actions:
        if action.dest in defaults:
            action.required = False
            if action.type is not None and isinstance(defaults[action.dest], str):
                defaults[action.dest] = action.type(defaults[action.dest])
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _gibbs_config(args) -> GibbsConfig:
    return GibbsConfig(n_iter=args.iter, n_burn=args.burn, prior=args.prior)


def _bopim_config(args) -> BopimConfig:
    return BopimConfig(
        k=args.k, lam=args.lam, N0=args.n0, B=args.b, n_sims=args.sims, gibbs=_gibbs_config(args), seed=args.seed
    )


def _base_config(args) -> dict:
    return {
        "k": args.k,
        "lambda": args.lam,
        "sims": args.sims,
        "seed": args.seed,
        "snapshots": args.snapshots,
        "columns": args.columns,
    }


def _bopim_config_dict(args) -> dict:
    cfg = _base_config(args)
    cfg.update({"prior": args.prior, "n0": args.n0, "b": args.b, "iter": args.iter, "burn": args.burn})
    return cfg


def _load(args):
    G, labels = load_graph(args.graph, args.snapshots, columns=args.columns)
    log.info("loaded %s: n=%d T=%d m=%d", args.graph, G.n, G.T, G.m)
    return G, labels


def cmd_optimize(args) -> int:
    G, labels = _load(args)
    result = run_bopim(G, _bopim_config(args), threads=args.threads)
    manifest = bopim_manifest(result, G, labels, args.graph.stem, _bopim_config_dict(args))
    write_manifest(manifest, args.out)
    b = manifest["best"]
    print(f"bopim: seeds={b['seeds']} spread={b['spread_mean']:.3f} (se {b['spread_se']:.3f}) evals={manifest['eval_count']}")
    return 0


def cmd_greedy(args) -> int:
    G, labels = _load(args)
    result = greedy_celf(G, args.k, args.lam, n_sims=args.sims, seed=args.seed, threads=args.threads)
    manifest = baseline_manifest("greedy", result, G, labels, args.graph.stem, _base_config(args))
    write_manifest(manifest, args.out)
    b = manifest["best"]
    print(f"greedy: seeds={b['seeds']} spread={b['spread_mean']:.3f} (se {b['spread_se']:.3f}) evals={manifest['eval_count']}")
    return 0


def cmd_random(args) -> int:
    G, labels = _load(args)
    result = random_baseline(G, args.k, args.lam, n_sims=args.sims, seed=args.seed, threads=args.threads)
    manifest = baseline_manifest("random", result, G, labels, args.graph.stem, _base_config(args))
    write_manifest(manifest, args.out)
    b = manifest["best"]
    print(f"random: seeds={b['seeds']} spread={b['spread_mean']:.3f} (se {b['spread_se']:.3f})")
    return 0


def cmd_validate(args) -> int:
    if args.ntest < 1:
        raise ConfigError("--ntest must be >= 1")
    G, _ = _load(args)
    cfg = _bopim_config(args)
    result = run_bopim(G, cfg, threads=args.threads)
    schemes = ("degree", "random") if args.sampling == "both" else (args.sampling,)
    rows = [
        validate_surrogate(G, cfg, args.ntest, s, seed=args.seed, threads=args.threads, result=result).row(args.graph.stem)
        for s in schemes
    ]
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(VALIDATION_HEADER)
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return 0


def cmd_uq(args) -> int:
    G, labels = _load(args)
    result = run_bopim(G, _bopim_config(args), threads=args.threads)
    box = posterior_box_stats(result.draws)
    props = topk_inclusion_proportions(result.draws, args.k)
    if not np.isclose(props.sum(), args.k, rtol=0, atol=1e-9):
        raise RuntimeError(f"inclusion proportions sum to {props.sum()}, expected {args.k}")
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "min", "q1", "median", "q3", "max", "topk_proportion"])
        for j, (stats, p) in enumerate(zip(box.as_rows(), props)):
            w.writerow([int(labels[j])] + [repr(float(v)) for v in stats] + [repr(float(p))])
    if args.draws_out:
        result.draws.to_csv(args.draws_out)
    print(f"uq: wrote {G.n} node summaries to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    G, labels = _load(args)
    index = {int(lab): j for j, lab in enumerate(labels)}
    try:
        wanted = [int(s) for s in args.seeds.split(",") if s.strip()]
        nodes = [index[s] for s in wanted]
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad --seeds: {exc}") from None
    est = estimate_spread(G, nodes, args.lam, args.sims, seed=args.seed, threads=args.threads)
    print(json.dumps({"seeds": sorted(wanted), "mean": est.mean, "std_err": est.std_err, "n_sims": est.n_sims}))
    return 0


COMMANDS = {
    "optimize": cmd_optimize,
    "greedy": cmd_greedy,
    "random": cmd_random,
    "validate": cmd_validate,
    "uq": cmd_uq,
    "simulate": cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"bopim: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (InputError, OSError, tomllib.TOMLDecodeError) as exc:
        print(f"bopim: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
