"""Command-line interface.

Exit status: 0 on success, 2 when a config or log fails validation, 1 for any
other error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import __version__
from .core import cumulative_counts, validate_log
from .errors import TokexError, ValidationError
from .fit import ModelSpec, fit_at_round, fit_trajectory
from .infer import DEFAULT_REPLICATES, null_bands, null_distribution, replay_bands
from .influence import DEFAULT_THRESHOLD, InfluenceScores, influence_table
from .io import config_hash, fmt, read_config, read_log, write_csv, write_json, write_log
from .netexport import build_graph, export, layout_fr
from .report import (
    BAND_HEADER,
    CORRELATION_HEADER,
    INFLUENCE_HEADER,
    PROPORTION_HEADER,
    RESIDUAL_HEADER,
    SCATTER_HEADER,
    TEST_HEADER,
    TRAJECTORY_HEADER,
    ReportOptions,
    band_rows,
    correlation_rows,
    fit_rows,
    influence_rows,
    proportion_rows,
    report,
    residual_rounds,
    residual_rows,
    scatter_rows,
    test_rows,
    trajectory_rows,
)
from .simulate import generate_replicates


def _players(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated player ids, got {text!r}")


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="game config JSON")
    p.add_argument("--seed", type=_seed, default=0, help="master seed (default 0)")
    p.add_argument("--replicates", type=int, default=DEFAULT_REPLICATES,
                   help=f"simulated replicates (default {DEFAULT_REPLICATES})")
    p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    p.add_argument("--out", help="output file or directory (default stdout for tables)")
    return p


def _model(p):
    p.add_argument("--model", type=ModelSpec.from_name, default=ModelSpec.ADDITIVE,
                   help="reciprocity | group | additive | interaction (default additive)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tokex", description="Analyse round-based token-exchange games.")
    parser.add_argument("--version", action="version", version=f"tokex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _global_flags()

    p = sub.add_parser("validate", parents=[common], help="check a log against its config")
    p.add_argument("--log", type=Path, required=True)

    p = sub.add_parser("simulate", parents=[common], help="write null-model game logs")
    p.add_argument("--exclude-self", action="store_true",
                   help="draw receivers uniformly from the other players only")

    p = sub.add_parser("fit", parents=[common], help="fit a model at one round or all rounds")
    p.add_argument("--log", type=Path, required=True)
    _model(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--round", type=int)
    g.add_argument("--trajectory", action="store_true")

    p = sub.add_parser("null-dist", parents=[common], help="null coefficient samples at one round")
    _model(p)
    p.add_argument("--round", type=int)

    p = sub.add_parser("test", parents=[common], help="empirical p-values and 95%% bounds")
    p.add_argument("--log", type=Path, required=True)
    _model(p)
    p.add_argument("--round", type=int)

    p = sub.add_parser("bands", parents=[common], help="per-round null bands")
    _model(p)
    p.add_argument("--log", type=Path, help="observed game (required with --replace)")
    p.add_argument("--replace", type=_players,
                   help="comma-separated players to replace with random givers in replays of --log")

    p = sub.add_parser("influence", parents=[common], help="player-replacement influence scores")
    p.add_argument("--log", type=Path, required=True)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)

    p = sub.add_parser("explore", parents=[common], help="exploratory CSV exports")
    p.add_argument("--log", type=Path, required=True)
    _model(p)

    p = sub.add_parser("graph", parents=[common], help="export the exchange network")
    p.add_argument("--log", type=Path, required=True)
    p.add_argument("--influence", type=Path, help="influence CSV for node sizes")
    p.add_argument("--format", choices=["graphml", "dot"], default="graphml")
    p.add_argument("--iterations", type=int, default=50, help="layout iterations; 0 skips layout")

    p = sub.add_parser("report", parents=[common], help="run the whole pipeline")
    p.add_argument("--log", type=Path, required=True)
    p.add_argument("--influence-replicates", type=int)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    return parser


def _table(args, header, rows):
    if args.out in (None, "-"):
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    else:
        write_csv(args.out, header, rows)


def _outdir(args) -> Path:
    if not args.out:
        raise TokexError("--out directory is required")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args, need_log=True):
    if args.config is None:
        raise TokexError("--config is required")
    config = read_config(args.config)
    if not need_log:
        return config, None
    return config, validate_log(config, read_log(args.log))


def _read_influence(path) -> InfluenceScores:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return InfluenceScores.from_distances([int(r["player"]) for r in rows],
                                          [float(r["d_rho"]) for r in rows],
                                          [float(r["d_gamma"]) for r in rows])


def run(args) -> int:
    cmd = args.command
    if cmd == "validate":
        config, game = _load(args)
        print(f"ok: {config.n_players} players, {config.n_rounds} rounds, {len(game.log)} records")
    elif cmd == "simulate":
        config, _ = _load(args, need_log=False)
        out = _outdir(args)
        stream = generate_replicates(config, args.replicates, args.seed, args.exclude_self)
        width = len(str(len(stream) - 1))
        files = []
        for k, log in enumerate(stream):
            name = f"replicate_{k:0{width}d}.csv"
            write_log(log, out / name)
            files.append(name)
        write_json(out / "manifest.json", {
            "master_seed": args.seed, "indices": [0, len(stream)], "files": files,
            "exclude_self": args.exclude_self, "config_hash": config_hash(config),
            "version": __version__,
        })
    elif cmd == "fit":
        config, game = _load(args)
        counts = cumulative_counts(game)
        if args.round is not None:
            _table(args, TRAJECTORY_HEADER, fit_rows(fit_at_round(counts, args.model, args.round), args.round))
        else:
            _table(args, TRAJECTORY_HEADER, trajectory_rows(fit_trajectory(counts, args.model)))
    elif cmd == "null-dist":
        config, _ = _load(args, need_log=False)
        t = args.round or config.n_rounds
        dist = null_distribution(config, args.model, t, args.replicates, args.seed, args.threads)
        rows = ([name, k, v] for name in args.model.coef_names for k, v in enumerate(dist[name]))
        if dist.n_excluded:
            print(f"excluded {dist.n_excluded} degenerate replicate fits", file=sys.stderr)
        _table(args, ["coef", "replicate", "value"], rows)
    elif cmd == "test":
        config, game = _load(args)
        t = args.round or config.n_rounds
        dist = null_distribution(config, args.model, t, args.replicates, args.seed, args.threads)
        observed = fit_at_round(cumulative_counts(game), args.model, t)
        _table(args, TEST_HEADER, list(test_rows(observed, dist)))
    elif cmd == "bands":
        if args.replace:
            if args.log is None:
                raise TokexError("--replace needs --log")
            config, game = _load(args)
            bands = replay_bands(game, args.replace, args.model, args.replicates, args.seed, args.threads)
        else:
            config, _ = _load(args, need_log=False)
            bands = null_bands(config, args.model, args.replicates, args.seed, args.threads)
        _table(args, BAND_HEADER, band_rows(bands))
    elif cmd == "influence":
        config, game = _load(args)
        scores = influence_table(game, ModelSpec.ADDITIVE, args.replicates, args.seed,
                                 args.threshold, args.threads)
        _table(args, INFLUENCE_HEADER, influence_rows(scores))
    elif cmd == "explore":
        config, game = _load(args)
        counts = cumulative_counts(game)
        out = _outdir(args)
        write_csv(out / "proportions.csv", PROPORTION_HEADER, proportion_rows(counts))
        write_csv(out / "correlations.csv", CORRELATION_HEADER, correlation_rows(counts))
        write_csv(out / "scatter.csv", SCATTER_HEADER, scatter_rows(counts))
        for t in residual_rounds(config.n_rounds):
            write_csv(out / f"residuals_t{t}.csv", RESIDUAL_HEADER, residual_rows(counts, args.model, t))
    elif cmd == "graph":
        config, game = _load(args)
        scores = _read_influence(args.influence) if args.influence else None
        graph = build_graph(cumulative_counts(game), scores)
        if args.iterations > 0:
            graph = layout_fr(graph, args.iterations, seed=args.seed % (1 << 32))
        if not args.out:
            raise TokexError("--out file is required")
        export(graph, args.format, args.out)
    elif cmd == "report":
        config = read_config(args.config) if args.config else None
        if config is None:
            raise TokexError("--config is required")
        opts = ReportOptions(master_seed=args.seed, replicates=args.replicates,
                             influence_replicates=args.influence_replicates,
                             threads=args.threads, threshold=args.threshold)
        bundle = report(config, read_log(args.log), opts, _outdir(args))
        for name in sorted(bundle.files):
            print(bundle.files[name])
        print(bundle.manifest)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except (TokexError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
