"""Table builders shared by the CLI, and the one-shot ``report`` pipeline."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import networkx
import numpy as np

from . import __version__
from .core import (
    AllocationLog,
    CumulativeCounts,
    GameConfig,
    cumulative_counts,
    pair_index,
    validate_log,
)
from .errors import TokexError
from .explore import (
    proportions_by_round,
    reciprocity_correlation,
    residual_export,
    scatter_export,
)
from .fit import FitResult, ModelSpec, Trajectory, fit_at_round, fit_trajectory
from .infer import (
    DEFAULT_REPLICATES,
    BandTrajectory,
    NullDistribution,
    bands_from_draws,
    bounds95,
    distribution_from_draws,
    empirical_p,
    null_coefficients,
)
from .influence import DEFAULT_THRESHOLD, InfluenceScores, influence_table
from .io import config_hash, sha256_file, write_csv, write_json
from .netexport import build_graph, export, layout_fr

RESIDUAL_ROUNDS = (10, 25, 40)

TRAJECTORY_HEADER = ["round", "coef_name", "value", "r_squared", "degenerate"]
TEST_HEADER = ["coef", "estimate", "p_value", "lo95", "hi95"]
BAND_HEADER = ["round", "coef", "lo", "mean", "hi"]
INFLUENCE_HEADER = ["player", "d_rho", "d_gamma", "std_rho", "std_gamma", "flag_rho", "flag_gamma"]
PROPORTION_HEADER = ["round", "p_ingroup", "p_outgroup", "p_self"]
CORRELATION_HEADER = ["round", "scope", "include_self", "correlation"]
SCATTER_HEADER = ["i", "j", "y_ij", "y_ji", "g_ij", "s_ij"]
RESIDUAL_HEADER = ["i", "j", "residual"]


def trajectory_rows(traj: Trajectory):
    for t in range(len(traj)):
        for k, name in enumerate(traj.spec.coef_names):
            yield [t + 1, name, traj.coefficients[t, k], traj.r_squared[t], traj.degenerate[t]]


def fit_rows(fit: FitResult, t: int):
    for name, value in fit.coefficients.items():
        yield [t, name, value, fit.r_squared, fit.degenerate]


def test_rows(observed: FitResult, dist: NullDistribution):
    if observed.degenerate:
        raise TokexError(f"observed fit at round {dist.round} is degenerate")
    for name in dist.spec.coef_names:
        est = observed[name]
        lo, hi = bounds95(dist, name)
        yield [name, est, empirical_p(est, dist, name), lo, hi]


def band_rows(bands: BandTrajectory):
    for t in range(len(bands.rounds)):
        for name in bands.spec.coef_names:
            yield [t + 1, name, bands.lo[name][t], bands.mean[name][t], bands.hi[name][t]]


def influence_rows(scores: InfluenceScores):
    for row, p in enumerate(scores.players):
        yield [p, scores.d_rho[row], scores.d_gamma[row], scores.std_rho[row],
               scores.std_gamma[row], scores.flag_rho[row], scores.flag_gamma[row]]


def proportion_rows(counts: CumulativeCounts):
    for sp in proportions_by_round(counts):
        yield list(sp)


def correlation_rows(counts: CumulativeCounts, t: int | None = None):
    """Whole-game (or round-``t``) correlations, with and without self pairs."""
    t = counts.n_rounds if t is None else t
    for scope in ("ingroup", "outgroup"):
        for include_self in (False, True):
            try:
                r = reciprocity_correlation(counts, t, scope, include_self)
            except TokexError:
                r = None
            yield [t, scope, include_self, r]


def scatter_rows(counts: CumulativeCounts, t: int | None = None):
    t = counts.n_rounds if t is None else t
    for pt in scatter_export(counts, t, "all", include_self=True):
        yield list(pt)


def residual_rows(counts: CumulativeCounts, spec: ModelSpec, t: int):
    resid = residual_export(counts, spec, t)
    ii, jj = pair_index(counts.n_players)
    for i, j, r in zip(ii.tolist(), jj.tolist(), resid):
        yield [i + 1, j + 1, r]


def residual_rounds(n_rounds: int) -> list[int]:
    rounds = [t for t in RESIDUAL_ROUNDS if t <= n_rounds]
    return rounds or [n_rounds]


@dataclass
class ReportOptions:
    master_seed: int = 0
    replicates: int = DEFAULT_REPLICATES
    influence_replicates: int | None = None
    threads: int = 1
    threshold: float = DEFAULT_THRESHOLD
    layout_iterations: int = 50
    residual_model: ModelSpec = ModelSpec.ADDITIVE


@dataclass
class ReportBundle:
    out_dir: Path
    files: dict[str, Path] = field(default_factory=dict)
    manifest: Path | None = None


class ReportError(TokexError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"report stage {stage!r} failed: {cause}")


REPORT_FILES = (
    "proportions.csv", "correlations.csv", "scatter.csv", "residuals.csv",
    "trajectory.csv", "test.csv", "bands.csv", "influence.csv", "graph.graphml",
)


def report(config: GameConfig, log: AllocationLog, options: ReportOptions | None = None,
           out_dir=".") -> ReportBundle:
    """Validate, explore, fit all variants, test against the null, score influence
    and export the network; writes nine output files plus ``manifest.json``."""
    opt = options or ReportOptions()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bundle = ReportBundle(out)
    specs = list(ModelSpec)
    T = config.n_rounds

    def put(name, header, rows):
        bundle.files[name] = write_csv(out / name, header, rows)

    stage = "validate"
    try:
        game = validate_log(config, log)
        counts = cumulative_counts(game)

        stage = "explore"
        put("proportions.csv", PROPORTION_HEADER, proportion_rows(counts))
        put("correlations.csv", CORRELATION_HEADER, correlation_rows(counts))
        put("scatter.csv", SCATTER_HEADER, scatter_rows(counts))
        put("residuals.csv", ["round"] + RESIDUAL_HEADER,
            ([t] + row for t in residual_rounds(T)
             for row in residual_rows(counts, opt.residual_model, t)))

        stage = "fit"
        trajectories = {spec: fit_trajectory(counts, spec) for spec in specs}
        put("trajectory.csv", ["model"] + TRAJECTORY_HEADER,
            ([spec.label] + row for spec in specs for row in trajectory_rows(trajectories[spec])))

        stage = "null"
        draws = null_coefficients(config, specs, range(1, T + 1), opt.replicates,
                                  opt.master_seed, opt.threads)
        test, bands = [], []
        for spec in specs:
            coef, degenerate = draws[spec]
            dist = distribution_from_draws(spec, T, coef[:, -1], degenerate[:, -1],
                                           opt.replicates, opt.master_seed)
            test += [[spec.label] + row for row in test_rows(fit_at_round(counts, spec, T), dist)]
            bt = bands_from_draws(spec, coef, degenerate, opt.replicates, opt.master_seed)
            bands += [[spec.label] + row for row in band_rows(bt)]
        put("test.csv", ["model"] + TEST_HEADER, test)
        put("bands.csv", ["model"] + BAND_HEADER, bands)

        stage = "influence"
        scores = influence_table(game, ModelSpec.ADDITIVE,
                                 opt.influence_replicates or opt.replicates,
                                 opt.master_seed, opt.threshold, opt.threads)
        put("influence.csv", INFLUENCE_HEADER, influence_rows(scores))

        stage = "graph"
        graph = layout_fr(build_graph(counts, scores), opt.layout_iterations,
                          seed=opt.master_seed % (1 << 32))
        bundle.files["graph.graphml"] = export(graph, "graphml", out / "graph.graphml")

        stage = "manifest"
        manifest = {
            "tool": "tokex",
            "versions": {"tokex": __version__, "numpy": np.__version__,
                         "networkx": networkx.__version__},
            "master_seed": opt.master_seed,
            "replicates": opt.replicates,
            "influence_replicates": opt.influence_replicates or opt.replicates,
            "threshold": opt.threshold,
            "layout_iterations": opt.layout_iterations,
            "residual_model": opt.residual_model.label,
            "config": config.to_dict(),
            "config_hash": config_hash(config),
            "log_sha256": _log_hash(game.log),
            "files": {name: sha256_file(path) for name, path in sorted(bundle.files.items())},
        }
        bundle.manifest = write_json(out / "manifest.json", manifest)
    except TokexError as exc:
        if isinstance(exc, ReportError) or stage == "validate":
            raise
        raise ReportError(stage, exc) from exc
    except (OSError, ValueError) as exc:
        raise ReportError(stage, exc) from exc
    return bundle


def _log_hash(log: AllocationLog) -> str:
    return hashlib.sha256(np.ascontiguousarray(log.canonical().array).tobytes()).hexdigest()
