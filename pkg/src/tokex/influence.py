"""Player-replacement influence metrics.

Deleting observations would break the structure of exchange data (every player
gives exactly one token per round), so a player's influence is measured by
*replacing* them with a random giver and seeing how far the fitted ``rho`` and
``gamma`` trajectories move.  For player ``i`` and replicate ``k``::

    d_k = sum_t |coef_t(observed) - coef_t(observed with i at random, stream k)|

averaged over ``k``.  Each metric is then divided by its mean over players, so
a score of 2 means twice the average influence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import map_chunks
from .core import ValidatedGame, cumulate, cumulative_counts
from .errors import AllFitsDegenerate, UnknownPlayer
from .fit import DEFAULT_TOL, ModelSpec, fit_counts, fit_trajectory
from .infer import DEFAULT_REPLICATES, replay_receivers_for
from .simulate import INFLUENCE_STREAM

METRICS = ("rho", "gamma")
DEFAULT_THRESHOLD = 2.0


@dataclass
class InfluenceScores:
    players: tuple[int, ...]
    d_rho: np.ndarray
    d_gamma: np.ndarray
    std_rho: np.ndarray
    std_gamma: np.ndarray
    flag_rho: np.ndarray
    flag_gamma: np.ndarray
    threshold: float = DEFAULT_THRESHOLD
    n_degenerate: np.ndarray | None = None  # per player: replicate-rounds scored 0

    @classmethod
    def from_distances(cls, players, d_rho, d_gamma, threshold: float = DEFAULT_THRESHOLD,
                       n_degenerate=None) -> "InfluenceScores":
        d_rho = np.asarray(d_rho, dtype=float)
        d_gamma = np.asarray(d_gamma, dtype=float)
        std_rho, std_gamma = standardize(d_rho), standardize(d_gamma)
        return cls(tuple(int(p) for p in players), d_rho, d_gamma, std_rho, std_gamma,
                   std_rho > threshold, std_gamma > threshold, threshold,
                   None if n_degenerate is None else np.asarray(n_degenerate))

    def std(self, metric: str) -> np.ndarray:
        return {"rho": self.std_rho, "gamma": self.std_gamma}[metric]


def standardize(d: np.ndarray) -> np.ndarray:
    """Divide by the mean over players; all-zero input maps to all ones."""
    d = np.asarray(d, dtype=float)
    m = d.mean()
    if m == 0:
        return np.ones_like(d)
    return d / m


def _distance_samples(game: ValidatedGame, player: int, spec: ModelSpec, n_replicates: int,
                      master_seed: int, original, threads: int, tol: float):
    """Per-replicate l1 distances ``(N, 2)`` for rho and gamma, plus the skipped-round count."""
    cfg = game.config
    if isinstance(player, bool) or not 1 <= player <= cfg.n_players:
        raise UnknownPlayer(player)
    source = replay_receivers_for(game, {player}, master_seed, (INFLUENCE_STREAM, player))
    cols = [spec.index(m) for m in METRICS]
    base = original.coefficients[:, cols]  # (T, 2)
    g = cfg.different_group()

    def work(lo, hi):
        Y = cumulate(source(lo, hi), cfg.n_players)
        bf = fit_counts(Y, g, spec, tol)
        skip = bf.degenerate | original.degenerate[None, :]
        diff = np.abs(bf.coef[:, :, cols] - base[None])
        diff[skip] = 0.0
        return diff.sum(axis=1), skip.sum()

    parts = map_chunks(work, n_replicates, threads)
    return np.concatenate([p[0] for p in parts]), int(sum(p[1] for p in parts))


def _check(spec: ModelSpec, n_replicates: int):
    if not all(m in spec.coef_names for m in METRICS):
        raise ValueError(f"influence needs a model with rho and gamma, got {spec.label}")
    if n_replicates < 1:
        raise ValueError("n_replicates must be at least 1")


def _original(game: ValidatedGame, spec: ModelSpec, tol: float):
    traj = fit_trajectory(cumulative_counts(game), spec, tol)
    if traj.degenerate.all():
        raise AllFitsDegenerate("the observed game is degenerate at every round")
    return traj


def influence_for_player(game: ValidatedGame, player: int, spec: ModelSpec = ModelSpec.ADDITIVE,
                         n_replicates: int = DEFAULT_REPLICATES, master_seed: int = 0,
                         threads: int = 1, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Raw ``(d_rho, d_gamma)`` for one player."""
    _check(spec, n_replicates)
    original = _original(game, spec, tol)
    dist, _ = _distance_samples(game, player, spec, n_replicates, master_seed, original,
                                threads, tol)
    d_rho, d_gamma = dist.mean(axis=0)
    return float(d_rho), float(d_gamma)


def influence_table(game: ValidatedGame, spec: ModelSpec = ModelSpec.ADDITIVE,
                    n_replicates: int = DEFAULT_REPLICATES, master_seed: int = 0,
                    threshold: float = DEFAULT_THRESHOLD, threads: int = 1,
                    tol: float = DEFAULT_TOL) -> InfluenceScores:
    _check(spec, n_replicates)
    original = _original(game, spec, tol)
    players = tuple(game.config.players)
    d = np.empty((len(players), 2))
    skipped = np.empty(len(players), dtype=np.int64)
    for row, p in enumerate(players):
        dist, skipped[row] = _distance_samples(game, p, spec, n_replicates, master_seed,
                                               original, threads, tol)
        d[row] = dist.mean(axis=0)
    return InfluenceScores.from_distances(players, d[:, 0], d[:, 1], threshold, skipped)


def flag_influential(scores: InfluenceScores, threshold: float = DEFAULT_THRESHOLD) -> list[tuple[int, str]]:
    """``(player, metric)`` pairs whose standardized score exceeds ``threshold``."""
    out = []
    for row, p in enumerate(scores.players):
        for m in METRICS:
            if scores.std(m)[row] > threshold:
                out.append((p, m))
    return out
