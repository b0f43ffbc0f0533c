"""Null distributions of fitted coefficients, empirical p-values and bands.

Replicate ``k`` of every procedure here is a pure function of
``(master_seed, k)``; replicates are fitted in fixed-size index chunks and
aggregated in index order, so results do not depend on the worker count.
Degenerate fits are dropped from the samples and counted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._parallel import map_chunks
from .core import GameConfig, ValidatedGame, check_round, cumulate
from .errors import AllFitsDegenerate, UnknownCoefficient
from .fit import DEFAULT_TOL, ModelSpec, fit_counts
from .simulate import SeedSpec, draw_receivers, replaced_mask

DEFAULT_REPLICATES = 10_000
MIN_REPLICATES = 100


@dataclass
class NullDistribution:
    spec: ModelSpec
    round: int
    samples: dict[str, np.ndarray]
    n_requested: int
    n_excluded: int
    master_seed: int

    @property
    def n_usable(self) -> int:
        return self.n_requested - self.n_excluded

    def __getitem__(self, coef: str) -> np.ndarray:
        try:
            return self.samples[coef]
        except KeyError:
            raise UnknownCoefficient(coef) from None


@dataclass
class BandTrajectory:
    spec: ModelSpec
    lo: dict[str, np.ndarray]
    mean: dict[str, np.ndarray]
    hi: dict[str, np.ndarray]
    n_excluded: np.ndarray  # per round
    n_requested: int
    master_seed: int

    @property
    def rounds(self) -> np.ndarray:
        return np.arange(1, len(self.n_excluded) + 1)

    def half_width(self, coef: str) -> np.ndarray:
        return (self.hi[coef] - self.lo[coef]) / 2


def _fit_replicates(receivers_for, n_players: int, g: np.ndarray, specs: Sequence[ModelSpec],
                    rounds: Sequence[int], n_replicates: int, threads: int, tol: float):
    """Fit every spec at every requested round for replicates ``0..N-1``.

    ``receivers_for(lo, hi)`` returns stacked ``(hi - lo, T, n)`` receiver
    matrices.  Returns ``{spec: (coef[N, R, p], degenerate[N, R])}``.
    """
    idx = np.asarray(rounds, dtype=int) - 1

    def work(lo, hi):
        Y = cumulate(receivers_for(lo, hi), n_players)[:, idx]
        out = {}
        for spec in specs:
            bf = fit_counts(Y, g, spec, tol)
            out[spec] = (bf.coef, bf.degenerate)
        return out

    parts = map_chunks(work, n_replicates, threads)
    return {
        spec: (np.concatenate([p[spec][0] for p in parts]),
               np.concatenate([p[spec][1] for p in parts]))
        for spec in specs
    }


def null_receivers(config: GameConfig, master_seed: int, exclude_self: bool = False):
    def receivers_for(lo, hi):
        return np.stack([draw_receivers(config.n_players, config.n_rounds,
                                        SeedSpec(master_seed, k), exclude_self)
                         for k in range(lo, hi)])
    return receivers_for


def replay_receivers_for(game: ValidatedGame, replaced, master_seed: int,
                         stream: tuple[int, ...] = ()):
    """Chunk source for semi-simulated replays of ``game`` with ``replaced`` at random."""
    cfg = game.config
    mask = replaced_mask(cfg.n_players, replaced)

    def receivers_for(lo, hi):
        out = np.repeat(game.receivers[None], hi - lo, axis=0)
        if mask.any():
            for row, k in enumerate(range(lo, hi)):
                draw = draw_receivers(cfg.n_players, cfg.n_rounds, SeedSpec(master_seed, k, stream))
                out[row][:, mask] = draw[:, mask]
        return out
    return receivers_for


def null_coefficients(config: GameConfig, specs: Sequence[ModelSpec], rounds: Sequence[int],
                      n_replicates: int, master_seed: int, threads: int = 1,
                      tol: float = DEFAULT_TOL):
    """Raw null coefficient draws; one simulated game per replicate serves all rounds and specs."""
    for t in rounds:
        check_round(t, config.n_rounds)
    return _fit_replicates(null_receivers(config, master_seed), config.n_players,
                           config.different_group(), specs, rounds, n_replicates, threads, tol)


def distribution_from_draws(spec: ModelSpec, t: int, coef: np.ndarray, degenerate: np.ndarray,
                            n_requested: int, master_seed: int) -> NullDistribution:
    keep = ~degenerate
    if not keep.any():
        raise AllFitsDegenerate(f"all {n_requested} replicate fits at round {t} are degenerate")
    samples = {name: coef[keep, k] for k, name in enumerate(spec.coef_names)}
    return NullDistribution(spec, t, samples, n_requested, int(degenerate.sum()), master_seed)


def null_distribution(config: GameConfig, spec: ModelSpec, t: int,
                      n_replicates: int = DEFAULT_REPLICATES, master_seed: int = 0,
                      threads: int = 1, tol: float = DEFAULT_TOL) -> NullDistribution:
    if n_replicates < MIN_REPLICATES:
        raise ValueError(f"need at least {MIN_REPLICATES} replicates, got {n_replicates}")
    coef, degenerate = null_coefficients(config, [spec], [t], n_replicates, master_seed,
                                         threads, tol)[spec]
    return distribution_from_draws(spec, t, coef[:, 0], degenerate[:, 0], n_replicates, master_seed)


def empirical_p(observed: float, dist: NullDistribution, coef: str) -> float:
    """Two-sided add-one empirical p-value of ``observed`` against the null draws."""
    samples = dist[coef]
    M = len(samples)
    below = np.count_nonzero(samples <= observed)
    above = np.count_nonzero(samples >= observed)
    return min(1.0, 2 * min((1 + below) / (M + 1), (1 + above) / (M + 1)))


def percentile_bounds(samples: np.ndarray, q: float = 0.025) -> tuple[float, float]:
    # Linear interpolation between order statistics at 1-based position (M - 1) q + 1.
    lo, hi = np.quantile(samples, [q, 1 - q], method="linear")
    return float(lo), float(hi)


def bounds95(dist: NullDistribution, coef: str) -> tuple[float, float]:
    return percentile_bounds(dist[coef])


def format_p(p: float, floor: float = 0.001) -> str:
    return f"<{floor:g}" if p < floor else f"{p:.3f}"


def bands_from_draws(spec: ModelSpec, coef: np.ndarray, degenerate: np.ndarray,
                     n_requested: int, master_seed: int) -> BandTrajectory:
    """Per-round 2.5%/97.5% bands and null means from ``coef[N, T, p]`` draws."""
    T = coef.shape[1]
    lo = {c: np.full(T, np.nan) for c in spec.coef_names}
    hi = {c: np.full(T, np.nan) for c in spec.coef_names}
    mean = {c: np.full(T, np.nan) for c in spec.coef_names}
    for t in range(T):
        keep = ~degenerate[:, t]
        if not keep.any():
            raise AllFitsDegenerate(f"all {n_requested} replicate fits at round {t + 1} are degenerate")
        for k, c in enumerate(spec.coef_names):
            s = coef[keep, t, k]
            lo[c][t], hi[c][t] = percentile_bounds(s)
            mean[c][t] = s.mean()
    return BandTrajectory(spec, lo, mean, hi, degenerate.sum(axis=0), n_requested, master_seed)


def null_bands(config: GameConfig, spec: ModelSpec, n_replicates: int = DEFAULT_REPLICATES,
               master_seed: int = 0, threads: int = 1, tol: float = DEFAULT_TOL) -> BandTrajectory:
    rounds = range(1, config.n_rounds + 1)
    coef, degenerate = null_coefficients(config, [spec], rounds, n_replicates, master_seed,
                                         threads, tol)[spec]
    return bands_from_draws(spec, coef, degenerate, n_replicates, master_seed)


def replay_bands(game: ValidatedGame, replaced, spec: ModelSpec,
                 n_replicates: int = DEFAULT_REPLICATES, master_seed: int = 0,
                 threads: int = 1, tol: float = DEFAULT_TOL) -> BandTrajectory:
    """Bands of the coefficient trajectory over semi-simulated replays.

    Replicate ``k`` replays ``game`` with the ``replaced`` players giving at
    random from ``SeedSpec(master_seed, k)``.
    """
    cfg = game.config
    rounds = range(1, cfg.n_rounds + 1)
    coef, degenerate = _fit_replicates(replay_receivers_for(game, replaced, master_seed),
                                       cfg.n_players, cfg.different_group(), [spec], rounds,
                                       n_replicates, threads, tol)[spec]
    return bands_from_draws(spec, coef, degenerate, n_replicates, master_seed)
