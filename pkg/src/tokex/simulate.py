"""Null-model ("give at random") games and semi-simulated replays.

Seeding
-------
Every random stream is a PCG64 generator seeded with
``numpy.random.SeedSequence(entropy=master_seed, spawn_key=(*stream, index))``.
One stream yields one game: a single ``integers(1, n + 1, size=(T, n))`` draw,
read as ``draw[r - 1, p - 1]`` = receiver of giver ``p`` in round ``r``.  For
the exclude-self variant the draw is ``integers(1, n, size=(T, n))`` and values
at or above the giver id are shifted up by one.  Replays take the same full draw
and use only the replaced givers' columns, so a replay and a fresh null game
from the same seed agree on those columns.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .core import AllocationLog, GameConfig, ValidatedGame
from .errors import UnknownPlayer

# Stream prefixes keep substreams of different procedures disjoint.
INFLUENCE_STREAM = 1

_U64 = 1 << 64


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    replicate_index: int
    stream: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < _U64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if int(self.replicate_index) < 0:
            raise ValueError("replicate_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.master_seed),
                                    spawn_key=(*map(int, self.stream), int(self.replicate_index)))
        return np.random.Generator(np.random.PCG64(ss))


def draw_receivers(n_players: int, n_rounds: int, seed: SeedSpec,
                   exclude_self: bool = False) -> np.ndarray:
    """The ``(T, n)`` matrix of uniformly drawn receiver ids for one stream."""
    rng = seed.generator()
    if not exclude_self:
        return rng.integers(1, n_players + 1, size=(n_rounds, n_players))
    if n_players < 2:
        raise ValueError("exclude_self needs at least two players")
    draw = rng.integers(1, n_players, size=(n_rounds, n_players))
    givers = np.arange(1, n_players + 1)
    return draw + (draw >= givers)


def simulate_null_game(config: GameConfig, seed: SeedSpec, exclude_self: bool = False) -> AllocationLog:
    """One game in which every player gives to a uniformly random player each round."""
    return AllocationLog.from_receivers(
        draw_receivers(config.n_players, config.n_rounds, seed, exclude_self))


def replaced_mask(n_players: int, replaced) -> np.ndarray:
    mask = np.zeros(n_players, dtype=bool)
    for p in replaced:
        if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or not 1 <= p <= n_players:
            raise UnknownPlayer(p)
        mask[p - 1] = True
    return mask


def replay_receivers(game: ValidatedGame, replaced, seed: SeedSpec,
                     exclude_self: bool = False) -> np.ndarray:
    cfg = game.config
    mask = replaced_mask(cfg.n_players, replaced)
    out = np.array(game.receivers)
    if mask.any():
        draw = draw_receivers(cfg.n_players, cfg.n_rounds, seed, exclude_self)
        out[:, mask] = draw[:, mask]
    return out


def replay_with_null_players(game: ValidatedGame, replaced, seed: SeedSpec,
                             exclude_self: bool = False) -> AllocationLog:
    """Replay an observed game with the ``replaced`` players giving at random.

    Everyone else's records are copied verbatim (open loop: they do not react
    to the altered history).
    """
    return AllocationLog.from_receivers(replay_receivers(game, replaced, seed, exclude_self))


class ReplicateStream(Sequence):
    """Lazily generated null replicates; item ``k`` depends only on ``k``."""

    def __init__(self, config: GameConfig, n_replicates: int, master_seed: int,
                 exclude_self: bool = False):
        if n_replicates < 1:
            raise ValueError("n_replicates must be at least 1")
        self.config = config
        self.n_replicates = int(n_replicates)
        self.master_seed = int(master_seed)
        self.exclude_self = exclude_self

    def __len__(self) -> int:
        return self.n_replicates

    def seed(self, k: int) -> SeedSpec:
        return SeedSpec(self.master_seed, k)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        if k < 0:
            k += len(self)
        if not 0 <= k < len(self):
            raise IndexError(k)
        return simulate_null_game(self.config, self.seed(k), self.exclude_self)

    def receivers(self, lo: int, hi: int) -> np.ndarray:
        """Stacked ``(hi - lo, T, n)`` receiver matrices for replicates ``lo..hi-1``."""
        cfg = self.config
        return np.stack([draw_receivers(cfg.n_players, cfg.n_rounds, self.seed(k), self.exclude_self)
                         for k in range(lo, hi)])


def generate_replicates(config: GameConfig, n_replicates: int, master_seed: int,
                        exclude_self: bool = False) -> ReplicateStream:
    return ReplicateStream(config, n_replicates, master_seed, exclude_self)
