"""Game geometry, allocation logs and the cumulative exchange tensor.

Players are identified by 1-based ids.  Internally, a validated game is held as
a ``(n_rounds, n_players)`` matrix of receiver ids, indexed by round and giver,
which is the canonical form of a complete one-token-per-round log.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import (
    ConfigError,
    DuplicateGiver,
    IdOutOfRange,
    MissingGiver,
    RoundGap,
    RoundOrderError,
    RoundOutOfRange,
)


@dataclass(frozen=True)
class GameConfig:
    """Experiment geometry.

    ``groups[p - 1]`` is the group id of player ``p``. Group ids are arbitrary
    integers; sizes may be unequal and there may be more than two groups.
    ``initial_tokens`` is carried for reporting only.
    """

    n_players: int
    n_rounds: int
    groups: tuple[int, ...]
    initial_tokens: tuple[int, ...] = field(default=())

    def __post_init__(self):
        n, T = self.n_players, self.n_rounds
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
            raise ConfigError(f"n_players must be a positive integer, got {n!r}")
        if not isinstance(T, (int, np.integer)) or isinstance(T, bool) or T < 1:
            raise ConfigError(f"n_rounds must be a positive integer, got {T!r}")
        groups = tuple(int(g) for g in self.groups)
        if len(groups) != n:
            raise ConfigError(f"expected {n} group ids, got {len(groups)}")
        tokens = self.initial_tokens
        if isinstance(tokens, (int, np.integer)):
            tokens = (int(tokens),) * n
        tokens = tuple(int(v) for v in tokens) if len(tokens) else (0,) * n
        if len(tokens) != n:
            raise ConfigError(f"expected {n} initial token counts, got {len(tokens)}")
        if any(v < 0 for v in tokens):
            raise ConfigError("initial_tokens must be nonnegative")
        object.__setattr__(self, "n_players", int(n))
        object.__setattr__(self, "n_rounds", int(T))
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "initial_tokens", tokens)

    @classmethod
    def balanced(cls, n_per_group: int = 7, n_groups: int = 2, n_rounds: int = 40,
                 initial_tokens: int = 40) -> "GameConfig":
        """Equal-sized groups, players numbered group by group."""
        groups = tuple(g + 1 for g in range(n_groups) for _ in range(n_per_group))
        return cls(len(groups), n_rounds, groups, initial_tokens)

    @property
    def players(self) -> range:
        return range(1, self.n_players + 1)

    def group_of(self, player: int) -> int:
        if not 1 <= player <= self.n_players:
            raise IndexError(f"player {player} outside 1..{self.n_players}")
        return self.groups[player - 1]

    def different_group(self) -> np.ndarray:
        """The G indicator: 1 where players are in different groups, else 0."""
        g = np.asarray(self.groups)
        return (g[:, None] != g[None, :]).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "n_players": self.n_players,
            "n_rounds": self.n_rounds,
            "initial_tokens": list(self.initial_tokens),
            "groups": list(self.groups),
        }


class Record(NamedTuple):
    round: int
    giver: int
    receiver: int


class AllocationLog:
    """An ordered stream of ``(round, giver, receiver)`` records."""

    __slots__ = ("_records",)

    def __init__(self, records: Iterable[Sequence[int]] | np.ndarray):
        arr = np.asarray(records if isinstance(records, np.ndarray) else list(records),
                         dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 3)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ValueError("records must be (round, giver, receiver) triples")
        arr.setflags(write=False)
        self._records = arr

    @classmethod
    def from_receivers(cls, receivers: np.ndarray) -> "AllocationLog":
        """Build the canonical log from a ``(T, n)`` matrix of receiver ids."""
        receivers = np.asarray(receivers, dtype=np.int64)
        T, n = receivers.shape
        rounds = np.repeat(np.arange(1, T + 1), n)
        givers = np.tile(np.arange(1, n + 1), T)
        return cls(np.column_stack([rounds, givers, receivers.ravel()]))

    @property
    def array(self) -> np.ndarray:
        return self._records

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[Record]:
        for r, g, v in self._records.tolist():
            yield Record(r, g, v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AllocationLog):
            return NotImplemented
        return np.array_equal(self._records, other._records)

    def __repr__(self) -> str:
        return f"AllocationLog({len(self)} records)"

    def canonical(self) -> "AllocationLog":
        """Records sorted by (round, giver); within-round order carries no meaning."""
        order = np.lexsort((self._records[:, 1], self._records[:, 0]))
        return AllocationLog(self._records[order])


@dataclass(frozen=True, eq=False)
class ValidatedGame:
    config: GameConfig
    receivers: np.ndarray  # (T, n), receivers[r - 1, p - 1] = receiver of p in round r

    def __post_init__(self):
        self.receivers.setflags(write=False)

    @property
    def log(self) -> AllocationLog:
        return AllocationLog.from_receivers(self.receivers)


def validate_log(config: GameConfig, log: AllocationLog | Iterable[Sequence[int]]) -> ValidatedGame:
    """Check a log against the one-token-per-player-per-round contract."""
    if not isinstance(log, AllocationLog):
        log = AllocationLog(log)
    recs = log.array
    n, T = config.n_players, config.n_rounds

    bad = ((recs[:, 0] < 1) | (recs[:, 0] > T)
           | (recs[:, 1] < 1) | (recs[:, 1] > n)
           | (recs[:, 2] < 1) | (recs[:, 2] > n))
    if bad.any():
        raise IdOutOfRange(tuple(recs[np.argmax(bad)]))

    step = np.diff(recs[:, 0])
    if (step < 0).any():
        raise RoundOrderError(int(np.argmax(step < 0)) + 1)

    present = np.zeros(T + 1, dtype=bool)
    present[recs[:, 0]] = True
    if not present[1:].all():
        raise RoundGap(int(np.argmin(present[1:])) + 1)

    receivers = np.zeros((T, n), dtype=np.int64)
    seen = np.zeros((T, n), dtype=np.int64)
    np.add.at(seen, (recs[:, 0] - 1, recs[:, 1] - 1), 1)
    if (seen > 1).any():
        r, p = np.argwhere(seen > 1)[0]
        raise DuplicateGiver(int(r) + 1, int(p) + 1)
    if (seen == 0).any():
        r, p = np.argwhere(seen == 0)[0]
        raise MissingGiver(int(r) + 1, int(p) + 1)
    receivers[recs[:, 0] - 1, recs[:, 1] - 1] = recs[:, 2]
    return ValidatedGame(config, receivers)


def cumulate(receivers: np.ndarray, n_players: int) -> np.ndarray:
    """Round-major cumulative counts from receiver matrices.

    ``receivers`` has shape ``(..., T, n)`` holding 1-based receiver ids per
    (round, giver).  The result has shape ``(..., T, n, n)`` where
    ``out[..., t, i, j]`` counts tokens player ``i + 1`` received from player
    ``j + 1`` in rounds ``1..t + 1``.
    """
    receivers = np.asarray(receivers)
    *lead, T, n = receivers.shape
    if n != n_players:
        raise ValueError(f"receiver matrix has {n} givers, expected {n_players}")
    flat = receivers.reshape(-1, T, n) - 1
    B = flat.shape[0]
    inc = np.zeros((B, T, n, n), dtype=np.int64)
    b = np.arange(B)[:, None, None]
    t = np.arange(T)[None, :, None]
    j = np.arange(n)[None, None, :]
    inc[b, t, flat, j] = 1
    np.cumsum(inc, axis=1, out=inc)
    return inc.reshape(*lead, T, n, n)


@dataclass(frozen=True, eq=False)
class CumulativeCounts:
    """The tensor of cumulative token counts plus the pair indicators.

    ``by_round[t - 1, i - 1, j - 1]`` is the number of tokens player ``i``
    received from player ``j`` up to and including round ``t``. ``y`` exposes
    the same data indexed ``(i, j, t)``.
    """

    by_round: np.ndarray
    g: np.ndarray
    s: np.ndarray
    groups: tuple[int, ...] = ()

    @property
    def y(self) -> np.ndarray:
        return np.moveaxis(self.by_round, 0, -1)

    @property
    def n_players(self) -> int:
        return self.by_round.shape[1]

    @property
    def n_rounds(self) -> int:
        return self.by_round.shape[0]

    def at(self, t: int) -> np.ndarray:
        """The ``(n, n)`` count matrix at round ``t`` (1-based)."""
        check_round(t, self.n_rounds)
        return self.by_round[t - 1]


def check_round(t: int, n_rounds: int) -> None:
    if not 1 <= t <= n_rounds:
        raise RoundOutOfRange(t, n_rounds)


def counts_from(config: GameConfig, by_round: np.ndarray) -> CumulativeCounts:
    by_round.setflags(write=False)
    g = config.different_group()
    s = np.eye(config.n_players, dtype=np.int64)
    g.setflags(write=False)
    s.setflags(write=False)
    return CumulativeCounts(by_round, g, s, config.groups)


def cumulative_counts(game: ValidatedGame) -> CumulativeCounts:
    return counts_from(game.config, cumulate(game.receivers, game.config.n_players))


class PairObservation(NamedTuple):
    i: int
    j: int
    y_ij: int
    y_ji: int
    g_ij: int
    s_ij: int


def pair_index(n: int, include_self: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """0-based (i, j) index arrays of ordered pairs in row-major order."""
    mask = np.ones((n, n), dtype=bool)
    if not include_self:
        np.fill_diagonal(mask, False)
    return np.nonzero(mask)


def pair_table(counts: CumulativeCounts, t: int, include_self: bool = False) -> list[PairObservation]:
    Y = counts.at(t)
    ii, jj = pair_index(counts.n_players, include_self)
    return [
        PairObservation(i + 1, j + 1, int(Y[i, j]), int(Y[j, i]), int(counts.g[i, j]),
                        int(counts.s[i, j]))
        for i, j in zip(ii.tolist(), jj.tolist())
    ]


def receivers_from_counts(counts: CumulativeCounts) -> np.ndarray:
    """Invert :func:`cumulate`: recover the ``(T, n)`` receiver matrix."""
    inc = np.diff(counts.by_round, axis=0, prepend=0)
    # inc[t, i, j] == 1 exactly once per (t, j)
    return np.argmax(inc, axis=1) + 1
