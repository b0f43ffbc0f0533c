import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _games import BALANCED, brute_force_counts, game_from_receivers
from tokex.core import (
    AllocationLog,
    GameConfig,
    cumulative_counts,
    pair_table,
    receivers_from_counts,
    validate_log,
)
from tokex.errors import (
    ConfigError,
    DuplicateGiver,
    IdOutOfRange,
    MissingGiver,
    RoundGap,
    RoundOrderError,
    RoundOutOfRange,
)
from tokex.simulate import SeedSpec, simulate_null_game

TWO = GameConfig(2, 1, (1, 2), 40)


class TestGameConfig:
    def test_balanced(self):
        assert BALANCED.n_players == 14
        assert BALANCED.groups == (1,) * 7 + (2,) * 7
        assert BALANCED.initial_tokens == (40,) * 14

    def test_unequal_groups_allowed(self):
        cfg = GameConfig(5, 3, (1, 1, 1, 2, 3), 0)
        assert cfg.group_of(5) == 3

    @pytest.mark.parametrize("kwargs", [
        dict(n_players=0, n_rounds=1, groups=()),
        dict(n_players=2, n_rounds=0, groups=(1, 1)),
        dict(n_players=2, n_rounds=1, groups=(1,)),
        dict(n_players=2, n_rounds=1, groups=(1, 1), initial_tokens=-1),
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigError):
            GameConfig(**kwargs)

    def test_different_group_indicator(self):
        g = GameConfig(3, 1, (1, 1, 2)).different_group()
        assert g.tolist() == [[0, 0, 1], [0, 0, 1], [1, 1, 0]]


class TestValidateLog:
    def test_minimal_round(self):
        game = validate_log(TWO, [(1, 1, 2), (1, 2, 1)])
        assert game.receivers.tolist() == [[2, 1]]

    def test_missing_giver(self):
        with pytest.raises(MissingGiver) as exc:
            validate_log(TWO, [(1, 1, 2)])
        assert (exc.value.round, exc.value.player) == (1, 2)

    def test_duplicate_giver(self):
        with pytest.raises(DuplicateGiver) as exc:
            validate_log(TWO, [(1, 1, 2), (1, 1, 1), (1, 2, 1)])
        assert (exc.value.round, exc.value.player) == (1, 1)

    @pytest.mark.parametrize("record", [(2, 1, 1), (0, 1, 1), (1, 3, 1), (1, 1, 0)])
    def test_id_out_of_range(self, record):
        with pytest.raises(IdOutOfRange) as exc:
            validate_log(TWO, [(1, 1, 2), (1, 2, 1), record])
        assert exc.value.record == record

    def test_round_gap(self):
        cfg = GameConfig(1, 3, (1,))
        with pytest.raises(RoundGap) as exc:
            validate_log(cfg, [(1, 1, 1), (3, 1, 1)])
        assert exc.value.round == 2

    def test_trailing_round_missing(self):
        with pytest.raises(RoundGap):
            validate_log(GameConfig(1, 2, (1,)), [(1, 1, 1)])

    def test_round_order(self):
        cfg = GameConfig(1, 2, (1,))
        with pytest.raises(RoundOrderError):
            validate_log(cfg, [(2, 1, 1), (1, 1, 1)])

    def test_self_giving_is_legal(self):
        validate_log(TWO, [(1, 1, 1), (1, 2, 2)])

    def test_within_round_order_irrelevant(self):
        a = validate_log(TWO, [(1, 1, 2), (1, 2, 1)])
        b = validate_log(TWO, [(1, 2, 1), (1, 1, 2)])
        assert np.array_equal(a.receivers, b.receivers)

    def test_null_simulated_log(self):
        log = simulate_null_game(BALANCED, SeedSpec(3, 0))
        game = validate_log(BALANCED, log)
        assert len(game.log) == 560


class TestCumulativeCounts:
    def test_minimal(self):
        y = cumulative_counts(validate_log(TWO, [(1, 1, 2), (1, 2, 1)])).y
        assert y[1, 0, 0] == 1 and y[0, 1, 0] == 1 and y[0, 0, 0] == 0

    def test_self_giver_identity(self):
        cfg = GameConfig(3, 5, (1, 1, 2))
        r = np.tile([1, 3, 1], (5, 1))
        y = cumulative_counts(game_from_receivers(cfg, r)).y
        assert y[0, 0].tolist() == [1, 2, 3, 4, 5]

    def test_matches_brute_force(self, null_game):
        y = cumulative_counts(null_game).y
        assert np.array_equal(y, brute_force_counts(BALANCED, null_game.log))

    def test_total(self, null_counts):
        assert null_counts.y[:, :, -1].sum() == 14 * 40

    def test_indicators(self, null_counts):
        assert null_counts.g[0, 6] == 0 and null_counts.g[0, 7] == 1
        assert np.array_equal(null_counts.s, np.eye(14))
        assert np.all(np.diag(null_counts.g) == 0)

    def test_round_out_of_range(self, null_counts):
        with pytest.raises(RoundOutOfRange):
            null_counts.at(41)
        with pytest.raises(RoundOutOfRange):
            null_counts.at(0)


@st.composite
def games(draw):
    n = draw(st.integers(1, 8))
    T = draw(st.integers(1, 12))
    groups = tuple(draw(st.lists(st.integers(1, 3), min_size=n, max_size=n)))
    cells = draw(st.lists(st.integers(1, n), min_size=n * T, max_size=n * T))
    cfg = GameConfig(n, T, groups)
    return cfg, np.array(cells).reshape(T, n)


@settings(max_examples=60, deadline=None)
@given(games())
def test_count_invariants(case):
    cfg, receivers = case
    game = game_from_receivers(cfg, receivers)
    c = cumulative_counts(game)
    y = c.y
    t = np.arange(1, cfg.n_rounds + 1)
    # conservation, monotone unit steps, round trip
    assert np.array_equal(y.sum(axis=0), np.broadcast_to(t, (cfg.n_players, cfg.n_rounds)))
    steps = np.diff(y, axis=2)
    assert np.isin(steps, (0, 1)).all()
    assert np.array_equal(receivers_from_counts(c), receivers)
    pt = pair_table(c, cfg.n_rounds)
    assert all(p.i != p.j for p in pt)
    assert len(pt) == cfg.n_players * (cfg.n_players - 1)


class TestPairTable:
    def test_sizes(self, null_counts):
        assert len(pair_table(null_counts, 40)) == 182
        assert len(pair_table(null_counts, 40, include_self=True)) == 196

    def test_symmetry(self, null_counts):
        rows = {(p.i, p.j): p for p in pair_table(null_counts, 25)}
        for (i, j), p in rows.items():
            q = rows[(j, i)]
            assert (p.y_ij, p.y_ji) == (q.y_ji, q.y_ij)
            assert p.g_ij == q.g_ij

    def test_round_check(self, null_counts):
        with pytest.raises(RoundOutOfRange):
            pair_table(null_counts, 0)


def test_log_canonical_and_equality():
    a = AllocationLog([(1, 2, 1), (1, 1, 2)])
    assert a.canonical() == AllocationLog([(1, 1, 2), (1, 2, 1)])
    assert list(a)[0].giver == 2
