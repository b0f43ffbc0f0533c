import numpy as np
import pytest

from _games import BALANCED, game_from_receivers
from tokex.core import GameConfig, cumulative_counts
from tokex.errors import EmptyScope
from tokex.explore import (
    proportions_by_round,
    reciprocity_correlation,
    residual_export,
    scatter_export,
    source_proportions,
)
from tokex.fit import ModelSpec
from tokex.simulate import generate_replicates

SELF = np.tile(np.arange(1, 15), (40, 1))


def counts_of(receivers, config=BALANCED):
    return cumulative_counts(game_from_receivers(config, receivers))


class TestProportions:
    def test_all_self_giving(self):
        p = source_proportions(counts_of(SELF), 40)
        assert (p.p_ingroup, p.p_outgroup, p.p_self) == (0, 0, 1)

    def test_sum_to_one(self, null_counts):
        for p in proportions_by_round(null_counts):
            assert p.p_ingroup + p.p_outgroup + p.p_self == pytest.approx(1, abs=1e-12)

    def test_null_expectation(self):
        R = generate_replicates(BALANCED, 500, 3).receivers(0, 500)
        ps = np.array([source_proportions(counts_of(r), 40)[1:] for r in R])
        assert ps.mean(axis=0) == pytest.approx([6 / 14, 7 / 14, 1 / 14], abs=0.01)

    def test_brute_force(self, null_game):
        counts = cumulative_counts(null_game)
        for t in (1, 13, 40):
            tally = {"in": 0, "out": 0, "self": 0}
            for r, giver, receiver in null_game.log:
                if r > t:
                    continue
                if giver == receiver:
                    tally["self"] += 1
                elif BALANCED.group_of(giver) == BALANCED.group_of(receiver):
                    tally["in"] += 1
                else:
                    tally["out"] += 1
            p = source_proportions(counts, t)
            assert p.p_ingroup == tally["in"] / (14 * t)
            assert p.p_outgroup == tally["out"] / (14 * t)


class TestCorrelation:
    def test_perfect_reciprocation(self):
        # pairs (1,2), (3,4), ... swap tokens every round
        r = np.tile([2, 1, 4, 3, 6, 5, 8, 7, 10, 9, 12, 11, 14, 13], (40, 1))
        counts = counts_of(r)
        for scope in ("ingroup", "all"):
            assert reciprocity_correlation(counts, 40, scope) == pytest.approx(1.0)

    def test_matches_numpy(self, null_counts):
        Y = null_counts.at(30)
        same = (null_counts.g == 0) & (null_counts.s == 0)
        expected = np.corrcoef(Y[same], Y.T[same])[0, 1]
        assert reciprocity_correlation(null_counts, 30, "ingroup") == pytest.approx(expected, abs=1e-12)

    def test_group_label_swap_invariant(self, null_game):
        swapped = GameConfig(14, 40, (2,) * 7 + (1,) * 7)
        a = cumulative_counts(null_game)
        b = cumulative_counts(game_from_receivers(swapped, null_game.receivers))
        for scope in ("all", "ingroup", "outgroup"):
            assert reciprocity_correlation(a, 40, scope) == reciprocity_correlation(b, 40, scope)

    def test_constant_margin_is_none(self):
        assert reciprocity_correlation(counts_of(SELF), 40, "ingroup") is None

    def test_empty_scope(self):
        cfg = GameConfig(3, 2, (1, 1, 1))
        counts = counts_of(np.ones((2, 3), dtype=int), cfg)
        with pytest.raises(EmptyScope):
            reciprocity_correlation(counts, 2, "outgroup")

    def test_bad_scope(self, null_counts):
        with pytest.raises(ValueError):
            reciprocity_correlation(null_counts, 40, "everyone")


class TestScatter:
    def test_pair_points(self):
        r = SELF.copy()
        r[:38, 0] = 2   # player 1 gives player 2 in 38 rounds
        r[:, 1] = 1     # player 2 gives player 1 every round
        pts = {(p.i, p.j): p for p in scatter_export(counts_of(r), 40)}
        assert (pts[1, 2].y_ij, pts[1, 2].y_ji) == (40, 38)
        assert (pts[2, 1].y_ij, pts[2, 1].y_ji) == (38, 40)
        assert pts[1, 1].s_ij == 1 and pts[1, 2].g_ij == 0

    @pytest.mark.parametrize("scope,include_self,n", [
        ("all", True, 196), ("all", False, 182),
        ("ingroup", True, 98), ("ingroup", False, 84), ("outgroup", True, 98),
    ])
    def test_row_counts(self, null_counts, scope, include_self, n):
        assert len(scatter_export(null_counts, 40, scope, include_self)) == n


def test_residuals(null_counts):
    for t in (10, 25, 40):
        res = residual_export(null_counts, ModelSpec.ADDITIVE, t)
        assert res.shape == (182,)
        assert abs(res.sum()) < 1e-9
