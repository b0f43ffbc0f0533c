import numpy as np
import pytest

from _games import BALANCED, biased_receivers, game_from_receivers, pinned_percentile
from tokex.core import GameConfig, cumulative_counts
from tokex.errors import AllFitsDegenerate, UnknownCoefficient
from tokex.fit import ModelSpec, fit_at_round
from tokex.infer import (
    NullDistribution,
    bounds95,
    empirical_p,
    format_p,
    null_bands,
    null_distribution,
    percentile_bounds,
    replay_bands,
)

ADD = ModelSpec.ADDITIVE


def dist_of(samples, coef="gamma"):
    samples = np.asarray(samples, dtype=float)
    return NullDistribution(ADD, 40, {coef: samples}, len(samples), 0, 0)


class TestPercentiles:
    def test_pinned_interpolation(self):
        v = np.arange(1, 101)
        assert percentile_bounds(v) == pytest.approx((3.475, 97.525), abs=1e-12)
        assert percentile_bounds(v) == pytest.approx(
            (pinned_percentile(v, 0.025), pinned_percentile(v, 0.975)), abs=1e-12)

    def test_random_samples_match_oracle(self, rng):
        for m in (2, 7, 100, 1001):
            v = rng.normal(size=m)
            lo, hi = percentile_bounds(v)
            assert lo == pytest.approx(pinned_percentile(v, 0.025), abs=1e-12)
            assert hi == pytest.approx(pinned_percentile(v, 0.975), abs=1e-12)

    def test_all_equal(self):
        assert bounds95(dist_of(np.full(500, 0.25)), "gamma") == (0.25, 0.25)


class TestEmpiricalP:
    def test_median_observation(self):
        d = dist_of(np.arange(1, 10_000))
        assert empirical_p(5000, d, "gamma") == pytest.approx(1.0, abs=1e-3)

    def test_extreme_observation(self):
        d = dist_of(np.arange(1, 10_000))
        p = empirical_p(0, d, "gamma")
        assert p == pytest.approx(0.0002, abs=1e-15)
        assert format_p(p) == "<0.001"
        assert empirical_p(10_001, d, "gamma") == pytest.approx(0.0002, abs=1e-15)

    def test_monotone_in_distance(self, rng):
        d = dist_of(rng.normal(size=2000))
        ps = [empirical_p(x, d, "gamma") for x in np.linspace(0, 4, 30)]
        assert all(a >= b for a, b in zip(ps, ps[1:]))

    def test_ties_counted_both_sides(self):
        assert empirical_p(1.0, dist_of(np.ones(200)), "gamma") == 1.0

    def test_unknown_coefficient(self):
        with pytest.raises(UnknownCoefficient):
            empirical_p(0, dist_of([1, 2]), "delta")

    def test_format(self):
        assert format_p(0.04321) == "0.043"
        assert format_p(1.0) == "1.000"


class TestNullDistribution:
    def test_deterministic_and_thread_independent(self):
        a = null_distribution(BALANCED, ADD, 40, 600, master_seed=5, threads=1)
        b = null_distribution(BALANCED, ADD, 40, 600, master_seed=5, threads=3)
        for c in ADD.coef_names:
            assert np.array_equal(a[c], b[c])
        c2 = null_distribution(BALANCED, ADD, 40, 600, master_seed=6)
        assert not np.array_equal(a["gamma"], c2["gamma"])

    def test_replicates_are_simulated_fits(self):
        from tokex.simulate import SeedSpec, simulate_null_game
        from tokex.core import validate_log

        d = null_distribution(BALANCED, ADD, 25, 100, master_seed=9)
        assert d.n_excluded == 0
        for k in (0, 57, 99):
            game = validate_log(BALANCED, simulate_null_game(BALANCED, SeedSpec(9, k)))
            fit = fit_at_round(cumulative_counts(game), ADD, 25)
            assert d["gamma"][k] == pytest.approx(fit["gamma"], abs=1e-10)

    def test_minimum_replicates(self):
        with pytest.raises(ValueError):
            null_distribution(BALANCED, ADD, 40, 99)

    def test_all_degenerate(self):
        # a single group makes the G column constant, collinear with the intercept
        cfg = GameConfig(4, 3, (1, 1, 1, 1))
        with pytest.raises(AllFitsDegenerate):
            null_distribution(cfg, ADD, 3, 100)

    def test_degenerate_excluded_and_counted(self):
        # round 1 of a small game is often collinear
        cfg = GameConfig(3, 5, (1, 1, 2))
        d = null_distribution(cfg, ModelSpec.RECIPROCITY, 1, 400, master_seed=1)
        assert 0 < d.n_excluded < 400
        assert len(d["rho"]) == d.n_usable


class TestBands:
    def test_band_matches_distribution_at_each_round(self):
        bands = null_bands(BALANCED, ADD, 300, master_seed=3)
        for t in (5, 40):
            d = null_distribution(BALANCED, ADD, t, 300, master_seed=3)
            lo, hi = bounds95(d, "gamma")
            assert bands.lo["gamma"][t - 1] == lo
            assert bands.hi["gamma"][t - 1] == hi
            assert bands.mean["gamma"][t - 1] == pytest.approx(d["gamma"].mean(), abs=1e-15)

    def test_ordering(self):
        bands = null_bands(BALANCED, ModelSpec.INTERACTION, 200, master_seed=4)
        assert len(bands.rounds) == 40
        for c in ModelSpec.INTERACTION.coef_names:
            ok = ~np.isnan(bands.lo[c])
            assert (bands.lo[c][ok] <= bands.mean[c][ok]).all()
            assert (bands.mean[c][ok] <= bands.hi[c][ok]).all()

    def test_threads_do_not_change_bands(self):
        a = null_bands(BALANCED, ADD, 600, master_seed=2, threads=1)
        b = null_bands(BALANCED, ADD, 600, master_seed=2, threads=4)
        for c in ADD.coef_names:
            assert np.array_equal(a.lo[c], b.lo[c]) and np.array_equal(a.hi[c], b.hi[c])

    def test_replay_with_no_one_replaced_collapses(self, null_game):
        bands = replay_bands(null_game, set(), ADD, 100)
        traj = [fit_at_round(cumulative_counts(null_game), ADD, t)["gamma"] for t in (20, 40)]
        assert bands.lo["gamma"][[19, 39]] == pytest.approx(traj, abs=1e-12)
        assert bands.hi["gamma"][[19, 39]] == pytest.approx(traj, abs=1e-12)

    def test_replay_everyone_is_the_null(self, null_game):
        a = replay_bands(null_game, set(range(1, 15)), ADD, 150, master_seed=7)
        b = null_bands(BALANCED, ADD, 150, master_seed=7)
        assert np.array_equal(a.lo["rho"], b.lo["rho"])

    def test_biased_game_falls_below_band(self, rng):
        game = game_from_receivers(BALANCED, biased_receivers(BALANCED, 0.75, rng))
        bands = null_bands(BALANCED, ADD, 500, master_seed=1)
        g40 = fit_at_round(cumulative_counts(game), ADD, 40)["gamma"]
        assert g40 < bands.lo["gamma"][39]
