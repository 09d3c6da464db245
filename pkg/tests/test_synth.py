import math

import numpy as np
import pytest

from leadlag.errors import InputError
from leadlag.estimator import EstimatorConfig, estimate_correlation, magnitude_phase
from leadlag.graphs import max_spanning_tree, orient_edges
from leadlag.series import TWO_PI
from leadlag.synth import (
    AssetSpec,
    MarketScenario,
    generate,
    one_factor_scenario,
    scenario_from_dict,
    sector_block_scenario,
)


class TestScenarioValidation:
    def test_duplicate_tickers_rejected(self):
        with pytest.raises(InputError, match="duplicate"):
            MarketScenario((AssetSpec("A"), AssetSpec("A")))

    def test_quantum_must_be_whole_seconds(self):
        with pytest.raises(InputError, match="quantum"):
            MarketScenario((AssetSpec("A"),), quantum=0.5)

    def test_sessions_must_align_to_quantum(self):
        with pytest.raises(InputError, match="not aligned"):
            MarketScenario((AssetSpec("A"),), sessions=((0.0, 90.0),), quantum=60)

    def test_sessions_must_be_ordered(self):
        with pytest.raises(InputError, match="overlap"):
            MarketScenario((AssetSpec("A"),),
                           sessions=((100.0, 200.0), (150.0, 300.0)))

    def test_gamma_needs_sector(self):
        with pytest.raises(InputError, match="sector"):
            AssetSpec("A", gamma=1.0)

    def test_negative_lag_rejected(self):
        with pytest.raises(InputError, match="lags"):
            AssetSpec("A", lag=-5.0)

    def test_too_few_events_rejected(self):
        scn = MarketScenario((AssetSpec("A", intensity=1e-6),),
                             sessions=((0.0, 60.0),))
        with pytest.raises(InputError, match="at least 2"):
            generate(scn)


class TestDeterminism:
    def test_same_seed_identical_output(self):
        scn = one_factor_scenario(n_assets=3, lags=(0.0, 10.0, 20.0),
                                  eta=0.2, duration=600.0, seed=7)
        r1 = generate(scn)
        r2 = generate(scn)
        assert r1.quotes == r2.quotes
        for s1, s2 in zip(r1.series, r2.series):
            np.testing.assert_array_equal(s1.t, s2.t)
            np.testing.assert_array_equal(s1.p, s2.p)

    def test_different_seed_differs(self):
        base = dict(n_assets=2, lags=(0.0, 0.0), duration=600.0)
        r1 = generate(one_factor_scenario(seed=1, **base))
        r2 = generate(one_factor_scenario(seed=2, **base))
        assert r1.quotes != r2.quotes

    def test_asset_streams_independent_of_suffix(self):
        # seeds are spawned per position, so adding assets after a prefix
        # leaves the prefix untouched as long as the grid padding (the
        # max lag) stays the same
        scn3 = one_factor_scenario(n_assets=3, lags=(0.0, 9.0, 5.0),
                                   eta=0.1, duration=600.0, seed=4)
        scn2 = one_factor_scenario(n_assets=2, lags=(0.0, 9.0),
                                   eta=0.1, duration=600.0, seed=4)
        r3 = generate(scn3)
        r2 = generate(scn2)
        assert r3.quotes["A000"] == r2.quotes["A000"]
        assert r3.quotes["A001"] == r2.quotes["A001"]


class TestQuotes:
    def test_timestamps_are_quantized_ints(self):
        scn = one_factor_scenario(n_assets=1, lags=(0.0,), duration=600.0,
                                  seed=3, quantum=5)
        res = generate(scn)
        for ev in res.quotes["A000"]:
            assert isinstance(ev.time, int)
            assert ev.time % 5 == 0
            assert 0 <= ev.time < 600

    def test_sequence_numbers_disambiguate_same_stamp(self):
        scn = one_factor_scenario(n_assets=1, lags=(0.0,), intensity=5.0,
                                  duration=120.0, seed=1, quantum=10)
        res = generate(scn)
        events = res.quotes["A000"]
        for prev, cur in zip(events, events[1:]):
            if cur.time == prev.time:
                assert cur.seq == prev.seq + 1
            else:
                assert cur.time > prev.time
                assert cur.seq == 0

    def test_spread_brackets_mid(self):
        scn = one_factor_scenario(n_assets=1, lags=(0.0,), duration=300.0, seed=2)
        res = generate(scn)
        for ev in res.quotes["A000"]:
            assert ev.ask > ev.bid > 0
            rel = (ev.ask - ev.bid) / ((ev.ask + ev.bid) / 2.0)
            assert rel == pytest.approx(2e-5, rel=1e-6)

    def test_quotes_stay_inside_sessions(self):
        scn = MarketScenario((AssetSpec("A", intensity=2.0),),
                             sessions=((0.0, 300.0), (600.0, 900.0)), seed=5)
        res = generate(scn)
        for ev in res.quotes["A"]:
            assert 0 <= ev.time < 300 or 600 <= ev.time < 900
        assert res.series[0].t_span == 600.0

    def test_series_are_rescaled(self):
        res = generate(one_factor_scenario(n_assets=2, lags=(0.0, 0.0),
                                           duration=600.0, seed=6))
        for s in res.series:
            assert s.rescaled
            assert s.t[0] == 0.0
            assert s.t[-1] <= TWO_PI


class TestGroundTruth:
    def test_factor_value_lag_shifts_grid(self):
        scn = one_factor_scenario(n_assets=2, lags=(0.0, 30.0), duration=600.0,
                                  seed=8)
        res = generate(scn)
        t = np.array([100.0, 250.0, 400.0])
        lagged = res.truth.factor_value(t, lag=30.0)
        direct = res.truth.factor_value(t - 30.0)
        np.testing.assert_array_equal(lagged, direct)

    def test_factor_series_is_rescaled_walk(self):
        res = generate(one_factor_scenario(n_assets=2, lags=(0.0, 0.0),
                                           duration=600.0, seed=8))
        f = res.truth.factor_series()
        assert f.asset_id == "__MARKET__"
        assert f.rescaled and f.t_span == 600.0

    def test_sector_factors_present(self):
        scn = sector_block_scenario({"X": ["A", "B"], "Y": ["C"]},
                                    duration=600.0, seed=1)
        res = generate(scn)
        assert set(res.truth.sector_values) == {"X", "Y"}
        fx = res.truth.factor_series(sector="X")
        assert fx.asset_id == "__SECTOR_X__"


class TestLeadLagSignal:
    def test_lagged_pair_sign(self):
        scn = one_factor_scenario(n_assets=2, lags=(0.0, 30.0), eta=0.1,
                                  intensity=1.0, duration=14400.0, seed=3)
        res = generate(scn)
        rho = estimate_correlation(res.series, EstimatorConfig(tau=60.0))
        s, theta = magnitude_phase(rho.values[0, 1])
        assert theta < -0.2, "leader must show a negative phase to the follower"
        assert s > 0.5

    def test_synchronous_pair_no_phase(self):
        scn = one_factor_scenario(n_assets=2, lags=(0.0, 0.0), eta=0.0,
                                  intensity=1.0, duration=14400.0, seed=3)
        res = generate(scn)
        rho = estimate_correlation(res.series, EstimatorConfig(tau=60.0))
        s, theta = magnitude_phase(rho.values[0, 1])
        assert abs(theta) < 0.02
        assert s > 0.95

    def test_zero_beta_decorrelates(self):
        assets = (AssetSpec("A", beta=0.0, eta=1.0),
                  AssetSpec("B", beta=0.0, eta=1.0))
        scn = MarketScenario(assets, sessions=((0.0, 14400.0),), seed=12)
        res = generate(scn)
        rho = estimate_correlation(res.series, EstimatorConfig(tau=60.0))
        assert abs(rho.values[0, 1]) < 0.15

    def test_intra_sector_edges_small_bin(self):
        # synchronous inside each sector, market delay between sectors:
        # the spanning tree's intra-sector edges sit in the small bin
        scn = sector_block_scenario({"X": ["X0", "X1", "X2"],
                                     "Y": ["Y0", "Y1", "Y2"]},
                                    intra_lag=0.0, inter_lag=45.0,
                                    gamma=1.0, eta=0.2, intensity=0.5,
                                    duration=10800.0, seed=21)
        res = generate(scn)
        rho = estimate_correlation(res.series, EstimatorConfig(tau=60.0))
        tree = orient_edges(max_spanning_tree(rho), rho)
        sector = {a.ticker: a.sector for a in scn.assets}
        intra = [e for e in tree.edges if sector[e.a] == sector[e.b]]
        assert intra, "expected at least one intra-sector edge"
        assert all(e.bin == "small" for e in intra)


class TestScenarioSerialization:
    def test_dict_round_trip(self):
        scn = sector_block_scenario({"X": ["A", "B"]}, intra_lag=5.0,
                                    duration=600.0, seed=9)
        again = MarketScenario.from_dict(scn.to_dict())
        assert again == scn

    def test_preset_one_factor(self):
        scn = scenario_from_dict({"preset": "one_factor", "n_assets": 2,
                                  "lags": [0.0, 15.0], "duration": 600.0})
        assert len(scn.assets) == 2
        assert scn.assets[1].lag == 15.0

    def test_preset_sector_block(self):
        scn = scenario_from_dict({"preset": "sector_block",
                                  "sectors": {"F": ["A"], "T": ["B"]},
                                  "inter_lag": 60.0, "duration": 600.0})
        assert scn.assets[1].lag == 60.0
        assert scn.assets[0].sector == "F"

    def test_plain_dict_form(self):
        scn = scenario_from_dict({
            "assets": [{"ticker": "A"}, {"ticker": "B", "lag": 30.0}],
            "sessions": [[0.0, 600.0]], "seed": 2})
        assert scn.assets[1].lag == 30.0

    def test_unknown_preset_rejected(self):
        with pytest.raises(InputError, match="preset"):
            scenario_from_dict({"preset": "volcano"})

    def test_sector_block_lag_list_length_checked(self):
        with pytest.raises(InputError, match="lags"):
            sector_block_scenario({"X": ["A"], "Y": ["B"]},
                                  inter_lag=[0.0, 1.0, 2.0])

    def test_empty_partition_rejected(self):
        with pytest.raises(InputError, match="empty"):
            sector_block_scenario({})
