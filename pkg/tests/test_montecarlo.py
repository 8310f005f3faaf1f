import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaysec import closedform as cf
from relaysec.cellular import CellScenario, direct_outage_bounds, direct_outage_single_eve
from relaysec.errors import DegenerateLinkError, DomainError
from relaysec.geometry import Distances, PowerPair
from relaysec.montecarlo import (McConfig, McEstimate, df_outage_indicator, draw_fading,
                                 mc_cellular_direct, mc_cellular_relay, mc_df_outage,
                                 mc_direct_outage, mc_rf_outage, rf_outage_indicator,
                                 unit_exponential)

M = 1_000_000


def test_config_validation_and_clamp():
    assert McConfig(trials=50, chunk_size=1000).chunk_size == 50
    for kw in (dict(trials=0), dict(chunk_size=0), dict(seed=-1), dict(seed=2**64), dict(workers=0)):
        with pytest.raises(DomainError):
            McConfig(**kw)


def test_chunks_cover_trials():
    cfg = McConfig(trials=25_001, chunk_size=10_000)
    assert cfg.chunks() == [(0, 10_000), (1, 10_000), (2, 5_001)]


@settings(max_examples=100, deadline=None)
@given(outages=st.integers(0, 1000), extra=st.integers(0, 1000))
def test_estimate_invariants(outages, extra):
    trials = outages + extra + 1
    est = McEstimate.from_counts(outages, trials)
    assert est.std_error == pytest.approx(math.sqrt(est.p_hat * (1 - est.p_hat) / trials))
    assert 0 <= est.ci95_low <= est.p_hat <= est.ci95_high <= 1


def test_unit_exponential_mean():
    g = unit_exponential(np.random.default_rng(3), M)
    assert abs(g.mean() - 1.0) < 5e-3
    assert np.all(np.isfinite(g)) and np.all(g >= 0)


def test_fading_draw_components_unit_mean():
    draw = draw_fading(McConfig().substream(0), 400_000)
    for g in (draw.g_sr, draw.g_rd, draw.g_se, draw.g_re):
        assert abs(g.mean() - 1.0) < 1e-2


# -- examples -----------------------------------------------------------------

def test_df_fig2(fig2_dist):
    est = mc_df_outage(fig2_dist, 4, PowerPair(1, 2), McConfig(trials=M, seed=11))
    assert est.agrees_with(0.1645)
    assert est.agrees_with(cf.df_outage_general(fig2_dist, 4, 2.0))


def test_df_symmetric_unit():
    est = mc_df_outage(Distances(1, 1, 1, 1), 2, PowerPair(1, 1), McConfig(trials=M, seed=12))
    assert est.agrees_with(8 / 9)


def test_df_scale_invariance_estimate_level():
    d = Distances(0.7, 1.3, 0.9, 1.6)
    a = mc_df_outage(d, 3, PowerPair(1, 2), McConfig(trials=M, seed=1))
    b = mc_df_outage(d, 3, PowerPair(2, 4), McConfig(trials=M, seed=2))
    joint = math.hypot(a.std_error, b.std_error)
    assert abs(a.p_hat - b.p_hat) <= 3 * joint


@settings(max_examples=50, deadline=None)
@given(c=st.floats(1e-3, 1e3), ratio=st.floats(0.1, 10))
def test_df_indicator_scale_invariance_per_trial(c, ratio):
    draw = draw_fading(np.random.default_rng(0), 2000)
    d = Distances(0.7, 1.3, 0.9, 1.6)
    base = df_outage_indicator(draw, d, 3, PowerPair(1, ratio))
    scaled = df_outage_indicator(draw, d, 3, PowerPair(c, c * ratio))
    # Rescaling may flip exact float ties only; none occur with continuous draws.
    assert np.array_equal(base, scaled) or np.mean(base != scaled) < 1e-3


def test_rf_fig2(fig2_dist):
    est = mc_rf_outage(fig2_dist, 4, McConfig(trials=M, seed=13))
    assert est.agrees_with(0.0878)


def test_rf_fair_races():
    est = mc_rf_outage(Distances(0.6, 1.4, 0.6, 1.4), 3, McConfig(trials=M, seed=14))
    assert est.agrees_with(0.75)


def test_rf_indicator_is_power_free():
    import inspect

    assert "power" not in inspect.signature(rf_outage_indicator).parameters
    assert "power" not in inspect.signature(mc_rf_outage).parameters


def test_rf_below_df_on_shared_draws(fig2_dist):
    draw = draw_fading(McConfig().substream(0), 200_000)
    ratio = cf.df_optimal_power_ratio(fig2_dist, 4)
    df = df_outage_indicator(draw, fig2_dist, 4, PowerPair(1, ratio)).mean()
    rf = rf_outage_indicator(draw, fig2_dist, 4).mean()
    assert rf < df


def test_direct_examples():
    assert mc_direct_outage(1, 1, 3, McConfig(trials=M, seed=15)).agrees_with(0.5)
    assert mc_direct_outage(1e-3, 1e6, 4, McConfig(trials=M, seed=16)).p_hat == 0.0


@pytest.mark.slow
def test_direct_rare_event_ten_million():
    est = mc_direct_outage(1, 10, 4, McConfig(trials=10_000_000, seed=17, chunk_size=100_000))
    assert est.agrees_with(1 / 10001)


def test_degenerate_links_rejected():
    cfg = McConfig(trials=10)
    with pytest.raises(DegenerateLinkError):
        mc_df_outage(Distances(0, 1, 1, 1), 2, PowerPair(1, 1), cfg)
    with pytest.raises(DegenerateLinkError):
        mc_rf_outage(Distances(1, 1, 0, 1), 2, cfg)
    with pytest.raises(DegenerateLinkError):
        mc_direct_outage(0, 1, 2, cfg)


# -- determinism --------------------------------------------------------------

@pytest.mark.parametrize("workers", [2, 3, 8])
def test_worker_count_does_not_change_estimate(workers, fig2_dist):
    base = mc_df_outage(fig2_dist, 4, PowerPair(1, 2), McConfig(trials=123_457, seed=99))
    par = mc_df_outage(fig2_dist, 4, PowerPair(1, 2),
                       McConfig(trials=123_457, seed=99, workers=workers))
    assert par == base


def test_chunk_size_is_part_of_the_seed_policy(fig2_dist):
    a = mc_rf_outage(fig2_dist, 4, McConfig(trials=50_000, seed=5, chunk_size=10_000))
    b = mc_rf_outage(fig2_dist, 4, McConfig(trials=50_000, seed=5, chunk_size=10_000))
    c = mc_rf_outage(fig2_dist, 4, McConfig(trials=50_000, seed=6, chunk_size=10_000))
    assert a == b and a != c


# -- cellular -----------------------------------------------------------------

@pytest.mark.parametrize("alpha, expected", [(4, math.pi / 4), (2, math.log(2))])
def test_cellular_direct_edge(alpha, expected):
    assert mc_cellular_direct(1.0, alpha, 1, 1.0, McConfig(trials=M, seed=21)).agrees_with(expected)


def test_cellular_direct_radius_invariance():
    a = mc_cellular_direct(0.5, 3, 1, 1.0, McConfig(trials=200_000, seed=3))
    b = mc_cellular_direct(0.5, 3, 1, 7.5, McConfig(trials=200_000, seed=3))
    assert abs(a.p_hat - b.p_hat) <= 3 * math.hypot(a.std_error, b.std_error)


def test_cellular_direct_three_eves_in_bounds():
    lo, hi = direct_outage_bounds(0.5, 4, 3)
    est = mc_cellular_direct(0.5, 4, 3, 1.0, McConfig(trials=M, seed=22))
    slack = 3 * est.std_error
    assert lo - slack <= est.p_hat <= hi + slack


def test_cellular_direct_errors():
    with pytest.raises(DomainError):
        mc_cellular_direct(0.5, 4, 0)
    with pytest.raises(DomainError):
        mc_cellular_direct(1.5, 4, 1)


def test_cellular_relay_at_bs_matches_direct():
    sc = CellScenario(alpha=4.0, relay_bisector_distance=0.0)
    est = mc_cellular_relay(sc, "rf", cfg=McConfig(trials=M, seed=23))
    assert est.agrees_with(math.pi / 4)


def test_cellular_relay_at_mu_matches_direct_to_relay():
    # MU on the bisector at radius 0.6; relay on top of it.
    sc = CellScenario(alpha=3.0, relay_bisector_distance=0.6)
    est = mc_cellular_relay(sc, "rf", mu_angle_offset=0.0, mu_distance=0.6,
                            cfg=McConfig(trials=M, seed=24))
    assert est.agrees_with(direct_outage_single_eve(0.6, 3.0))


def test_cellular_relay_rf_near_edge_beats_direct():
    sc = CellScenario(alpha=4.0, relay_bisector_distance=0.43)
    est = mc_cellular_relay(sc, "rf", cfg=McConfig(trials=200_000, seed=25))
    assert est.ci95_high < math.pi / 4


def test_cellular_relay_errors():
    with pytest.raises(DomainError):
        mc_cellular_relay(CellScenario(), "direct", cfg=McConfig(trials=10))
    with pytest.raises(DomainError):
        CellScenario(relay_bisector_distance=1.5)
