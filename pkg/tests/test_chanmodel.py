"""Channel-model tests: antenna pattern, hex layouts, user drops, link metrics."""
import math

import numpy as np
import pytest

from satnoma.chanmodel import (BeamPattern, LinkParams, UserTerminal,
                               beam_adjacency, beam_gain, beam_gain_linear,
                               build_channel, crossover_level_db, db_to_linear,
                               drop_users, linear_to_db, link_metrics,
                               place_beams, reuse_colors)

THETA3 = math.radians(0.2)

# Pattern levels relative to boresight at multiples of theta_3db, computed
# independently with 40-digit Bessel evaluations (mpmath).
PATTERN_REL_DB = {
    0.25: -0.18230839169252255,
    0.50: -0.73365582595484902,
    0.75: -1.6678991660869736,
    1.00: -3.0102964099077392,
    1.50: -7.1057817495481682,
    2.00: -13.743468719899924,
}


def test_boresight_gain_is_peak_exactly():
    pat = BeamPattern(g_max_db=52.0, theta_3db=THETA3)
    assert beam_gain(0.0, pat) == 52.0
    assert beam_gain_linear(0.0, pat) == db_to_linear(52.0)


@pytest.mark.parametrize("frac,rel_db", sorted(PATTERN_REL_DB.items()))
def test_pattern_matches_bessel_oracle(frac, rel_db):
    pat = BeamPattern(g_max_db=52.0, theta_3db=THETA3)
    got = beam_gain(frac * THETA3, pat) - 52.0
    assert got == pytest.approx(rel_db, abs=1e-8)


def test_half_power_at_theta_3db():
    pat = BeamPattern(g_max_db=37.0, theta_3db=THETA3)
    assert beam_gain(THETA3, pat) == pytest.approx(37.0 - 3.0, abs=0.1)
    # and well below -10 dB one beamwidth further out
    assert beam_gain(2 * THETA3, pat) < 37.0 - 10.0


def test_pattern_monotone_in_main_lobe():
    pat = BeamPattern(g_max_db=52.0, theta_3db=THETA3)
    theta = np.linspace(0.0, 1.2 * THETA3, 200)
    g = np.array([beam_gain(t, pat) for t in theta])
    assert np.all(np.diff(g) < 0)


def test_db_linear_round_trip():
    x = np.array([-31.4, -3.0, 0.0, 17.25, 52.0])
    assert linear_to_db(db_to_linear(x)) == pytest.approx(x, abs=1e-12)


def test_place_beams_hex_rings():
    spacing = math.radians(0.45)
    lay1 = place_beams(1, spacing)
    assert lay1.k == 1
    np.testing.assert_allclose(lay1.centers, [[0.0, 0.0]], atol=1e-15)

    lay7 = place_beams(7, spacing)
    d = np.linalg.norm(lay7.centers, axis=1)
    assert d[0] == 0.0
    np.testing.assert_allclose(np.sort(d[1:]), np.full(6, spacing), rtol=1e-12)

    lay19 = place_beams(19, spacing)
    d = np.sort(np.linalg.norm(lay19.centers, axis=1))
    expect = np.sort([0.0] + [spacing] * 6 + [math.sqrt(3) * spacing] * 6
                     + [2 * spacing] * 6)
    np.testing.assert_allclose(d, expect, rtol=1e-12)


def test_place_beams_deterministic():
    a = place_beams(19, math.radians(0.45))
    b = place_beams(19, math.radians(0.45))
    np.testing.assert_array_equal(a.centers, b.centers)


def test_adjacency_k7_center_has_six_neighbors():
    lay = place_beams(7, math.radians(0.45))
    adj = beam_adjacency(lay)
    assert adj.shape == (7, 7)
    assert adj[0].sum() == 6
    assert np.array_equal(adj, adj.T)
    assert not adj.diagonal().any()


def test_four_color_reuse_is_proper():
    lay = place_beams(19, math.radians(0.45))
    colors = reuse_colors(lay, "four_color")
    adj = beam_adjacency(lay)
    assert len(np.unique(colors)) <= 4
    for a in range(lay.k):
        for b in range(a + 1, lay.k):
            if adj[a, b]:
                assert colors[a] != colors[b]
    # full reuse shares one color
    assert len(np.unique(reuse_colors(lay, "full"))) == 1


def test_drop_users_counts_and_footprint():
    lay = place_beams(7, math.radians(0.45))
    classes = ((0.0, 0.5), (-10.0, 0.5))
    users = drop_users(lay, 3, classes, seed=11)
    assert len(users) == 21
    per_beam = np.bincount([u.beam_id for u in users], minlength=7)
    assert np.all(per_beam == 3)
    for u in users:
        offset = np.asarray(u.direction) - lay.centers[u.beam_id]
        assert np.linalg.norm(offset) <= lay.spacing / 2 + 1e-15
        assert u.rx_gain_db in (0.0, -10.0)


def test_drop_users_custom_footprint_radius():
    lay = place_beams(7, math.radians(0.45))
    r = 0.3 * math.radians(0.2)
    users = drop_users(lay, 40, ((0.0, 1.0),), seed=3, footprint_radius=r)
    off = max(np.linalg.norm(np.asarray(u.direction) - lay.centers[u.beam_id])
              for u in users)
    assert off <= r + 1e-15


def test_drop_users_deterministic_and_validates():
    lay = place_beams(7, math.radians(0.45))
    classes = ((0.0, 0.25), (-6.0, 0.75))
    a = drop_users(lay, 2, classes, seed=5)
    b = drop_users(lay, 2, classes, seed=5)
    assert [(u.id, u.direction, u.beam_id, u.rx_gain_db) for u in a] == \
           [(u.id, u.direction, u.beam_id, u.rx_gain_db) for u in b]
    with pytest.raises(ValueError):
        drop_users(lay, 2, (), seed=5)
    with pytest.raises(ValueError):
        drop_users(lay, 2, ((0.0, 0.4), (-6.0, 0.4)), seed=5)  # probs != 1


def test_build_channel_boresight_magnitude():
    lay = place_beams(1, math.radians(0.45))
    pat = BeamPattern(g_max_db=52.0, theta_3db=THETA3)
    params = LinkParams(noise_ref=2.76e5)
    users = [UserTerminal(id=0, direction=(0.0, 0.0), beam_id=0, rx_gain_db=0.0)]
    ch = build_channel(lay, users, pat, params, seed=0)
    want = db_to_linear(52.0) / 2.76e5
    assert abs(ch.h[0, 0]) ** 2 == pytest.approx(want, rel=1e-12)


def test_build_channel_edge_user_half_power():
    lay = place_beams(1, math.radians(0.4))
    pat = BeamPattern(g_max_db=52.0, theta_3db=THETA3)
    params = LinkParams()
    users = [
        UserTerminal(id=0, direction=(0.0, 0.0), beam_id=0, rx_gain_db=0.0),
        UserTerminal(id=1, direction=(THETA3, 0.0), beam_id=0, rx_gain_db=0.0),
    ]
    ch = build_channel(lay, users, pat, params, seed=0)
    ratio = abs(ch.h[1, 0]) ** 2 / abs(ch.h[0, 0]) ** 2
    assert ratio == pytest.approx(0.5, rel=0.02)


def test_build_channel_deterministic_phases():
    lay = place_beams(7, math.radians(0.45))
    pat = BeamPattern(g_max_db=52.0, theta_3db=THETA3)
    users = drop_users(lay, 2, ((0.0, 1.0),), seed=9)
    a = build_channel(lay, users, pat, LinkParams(), seed=4)
    b = build_channel(lay, users, pat, LinkParams(), seed=4)
    c = build_channel(lay, users, pat, LinkParams(), seed=5)
    np.testing.assert_array_equal(a.h, b.h)
    assert not np.array_equal(a.h, c.h)
    # phases only: same magnitudes either way
    np.testing.assert_allclose(np.abs(a.h), np.abs(c.h), rtol=1e-12)


def test_link_metrics_hand_case():
    # two beams, two users, hand-built gains; full reuse
    from satnoma.chanmodel import ChannelMatrix
    h = np.array([[2.0, 0.5], [0.25, 1.5]], dtype=complex)
    ch = ChannelMatrix(h=h, u_count=2, n_count=2)
    powers = np.array([2.0, 3.0])
    snr, inr = link_metrics(ch, powers, assignment=[0, 1], reuse="full")
    np.testing.assert_allclose(snr, [2.0 * 4.0, 3.0 * 2.25], rtol=1e-12)
    np.testing.assert_allclose(inr, [3.0 * 0.25, 2.0 * 0.0625], rtol=1e-12)


def test_link_metrics_four_color_reduces_interference():
    lay = place_beams(19, math.radians(0.45))
    pat = BeamPattern(g_max_db=41.0, theta_3db=THETA3)
    users = drop_users(lay, 1, ((0.0, 1.0),), seed=2)
    ch = build_channel(lay, users, pat, LinkParams(), seed=2)
    powers = np.full(19, 17.39)
    assign = [u.beam_id for u in users]
    colors = reuse_colors(lay, "four_color")
    _, inr_full = link_metrics(ch, powers, assign, reuse="full")
    _, inr_fc = link_metrics(ch, powers, assign, reuse="four_color",
                             layout=lay, colors=colors)
    assert np.all(inr_fc <= inr_full)
    assert inr_fc.sum() < 0.5 * inr_full.sum()


def test_crossover_levels():
    pat = BeamPattern(g_max_db=52.0, theta_3db=THETA3)
    lay_std = place_beams(7, 2 * THETA3)
    assert crossover_level_db(lay_std, pat) == pytest.approx(
        -3.0102964099077392, abs=1e-9)
    lay_desk = place_beams(19, math.radians(0.45))
    assert crossover_level_db(lay_desk, pat) == pytest.approx(
        -3.8464963531936797, abs=1e-9)


def test_effective_feed_power():
    params = LinkParams(p_feed_sat_w=55.0, obo_db=5.0)
    assert params.effective_feed_power() == pytest.approx(
        17.392527130926086, abs=1e-9)
    assert params.effective_feed_power() == pytest.approx(
        55.0 * db_to_linear(-5.0), rel=1e-15)
