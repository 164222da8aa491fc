"""
Zero-forcing plus two-layer superposition on one drop
=====================================================

Build a 7-beam channel with two users per beam, zero-force on the weaker
user of each beam, then sweep the per-beam power split between the two
layers. The strong user rides the same stream at low power and cancels (or
jointly decodes) the weak user's layer.
"""
import numpy as np

from satnoma.precode import (best_layer_split, enforce_per_feed_power,
                             rx_powers, sinr_table, zf_precoder)
from satnoma.syssim import SimConfig, drop_channel, drop_seed

cfg = SimConfig(k=7, n=7, users_per_beam=2)
layout, params, users, channel, _ = drop_channel(cfg, drop_seed(cfg.seed, 0))
p_eff = params.effective_feed_power()
print(f"effective per-feed power: {p_eff:.6f} W "
      f"({cfg.p_feed_w} W behind {cfg.obo_db} dB back-off)")

# per beam, rank the two users by serving-feed gain
gains = channel.gains()
pairs = []
for b in range(cfg.k):
    members = [i for i, u in enumerate(users) if u.beam_id == b]
    members.sort(key=lambda i: -gains[i, b])
    pairs.append((members[0], members[1]))

# zero-force on the WEAK rows: the weak users see a clean stream, the strong
# users (better geometry) tolerate the resulting residue
weak_rows = [w for _, w in pairs]
prec = enforce_per_feed_power(zf_precoder(channel.h[weak_rows]), p_eff)
table = sinr_table(channel.h[weak_rows], prec)
print("\nweak-user post-ZF SINR (dB):",
      np.round(10 * np.log10(table.sinr), 2))
print("worst cross-talk residue   :",
      f"{10 * np.log10(max(table.residual / table.rx_power[np.arange(7), table.intended])):.1f} dB relative")
print("peak feed load             :", f"{prec.feed_loads().max():.6f} W")

# roles follow realized stream power, not raw gain
rx = rx_powers(channel.h, prec)
pairs = [(s, w) if rx[s, b] >= rx[w, b] else (w, s)
         for b, (s, w) in enumerate(pairs)]

# sweep the weak-layer power fraction; compare the two decoder models
for decoder in ("sud", "snd"):
    tuned, rates = best_layer_split(channel.h, pairs, prec, decoder=decoder)
    total = sum(rates[s] + rates[w] for s, w in pairs)
    print(f"\n{decoder}: best splits per beam: {np.round(tuned.layer_split, 2)}")
    print(f"{decoder}: sum spectral efficiency {total:.4f} b/s/Hz "
          f"({cfg.bandwidth_hz * total / 1e9:.3f} Gb/s in {cfg.bandwidth_hz/1e6:.0f} MHz)")
    strong_share = sum(rates[s] for s, _ in pairs) / total
    print(f"{decoder}: strong users carry {100 * strong_share:.1f}% of the total")

# the sum-rate objective parks every split at the strong-layer endpoint: a
# pair's sum is pinned by its stronger member at this link budget. The win
# over single-layer precoding (see demos/scheme_comparison.py) comes from
# serving the pair in one slot instead of two, not from an interior split.
