"""
User pairing strategies vs the exhaustive oracle
================================================

One 7-beam drop with four candidates per beam. Each strategy partitions a
beam's candidates into (strong, weak) pairs; the layered evaluator scores a
whole schedule in b/s. Small instances admit a brute-force search over all
joint pairings, which bounds what any pairing heuristic can achieve.
"""
import numpy as np

from satnoma.sched import (STRATEGIES, brute_force_pairing, pair_users,
                           serving_gains_db)
from satnoma.syssim import SimConfig, drop_channel, drop_seed, \
    make_layered_evaluator

cfg = SimConfig(k=7, n=7, users_per_beam=4)
layout, params, users, channel, s_sched = drop_channel(cfg, drop_seed(cfg.seed, 0))
cand = [[] for _ in range(cfg.k)]
for i, u in enumerate(users):
    cand[u.beam_id].append(i)

print("beam 0 candidates and serving gains (dB):")
g0 = serving_gains_db(channel, cand[0], 0)
for u, g in zip(cand[0], g0):
    print(f"  user {u:2d}: {g:7.2f}")

evaluate = make_layered_evaluator(cfg, channel)
rates = {}
for strategy in STRATEGIES:
    sched = pair_users(channel, cand, strategy, seed=s_sched)
    rates[strategy] = evaluate(sched)
    pairs0 = ", ".join(f"({s},{w})" for s, w in sched.pairs[0])
    print(f"\n{strategy:18s} beam-0 slots: {pairs0}")
    print(f"{'':18s} sum rate {rates[strategy] / 1e9:.4f} Gb/s")

# the oracle: 3 pairings per beam, 3^7 = 2187 joint schedules
best, oracle = brute_force_pairing(channel, cand, evaluate)
print(f"\nbrute force        sum rate {oracle / 1e9:.4f} Gb/s "
      f"(beam-0 slots: {', '.join(f'({s},{w})' for s, w in best.pairs[0])})")
for strategy in STRATEGIES:
    gap = 100 * (oracle - rates[strategy]) / oracle
    print(f"  {strategy:18s} {gap:5.2f}% below the oracle")
print("\n(similar-gain and opposed-gain pairing land close together here:",
      "with the power split optimized per beam, the pair's sum is pinned",
      "by its stronger member, so the pairing mainly steers fairness)")
