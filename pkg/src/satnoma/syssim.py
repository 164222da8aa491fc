"""Monte Carlo system-level comparison of multibeam transmission schemes.

Each drop places users, synthesizes the channel, and evaluates one of four
schemes: a four-color frequency-reuse baseline without precoding, single-layer
zero-forcing precoding over time slots, two-layer NOMA superposed on the
precoded streams (one slot per user pair), or a joint broadcast + multicast
transmission. Drops derive independent seeds from the config seed, so
aggregates are reproducible bit-for-bit regardless of execution order or
parallelism.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chanmodel import (BeamPattern, LinkParams, build_channel, drop_users,
                        link_metrics, place_beams)
from .precode import (SingularChannelError, best_layer_split,
                      broadcast_multicast_precoder, broadcast_multicast_rates,
                      enforce_per_feed_power, rx_powers, sinr_table,
                      zf_precoder)
from .regions import capacity, rate_ian
from .sched import pair_users

log = logging.getLogger(__name__)

SCHEMES = ("four_color", "single_layer_precoding", "multilayer_noma",
           "broadcast_multicast")

#: sub-seed retries per drop when the realized channel is near-singular
MAX_RETRIES = 3

#: common-power-share grid of the broadcast_multicast sweep
COMMON_FRACTIONS = np.linspace(0.0, 1.0, 21)

#: desk-scale terminal mix: four classes at 6 dB steps, equally likely.
#: A wider spread than the two-class channel-model default keeps most
#: beams heterogeneous, which is where power-domain layering pays off.
DESK_TERMINAL_CLASSES = ((0.0, 0.25), (-6.0, 0.25), (-12.0, 0.25),
                         (-18.0, 0.25))


@dataclass(frozen=True)
class SimConfig:
    """Scenario and sweep configuration.

    ``n`` counts satellite feeds; feeds beyond one per beam carry no beam and
    radiate nothing (dark columns), so n > k is accepted but changes nothing
    at present. Angles are in degrees here and converted once internally.
    """

    k: int = 19
    n: int = 19
    users_per_beam: int = 2
    spacing_deg: float = 0.45
    theta_3db_deg: float = 0.2
    g_max_db: float = 41.0
    p_feed_w: float = 55.0
    obo_db: float = 5.0
    bandwidth_hz: float = 500e6
    noise_ref: float = 2.76e5
    footprint_scale: float = 1.0
    reuse: str = "full"
    terminal_classes: tuple = DESK_TERMINAL_CLASSES
    schemes: tuple = ("four_color", "single_layer_precoding", "multilayer_noma")
    schedulers: tuple = ("min_gain_diff",)
    decoder: str = "snd"
    drops: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n < self.k:
            raise ValueError("need at least one feed per beam (n >= k)")
        if self.drops < 1:
            raise ValueError("drops must be >= 1")
        if self.users_per_beam < 1:
            raise ValueError("users_per_beam must be >= 1")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")
        if self.decoder not in ("sud", "snd"):
            raise ValueError(f"unknown decoder {self.decoder!r}")


@dataclass(frozen=True)
class DropResult:
    """Rates (b/s) of one Monte Carlo drop under one scheme/scheduler."""

    rates: np.ndarray
    sum_rate: float
    jain: float
    scheme: str
    scheduler: str
    slots_used: int


def jain_fairness(rates) -> float:
    """Jain's index (Σr)²/(n·Σr²) of a non-negative, not-all-zero rate list."""
    r = np.asarray(rates, dtype=float)
    if r.size == 0 or np.any(r < 0):
        raise ValueError("rates must be non-empty and non-negative")
    denom = r.size * float((r * r).sum())
    if denom == 0.0:
        raise ValueError("all-zero rates have no fairness index")
    return float(r.sum()) ** 2 / denom


def scenario(cfg: SimConfig):
    """(layout, pattern, params) realized from the config."""
    pattern = BeamPattern(cfg.g_max_db, math.radians(cfg.theta_3db_deg))
    layout = place_beams(cfg.k, math.radians(cfg.spacing_deg), cfg.reuse)
    params = LinkParams(cfg.p_feed_w, cfg.obo_db, cfg.noise_ref,
                        cfg.bandwidth_hz)
    return layout, pattern, params


def _dark_pad(channel, n: int):
    """Append zero columns for feeds that carry no beam (n > k)."""
    if n == channel.n_count:
        return channel
    from .chanmodel import ChannelMatrix
    extra = np.zeros((channel.u_count, n - channel.n_count), dtype=complex)
    return ChannelMatrix(h=np.hstack([channel.h, extra]),
                         u_count=channel.u_count, n_count=n)


def _trim_dark(channel, k: int):
    """Drop the dark-feed columns again (inverse of :func:`_dark_pad`)."""
    if k == channel.n_count:
        return channel
    from .chanmodel import ChannelMatrix
    return ChannelMatrix(h=channel.h[:, :k], u_count=channel.u_count,
                         n_count=k)


def _beam_candidates(users, k: int):
    cand = [[] for _ in range(k)]
    for i, u in enumerate(users):
        cand[u.beam_id].append(i)
    return cand


def _four_color(cfg, layout, channel, users, scheduler, seed, params):
    assignment = [u.beam_id for u in users]
    # dark feeds radiate nothing; color bookkeeping runs on the beam columns
    lit = _trim_dark(channel, cfg.k)
    powers = np.full(lit.n_count, params.effective_feed_power())
    snr, inr = link_metrics(lit, powers, assignment, reuse="four_color",
                            layout=layout)
    slots = cfg.users_per_beam
    rates = (cfg.bandwidth_hz / 4.0) * rate_ian(snr, inr) / slots
    return rates, slots


def _single_layer(cfg, layout, channel, users, scheduler, seed, params):
    g = channel.gains()
    cand = _beam_candidates(users, cfg.k)
    ranked = [sorted(c, key=lambda u, b=b: (-g[u, b], u))
              for b, c in enumerate(cand)]
    slots = cfg.users_per_beam
    p_eff = params.effective_feed_power()
    rates = np.zeros(len(users))
    for t in range(slots):
        served = [r[t] for r in ranked]
        prec = enforce_per_feed_power(zf_precoder(channel.h[served]), p_eff)
        st = sinr_table(channel.h[served], prec)
        rates[served] = cfg.bandwidth_hz * capacity(st.sinr) / slots
    return rates, slots


def _effective_roles(channel, prec, pairs):
    """Reorder each (strong, weak) pair by realized serving-stream power.

    Scheduling ranks users by raw serving-feed gain; after precoding the
    projection onto the stream direction decides who can actually sustain
    the higher layer, so decoding roles follow the realized stream powers.
    """
    rx = rx_powers(channel.h, prec)
    fixed = []
    for b, (s, w) in enumerate(pairs):
        if rx[s, b] < rx[w, b]:
            s, w = w, s
        fixed.append((s, w))
    return fixed


def _slot_pairs(sched, t):
    pairs = []
    for beam in sched.pairs:
        if t >= len(beam) or beam[t][1] is None:
            raise ValueError("layered evaluation needs a full (strong, weak) "
                             "pair in every beam and slot")
        pairs.append(beam[t])
    return pairs


def _slot_rates(channel, pairs, p_eff, decoder):
    """Per-user rates (b/s/Hz) of one slot: ZF on the weak rows, then the
    best per-beam layer split under the given decoder."""
    weak_rows = [w for _, w in pairs]
    prec = enforce_per_feed_power(zf_precoder(channel.h[weak_rows]), p_eff)
    pairs = _effective_roles(channel, prec, pairs)
    _, r = best_layer_split(channel.h, pairs, prec, decoder=decoder)
    return pairs, r


def layered_schedule_rates(cfg: SimConfig, channel, sched,
                           decoder: str | None = None) -> np.ndarray:
    """Per-user rates (b/s) of a fully paired schedule under two-layer NOMA
    over per-slot ZF precoding; each pair round takes 1/n_slots of the time."""
    decoder = decoder or cfg.decoder
    params = LinkParams(cfg.p_feed_w, cfg.obo_db, cfg.noise_ref,
                        cfg.bandwidth_hz)
    p_eff = params.effective_feed_power()
    rounds = sched.n_slots()
    rates = np.zeros(channel.u_count)
    for t in range(rounds):
        pairs, r = _slot_rates(channel, _slot_pairs(sched, t), p_eff, decoder)
        for s, w in pairs:
            rates[s] = cfg.bandwidth_hz * r[s] / rounds
            rates[w] = cfg.bandwidth_hz * r[w] / rounds
    return rates


def make_layered_evaluator(cfg: SimConfig, channel, decoder: str | None = None):
    """Schedule → sum rate (b/s) callable with per-slot memoization.

    Slot values depend only on the pairs sharing the slot, which exhaustive
    pairing searches revisit heavily; caching them makes brute-force sweeps
    tractable.
    """
    decoder = decoder or cfg.decoder
    params = LinkParams(cfg.p_feed_w, cfg.obo_db, cfg.noise_ref,
                        cfg.bandwidth_hz)
    p_eff = params.effective_feed_power()
    cache = {}

    def evaluate(sched) -> float:
        rounds = sched.n_slots()
        total = 0.0
        for t in range(rounds):
            key = tuple(_slot_pairs(sched, t))
            if key not in cache:
                pairs, r = _slot_rates(channel, list(key), p_eff, decoder)
                cache[key] = float(sum(r[s] + r[w] for s, w in pairs))
            total += cache[key]
        return cfg.bandwidth_hz * total / rounds

    return evaluate


def _multilayer(cfg, layout, channel, users, scheduler, seed, params):
    if cfg.users_per_beam % 2:
        raise ValueError("multilayer_noma needs an even users_per_beam")
    cand = _beam_candidates(users, cfg.k)
    sched = pair_users(channel, cand, scheduler, seed=seed)
    rates = layered_schedule_rates(cfg, channel, sched)
    return rates, sched.n_slots()


def _broadcast_multicast(cfg, layout, channel, users, scheduler, seed, params):
    g = channel.gains()
    groups = _beam_candidates(users, cfg.k)
    reps = [min(c, key=lambda u, b=b: (g[u, b], u)) for b, c in enumerate(groups)]
    p_eff = params.effective_feed_power()
    n_users = len(users)
    best = None
    for f in COMMON_FRACTIONS:
        prec = broadcast_multicast_precoder(channel.h[reps], channel.h, f)
        prec = enforce_per_feed_power(prec, p_eff)
        common, private = broadcast_multicast_rates(channel.h, prec, f, groups)
        objective = common + private.sum()
        if best is None or objective > best[0] + 1e-12:
            best = (objective, common, private)
    _, common, private = best
    rates = np.zeros(n_users)
    for b, members in enumerate(groups):
        share = private[b] / len(members) + common / n_users
        rates[members] = cfg.bandwidth_hz * share
    return rates, 1


_SCHEME_FN = {
    "four_color": _four_color,
    "single_layer_precoding": _single_layer,
    "multilayer_noma": _multilayer,
    "broadcast_multicast": _broadcast_multicast,
}


def drop_seed(seed: int, index: int) -> int:
    """Independent per-drop seed derived from the config seed."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def drop_channel(cfg: SimConfig, seed: int, attempt: int = 0):
    """Realize one drop: (layout, params, users, channel, scheduler seed).

    ``attempt`` selects the retry sub-seed; every random element (positions,
    terminal classes, phases, scheduling) descends from (seed, attempt) only.
    """
    layout, pattern, params = scenario(cfg)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(attempt,))
    s_users, s_phase, s_sched = ss.spawn(3)
    footprint = cfg.footprint_scale * math.radians(cfg.theta_3db_deg)
    users = drop_users(layout, cfg.users_per_beam, cfg.terminal_classes,
                       s_users, footprint_radius=footprint)
    channel = _dark_pad(build_channel(layout, users, pattern, params, s_phase),
                        cfg.n)
    return layout, params, users, channel, s_sched


def run_drop(cfg: SimConfig, scheme: str, scheduler: str, seed: int) -> DropResult:
    """One Monte Carlo drop: place users, build the channel, evaluate the
    scheme. Near-singular channels are retried on the next sub-seed up to
    MAX_RETRIES times before the error propagates.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    last_err = None
    for attempt in range(1 + MAX_RETRIES):
        layout, params, users, channel, s_sched = drop_channel(cfg, seed,
                                                               attempt)
        try:
            rates, slots = _SCHEME_FN[scheme](cfg, layout, channel, users,
                                              scheduler, s_sched, params)
        except SingularChannelError as err:
            last_err = err
            log.info("drop seed %d attempt %d: %s; retrying", seed, attempt, err)
            continue
        return DropResult(rates=rates, sum_rate=float(rates.sum()),
                          jain=jain_fairness(rates), scheme=scheme,
                          scheduler=scheduler, slots_used=slots)
    raise SingularChannelError(
        f"drop seed {seed}: still singular after {MAX_RETRIES} retries"
    ) from last_err


@dataclass(frozen=True)
class SummaryRow:
    """Aggregates of one scheme × scheduler over all completed drops."""

    scheme: str
    scheduler: str
    drops_used: int
    skipped: int
    mean_sum_rate: float
    median_sum_rate: float
    p10_sum_rate: float
    mean_jain: float
    gain_vs_four_color: float


@dataclass(frozen=True)
class SchemeComparison:
    """Summary rows plus raw per-drop material keyed by (scheme, scheduler)."""

    rows: tuple
    per_drop: dict = field(repr=False)      # -> np.ndarray of sum rates
    drop_results: dict = field(repr=False)  # -> tuple of DropResult | None


def _row_specs(cfg: SimConfig):
    specs = []
    for scheme in cfg.schemes:
        if scheme == "multilayer_noma":
            specs.extend((scheme, s) for s in cfg.schedulers)
        else:
            specs.append((scheme, "-"))
    return specs


def compare_schemes(cfg: SimConfig, workers: int = 1) -> SchemeComparison:
    """Run all drops for every scheme × scheduler and aggregate.

    Per-drop seeds depend only on (cfg.seed, drop index), and results are
    collected by index, so the summary is identical for any ``workers``.
    """
    specs = _row_specs(cfg)
    seeds = [drop_seed(cfg.seed, d) for d in range(cfg.drops)]

    def one(task):
        scheme, scheduler, seed = task
        try:
            return run_drop(cfg, scheme, scheduler, seed)
        except SingularChannelError:
            return None

    tasks = [(sch, sdl, seed) for sch, sdl in specs for seed in seeds]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, tasks))
    else:
        results = [one(t) for t in tasks]

    per_drop = {}
    drop_results = {}
    rows = []
    four_color_mean = None
    it = iter(results)
    for scheme, scheduler in specs:
        drops = [next(it) for _ in seeds]
        done = [d for d in drops if d is not None]
        sums = np.array([d.sum_rate for d in done])
        per_drop[(scheme, scheduler)] = sums
        drop_results[(scheme, scheduler)] = tuple(drops)
        row = dict(scheme=scheme, scheduler=scheduler, drops_used=len(done),
                   skipped=len(drops) - len(done),
                   mean_sum_rate=float(sums.mean()) if done else math.nan,
                   median_sum_rate=float(np.median(sums)) if done else math.nan,
                   p10_sum_rate=float(np.percentile(sums, 10.0)) if done else math.nan,
                   mean_jain=float(np.mean([d.jain for d in done])) if done else math.nan)
        rows.append(row)
        if scheme == "four_color" and four_color_mean is None:
            four_color_mean = row["mean_sum_rate"]
    out = []
    for row in rows:
        if four_color_mean and four_color_mean > 0:
            gain = row["mean_sum_rate"] / four_color_mean - 1.0
        else:
            gain = math.nan
        out.append(SummaryRow(gain_vs_four_color=gain, **row))
    return SchemeComparison(rows=tuple(out), per_drop=per_drop,
                            drop_results=drop_results)
