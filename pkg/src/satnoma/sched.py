"""User pairing and grouping for layered transmission over precoded beams.

Heuristic pairing strategies (gain-difference and collinearity based), greedy
minimum-Euclidean-distance grouping of channel rows, and an exhaustive
brute-force pairing oracle for small instances used to quantify heuristic
gaps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .chanmodel import ChannelMatrix, linear_to_db

STRATEGIES = ("min_gain_diff", "max_gain_diff", "collinear_min_gain", "random")

#: joint schedules enumerated by the brute-force oracle before refusing
BRUTE_FORCE_LIMIT = 200_000

#: weight (per dB of gain difference) of the composite collinearity score
COLLINEAR_GAIN_WEIGHT = 0.1


class InsufficientUsersError(ValueError):
    """Too few candidates in a beam for the requested pairing/grouping."""


class SizeLimitError(ValueError):
    """Instance too large for exhaustive enumeration."""


@dataclass(frozen=True)
class Schedule:
    """Per-beam, per-slot ordered user pairs.

    ``pairs[b][t]`` is the (strong, weak) user-row pair of beam b in slot t;
    ``weak`` is None when an odd leftover candidate rides alone. Each
    candidate appears exactly once across the schedule.
    """

    pairs: tuple
    strategy: str

    def users(self):
        out = []
        for beam in self.pairs:
            for s, w in beam:
                out.append(s)
                if w is not None:
                    out.append(w)
        return out

    def n_slots(self) -> int:
        return max(len(beam) for beam in self.pairs)


@dataclass(frozen=True)
class PairingScore:
    """Collinearity and gain-difference figures of a candidate pair."""

    collinearity: float   # |normalized inner product|, in [0, 1]
    gain_diff_db: float   # |serving-power difference| in dB, >= 0

    def composite(self, weight: float = COLLINEAR_GAIN_WEIGHT) -> float:
        return self.collinearity - weight * self.gain_diff_db


def _rows(h) -> np.ndarray:
    if isinstance(h, ChannelMatrix):
        return h.h
    return np.asarray(h)


def serving_gains_db(h, users, feed: int) -> np.ndarray:
    """Serving-feed channel power in dB for the given user rows."""
    rows = _rows(h)
    users = np.asarray(users, dtype=int)
    return linear_to_db(np.abs(rows[users, feed]) ** 2)


def pairing_score(h, u: int, v: int, feed: int) -> PairingScore:
    rows = _rows(h)
    a, b = rows[u], rows[v]
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    col = float(abs(np.vdot(a, b)) / denom) if denom > 0 else 0.0
    g = serving_gains_db(rows, [u, v], feed)
    return PairingScore(collinearity=min(col, 1.0),
                        gain_diff_db=float(abs(g[0] - g[1])))


def _order_pair(u: int, v: int, gains: dict) -> tuple:
    """Strong user first: higher serving gain, lowest index on ties."""
    if (gains[v], -v) > (gains[u], -u):
        u, v = v, u
    return (u, v)


def _greedy_pairs(cand, objective):
    """Repeatedly pick the best remaining pair under ``objective`` (smaller
    is better); ties resolve to the lexicographically smallest index pair."""
    remaining = sorted(cand)
    chosen = []
    while len(remaining) >= 2:
        best = min(
            ((objective(u, v), (u, v))
             for u, v in itertools.combinations(remaining, 2)),
            key=lambda t: (t[0], t[1]))
        u, v = best[1]
        chosen.append((u, v))
        remaining.remove(u)
        remaining.remove(v)
    return chosen, remaining


#: beam sizes up to which the greedy pairing is checked (and repaired)
#: against the exhaustive objective optimum
EXACT_PAIRING_LIMIT = 8


def _exact_pairs(cand, objective):
    """Exhaustive minimum-total-objective pairing (small beams only).

    Returns (pairs, leftover_list, total). Odd counts enumerate every
    leftover choice. Among equal totals the first enumerated (lexicographic)
    pairing wins.
    """
    cand = sorted(cand)
    if len(cand) % 2:
        options = [([v for v in cand if v != u], [u]) for u in cand]
    else:
        options = [(cand, [])]
    best = None
    for items, leftover in options:
        for pairing in _perfect_pairings(items):
            total = sum(objective(u, v) for u, v in pairing)
            if best is None or total < best[2] - 1e-12:
                best = (list(pairing), leftover, total)
    return best


def pair_users(h, candidates, strategy: str, seed=None) -> Schedule:
    """Pair each beam's candidates into (strong, weak) slots.

    ``candidates[b]`` lists the user rows assigned to beam b (serving feed b).
    min_gain_diff picks pairs with the smallest |gain difference| in dB,
    max_gain_diff the largest, collinear_min_gain the highest
    collinearity − 0.1·gain_diff composite, random pairs uniformly from
    ``seed``. Within a pair the stronger user (by serving-feed power) comes
    first; slots are ordered by the pairs' sorted index tuples.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    rows = _rows(h)
    rng = np.random.default_rng(seed)
    beams = []
    for feed, cand in enumerate(candidates):
        cand = [int(u) for u in cand]
        if len(cand) < 2:
            raise InsufficientUsersError(
                f"beam {feed} has {len(cand)} candidate(s); pairing needs >= 2")
        if len(set(cand)) != len(cand):
            raise ValueError(f"beam {feed} lists a candidate twice")
        g = serving_gains_db(rows, cand, feed)
        gains = dict(zip(cand, g))

        if strategy == "random":
            perm = [cand[i] for i in rng.permutation(len(cand))]
            pairs = [(perm[i], perm[i + 1]) for i in range(0, len(perm) - 1, 2)]
            leftover = [perm[-1]] if len(perm) % 2 else []
        else:
            if strategy == "min_gain_diff":
                def objective(u, v):
                    return abs(gains[u] - gains[v])
            elif strategy == "max_gain_diff":
                def objective(u, v):
                    return -abs(gains[u] - gains[v])
            else:
                def objective(u, v):
                    return -pairing_score(rows, u, v, feed).composite()
            pairs, leftover = _greedy_pairs(cand, objective)
            # small beams: fall back to the exhaustive optimum when greedy
            # leaves total objective on the table (it can; e.g. gains
            # {0, 2, 3, 10} pair best as (0,2)+(3,10), greedy takes (2,3)).
            if 2 < len(cand) <= EXACT_PAIRING_LIMIT:
                greedy_total = sum(objective(u, v) for u, v in pairs)
                exact = _exact_pairs(cand, objective)
                if exact[2] < greedy_total - 1e-12:
                    pairs, leftover = exact[0], exact[1]

        slots = sorted(tuple(sorted(p)) for p in pairs)
        beam = [_order_pair(u, v, gains) for u, v in slots]
        beam.extend((u, None) for u in leftover)
        beams.append(tuple(beam))
    sched = Schedule(pairs=tuple(beams), strategy=strategy)
    _check_partition(sched, candidates)
    return sched


def _check_partition(sched: Schedule, candidates) -> None:
    want = sorted(int(u) for cand in candidates for u in cand)
    got = sorted(sched.users())
    if want != got:
        raise AssertionError("schedule does not cover each candidate exactly once")


def group_min_euclidean(h, candidates, group_size: int):
    """Greedy minimum-Euclidean-distance grouping of normalized channel rows.

    Per beam: seed a group with the closest remaining pair, grow it with the
    candidate closest to any member until ``group_size``, then repeat on the
    remainder (a final short group keeps the partition property). Ties break
    on the lowest index.
    """
    if group_size < 1:
        raise ValueError("group_size must be >= 1")
    rows = _rows(h)
    out = []
    for cand in candidates:
        cand = [int(u) for u in cand]
        if len(cand) < group_size:
            raise InsufficientUsersError(
                f"{len(cand)} candidate(s) cannot form a group of {group_size}")
        unit = {u: rows[u] / np.linalg.norm(rows[u]) for u in cand}

        def dist(u, v):
            return float(np.linalg.norm(unit[u] - unit[v]))

        remaining = sorted(cand)
        groups = []
        while remaining:
            if group_size == 1 or len(remaining) == 1:
                groups.append([remaining.pop(0)])
                continue
            _, (u, v) = min(((dist(u, v), (u, v))
                             for u, v in itertools.combinations(remaining, 2)),
                            key=lambda t: (t[0], t[1]))
            group = [u, v]
            remaining.remove(u)
            remaining.remove(v)
            while len(group) < group_size and remaining:
                _, w = min(((min(dist(w, m) for m in group), w)
                            for w in remaining), key=lambda t: (t[0], t[1]))
                group.append(w)
                remaining.remove(w)
            groups.append(sorted(group))
        out.append(groups)
    return out


def _perfect_pairings(items):
    """All perfect pairings of ``items`` in lexicographic order (odd leftover
    handled by the caller); each pairing is a tuple of sorted index pairs."""
    items = sorted(items)
    if not items:
        yield ()
        return
    first = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1:]
        for sub in _perfect_pairings(rest):
            yield ((first, items[i]),) + sub


def _pairing_count(n: int) -> int:
    """Perfect pairings of n items: (n-1)!! for even n, and n!! for odd n
    (the choice of leftover singleton counts)."""
    out = 1
    start = n - 1 if n % 2 == 0 else n
    while start > 1:
        out *= start
        start -= 2
    return out


def brute_force_pairing(h, candidates, evaluator):
    """Exhaustively search all joint per-beam perfect pairings.

    Builds every combination of per-beam pairings (slots aligned by sorted
    pair order, as in :func:`pair_users`), scores each Schedule with
    ``evaluator(schedule) -> sum rate``, and returns ``(best, rate)``. Ties
    keep the lexicographically first pairing. Instances whose joint count
    exceeds ``BRUTE_FORCE_LIMIT`` raise SizeLimitError.
    """
    rows = _rows(h)
    cands = [[int(u) for u in c] for c in candidates]
    for feed, cand in enumerate(cands):
        if len(cand) < 2:
            raise InsufficientUsersError(
                f"beam {feed} has {len(cand)} candidate(s); pairing needs >= 2")
    total = 1
    for cand in cands:
        total *= _pairing_count(len(cand))
    if total > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(
            f"{total} joint pairings exceed the enumeration limit "
            f"({BRUTE_FORCE_LIMIT})")

    per_beam = []
    for feed, cand in enumerate(cands):
        g = serving_gains_db(rows, cand, feed)
        gains = dict(zip(cand, g))
        cand = sorted(cand)
        if len(cand) % 2:
            options = []
            for u in cand:
                rest = [v for v in cand if v != u]
                options.extend((p, u) for p in _perfect_pairings(rest))
        else:
            options = [(p, None) for p in _perfect_pairings(cand)]
        # order each option's slots once, outside the joint product
        ordered = []
        for pairing, leftover in options:
            slots = [_order_pair(u, v, gains) for u, v in sorted(pairing)]
            if leftover is not None:
                slots.append((leftover, None))
            ordered.append(tuple(slots))
        per_beam.append(ordered)

    best = None
    best_rate = -np.inf
    for combo in itertools.product(*per_beam):
        sched = Schedule(pairs=combo, strategy="brute_force")
        rate = float(evaluator(sched))
        if rate > best_rate:
            best, best_rate = sched, rate
    _check_partition(best, cands)
    return best, best_rate
