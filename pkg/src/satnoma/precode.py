"""Linear precoding under per-feed power limits, and layered transmission.

Zero-forcing and regularized zero-forcing precoders on selected user rows,
uniform per-stream power with a single scalar enforcing the per-feed radiated
power limit, post-precoding SINR tables, two-layer NOMA-over-precoding rate
evaluation (single-user or simultaneous non-unique decoding of the intrabeam
pair), joint broadcast+multicast (K+1)-stream rates, and the feeder-link
bandwidth accounting of the three transmission schemes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .chanmodel import ChannelMatrix
from .regions import capacity

#: condition number beyond which a selected channel is treated as singular
COND_LIMIT = 1e8


class SingularChannelError(ValueError):
    """Selected user rows are too close to rank deficiency to invert."""


@dataclass(frozen=True)
class Precoder:
    """Streams × feeds precoding matrix with per-stream powers.

    Rows of ``w`` are unit-norm stream directions, so ``stream_power[s]`` is
    the power (W) radiated by stream s and the load of feed n is
    ``sum_s |w[s, n]|^2 * stream_power[s]``. ``layer_split`` optionally holds
    the per-beam fraction of the stream power assigned to the weak layer of a
    two-layer superposed transmission.
    """

    w: np.ndarray
    stream_power: np.ndarray
    layer_split: np.ndarray | None = None

    def feed_loads(self) -> np.ndarray:
        return (np.abs(self.w) ** 2 * self.stream_power[:, None]).sum(axis=0)


def _as_rows(h) -> np.ndarray:
    if isinstance(h, ChannelMatrix):
        return h.h
    return np.asarray(h)


def zf_matrix(h) -> np.ndarray:
    """Raw zero-forcing matrix h^H (h h^H)^(-1), feeds × streams."""
    h = _as_rows(h)
    gram = h @ h.conj().T
    return np.linalg.solve(gram, h).conj().T


def rzf_matrix(h, alpha: float) -> np.ndarray:
    """Raw regularized inverse h^H (h h^H + alpha*I)^(-1), feeds × streams."""
    h = _as_rows(h)
    gram = h @ h.conj().T + alpha * np.eye(h.shape[0])
    return np.linalg.solve(gram, h).conj().T


def _normalized_precoder(raw: np.ndarray, stream_power) -> Precoder:
    w = raw.T.copy()
    norms = np.linalg.norm(w, axis=1)
    if np.any(norms == 0):
        raise SingularChannelError("zero-norm precoding direction")
    w /= norms[:, None]
    p = np.broadcast_to(np.asarray(stream_power, dtype=float), (w.shape[0],)).copy()
    return Precoder(w=w, stream_power=p)


def zf_precoder(h) -> Precoder:
    """Zero-forcing precoder on the selected K×N rows, uniform stream power.

    ``h @ w.T`` is diagonal before power scaling; run
    :func:`enforce_per_feed_power` afterwards to meet the radiated limit.
    """
    rows = _as_rows(h)
    if np.linalg.cond(rows) > COND_LIMIT:
        raise SingularChannelError(
            f"channel condition number exceeds {COND_LIMIT:g}")
    return _normalized_precoder(zf_matrix(rows), 1.0)


def rzf_precoder(h, noise: float, p_total: float) -> Precoder:
    """Regularized ZF with alpha = K*noise/p_total and uniform stream powers."""
    rows = _as_rows(h)
    k = rows.shape[0]
    alpha = k * noise / p_total
    return _normalized_precoder(rzf_matrix(rows, alpha), p_total / k)


def enforce_per_feed_power(prec: Precoder, p_feed: float) -> Precoder:
    """Scale all stream powers uniformly so the most loaded feed radiates
    exactly ``p_feed``; relative stream structure is preserved."""
    loads = prec.feed_loads()
    peak = float(np.max(loads))
    if peak <= 0.0:
        raise ValueError("cannot enforce a power limit on an all-zero precoder")
    return replace(prec, stream_power=prec.stream_power * (p_feed / peak))


@dataclass(frozen=True)
class SinrTable:
    """Received stream powers and per-user SINR of the intended stream."""

    rx_power: np.ndarray   # users × streams, linear
    sinr: np.ndarray       # per user, intended stream
    residual: np.ndarray   # per user, total non-intended received power
    intended: np.ndarray   # per user, intended stream index


def rx_powers(h, prec: Precoder) -> np.ndarray:
    """Received power of each stream at each user: |h[u]·w[s]|^2 * p[s]."""
    amp = _as_rows(h) @ prec.w.T
    return np.abs(amp) ** 2 * prec.stream_power[None, :]


def sinr_table(h, prec: Precoder, noise: float = 1.0, intended=None) -> SinrTable:
    """Per-user SINR of the intended stream under the given precoder.

    ``intended`` maps user index → stream index; by default user u listens to
    stream u (requires as many streams as users).
    """
    rx = rx_powers(h, prec)
    n_users, n_streams = rx.shape
    if intended is None:
        if n_users != n_streams:
            raise ValueError("default intended map needs square user/stream count")
        intended = np.arange(n_users)
    intended = np.asarray(intended, dtype=int)
    users = np.arange(n_users)
    wanted = rx[users, intended]
    unwanted = rx.copy()
    unwanted[users, intended] = 0.0     # summed directly: tiny residuals
    residual = unwanted.sum(axis=1)     # would cancel out of sum - wanted
    return SinrTable(rx_power=rx, sinr=wanted / (noise + residual),
                     residual=residual, intended=intended)


def _snd_pair_rates(x_s, y_s, x_w, y_w):
    """Max-sum operating point of the intrabeam pair under per-receiver
    union (IAN or joint-decoding) constraints; vectorized over beams.

    x/y are own-layer and other-layer received powers already normalized by
    (noise + interbeam residual) at each receiver. Returns (r_s, r_w).
    """
    a_s = capacity(x_s / (1.0 + y_s))
    A_s = capacity(x_s)
    T_s = capacity(x_s + y_s)
    a_w = capacity(x_w / (1.0 + y_w))
    A_w = capacity(x_w)
    T_w = capacity(x_w + y_w)
    # per-combo (sum, strong bound, weak bound); combo order is the tie-break
    sums = np.stack([
        a_s + a_w,
        np.minimum(a_s + A_w, T_w),
        np.minimum(A_s + a_w, T_s),
        np.minimum.reduce([A_s + A_w, T_s, T_w]),
    ])
    bw = np.stack([a_w, A_w, a_w, A_w])
    best = np.argmax(sums, axis=0)[None]
    total = np.take_along_axis(sums, best, axis=0)[0]
    r_w = np.minimum(np.take_along_axis(bw, best, axis=0)[0], total)
    r_s = total - r_w   # weak-first split of the sum
    return r_s, r_w


def layered_rates(h, pairs, prec: Precoder, decoder: str = "sud",
                  noise: float = 1.0) -> np.ndarray:
    """Per-user rates (b/s/Hz) of two-layer NOMA over a K-stream precoder.

    ``pairs[b] = (strong, weak)`` gives the user rows superposed on stream b
    with the weak-layer power fraction ``prec.layer_split[b]``. The weak user
    always treats the strong layer as noise. With decoder="sud" the strong
    user cancels the weak layer if it can decode it at the weak user's rate,
    otherwise treats it as noise; with decoder="snd" the pair operates at the
    max-sum point of the per-receiver union (treat-as-noise or joint
    decoding) constraints.

    Returns an array over all channel rows; users outside ``pairs`` get 0.
    """
    if decoder not in ("sud", "snd"):
        raise ValueError(f"unknown decoder {decoder!r}")
    if prec.layer_split is None:
        raise ValueError("precoder carries no layer_split")
    beta = np.asarray(prec.layer_split, dtype=float)
    rows = _as_rows(h)
    strong, weak, q_s, q_w, j_s, j_w = _pair_ingredients(rows, pairs, prec)
    r_s, r_w = _pair_rates(beta, q_s, q_w, j_s, j_w, decoder, noise)
    out = np.zeros(rows.shape[0])
    out[strong] = r_s
    out[weak] = r_w
    return out


def _pair_ingredients(rows, pairs, prec):
    """Serving-stream powers (q) and interbeam residuals (j) of each pair."""
    rx = rx_powers(rows, prec)
    strong = np.array([p[0] for p in pairs], dtype=int)
    weak = np.array([p[1] for p in pairs], dtype=int)
    streams = np.arange(len(pairs))
    q_s = rx[strong, streams]
    q_w = rx[weak, streams]
    if np.any(q_s < q_w):
        raise ValueError("pair ordering violated: strong user has the lower "
                         "serving-stream power")
    j_s = rx[strong].sum(axis=1) - q_s
    j_w = rx[weak].sum(axis=1) - q_w
    return strong, weak, q_s, q_w, j_s, j_w


def _pair_rates(beta, q_s, q_w, j_s, j_w, decoder, noise):
    """Layered pair rates from the SINR ingredients; broadcasts over beta."""
    r_w = capacity(beta * q_w / (noise + (1.0 - beta) * q_w + j_w))
    if decoder == "sud":
        weak_at_strong = capacity(beta * q_s / (noise + (1.0 - beta) * q_s + j_s))
        can_cancel = weak_at_strong >= r_w
        r_s = np.where(can_cancel,
                       capacity((1.0 - beta) * q_s / (noise + j_s)),
                       capacity((1.0 - beta) * q_s / (noise + beta * q_s + j_s)))
    else:
        ns = noise + j_s
        nw = noise + j_w
        r_s, r_w = _snd_pair_rates((1.0 - beta) * q_s / ns, beta * q_s / ns,
                                   beta * q_w / nw, (1.0 - beta) * q_w / nw)
    return r_s, r_w


def best_layer_split(h, pairs, prec: Precoder, decoder: str = "sud",
                     step: float = 0.02, noise: float = 1.0):
    """Grid-search the per-beam weak-layer power fraction maximizing the pair
    sum rate, and return (precoder with the chosen split, per-user rates).

    The search is independent per beam; ties resolve to the smallest beta.
    """
    if decoder not in ("sud", "snd"):
        raise ValueError(f"unknown decoder {decoder!r}")
    betas = np.linspace(0.0, 1.0, round(1.0 / step) + 1)
    k = len(pairs)
    _, _, q_s, q_w, j_s, j_w = _pair_ingredients(_as_rows(h), pairs, prec)
    r_s, r_w = _pair_rates(betas[:, None], q_s, q_w, j_s, j_w, decoder, noise)
    sums = r_s + r_w                       # grid × beams
    best_beta = np.zeros(k)
    best_sum = np.full(k, -1.0)
    for i, b in enumerate(betas):
        improved = sums[i] > best_sum + 1e-15
        best_beta[improved] = b
        best_sum[improved] = sums[i][improved]
    chosen = replace(prec, layer_split=best_beta)
    return chosen, layered_rates(h, pairs, chosen, decoder, noise)


def equal_gain_common_row(rows: np.ndarray) -> np.ndarray:
    """Unit-norm equal-gain combination of the given channel directions."""
    rows = np.asarray(rows)
    norms = np.linalg.norm(rows, axis=1)
    if np.any(norms == 0):
        raise ValueError("cannot combine a zero channel row")
    c = (rows / norms[:, None]).sum(axis=0)
    nc = np.linalg.norm(c)
    if nc < 1e-12:          # pathological phase cancellation
        c = rows[0] / norms[0]
        nc = 1.0
    return c / nc


def broadcast_multicast_precoder(rep_rows: np.ndarray, all_rows: np.ndarray,
                                 common_fraction: float) -> Precoder:
    """(K+1)-stream precoder: an equal-gain common row over ``all_rows``
    followed by ZF private rows built from the per-beam representatives.

    Stream powers carry ``common_fraction`` of the (unit) total on the common
    stream and split the rest uniformly across the K private streams; scale
    with :func:`enforce_per_feed_power` afterwards.
    """
    if not 0.0 <= common_fraction <= 1.0:
        raise ValueError("common_fraction must lie in [0, 1]")
    private = zf_precoder(rep_rows)
    common = equal_gain_common_row(all_rows)
    k = private.w.shape[0]
    w = np.vstack([common[None, :], private.w])
    p_priv = (1.0 - common_fraction) / k
    powers = np.concatenate([[common_fraction], np.full(k, p_priv)])
    return Precoder(w=w, stream_power=powers)


def broadcast_multicast_rates(h, prec: Precoder, common_fraction: float,
                              groups=None, noise: float = 1.0):
    """Rates of the joint broadcast + multicast transmission.

    Stream 0 is the common (broadcast) stream; its power share is set to
    ``common_fraction`` of the precoder's total stream power, the private
    streams splitting the rest uniformly, and the whole power vector is then
    rescaled so the peak feed load matches the incoming precoder's (the
    enforced limit is preserved across the sweep). Every user decodes the
    common stream first (rate = min over users of its SINR rate), cancels it,
    and then decodes its beam's private stream; a private stream's rate is
    the min over its group (multicast).

    Returns (common_rate, private_rates per beam), b/s/Hz.
    """
    if not 0.0 <= common_fraction <= 1.0:
        raise ValueError("common_fraction must lie in [0, 1]")
    rows = _as_rows(h)
    k = prec.w.shape[0] - 1
    if groups is None:
        if rows.shape[0] != k:
            raise ValueError("default groups need one user per private stream")
        groups = [[u] for u in range(rows.shape[0])]
    total = float(prec.stream_power.sum())
    powers = np.concatenate([[common_fraction * total],
                             np.full(k, (1.0 - common_fraction) * total / k)])
    trial = replace(prec, stream_power=powers)
    peak_before = float(np.max(prec.feed_loads()))
    peak_after = float(np.max(trial.feed_loads()))
    if peak_after > 0:
        trial = replace(trial, stream_power=trial.stream_power
                        * (peak_before / peak_after))
    rx = rx_powers(rows, trial)
    private_total = rx[:, 1:].sum(axis=1)
    common_rate = float(np.min(capacity(rx[:, 0] / (noise + private_total))))
    private_rates = np.empty(k)
    for b, members in enumerate(groups):
        members = np.asarray(members, dtype=int)
        other = private_total[members] - rx[members, 1 + b]
        private_rates[b] = float(np.min(capacity(rx[members, 1 + b]
                                                 / (noise + other))))
    return common_rate, private_rates


@dataclass(frozen=True)
class FeederPlan:
    """Feeder-link bandwidth required to carry a scheme's streams."""

    scheme: str
    k: int
    b: float
    total_hz: float


def feeder_bandwidth(scheme: str, k: int, b: float) -> FeederPlan:
    """Feeder bandwidth: B*K (single_layer), 2*B*K (ldm), 2*B*(K+1)
    (broadcast_multicast); exact scaled arithmetic."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not b > 0:
        raise ValueError("b must be positive")
    if scheme == "single_layer":
        total = b * k
    elif scheme == "ldm":
        total = 2.0 * (b * k)
    elif scheme == "broadcast_multicast":
        total = 2.0 * (b * (k + 1))
    else:
        raise ValueError(f"unknown feeder scheme {scheme!r}")
    return FeederPlan(scheme=scheme, k=k, b=b, total_hz=total)
