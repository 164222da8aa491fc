"""Two-user achievable rate regions for the decoding strategies of the model.

Covers interference-as-noise (single-user decoding), simultaneous decoding,
their per-receiver union (simultaneous non-unique decoding), power-domain
NOMA superposition on a degraded broadcast link, Han-Kobayashi rate
splitting over a fixed split grid, and the power-preserving orthogonal
(FDM/TDM) baseline.

A region is represented by a sampled Pareto boundary (>= 200 support
directions plus the exact vertices/grid points of the construction) together
with an exact membership predicate used by containment queries. All rates
are in b/s/Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: default sweep step for beta / lambda / alpha grids
GRID_STEP = 0.02
#: default tolerance (b/s/Hz) for region comparisons
RATE_TOL = 1e-6
#: default number of support directions for boundary sampling
N_SUPPORT = 201


def capacity(x):
    """Shannon rate log2(1+x) of a Gaussian link at (SI)NR ``x``."""
    return np.log2(1.0 + np.asarray(x, dtype=float))


def rate_ian(snr, inr):
    """Rate with interference treated as noise: log2(1 + snr/(1+inr))."""
    snr = np.asarray(snr, dtype=float)
    inr = np.asarray(inr, dtype=float)
    if np.any(snr < 0) or np.any(inr < 0):
        raise ValueError("snr and inr must be non-negative")
    return capacity(snr / (1.0 + inr))


@dataclass(frozen=True)
class LinkPair:
    """Two-user link budget: direct SNRs s1, s2 and cross INRs i1, i2 (linear).

    i_k is the interference power seen at receiver k.
    """

    s1: float
    s2: float
    i1: float
    i2: float

    def __post_init__(self):
        vals = (self.s1, self.s2, self.i1, self.i2)
        if any((not math.isfinite(v)) or v < 0 for v in vals):
            raise ValueError("link budget values must be finite and >= 0")

    def swapped(self) -> "LinkPair":
        return LinkPair(self.s2, self.s1, self.i2, self.i1)


@dataclass(frozen=True)
class BcNomaParams:
    """Single-beam NOMA broadcast parameters: total power and ordered gains."""

    p: float
    g_s: float
    g_w: float

    def __post_init__(self):
        if self.g_w < 0 or self.g_s < self.g_w:
            raise ValueError("gain ordering violated: need g_s >= g_w >= 0")
        if self.p < 0:
            raise ValueError("power must be non-negative")


@dataclass
class RateRegion:
    """Achievable rate-pair set with a sampled Pareto boundary.

    ``boundary`` holds mutually non-dominated points sorted by r1 ascending;
    ``points`` the full achievable sample cloud behind it. ``contains_fn`` is
    the exact membership predicate of the construction, vectorized over an
    (m, 2) array of rate pairs.
    """

    points: np.ndarray
    boundary: np.ndarray
    strategy: str
    params: dict = field(default_factory=dict)
    contains_fn: object = field(default=None, repr=False, compare=False)

    def contains_point(self, r1: float, r2: float, tol: float = 0.0) -> bool:
        """True if (r1, r2) is achievable within ``tol`` per coordinate."""
        p = np.array([max(r1 - tol, 0.0), max(r2 - tol, 0.0)])
        dom = (self.boundary[:, 0] >= p[0]) & (self.boundary[:, 1] >= p[1])
        if dom.any():
            return True
        if self.contains_fn is not None:
            return bool(self.contains_fn(p[None, :])[0])
        return False

    def max_sum_rate(self) -> float:
        return float(np.max(self.boundary.sum(axis=1)))


def _pareto_prune(points: np.ndarray) -> np.ndarray:
    """Maximal points of a cloud, sorted by r1 ascending (r2 non-increasing)."""
    pts = np.asarray(points, dtype=float)
    pts = pts[np.all(np.isfinite(pts), axis=1) & np.all(pts >= 0, axis=1)]
    if len(pts) == 0:
        return np.zeros((1, 2))
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))  # r1 desc, then r2 desc
    pts = pts[order]
    keep = []
    best_r2 = -np.inf
    for p in pts:
        if p[1] > best_r2:
            keep.append(p)
            best_r2 = p[1]
    out = np.array(keep[::-1])
    # drop duplicates introduced by exact vertices coinciding with ray samples
    _, idx = np.unique(out.round(decimals=15), axis=0, return_index=True)
    return out[np.sort(idx)]


def _ray_boundary(contains_fn, cap: float, n_dirs: int = N_SUPPORT,
                  iters: int = 60) -> np.ndarray:
    """Sample the region outline along ``n_dirs`` support directions.

    Bisects the largest achievable radius along each direction; the returned
    points are the inner bisection endpoints, hence guaranteed achievable.
    """
    phi = np.linspace(0.0, math.pi / 2.0, n_dirs)
    d = np.column_stack([np.cos(phi), np.sin(phi)])
    lo = np.zeros(n_dirs)
    hi = np.full(n_dirs, max(cap, 1e-12))
    # grow hi until outside (cap should already cover the region)
    for _ in range(8):
        inside = contains_fn(hi[:, None] * d)
        if not inside.any():
            break
        hi[inside] *= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        inside = contains_fn(mid[:, None] * d)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return lo[:, None] * d


def _box_sum_vertices(a: float, b: float, s: float) -> list:
    """Pareto vertices of {0 <= r1 <= a, 0 <= r2 <= b, r1 + r2 <= s}."""
    if s >= a + b:
        return [(a, b)]
    r1m = min(a, s)
    r2m = min(b, s)
    return [(r1m, min(b, s - r1m)), (min(a, s - r2m), r2m)]


def _assemble(strategy, params, contains_fn, special, cap, n_dirs):
    special = np.asarray(special, dtype=float).reshape(-1, 2)
    special = special[np.all(special >= 0, axis=1)]
    rays = _ray_boundary(contains_fn, cap, n_dirs)
    pts = np.vstack([rays, special]) if len(special) else rays
    return RateRegion(points=pts, boundary=_pareto_prune(pts), strategy=strategy,
                      params=params, contains_fn=contains_fn)


def region_two_user(link: LinkPair, mode: str, n_dirs: int = N_SUPPORT) -> RateRegion:
    """Two-user interference-channel region for mode in {ian, sd, snd}.

    ian: both receivers treat the cross signal as noise (a rectangle).
    sd: both receivers jointly decode both messages (intersection of the two
    receiver MAC pentagons).
    snd: each receiver either treats interference as noise or jointly decodes
    it with the constraint on the other rate alone removed; the region is the
    intersection over receivers of those two-branch unions.
    """
    s1, s2, i1, i2 = link.s1, link.s2, link.i1, link.i2
    a1 = float(capacity(s1 / (1.0 + i1)))
    a2 = float(capacity(s2 / (1.0 + i2)))
    A1, A2 = float(capacity(s1)), float(capacity(s2))
    B1, B2 = float(capacity(i1)), float(capacity(i2))
    S1 = float(capacity(s1 + i1))
    S2 = float(capacity(s2 + i2))
    params = {"s1": s1, "s2": s2, "i1": i1, "i2": i2, "mode": mode}
    cap = A1 + A2 + 1.0

    if mode == "ian":
        def contains(pts):
            return (pts[:, 0] <= a1) & (pts[:, 1] <= a2)

        special = [(a1, a2), (a1, 0.0), (0.0, a2)]
        return _assemble("ian", params, contains, special, cap, n_dirs)

    if mode == "sd":
        r1_cap = min(A1, B2)
        r2_cap = min(A2, B1)
        s_cap = min(S1, S2)

        def contains(pts):
            return ((pts[:, 0] <= r1_cap) & (pts[:, 1] <= r2_cap)
                    & (pts.sum(axis=1) <= s_cap))

        special = _box_sum_vertices(r1_cap, r2_cap, s_cap)
        return _assemble("sd", params, contains, special, cap, n_dirs)

    if mode == "snd":
        def contains(pts):
            r1, r2 = pts[:, 0], pts[:, 1]
            u1 = (r1 <= a1) | ((r1 <= A1) & (r1 + r2 <= S1))
            u2 = (r2 <= a2) | ((r2 <= A2) & (r1 + r2 <= S2))
            return u1 & u2

        # vertices of the four branch-intersection polytopes
        special = [(a1, a2)]
        special += _box_sum_vertices(a1, A2, S2)
        special += _box_sum_vertices(A1, a2, S1)
        special += _box_sum_vertices(A1, A2, min(S1, S2))
        return _assemble("snd", params, contains, special, cap, n_dirs)

    raise ValueError(f"unknown mode {mode!r}")


def region_noma_bc(params: BcNomaParams, betas=None, n_dirs: int = N_SUPPORT) -> RateRegion:
    """Superposition region of single-beam power-domain NOMA.

    For each power split beta (fraction to the weak user) the operating point
    is r_w = C(beta*p*g_w / (1 + (1-beta)*p*g_w)) and r_s = C((1-beta)*p*g_s)
    (the strong user decodes and cancels the weak message first). The region
    is the union over the grid; points are (r1, r2) = (r_w, r_s).
    """
    if betas is None:
        betas = np.linspace(0.0, 1.0, round(1.0 / GRID_STEP) + 1)
    betas = np.asarray(betas, dtype=float)
    if len(betas) == 0:
        raise ValueError("beta grid must be non-empty")
    if np.any((betas < 0) | (betas > 1)):
        raise ValueError("beta values must lie in [0, 1]")
    p, g_s, g_w = params.p, params.g_s, params.g_w
    r_w = capacity(betas * p * g_w / (1.0 + (1.0 - betas) * p * g_w))
    r_s = capacity((1.0 - betas) * p * g_s)
    grid_pts = np.column_stack([r_w, r_s])

    def contains(pts):
        dom = (grid_pts[None, :, 0] >= pts[:, 0, None]) & \
              (grid_pts[None, :, 1] >= pts[:, 1, None])
        return dom.any(axis=1)

    reg = _assemble("noma_bc", {"p": p, "g_s": g_s, "g_w": g_w}, contains,
                    grid_pts, float(capacity(p * g_s) + capacity(p * g_w) + 1.0),
                    n_dirs)
    return reg


def _hk_bounds(link: LinkPair, splits: np.ndarray):
    """Vectorized seven-inequality bounds for each (lam1, lam2) split."""
    s1, s2, i1, i2 = link.s1, link.s2, link.i1, link.i2
    l1, l2 = splits[:, 0], splits[:, 1]
    d1 = 1.0 + l2 * i1
    d2 = 1.0 + l1 * i2
    g1 = capacity(s1 / d1)
    g2 = capacity(s2 / d2)
    t_a = capacity((s1 + (1.0 - l2) * i1) / d1) + capacity(l2 * s2 / d2)
    t_b = capacity(l1 * s1 / d1) + capacity((s2 + (1.0 - l1) * i2) / d2)
    t_c = capacity((l1 * s1 + (1.0 - l2) * i1) / d1) + \
        capacity((l2 * s2 + (1.0 - l1) * i2) / d2)
    g12 = np.minimum(np.minimum(t_a, t_b), t_c)
    g112 = capacity((s1 + (1.0 - l2) * i1) / d1) + capacity(l1 * s1 / d1) + \
        capacity((l2 * s2 + (1.0 - l1) * i2) / d2)
    g122 = capacity((s2 + (1.0 - l1) * i2) / d2) + capacity(l2 * s2 / d2) + \
        capacity((l1 * s1 + (1.0 - l2) * i1) / d1)
    return g1, g2, g12, g112, g122


def _hk_vertices(g1, g2, g12, g112, g122):
    """Pareto-candidate vertices of each split's polytope, stacked."""
    z = np.zeros_like(g1)
    cands = [
        (g1, g2),
        (g1, g12 - g1), (g1, g112 - 2.0 * g1), (g1, (g122 - g1) / 2.0),
        (g12 - g2, g2), ((g112 - g2) / 2.0, g2), (g122 - 2.0 * g2, g2),
        (g112 - g12, 2.0 * g12 - g112),          # sum & 2r1+r2 faces
        (2.0 * g12 - g122, g122 - g12),          # sum & r1+2r2 faces
        ((2.0 * g112 - g122) / 3.0, (2.0 * g122 - g112) / 3.0),
        (np.minimum.reduce([g1, g12, g112 / 2.0, g122]), z),
        (z, np.minimum.reduce([g2, g12, g122 / 2.0, g112])),
    ]
    n = len(g1)
    pts = np.empty((len(cands), n, 2))
    for j, (x, y) in enumerate(cands):
        pts[j, :, 0] = x
        pts[j, :, 1] = y
    feas = (
        (pts[:, :, 0] >= -1e-12) & (pts[:, :, 1] >= -1e-12)
        & (pts[:, :, 0] <= g1 + 1e-12) & (pts[:, :, 1] <= g2 + 1e-12)
        & (pts.sum(axis=2) <= g12 + 1e-12)
        & (2.0 * pts[:, :, 0] + pts[:, :, 1] <= g112 + 1e-12)
        & (pts[:, :, 0] + 2.0 * pts[:, :, 1] <= g122 + 1e-12)
    )
    out = pts[feas]
    return np.clip(out, 0.0, None)


def region_hk(link: LinkPair, splits=None, n_dirs: int = N_SUPPORT) -> RateRegion:
    """Han-Kobayashi rate-splitting region, union over a grid of fixed splits.

    Each split (lam1, lam2) gives the compact seven-inequality achievable
    polytope with Gaussian inputs and private-power fractions lam; the region
    is the union over the grid (no time sharing). lam1 = lam2 = 1 reduces to
    the interference-as-noise rectangle.
    """
    if splits is None:
        grid = np.linspace(0.0, 1.0, round(1.0 / GRID_STEP) + 1)
        l1, l2 = np.meshgrid(grid, grid, indexing="ij")
        splits = np.column_stack([l1.ravel(), l2.ravel()])
    splits = np.atleast_2d(np.asarray(splits, dtype=float))
    if splits.size == 0:
        raise ValueError("split grid must be non-empty")
    if np.any((splits < 0) | (splits > 1)):
        raise ValueError("split fractions must lie in [0, 1]")
    bounds = _hk_bounds(link, splits)
    g1, g2, g12, g112, g122 = bounds

    def contains(pts):
        r1, r2 = pts[:, 0, None], pts[:, 1, None]
        ok = ((r1 <= g1) & (r2 <= g2) & (r1 + r2 <= g12)
              & (2.0 * r1 + r2 <= g112) & (r1 + 2.0 * r2 <= g122))
        return ok.any(axis=1)

    special = _hk_vertices(*bounds)
    cap = float(np.max(g1) + np.max(g2) + 1.0)
    params = {"s1": link.s1, "s2": link.s2, "i1": link.i1, "i2": link.i2,
              "splits": len(splits)}
    return _assemble("hk", params, contains, special, cap, n_dirs)


def region_orthogonal(link: LinkPair, alphas=None, n_dirs: int = N_SUPPORT) -> RateRegion:
    """Power-preserving orthogonal sharing (FDM with per-Hz power scaling).

    User 1 gets a fraction alpha of the band with its full power concentrated
    there: (alpha*C(s1/alpha), (1-alpha)*C(s2/(1-alpha))), with the limiting
    single-user endpoints at alpha in {0, 1}. Independent of the INRs.
    """
    if alphas is None:
        alphas = np.linspace(0.0, 1.0, round(1.0 / GRID_STEP) + 1)
    alphas = np.asarray(alphas, dtype=float)
    if len(alphas) == 0:
        raise ValueError("alpha grid must be non-empty")
    if np.any((alphas < 0) | (alphas > 1)):
        raise ValueError("share fractions must lie in [0, 1]")
    s1, s2 = link.s1, link.s2
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(alphas > 0, alphas * capacity(s1 / np.where(alphas > 0, alphas, 1.0)), 0.0)
        r2 = np.where(alphas < 1, (1.0 - alphas)
                      * capacity(s2 / np.where(alphas < 1, 1.0 - alphas, 1.0)), 0.0)
    grid_pts = np.column_stack([r1, r2])

    def contains(pts):
        dom = (grid_pts[None, :, 0] >= pts[:, 0, None]) & \
              (grid_pts[None, :, 1] >= pts[:, 1, None])
        return dom.any(axis=1)

    params = {"s1": s1, "s2": s2}
    return _assemble("orthogonal", params, contains, grid_pts,
                     float(capacity(s1) + capacity(s2) + 1.0), n_dirs)


def region_contains(outer: RateRegion, inner: RateRegion, tol: float = RATE_TOL) -> bool:
    """True iff every boundary point of ``inner`` is achievable in ``outer``
    within ``tol`` per coordinate.

    A point passes if it is dominated by a sampled boundary point of the outer
    region (within tol) or accepted by the outer region's exact membership
    predicate after the tol shift; both tests are sound, and their union
    removes the false rejections a finite boundary sample would cause.
    """
    ib = inner.boundary
    ob = outer.boundary
    dom = (ob[None, :, 0] >= ib[:, 0, None] - tol) & \
          (ob[None, :, 1] >= ib[:, 1, None] - tol)
    ok = dom.any(axis=1)
    if ok.all():
        return True
    if outer.contains_fn is None:
        return False
    rest = np.clip(ib[~ok] - tol, 0.0, None)
    return bool(np.all(outer.contains_fn(rest)))
