"""Finite-level thermodynamic formalism over all words of a fixed length.

Every word ``w`` of length ``n`` gets one or two *assigned exponents* drawn
from the fiber field ``x -> chi_n(w, x)``:

* ``MaxOverFiber`` / ``MinOverFiber``: the extremes of the field. The
  positive branch uses the maximum (attained at ``v_+(w)``), the negative
  branch the minimum; for SL(2,R) fibers they are ``+-(2/n) log|P_w|``.
  The two policies differ only in which extreme the unrestricted pressure
  uses.
* ``FixedPoint(x0)``: the single value ``chi_n(w, x0)``.

Exponents are binned on the lattice ``alpha_k = 2*delta*k`` (bin
``[alpha_k - delta, alpha_k + delta]``, ties to the even index); ``k = 0``
is the zero bin and never enters a signed restriction.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from . import linalg2 as la
from .errors import EmptySignClass, InsufficientSupport
from .symbolic import check_budget, partition_ranges, word_block

MAX_OVER_FIBER = "MaxOverFiber"
MIN_OVER_FIBER = "MinOverFiber"

NEGATIVE = "Negative"
POSITIVE = "Positive"
UNRESTRICTED = "Unrestricted"

COUNTING = "Counting"
LEGENDRE_FENCHEL = "LegendreFenchel"

SLOPE_TOL = 0.01


@dataclass(frozen=True)
class FixedPoint:
    x: float

    def __str__(self):
        return f"FixedPoint({self.x!r})"


def default_delta(M, n):
    """Bin half-width ``max(0.02, 2 log M / n)``."""
    return max(0.02, 2.0 * math.log(M) / n)


def default_q_grid():
    return np.linspace(-40.0, 40.0, 321)


def policy_name(x_policy):
    return str(x_policy)


@dataclass(frozen=True)
class WordExponents:
    """Assigned exponents of every word, in lexicographic word order."""

    low: np.ndarray
    high: np.ndarray
    primary: np.ndarray
    n: int
    N: int
    x_policy: object
    M: float


def _block_exponents(entries, N, n, lo, hi, x_policy):
    digits = word_block(N, n, lo, hi)
    a, b, c, d, log_scale = la.batch_product(entries, digits)
    if isinstance(x_policy, FixedPoint):
        ux, uy = la.unit_vector(x_policy.x)
        px = a * ux + b * uy
        py = c * ux + d * uy
        chi = -(np.log(px * px + py * py) + 2.0 * log_scale) / n
        return chi, chi
    s_max, _ = la.singular_values(a, b, c, d)
    top = 2.0 * (np.log(s_max) + log_scale) / n
    # SL(2,R): min |f'| = |P|^-2 exactly
    return -top, top


def word_exponents(sys, n, x_policy=MAX_OVER_FIBER, partitions=1, threads=1, budget=None):
    """Assigned exponents for all ``N**n`` words.

    Work is split into ``partitions`` contiguous rank ranges evaluated on
    ``threads`` workers. Each word's arithmetic is independent of the range it
    falls in, so the result is bit-identical for any partitioning.
    """
    if n < 1:
        raise ValueError("word length must be at least 1")
    if x_policy not in (MAX_OVER_FIBER, MIN_OVER_FIBER) and not isinstance(x_policy, FixedPoint):
        raise ValueError(f"unknown x_policy {x_policy!r}")
    total = check_budget(sys.N, n, budget)
    entries = sys.entries()
    ranges = partition_ranges(total, partitions)

    def run(rng):
        return _block_exponents(entries, sys.N, n, rng[0], rng[1], x_policy)

    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, ranges))
    else:
        parts = [run(r) for r in ranges]
    low = np.concatenate([p[0] for p in parts])
    high = np.concatenate([p[1] for p in parts])
    primary = low if x_policy == MIN_OVER_FIBER else high
    return WordExponents(low, high, primary, n, sys.N, x_policy, sys.M)


def bin_index(values, delta):
    return np.rint(np.asarray(values) / (2.0 * delta)).astype(np.int64)


# -- curves ------------------------------------------------------------------


@dataclass
class SpectrumCurve:
    alpha_grid: np.ndarray
    values: np.ndarray
    n: int
    delta: float
    source: str
    counts: np.ndarray | None = None
    endpoint_flags: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def value_at(self, alpha, atol=1e-9):
        idx = np.flatnonzero(np.abs(self.alpha_grid - alpha) <= atol)
        if idx.size == 0:
            raise KeyError(f"alpha={alpha!r} not on the grid")
        return float(self.values[idx[0]])

    @property
    def populated(self):
        return np.isfinite(self.values)

    def empty_interior_bins(self):
        """Grid indices of empty bins strictly inside the populated range."""
        idx = np.flatnonzero(self.populated)
        if idx.size == 0:
            return np.array([], dtype=int)
        inside = np.arange(idx[0], idx[-1] + 1)
        return inside[~self.populated[inside]]


@dataclass
class PressureCurve:
    q_grid: np.ndarray
    values: np.ndarray
    n: int
    restriction: str
    N: int
    delta: float | None = None
    slope_range: tuple | None = None
    word_count: int | None = None
    meta: dict = field(default_factory=dict)

    def value_at(self, q, atol=1e-12):
        idx = np.flatnonzero(np.abs(self.q_grid - q) <= atol)
        if idx.size == 0:
            raise KeyError(f"q={q!r} not on the grid")
        return float(self.values[idx[0]])


def _alpha_lattice(stats, delta, M):
    bound = 2.0 * math.log(max(M, 1.0))
    if stats.size:
        bound = max(bound, float(np.max(np.abs(stats))))
    k = int(math.ceil(bound / (2.0 * delta) - 1e-12))
    ks = np.arange(-k, k + 1)
    return ks, 2.0 * delta * ks


def histogram(wx, delta):
    """Bin counts of the assigned exponents.

    A word counts once in every bin holding one of its assigned exponents.
    """
    kl = bin_index(wx.low, delta)
    kh = bin_index(wx.high, delta)
    ks, grid = _alpha_lattice(np.concatenate([wx.low, wx.high]), delta, wx.M)
    offset = -ks[0]
    counts = np.bincount(kh + offset, minlength=ks.size)
    distinct = kl != kh
    counts = counts + np.bincount(kl[distinct] + offset, minlength=ks.size)
    return grid, counts[: ks.size].astype(np.int64)


def counting_spectrum(sys, n, delta, x_policy=MAX_OVER_FIBER, partitions=1, threads=1,
                      budget=None, exponents=None):
    """``(1/n) log #{w : an assigned exponent of w lies in the bin}`` per bin.

    Empty bins hold ``-inf``. ``exponents`` may carry a precomputed
    :class:`WordExponents` for the same system, ``n`` and policy.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    wx = exponents or word_exponents(sys, n, x_policy, partitions, threads, budget)
    grid, counts = histogram(wx, delta)
    with np.errstate(divide="ignore"):
        values = np.log(counts.astype(float)) / n
    curve = SpectrumCurve(grid, values, n, delta, COUNTING, counts=counts,
                          meta={"N": sys.N, "x_policy": policy_name(x_policy), "side": "fiber"})
    curve.meta["empty_interior_bins"] = curve.empty_interior_bins().tolist()
    return curve


def _restricted(wx, restriction, delta):
    if restriction == POSITIVE:
        sel = wx.high[bin_index(wx.high, delta) > 0]
    elif restriction == NEGATIVE:
        sel = wx.low[bin_index(wx.low, delta) < 0]
    elif restriction == UNRESTRICTED:
        sel = wx.primary
    else:
        raise ValueError(f"unknown restriction {restriction!r}")
    if sel.size == 0:
        raise EmptySignClass(f"no word has an exponent in the {restriction} class")
    return np.sort(sel)


def log_sum_exp_pressure(chi, q_grid, n):
    """``(1/n) log sum_w exp(q n chi_w)`` for each ``q``.

    ``chi`` must be sorted: the summation order is then fixed by the multiset
    of exponents alone, independent of how the words were enumerated.
    """
    out = np.empty(len(q_grid))
    for i, q in enumerate(q_grid):
        t = q * n * chi
        m = t.max()
        out[i] = (m + math.log(np.sum(np.exp(t - m)))) / n
    return out


def pressure_curve(sys, n, q_grid, restriction, x_policy=MAX_OVER_FIBER, delta=None,
                   partitions=1, threads=1, budget=None, exponents=None):
    """Restricted finite-level pressure ``(1/n) log sum_w exp(q n chi_n(w))``.

    ``Positive`` sums over words whose positive-branch exponent lies outside
    the zero bin, ``Negative`` likewise on the negative side, and
    ``Unrestricted`` over all words with the policy's primary exponent.
    """
    q_grid = np.asarray(q_grid, dtype=float)
    if np.any(np.diff(q_grid) <= 0):
        raise ValueError("q_grid must be strictly increasing")
    delta = default_delta(sys.M, n) if delta is None else delta
    wx = exponents or word_exponents(sys, n, x_policy, partitions, threads, budget)
    chi = _restricted(wx, restriction, delta)
    values = log_sum_exp_pressure(chi, q_grid, n)
    return PressureCurve(q_grid, values, n, restriction, sys.N, delta,
                         (float(chi[0]), float(chi[-1])), int(chi.size),
                         meta={"x_policy": policy_name(x_policy)})


def legendre_fenchel(p, alpha_grid):
    """Concave conjugate ``E(alpha) = min_q (P(q) - q alpha)`` on the q grid.

    Where the minimum sits on an end of the q grid the true infimum may lie
    beyond it; such points are flagged in ``endpoint_flags``.
    """
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    q = np.asarray(p.q_grid, dtype=float)
    table = p.values[None, :] - alpha_grid[:, None] * q[None, :]
    j = np.argmin(table, axis=1)
    values = table[np.arange(alpha_grid.size), j]
    # flag only when no interior q attains the minimum
    inner = table[:, 1:-1].min(axis=1) if q.size > 2 else np.full(alpha_grid.size, np.inf)
    flags = inner > values + 1e-12 * np.maximum(1.0, np.abs(values))
    return SpectrumCurve(alpha_grid, values, p.n, p.delta or 0.0, LEGENDRE_FENCHEL,
                         endpoint_flags=flags,
                         meta={"restriction": p.restriction, "side": "fiber",
                               "argmin_q": q[j].tolist()})


# -- landmarks -----------------------------------------------------------------


@dataclass
class SpectrumSummary:
    alpha_min: float
    alpha_max: float
    alpha_minus: float
    alpha_plus: float
    h_at_zero: float
    D_plus: float
    D_minus: float
    max_entropy: float
    h_minus_limit: float = math.nan
    h_plus_limit: float = math.nan
    E_at_alpha_min: float = math.nan
    E_at_alpha_max: float = math.nan


def _branch(curve, sign, min_count):
    a = curve.alpha_grid
    side = (a < 0) if sign < 0 else (a > 0)
    finite = side & np.isfinite(curve.values)
    good = finite.copy()
    if curve.counts is not None:
        good &= curve.counts >= min_count
    if curve.endpoint_flags is not None:
        good &= ~curve.endpoint_flags
    return finite, good


def plateau_onset(p, slope_tol=SLOPE_TOL):
    """Onset of the flat tail of a restricted pressure curve.

    Positive-class pressure flattens as ``q -> -inf``; negative-class pressure
    as ``q -> +inf``. Scanning outward from ``q = 0``, the onset is the first
    grid point from which the discrete slope stays within ``slope_tol`` of the
    tail's limiting slope. At finite ``n`` the limiting slope is the
    restricted exponent closest to zero (``p.slope_range``), which tends to 0
    as ``n`` grows. Returns ``nan`` if the grid never gets there.
    """
    q, v = p.q_grid, p.values
    slopes = np.diff(v) / np.diff(q)
    if p.restriction == POSITIVE:
        floor = p.slope_range[0] if p.slope_range else 0.0
        for k in range(len(slopes) - 1, -1, -1):
            if q[k + 1] > 0:
                continue
            if abs(slopes[k] - floor) < slope_tol:
                return float(q[k + 1])
        return math.nan
    if p.restriction == NEGATIVE:
        floor = p.slope_range[1] if p.slope_range else 0.0
        for k in range(len(slopes)):
            if q[k] < 0:
                continue
            if abs(slopes[k] - floor) < slope_tol:
                return float(q[k])
        return math.nan
    raise ValueError("plateaus are defined for the signed restrictions only")


def extract_summary(neg, pos, p_neg, p_pos, slope_tol=SLOPE_TOL, min_count=8):
    """Support endpoints, maximal-entropy exponents, ``E(0)`` and plateau onsets.

    ``neg`` is read on ``alpha < 0`` and ``pos`` on ``alpha > 0``; passing the
    same two-sided curve twice is fine. A bin is *well populated* when it is
    finite, holds at least ``min_count`` words (counting curves) and is not
    endpoint-flagged (conjugate curves).
    """
    nf, ng = _branch(neg, -1, min_count)
    pf, pg = _branch(pos, +1, min_count)
    if ng.sum() < 3 or pg.sum() < 3:
        raise InsufficientSupport(
            f"well-populated bins: negative {int(ng.sum())}, positive {int(pg.sum())}")
    an, vn = neg.alpha_grid, neg.values
    ap, vp = pos.alpha_grid, pos.values
    i_min = np.flatnonzero(nf)[0]
    i_max = np.flatnonzero(pf)[-1]
    gi_n = np.flatnonzero(ng)
    gi_p = np.flatnonzero(pg)
    # conjugate curves can be flat at the top; ties go to the innermost bin
    top_n = vn[gi_n].max()
    top_p = vp[gi_p].max()
    j_n = gi_n[vn[gi_n] >= top_n - 1e-12][-1]
    j_p = gi_p[vp[gi_p] >= top_p - 1e-12][0]
    h_minus = float(vn[gi_n[-1]])
    h_plus = float(vp[gi_p[0]])
    return SpectrumSummary(
        alpha_min=float(an[i_min]),
        alpha_max=float(ap[i_max]),
        alpha_minus=float(an[j_n]),
        alpha_plus=float(ap[j_p]),
        h_at_zero=0.5 * (h_minus + h_plus),
        D_plus=plateau_onset(p_pos, slope_tol),
        D_minus=plateau_onset(p_neg, slope_tol),
        max_entropy=float(max(vn[j_n], vp[j_p])),
        h_minus_limit=h_minus,
        h_plus_limit=h_plus,
        E_at_alpha_min=float(vn[i_min]),
        E_at_alpha_max=float(vp[i_max]),
    )
