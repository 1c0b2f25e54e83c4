"""Finite certification of covering/expansion and accessibility on blending
intervals, plus synchronization sampling.

All fiber maps are orientation-preserving circle diffeomorphisms, so the
image of an arc is the arc between the endpoint images. Arc images are
tracked through a fixed set of sample points so that image lengths above
1/2 stay unambiguous; expansion is checked on the same samples.
"""

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
import json
import math

import numpy as np

from . import linalg2 as la
from .errors import DisjointInput
from .symbolic import Word

FORWARD = "Forward"
BACKWARD = "Backward"

MARGIN_FRACTION = 0.05
EXPANSION_THRESHOLD = 0.05
ARC_SAMPLES = 65
SYNC_TOL = 1e-6


@dataclass(frozen=True)
class BlendingInterval:
    lo: float
    hi: float
    side: str = FORWARD

    def __post_init__(self):
        if self.side not in (FORWARD, BACKWARD):
            raise ValueError(f"side must be {FORWARD} or {BACKWARD}")
        if not 0.0 < self.arc.length < 1.0:
            raise ValueError("blending interval must be a proper nonempty arc")

    @property
    def arc(self):
        return la.Arc.from_endpoints(self.lo, self.hi)

    @classmethod
    def around(cls, center, length, side=FORWARD):
        return cls(la.wrap(center - 0.5 * length), la.wrap(center + 0.5 * length), side)


def _as_arc(h):
    if isinstance(h, la.Arc):
        return h
    if isinstance(h, BlendingInterval):
        return h.arc
    lo, hi = h
    return la.Arc.from_endpoints(lo, hi)


@dataclass
class CecWitness:
    H: la.Arc
    word: Word
    ell: int
    expansion_rate: float
    covered: bool
    margin: float
    threshold: float
    image: la.Arc | None = None
    explored: int = 0

    def to_dict(self):
        return {
            "H": [self.H.start, self.H.end],
            "word": str(self.word),
            "ell": self.ell,
            "expansion_rate": self.expansion_rate,
            "covered": self.covered,
            "margin": self.margin,
            "expansion_threshold": self.threshold,
            "image": None if self.image is None else [self.image.start, self.image.end],
            "explored": self.explored,
        }


def _image_arc(points):
    """Arc traced by the image of an ordered sample of an arc."""
    steps = np.mod(np.diff(points), 1.0)
    length = float(np.sum(steps))
    return la.Arc(points[0], min(length, 1.0))


def check_cec(sys, J, H, max_len, margin_fraction=MARGIN_FRACTION,
              threshold=EXPANSION_THRESHOLD, samples=ARC_SAMPLES):
    """Shortest word whose image of ``H`` covers a neighborhood of ``J`` while
    expanding at rate ``threshold`` per step.

    The neighborhood is ``J`` widened by ``margin_fraction * |J|`` on both
    sides. Words are explored breadth-first (length, then lexicographic) with
    the images of ``samples`` points of ``H`` and their accumulated
    log-derivatives memoized per node. A ``Backward`` interval is checked on
    the inverse system. If nothing qualifies within ``max_len`` the result has
    ``covered=False`` and carries the word with the longest image.
    """
    if max_len < 1 or max_len > 24:
        raise ValueError("max_len must lie in [1, 24]")
    if J.side == BACKWARD:
        sys = sys.inverse()
    h_arc = _as_arc(H)
    j_arc = J.arc
    if not h_arc.intersects(j_arc):
        raise DisjointInput("H and J do not meet")
    target = j_arc.widened(margin_fraction * j_arc.length)
    x0 = h_arc.sample(samples)
    queue = deque([((), x0, np.zeros(samples))])
    best = None
    explored = 0
    while queue:
        syms, pts, logd = queue.popleft()
        for s in range(sys.N):
            f = sys.maps[s]
            new_logd = logd + f.log_derivative(pts)
            new_pts = np.asarray(f.apply(pts), dtype=float)
            word = syms + (s,)
            ell = len(word)
            explored += 1
            image = _image_arc(new_pts)
            rate = float(np.min(new_logd)) / ell
            if rate >= threshold and image.contains_arc(target):
                return CecWitness(h_arc, Word(word, sys.N), ell, rate, True,
                                  margin_fraction * j_arc.length, threshold, image, explored)
            if best is None or image.length > best[2].length:
                best = (word, rate, image)
            if ell < max_len:
                queue.append((word, new_pts, new_logd))
    word, rate, image = best
    return CecWitness(h_arc, Word(word, sys.N), len(word), rate, False,
                      margin_fraction * j_arc.length, threshold, image, explored)


def cec_ladder(sys, J, sizes, max_len, center=None):
    """Certified word lengths for sub-arcs of ``J`` of the given sizes.

    Returns ``(lengths, slope, intercept)`` from a least-squares fit of
    ``ell ~ slope * |log |H|| + intercept`` over the covered rungs: empirical
    stand-ins for the constants relating witness length to ``|H|``.
    """
    c = J.arc.center if center is None else center
    ells = []
    for size in sizes:
        w = check_cec(sys, J, la.Arc(c - 0.5 * size, size), max_len)
        ells.append(w.ell if w.covered else None)
    xs = [abs(math.log(s)) for s, e in zip(sizes, ells) if e is not None]
    ys = [e for e in ells if e is not None]
    if len(xs) >= 2:
        slope, intercept = np.polyfit(xs, ys, 1)
    else:
        slope = intercept = math.nan
    return ells, float(slope), float(intercept)


def check_acc(sys, J, max_len, grid=64):
    """Reach the interior of ``J`` from every point of a uniform grid.

    Returns ``(covered_fraction, max_transition)``, the latter being the
    longest shortest word needed among reached points.
    """
    if grid < 64:
        raise ValueError("grid must be at least 64")
    if J.side == BACKWARD:
        sys = sys.inverse()
    arc = J.arc
    xs = np.arange(grid) / grid
    reached = arc.contains(xs, interior=True)
    longest = 0
    front = xs[~reached][:, None]
    pending = np.flatnonzero(~reached)
    for depth in range(1, max_len + 1):
        if pending.size == 0:
            break
        front = np.concatenate(
            [np.asarray(f.apply(front), dtype=float) for f in sys.maps], axis=1)
        hit = np.any(arc.contains(front, interior=True), axis=1)
        if hit.any():
            reached[pending[hit]] = True
            longest = depth
            front = front[~hit]
            pending = pending[~hit]
    return float(np.mean(reached)), longest


# -- synchronization -----------------------------------------------------------


@dataclass
class SyncReport:
    samples: int
    steps: int
    final_diameters: np.ndarray
    sync_fraction: float
    exponent_estimates: np.ndarray
    sync_tol: float = SYNC_TOL
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["final_diameters"] = [float(x) for x in self.final_diameters]
        d["exponent_estimates"] = [float(x) for x in self.exponent_estimates]
        return d

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def cluster(points):
    """Smallest arc holding all but one of ``points``.

    Returns ``(length, start_index, members)`` where ``members`` indexes the
    covered points in circular order.
    """
    order = np.argsort(points, kind="stable")
    p = np.asarray(points)[order]
    m = p.size
    if m <= 2:
        return 0.0, 0, order[:max(m - 1, 0)]
    ext = np.concatenate([p, p + 1.0])
    spans = ext[np.arange(m) + m - 2] - p
    i = int(np.argmin(spans))
    return float(spans[i]), i, order[(i + np.arange(m - 1)) % m]


def _sync_one(sys, sampler, steps, grid_points):
    word = sampler.sample_array(steps)
    x = np.arange(grid_points) / grid_points
    logd = np.zeros(grid_points)
    for s in word:
        f = sys.maps[s]
        logd = logd + f.log_derivative(x)
        x = np.asarray(f.apply(x), dtype=float)
    diam, _, members = cluster(x)
    # the median member of the cluster stands in for its barycenter
    pick = members[len(members) // 2]
    return diam, float(logd[pick]) / steps


def synchronize(sys, sampler, samples, steps, grid_points, sync_tol=SYNC_TOL, threads=1):
    """Push a uniform grid forward along sampled words and measure collapse.

    Each sample uses its own child stream spawned from ``sampler``'s seed, so
    results do not depend on ``threads``.
    """
    if steps < 1 or grid_points < 2 or samples < 1:
        raise ValueError("need samples >= 1, steps >= 1, grid_points >= 2")
    children = sampler.spawn(samples)

    def run(child):
        return _sync_one(sys, child, steps, grid_points)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, children))
    else:
        results = [run(c) for c in children]
    diam = np.array([r[0] for r in results])
    expo = np.array([r[1] for r in results])
    return SyncReport(samples, steps, diam, float(np.mean(diam <= sync_tol)), expo, sync_tol,
                      meta={"seed": sampler.seed, "weights": list(sampler.weights),
                            "grid_points": grid_points})
