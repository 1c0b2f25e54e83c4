"""Cocycle-side exponents and their link to the fiber spectrum.

For an SL(2,R) product ``P`` the projective derivative ranges over
``[|P|^-2, |P|^2]``, so the top Lyapunov exponent of a word is half the
largest fiber exponent, and the most expanded fiber point ``v_+`` (where
``|f_P'|`` peaks) is the input line ``P`` contracts most.
"""

import csv
from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from . import linalg2 as la
from .errors import AsymmetryWarning, EmptyWord, NonHyperbolicWord
from .skewproduct import FiberSystem, field_extremes, finite_time_exponent, word_product
from .symbolic import Word
from .thermo import MAX_OVER_FIBER, SpectrumCurve, bin_index, word_exponents

GOLDEN_ANGLE = 2.0 * math.pi / ((1.0 + math.sqrt(5.0)) / 2.0) ** 2
POSITIVITY_THRESHOLD = 0.05


@dataclass(frozen=True)
class CocycleFamily:
    mats: tuple

    def __post_init__(self):
        mats = tuple(self.mats)
        if not mats:
            raise ValueError("empty family")
        for m in mats:
            if not m.is_sl2():
                raise ValueError(f"det={m.det!r} is not 1 within {la.TOL_DET}")
        object.__setattr__(self, "mats", mats)

    @classmethod
    def from_glplus(cls, mats):
        return cls(tuple(la.normalize_glplus(m) for m in mats))

    @property
    def N(self):
        return len(self.mats)

    @property
    def M(self):
        return max(m.sv_max for m in self.mats)

    def fiber_system(self):
        return FiberSystem.from_matrices(self.mats)

    def inverse(self):
        return CocycleFamily(tuple(m.inverse() for m in self.mats))


def reference_cocycle():
    """``{diag(2, 1/2), rotation by the golden angle}``."""
    return CocycleFamily((la.Mat2.diag(2.0, 0.5), la.Mat2.rotation(GOLDEN_ANGLE)))


def matrix_product(fam, w):
    """``A_{w[n-1]} ... A_{w[0]}`` as ``(P, log_scale)``; the true product is ``exp(log_scale) P``."""
    return word_product(fam.mats, w)


@dataclass(frozen=True)
class CocycleExponents:
    lambda1_n: float
    lambda2_n: float
    n: int


def lambda1_finite(fam, w):
    if len(w) == 0:
        raise EmptyWord("exponent of the empty word")
    p, log_scale = matrix_product(fam, w)
    # |P| >= 1 on SL(2,R); clamp rounding below zero
    lam = max(0.0, (math.log(p.sv_max) + log_scale) / len(w))
    return CocycleExponents(lam, -lam, len(w))


# -- tracking the Oseledets direction ---------------------------------------


@dataclass
class OseledetsTracker:
    word_prefixes: np.ndarray
    v_plus: np.ndarray
    v0_estimate: float
    cauchy_bounds: np.ndarray
    observed_steps: np.ndarray
    lambda1: float
    chi_at_v0: float

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["ell", "v_plus", "bound", "observed_step"])
            for row in zip(self.word_prefixes, self.v_plus, self.cauchy_bounds, self.observed_steps):
                out.writerow([int(row[0])] + [_fmt(x) for x in row[1:]])


def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "null"
    return format(x, ".17g")


def step_bound(norm_next, M):
    """Bound on ``d(v_+(l), v_+(l+1))`` from ``|A^{l+1}|`` and ``M``.

    ``nu(sqrt(X))`` with ``X = (1 - M^-4) / (M^-4 |A^{l+1}|^4 - 1)``;
    ``inf`` when the denominator is not positive.
    """
    m4 = M ** -4
    den = m4 * norm_next ** 4 - 1.0
    if den <= 0.0:
        return math.inf
    return la.normalized_arctan(math.sqrt((1.0 - m4) / den))


def prefix_norms(fam, w):
    """``log |A^l|`` for ``l = 0 .. n`` and the de-scaled prefix products."""
    mats = []
    logs = [0.0]
    p = la.Mat2.identity()
    log_scale = 0.0
    for s in w:
        p = fam.mats[s] @ p
        if p.sv_max > la.RESCALE_AT:
            k = p.sv_max
            p = p.scaled(1.0 / k)
            log_scale += math.log(k)
        mats.append((p, log_scale))
        logs.append(math.log(p.sv_max) + log_scale)
    return np.array(logs), mats


def track_v0(fam, w, checkpoints=None, threshold=POSITIVITY_THRESHOLD, grid=512):
    """Follow ``v_+`` of growing prefixes toward the limit direction ``v_0``.

    ``v_+(l)`` is the fiber point of largest derivative for the first ``l``
    symbols. Between consecutive checkpoints the reported bound is the sum of
    the one-step bounds, which caps the distance by the triangle inequality.
    """
    n = len(w)
    if n == 0:
        raise EmptyWord("tracking along the empty word")
    ex = lambda1_finite(fam, w)
    if ex.lambda1_n <= threshold:
        raise NonHyperbolicWord(f"lambda1={ex.lambda1_n:.4g} <= {threshold}")
    ells = np.arange(1, n + 1) if checkpoints is None else np.asarray(list(checkpoints), dtype=int)
    if ells.size == 0 or np.any(np.diff(ells) <= 0) or ells[0] < 1 or ells[-1] > n:
        raise ValueError("checkpoints must be increasing lengths in [1, len(w)]")

    log_norms, prods = prefix_norms(fam, w)
    picked = [prods[l - 1] for l in ells]
    a = np.array([p.a for p, _ in picked])
    b = np.array([p.b for p, _ in picked])
    c = np.array([p.c for p, _ in picked])
    d = np.array([p.d for p, _ in picked])
    ls = np.array([s for _, s in picked])
    _, _, _, vplus = field_extremes(a, b, c, d, ls, ells.astype(float), grid)

    M = fam.M
    one_step = np.array([
        # v_+ is undefined on an isometric prefix
        step_bound(math.exp(log_norms[l + 1]), M) if log_norms[l] > 1e-12 else math.inf
        for l in range(n)
    ])
    bounds = np.full(ells.size, np.nan)
    steps = np.full(ells.size, np.nan)
    for i in range(1, ells.size):
        bounds[i] = math.fsum(one_step[ells[i - 1]:ells[i]])
        steps[i] = la.proj_distance(vplus[i - 1], vplus[i])
    v0 = float(vplus[-1])
    chi = finite_time_exponent(fam.fiber_system(), w, v0)
    return OseledetsTracker(ells, vplus, v0, bounds, steps, ex.lambda1_n, chi)


# -- spectra -------------------------------------------------------------------


def translate_spectrum(fiber):
    """Cocycle spectrum ``alpha/2 -> E(alpha)`` from a fiber spectrum.

    The fiber branches at ``+-alpha`` are averaged when both are populated;
    the largest disagreement is stored as ``fold_discrepancy`` and, above
    ``2*delta``, raises an :class:`AsymmetryWarning` and sets ``asymmetric``.
    """
    a = fiber.alpha_grid
    v = fiber.values
    keep = a >= -1e-12
    out_a, out_v, out_c = [], [], []
    disc = 0.0
    for i in np.flatnonzero(keep):
        j = np.flatnonzero(np.abs(a + a[i]) <= 1e-9)
        mirror = v[j[0]] if j.size else -math.inf
        here = v[i]
        if np.isfinite(here) and np.isfinite(mirror):
            val = 0.5 * (here + mirror)
            disc = max(disc, abs(here - mirror))
        elif np.isfinite(here):
            val = here
        else:
            val = mirror
        out_a.append(0.5 * a[i])
        out_v.append(val)
        if fiber.counts is not None:
            out_c.append(int(fiber.counts[i]))
    meta = dict(fiber.meta)
    meta.update(side="cocycle", fold_discrepancy=float(disc), asymmetric=bool(disc > 2 * fiber.delta))
    if meta["asymmetric"]:
        warnings.warn(f"fold discrepancy {disc:.3g} exceeds 2*delta", AsymmetryWarning, stacklevel=2)
    return SpectrumCurve(np.array(out_a), np.array(out_v), fiber.n, 0.5 * fiber.delta,
                         fiber.source, counts=np.array(out_c) if out_c else None, meta=meta)


def equal_exponents_entropy(fam_glplus, n, delta, partitions=1, threads=1, budget=None):
    """Counting entropy of words whose two Lyapunov exponents agree up to the bin.

    The family is normalized onto SL(2,R) first, where equal exponents means a
    zero top exponent; ``delta`` is the half-width of the zero bin in fiber
    exponent units (twice the cocycle exponent).
    """
    sys = FiberSystem.from_matrices(fam_glplus)
    wx = word_exponents(sys, n, MAX_OVER_FIBER, partitions, threads, budget)
    count = int(np.count_nonzero(bin_index(wx.high, delta) == 0))
    return math.log(count) / n if count else -math.inf


def hand_built_word(blocks):
    """Concatenate ``(symbol, repeat)`` blocks into one word."""
    syms = []
    for s, k in blocks:
        syms.extend([s] * k)
    return Word(tuple(syms), max(2, max(s for s, _ in blocks) + 1))
