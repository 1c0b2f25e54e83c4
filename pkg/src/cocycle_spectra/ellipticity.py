"""Elliptic and hyperbolic elements of the generated semigroup, and the
perturbations used to create them.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import linalg2 as la
from .errors import BudgetExceeded, NotElliptic
from .skewproduct import word_product
from .symbolic import Word, word_block

MAX_DEPTH = 14
IRRATIONALITY_TOL = 1e-3
MAX_DENOMINATOR = 20


@dataclass
class SemigroupSearchResult:
    elliptic_witness: tuple | None  # (Word, Mat2, rotation number in radians)
    hyperbolic_witness: tuple | None  # (Word, Mat2)
    depth_searched: int

    def to_dict(self):
        def enc(w):
            if w is None:
                return None
            word, m = w[0], w[1]
            cls = la.classify(m)
            return {"word": str(word), "matrix": list(m.entries()), "class": cls.tag,
                    "rotation_number": cls.rotation_number}

        return {"elliptic": enc(self.elliptic_witness),
                "hyperbolic": enc(self.hyperbolic_witness),
                "depth_searched": self.depth_searched}


def search_semigroup(fam, max_depth, budget=None):
    """First elliptic and first hyperbolic product, by length then lexicographically.

    Products are built one length at a time in lexicographic order (symbol 0
    acts first); the search stops early once both witnesses are found.
    """
    if max_depth < 1 or max_depth > MAX_DEPTH:
        raise ValueError(f"max_depth must lie in [1, {MAX_DEPTH}]")
    N = fam.N
    total = sum(N ** k for k in range(1, max_depth + 1))
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} products exceed budget {budget}")
    entries = la.stack_entries(fam.mats)
    ell = hyp = None
    depth = 0
    for depth in range(1, max_depth + 1):
        digits = word_block(N, depth)
        a, b, c, d, log_scale = la.batch_product(entries, digits)
        tr = (a + d) * np.exp(log_scale)
        det = (a * d - b * c) * np.exp(2.0 * log_scale)
        sl = np.abs(det - 1.0) <= la.TOL_DET
        if ell is None:
            idx = np.flatnonzero(sl & (np.abs(tr) < 2.0 - la.TOL_TRACE))
            if idx.size:
                w = Word(tuple(digits[idx[0]]), N)
                m, _ = word_product(fam.mats, w)
                ell = (w, m, la.classify(m).rotation_number)
        if hyp is None:
            idx = np.flatnonzero(sl & (np.abs(tr) > 2.0 + la.TOL_TRACE))
            if idx.size:
                w = Word(tuple(digits[idx[0]]), N)
                m, _ = word_product(fam.mats, w)
                hyp = (w, m)
        if ell is not None and hyp is not None:
            break
    return SemigroupSearchResult(ell, hyp, depth)


def perturb_diagonal(a2, t):
    """``a2 @ diag(1+t, 1/(1+t))``."""
    if t <= -1.0:
        raise ValueError("t must exceed -1")
    return a2 @ la.Mat2.diag(1.0 + t, 1.0 / (1.0 + t))


def rotated_trace(fam, w, r):
    """Trace of the product with a rotation by ``r`` radians after each factor's input,
    ``A_{w[n-1]} R_r ... A_{w[0]} R_r``."""
    rot = la.Mat2.rotation(r)
    p = la.Mat2.identity()
    for s in w:
        p = fam.mats[s] @ rot @ p
    return p.trace


def rotation_perturbation_derivative(fam, w, h=1e-4):
    """Central difference of ``r -> trace(A_{w[n-1]} R_r ... A_{w[0]} R_r)`` at 0.

    Rotations turn counterclockwise, so a lone rotation by ``theta`` gives
    ``-2 sin(theta)``.
    """
    if not 0.0 < h <= 1e-3:
        raise ValueError("h must lie in (0, 1e-3]")
    m, _ = word_product(fam.mats, w)
    if la.classify(m).tag != la.ELLIPTIC:
        raise NotElliptic(f"product over {w} is not elliptic")
    return (rotated_trace(fam, w, h) - rotated_trace(fam, w, -h)) / (2.0 * h)


def distance_to_rationals(x, max_q=MAX_DENOMINATOR):
    """``min |x - p/q|`` over ``q <= max_q``, with the minimizing ``(p, q)``."""
    best = (math.inf, 0, 1)
    for q in range(1, max_q + 1):
        p = round(x * q)
        gap = abs(x - p / q)
        if gap < best[0]:
            best = (gap, p, q)
    return best


@dataclass
class ShypReport:
    member: bool
    search: SemigroupSearchResult
    rotation_fraction: float | None
    nearest_rational: tuple | None
    gap: float | None
    tol: float
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"member": self.member, "heuristic": True,
                "rotation_fraction": self.rotation_fraction,
                "nearest_rational": None if self.nearest_rational is None else list(self.nearest_rational),
                "gap": self.gap, "irrationality_tol": self.tol,
                "search": self.search.to_dict(), "notes": self.notes}


def shyp_membership(fam, max_depth=8, irrationality_tol=IRRATIONALITY_TOL, budget=None):
    """Witness-pair test: a hyperbolic element plus an elliptic element whose
    rotation number (as a fraction of a full turn) stays ``irrationality_tol``
    away from every ``p/q`` with ``q <= 20``.

    This is a finite-precision stand-in; the report says so.
    """
    res = search_semigroup(fam, max_depth, budget)
    notes = ["heuristic: witness pair with rationality filter, not a closeness test"]
    frac = nearest = gap = None
    ok_ell = False
    if res.elliptic_witness is None:
        notes.append("no elliptic witness")
    else:
        frac = res.elliptic_witness[2] / (2.0 * math.pi)
        gap, p, q = distance_to_rationals(frac)
        nearest = (p, q)
        ok_ell = gap > irrationality_tol
        if not ok_ell:
            notes.append(f"rotation number within {irrationality_tol} of {p}/{q}")
    if res.hyperbolic_witness is None:
        notes.append("no hyperbolic witness")
    member = ok_ell and res.hyperbolic_witness is not None
    return ShypReport(member, res, frac, nearest, gap, irrationality_tol, notes)
