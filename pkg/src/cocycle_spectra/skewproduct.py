"""Step skew-products over the full shift with projective circle fibers.

``F(xi, x) = (sigma xi, f_{xi_0}(x))``: symbol ``w[0]`` acts first. Every
fiber map offered here is the projective action of an SL(2,R) matrix
(rigid rotations and north-pole/south-pole maps included), so the composite
map along a word is again projective and its derivative is available in
closed form. :func:`iterate` walks the orbit one map at a time and is the
independent check on the composite route.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import linalg2 as la
from .errors import EmptyWord, NonPositiveDeterminant
from .symbolic import Word

MATRIX = "MatrixProjective"
ROTATION = "RigidRotation"
MORSE_SMALE = "MorseSmale"

DEFAULT_GRID = 512
GUARD_TOL = 1e-12


@dataclass(frozen=True)
class FiberMap:
    """Circle diffeomorphism realized as ``v -> Av/|Av|`` with ``A`` in SL(2,R).

    ``params`` records the constructor arguments: ``()`` for matrix maps,
    ``(angle,)`` for rotations (half-turns), ``(attractor, repeller,
    contraction)`` for Morse-Smale maps.
    """

    kind: str
    matrix: la.Mat2
    params: tuple = ()

    def apply(self, x):
        if self.kind == ROTATION:
            return la.wrap(np.asarray(x) + self.params[0])
        return la.proj_apply(self.matrix, x)

    def derivative(self, x):
        if self.kind == ROTATION:
            return np.ones_like(np.asarray(x, dtype=float))
        return la.proj_derivative(self.matrix, x)

    def log_derivative(self, x):
        if self.kind == ROTATION:
            return np.zeros_like(np.asarray(x, dtype=float))
        return np.log(la.proj_derivative(self.matrix, x))

    def inverse(self):
        if self.kind == ROTATION:
            return rigid_rotation(-self.params[0])
        if self.kind == MORSE_SMALE:
            attractor, repeller, contraction = self.params
            return FiberMap(MORSE_SMALE, self.matrix.inverse(), (repeller, attractor, contraction))
        return FiberMap(MATRIX, self.matrix.inverse())


def matrix_map(m):
    """Projective action of a GL+ matrix (normalized onto SL(2,R))."""
    if m.det <= 0:
        raise NonPositiveDeterminant("orientation-reversing or singular fiber matrix")
    return FiberMap(MATRIX, la.normalize_glplus(m))


def rigid_rotation(angle):
    """Rotation of the projective circle by ``angle`` half-turns."""
    angle = float(angle)
    return FiberMap(ROTATION, la.Mat2.rotation(math.pi * angle), (angle,))


def morse_smale(attractor, repeller, contraction):
    """North-pole/south-pole map with the given fixed points.

    Conjugate of ``diag(s, 1/s)``, ``s = contraction**-0.5``, by the linear
    map sending the axes to the two prescribed lines; the derivative is
    ``contraction`` at the attractor and ``1/contraction`` at the repeller,
    and there are no other fixed points.
    """
    if not 0.0 < contraction < 1.0:
        raise ValueError("contraction must lie in (0, 1)")
    if la.proj_distance(attractor, repeller) < 1e-9:
        raise ValueError("attractor and repeller must differ")
    s = contraction ** -0.5
    ax, ay = la.unit_vector(attractor)
    rx, ry = la.unit_vector(repeller)
    conj = la.Mat2(ax, rx, ay, ry)
    if conj.det < 0:
        conj = la.Mat2(ax, -rx, ay, -ry)
    core = la.Mat2.diag(s, 1.0 / s)
    m = la.normalize_glplus(conj @ core @ conj.inverse())
    return FiberMap(MORSE_SMALE, m, (float(attractor), float(repeller), float(contraction)))


@dataclass(frozen=True)
class FiberSystem:
    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.maps) < 2:
            raise ValueError("a fiber system needs at least two maps")

    @classmethod
    def from_matrices(cls, mats):
        return cls(tuple(matrix_map(m) for m in mats))

    @property
    def N(self):
        return len(self.maps)

    @property
    def matrices(self):
        return [f.matrix for f in self.maps]

    @property
    def M(self):
        """Largest generator norm; fiber exponents lie in ``[-2 log M, 2 log M]``."""
        return max(f.matrix.sv_max for f in self.maps)

    def entries(self):
        return la.stack_entries(self.matrices)

    def log_derivative(self, i, x):
        """The potential ``log|f_i'(x)|``."""
        return self.maps[i].log_derivative(x)

    def inverse(self):
        return FiberSystem(tuple(f.inverse() for f in self.maps))

    def composite(self, w):
        """``(P, log_scale)`` with ``f_w`` the projective action of ``P``."""
        return word_product(self.matrices, w)


def word_product(mats, w):
    """Ordered product ``A_{w[n-1]} ... A_{w[0]}`` with overflow rescaling.

    Returns ``(P, log_scale)``; the true product is ``exp(log_scale) * P``.
    """
    p = la.Mat2.identity()
    log_scale = 0.0
    for s in w:
        p = mats[s] @ p
        if p.sv_max > la.RESCALE_AT:
            k = p.sv_max
            p = p.scaled(1.0 / k)
            log_scale += math.log(k)
    return p, log_scale


@dataclass(frozen=True)
class FiniteOrbit:
    word: Word
    x0: float
    points: np.ndarray
    log_deriv_sum: float


def iterate(sys, w, x0):
    """Fiber orbit of ``x0`` along ``w`` and the Birkhoff sum of the potential."""
    pts = [float(x0)]
    terms = []
    x = float(x0)
    for s in w:
        terms.append(float(sys.log_derivative(s, x)))
        x = float(sys.maps[s].apply(x))
        pts.append(x)
    return FiniteOrbit(w, float(x0), np.array(pts), math.fsum(terms))


def finite_time_exponent(sys, w, x0):
    """``(1/n) log|(f_w)'(x0)|``, the length-``n`` approximant of the fiber exponent."""
    if len(w) == 0:
        raise EmptyWord("finite-time exponent of the empty word")
    return iterate(sys, w, x0).log_deriv_sum / len(w)


def _most_expanded(a, b, c, d):
    g11 = a * a + c * c
    g22 = b * b + d * d
    g12 = a * b + c * d
    return 0.5 * np.arctan2(2.0 * g12, g11 - g22) / np.pi


def _singular_frame(a, b, c, d, log_scale):
    """``(log s, most expanded line)`` per product, shaped ``(batch, 1)``."""
    a, b, c, d, log_scale = (np.asarray(v, dtype=float)[:, None] for v in (a, b, c, d, log_scale))
    s_max, _ = la.singular_values(a, b, c, d)
    # true det is 1, so the small singular value is exactly 1/s
    return np.log(s_max) + log_scale, _most_expanded(a, b, c, d)


def _frame_log_derivative(log_s, center, x):
    # reduce to [-1/2, 1/2) and use cos(pi t) = sin(pi (1/2 - |t|)) so the
    # zero at |t| = 1/2 is hit exactly
    off = np.asarray(x, dtype=float) - center
    ad = np.abs(np.mod(off + 0.5, 1.0) - 0.5)
    cos_phi = np.sin(np.pi * (0.5 - ad))
    sin_phi = np.sin(np.pi * ad)
    with np.errstate(divide="ignore"):
        log_norm2 = np.logaddexp(2.0 * log_s + 2.0 * np.log(cos_phi),
                                 -2.0 * log_s + 2.0 * np.log(sin_phi))
    return -log_norm2


def composite_log_derivative(a, b, c, d, log_scale, x):
    """``log|f_P'(x)|`` for SL(2,R) products given as entry arrays.

    Entry arrays have shape ``(batch,)``; ``x`` broadcasts against
    ``(batch, 1)``. Uses ``|f_P'(u)| = |P u|^{-2}`` with ``|P u|^2`` written in
    the singular frame, ``s^2 cos^2(phi) + s^-2 sin^2(phi)``, ``phi`` the angle
    from the most expanded line. Applying ``P`` to ``u`` directly loses
    ``s^2 * eps`` relative accuracy near the minimum of ``|P u|``.
    """
    return _frame_log_derivative(*_singular_frame(a, b, c, d, log_scale), x)


def field_extremes(a, b, c, d, log_scale, n, grid=DEFAULT_GRID):
    """Extremes of ``x -> (1/n) log|f_P'(x)|``, batched over products.

    The field is extremal on the two lines of the singular frame; a uniform
    grid scan guards that closed form and wins only when it is better by more
    than rounding. Returns ``(min_exp, max_exp, argmin, argmax)``.
    """
    n = np.asarray(n, dtype=float)
    scale = (1.0 / n)[:, None] if n.ndim else 1.0 / float(n)
    log_s, center = _singular_frame(a, b, c, d, log_scale)

    def field(x):
        return _frame_log_derivative(log_s, center, x) * scale

    xmin = la.wrap(center[:, 0])
    xmax = la.wrap(xmin + 0.5)
    fmin = field(xmin[:, None])[:, 0]
    fmax = field(xmax[:, None])[:, 0]
    xs = np.arange(grid) / grid
    vals = field(xs[None, :])
    rows = np.arange(vals.shape[0])
    jmax = np.argmax(vals, axis=1)
    jmin = np.argmin(vals, axis=1)
    better = vals[rows, jmax] > fmax + GUARD_TOL
    xmax = np.where(better, xs[jmax], xmax)
    fmax = np.where(better, vals[rows, jmax], fmax)
    better = vals[rows, jmin] < fmin - GUARD_TOL
    xmin = np.where(better, xs[jmin], xmin)
    fmin = np.where(better, vals[rows, jmin], fmin)
    return fmin, fmax, xmin, xmax


def exponent_field(sys, w, grid=DEFAULT_GRID):
    """Range of ``x -> chi_n(w, x)`` over the fiber and the maximizing point.

    The maximizer approximates ``v_+(w)``, the direction most expanded by
    ``f_w``. Returns ``(min_exp, max_exp, argmax)``.
    """
    if grid < 8:
        raise ValueError("grid must be at least 8")
    if len(w) == 0:
        raise EmptyWord("exponent field of the empty word")
    p, log_scale = sys.composite(w)
    fmin, fmax, _, xmax = field_extremes(
        np.array([p.a]), np.array([p.b]), np.array([p.c]), np.array([p.d]),
        np.array([log_scale]), len(w), grid,
    )
    return float(fmin[0]), float(fmax[0]), float(xmax[0])


def reference_fiber_system():
    """Morse-Smale map with attractor 0, repeller 1/2, multiplier 1/4, and the
    golden rotation; this is exactly the fiber system of the reference cocycle."""
    from .cocycle_spectrum import GOLDEN_ANGLE

    return FiberSystem((morse_smale(0.0, 0.5, 0.25), rigid_rotation(GOLDEN_ANGLE / math.pi)))
