"""Closed-form 2x2 real linear algebra and the projective circle action.

Points of the projective line are stored as plain floats (or float arrays)
``theta`` in ``[0, 1)``, the half-turn coordinate of the line spanned by
``(cos(pi*theta), sin(pi*theta))``. The whole circle has length 1.

Arc lengths that involve ``arctan`` use the normalized arctangent
``nu(t) = (2/pi) * arctan(t)``, which maps ``[0, inf)`` onto ``[0, 1)``. With
this convention the set where ``|f_A'| <= (1+t^2)|A|^2 / (1+t^2|A|^4)`` has
length exactly ``1 - nu(t)``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import IsometryInput, NonPositiveDeterminant, SingularMatrix

TOL_DET = 1e-9
TOL_TRACE = 1e-9
SINGULAR_DET = 1e-12
RESCALE_AT = 1e120


def singular_values(a, b, c, d):
    """Singular values ``(s_max, s_min)`` of ``[[a, b], [c, d]]``.

    Uses the half-sum / half-difference of the norms of the conformal and
    anticonformal parts, which is free of the cancellation in the Gram
    matrix eigenvalue formula. Works elementwise on arrays.
    """
    p = np.hypot(a + d, b - c)
    m = np.hypot(a - d, b + c)
    s_max = 0.5 * (p + m)
    det = np.abs(a * d - b * c)
    with np.errstate(divide="ignore", invalid="ignore"):
        s_min = np.where(s_max > 0, det / np.where(s_max > 0, s_max, 1.0), 0.0)
    return s_max, s_min


@dataclass(frozen=True)
class Mat2:
    """Real 2x2 matrix ``[[a, b], [c, d]]`` with cached det and singular values."""

    a: float
    b: float
    c: float
    d: float
    det: float = field(init=False, repr=False, compare=False)
    sv_max: float = field(init=False, repr=False, compare=False)
    sv_min: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, float(getattr(self, name)))
        s_max, s_min = singular_values(self.a, self.b, self.c, self.d)
        object.__setattr__(self, "det", self.a * self.d - self.b * self.c)
        object.__setattr__(self, "sv_max", float(s_max))
        object.__setattr__(self, "sv_min", float(s_min))

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(arr[0, 0], arr[0, 1], arr[1, 0], arr[1, 1])

    @classmethod
    def rotation(cls, angle):
        """Counterclockwise rotation of the plane by ``angle`` radians."""
        c, s = math.cos(angle), math.sin(angle)
        return cls(c, -s, s, c)

    @classmethod
    def diag(cls, x, y):
        return cls(x, 0.0, 0.0, y)

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    def as_array(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self):
        return self.a + self.d

    @property
    def norm(self):
        return self.sv_max

    def __matmul__(self, other):
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def scaled(self, s):
        return Mat2(s * self.a, s * self.b, s * self.c, s * self.d)

    def inverse(self):
        if abs(self.det) <= SINGULAR_DET:
            raise SingularMatrix(f"det={self.det!r}")
        k = 1.0 / self.det
        return Mat2(k * self.d, -k * self.b, -k * self.c, k * self.a)

    def is_sl2(self, tol=TOL_DET):
        return abs(self.det - 1.0) <= tol

    def allclose(self, other, atol=1e-12):
        return np.allclose(self.entries(), other.entries(), rtol=0.0, atol=atol)


@dataclass(frozen=True)
class MatClass:
    tag: str  # "Elliptic" | "Parabolic" | "Hyperbolic" | "NotSL2"
    rotation_number: float | None = None


ELLIPTIC = "Elliptic"
PARABOLIC = "Parabolic"
HYPERBOLIC = "Hyperbolic"
NOT_SL2 = "NotSL2"


def classify(m, tol_det=TOL_DET, tol_trace=TOL_TRACE):
    """Elliptic / Parabolic / Hyperbolic tag of an SL(2,R) matrix.

    Elliptic results carry the rotation number ``arccos(trace/2)`` in
    radians, in ``[0, pi]``.
    """
    if tol_det <= 0 or tol_trace <= 0:
        raise ValueError("tolerances must be positive")
    if abs(m.det - 1.0) > tol_det:
        return MatClass(NOT_SL2)
    t = abs(m.trace)
    if t < 2.0 - tol_trace:
        return MatClass(ELLIPTIC, math.acos(m.trace / 2.0))
    if t > 2.0 + tol_trace:
        return MatClass(HYPERBOLIC)
    return MatClass(PARABOLIC)


def normalize_glplus(m):
    """Scale ``m`` by ``1/sqrt(det)`` onto SL(2,R)."""
    if m.det <= 0:
        raise NonPositiveDeterminant(f"det={m.det!r}")
    if m.det == 1.0:
        return m
    return m.scaled(1.0 / math.sqrt(m.det))


# -- projective line -------------------------------------------------------


def wrap(theta):
    """Reduce half-turn coordinates to ``[0, 1)``."""
    r = np.mod(theta, 1.0)
    # np.mod can round a tiny negative input up to exactly 1.0
    r = np.where(r >= 1.0, 0.0, r)
    return float(r) if r.ndim == 0 else r


def proj_distance(u, v):
    """Distance on the projective circle of length 1 (at most 1/2)."""
    d = np.abs(np.mod(np.asarray(u) - np.asarray(v), 1.0))
    return np.minimum(d, 1.0 - d)


def unit_vector(theta):
    t = np.pi * np.asarray(theta, dtype=float)
    return np.cos(t), np.sin(t)


def angle_of(x, y):
    """Half-turn coordinate of the line through ``(x, y)``."""
    return wrap(np.arctan2(y, x) / np.pi)


def _check_nonsingular(m):
    if abs(m.det) <= SINGULAR_DET:
        raise SingularMatrix(f"det={m.det!r}")


def proj_apply(m, theta):
    """Image of the line ``theta`` under ``m``: the map ``v -> Av/|Av|``."""
    _check_nonsingular(m)
    x, y = unit_vector(theta)
    return angle_of(m.a * x + m.b * y, m.c * x + m.d * y)


def proj_derivative(m, theta):
    """``|f_A'(theta)|`` in half-turn coordinates.

    Equals ``|det A| / |A u|^2`` for the unit vector ``u`` at ``theta``; for
    SL(2,R) input this is ``|A u|^{-2}``, which ranges over
    ``[|A|^{-2}, |A|^2]``. Dividing by the determinant makes the GL+ case
    agree with the normalized matrix.
    """
    _check_nonsingular(m)
    x, y = unit_vector(theta)
    ax = m.a * x + m.b * y
    ay = m.c * x + m.d * y
    return abs(m.det) / (ax * ax + ay * ay)


def most_expanded_direction(m):
    """Half-turn coordinate of the input line maximizing ``|A u|``.

    This is where ``|f_A'|`` is smallest.
    """
    g11 = m.a * m.a + m.c * m.c
    g22 = m.b * m.b + m.d * m.d
    g12 = m.a * m.b + m.c * m.d
    return wrap(0.5 * math.atan2(2.0 * g12, g11 - g22) / math.pi)


def most_contracted_direction(m):
    """Input line minimizing ``|A u|``, where ``|f_A'|`` peaks."""
    return wrap(most_expanded_direction(m) + 0.5)


def normalized_arctan(t):
    """``(2/pi) arctan t``: arctangent in units where the circle has length 1."""
    return 2.0 / math.pi * math.atan(t)


@dataclass(frozen=True)
class Arc:
    """Closed arc ``[start, start + length]`` of the projective circle."""

    start: float
    length: float

    def __post_init__(self):
        object.__setattr__(self, "start", float(wrap(self.start)))
        if not 0.0 <= self.length <= 1.0:
            raise ValueError(f"arc length {self.length!r} outside [0, 1]")

    @classmethod
    def from_endpoints(cls, lo, hi):
        """Arc running counterclockwise from ``lo`` to ``hi``."""
        return cls(lo, float(np.mod(hi - lo, 1.0)))

    @property
    def end(self):
        return wrap(self.start + self.length)

    @property
    def center(self):
        return wrap(self.start + 0.5 * self.length)

    def contains(self, theta, interior=False):
        off = np.mod(np.asarray(theta) - self.start, 1.0)
        if interior:
            return (off > 0.0) & (off < self.length)
        return off <= self.length

    def contains_arc(self, other):
        off = float(np.mod(other.start - self.start, 1.0))
        return off + other.length <= self.length + 1e-15

    def intersects(self, other):
        return bool(self.contains(other.start) or other.contains(self.start))

    def widened(self, margin):
        return Arc(self.start - margin, min(1.0, self.length + 2.0 * margin))

    def sample(self, k):
        return wrap(self.start + self.length * np.linspace(0.0, 1.0, k))


def small_derivative_interval(m, delta):
    """The arc where ``|f_A'| <= (1+delta^2)|A|^2 / (1+delta^2 |A|^4)``.

    It is centered at the most expanded direction of ``A`` and has length
    ``1 - normalized_arctan(delta)``. Input is taken modulo scaling (the
    GL+ variant of the derivative).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if m.sv_max - m.sv_min <= 1e-12 * max(1.0, m.sv_max):
        raise IsometryInput("map is an isometry of the projective line")
    length = 1.0 - normalized_arctan(delta)
    return Arc(most_expanded_direction(m) - 0.5 * length, length)


def small_derivative_threshold(m, delta):
    """Right-hand side of the derivative bound for the normalized matrix."""
    n2 = m.sv_max * m.sv_max / abs(m.det)
    return (1.0 + delta * delta) * n2 / (1.0 + delta * delta * n2 * n2)


# -- batched products ------------------------------------------------------


def stack_entries(mats):
    """``(N, 4)`` array of ``(a, b, c, d)`` rows."""
    return np.array([m.entries() for m in mats], dtype=float)


def batch_product(entries, words):
    """Products ``A_{w[n-1]} ... A_{w[0]}`` for every row of ``words``.

    ``entries`` is ``(N, 4)``; ``words`` is an integer array ``(k, n)``.
    Returns ``(a, b, c, d, log_scale)`` arrays of length ``k``; the true
    product is ``exp(log_scale)`` times the returned matrix. The arithmetic is
    elementwise, so each row's result does not depend on the batch it was
    computed in.
    """
    words = np.asarray(words)
    k, n = words.shape
    a = np.ones(k)
    b = np.zeros(k)
    c = np.zeros(k)
    d = np.ones(k)
    log_scale = np.zeros(k)
    for pos in range(n):
        e = entries[words[:, pos]]
        ea, eb, ec, ed = e[:, 0], e[:, 1], e[:, 2], e[:, 3]
        a, b, c, d = ea * a + eb * c, ea * b + eb * d, ec * a + ed * c, ec * b + ed * d
        big = np.maximum(np.maximum(np.abs(a), np.abs(b)), np.maximum(np.abs(c), np.abs(d)))
        over = big > RESCALE_AT
        if over.any():
            s = np.where(over, big, 1.0)
            a, b, c, d = a / s, b / s, c / s, d / s
            log_scale = log_scale + np.log(s)
    return a, b, c, d, log_scale
