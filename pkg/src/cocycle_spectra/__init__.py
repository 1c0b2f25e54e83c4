"""Lyapunov spectra of SL(2,R) cocycles and circle-fiber step skew-products.

Numerical toolkit: finite-word exponents, restricted pressure curves and
their conjugates, counting estimates of the entropy spectrum, Oseledets
direction tracking, axiom certificates and semigroup searches.
"""

from .cocycle_spectrum import (GOLDEN_ANGLE, CocycleFamily, equal_exponents_entropy,
                               lambda1_finite, matrix_product, reference_cocycle,
                               track_v0, translate_spectrum)
from .errors import *  # noqa: F401,F403
from .linalg2 import Arc, Mat2, classify, proj_apply, proj_derivative
from .skewproduct import (FiberSystem, exponent_field, finite_time_exponent, iterate,
                          morse_smale, reference_fiber_system, rigid_rotation)
from .symbolic import BernoulliSampler, Word, enumerate_words
from .thermo import (MAX_OVER_FIBER, MIN_OVER_FIBER, FixedPoint, counting_spectrum,
                     extract_summary, legendre_fenchel, pressure_curve)

__version__ = "0.1.0"
