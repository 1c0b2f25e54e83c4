"""Finite words over ``{0, ..., N-1}`` and Bernoulli sampling.

Words are enumerated in lexicographic order, which coincides with the order
of their base-``N`` rank (first symbol most significant). Bulk consumers use
:func:`word_block`, which returns a packed ``uint8`` array for a contiguous
range of ranks; ranges are how enumeration is partitioned across workers.
"""

from dataclasses import dataclass
import os

import numpy as np

from .errors import BudgetExceeded

DEFAULT_BUDGET = 1 << 24
BUDGET_ENV = "COCYCLE_SPECTRA_BUDGET"
RNG_ALGORITHM = "numpy.random.PCG64 (SeedSequence-spawned streams)"


def enumeration_budget():
    """Word budget, overridable through ``COCYCLE_SPECTRA_BUDGET``."""
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


def check_budget(N, n, budget=None):
    budget = enumeration_budget() if budget is None else budget
    count = N ** n
    if count > budget:
        raise BudgetExceeded(f"{N}^{n} = {count} words exceeds budget {budget}")
    return count


@dataclass(frozen=True)
class Word:
    symbols: tuple
    N: int = 2

    def __post_init__(self):
        syms = tuple(int(s) for s in self.symbols)
        if any(s < 0 or s >= self.N for s in syms):
            raise ValueError(f"symbol outside [0, {self.N}) in {syms}")
        object.__setattr__(self, "symbols", syms)

    @classmethod
    def from_string(cls, text, N=2):
        return cls(tuple(int(ch) for ch in text), N)

    @classmethod
    def from_rank(cls, rank, n, N=2):
        syms = []
        for _ in range(n):
            rank, r = divmod(rank, N)
            syms.append(r)
        return cls(tuple(reversed(syms)), N)

    @property
    def n(self):
        return len(self.symbols)

    @property
    def rank(self):
        r = 0
        for s in self.symbols:
            r = r * self.N + s
        return r

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.symbols[item], self.N)
        return self.symbols[item]

    def __add__(self, other):
        return Word(self.symbols + other.symbols, max(self.N, other.N))

    def reversed(self):
        return Word(self.symbols[::-1], self.N)

    def as_array(self):
        return np.array(self.symbols, dtype=np.uint8 if self.N <= 256 else np.int64)

    def __str__(self):
        if self.N <= 10:
            return "".join(str(s) for s in self.symbols)
        return ",".join(str(s) for s in self.symbols)


def word_block(N, n, start=0, stop=None):
    """Digits of the words with ranks in ``[start, stop)`` as a ``(k, n)`` array."""
    total = N ** n
    stop = total if stop is None else stop
    ranks = np.arange(start, stop, dtype=np.int64)
    out = np.empty((ranks.size, n), dtype=np.uint8 if N <= 256 else np.int64)
    for pos in range(n - 1, -1, -1):
        out[:, pos] = ranks % N
        ranks //= N
    return out


def partition_ranges(total, parts):
    """Split ``range(total)`` into ``parts`` contiguous, nearly equal ranges."""
    parts = max(1, min(parts, total)) if total else 1
    edges = [total * i // parts for i in range(parts + 1)]
    return [(edges[i], edges[i + 1]) for i in range(parts)]


def enumerate_words(N, n, part=None, parts=1, budget=None):
    """Yield all ``N**n`` words in lexicographic order.

    With ``parts > 1``, ``part`` selects one of the disjoint rank ranges from
    :func:`partition_ranges`; iterating every part yields each word once.
    """
    if N < 2:
        raise ValueError("alphabet needs at least two symbols")
    if n < 0:
        raise ValueError("negative word length")
    total = check_budget(N, n, budget)
    ranges = partition_ranges(total, parts)
    selected = ranges if part is None else [ranges[part]]
    for lo, hi in selected:
        for rank in range(lo, hi):
            yield Word.from_rank(rank, n, N)


@dataclass
class BernoulliSampler:
    """i.i.d. symbol source with fixed weights; one owner per instance."""

    weights: tuple
    seed: int = 0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1 or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be a probability vector")
        self.weights = tuple(float(x) for x in w)
        self._cdf = np.cumsum(w)
        self._cdf[-1] = 1.0
        self._rng = np.random.Generator(np.random.PCG64(self.seed))

    @classmethod
    def uniform(cls, N, seed=0):
        return cls(tuple([1.0 / N] * N), seed)

    @property
    def N(self):
        return len(self.weights)

    def sample_array(self, length):
        """Symbols as an integer array.

        Drawn by inverting the CDF of uniform variates, so a longer draw from
        a fresh sampler with the same seed extends a shorter one.
        """
        u = self._rng.random(length)
        # zero-weight symbols own empty CDF intervals and are never drawn
        return np.searchsorted(self._cdf, u, side="right").astype(np.int64)

    def spawn(self, count):
        """Independent child samplers with seeds split from this one's."""
        children = np.random.SeedSequence(self.seed).spawn(count)
        return [
            BernoulliSampler(self.weights, int(c.generate_state(1, dtype=np.uint64)[0]))
            for c in children
        ]


def sample_sequence(sampler, length):
    if length < 0:
        raise ValueError("negative length")
    return Word(tuple(sampler.sample_array(length)), sampler.N)
