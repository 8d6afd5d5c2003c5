"""Hamming group correlation and the w-throughput measures, with and without a jammer.

Every subset-level measure has an exact mode (full enumeration, refused when
the subset count exceeds ``budget``) and a seeded Monte Carlo mode. Exact
values are ``Fraction``s; sampled means are ``Fraction``s too (a mean of
rationals with denominator v), paired with a float standard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import Scheme
from .errors import ArgumentError, BudgetExceeded, DimensionError

DEFAULT_BUDGET = 10 ** 6
DEFAULT_SAMPLES = 10 ** 4


class Mode(str, Enum):
    EXACT = "Exact"
    MONTE_CARLO = "MonteCarlo"


class Measure(str, Enum):
    THROUGHPUT = "throughput"
    AVERAGE_SEQUENCE = "average_sequence"
    AVERAGE_SUBSET = "average_subset"
    AVERAGE_SCHEME = "average_scheme"
    WORST_SEQUENCE = "worst_sequence"
    WORST_SUBSET = "worst_subset"
    WORST_SCHEME = "worst_scheme"


@dataclass(frozen=True)
class GroupCorrelationResult:
    blocked_slots: int
    blocked_slot_indices: frozenset[int]
    blockers: dict = field(default_factory=dict, compare=False)  # slot -> index into U of first collider


@dataclass(frozen=True)
class ThroughputReport:
    measure: Measure
    value: Fraction
    mode: Mode
    w: int
    jammer_present: bool = False
    sample_count: Optional[int] = None
    standard_error: Optional[float] = None
    witness: Optional[dict] = None
    estimate_from_above: bool = False   # sampled minimum: only an upper estimate of the true min
    lower_bound: Optional[dict] = None  # distance certificate, when known

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise ValueError(f"throughput {self.value} outside [0, 1]")


# -- sequence-level --------------------------------------------------------

def group_correlation(x: Sequence[int], others: Iterable[Sequence[int]]) -> GroupCorrelationResult:
    """Slots where ``x`` shares its channel with at least one sequence in ``others`` (no shifts)."""
    others = list(others)
    if not others:
        raise ArgumentError("group correlation needs at least one other sequence")
    v = len(x)
    for y in others:
        if len(y) != v:
            raise DimensionError(f"sequence lengths differ: {len(y)} != {v}")
    blockers = {}
    for t in range(v):
        for j, y in enumerate(others):
            if y[t] == x[t]:
                blockers[t] = j
                break
    return GroupCorrelationResult(len(blockers), frozenset(blockers), blockers)


def throughput(x: Sequence[int], others: Iterable[Sequence[int]]) -> ThroughputReport:
    others = list(others)
    g = group_correlation(x, others)
    return ThroughputReport(Measure.THROUGHPUT, 1 - Fraction(g.blocked_slots, len(x)), Mode.EXACT, len(others))


def jammed_throughput(x: Sequence[int], others: Iterable[Sequence[int]],
                      jammers: Iterable[Sequence[int]]) -> ThroughputReport:
    """Throughput of ``x`` against legitimate interferers and jamming sequences.

    ``others`` may be empty here (a victim facing only the jammer).
    """
    others, jammers = list(others), list(jammers)
    if not jammers:
        raise ArgumentError("jammed throughput needs at least one jamming sequence")
    g = group_correlation(x, others + jammers)
    return ThroughputReport(Measure.THROUGHPUT, 1 - Fraction(g.blocked_slots, len(x)), Mode.EXACT,
                            len(others), jammer_present=True)


# -- subset enumeration machinery -------------------------------------------

class _Interference:
    """Per-pair agreement bitmasks (bit t set when two sequences share slot t), built lazily."""

    def __init__(self, scheme: Scheme, jammers: Optional[Sequence[Sequence[int]]] = None):
        self.scheme = scheme
        self.matrix = scheme.matrix
        self._rows: dict[int, list[int]] = {}
        self._jam: dict[int, int] = {}
        self.jammers = None
        if jammers is not None:
            jam = np.asarray([list(j) for j in jammers], dtype=np.int64).reshape(len(jammers), -1)
            if jam.shape[1] != scheme.v:
                raise DimensionError("jamming sequences must have the scheme's length")
            self.jammers = jam

    @staticmethod
    def _masks(eq: np.ndarray) -> list[int]:
        # eq: (n, v) bool
        packed = np.packbits(eq, axis=1, bitorder="little")
        return [int.from_bytes(r.tobytes(), "little") for r in packed]

    def row(self, x: int) -> list[int]:
        r = self._rows.get(x)
        if r is None:
            r = self._masks(self.matrix == self.matrix[x])
            self._rows[x] = r
        return r

    def jam_mask(self, x: int) -> int:
        if self.jammers is None:
            return 0
        m = self._jam.get(x)
        if m is None:
            m = 0
            for b in self._masks(self.jammers == self.matrix[x]):
                m |= b
            self._jam[x] = m
        return m

    def blocked(self, x: int, others: Iterable[int]) -> int:
        r = self.row(x)
        m = self.jam_mask(x)
        for u in others:
            m |= r[u]
        return m.bit_count()


def _check_budget(count: int, budget: int) -> None:
    if count > budget:
        raise BudgetExceeded(count, budget, "subset evaluations")


def _rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def _sample_subset(rng: np.random.Generator, pool: Sequence[int], size: int) -> tuple[int, ...]:
    idx = rng.choice(len(pool), size=size, replace=False)
    return tuple(sorted(pool[i] for i in idx))


def _sampled_mean(total_blocked: int, sq_blocked: int, n: int, denom: int) -> tuple[Fraction, float]:
    # values are 1 - b/denom; the mean and its standard error
    mean = 1 - Fraction(total_blocked, n * denom)
    if n < 2:
        return mean, 0.0
    var_b = (sq_blocked - total_blocked * total_blocked / n) / (n - 1)
    return mean, math.sqrt(max(var_b, 0.0) / n) / denom


def _index(scheme: Scheme, x: int) -> int:
    if not 0 <= x < scheme.k:
        raise ArgumentError(f"sequence index {x} outside 0..{scheme.k - 1}")
    return x


def _check_w(w: int, limit: int, what: str) -> None:
    if not 0 <= w <= limit:
        raise ArgumentError(f"w={w} must satisfy 0 <= w <= {limit} ({what})")


# -- the measure family, parametrised on an optional jammer set ---------------

def _avg_sequence(scheme, x, w, mode, budget, samples, seed, jammers):
    x = _index(scheme, x)
    _check_w(w, scheme.k - 1, "w <= k-1")
    jp = jammers is not None
    inter = _Interference(scheme, jammers)
    v = scheme.v
    if w == 0 and not jp:
        return ThroughputReport(Measure.AVERAGE_SEQUENCE, Fraction(1), Mode.EXACT, w)
    pool = [i for i in range(scheme.k) if i != x]
    if mode == Mode.EXACT:
        n = math.comb(scheme.k - 1, w)
        _check_budget(n, budget)
        total = sum(inter.blocked(x, u) for u in combinations(pool, w))
        return ThroughputReport(Measure.AVERAGE_SEQUENCE, 1 - Fraction(total, n * v), Mode.EXACT, w, jp)
    rng = _rng(seed)
    tot = sq = 0
    for _ in range(samples):
        b = inter.blocked(x, _sample_subset(rng, pool, w))
        tot += b
        sq += b * b
    mean, se = _sampled_mean(tot, sq, samples, v)
    return ThroughputReport(Measure.AVERAGE_SEQUENCE, mean, Mode.MONTE_CARLO, w, jp, samples, se)


def _check_subset(subset: tuple, jammers) -> None:
    least = 1 if jammers is not None else 2
    if len(subset) < least or len(set(subset)) != len(subset):
        raise ArgumentError(f"a subset needs at least {least} distinct sequences")


def _subset_values(inter: _Interference, subset: Sequence[int]) -> list[int]:
    return [inter.blocked(x, [u for u in subset if u != x]) for x in subset]


def _avg_subset(scheme, subset, jammers):
    subset = tuple(_index(scheme, i) for i in subset)
    _check_subset(subset, jammers)
    inter = _Interference(scheme, jammers)
    blocked = _subset_values(inter, subset)
    n = len(subset)
    value = 1 - Fraction(sum(blocked), n * scheme.v)
    return ThroughputReport(Measure.AVERAGE_SUBSET, value, Mode.EXACT, n - 1, jammers is not None)


def _avg_scheme(scheme, w, mode, budget, samples, seed, jammers):
    _check_w(w, scheme.k - 1, "w+1 <= k")
    jp = jammers is not None
    if w == 0 and not jp:
        raise ArgumentError("scheme-level measures need w >= 1 without a jammer")
    inter = _Interference(scheme, jammers)
    v, size = scheme.v, w + 1
    if mode == Mode.EXACT:
        n = math.comb(scheme.k, size)
        _check_budget(n, budget)
        total = sum(sum(_subset_values(inter, V)) for V in combinations(range(scheme.k), size))
        return ThroughputReport(Measure.AVERAGE_SCHEME, 1 - Fraction(total, n * size * v), Mode.EXACT, w, jp)
    rng = _rng(seed)
    pool = list(range(scheme.k))
    tot = sq = 0
    for _ in range(samples):
        b = sum(_subset_values(inter, _sample_subset(rng, pool, size)))
        tot += b
        sq += b * b
    mean, se = _sampled_mean(tot, sq, samples, size * v)
    return ThroughputReport(Measure.AVERAGE_SCHEME, mean, Mode.MONTE_CARLO, w, jp, samples, se)


def _worst_sequence(scheme, x, w, mode, budget, samples, seed, jammers):
    x = _index(scheme, x)
    _check_w(w, scheme.k - 1, "w <= k-1")
    jp = jammers is not None
    inter = _Interference(scheme, jammers)
    v = scheme.v
    if w == 0 and not jp:
        return ThroughputReport(Measure.WORST_SEQUENCE, Fraction(1), Mode.EXACT, w, witness={"others": []})
    pool = [i for i in range(scheme.k) if i != x]
    if mode == Mode.EXACT:
        _check_budget(math.comb(scheme.k - 1, w), budget)
        subsets = combinations(pool, w)
        n = None
    else:
        rng = _rng(seed)
        subsets = (_sample_subset(rng, pool, w) for _ in range(samples))
        n = samples
    best, arg = -1, None
    for u in subsets:
        b = inter.blocked(x, u)
        if b > best:
            best, arg = b, u
            if b == v:
                break
    sampled = mode != Mode.EXACT
    return ThroughputReport(Measure.WORST_SEQUENCE, 1 - Fraction(best, v), mode, w, jp, n,
                            witness={"sequence": x, "others": list(arg)}, estimate_from_above=sampled)


def _worst_subset(scheme, subset, jammers):
    subset = tuple(_index(scheme, i) for i in subset)
    _check_subset(subset, jammers)
    inter = _Interference(scheme, jammers)
    blocked = _subset_values(inter, subset)
    worst = max(blocked)
    x = subset[blocked.index(worst)]
    return ThroughputReport(Measure.WORST_SUBSET, 1 - Fraction(worst, scheme.v), Mode.EXACT,
                            len(subset) - 1, jammers is not None, witness={"sequence": x, "subset": list(subset)})


def _worst_scheme(scheme, w, mode, budget, samples, seed, jammers, distance=None):
    _check_w(w, scheme.k - 1, "w+1 <= k")
    jp = jammers is not None
    if w == 0 and not jp:
        raise ArgumentError("scheme-level measures need w >= 1 without a jammer")
    inter = _Interference(scheme, jammers)
    v, size = scheme.v, w + 1
    if mode == Mode.EXACT:
        _check_budget(math.comb(scheme.k, size), budget)
        subsets = combinations(range(scheme.k), size)
        n = None
    else:
        rng = _rng(seed)
        pool = list(range(scheme.k))
        subsets = (_sample_subset(rng, pool, size) for _ in range(samples))
        n = samples
    best, arg = -1, None
    for V in subsets:
        blocked = _subset_values(inter, V)
        b = max(blocked)
        if b > best:
            best, arg = b, {"sequence": V[blocked.index(b)], "subset": list(V)}
            if b == v:
                break
    if distance is None:
        distance = scheme.metadata.get("min_distance")
    bound = None if jp or distance is None else distance_lower_bound(v, w, distance)
    return ThroughputReport(Measure.WORST_SCHEME, 1 - Fraction(best, v), mode, w, jp, n, witness=arg,
                            estimate_from_above=mode != Mode.EXACT, lower_bound=bound)


def distance_lower_bound(v: int, w: int, d: int) -> dict:
    """Worst-case w-throughput guarantees implied by minimum distance d.

    Each interferer agrees with X in at most v-d slots, so at most w(v-d)
    slots are blocked. When d > v(1 - 1/w^2) the cover-free argument gives
    the strict guarantee ``> 1 - 1/w`` as well.
    """
    union = max(Fraction(0), 1 - Fraction(w * (v - d), v))
    out = {"d": d, "union_bound": union}
    if d * w * w > v * (w * w - 1):
        out["strictly_greater_than"] = 1 - Fraction(1, w)
    return out


# -- public API: jammer-free ------------------------------------------------

def average_throughput_of_sequence(scheme: Scheme, x: int, w: int, mode: Mode = Mode.EXACT,
                                   budget: int = DEFAULT_BUDGET, samples: int = DEFAULT_SAMPLES,
                                   seed: Optional[int] = 0) -> ThroughputReport:
    """Mean throughput of sequence ``x`` over all w-subsets of the other sequences."""
    return _avg_sequence(scheme, x, w, Mode(mode), budget, samples, seed, None)


def average_throughput_of_subset(scheme: Scheme, subset: Sequence[int]) -> ThroughputReport:
    return _avg_subset(scheme, subset, None)


def average_throughput_of_scheme(scheme: Scheme, w: int, mode: Mode = Mode.EXACT,
                                 budget: int = DEFAULT_BUDGET, samples: int = DEFAULT_SAMPLES,
                                 seed: Optional[int] = 0) -> ThroughputReport:
    return _avg_scheme(scheme, w, Mode(mode), budget, samples, seed, None)


def worst_case_throughput_of_sequence(scheme: Scheme, x: int, w: int, mode: Mode = Mode.EXACT,
                                      budget: int = DEFAULT_BUDGET, samples: int = DEFAULT_SAMPLES,
                                      seed: Optional[int] = 0) -> ThroughputReport:
    """Minimum throughput of ``x`` over w-subsets of the others; the witness is the
    first minimising subset in lexicographic order."""
    return _worst_sequence(scheme, x, w, Mode(mode), budget, samples, seed, None)


def worst_case_throughput_of_subset(scheme: Scheme, subset: Sequence[int]) -> ThroughputReport:
    return _worst_subset(scheme, subset, None)


def worst_case_throughput_of_scheme(scheme: Scheme, w: int, mode: Mode = Mode.EXACT,
                                    budget: int = DEFAULT_BUDGET, samples: int = DEFAULT_SAMPLES,
                                    seed: Optional[int] = 0, distance: Optional[int] = None) -> ThroughputReport:
    """Minimum over all (w+1)-subsets V and all X in V of the throughput of X against V minus X.

    A known minimum distance (argument or ``scheme.metadata['min_distance']``)
    adds a certified lower bound to the report.
    """
    return _worst_scheme(scheme, w, Mode(mode), budget, samples, seed, None, distance)


# -- public API: with a jammer ----------------------------------------------

def jammed_measure_family(scheme: Scheme, w: int, jammers: Sequence[Sequence[int]],
                          mode: Mode = Mode.EXACT, budget: int = DEFAULT_BUDGET,
                          samples: int = DEFAULT_SAMPLES, seed: Optional[int] = 0,
                          x: int = 0, subset: Optional[Sequence[int]] = None) -> list[ThroughputReport]:
    """The six jammed measures: average and worst case of a sequence, a subset and the scheme.

    Sequence-level rows use sequence ``x``; subset-level rows use ``subset``
    (default: the first w+1 sequences).
    """
    jammers = [tuple(j) for j in jammers]
    if not jammers:
        raise ArgumentError("an empty jammer set is not allowed here; use the jammer-free measures")
    mode = Mode(mode)
    if subset is None:
        subset = tuple(range(w + 1))
    return [
        _avg_sequence(scheme, x, w, mode, budget, samples, seed, jammers),
        _avg_subset(scheme, subset, jammers),
        _avg_scheme(scheme, w, mode, budget, samples, seed, jammers),
        _worst_sequence(scheme, x, w, mode, budget, samples, seed, jammers),
        _worst_subset(scheme, subset, jammers),
        _worst_scheme(scheme, w, mode, budget, samples, seed, jammers),
    ]
