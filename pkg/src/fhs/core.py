"""Frequency hopping schemes and their Hamming-correlation measures and bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ArgumentError, DimensionError

FHSequence = tuple[int, ...]


@dataclass(frozen=True)
class FrequencyLibrary:
    """The channel alphabet ``0..m-1``."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ArgumentError(f"a frequency library needs at least 2 channels, got m={self.m}")

    @property
    def channels(self) -> range:
        return range(self.m)


@dataclass(frozen=True)
class Scheme:
    """A (v, k, m) frequency hopping scheme: k sequences of length v over m channels.

    Duplicate sequences are legal; ``duplicate_pairs`` lists them so reports
    can flag them (a duplicate forces the cross-correlation to v).
    """

    sequences: tuple[FHSequence, ...]
    m: int
    label: str = ""
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        seqs = tuple(tuple(int(x) for x in s) for s in self.sequences)
        object.__setattr__(self, "sequences", seqs)
        FrequencyLibrary(self.m)
        if not seqs:
            raise ArgumentError("a scheme needs at least one sequence")
        v = len(seqs[0])
        if v < 1:
            raise ArgumentError("sequences must have length >= 1")
        for i, s in enumerate(seqs):
            if len(s) != v:
                raise DimensionError(f"sequence {i} has length {len(s)}, expected {v}")
            for x in s:
                if not 0 <= x < self.m:
                    raise ArgumentError(f"sequence {i} uses channel {x} outside 0..{self.m - 1}")

    @property
    def v(self) -> int:
        return len(self.sequences[0])

    @property
    def k(self) -> int:
        return len(self.sequences)

    @property
    def library(self) -> FrequencyLibrary:
        return FrequencyLibrary(self.m)

    def __len__(self) -> int:
        return self.k

    def __getitem__(self, i: int) -> FHSequence:
        return self.sequences[i]

    def __iter__(self):
        return iter(self.sequences)

    @cached_property
    def matrix(self) -> np.ndarray:
        """k x v integer array view (read-only)."""
        a = np.asarray(self.sequences, dtype=np.int64).reshape(self.k, self.v)
        a.setflags(write=False)
        return a

    @cached_property
    def duplicate_pairs(self) -> list[tuple[int, int]]:
        first: dict[FHSequence, int] = {}
        pairs = []
        for i, s in enumerate(self.sequences):
            if s in first:
                pairs.append((first[s], i))
            else:
                first[s] = i
        return pairs

    @classmethod
    def from_channels(cls, sequences: Iterable[Sequence[int]], base: int = 0, m: Optional[int] = None,
                      label: str = "", metadata: Optional[dict] = None) -> "Scheme":
        """Build a scheme from sequences written over ``base..base+m-1``, shifting to 0-indexed."""
        seqs = [tuple(int(x) - base for x in s) for s in sequences]
        if m is None:
            m = max(max(s) for s in seqs) + 1
        if base:
            note = f"channels {base}..{base + m - 1} -> 0..{m - 1}"
            label = f"{label} ({note})" if label else note
        meta = dict(metadata or {})
        if base:
            meta["channel_base"] = base
        return cls(tuple(seqs), m, label, meta)


# -- pairwise correlation ---------------------------------------------------

def _check_same_length(x: Sequence[int], y: Sequence[int]) -> int:
    if len(x) != len(y):
        raise DimensionError(f"sequence lengths differ: {len(x)} != {len(y)}")
    return len(x)


def hamming_correlation(x: Sequence[int], y: Sequence[int], shift: int) -> int:
    """Number of positions i with ``x[i] == y[(i + shift) % v]``."""
    v = _check_same_length(x, y)
    if not 0 <= shift < v:
        raise ArgumentError(f"shift must lie in 0..{v - 1}, got {shift}")
    return sum(1 for i in range(v) if x[i] == y[(i + shift) % v])


def correlation_profile(x: Sequence[int], y: Sequence[int]) -> np.ndarray:
    """All cyclic correlations ``H(0), ..., H(v-1)`` at once."""
    v = _check_same_length(x, y)
    xa = np.asarray(x)
    ya = np.asarray(y)
    idx = (np.arange(v)[:, None] + np.arange(v)[None, :]) % v
    return (xa[:, None] == ya[idx]).sum(axis=0)


def _argmax(profile: np.ndarray, start: int = 0) -> tuple[int, int]:
    tail = profile[start:]
    j = int(np.argmax(tail))
    return int(tail[j]), j + start


def max_autocorrelation(x: Sequence[int]) -> int:
    """Maximum out-of-phase autocorrelation (shifts 1..v-1)."""
    if len(x) < 2:
        raise ArgumentError("autocorrelation needs v >= 2 (no out-of-phase shift exists)")
    return _argmax(correlation_profile(x, x), 1)[0]


def max_crosscorrelation(x: Sequence[int], y: Sequence[int]) -> int:
    """Maximum cross-correlation over every shift including 0."""
    return int(correlation_profile(x, y).max())


def m_measure(x: Sequence[int], y: Sequence[int]) -> int:
    _check_same_length(x, y)
    return max(max_autocorrelation(x), max_autocorrelation(y), max_crosscorrelation(x, y))


@dataclass(frozen=True)
class CorrelationSummary:
    autocorrelation_max: Optional[int]
    crosscorrelation_max: Optional[int]
    overall: int
    auto_witness: Optional[tuple[int, int]] = None   # (sequence index, shift)
    cross_witness: Optional[tuple[int, int, int]] = None  # (i, j, shift)


def correlation_summary(scheme: Scheme) -> CorrelationSummary:
    """Set-wide maxima H_a, H_c and H_m with the first (lowest-index) witnesses."""
    seqs = scheme.sequences
    h_a = auto_w = None
    if scheme.v >= 2:
        for i, s in enumerate(seqs):
            val, tau = _argmax(correlation_profile(s, s), 1)
            if h_a is None or val > h_a:
                h_a, auto_w = val, (i, tau)
    h_c = cross_w = None
    for i in range(scheme.k):
        for j in range(i + 1, scheme.k):
            val, tau = _argmax(correlation_profile(seqs[i], seqs[j]))
            if h_c is None or val > h_c:
                h_c, cross_w = val, (i, j, tau)
    parts = [h for h in (h_a, h_c) if h is not None]
    if not parts:
        raise ArgumentError("correlation summary needs v >= 2 or k >= 2")
    return CorrelationSummary(h_a, h_c, max(parts), auto_w, cross_w)


# -- bounds -----------------------------------------------------------------

class BoundName(str, Enum):
    LEMPEL_GREENBERGER_1 = "LempelGreenberger1"
    LEMPEL_GREENBERGER_2 = "LempelGreenberger2"
    PENG_FAN = "PengFan"


@dataclass(frozen=True)
class BoundReport:
    bound_name: BoundName
    raw_value: Fraction
    integer_bound: int
    inputs: dict
    is_met_with_equality: Optional[bool] = None

    def compared_with(self, measured: int) -> "BoundReport":
        return BoundReport(self.bound_name, self.raw_value, self.integer_bound, self.inputs,
                           measured == self.integer_bound)


def _ceil(q: Fraction) -> int:
    return max(0, -((-q.numerator) // q.denominator))


def lempel_greenberger_bound_1(v: int, m: int) -> BoundReport:
    """Lower bound on the out-of-phase autocorrelation of any length-v sequence.

    ``r = v mod m``; the raw value can be negative and is kept as-is, the
    integer bound is clamped at 0.
    """
    if v < 2 or m < 1:
        raise ArgumentError("need v >= 2 and m >= 1")
    r = v % m
    raw = Fraction((v - r) * (v + r - m), m * (v - 1))
    return BoundReport(BoundName.LEMPEL_GREENBERGER_1, raw, _ceil(raw), {"v": v, "m": m, "r": r})


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def lempel_greenberger_bound_2(p: int, n: int, i: int) -> BoundReport:
    """Pairwise bound ``M(X, Y) >= p^(n-i)`` for v = p^n - 1 over p^i channels."""
    if not is_prime(p):
        raise ArgumentError(f"p={p} is not prime")
    if n < 1 or not 1 <= i <= n:
        raise ArgumentError(f"need n >= 1 and 1 <= i <= n, got n={n}, i={i}")
    v = p ** n - 1
    if v < 2:
        raise ArgumentError(f"v = p^n - 1 = {v} must be >= 2")
    val = p ** (n - i)
    return BoundReport(BoundName.LEMPEL_GREENBERGER_2, Fraction(val), val,
                       {"p": p, "n": n, "i": i, "v": v, "m": p ** i})


def peng_fan_bound(v: int, k: int, m: int) -> BoundReport:
    """Lower bound on the maximum Hamming correlation H_m of any (v, k, m) scheme."""
    if min(v, k, m) < 1:
        raise ArgumentError("v, k, m must be positive")
    if v * k == 1:
        raise ArgumentError("vk = 1 makes the bound's denominator zero")
    big_i = v * k // m
    raw = Fraction(2 * big_i * v * k - (big_i + 1) * big_i * m, (v * k - 1) * k)
    return BoundReport(BoundName.PENG_FAN, raw, _ceil(raw), {"v": v, "k": k, "m": m, "I": big_i})


# -- slot structure ---------------------------------------------------------

@dataclass(frozen=True)
class SlotOccupancy:
    slot: int
    channels: tuple[int, ...]          # the multiset F_t, in sequence order
    multiplicities: tuple[int, ...]    # a_0..a_{m-1}
    active_multiplicities: Optional[tuple[int, ...]] = None


def _counts(values: Iterable[int], m: int) -> tuple[int, ...]:
    out = [0] * m
    for x in values:
        out[x] += 1
    return tuple(out)


def slot_occupancy(scheme: Scheme, t: int, active: Optional[Iterable[int]] = None) -> SlotOccupancy:
    if not 0 <= t < scheme.v:
        raise ArgumentError(f"slot {t} outside 0..{scheme.v - 1}")
    column = tuple(s[t] for s in scheme.sequences)
    active_counts = None
    if active is not None:
        idx = list(active)
        if len(set(idx)) != len(idx):
            raise ArgumentError("active indices must be distinct")
        for i in idx:
            if not 0 <= i < scheme.k:
                raise ArgumentError(f"sequence index {i} outside 0..{scheme.k - 1}")
        active_counts = _counts((column[i] for i in idx), scheme.m)
    return SlotOccupancy(t, column, _counts(column, scheme.m), active_counts)


def check_slot_uniformity(scheme: Scheme) -> list[bool]:
    """Per slot: is every channel used by the same number of sequences?"""
    return [len(set(slot_occupancy(scheme, t).multiplicities)) == 1 for t in range(scheme.v)]


@dataclass(frozen=True)
class TransitionCell:
    slot: int
    channel: int
    uniform: bool
    next_counts: tuple[int, ...]
    vacuous: bool = False      # no sequence uses the channel at this slot
    degenerate: bool = False   # population not divisible by m, uniformity impossible


def check_transition_uniformity(scheme: Scheme) -> list[list[TransitionCell]]:
    """Table indexed ``[t][i]`` for t in 0..v-2: among sequences on channel i at
    slot t, are the slot t+1 channels uniform over the library?"""
    if scheme.v < 2:
        raise ArgumentError("transition uniformity needs v >= 2")
    table = []
    for t in range(scheme.v - 1):
        row = []
        for i in range(scheme.m):
            nxt = _counts((s[t + 1] for s in scheme.sequences if s[t] == i), scheme.m)
            total = sum(nxt)
            if total == 0:
                row.append(TransitionCell(t, i, True, nxt, vacuous=True))
            else:
                row.append(TransitionCell(t, i, len(set(nxt)) == 1, nxt,
                                          degenerate=total % scheme.m != 0))
        table.append(row)
    return table


def transition_uniform(scheme: Scheme) -> bool:
    return all(c.uniform for row in check_transition_uniformity(scheme) for c in row)


def hamming_distance(x: Sequence[int], y: Sequence[int]) -> int:
    _check_same_length(x, y)
    return sum(1 for a, b in zip(x, y) if a != b)


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)

