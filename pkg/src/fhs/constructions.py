"""Concrete schemes: prime-field Reed-Solomon (MDS) codes, orthogonal arrays,
cyclic Latin squares and the keyed Latin-square scheme, plus their verifiers."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .core import Scheme, ceil_div, check_slot_uniformity, check_transition_uniformity, is_prime
from .errors import ArgumentError, BudgetExceeded
from .metrics import DEFAULT_BUDGET
from .slotkey import SlotKeySource, mixer_prf, slot_key


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ArgumentError(f"{self.p} is not prime")

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def evaluate(self, coeffs: Sequence[int], x: int) -> int:
        """Horner evaluation of ``coeffs[0] + coeffs[1] x + ...``."""
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def poly_from_roots(self, roots: Sequence[int]) -> list[int]:
        coeffs = [1]
        for r in roots:
            nxt = [0] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i + 1] = (nxt[i + 1] + c) % self.p
                nxt[i] = (nxt[i] - r * c) % self.p
            coeffs = nxt
        return coeffs


# -- Reed-Solomon / MDS ------------------------------------------------------

@dataclass(frozen=True)
class MdsCode:
    """Evaluations of all polynomials of degree < tprime at the points 0..v-1 of GF(p).

    Codeword ``i`` has coefficient vector ``(c_0, ..., c_{tprime-1})`` equal to
    the base-p digits of i, most significant first, so codewords come in
    lexicographic order of coefficient vectors. Codewords are produced on
    demand; nothing is materialised until ``scheme()`` is called.
    """

    v: int
    tprime: int
    p: int

    def __post_init__(self):
        PrimeField(self.p)
        if self.v < 2:
            raise ArgumentError("need v >= 2")
        if self.p < self.v:
            raise ArgumentError(f"GF({self.p}) has fewer than v={self.v} evaluation points")
        if not 1 <= self.tprime <= self.v:
            raise ArgumentError(f"need 1 <= tprime <= v, got tprime={self.tprime}")

    @property
    def k(self) -> int:
        return self.p ** self.tprime

    @property
    def m(self) -> int:
        return self.p

    @property
    def min_distance(self) -> int:
        return self.v - self.tprime + 1

    def coefficients(self, index: int) -> list[int]:
        if not 0 <= index < self.k:
            raise ArgumentError(f"codeword index {index} outside 0..{self.k - 1}")
        digits = []
        for _ in range(self.tprime):
            index, d = divmod(index, self.p)
            digits.append(d)
        return digits[::-1]

    def index_of(self, coeffs: Sequence[int]) -> int:
        idx = 0
        for c in coeffs:
            idx = idx * self.p + c % self.p
        return idx

    def codeword(self, index: int) -> tuple[int, ...]:
        field_ = PrimeField(self.p)
        c = self.coefficients(index)
        return tuple(field_.evaluate(c, a) for a in range(self.v))

    def distance_witness(self) -> tuple[int, int]:
        """Two codewords at distance exactly v - tprime + 1: the zero word and the
        polynomial vanishing at the first tprime-1 evaluation points."""
        poly = PrimeField(self.p).poly_from_roots(range(self.tprime - 1))
        return 0, self.index_of(poly)

    @property
    def label(self) -> str:
        return f"mds v={self.v} t'={self.tprime} p={self.p}"

    @property
    def metadata(self) -> dict:
        return {"construction": {"kind": "mds", "v": self.v, "tprime": self.tprime, "p": self.p},
                "min_distance": self.min_distance}

    def scheme(self, limit: int = 10 ** 7) -> Scheme:
        if self.k * self.v > limit:
            raise BudgetExceeded(self.k * self.v, limit, "cells to materialise")
        c = np.array([[(i // self.p ** (self.tprime - 1 - j)) % self.p for j in range(self.tprime)]
                      for i in range(self.k)], dtype=np.int64)
        powers = np.array([[pow(a, j, self.p) for a in range(self.v)] for j in range(self.tprime)],
                          dtype=np.int64)
        rows = (c @ powers) % self.p
        return Scheme(tuple(map(tuple, rows.tolist())), self.p, self.label, self.metadata)


def construct_mds_scheme(v: int, tprime: int, p: int) -> Scheme:
    """All p^tprime Reed-Solomon codewords of length v and dimension tprime over GF(p)."""
    return MdsCode(v, tprime, p).scheme()


def rs_cfc_dimension(v: int, w: int) -> int:
    """Smallest dimension that keeps d = v - t' + 1 above v(1 - 1/w^2)."""
    if w < 2:
        raise ArgumentError("need w >= 2")
    return ceil_div(v, w * w)


def construct_rs_cfc(v: int, w: int, p: int) -> Scheme:
    return construct_mds_scheme(v, rs_cfc_dimension(v, w), p)


# -- distance and orthogonal-array verification -------------------------------

@dataclass(frozen=True)
class DistanceResult:
    d: int
    witness: tuple[int, int]
    method: str                       # "exhaustive" or "certificate+sampled"
    sampled_pairs: int = 0
    sampled_min: Optional[int] = None


def _mds_from_metadata(scheme: Scheme) -> Optional[MdsCode]:
    c = scheme.metadata.get("construction") or {}
    if c.get("kind") != "mds":
        return None
    code = MdsCode(c["v"], c["tprime"], c["p"])
    if (scheme.v, scheme.k, scheme.m) != (code.v, code.k, code.m):
        return None
    return code


def verify_min_distance(scheme: Scheme, budget: int = DEFAULT_BUDGET, samples: int = 10 ** 5,
                        seed: int = 0) -> DistanceResult:
    """Minimum pairwise Hamming distance.

    Exhaustive when the pair count fits the budget. Otherwise an MDS
    construction record supplies the algebraic value, which is checked
    against ``samples`` random pairs; anything else is refused.
    """
    k = scheme.k
    if k < 2:
        raise ArgumentError("minimum distance needs k >= 2")
    pairs = k * (k - 1) // 2
    mat = scheme.matrix
    code = _mds_from_metadata(scheme)
    if pairs <= budget:
        best, arg = scheme.v + 1, None
        for i in range(k - 1):
            dist = (mat[i + 1:] != mat[i]).sum(axis=1)
            j = int(np.argmin(dist))
            if dist[j] < best:
                best, arg = int(dist[j]), (i, i + 1 + j)
                if best == 0:
                    break
        if code is not None and best != code.min_distance:
            raise AssertionError(f"MDS construction has d={best}, expected {code.min_distance}")
        return DistanceResult(best, arg, "exhaustive", pairs, best)
    if code is None:
        raise BudgetExceeded(pairs, budget, "pairs (and no algebraic certificate)")
    rng = np.random.default_rng(seed)
    a = rng.integers(0, k, size=samples)
    b = rng.integers(0, k - 1, size=samples)
    b = np.where(b >= a, b + 1, b)
    dist = (mat[a] != mat[b]).sum(axis=1)
    observed = int(dist.min())
    if observed < code.min_distance:
        raise AssertionError(f"sampled pair at distance {observed} < certified {code.min_distance}")
    wit = code.distance_witness()
    assert int((mat[wit[0]] != mat[wit[1]]).sum()) == code.min_distance
    return DistanceResult(code.min_distance, wit, "certificate+sampled", samples, observed)


@dataclass(frozen=True)
class OAWitness:
    strength: int
    index: int
    passed: bool
    columns: Optional[tuple[int, ...]] = None
    tuple_: Optional[tuple[int, ...]] = None
    count: Optional[int] = None
    reason: str = ""


def verify_orthogonal_array(scheme: Scheme, strength: int, index: int) -> OAWitness:
    """Check that every ``strength``-column projection contains each tuple exactly ``index`` times.

    Columns are visited in lexicographic order; the first bad projection and
    its lowest offending tuple are returned.
    """
    v, k, m = scheme.v, scheme.k, scheme.m
    if not 1 <= strength <= v:
        raise ArgumentError(f"need 1 <= strength <= v, got {strength}")
    if index * m ** strength != k:
        return OAWitness(strength, index, False,
                         reason=f"index*m^strength = {index}*{m}^{strength} = {index * m ** strength} != k = {k}")
    mat = scheme.matrix
    weights = m ** np.arange(strength - 1, -1, -1, dtype=np.int64)
    for cols in combinations(range(v), strength):
        codes = mat[:, cols] @ weights
        counts = np.bincount(codes, minlength=m ** strength)
        bad = np.flatnonzero(counts != index)
        if bad.size:
            code = int(bad[0])
            tup = tuple(int((code // m ** (strength - 1 - j)) % m) for j in range(strength))
            return OAWitness(strength, index, False, cols, tup, int(counts[code]),
                             reason="tuple count differs from index")
    return OAWitness(strength, index, True)


# -- Latin squares ------------------------------------------------------------

@dataclass(frozen=True)
class LatinSquare:
    grid: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        grid = tuple(tuple(int(x) for x in row) for row in self.grid)
        object.__setattr__(self, "grid", grid)
        n = len(grid)
        full = set(range(n))
        if n < 1 or any(len(r) != n for r in grid):
            raise ArgumentError("a Latin square must be a non-empty n x n grid")
        for i, r in enumerate(grid):
            if set(r) != full:
                raise ArgumentError(f"row {i} is not a permutation of 0..{n - 1}")
        for j in range(n):
            if {grid[i][j] for i in range(n)} != full:
                raise ArgumentError(f"column {j} is not a permutation of 0..{n - 1}")

    @property
    def order(self) -> int:
        return len(self.grid)

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.grid[i]


def cyclic_latin_square(v: int) -> LatinSquare:
    if v < 1:
        raise ArgumentError("need v >= 1")
    return LatinSquare(tuple(tuple((i + j) % v for j in range(v)) for i in range(v)))


def latin_shift(square: LatinSquare, x: int) -> LatinSquare:
    v = square.order
    if not 0 <= x < v:
        raise ArgumentError(f"shift {x} outside 0..{v - 1}")
    return LatinSquare(tuple(tuple((a + x) % v for a in row) for row in square.grid))


def generate_srls_scheme(square: LatinSquare, source: SlotKeySource, m: Optional[int] = None) -> Scheme:
    """One session of the keyed Latin-square scheme: sequence i hops to
    ``(L[i][t] + x_t) mod v`` where ``x_t`` is the slot key."""
    v = square.order
    if m is not None and m != v:
        raise ArgumentError(f"the keyed Latin-square scheme needs m = v = {v}, got m={m}")
    if source.v != v:
        raise ArgumentError(f"slot key range {source.v} does not match square order {v}")
    if v < 2:
        raise ArgumentError("need v >= 2 channels")
    keys = [slot_key(source, t) for t in range(v)]
    seqs = tuple(tuple((square[i][t] + keys[t]) % v for t in range(v)) for i in range(v))
    meta = {"construction": {"kind": "srls", "v": v, "session": source.session},
            "latin_square": [list(r) for r in square.grid]}
    return Scheme(seqs, v, f"srls v={v} session={source.session}", meta)


@dataclass(frozen=True)
class SrlsFamily:
    """The keyed Latin-square scheme across sessions (holds the key, never serialised)."""

    square: LatinSquare
    key: bytes = field(repr=False)
    prf: object = mixer_prf

    @property
    def v(self) -> int:
        return self.square.order

    def session(self, s: int) -> Scheme:
        return generate_srls_scheme(self.square, SlotKeySource(self.key, s, self.v, self.prf))


def recover_slot_keys(scheme: Scheme, square: LatinSquare) -> list[set[int]]:
    """Per slot, the offsets implied by each sequence; a consistent scheme gives singletons."""
    v = square.order
    return [{(scheme[i][t] - square[i][t]) % v for i in range(scheme.k)} for t in range(scheme.v)]


# -- other small schemes ----------------------------------------------------

def weight_one_scheme(v: int, m: int) -> Scheme:
    """All words with exactly one nonzero entry: v(m-1) sequences."""
    seqs = []
    for pos in range(v):
        for a in range(1, m):
            s = [0] * v
            s[pos] = a
            seqs.append(tuple(s))
    return Scheme(tuple(seqs), m, f"weight-one v={v} m={m}", {"min_distance": 1 if m > 2 else 2})


def ternary_oa9_scheme() -> Scheme:
    """Nine ternary sequences of length 3 forming an OA of strength 2 (the bundled
    demonstration scheme, stored with channels 1..3)."""
    text = resources.files("fhs.data").joinpath("ternary_oa9.json").read_text()
    doc = json.loads(text)
    return Scheme.from_channels(doc["sequences"], base=doc.get("channel_base", 0), m=doc["m"],
                                label=doc.get("label", ""), metadata=doc.get("metadata"))


# -- mitigation properties ----------------------------------------------------

@dataclass(frozen=True)
class MitigationReport:
    active_count: int
    k: int
    m1_partial_use: bool
    m2_slot_uniform: bool
    m3_transition_uniform: bool
    m2_failing_slots: list = field(default_factory=list)
    m3_failing_cells: list = field(default_factory=list)   # (slot, channel)

    @property
    def passed(self) -> bool:
        return self.m1_partial_use and self.m2_slot_uniform and self.m3_transition_uniform


def mitigation_report(scheme: Scheme, usage_fraction) -> MitigationReport:
    """Evaluate the three anti-jamming properties: only part of the scheme is
    active, channels are uniform per slot, and slot-to-slot transitions are uniform."""
    f = Fraction(str(usage_fraction)) if isinstance(usage_fraction, float) else Fraction(usage_fraction)
    if not 0 < f <= 1:
        raise ArgumentError("usage fraction must lie in (0, 1]")
    active = max(1, math.floor(f * scheme.k))
    slots = check_slot_uniformity(scheme)
    cells = [] if scheme.v < 2 else [(c.slot, c.channel) for row in check_transition_uniformity(scheme)
                                     for c in row if not c.uniform]
    bad_slots = [t for t, ok in enumerate(slots) if not ok]
    return MitigationReport(active, scheme.k, active < scheme.k, not bad_slots, not cells, bad_slots, cells)
