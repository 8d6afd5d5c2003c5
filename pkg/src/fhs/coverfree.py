"""Cover-free codes: verification and the link to worst-case w-throughput."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import Scheme, is_prime
from .errors import ArgumentError, BudgetExceeded, DimensionError, NotApplicable
from .metrics import DEFAULT_BUDGET, Mode, _Interference, worst_case_throughput_of_scheme


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, ``"a/b"`` string or decimal float/string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


class CfcVerdict(str, Enum):
    PROVEN_CFC = "ProvenCfc"
    PROVEN_NOT_CFC = "ProvenNotCfc"
    SAMPLED_NO_COUNTEREXAMPLE = "SampledNoCounterexample"
    UNAVAILABLE = "Unavailable"


class CfcMethod(str, Enum):
    EXHAUSTIVE = "Exhaustive"
    DISTANCE_CERTIFICATE = "DistanceCertificate"
    SAMPLED = "Sampled"


@dataclass(frozen=True)
class CfcCertificate:
    verdict: CfcVerdict
    method: CfcMethod
    w: int
    alpha: Fraction
    counterexample: Optional[dict] = None   # {"z": idx, "others": [idx...], "positions": [...]}
    trials: Optional[int] = None
    max_cover: Optional[int] = None         # largest |I| seen (exhaustive: exact maximum)
    distance: Optional[int] = None
    note: str = ""


def cover_set(z: Sequence[int], others: Iterable[Sequence[int]]) -> frozenset[int]:
    """Positions where ``z`` agrees with at least one word of ``others``."""
    others = list(others)
    if not others:
        raise ArgumentError("cover set needs a non-empty family")
    out = set()
    for y in others:
        if len(y) != len(z):
            raise DimensionError(f"word lengths differ: {len(y)} != {len(z)}")
        out.update(i for i, (a, b) in enumerate(zip(z, y)) if a == b)
    return frozenset(out)


def _covered_too_much(size: int, alpha: Fraction, v: int) -> bool:
    # not (|I| < (1 - alpha) v), in integers
    return size * alpha.denominator >= (alpha.denominator - alpha.numerator) * v


def _validate(scheme: Scheme, w: int, alpha: Fraction) -> None:
    if not 1 <= w <= scheme.k - 1:
        raise ArgumentError(f"need 1 <= w <= k-1 = {scheme.k - 1}, got w={w}")
    if not 0 <= alpha < 1:
        raise ArgumentError(f"alpha must lie in [0, 1), got {alpha}")


def _positions(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def _exhaustive(scheme: Scheme, w: int, alpha: Fraction, budget: int) -> CfcCertificate:
    k = scheme.k
    needed = k * math.comb(k - 1, w)
    if needed > budget:
        raise BudgetExceeded(needed, budget, "(Z, S') evaluations")
    inter = _Interference(scheme)
    best = 0
    for z in range(k):
        row = inter.row(z)
        pool = [i for i in range(k) if i != z]
        for others in combinations(pool, w):
            mask = 0
            for u in others:
                mask |= row[u]
            size = mask.bit_count()
            if _covered_too_much(size, alpha, scheme.v):
                ce = {"z": z, "others": list(others), "positions": _positions(mask)}
                return CfcCertificate(CfcVerdict.PROVEN_NOT_CFC, CfcMethod.EXHAUSTIVE, w, alpha, ce,
                                      max_cover=size)
            best = max(best, size)
    return CfcCertificate(CfcVerdict.PROVEN_CFC, CfcMethod.EXHAUSTIVE, w, alpha, max_cover=best)


def _sampled(scheme: Scheme, w: int, alpha: Fraction, trials: int, seed: Optional[int]) -> CfcCertificate:
    k = scheme.k
    rng = np.random.default_rng(seed)
    inter = _Interference(scheme)
    best = 0
    for _ in range(trials):
        pick = rng.choice(k, size=w + 1, replace=False)
        z, others = int(pick[0]), sorted(int(i) for i in pick[1:])
        row = inter.row(z)
        mask = 0
        for u in others:
            mask |= row[u]
        size = mask.bit_count()
        if _covered_too_much(size, alpha, scheme.v):
            ce = {"z": z, "others": others, "positions": _positions(mask)}
            return CfcCertificate(CfcVerdict.PROVEN_NOT_CFC, CfcMethod.SAMPLED, w, alpha, ce, trials, size)
        best = max(best, size)
    return CfcCertificate(CfcVerdict.SAMPLED_NO_COUNTEREXAMPLE, CfcMethod.SAMPLED, w, alpha,
                          trials=trials, max_cover=best)


def distance_premise_holds(v: int, w: int, d: int) -> bool:
    """d > v (1 - 1/w^2), in integers."""
    return d * w * w > v * (w * w - 1)


def _distance(scheme: Scheme, w: int, alpha: Fraction, d: Optional[int], budget: int) -> CfcCertificate:
    limit = 1 - Fraction(1, w)
    if alpha > limit:
        raise NotApplicable(f"a distance certificate only covers alpha <= 1 - 1/w = {limit}, got {alpha}")
    if d is None:
        d = scheme.metadata.get("min_distance")
    if d is None:
        from .constructions import verify_min_distance
        d = verify_min_distance(scheme, budget=budget).d
    if distance_premise_holds(scheme.v, w, d):
        return CfcCertificate(CfcVerdict.PROVEN_CFC, CfcMethod.DISTANCE_CERTIFICATE, w, alpha, distance=d,
                              note=f"d={d} > v(1-1/w^2) gives a (w, {limit})-CFC")
    return CfcCertificate(CfcVerdict.UNAVAILABLE, CfcMethod.DISTANCE_CERTIFICATE, w, alpha, distance=d,
                          note=f"d={d} does not exceed v(1-1/w^2) = {Fraction(scheme.v * (w * w - 1), w * w)}")


def is_cover_free(scheme: Scheme, w: int, alpha, method: CfcMethod = CfcMethod.EXHAUSTIVE,
                  budget: int = DEFAULT_BUDGET, trials: int = 10 ** 4, seed: Optional[int] = 0,
                  distance: Optional[int] = None) -> CfcCertificate:
    """Decide whether ``scheme`` is a (w, alpha)-cover-free code.

    The condition is strict: every codeword Z and every w others S' must
    satisfy ``|I(Z, S')| < (1 - alpha) v``, evaluated in exact integers.
    Exhaustive scans report the first counterexample in (Z index, subset
    rank) order.
    """
    alpha = as_fraction(alpha)
    _validate(scheme, w, alpha)
    method = CfcMethod(method)
    if method == CfcMethod.EXHAUSTIVE:
        return _exhaustive(scheme, w, alpha, budget)
    if method == CfcMethod.SAMPLED:
        return _sampled(scheme, w, alpha, trials, seed)
    return _distance(scheme, w, alpha, distance, budget)


def check_counterexample(scheme: Scheme, cert: CfcCertificate) -> bool:
    """Independently re-check a ProvenNotCfc counterexample."""
    ce = cert.counterexample
    if ce is None:
        return False
    others = [scheme[i] for i in ce["others"]]
    if ce["z"] in ce["others"] or len(set(ce["others"])) != cert.w:
        return False
    pos = cover_set(scheme[ce["z"]], others)
    return sorted(pos) == ce["positions"] and _covered_too_much(len(pos), cert.alpha, scheme.v)


@dataclass(frozen=True)
class ThroughputGuarantee:
    w: int
    alpha: Fraction
    statement: str
    exact_worst_case: Optional[Fraction] = None
    confirmed: Optional[bool] = None


def cfc_to_fhs_throughput(cert: CfcCertificate, scheme: Scheme, budget: int = DEFAULT_BUDGET) -> ThroughputGuarantee:
    """Turn a proven (w, alpha)-CFC into the guarantee worst-case w-throughput > alpha,
    checking it against the exact value when enumeration fits the budget."""
    if cert.verdict != CfcVerdict.PROVEN_CFC:
        raise ArgumentError(f"only a ProvenCfc certificate implies a guarantee, got {cert.verdict.value}")
    w, alpha = cert.w, cert.alpha
    statement = f"worst-case {w}-throughput > {alpha}"
    if math.comb(scheme.k, w + 1) > budget:
        return ThroughputGuarantee(w, alpha, statement)
    exact = worst_case_throughput_of_scheme(scheme, w, Mode.EXACT, budget=budget).value
    if not exact > alpha:
        raise AssertionError(f"certificate claims > {alpha} but the exact worst case is {exact}")
    return ThroughputGuarantee(w, alpha, statement, exact, True)


@dataclass(frozen=True)
class DistanceStatement:
    d: int
    v: int
    worst_case_1_throughput: Fraction
    cover_free_below: Fraction
    note: str


def distance_cfc_statement(d: int, v: int) -> DistanceStatement:
    """What minimum distance d says about a single interferer.

    One other codeword agrees in at most v - d slots, so the worst-case
    1-throughput is at least d/v (exactly d/v when some pair attains d), and
    the code is a (1, alpha)-CFC for every alpha < d/v. Under the strict
    covering condition alpha = d/v itself is excluded.
    """
    if not 0 <= d <= v:
        raise ArgumentError("need 0 <= d <= v")
    q = Fraction(d, v)
    return DistanceStatement(d, v, q, q, "(1, alpha)-CFC for all alpha < d/v; alpha = d/v fails the strict bound")


# -- parameter table --------------------------------------------------------

# (v, m, t', w, alpha as printed, gamma*v) for the twelve reference rows
TABLE2_EXPECTED = [
    (23, 23, 3, 3, "0.6667", 3),
    (23, 23, 2, 4, "0.75", 2),
    (23, 23, 1, 5, "0.80", 1),
    (37, 37, 5, 3, "0.6667", 5),
    (37, 37, 3, 4, "0.75", 3),
    (37, 37, 2, 5, "0.80", 2),
    (59, 59, 7, 3, "0.6667", 7),
    (59, 59, 4, 4, "0.75", 4),
    (59, 59, 3, 5, "0.80", 3),
    (79, 79, 9, 3, "0.6667", 9),
    (79, 79, 5, 4, "0.75", 5),
    (79, 79, 4, 5, "0.80", 4),
]


@dataclass(frozen=True)
class Table2Row:
    v: int
    m: int
    tprime: int
    w: int
    k: int
    d: int
    alpha: Optional[Fraction]
    gamma_v: Optional[int]
    diagnostics: list = field(default_factory=list)

    @property
    def alpha_4dp(self) -> Optional[str]:
        return None if self.alpha is None else f"{float(self.alpha):.4f}"


def table2_row(v: int, m: int, tprime: int, w: int) -> Table2Row:
    """Certificate-level parameters of an MDS scheme (v, m^t', m) facing w interferers.

    alpha = 1 - 1/w when d = v - t' + 1 exceeds v(1 - 1/w^2); gamma*v = t'
    when w + 1 <= (m-1)^t' (the jammer then needs at least t' slots).
    """
    diags = []
    if not is_prime(m):
        diags.append(f"m={m} is not prime; prime-field construction unavailable")
    if m < v:
        diags.append(f"m={m} < v={v}: not enough evaluation points")
    if not 1 <= tprime <= v:
        diags.append(f"t'={tprime} outside 1..v")
    if w < 2:
        diags.append("w must be >= 2")
    d = v - tprime + 1
    alpha = None
    if w >= 1 and distance_premise_holds(v, w, d):
        alpha = 1 - Fraction(1, w)
    else:
        diags.append(f"distance premise fails: d={d} <= v(1-1/w^2)")
    gamma_v = None
    if w + 1 <= (m - 1) ** tprime:
        gamma_v = tprime
    else:
        diags.append(f"w+1={w + 1} > (m-1)^t'={(m - 1) ** tprime}: no lower bound on identification time")
    return Table2Row(v, m, tprime, w, m ** tprime, d, alpha, gamma_v, diags)


def alpha_matches(printed: str, alpha: Optional[Fraction]) -> bool:
    """Compare with a printed decimal at 4 decimal places."""
    return alpha is not None and f"{float(printed):.4f}" == f"{float(alpha):.4f}"
