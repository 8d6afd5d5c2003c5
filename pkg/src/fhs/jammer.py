"""The eavesdrop-and-jam adversary and seeded session simulation.

Per slot the jammer listens on a few channels, learns only whether each one
carries an active transmission, narrows its search space of candidate
sequences, and jams. Once it has pinned down an active sequence it locks on
and jams that sequence's channel for the rest of the session.

Stop rule. The search ends when the search space is a single sequence, or
when it has never been lucky and the search space has shrunk to at most
w+1 sequences. A lucky step can discard active sequences, so after one the
size test no longer implies that every candidate is active; only the
single-candidate test applies from then on.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .constructions import SrlsFamily, verify_orthogonal_array
from .core import Scheme
from .errors import ArgumentError


class Strategy(str, Enum):
    MAX_PROBABILITY = "MaxProbability"
    UNIFORM_RANDOM = "UniformRandom"
    FIXED_CHANNEL = "FixedChannel"
    SCRIPTED = "Scripted"


class TieBreak(str, Enum):
    LOWEST_CHANNEL = "LowestChannel"
    SEEDED_RANDOM = "SeededRandom"


class Outcome(str, Enum):
    IDENTIFIED_SEQUENCE = "IdentifiedSequence"
    SEARCH_SPACE_AT_MOST_ACTIVE = "SearchSpaceAtMostActive"
    SESSION_ENDED = "SessionEnded"


@dataclass(frozen=True)
class JammerConfig:
    """Adversary parameters. ``script`` lists eavesdrop channels per slot (an int
    or a tuple of ints); slots past its end fall back to MaxProbability."""

    eavesdrop_count: int = 1
    jam_count: int = 1
    strategy: Strategy = Strategy.MAX_PROBABILITY
    fixed_channel: Optional[int] = None
    script: tuple = ()
    tie_break: TieBreak = TieBreak.SEEDED_RANDOM
    rng_seed: int = 0

    def validate(self, m: int) -> None:
        for name in ("eavesdrop_count", "jam_count"):
            val = getattr(self, name)
            if not isinstance(val, (int, np.integer)) or isinstance(val, bool) or val < 0:
                raise ArgumentError(f"{name} must be a non-negative integer, got {val!r}")
        if self.jam_count >= m:
            raise ArgumentError(f"the jammer cannot jam all channels: jam_count={self.jam_count} >= m={m}")
        if self.eavesdrop_count > m:
            raise ArgumentError(f"eavesdrop_count={self.eavesdrop_count} exceeds m={m}")
        if Strategy(self.strategy) == Strategy.FIXED_CHANNEL:
            if self.fixed_channel is None or not 0 <= self.fixed_channel < m:
                raise ArgumentError("FixedChannel needs a channel in 0..m-1")
        for entry in self.script:
            for c in _as_channels(entry):
                if not 0 <= c < m:
                    raise ArgumentError(f"scripted channel {c} outside 0..{m - 1}")


def _as_channels(entry) -> tuple[int, ...]:
    if isinstance(entry, (int, np.integer)):
        return (int(entry),)
    return tuple(int(c) for c in entry)


@dataclass(frozen=True)
class SessionConfig:
    """One session: which sequences are active and whose throughput is tracked.

    ``view`` is the jammer's hypothesis space: ``"explicit"`` (the scheme's
    own sequences) or ``"product"`` (every word over the library, used for the
    keyed Latin-square scheme whose per-session sequences the jammer cannot
    enumerate). ``None`` picks ``"product"`` for keyed Latin-square schemes.
    """

    scheme: Scheme
    active: tuple[int, ...]
    victim: int
    rng_seed: int = 0
    view: Optional[str] = None

    def __post_init__(self):
        active = tuple(sorted(int(i) for i in self.active))
        object.__setattr__(self, "active", active)
        if not active or len(set(active)) != len(active):
            raise ArgumentError("active indices must be distinct and non-empty")
        if not all(0 <= i < self.scheme.k for i in active):
            raise ArgumentError("active index out of range")
        if self.victim not in active:
            raise ArgumentError("the victim must be active")

    @property
    def w(self) -> int:
        return len(self.active) - 1

    @property
    def resolved_view(self) -> str:
        if self.view is not None:
            return self.view
        kind = (self.scheme.metadata.get("construction") or {}).get("kind")
        return "product" if kind == "srls" else "explicit"


# -- search spaces ----------------------------------------------------------

class ExplicitSpace:
    """Candidate sequences of a materialised scheme, as sorted indices."""

    def __init__(self, matrix: np.ndarray, m: int, members: Optional[np.ndarray] = None):
        self.matrix = matrix
        self.m = m
        self.members = np.arange(matrix.shape[0]) if members is None else members

    @property
    def size(self) -> int:
        return int(self.members.size)

    def column_counts(self, t: int) -> list[int]:
        return np.bincount(self.matrix[self.members, t], minlength=self.m).tolist()

    def keep(self, t: int, channels) -> "ExplicitSpace":
        col = self.matrix[self.members, t]
        return ExplicitSpace(self.matrix, self.m, self.members[np.isin(col, list(channels))])

    def drop(self, t: int, channels) -> "ExplicitSpace":
        col = self.matrix[self.members, t]
        return ExplicitSpace(self.matrix, self.m, self.members[~np.isin(col, list(channels))])

    def ordered_members(self, limit: int) -> list:
        return [int(i) for i in self.members[:limit]]

    def channel(self, member, t: int) -> int:
        return int(self.matrix[member, t])


class ProductSpace:
    """All words whose slot-t channel lies in ``allowed[t]``; restrictions keep it a product."""

    def __init__(self, allowed: tuple[frozenset, ...], m: int):
        self.allowed = allowed
        self.m = m

    @classmethod
    def full(cls, v: int, m: int) -> "ProductSpace":
        return cls(tuple(frozenset(range(m)) for _ in range(v)), m)

    @property
    def size(self) -> int:
        return math.prod(len(a) for a in self.allowed)

    def column_counts(self, t: int) -> list[int]:
        here = self.allowed[t]
        if not here:
            return [0] * self.m
        each = self.size // len(here)
        return [each if c in here else 0 for c in range(self.m)]

    def _with(self, t: int, new: frozenset) -> "ProductSpace":
        return ProductSpace(self.allowed[:t] + (new,) + self.allowed[t + 1:], self.m)

    def keep(self, t: int, channels) -> "ProductSpace":
        return self._with(t, self.allowed[t] & frozenset(channels))

    def drop(self, t: int, channels) -> "ProductSpace":
        return self._with(t, self.allowed[t] - frozenset(channels))

    def ordered_members(self, limit: int) -> list:
        # lexicographically smallest words only; enough for lock-on targets
        first = tuple(min(a) for a in self.allowed)
        return [first][:limit]

    def channel(self, member, t: int) -> int:
        return member[t]


# -- per-slot mechanics -----------------------------------------------------

def channel_active_probability(multiplicities: Sequence[int], k: int, w: int, channel: int) -> Fraction:
    """Chance that ``channel`` carries one of w+1 uniformly chosen active sequences:
    1 - C(k - a_i, w+1) / C(k, w+1)."""
    if sum(multiplicities) != k:
        raise ArgumentError(f"multiplicities sum to {sum(multiplicities)}, expected k={k}")
    if not 0 <= w or w + 1 > k:
        raise ArgumentError(f"need 0 <= w and w+1 <= k, got w={w}, k={k}")
    a = multiplicities[channel]
    return 1 - Fraction(math.comb(k - a, w + 1), math.comb(k, w + 1))


def _rank_channels(counts: list[int], n: int, w: int, tie: TieBreak, rng: np.random.Generator) -> list[int]:
    # C(n - a_i, w+1) ascending is the same order as the activity probability descending
    m = len(counts)
    order = rng.permutation(m).tolist() if tie == TieBreak.SEEDED_RANDOM else list(range(m))
    size = w + 1
    score = {a: math.comb(n - a, size) for a in set(counts)}
    return sorted(order, key=lambda c: score[counts[c]])


@dataclass(frozen=True)
class SlotRecord:
    slot: int
    phase: str                      # "search" or "locked"
    eavesdropped: tuple[int, ...]
    heard_active: tuple[bool, ...]
    lucky: Optional[bool]
    size_before: int
    size_after: int
    jammed: tuple[int, ...]
    victim_blocked: bool = False
    contradiction: bool = False     # every candidate was refuted; space left unchanged


Observer = Callable[[int, int], bool]


def _choose(space, t: int, config: JammerConfig, w: int, rng: np.random.Generator) -> tuple[list[int], list[int]]:
    """Eavesdrop channels for slot t, plus a full ranking used to top up jamming."""
    strategy = Strategy(config.strategy)
    m = space.m
    if strategy == Strategy.SCRIPTED and t < len(config.script):
        picks = list(dict.fromkeys(_as_channels(config.script[t])))
        return picks, picks + [c for c in range(m) if c not in picks]
    if strategy == Strategy.UNIFORM_RANDOM:
        ranking = rng.permutation(m).tolist()
        return ranking[:config.eavesdrop_count], ranking
    if strategy == Strategy.FIXED_CHANNEL:
        c = config.fixed_channel
        return [c][:config.eavesdrop_count], [c] + [x for x in range(m) if x != c]
    counts = space.column_counts(t)
    n = sum(counts)
    ranking = _rank_channels(counts, n, w, TieBreak(config.tie_break), rng)
    return ranking[:config.eavesdrop_count], ranking


def jammer_step(space, t: int, config: JammerConfig, observe: Observer, w: int,
                rng: np.random.Generator):
    """One search-phase slot: pick channels, observe activity, shrink the space, jam.

    Lucky (some eavesdropped channel heard active): keep candidates on the
    heard-active channels. Unlucky: drop candidates on the eavesdropped
    channels. The jammed channels are the eavesdropped ones, topped up from
    the strategy's ranking when ``jam_count`` exceeds them.
    """
    before = space.size
    if before == 0:
        raise AssertionError("empty search space")
    picks, ranking = _choose(space, t, config, w, rng)
    heard = tuple(bool(observe(t, c)) for c in picks)
    hot = [c for c, h in zip(picks, heard) if h]
    lucky = bool(hot) if picks else None
    if hot:
        new = space.keep(t, hot)
    elif picks:
        new = space.drop(t, picks)
    else:
        new = space
    contradiction = new.size == 0
    if contradiction:
        new = space
    jammed = list(picks[:config.jam_count])
    for c in ranking:
        if len(jammed) >= config.jam_count:
            break
        if c not in jammed:
            jammed.append(c)
    rec = SlotRecord(t, "search", tuple(picks), heard, lucky, before, new.size, tuple(jammed),
                     contradiction=contradiction)
    return new, rec


# -- sessions ---------------------------------------------------------------

@dataclass(frozen=True)
class JammerTrace:
    records: tuple[SlotRecord, ...]
    outcome: Outcome
    identification_slot: Optional[int]
    unlucky_count: int
    lucky_count: int
    target: object = None            # locked-on sequence (index, or word for product views)
    target_active: Optional[bool] = None
    misidentified: bool = False
    victim_throughput: Fraction = Fraction(1)
    jam_sequences: tuple = ()

    @property
    def search_sizes(self) -> list[int]:
        """|S*_0|, |S*_1|, ... up to the end of the search phase."""
        sizes = [self.records[0].size_before] if self.records else []
        sizes += [r.size_after for r in self.records if r.phase == "search"]
        return sizes


def _initial_space(session: SessionConfig):
    s = session.scheme
    if session.resolved_view == "product":
        return ProductSpace.full(s.v, s.m)
    if session.resolved_view != "explicit":
        raise ArgumentError(f"unknown jammer view {session.view!r}")
    return ExplicitSpace(s.matrix, s.m)


def run_session(session: SessionConfig, jammer: JammerConfig) -> JammerTrace:
    """Simulate one session of v slots against the adaptive jammer."""
    scheme = session.scheme
    jammer.validate(scheme.m)
    v, m, w = scheme.v, scheme.m, session.w
    rng = np.random.default_rng(jammer.rng_seed)
    active = session.active
    active_words = {scheme[i] for i in active}
    active_channels = [frozenset(scheme[i][t] for i in active) for t in range(v)]
    victim_seq = scheme[session.victim]
    others_channels = [frozenset(scheme[i][t] for i in active if i != session.victim) for t in range(v)]

    def observe(t: int, c: int) -> bool:
        return c in active_channels[t]

    def is_active(member) -> bool:
        if isinstance(member, tuple):
            return member in active_words
        return member in active

    space = _initial_space(session)
    records: list[SlotRecord] = []
    lucky_seen = False
    unlucky = lucky = 0
    outcome, ident_slot, target, target_active, misidentified = Outcome.SESSION_ENDED, None, None, None, False
    locked_members: list = []

    def stop_check(next_slot: int) -> bool:
        nonlocal outcome, ident_slot, target, target_active, misidentified, locked_members
        size = space.size
        if size == 1:
            target = space.ordered_members(1)[0]
            target_active = is_active(target)
            if target_active:
                outcome, ident_slot = Outcome.IDENTIFIED_SEQUENCE, next_slot
            else:
                misidentified = True
            locked_members = [target]
            return True
        if not lucky_seen and size <= w + 1:
            locked_members = space.ordered_members(m)
            target = locked_members[0]
            target_active = is_active(target)
            outcome, ident_slot = Outcome.SEARCH_SPACE_AT_MOST_ACTIVE, next_slot
            return True
        return False

    locked = stop_check(0)
    for t in range(v):
        if not locked:
            space, rec = jammer_step(space, t, jammer, observe, w, rng)
            if rec.lucky:
                lucky += 1
                lucky_seen = True
            elif rec.lucky is False:
                unlucky += 1
        else:
            jammed = []
            for member in locked_members:
                c = space.channel(member, t)
                if len(jammed) < jammer.jam_count and c not in jammed:
                    jammed.append(c)
            for c in range(m):
                if len(jammed) >= jammer.jam_count:
                    break
                if c not in jammed:
                    jammed.append(c)
            rec = SlotRecord(t, "locked", (), (), None, space.size, space.size, tuple(jammed))
        x = victim_seq[t]
        rec = replace(rec, victim_blocked=x in others_channels[t] or x in rec.jammed)
        records.append(rec)
        if not locked and t < v - 1:
            locked = stop_check(t + 1)

    blocked = sum(r.victim_blocked for r in records)
    jam_sequences = tuple(tuple(r.jammed[i] for r in records) for i in range(jammer.jam_count))
    return JammerTrace(tuple(records), outcome, ident_slot, unlucky, lucky, target, target_active,
                       misidentified, 1 - Fraction(blocked, v), jam_sequences)


# -- luck schedules ---------------------------------------------------------

def replay_luck_schedule(scheme: Scheme, schedule: Sequence[bool], active_index: int = 0) -> list[int]:
    """Drive single-channel eavesdropping through a prescribed lucky/unlucky
    pattern with one active sequence; return |S*_0|, ..., |S*_len(schedule)|.

    Lucky slots listen on the active sequence's channel; unlucky slots on the
    lowest other channel still present in the search space.
    """
    if len(schedule) > scheme.v:
        raise ArgumentError("schedule longer than the session")
    target = scheme[active_index]
    space = ExplicitSpace(scheme.matrix, scheme.m)
    sizes = [space.size]
    rng = np.random.default_rng(0)
    script: list = []
    for t, is_lucky in enumerate(schedule):
        if is_lucky:
            c = target[t]
        else:
            present = [ch for ch, n in enumerate(space.column_counts(t)) if n and ch != target[t]]
            if not present:
                raise ArgumentError(f"no inactive channel left to listen on at slot {t}")
            c = present[0]
        script.append((c,))
        cfg = JammerConfig(strategy=Strategy.SCRIPTED, script=tuple(script), tie_break=TieBreak.LOWEST_CHANNEL)
        space, rec = jammer_step(space, t, cfg, lambda slot, ch: ch == target[slot], 0, rng)
        if rec.lucky != bool(is_lucky):
            raise AssertionError("replayed luck does not match the schedule")
        sizes.append(space.size)
    return sizes


def predicted_search_size(m: int, tprime: int, t: int, unlucky: int) -> int:
    """(m-1)^B m^(t'-t) for a strength-t' index-1 orthogonal array."""
    if not 0 <= unlucky <= t <= tprime:
        raise ArgumentError("need 0 <= B <= t <= t'")
    return (m - 1) ** unlucky * m ** (tprime - t)


@dataclass(frozen=True)
class LuckAnalysis:
    predicted: int
    schedules_checked: int = 0


def luck_schedule_analysis(scheme: Scheme, tprime: int, t: int, unlucky: int, replay: bool = False) -> LuckAnalysis:
    """Predicted search-space size after t slots with ``unlucky`` unlucky ones.

    With ``replay`` every schedule of that shape is run through the simulator
    and must agree exactly.
    """
    oa = verify_orthogonal_array(scheme, tprime, 1)
    if not oa.passed:
        raise ArgumentError(f"scheme is not an OA of strength {tprime} and index 1: {oa.reason}")
    predicted = predicted_search_size(scheme.m, tprime, t, unlucky)
    checked = 0
    if replay:
        for bad in combinations(range(t), unlucky):
            schedule = [i not in bad for i in range(t)]
            got = replay_luck_schedule(scheme, schedule)[-1]
            if got != predicted:
                raise AssertionError(f"schedule {schedule}: simulated {got}, predicted {predicted}")
            checked += 1
    return LuckAnalysis(predicted, checked)


# -- Monte Carlo over sessions ------------------------------------------------

@dataclass(frozen=True)
class TrialResult:
    trial: int
    identification_slot: Optional[int]
    outcome: Outcome
    victim_throughput: Fraction
    misidentified: bool


@dataclass(frozen=True)
class GammaSummary:
    trials: int
    v: int
    w: int
    identified: int
    min_identification_slot: Optional[int]
    mean_identification_slot: Optional[float]
    max_identification_slot: Optional[int]
    session_ended_fraction: Fraction
    gamma_v_histogram: dict          # slots-to-identify (v when never) -> count
    min_gamma_v: int
    mean_victim_throughput: Fraction
    victim_throughput_se: float
    misidentified: int = 0
    results: list = field(default_factory=list, repr=False)


Model = Union[Scheme, SrlsFamily]


def _trial(model: Model, w: int, jammer: JammerConfig, seed: int, i: int, view: Optional[str]) -> TrialResult:
    rng = np.random.default_rng([seed, i])
    scheme = model.session(i) if isinstance(model, SrlsFamily) else model
    active = rng.choice(scheme.k, size=w + 1, replace=False)
    victim = int(active[rng.integers(w + 1)])
    session = SessionConfig(scheme, tuple(int(a) for a in active), victim, view=view)
    cfg = replace(jammer, rng_seed=int(rng.integers(2 ** 63)))
    tr = run_session(session, cfg)
    return TrialResult(i, tr.identification_slot, tr.outcome, tr.victim_throughput, tr.misidentified)


def _trial_chunk(args) -> list[TrialResult]:
    model, w, jammer, seed, lo, hi, view = args
    return [_trial(model, w, jammer, seed, i, view) for i in range(lo, hi)]


def estimate_gamma(model: Model, w: int, jammer: JammerConfig = JammerConfig(), trials: int = 1000,
                   seed: int = 0, workers: int = 1, view: Optional[str] = None) -> GammaSummary:
    """Run ``trials`` sessions with uniformly drawn active sets of size w+1 and a
    uniformly drawn victim among them.

    Trial i uses the random stream derived from ``(seed, i)`` (and session
    number i for keyed Latin-square families), so results do not depend on
    ``workers``.
    """
    if trials < 1:
        raise ArgumentError("need at least one trial")
    k = model.v if isinstance(model, SrlsFamily) else model.k
    v = model.v
    if not 0 <= w < k:
        raise ArgumentError(f"need 1 <= w+1 <= k={k}")
    if workers <= 1:
        results = _trial_chunk((model, w, jammer, seed, 0, trials, view))
    else:
        step = -(-trials // workers)
        chunks = [(model, w, jammer, seed, lo, min(lo + step, trials), view) for lo in range(0, trials, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_trial_chunk, chunks) for r in part]
    return summarise(results, v, w)


def summarise(results: list[TrialResult], v: int, w: int) -> GammaSummary:
    n = len(results)
    slots = [r.identification_slot for r in results if r.identification_slot is not None]
    gammas = [r.identification_slot if r.identification_slot is not None else v for r in results]
    hist: dict[int, int] = {}
    for g in gammas:
        hist[g] = hist.get(g, 0) + 1
    tps = [r.victim_throughput for r in results]
    mean_tp = sum(tps, Fraction(0)) / n
    if n > 1:
        var = sum((float(x) - float(mean_tp)) ** 2 for x in tps) / (n - 1)
        se = math.sqrt(var / n)
    else:
        se = 0.0
    ended = sum(r.outcome == Outcome.SESSION_ENDED for r in results)
    return GammaSummary(
        trials=n, v=v, w=w, identified=len(slots),
        min_identification_slot=min(slots) if slots else None,
        mean_identification_slot=sum(slots) / len(slots) if slots else None,
        max_identification_slot=max(slots) if slots else None,
        session_ended_fraction=Fraction(ended, n),
        gamma_v_histogram=dict(sorted(hist.items())),
        min_gamma_v=min(gammas),
        mean_victim_throughput=mean_tp,
        victim_throughput_se=se,
        misidentified=sum(r.misidentified for r in results),
        results=results,
    )
