"""Seedable value and event generation across time scales.

Every stochastic choice in the engine flows through RandomSource, a
64-bit linear congruential generator with pinned constants, so a (config,
seed) pair reproduces a variant exactly.  Distributions, breakpoint
envelopes, Markov chains, and manual value lists all plug into an event
generator that fills a time window with atomic events.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import EmptyList, IndexOutOfRange, PropertyUnknown
from .events import AtomicEvent
from .properties import Instrument, Number, PropertyValue, validate_value

_MASK64 = (1 << 64) - 1
_LCG_MUL = 6364136223846793005
_LCG_INC = 1442695040888963407


class RandomSource:
    """Deterministic 64-bit LCG (Knuth's MMIX constants).

    state' = state * 6364136223846793005 + 1442695040888963407  (mod 2^64)
    unit output = (state' >> 11) / 2^53, uniform in [0, 1).
    """

    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        self.state = seed & _MASK64

    def next_unit(self) -> float:
        self.state = (self.state * _LCG_MUL + _LCG_INC) & _MASK64
        return (self.state >> 11) / 9007199254740992.0  # 2^53


def weighted_index(weights, u: float) -> int:
    """Smallest index i with prefix_sum(weights)/total > u.

    The single prefix-sum rule used by every discrete draw in the
    engine; zero-weight entries can never be selected.
    """
    total = math.fsum(weights)
    if total <= 0:
        raise ValueError("weights must have positive total")
    acc = 0.0
    last_positive = 0
    for i, w in enumerate(weights):
        acc += w
        if w > 0:
            last_positive = i
        if acc / total > u:
            return i
    return last_positive  # guards u rounding up against the top edge


class Distribution:
    """Base of the samplable probability distributions."""

    def sample(self, rng: RandomSource) -> float:
        raise NotImplementedError

    def count(self, rng: RandomSource) -> int:
        """Sample rounded to the nearest integer, clamped at zero."""
        return max(0, int(math.floor(self.sample(rng) + 0.5)))


@dataclass(frozen=True)
class Uniform(Distribution):
    a: float
    b: float

    def __post_init__(self):
        if self.a > self.b:
            raise ValueError(f"Uniform: a={self.a} > b={self.b}")

    def sample(self, rng: RandomSource) -> float:
        return self.a + rng.next_unit() * (self.b - self.a)


@dataclass(frozen=True)
class DiscreteWeights(Distribution):
    """Draws an index with probability proportional to its weight.

    As a count distribution the drawn index + 1 is the count.
    """

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if any(x < 0 for x in w):
            raise ValueError("DiscreteWeights: weights must be >= 0")
        if math.fsum(w) <= 0:
            raise ValueError("DiscreteWeights: weights must have positive sum")

    def index_for_unit(self, u: float) -> int:
        return weighted_index(self.weights, u)

    def sample(self, rng: RandomSource) -> float:
        return float(self.index_for_unit(rng.next_unit()))

    def count(self, rng: RandomSource) -> int:
        return self.index_for_unit(rng.next_unit()) + 1


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError(f"Exponential: rate must be > 0, got {self.rate}")

    def sample(self, rng: RandomSource) -> float:
        return -math.log(1.0 - rng.next_unit()) / self.rate


@dataclass(frozen=True)
class Envelope:
    """Breakpoint function with linear interpolation and edge clamping."""

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(t), float(v)) for t, v in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        if not pts:
            raise ValueError("Envelope: needs at least one breakpoint")
        times = [t for t, _ in pts]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("Envelope: breakpoint times must be strictly increasing")
        if any(not math.isfinite(v) for _, v in pts):
            raise ValueError("Envelope: breakpoint values must be finite")

    def value(self, t: float) -> float:
        pts = self.breakpoints
        if t <= pts[0][0]:
            return pts[0][1]
        if t >= pts[-1][0]:
            return pts[-1][1]
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if t == t0:
                return v0
            if t0 < t < t1:
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        return pts[-1][1]


def envelope_value(env: Envelope, t: float) -> float:
    """Envelope value at time t (exact at breakpoints, clamped outside)."""
    return env.value(t)


@dataclass(frozen=True)
class MarkovChain:
    """Finite-state chain with a row-stochastic transition matrix."""

    states: tuple
    transition: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        states = tuple(self.states)
        rows = tuple(tuple(float(x) for x in row) for row in self.transition)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transition", rows)
        n = len(states)
        if n == 0:
            raise ValueError("MarkovChain: needs at least one state")
        if len(rows) != n or any(len(row) != n for row in rows):
            raise ValueError(f"MarkovChain: transition matrix must be {n}x{n}")
        for i, row in enumerate(rows):
            if any(x < 0 for x in row):
                raise ValueError(f"MarkovChain: row {i} has negative entries")
            if abs(math.fsum(row) - 1.0) > 1e-9:
                raise ValueError(f"MarkovChain: row {i} sums to {math.fsum(row)}, not 1")

    def step(self, current: int, rng: RandomSource) -> int:
        if not 0 <= current < len(self.states):
            raise IndexOutOfRange(f"markov state {current} outside 0..{len(self.states) - 1}")
        return weighted_index(self.transition[current], rng.next_unit())


def markov_step(chain: MarkovChain, current: int, rng: RandomSource) -> int:
    """Next state index, sampled from the chain's row for ``current``."""
    return chain.step(current, rng)


def select_from_list(values, index: int | None = None, rng: RandomSource | None = None):
    """Pick one element, either by explicit index or uniformly at random."""
    values = list(values)
    if not values:
        raise EmptyList("cannot select from an empty list")
    if index is not None:
        if not 0 <= index < len(values):
            raise IndexOutOfRange(f"list index {index} outside 0..{len(values) - 1}")
        return values[index]
    if rng is None:
        raise ValueError("either an index or an rng is required")
    return values[weighted_index([1.0] * len(values), rng.next_unit())]


@dataclass(frozen=True)
class ValueList:
    """Manual list of candidate values, optionally scripted by index.

    With ``indices`` set, event k takes values[indices[k mod len]];
    without, each event picks uniformly at random.
    """

    values: tuple
    indices: tuple[int, ...] | None = None

    def __post_init__(self):
        if not self.values:
            raise EmptyList("value list must be non-empty")
        if self.indices is not None:
            for i in self.indices:
                if not 0 <= i < len(self.values):
                    raise IndexOutOfRange(
                        f"scripted index {i} outside 0..{len(self.values) - 1}"
                    )

    def pick(self, event_index: int, rng: RandomSource):
        if self.indices:
            return self.values[self.indices[event_index % len(self.indices)]]
        return select_from_list(self.values, rng=rng)


@dataclass
class MarkovBinding:
    """Binds a property to successive states of a Markov chain."""

    chain: MarkovChain
    start: int = 0
    _current: int = field(init=False, default=0)

    def __post_init__(self):
        if not 0 <= self.start < len(self.chain.states):
            raise IndexOutOfRange(f"markov start state {self.start} out of range")
        self._current = self.start

    def reset(self):
        self._current = self.start

    def next_value(self, rng: RandomSource):
        self._current = self.chain.step(self._current, rng)
        return self.chain.states[self._current]


# Binding kinds accepted by EventGenerator: Distribution, Envelope,
# fixed PropertyValue, ValueList, MarkovBinding.

START_TIME = "Start Time"
DURATION = "Duration"


@dataclass(frozen=True)
class EventGenerator:
    """Fills a window with atomic events by drawing every bound property.

    Start-time draws are normalized window positions in [0, 1]; duration
    draws are seconds, clamped so each event fits the window.  Envelope
    bindings are evaluated at the event's normalized position and use no
    random draw.
    """

    count: Distribution
    bindings: dict
    label: str = "note"


def sample(dist: Distribution, rng: RandomSource) -> float:
    """Draw one value (an index, for DiscreteWeights)."""
    return dist.sample(rng)


def count_of(dist: Distribution, rng: RandomSource) -> int:
    """Draw a non-negative integer count from any distribution."""
    return dist.count(rng)


def _draw_value(binding, rng: RandomSource, event_index: int, position: float):
    if isinstance(binding, Envelope):
        return Number(binding.value(position))
    if isinstance(binding, Distribution):
        return Number(binding.sample(rng))
    if isinstance(binding, ValueList):
        return binding.pick(event_index, rng)
    if isinstance(binding, MarkovBinding):
        return binding.next_value(rng)
    if isinstance(binding, PropertyValue):
        return binding
    raise TypeError(f"unsupported binding {binding!r}")


def generate_events(
    gen: EventGenerator,
    instr: Instrument,
    window: tuple[float, float],
    rng: RandomSource,
) -> list[AtomicEvent]:
    """Generate atomic events for one instrument inside a time window.

    The number of events comes from the generator's count distribution.
    Properties are drawn in a pinned order (Start Time, Duration, then
    the remaining bindings sorted by name) and validated against the
    instrument's descriptors; every event lies inside the window.
    """
    w_start, w_end = window
    if w_start > w_end:
        raise ValueError(f"window start {w_start} > end {w_end}")
    length = w_end - w_start

    for name in gen.bindings:
        if name not in instr.descriptors:
            raise PropertyUnknown(
                f"instrument {instr.name!r} has no property {name!r}"
            )
    for binding in gen.bindings.values():
        if isinstance(binding, MarkovBinding):
            binding.reset()

    other_names = sorted(n for n in gen.bindings if n not in (START_TIME, DURATION))
    n_events = gen.count.count(rng)
    events = []
    for k in range(n_events):
        # Start time first: envelopes need the event's window position.
        start_binding = gen.bindings.get(START_TIME, Uniform(0.0, 1.0))
        raw = _draw_value(start_binding, rng, k, 0.0)
        u = raw.value if isinstance(raw, Number) else float(raw.value)
        start = min(max(w_start + u * length, w_start), w_end)
        position = (start - w_start) / length if length > 0 else 0.0

        dur_binding = gen.bindings.get(DURATION, Number(0.0))
        raw = _draw_value(dur_binding, rng, k, position)
        duration = max(0.0, min(float(raw.value), w_end - start))

        if START_TIME in instr.descriptors:
            validate_value(instr.descriptor(START_TIME), Number(start))
        if DURATION in instr.descriptors:
            validate_value(instr.descriptor(DURATION), Number(duration))

        props = {}
        for name in other_names:
            value = _draw_value(gen.bindings[name], rng, k, position)
            props[name] = validate_value(instr.descriptor(name), value)

        events.append(
            AtomicEvent(
                name=f"{gen.label}-{k:04d}",
                start=start,
                duration=duration,
                instrument=instr.name,
                properties=props,
            )
        )
    return events
