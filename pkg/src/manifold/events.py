"""Event tree spanning every time scale of a piece.

A single abstract event type carries (name, start, duration).  Compound
events contain other events of shorter or equal duration; atomic events
carry concrete instrument property values and contain nothing.  A piece
is the most inclusive compound event, rooted at time zero.
"""

from __future__ import annotations

import math
from bisect import insort
from dataclasses import dataclass, field, replace

from .errors import ContainmentViolation


@dataclass(frozen=True)
class Event:
    """A named interval of time: the base of every time scale."""

    name: str
    start: float
    duration: float

    def __post_init__(self):
        if not self.name:
            raise ValueError("event name must be non-empty")
        if not (math.isfinite(self.start) and math.isfinite(self.duration)):
            raise ValueError(f"event {self.name!r}: start/duration must be finite")
        if self.start < 0 or self.duration < 0:
            raise ValueError(f"event {self.name!r}: start and duration must be >= 0")

    @property
    def end(self) -> float:
        return self.start + self.duration

    def span(self) -> tuple[float, float]:
        """Return the covered interval [start, start + duration]."""
        return (self.start, self.start + self.duration)


def total_span(event: Event) -> tuple[float, float]:
    """Interval covered by an event, as (start, end)."""
    return event.span()


def _child_key(event: Event) -> tuple[float, str]:
    return (event.start, event.name)


@dataclass(frozen=True)
class CompoundEvent(Event):
    """An event containing other events, kept ordered by (start, name)."""

    children: tuple[Event, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        for child in self.children:
            _check_containment(self, child)
        keys = [_child_key(c) for c in self.children]
        if keys != sorted(keys):
            raise ValueError(f"compound {self.name!r}: children not ordered by (start, name)")


@dataclass(frozen=True)
class AtomicEvent(Event):
    """A leaf event: one instrument voice with concrete property values.

    ``properties`` maps property names to values from
    :mod:`manifold.properties`; validation against the instrument's
    descriptor table happens where the table is in scope.
    """

    instrument: str = ""
    properties: dict = field(default_factory=dict)

    def __post_init__(self):
        super().__post_init__()
        if not self.instrument:
            raise ValueError(f"atomic event {self.name!r}: instrument reference required")


@dataclass(frozen=True)
class Piece:
    """The most inclusive compound event, rooted at time zero."""

    root: CompoundEvent

    def __post_init__(self):
        if self.root.start != 0:
            raise ValueError("piece root must start at 0")


def _check_containment(parent: Event, child: Event) -> None:
    if child.duration > parent.duration:
        raise ContainmentViolation(
            f"child {child.name!r} duration {child.duration} exceeds "
            f"parent {parent.name!r} duration {parent.duration}"
        )
    if child.start < parent.start or child.end > parent.end:
        raise ContainmentViolation(
            f"child {child.name!r} interval [{child.start}, {child.end}] not inside "
            f"parent {parent.name!r} interval [{parent.start}, {parent.end}]"
        )


def add_child(parent: CompoundEvent, child: Event) -> CompoundEvent:
    """Return a copy of ``parent`` with ``child`` inserted in (start, name) order.

    Raises ContainmentViolation if the child's interval is not contained
    in the parent's, or its duration exceeds the parent's.
    """
    _check_containment(parent, child)
    children = list(parent.children)
    insort(children, child, key=_child_key)
    return replace(parent, children=tuple(children))


def remove_child(parent: CompoundEvent, child: Event) -> CompoundEvent:
    """Return a copy of ``parent`` without the first child equal to ``child``."""
    children = list(parent.children)
    children.remove(child)
    return replace(parent, children=tuple(children))


def iter_atomics(event: Event):
    """Depth-first iteration over every atomic event under ``event``."""
    if isinstance(event, AtomicEvent):
        yield event
    elif isinstance(event, CompoundEvent):
        for child in event.children:
            yield from iter_atomics(child)


def flatten_atomics(piece: Piece) -> list[AtomicEvent]:
    """All atomic leaves of a piece, sorted by (start, instrument, name)."""
    leaves = list(iter_atomics(piece.root))
    leaves.sort(key=lambda e: (e.start, e.instrument, e.name))
    return leaves


def walk(event: Event, depth: int = 0):
    """Yield (event, depth) pairs depth-first in child order."""
    yield event, depth
    if isinstance(event, CompoundEvent):
        for child in event.children:
            yield from walk(child, depth + 1)
