"""Typed, validated instrument control parameters.

An instrument is a table of property descriptors indexed by name.  Pitch
may arrive as a frequency in Hz, an integer index into a tuning table,
or a note name; everything resolves to Hz on demand.  Note names use
twelve-tone equal temperament with A4 = 440 Hz, and semitone numbers
follow the MIDI convention (C4 = 60, A4 = 69).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

from .errors import (
    IndexOutOfRange,
    NoteParseError,
    PitchUnresolvable,
    RangeViolation,
    TypeMismatch,
)

#: Closed set of property kinds accepted by the config loader.
PROPERTY_KINDS = frozenset({"frequency", "count", "level", "label", "time"})


class PropertyValue:
    """Base of the three value variants: Number, Index, Text."""

    __slots__ = ()


@dataclass(frozen=True)
class Number(PropertyValue):
    """A real-valued parameter (frequency in Hz, level, seconds, ...)."""

    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value):
            raise ValueError("Number value must be finite")


@dataclass(frozen=True)
class Index(PropertyValue):
    """A non-negative integer, e.g. a tuning-table position."""

    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("Index value must be >= 0")


@dataclass(frozen=True)
class Text(PropertyValue):
    """A string parameter, e.g. a spelled note name."""

    value: str


@dataclass(frozen=True)
class PropertyDescriptor:
    """Declares one control parameter: its kind, accepted variants, range.

    ``accepted`` holds the PropertyValue subclasses the parameter takes.
    ``value_range`` applies to the raw numeric payload of Number and
    Index values.  ``tuning`` names the tuning table used to resolve
    Index pitches for frequency-kind properties.
    """

    name: str
    kind: str
    accepted: frozenset = frozenset({Number})
    value_range: tuple[float, float] | None = None
    tuning: str | None = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("property name must be non-empty")
        if self.kind not in PROPERTY_KINDS:
            raise ValueError(f"unknown property kind {self.kind!r}")
        if not self.accepted:
            raise ValueError(f"property {self.name!r}: accepted variant set is empty")
        object.__setattr__(self, "accepted", frozenset(self.accepted))
        if self.value_range is not None:
            lo, hi = self.value_range
            if lo > hi:
                raise ValueError(f"property {self.name!r}: range min {lo} > max {hi}")


@dataclass(frozen=True)
class Instrument:
    """A named collection of property descriptors, indexed by string."""

    name: str
    descriptors: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.name:
            raise ValueError("instrument name must be non-empty")

    def descriptor(self, prop_name: str) -> PropertyDescriptor:
        return self.descriptors[prop_name]


@dataclass(frozen=True)
class TuningTable:
    """Strictly ascending table of positive frequencies, zero-indexed."""

    name: str
    frequencies: tuple[float, ...]

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        object.__setattr__(self, "frequencies", freqs)
        if any(f <= 0 for f in freqs):
            raise ValueError(f"tuning {self.name!r}: frequencies must be > 0")
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError(f"tuning {self.name!r}: frequencies must be strictly ascending")

    def __getitem__(self, index: int) -> float:
        if not 0 <= index < len(self.frequencies):
            raise IndexOutOfRange(
                f"tuning {self.name!r}: index {index} outside 0..{len(self.frequencies) - 1}"
            )
        return self.frequencies[index]


def register_property(instr: Instrument, desc: PropertyDescriptor) -> Instrument:
    """Return a copy of the instrument with ``desc`` stored under its name.

    Re-registering an existing name replaces the previous descriptor.
    """
    table = dict(instr.descriptors)
    table[desc.name] = desc
    return replace(instr, descriptors=table)


def validate_value(desc: PropertyDescriptor, v: PropertyValue) -> PropertyValue:
    """Check a value against the descriptor and return it unchanged.

    Raises TypeMismatch for a variant outside ``desc.accepted`` and
    RangeViolation when a numeric payload falls outside the range.
    """
    if type(v) not in desc.accepted:
        names = sorted(t.__name__ for t in desc.accepted)
        raise TypeMismatch(
            f"property {desc.name!r}: {type(v).__name__} not accepted (allowed: {names})"
        )
    if desc.value_range is not None and isinstance(v, (Number, Index)):
        lo, hi = desc.value_range
        if not lo <= v.value <= hi:
            raise RangeViolation(
                f"property {desc.name!r}: value {v.value} outside [{lo}, {hi}]"
            )
    return v


# --- pitch space ---

_NOTE_RE = re.compile(r"^([A-G])([#b]?)(-?\d+)$")
_LETTER_SEMITONES = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
_SHARP_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")


def note_to_semitone(name: str) -> int:
    """Parse scientific pitch notation to a MIDI-style semitone number."""
    m = _NOTE_RE.match(name.strip())
    if m is None:
        raise NoteParseError(f"cannot parse note name {name!r}")
    letter, accidental, octave = m.groups()
    offset = _LETTER_SEMITONES[letter]
    if accidental == "#":
        offset += 1
    elif accidental == "b":
        offset -= 1
    return (int(octave) + 1) * 12 + offset


def semitone_to_hz(semitone: float) -> float:
    """Equal-temperament frequency for a (possibly fractional) semitone."""
    return 440.0 * 2.0 ** ((semitone - 69.0) / 12.0)


def hz_to_semitone(hz: float) -> float:
    """Inverse of semitone_to_hz; requires hz > 0."""
    if hz <= 0:
        raise PitchUnresolvable(f"frequency must be > 0, got {hz}")
    return 69.0 + 12.0 * math.log2(hz / 440.0)


def semitone_to_name(semitone: int) -> str:
    """Sharp-spelled note name for an integral semitone number."""
    octave, step = divmod(int(semitone), 12)
    return f"{_SHARP_NAMES[step]}{octave - 1}"


def resolve_pitch(v: PropertyValue, tuning: TuningTable | None = None) -> float:
    """Resolve any pitch representation to a frequency in Hz.

    Number passes through, Index looks up the tuning table, Text parses
    a note name.  A4 resolves to exactly 440 Hz.
    """
    if isinstance(v, Number):
        return v.value
    if isinstance(v, Index):
        if tuning is None:
            raise PitchUnresolvable(
                f"index pitch {v.value} given without a tuning table"
            )
        return tuning[v.value]
    if isinstance(v, Text):
        return semitone_to_hz(note_to_semitone(v.value))
    raise PitchUnresolvable(f"cannot resolve pitch from {v!r}")


def resolve_semitone(v: PropertyValue, tuning: TuningTable | None = None) -> float:
    """Resolve any pitch representation to a (fractional) semitone number."""
    if isinstance(v, Text):
        return float(note_to_semitone(v.value))
    return hz_to_semitone(resolve_pitch(v, tuning))
