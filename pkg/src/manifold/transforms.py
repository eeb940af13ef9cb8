"""Traditional music operations over groups of events.

Transposition, inversion, retrograde, augmentation, chord inversion,
and canon, all as pure functions.  Pitch work happens in semitone
space: note names and tuning indices are resolved first, and transformed
pitches are written back as frequencies in Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import EmptyChord
from .events import AtomicEvent
from .properties import Number, TuningTable, resolve_semitone, semitone_to_hz

PITCH_PROPERTY = "Pitch"


@dataclass(frozen=True)
class PitchSet:
    """A bag of semitone numbers (MIDI-style, A4 = 69)."""

    pitches: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(p) for p in self.pitches)
        object.__setattr__(self, "pitches", values)
        if any(not math.isfinite(p) for p in values):
            raise ValueError("pitches must be finite")


@dataclass(frozen=True)
class EventGroup:
    """Atomic events sharing one pitch property, within a time span.

    Events are kept sorted by (start, name) so "the first event" is
    well defined.
    """

    events: tuple[AtomicEvent, ...]
    span: tuple[float, float]
    pitch_property: str = PITCH_PROPERTY

    def __post_init__(self):
        events = tuple(sorted(self.events, key=lambda e: (e.start, e.name)))
        span = (float(self.span[0]), float(self.span[1]))
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "span", span)
        if span[0] > span[1]:
            raise ValueError(f"span start {span[0]} > end {span[1]}")
        for e in events:
            if e.start < span[0] or e.end > span[1]:
                raise ValueError(
                    f"event {e.name!r} [{e.start}, {e.end}] outside span {span}"
                )


def _map_pitches(group: EventGroup, fn, tuning: TuningTable | None) -> EventGroup:
    """Apply a semitone-space function to every pitched event.

    Events without the group's pitch property pass through unchanged;
    transformed pitches are stored as Number(Hz).
    """
    out = []
    for e in group.events:
        value = e.properties.get(group.pitch_property)
        if value is None:
            out.append(e)
            continue
        semitone = resolve_semitone(value, tuning)
        props = dict(e.properties)
        props[group.pitch_property] = Number(semitone_to_hz(fn(semitone)))
        out.append(replace(e, properties=props))
    return replace(group, events=tuple(out))


def transpose(
    group: EventGroup, interval: float, tuning: TuningTable | None = None
) -> EventGroup:
    """Shift every pitch by the given number of semitones."""
    if interval == 0:
        return group
    return _map_pitches(group, lambda s: s + interval, tuning)


def invert(
    group: EventGroup, axis: float, tuning: TuningTable | None = None
) -> EventGroup:
    """Reflect every pitch about an axis: pitch' = 2*axis - pitch."""
    return _map_pitches(group, lambda s: 2.0 * axis - s, tuning)


def retrograde(group: EventGroup) -> EventGroup:
    """Reverse the group in time; durations and pitches are untouched."""
    lo, hi = group.span
    flipped = tuple(
        replace(e, start=lo + hi - (e.start + e.duration)) for e in group.events
    )
    return replace(group, events=flipped)


def augment(
    group: EventGroup,
    factor: float,
    mode: str = "durations",
    tuning: TuningTable | None = None,
) -> EventGroup:
    """Stretch or shrink the group.

    "durations" scales start offsets, durations, and the span itself by
    the factor; "pitch-intervals" scales each pitch's distance from the
    first event's pitch.
    """
    if not factor > 0:
        raise ValueError(f"factor must be > 0, got {factor}")
    if mode not in ("durations", "pitch-intervals"):
        raise ValueError(f"unknown augment mode {mode!r}")
    if factor == 1:
        return group
    if mode == "durations":
        lo, hi = group.span
        scaled = tuple(
            replace(
                e,
                start=lo + factor * (e.start - lo),
                duration=factor * e.duration,
            )
            for e in group.events
        )
        return replace(
            group, events=scaled, span=(lo, lo + factor * (hi - lo))
        )
    if not group.events:
        return group
    anchor = resolve_semitone(
        group.events[0].properties[group.pitch_property], tuning
    )
    return _map_pitches(group, lambda s: anchor + factor * (s - anchor), tuning)


def chord_invert(chord: PitchSet, k: int) -> PitchSet:
    """Raise the k lowest pitches by an octave and re-sort.

    k beyond the chord size wraps: every full cycle of the size lifts
    the whole chord by an octave, and the remainder inverts as usual.
    """
    if not chord.pitches:
        raise EmptyChord("cannot invert an empty chord")
    if k < 0:
        raise ValueError(f"inversion count must be >= 0, got {k}")
    size = len(chord.pitches)
    octaves, rem = divmod(k, size)
    pitches = sorted(p + 12.0 * octaves for p in chord.pitches)
    raised = [p + 12.0 for p in pitches[:rem]] + pitches[rem:]
    return PitchSet(pitches=tuple(sorted(raised)))


def apply_chord_inversion(
    group: EventGroup, k: int, tuning: TuningTable | None = None
) -> EventGroup:
    """Chord-invert the pitches of a group, reassigned in pitch order.

    The event with the lowest pitch receives the lowest inverted pitch,
    and so on; times are untouched.
    """
    pitched = [
        (resolve_semitone(e.properties[group.pitch_property], tuning), i)
        for i, e in enumerate(group.events)
        if group.pitch_property in e.properties
    ]
    if not pitched:
        raise EmptyChord("group has no pitched events")
    inverted = chord_invert(PitchSet(tuple(s for s, _ in pitched)), k)
    by_pitch = sorted(pitched)
    new_semitone = {}
    for (_, event_index), pitch in zip(by_pitch, inverted.pitches):
        new_semitone[event_index] = pitch
    out = []
    for i, e in enumerate(group.events):
        if i not in new_semitone:
            out.append(e)
            continue
        props = dict(e.properties)
        props[group.pitch_property] = Number(semitone_to_hz(new_semitone[i]))
        out.append(replace(e, properties=props))
    return replace(group, events=tuple(out))


def shift(group: EventGroup, offset: float) -> EventGroup:
    """Move the whole group (events and span) later by offset seconds."""
    if offset == 0:
        return group
    moved = tuple(replace(e, start=e.start + offset) for e in group.events)
    lo, hi = group.span
    return replace(group, events=moved, span=(lo + offset, hi + offset))


def canon(
    subject: EventGroup,
    voices: int,
    delay: float,
    interval: float,
    tuning: TuningTable | None = None,
) -> list[EventGroup]:
    """Imitate the subject at successive delays and transpositions.

    Voice v is the subject shifted by v*delay seconds and transposed by
    v*interval semitones; voice 0 is the subject itself.
    """
    if voices < 1:
        raise ValueError(f"voices must be >= 1, got {voices}")
    if delay < 0:
        raise ValueError(f"delay must be >= 0, got {delay}")
    out = [subject]
    for v in range(1, voices):
        out.append(transpose(shift(subject, v * delay), v * interval, tuning))
    return out
