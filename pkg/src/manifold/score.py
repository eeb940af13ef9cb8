"""Deterministic text renderings of a piece.

Two formats: a synthesis score (one ``i`` statement per atomic event,
ready to translate into any synthesis language) and an indented notation
listing of the event tree.  Both are byte-deterministic for a fixed
piece: fixed 6-decimal numerics, sorted keys, LF line endings.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PitchUnresolvable
from .events import AtomicEvent, CompoundEvent, Piece, flatten_atomics, walk
from .properties import (
    Index,
    Instrument,
    Number,
    Text,
    TuningTable,
    hz_to_semitone,
    resolve_pitch,
    semitone_to_name,
    validate_value,
)


@dataclass(frozen=True)
class ScoreDocument:
    """Header plus ordered score lines; ``text()`` is the file content."""

    piece_name: str
    duration: float
    lines: tuple[str, ...]

    def text(self) -> str:
        header = [f"; piece {self.piece_name}", f"; duration {self.duration:.6f}"]
        return "\n".join(header + list(self.lines)) + "\n"


def _score_key(name: str) -> str:
    return name.lower().replace(" ", "_")


def _tuning_for(
    desc, tunings: dict[str, TuningTable] | None
) -> TuningTable | None:
    if desc is None or desc.tuning is None:
        return None
    if not tunings or desc.tuning not in tunings:
        raise PitchUnresolvable(f"tuning table {desc.tuning!r} is not available")
    return tunings[desc.tuning]


def _render_value(value, desc, tunings) -> str:
    if desc is not None:
        validate_value(desc, value)
        if desc.kind == "frequency":
            return f"{resolve_pitch(value, _tuning_for(desc, tunings)):.6f}"
    if isinstance(value, (Number, Index)):
        return f"{float(value.value):.6f}"
    if isinstance(value, Text):
        return value.value
    raise TypeError(f"cannot render property value {value!r}")


def render_synthesis_score(
    piece: Piece,
    instruments: dict[str, Instrument] | None = None,
    tunings: dict[str, TuningTable] | None = None,
) -> str:
    """One line per atomic event: ``i <instr> <start> <dur> <key>=<value>...``

    Keys are lowercased with spaces as underscores and sorted; numeric
    values use fixed 6-decimal notation; frequency-kind properties are
    emitted as resolved Hz.  Lines are ordered by (start, instrument,
    event name).
    """
    instruments = instruments or {}
    lines = []
    for event in flatten_atomics(piece):
        instr = instruments.get(event.instrument)
        parts = [f"i {event.instrument} {event.start:.6f} {event.duration:.6f}"]
        rendered = {}
        for name, value in event.properties.items():
            desc = instr.descriptors.get(name) if instr else None
            rendered[_score_key(name)] = _render_value(value, desc, tunings)
        for key in sorted(rendered):
            parts.append(f"{key}={rendered[key]}")
        lines.append(" ".join(parts))
    return ScoreDocument(
        piece_name=piece.root.name, duration=piece.root.duration, lines=tuple(lines)
    ).text()


def _pitch_label(event: AtomicEvent, instr, tunings) -> str:
    """Nearest note name when within half a semitone, else raw Hz, else ``-``."""
    value = None
    desc = None
    if instr is not None:
        for name in sorted(event.properties):
            d = instr.descriptors.get(name)
            if d is not None and d.kind == "frequency":
                value, desc = event.properties[name], d
                break
    elif "Pitch" in event.properties:
        value = event.properties["Pitch"]
    if value is None:
        return "-"
    try:
        hz = resolve_pitch(value, _tuning_for(desc, tunings))
        semitone = hz_to_semitone(hz)
    except PitchUnresolvable:
        return "-"
    nearest = round(semitone)
    if abs(semitone - nearest) <= 0.5 and nearest >= 0:
        return semitone_to_name(int(nearest))
    return f"{hz:.6f}Hz"


def render_notation_text(
    piece: Piece,
    instruments: dict[str, Instrument] | None = None,
    tunings: dict[str, TuningTable] | None = None,
) -> str:
    """Indented tree listing: ``[name start..end]`` for compound events,
    ``name pitch start duration`` for atomic ones."""
    instruments = instruments or {}
    lines = []
    for event, depth in walk(piece.root):
        pad = "  " * depth
        if isinstance(event, CompoundEvent):
            lines.append(f"{pad}[{event.name} {event.start:.6f}..{event.end:.6f}]")
        else:
            instr = instruments.get(getattr(event, "instrument", ""), None)
            label = _pitch_label(event, instr, tunings)
            lines.append(
                f"{pad}{event.name} {label} {event.start:.6f} {event.duration:.6f}"
            )
    return "\n".join(lines) + "\n" if lines else ""
