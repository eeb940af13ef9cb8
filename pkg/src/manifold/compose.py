"""The end-to-end pipeline: from a validated config to rendered variants.

Each variant runs on its own random source seeded with base seed +
variant index: sections are scheduled on the time grid, every section's
generators fill its window with events, transform steps reshape them,
and the finished event tree renders to the requested formats.  All
variants of one run share the section id set while differing in the
stochastic details.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .config import PieceConfig, SectionConfig
from .events import AtomicEvent, CompoundEvent, Piece
from .generators import RandomSource, generate_events
from .matrix import Assignment, schedule
from .score import render_notation_text, render_synthesis_score
from .transforms import (
    EventGroup,
    apply_chord_inversion,
    augment,
    canon,
    invert,
    retrograde,
    transpose,
)

FORMATS = ("sco", "txt", "png")


@dataclass(frozen=True)
class VariantResult:
    """One composed variant: its seed, event tree, and rendered texts."""

    index: int
    seed: int
    piece: Piece
    assignments: tuple[Assignment, ...]
    scores: dict


def _pitch_property_name(instrument) -> str:
    for name in sorted(instrument.descriptors):
        if instrument.descriptors[name].kind == "frequency":
            return name
    return "Pitch"


def _clip_to_window(events, window) -> list[AtomicEvent]:
    """Drop or shorten events so they fit the section window.

    Transforms (canon delays, duration augmentation) may push events
    past the section end; the overhang is truncated, matching the usual
    convention that a section cuts off whatever it contains.
    """
    lo, hi = window
    out = []
    for e in events:
        if e.start >= hi or e.start < lo:
            continue
        if e.end > hi:
            e = replace(e, duration=hi - e.start)
        out.append(e)
    return out


def _apply_transforms(
    group: EventGroup, section: SectionConfig, tuning
) -> EventGroup:
    for step in section.transforms:
        op = step["op"]
        if op == "transpose":
            group = transpose(group, step["interval"], tuning)
        elif op == "invert":
            group = invert(group, step["axis"], tuning)
        elif op == "retrograde":
            group = retrograde(group)
        elif op == "augment":
            group = augment(group, step["factor"], step["mode"], tuning)
        elif op == "chord-invert":
            group = apply_chord_inversion(group, step["k"], tuning)
        elif op == "canon":
            voices = canon(
                group, step["voices"], step["delay"], step["interval"], tuning
            )
            merged = list(voices[0].events)
            for v, voice in enumerate(voices[1:], start=1):
                merged.extend(
                    replace(e, name=f"{e.name}~{v}") for e in voice.events
                )
            lo = min(g.span[0] for g in voices)
            hi = max(g.span[1] for g in voices)
            group = EventGroup(
                events=tuple(merged),
                span=(lo, hi),
                pitch_property=group.pitch_property,
            )
    return group


def _compose_section(
    config: PieceConfig,
    section: SectionConfig,
    assignment: Assignment,
    rng: RandomSource,
) -> CompoundEvent:
    window = (assignment.start, assignment.end)
    events: list[AtomicEvent] = []
    pitch_name = "Pitch"
    tuning = None
    for spec in section.generators:
        instrument = config.instruments[spec.instrument]
        events.extend(generate_events(spec.generator, instrument, window, rng))
        pitch_name = _pitch_property_name(instrument)
        desc = instrument.descriptors.get(pitch_name)
        if desc is not None and desc.tuning is not None:
            tuning = config.tunings[desc.tuning]
    if section.transforms:
        group = EventGroup(
            events=tuple(events), span=window, pitch_property=pitch_name
        )
        group = _apply_transforms(group, section, tuning)
        events = list(group.events)
    children = sorted(
        _clip_to_window(events, window), key=lambda e: (e.start, e.name)
    )
    return CompoundEvent(
        name=section.id,
        start=assignment.start,
        duration=assignment.duration,
        children=tuple(children),
    )


def compose_variant(config: PieceConfig, index: int, seed: int) -> VariantResult:
    """Compose one variant with an independent random source."""
    rng = RandomSource(seed)
    assignments = schedule(
        config.section_specs(),
        config.grid,
        config.affinity_matrix(),
        config.durations,
        rng,
        order=config.order,
        policy=config.policy,
    )
    by_id = {s.id: s for s in config.sections}
    section_events = [
        _compose_section(config, by_id[a.section_id], a, rng) for a in assignments
    ]
    root = CompoundEvent(
        name=config.name,
        start=0.0,
        duration=config.end,
        children=tuple(sorted(section_events, key=lambda e: (e.start, e.name))),
    )
    piece = Piece(root=root)
    scores = {
        "sco": render_synthesis_score(piece, config.instruments, config.tunings),
        "txt": render_notation_text(piece, config.instruments, config.tunings),
    }
    return VariantResult(
        index=index,
        seed=seed,
        piece=piece,
        assignments=tuple(assignments),
        scores=scores,
    )


def compose_variants(
    config: PieceConfig, seed: int | None = None, variants: int | None = None
) -> list[VariantResult]:
    """Compose all requested variants; variant v uses seed base + v."""
    base = config.seed if seed is None else seed
    n = config.variants if variants is None else variants
    return [compose_variant(config, v, base + v) for v in range(n)]


def summary_text(results) -> str:
    """Per-variant assignment listing, one deterministic block per variant."""
    lines = []
    for r in results:
        lines.append(f"variant {r.index} seed {r.seed}")
        for a in r.assignments:
            lines.append(
                f"  {a.section_id} start {a.start:.6f} duration {a.duration:.6f}"
            )
    return "\n".join(lines) + "\n"


def run_compose(
    config: PieceConfig,
    out_dir: str,
    seed: int | None = None,
    variants: int | None = None,
    formats=("sco", "txt"),
) -> list[str]:
    """Compose and write every variant's files plus a summary.

    Returns the written paths.  Files are named ``<piece>-v<k>.<fmt>``;
    the ``png`` format renders a timeline figure of the variant.
    """
    for fmt in formats:
        if fmt not in FORMATS:
            raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    results = compose_variants(config, seed=seed, variants=variants)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for r in results:
        stem = os.path.join(out_dir, f"{config.name}-v{r.index}")
        for fmt in formats:
            path = f"{stem}.{fmt}"
            if fmt == "png":
                from .report import render_timeline_png

                render_timeline_png(r, config, path)
            else:
                with open(path, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(r.scores[fmt])
            written.append(path)
    summary_path = os.path.join(out_dir, "summary.txt")
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(summary_text(results))
    written.append(summary_path)
    return written
