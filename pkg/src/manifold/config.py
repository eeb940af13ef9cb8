"""Piece configuration: JSON loading, validation, cross-reference checks.

A piece config names the piece, lays out the time grid, declares
instruments with typed properties, and describes each section: weight,
start-mark affinities, event generators, and transform steps.  Every
validation failure carries the offending field path; unknown names
(instruments, tunings, properties) raise reference errors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import ConfigParseError, SchemaError, UnknownReference
from .generators import (
    DiscreteWeights,
    Distribution,
    Envelope,
    EventGenerator,
    Exponential,
    MarkovBinding,
    MarkovChain,
    Uniform,
    ValueList,
)
from .matrix import (
    AdjustmentPolicy,
    AffinityMatrix,
    DurationModel,
    SectionSpec,
    TimeGrid,
)
from .properties import (
    PROPERTY_KINDS,
    Index,
    Instrument,
    Number,
    PropertyDescriptor,
    Text,
    TuningTable,
)

_VARIANT_NAMES = {"number": Number, "index": Index, "text": Text}

TRANSFORM_OPS = (
    "transpose",
    "invert",
    "retrograde",
    "augment",
    "chord-invert",
    "canon",
)


@dataclass(frozen=True)
class GeneratorSpec:
    """One event generator attached to an instrument."""

    instrument: str
    generator: EventGenerator


@dataclass(frozen=True)
class SectionConfig:
    id: str
    weight: float
    affinity: tuple[float, ...]
    generators: tuple[GeneratorSpec, ...]
    transforms: tuple[dict, ...]


@dataclass(frozen=True)
class PieceConfig:
    name: str
    end: float
    seed: int
    variants: int
    tunings: dict
    instruments: dict
    grid: TimeGrid
    sections: tuple[SectionConfig, ...]
    durations: DurationModel
    policy: AdjustmentPolicy
    order: tuple[str, ...]

    def section_specs(self) -> tuple[SectionSpec, ...]:
        return tuple(SectionSpec(id=s.id, weight=s.weight) for s in self.sections)

    def affinity_matrix(self) -> AffinityMatrix:
        return AffinityMatrix(p=tuple(s.affinity for s in self.sections))


def _fail(path: str, message: str):
    raise SchemaError(f"{path}: {message}")


def _check_keys(obj: dict, allowed, path: str):
    for key in obj:
        if key not in allowed:
            _fail(path, f"unknown field {key!r}")


def _as_dict(x, path: str) -> dict:
    if not isinstance(x, dict):
        _fail(path, f"expected an object, got {type(x).__name__}")
    return x


def _as_list(x, path: str) -> list:
    if not isinstance(x, list):
        _fail(path, f"expected a list, got {type(x).__name__}")
    return x


def _as_str(x, path: str) -> str:
    if not isinstance(x, str) or not x:
        _fail(path, "expected a non-empty string")
    return x


def _as_number(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        _fail(path, f"expected a number, got {type(x).__name__}")
    if not math.isfinite(x):
        _fail(path, "number must be finite")
    return float(x)


def _as_int(x, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        _fail(path, f"expected an integer, got {type(x).__name__}")
    return x


def _number_list(x, path: str) -> list[float]:
    return [_as_number(v, f"{path}[{i}]") for i, v in enumerate(_as_list(x, path))]


def _value_from_json(x, path: str):
    """number -> Number, string -> Text, {"index": n} -> Index."""
    if isinstance(x, bool):
        _fail(path, "booleans are not property values")
    if isinstance(x, (int, float)):
        return Number(_as_number(x, path))
    if isinstance(x, str):
        return Text(x)
    if isinstance(x, dict) and set(x) == {"index"}:
        i = _as_int(x["index"], f"{path}.index")
        if i < 0:
            _fail(f"{path}.index", "must be >= 0")
        return Index(i)
    _fail(path, "expected a number, a string, or {\"index\": n}")


def _distribution_from_json(obj: dict, path: str) -> Distribution:
    try:
        if "uniform" in obj:
            bounds = _number_list(obj["uniform"], f"{path}.uniform")
            if len(bounds) != 2:
                _fail(f"{path}.uniform", "expected [low, high]")
            return Uniform(bounds[0], bounds[1])
        if "weights" in obj:
            return DiscreteWeights(tuple(_number_list(obj["weights"], f"{path}.weights")))
        if "exponential" in obj:
            return Exponential(_as_number(obj["exponential"], f"{path}.exponential"))
    except ValueError as exc:
        _fail(path, str(exc))
    _fail(path, "expected one of: uniform, weights, exponential")


_BINDING_KEYS = ("uniform", "weights", "exponential", "envelope", "choice",
                 "script", "markov", "fixed")


def _binding_from_json(obj, path: str):
    obj = _as_dict(obj, path)
    _check_keys(obj, _BINDING_KEYS, path)
    if any(k in obj for k in ("uniform", "weights", "exponential")):
        return _distribution_from_json(obj, path)
    if "envelope" in obj:
        points = []
        for i, pair in enumerate(_as_list(obj["envelope"], f"{path}.envelope")):
            pt = _number_list(pair, f"{path}.envelope[{i}]")
            if len(pt) != 2:
                _fail(f"{path}.envelope[{i}]", "expected [time, value]")
            points.append((pt[0], pt[1]))
        try:
            return Envelope(tuple(points))
        except ValueError as exc:
            _fail(f"{path}.envelope", str(exc))
    if "choice" in obj:
        values = [
            _value_from_json(v, f"{path}.choice[{i}]")
            for i, v in enumerate(_as_list(obj["choice"], f"{path}.choice"))
        ]
        indices = None
        if "script" in obj:
            indices = tuple(
                _as_int(v, f"{path}.script[{i}]")
                for i, v in enumerate(_as_list(obj["script"], f"{path}.script"))
            )
        try:
            return ValueList(values=tuple(values), indices=indices)
        except Exception as exc:
            _fail(path, str(exc))
    if "markov" in obj:
        spec = _as_dict(obj["markov"], f"{path}.markov")
        _check_keys(spec, ("states", "transition", "start"), f"{path}.markov")
        if "states" not in spec or "transition" not in spec:
            _fail(f"{path}.markov", "requires states and transition")
        states = tuple(
            _value_from_json(v, f"{path}.markov.states[{i}]")
            for i, v in enumerate(_as_list(spec["states"], f"{path}.markov.states"))
        )
        rows = tuple(
            tuple(_number_list(row, f"{path}.markov.transition[{i}]"))
            for i, row in enumerate(
                _as_list(spec["transition"], f"{path}.markov.transition")
            )
        )
        start = _as_int(spec.get("start", 0), f"{path}.markov.start")
        try:
            return MarkovBinding(chain=MarkovChain(states, rows), start=start)
        except Exception as exc:
            _fail(f"{path}.markov", str(exc))
    if "fixed" in obj:
        return _value_from_json(obj["fixed"], f"{path}.fixed")
    _fail(path, "unrecognized binding; see docs/config-schema.md")


def _descriptor_from_json(name: str, obj, tunings: dict, path: str) -> PropertyDescriptor:
    obj = _as_dict(obj, path)
    _check_keys(obj, ("kind", "accepts", "range", "tuning"), path)
    if "kind" not in obj:
        _fail(path, "required field kind missing")
    kind = _as_str(obj["kind"], f"{path}.kind")
    if kind not in PROPERTY_KINDS:
        _fail(f"{path}.kind", f"must be one of {sorted(PROPERTY_KINDS)}")
    accepted = set()
    for i, label in enumerate(_as_list(obj.get("accepts", ["number"]), f"{path}.accepts")):
        label = _as_str(label, f"{path}.accepts[{i}]")
        if label not in _VARIANT_NAMES:
            _fail(f"{path}.accepts[{i}]", f"must be one of {sorted(_VARIANT_NAMES)}")
        accepted.add(_VARIANT_NAMES[label])
    value_range = None
    if "range" in obj:
        bounds = _number_list(obj["range"], f"{path}.range")
        if len(bounds) != 2 or bounds[0] > bounds[1]:
            _fail(f"{path}.range", "expected [low, high] with low <= high")
        value_range = (bounds[0], bounds[1])
    tuning = None
    if obj.get("tuning") is not None:
        tuning = _as_str(obj["tuning"], f"{path}.tuning")
        if tuning not in tunings:
            raise UnknownReference(f"{path}.tuning: unknown tuning table {tuning!r}")
    try:
        return PropertyDescriptor(
            name=name,
            kind=kind,
            accepted=frozenset(accepted),
            value_range=value_range,
            tuning=tuning,
        )
    except ValueError as exc:
        _fail(path, str(exc))


def _instrument_from_json(name: str, obj, tunings: dict, path: str) -> Instrument:
    obj = _as_dict(obj, path)
    _check_keys(obj, ("properties",), path)
    descriptors = {}
    for prop_name, spec in _as_dict(obj.get("properties", {}), f"{path}.properties").items():
        descriptors[prop_name] = _descriptor_from_json(
            prop_name, spec, tunings, f"{path}.properties.{prop_name}"
        )
    # Every instrument can place events in time, declared or not.
    for implicit in ("Start Time", "Duration"):
        descriptors.setdefault(
            implicit, PropertyDescriptor(name=implicit, kind="time")
        )
    return Instrument(name=name, descriptors=descriptors)


def _transform_from_json(obj, path: str) -> dict:
    obj = _as_dict(obj, path)
    if "op" not in obj:
        _fail(path, "required field op missing")
    op = _as_str(obj["op"], f"{path}.op")
    if op not in TRANSFORM_OPS:
        _fail(f"{path}.op", f"must be one of {list(TRANSFORM_OPS)}")
    step = {"op": op}
    if op == "transpose":
        _check_keys(obj, ("op", "interval"), path)
        if "interval" not in obj:
            _fail(path, "transpose requires interval")
        step["interval"] = _as_number(obj["interval"], f"{path}.interval")
    elif op == "invert":
        _check_keys(obj, ("op", "axis"), path)
        if "axis" not in obj:
            _fail(path, "invert requires axis")
        step["axis"] = _as_number(obj["axis"], f"{path}.axis")
    elif op == "retrograde":
        _check_keys(obj, ("op",), path)
    elif op == "augment":
        _check_keys(obj, ("op", "factor", "mode"), path)
        if "factor" not in obj:
            _fail(path, "augment requires factor")
        factor = _as_number(obj["factor"], f"{path}.factor")
        if factor <= 0:
            _fail(f"{path}.factor", "must be > 0")
        mode = obj.get("mode", "durations")
        if mode not in ("durations", "pitch-intervals"):
            _fail(f"{path}.mode", "must be durations or pitch-intervals")
        step["factor"] = factor
        step["mode"] = mode
    elif op == "chord-invert":
        _check_keys(obj, ("op", "k"), path)
        if "k" not in obj:
            _fail(path, "chord-invert requires k")
        k = _as_int(obj["k"], f"{path}.k")
        if k < 0:
            _fail(f"{path}.k", "must be >= 0")
        step["k"] = k
    elif op == "canon":
        _check_keys(obj, ("op", "voices", "delay", "interval"), path)
        if "voices" not in obj:
            _fail(path, "canon requires voices")
        voices = _as_int(obj["voices"], f"{path}.voices")
        if voices < 1:
            _fail(f"{path}.voices", "must be >= 1")
        delay = _as_number(obj.get("delay", 0.0), f"{path}.delay")
        if delay < 0:
            _fail(f"{path}.delay", "must be >= 0")
        step["voices"] = voices
        step["delay"] = delay
        step["interval"] = _as_number(obj.get("interval", 0.0), f"{path}.interval")
    return step


def _generator_from_json(obj, instruments: dict, path: str) -> GeneratorSpec:
    obj = _as_dict(obj, path)
    _check_keys(obj, ("instrument", "label", "count", "bindings"), path)
    if "instrument" not in obj:
        _fail(path, "required field instrument missing")
    instrument = _as_str(obj["instrument"], f"{path}.instrument")
    if instrument not in instruments:
        raise UnknownReference(f"{path}.instrument: unknown instrument {instrument!r}")
    if "count" not in obj:
        _fail(path, "required field count missing")
    count = _distribution_from_json(
        _as_dict(obj["count"], f"{path}.count"), f"{path}.count"
    )
    label = _as_str(obj.get("label", "note"), f"{path}.label")
    bindings = {}
    for prop_name, spec in _as_dict(obj.get("bindings", {}), f"{path}.bindings").items():
        if prop_name not in instruments[instrument].descriptors:
            raise UnknownReference(
                f"{path}.bindings.{prop_name}: instrument {instrument!r} "
                f"has no such property"
            )
        bindings[prop_name] = _binding_from_json(spec, f"{path}.bindings.{prop_name}")
    return GeneratorSpec(
        instrument=instrument,
        generator=EventGenerator(count=count, bindings=bindings, label=label),
    )


_TOP_KEYS = ("piece", "seed", "variants", "tunings", "instruments", "grid",
             "sections", "durations", "policy", "order")


def parse_config(data) -> PieceConfig:
    """Validate an already-parsed JSON object into a PieceConfig."""
    data = _as_dict(data, "config")
    _check_keys(data, _TOP_KEYS, "config")

    if "piece" not in data:
        _fail("piece", "required field missing")
    piece = _as_dict(data["piece"], "piece")
    _check_keys(piece, ("name", "end"), "piece")
    if "name" not in piece:
        _fail("piece.name", "required field missing")
    name = _as_str(piece["name"], "piece.name")
    if "end" not in piece:
        _fail("piece.end", "required field missing")
    end = _as_number(piece["end"], "piece.end")

    seed = _as_int(data.get("seed", 0), "seed")
    variants = _as_int(data.get("variants", 1), "variants")
    if variants < 1:
        _fail("variants", "must be >= 1")

    tunings = {}
    for tname, freqs in _as_dict(data.get("tunings", {}), "tunings").items():
        try:
            tunings[tname] = TuningTable(
                name=tname, frequencies=tuple(_number_list(freqs, f"tunings.{tname}"))
            )
        except ValueError as exc:
            _fail(f"tunings.{tname}", str(exc))

    if "instruments" not in data:
        _fail("instruments", "required field missing")
    instruments = {}
    for iname, spec in _as_dict(data["instruments"], "instruments").items():
        instruments[iname] = _instrument_from_json(
            iname, spec, tunings, f"instruments.{iname}"
        )
    if not instruments:
        _fail("instruments", "at least one instrument is required")

    if "grid" not in data:
        _fail("grid", "required field missing")
    grid_spec = _as_dict(data["grid"], "grid")
    _check_keys(grid_spec, ("marks", "weights"), "grid")
    if "marks" not in grid_spec or "weights" not in grid_spec:
        _fail("grid", "requires marks and weights")
    marks = _number_list(grid_spec["marks"], "grid.marks")
    weights = _number_list(grid_spec["weights"], "grid.weights")
    try:
        grid = TimeGrid(marks=tuple(marks), mark_weights=tuple(weights))
    except ValueError as exc:
        _fail("grid", str(exc))
    if grid.marks[0] < 0:
        _fail("grid.marks", "marks must be >= 0 (piece time starts at 0)")
    if abs(grid.end - end) > 1e-9:
        _fail("piece.end", f"must equal the last grid mark {grid.end}")

    if "sections" not in data:
        _fail("sections", "required field missing")
    sections = []
    seen = set()
    for i, spec in enumerate(_as_list(data["sections"], "sections")):
        spath = f"sections[{i}]"
        spec = _as_dict(spec, spath)
        _check_keys(spec, ("id", "weight", "affinity", "events", "transforms"), spath)
        if "id" not in spec:
            _fail(f"{spath}.id", "required field missing")
        sid = _as_str(spec["id"], f"{spath}.id")
        if sid in seen:
            _fail(f"{spath}.id", f"duplicate section id {sid!r}")
        seen.add(sid)
        weight = _as_number(spec.get("weight", 1.0), f"{spath}.weight")
        if weight <= 0:
            _fail(f"{spath}.weight", "must be > 0")
        if "affinity" not in spec:
            _fail(f"{spath}.affinity", "required field missing")
        affinity = _number_list(spec["affinity"], f"{spath}.affinity")
        if len(affinity) != grid.n:
            _fail(
                f"{spath}.affinity",
                f"expected {grid.n} entries (one per start mark), got {len(affinity)}",
            )
        for j, x in enumerate(affinity):
            if not 0.0 <= x <= 1.0:
                _fail(f"{spath}.affinity[{j}]", "entries must lie in [0, 1]")
        generators = tuple(
            _generator_from_json(g, instruments, f"{spath}.events[{k}]")
            for k, g in enumerate(_as_list(spec.get("events", []), f"{spath}.events"))
        )
        transforms = tuple(
            _transform_from_json(t, f"{spath}.transforms[{k}]")
            for k, t in enumerate(
                _as_list(spec.get("transforms", []), f"{spath}.transforms")
            )
        )
        sections.append(
            SectionConfig(
                id=sid,
                weight=weight,
                affinity=tuple(affinity),
                generators=generators,
                transforms=transforms,
            )
        )
    if not sections:
        _fail("sections", "at least one section is required")

    dur_spec = _as_dict(data.get("durations", {}), "durations")
    _check_keys(dur_spec, ("span_weights", "affinity"), "durations")
    span_weights = _number_list(
        dur_spec.get("span_weights", [1.0] * grid.n), "durations.span_weights"
    )
    if len(span_weights) != grid.n:
        _fail(
            "durations.span_weights",
            f"expected {grid.n} entries (spans of 1..{grid.n} marks), "
            f"got {len(span_weights)}",
        )
    dur_affinity = None
    if "affinity" in dur_spec:
        rows = [
            _number_list(row, f"durations.affinity[{i}]")
            for i, row in enumerate(_as_list(dur_spec["affinity"], "durations.affinity"))
        ]
        try:
            dur_affinity = AffinityMatrix(p=tuple(tuple(r) for r in rows))
        except ValueError as exc:
            _fail("durations.affinity", str(exc))
        if dur_affinity.shape != (len(sections), grid.n):
            _fail(
                "durations.affinity",
                f"expected shape {(len(sections), grid.n)}, got {dur_affinity.shape}",
            )
    try:
        durations = DurationModel(
            span_weights=tuple(span_weights), affinities=dur_affinity
        )
    except ValueError as exc:
        _fail("durations", str(exc))

    policy_spec = _as_dict(data.get("policy", {}), "policy")
    _check_keys(policy_spec, ("window", "attenuation"), "policy")
    try:
        policy = AdjustmentPolicy(
            window=_as_int(policy_spec.get("window", 1), "policy.window"),
            attenuation=_as_number(
                policy_spec.get("attenuation", 0.5), "policy.attenuation"
            ),
        )
    except ValueError as exc:
        _fail("policy", str(exc))

    ids = [s.id for s in sections]
    order = tuple(
        _as_str(x, f"order[{i}]")
        for i, x in enumerate(_as_list(data.get("order", ids), "order"))
    )
    for i, sid in enumerate(order):
        if sid not in ids:
            raise UnknownReference(f"order[{i}]: unknown section {sid!r}")
    if sorted(order) != sorted(ids):
        _fail("order", "must be a permutation of the section ids")

    return PieceConfig(
        name=name,
        end=end,
        seed=seed,
        variants=variants,
        tunings=tunings,
        instruments=instruments,
        grid=grid,
        sections=tuple(sections),
        durations=durations,
        policy=policy,
        order=order,
    )


def parse_matrix_spec(data):
    """Validate the standalone matrix input used by ``manifold matrix``.

    Expects {"sections": [{"id", "weight"}...], "grid": {"marks",
    "weights"}, "affinity": [[...]...]}; returns (sections, grid,
    affinity matrix).
    """
    data = _as_dict(data, "matrix")
    _check_keys(data, ("sections", "grid", "affinity"), "matrix")
    for key in ("sections", "grid", "affinity"):
        if key not in data:
            _fail(key, "required field missing")
    sections = []
    seen = set()
    for i, spec in enumerate(_as_list(data["sections"], "sections")):
        spath = f"sections[{i}]"
        spec = _as_dict(spec, spath)
        _check_keys(spec, ("id", "weight"), spath)
        if "id" not in spec:
            _fail(f"{spath}.id", "required field missing")
        sid = _as_str(spec["id"], f"{spath}.id")
        if sid in seen:
            _fail(f"{spath}.id", f"duplicate section id {sid!r}")
        seen.add(sid)
        try:
            sections.append(
                SectionSpec(
                    id=sid, weight=_as_number(spec.get("weight", 1.0), f"{spath}.weight")
                )
            )
        except ValueError as exc:
            _fail(spath, str(exc))
    if not sections:
        _fail("sections", "at least one section is required")
    grid_spec = _as_dict(data["grid"], "grid")
    _check_keys(grid_spec, ("marks", "weights"), "grid")
    if "marks" not in grid_spec or "weights" not in grid_spec:
        _fail("grid", "requires marks and weights")
    try:
        grid = TimeGrid(
            marks=tuple(_number_list(grid_spec["marks"], "grid.marks")),
            mark_weights=tuple(_number_list(grid_spec["weights"], "grid.weights")),
        )
    except ValueError as exc:
        _fail("grid", str(exc))
    rows = [
        _number_list(row, f"affinity[{i}]")
        for i, row in enumerate(_as_list(data["affinity"], "affinity"))
    ]
    try:
        affinity = AffinityMatrix(p=tuple(tuple(r) for r in rows))
    except ValueError as exc:
        _fail("affinity", str(exc))
    if affinity.shape != (len(sections), grid.n):
        _fail(
            "affinity",
            f"expected shape {(len(sections), grid.n)}, got {affinity.shape}",
        )
    return tuple(sections), grid, affinity


def load_config(path) -> PieceConfig:
    """Read, parse, and validate a JSON piece configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{path} is not valid JSON: {exc}") from None
    return parse_config(data)
