"""Seeded algorithmic composition: event trees, probability-matrix
scheduling, music transforms, and deterministic score rendering."""

from .errors import (
    ConfigError,
    ConfigParseError,
    ContainmentViolation,
    DegenerateMatrix,
    EmptyChord,
    EmptyList,
    IndexOutOfRange,
    ManifoldError,
    NoFeasibleDuration,
    NoteParseError,
    PitchUnresolvable,
    PropertyUnknown,
    RangeViolation,
    SchedulingInfeasible,
    SchemaError,
    TypeMismatch,
    UnknownReference,
    ValidationFailed,
)
from .events import (
    AtomicEvent,
    CompoundEvent,
    Event,
    Piece,
    add_child,
    flatten_atomics,
    iter_atomics,
    remove_child,
    total_span,
    walk,
)
from .properties import (
    Index,
    Instrument,
    Number,
    PropertyDescriptor,
    Text,
    TuningTable,
    hz_to_semitone,
    note_to_semitone,
    register_property,
    resolve_pitch,
    resolve_semitone,
    semitone_to_hz,
    semitone_to_name,
    validate_value,
)
from .generators import (
    DiscreteWeights,
    Distribution,
    Envelope,
    EventGenerator,
    Exponential,
    MarkovBinding,
    MarkovChain,
    RandomSource,
    Uniform,
    ValueList,
    count_of,
    envelope_value,
    generate_events,
    markov_step,
    sample,
    select_from_list,
    weighted_index,
)
from .matrix import (
    AdjustmentPolicy,
    AffinityMatrix,
    Assignment,
    DurationModel,
    ProbabilityMatrix,
    SectionSpec,
    TimeGrid,
    apply_adjustment,
    build_duration_matrix,
    build_matrix,
    cell_for_unit,
    choose_duration,
    choose_duration_span,
    cumulative_at,
    sample_cell,
    schedule,
)
from .transforms import (
    EventGroup,
    PitchSet,
    apply_chord_inversion,
    augment,
    canon,
    chord_invert,
    invert,
    retrograde,
    shift,
    transpose,
)
from .score import ScoreDocument, render_notation_text, render_synthesis_score
from .config import (
    GeneratorSpec,
    PieceConfig,
    SectionConfig,
    load_config,
    parse_config,
    parse_matrix_spec,
)
from .compose import (
    VariantResult,
    compose_variant,
    compose_variants,
    run_compose,
    summary_text,
)

__version__ = "0.1.0"
