"""Exception taxonomy shared across the engine."""


class ManifoldError(Exception):
    """Base class for all engine errors."""


# --- event tree ---

class ContainmentViolation(ManifoldError):
    """A child event does not fit inside its parent's time interval."""


# --- property system ---

class ValidationFailed(ManifoldError):
    """A property value was rejected by its descriptor."""


class TypeMismatch(ValidationFailed):
    """Value variant not accepted by the descriptor."""


class RangeViolation(ValidationFailed):
    """Numeric value outside the descriptor's [min, max] range."""


class IndexOutOfRange(ManifoldError):
    """Index beyond the bounds of a tuning table, list, or matrix."""


class NoteParseError(ManifoldError):
    """Malformed note name (expected letter A-G, optional # or b, octave)."""


class PitchUnresolvable(ManifoldError):
    """A pitch value could not be resolved to a frequency or semitone."""


# --- generators ---

class EmptyList(ManifoldError):
    """Selection from an empty value list."""


class PropertyUnknown(ManifoldError):
    """A generator binding names a property the instrument does not declare."""


class EmptyChord(ManifoldError):
    """Chord operation on an empty pitch set."""


# --- scheduling matrices ---

class DegenerateMatrix(ManifoldError):
    """All cell masses are zero; nothing can be sampled."""


class NoFeasibleDuration(ManifoldError):
    """Every duration candidate is masked out for the chosen start mark."""


class SchedulingInfeasible(ManifoldError):
    """A section's row has no remaining probability mass at its turn."""


# --- configuration ---

class ConfigError(ManifoldError):
    """Base class for piece-configuration errors."""


class ConfigParseError(ConfigError):
    """Configuration file is missing or not valid JSON."""


class SchemaError(ConfigError):
    """A configuration field violates the documented schema."""


class UnknownReference(ConfigError):
    """A configuration field names an instrument, section, property, or
    tuning table that is not defined elsewhere in the config."""
