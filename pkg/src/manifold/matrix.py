"""Section scheduling via probability matrices.

A piece is divided by time marks, and each named section gets a row in a
probability matrix built from three ingredients: the section's weight,
the weight of each start mark, and a per-cell affinity.  Sampling the
matrix assigns sections to start marks, a companion matrix over
mark-span counts picks durations, and after every assignment the matrix
is attenuated so later sections avoid occupied and nearby marks.
Running the scheduler repeatedly with different seeds yields the
variants of a piece.  The machinery is generic over any id list and
grid, so it also works at finer scales (sounds in a section, chords,
motives).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DegenerateMatrix,
    IndexOutOfRange,
    NoFeasibleDuration,
    SchedulingInfeasible,
)
from .generators import RandomSource, weighted_index


@dataclass(frozen=True)
class SectionSpec:
    """A named section with a relative weight."""

    id: str
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "weight", float(self.weight))
        if not (math.isfinite(self.weight) and self.weight > 0):
            raise ValueError(f"section {self.id!r}: weight must be > 0, got {self.weight}")


@dataclass(frozen=True)
class TimeGrid:
    """Time marks t_0 .. t_n (t_n is the piece end) plus start-mark weights.

    The last mark is never a start mark, so there are len(marks) - 1
    weights, one per potential section start.
    """

    marks: tuple[float, ...]
    mark_weights: tuple[float, ...]

    def __post_init__(self):
        marks = tuple(float(t) for t in self.marks)
        weights = tuple(float(q) for q in self.mark_weights)
        object.__setattr__(self, "marks", marks)
        object.__setattr__(self, "mark_weights", weights)
        if len(marks) < 2:
            raise ValueError("time grid needs at least two marks")
        if any(not math.isfinite(t) for t in marks):
            raise ValueError("time marks must be finite")
        if any(b <= a for a, b in zip(marks, marks[1:])):
            raise ValueError("time marks must be strictly ascending")
        if len(weights) != len(marks) - 1:
            raise ValueError(
                f"expected {len(marks) - 1} mark weights, got {len(weights)}"
            )
        if any(q < 0 for q in weights):
            raise ValueError("mark weights must be >= 0")
        if math.fsum(weights) <= 0:
            raise ValueError("mark weights must not all be zero")

    @property
    def n(self) -> int:
        """Number of start marks."""
        return len(self.marks) - 1

    @property
    def end(self) -> float:
        return self.marks[-1]


@dataclass(frozen=True)
class AffinityMatrix:
    """Per-cell probability p_ij that a section becomes active at a mark."""

    p: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(float(x) for x in row) for row in self.p)
        object.__setattr__(self, "p", rows)
        if not rows:
            raise ValueError("affinity matrix must have at least one row")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise ValueError("affinity matrix rows must all have the same length")
        for i, row in enumerate(rows):
            for x in row:
                if not 0.0 <= x <= 1.0:
                    raise ValueError(f"affinity row {i}: entries must lie in [0, 1]")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.p), len(self.p[0])


@dataclass(frozen=True)
class ProbabilityMatrix:
    """Normalized cell masses over (section, column) pairs.

    For start matrices the columns are start marks; for duration
    matrices they are mark-span counts (column k-1 spans k marks).
    Masses sum to 1, except that an all-zero matrix is a legal terminal
    state after adjustments.
    """

    masses: tuple[tuple[float, ...], ...]
    sections: tuple[SectionSpec, ...]
    grid: TimeGrid

    def __post_init__(self):
        rows = tuple(tuple(float(x) for x in row) for row in self.masses)
        object.__setattr__(self, "masses", rows)
        object.__setattr__(self, "sections", tuple(self.sections))
        if len(rows) != len(self.sections):
            raise ValueError("one mass row per section required")
        width = len(rows[0]) if rows else 0
        if any(len(row) != width for row in rows):
            raise ValueError("mass rows must all have the same length")
        for row in rows:
            for x in row:
                if x < 0:
                    raise ValueError("masses must be >= 0")
        total = math.fsum(x for row in rows for x in row)
        if total != 0.0 and abs(total - 1.0) > 1e-9:
            raise ValueError(f"masses must sum to 1 (or all be zero), got {total}")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.masses), len(self.masses[0]) if self.masses else 0

    def row_mass(self, i: int) -> float:
        return math.fsum(self.masses[i])

    def total_mass(self) -> float:
        return math.fsum(x for row in self.masses for x in row)


@dataclass(frozen=True)
class DurationModel:
    """Column weights for the duration matrix.

    Entry k-1 weights a duration spanning k marks; an optional affinity
    matrix modulates sections individually (all ones when omitted).
    """

    span_weights: tuple[float, ...]
    affinities: AffinityMatrix | None = None

    def __post_init__(self):
        weights = tuple(float(x) for x in self.span_weights)
        object.__setattr__(self, "span_weights", weights)
        if not weights:
            raise ValueError("span weights must be non-empty")
        if any(x < 0 for x in weights):
            raise ValueError("span weights must be >= 0")
        if math.fsum(weights) <= 0:
            raise ValueError("span weights must not all be zero")


@dataclass(frozen=True)
class Assignment:
    """One scheduled section: start mark, start time, and duration."""

    section_id: str
    mark_index: int
    start: float
    duration: float

    def __post_init__(self):
        if self.mark_index < 0:
            raise ValueError(f"mark index must be >= 0, got {self.mark_index}")
        if not self.duration > 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class AdjustmentPolicy:
    """How strongly an assignment suppresses nearby marks.

    ``window`` counts marks on each side of the occupied interval;
    their masses are multiplied by ``attenuation``.
    """

    window: int = 1
    attenuation: float = 0.5

    def __post_init__(self):
        if not (isinstance(self.window, int) and self.window >= 0):
            raise ValueError(f"window must be an integer >= 0, got {self.window}")
        if not 0.0 <= self.attenuation <= 1.0:
            raise ValueError(f"attenuation must lie in [0, 1], got {self.attenuation}")


def _build(sections, grid, cell, width) -> ProbabilityMatrix:
    terms = [
        [sections[i].weight * cell(i, j) for j in range(width)]
        for i in range(len(sections))
    ]
    z = math.fsum(x for row in terms for x in row)
    if z <= 0.0:
        raise DegenerateMatrix("total matrix weight is zero; nothing can be scheduled")
    masses = tuple(tuple(x / z for x in row) for row in terms)
    return ProbabilityMatrix(masses=masses, sections=tuple(sections), grid=grid)


def build_matrix(sections, grid: TimeGrid, affinities: AffinityMatrix) -> ProbabilityMatrix:
    """Start-time matrix: cell (i, j) = w_i * p_ij * q_j, normalized."""
    sections = tuple(sections)
    m, n = len(sections), grid.n
    ids = [s.id for s in sections]
    if len(set(ids)) != len(ids):
        raise ValueError("section ids must be unique")
    if affinities.shape != (m, n):
        raise ValueError(
            f"affinity matrix is {affinities.shape}, expected {(m, n)}"
        )
    q = grid.mark_weights
    return _build(sections, grid, lambda i, j: affinities.p[i][j] * q[j], n)


def build_duration_matrix(
    sections, grid: TimeGrid, model: DurationModel
) -> ProbabilityMatrix:
    """Duration matrix over span counts, built with the same formula."""
    sections = tuple(sections)
    m, n = len(sections), grid.n
    if len(model.span_weights) != n:
        raise ValueError(
            f"expected {n} span weights (1..{n} marks), got {len(model.span_weights)}"
        )
    if model.affinities is not None and model.affinities.shape != (m, n):
        raise ValueError(
            f"duration affinity matrix is {model.affinities.shape}, expected {(m, n)}"
        )
    v = model.span_weights
    if model.affinities is None:
        cell = lambda i, k: v[k]
    else:
        a = model.affinities.p
        cell = lambda i, k: a[i][k] * v[k]
    return _build(sections, grid, cell, n)


def cumulative_at(matrix: ProbabilityMatrix, i: int, j: int) -> float:
    """Total mass of the leading i rows and j columns (i in 1..m, j in 1..n).

    This is the double-sum face of the matrix; cumulative_at(m, n) = 1.
    """
    m, n = matrix.shape
    if not 1 <= i <= m:
        raise IndexOutOfRange(f"row count {i} outside 1..{m}")
    if not 1 <= j <= n:
        raise IndexOutOfRange(f"column count {j} outside 1..{n}")
    return math.fsum(matrix.masses[k][l] for k in range(i) for l in range(j))


def cell_for_unit(matrix: ProbabilityMatrix, u: float) -> tuple[int, int]:
    """Cell (row, column), zero-based, selected by a unit draw over
    row-major prefix sums of the masses."""
    flat = [x for row in matrix.masses for x in row]
    if math.fsum(flat) <= 0.0:
        raise DegenerateMatrix("all masses are zero; nothing left to sample")
    index = weighted_index(flat, u)
    return divmod(index, matrix.shape[1])


def sample_cell(matrix: ProbabilityMatrix, rng: RandomSource) -> tuple[int, int]:
    """Draw one (section, column) cell with probability equal to its mass."""
    return cell_for_unit(matrix, rng.next_unit())


def _first_occupied_after(mark_index: int, occupied, n: int) -> int:
    nxt = n
    for l in sorted(occupied):
        if l > mark_index:
            nxt = min(nxt, l)
            break
    return nxt


def choose_duration_span(
    dq: ProbabilityMatrix,
    section_index: int,
    mark_index: int,
    rng: RandomSource,
    occupied=frozenset(),
) -> int:
    """Number of marks the section will span, drawn from its duration row.

    Candidates are masked so the section ends at or before the first
    occupied mark after its start (or the piece end).
    """
    n = dq.grid.n
    if not 0 <= mark_index < n:
        raise IndexOutOfRange(f"start mark {mark_index} outside 0..{n - 1}")
    max_k = _first_occupied_after(mark_index, occupied, n) - mark_index
    row = dq.masses[section_index][:max_k]
    if max_k <= 0 or math.fsum(row) <= 0.0:
        raise NoFeasibleDuration(
            f"no duration fits at mark {mark_index} for section "
            f"{dq.sections[section_index].id!r}"
        )
    return weighted_index(row, rng.next_unit()) + 1


def choose_duration(
    dq: ProbabilityMatrix,
    section_index: int,
    mark_index: int,
    rng: RandomSource,
    occupied=frozenset(),
) -> float:
    """Section duration in seconds (a mark-aligned span)."""
    k = choose_duration_span(dq, section_index, mark_index, rng, occupied)
    marks = dq.grid.marks
    return marks[mark_index + k] - marks[mark_index]


def _covered_marks(grid: TimeGrid, start: float, duration: float) -> list[int]:
    # Marks inside [start, start + duration); the 1e-9 slack absorbs
    # float drift when start + duration lands on a mark.
    end = start + duration
    tol = 1e-9 * max(1.0, abs(end))
    return [
        l
        for l in range(grid.n)
        if start - tol <= grid.marks[l] < end - tol
    ]


def apply_adjustment(
    matrix: ProbabilityMatrix,
    assignment: Assignment,
    policy: AdjustmentPolicy = AdjustmentPolicy(),
) -> ProbabilityMatrix:
    """Suppress the chosen section and the occupied stretch of the grid.

    The assigned section's row is zeroed (a section starts once), every
    mark inside [start, start + duration) is zeroed for all sections,
    marks within ``policy.window`` marks of that interval are attenuated,
    and the result is renormalized unless all mass is gone.
    """
    ids = [s.id for s in matrix.sections]
    try:
        row_index = ids.index(assignment.section_id)
    except ValueError:
        raise ValueError(f"unknown section {assignment.section_id!r}") from None
    m, n = matrix.shape
    covered = _covered_marks(matrix.grid, assignment.start, assignment.duration)
    near: set[int] = set()
    if covered:
        lo, hi = covered[0], covered[-1]
        near.update(range(max(0, lo - policy.window), lo))
        near.update(range(hi + 1, min(n, hi + 1 + policy.window)))
    covered_set = set(covered)

    rows = [list(row) for row in matrix.masses]
    for j in range(n):
        rows[row_index][j] = 0.0
    for i in range(m):
        for j in covered_set:
            rows[i][j] = 0.0
        for j in near:
            rows[i][j] *= policy.attenuation
    total = math.fsum(x for row in rows for x in row)
    if total > 0.0:
        rows = [[x / total for x in row] for row in rows]
    return ProbabilityMatrix(
        masses=tuple(tuple(row) for row in rows),
        sections=matrix.sections,
        grid=matrix.grid,
    )


def schedule(
    sections,
    grid: TimeGrid,
    affinities: AffinityMatrix,
    durations: DurationModel,
    rng: RandomSource,
    order=None,
    policy: AdjustmentPolicy = AdjustmentPolicy(),
) -> list[Assignment]:
    """Assign every section a start mark and duration, in the given order.

    Each section's turn restricts the matrix to its row, samples a start
    mark, chooses a feasible duration, and adjusts the matrix before the
    next turn.  Assigned intervals never overlap.  The order defaults to
    the section list order; any permutation of section ids is accepted.
    """
    sections = tuple(sections)
    ids = [s.id for s in sections]
    if order is None:
        order = list(ids)
    if sorted(order) != sorted(ids):
        raise ValueError("order must be a permutation of the section ids")

    start_matrix = build_matrix(sections, grid, affinities)
    duration_matrix = build_duration_matrix(sections, grid, durations)
    index_of = {sid: i for i, sid in enumerate(ids)}
    occupied: set[int] = set()
    assignments: list[Assignment] = []
    for sid in order:
        i = index_of[sid]
        row = start_matrix.masses[i]
        if math.fsum(row) <= 0.0:
            raise SchedulingInfeasible(f"no start mark available for section {sid!r}")
        j = weighted_index(row, rng.next_unit())
        try:
            k = choose_duration_span(
                duration_matrix, i, j, rng, occupied=frozenset(occupied)
            )
        except NoFeasibleDuration as exc:
            raise SchedulingInfeasible(str(exc)) from exc
        start = grid.marks[j]
        duration = grid.marks[j + k] - grid.marks[j]
        assignment = Assignment(
            section_id=sid, mark_index=j, start=start, duration=duration
        )
        start_matrix = apply_adjustment(start_matrix, assignment, policy)
        occupied.update(range(j, j + k))
        assignments.append(assignment)
    return assignments
