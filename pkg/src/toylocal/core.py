"""State model, measurements and manipulations of the toy local theory.

Particles carry a hidden value in {0, 1, 2, 3}. A measurement is a labelled
partition of all ``4**N`` joint values into outcome sets; measuring reports
the set the hidden state lies in and then resamples the state uniformly from
that set. Every outcome set must satisfy the column rule: in each column at
least two values occur and each occurring value fills at least a quarter of
the rows.

Anything that returns a :class:`SystemState` is god-view: agents only ever
see outcome labels and :class:`Mixture` objects (see :class:`OnticRegister`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from toylocal import kernels
from toylocal.rng import Stream

VALUES = (0, 1, 2, 3)
N_MAX = 8


class TheoryError(ValueError):
    pass


class InvalidOutcomeSet(TheoryError):
    def __init__(self, report: "ValidityReport") -> None:
        super().__init__(report.describe())
        self.report = report


class InvalidMeasurement(TheoryError):
    def __init__(self, report: "ValidityReport") -> None:
        super().__init__(report.describe())
        self.report = report


class StateSpaceTooLarge(TheoryError):
    pass


class ImpossibleOutcome(TheoryError):
    pass


def _check_value(v) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or not 0 <= v <= 3:
        raise ValueError(f"particle value must be one of 0, 1, 2, 3; got {v!r}")
    return int(v)


@dataclass(frozen=True)
class ParticleState:
    value: int

    def __post_init__(self) -> None:
        _check_value(self.value)


class SystemState(tuple):
    """Joint hidden value ``(x_1, ..., x_N)`` of N particles."""

    __slots__ = ()

    def __new__(cls, values: Iterable[int]) -> "SystemState":
        vals = tuple(_check_value(v) for v in values)
        if not 1 <= len(vals) <= N_MAX:
            raise ValueError(f"a system has between 1 and {N_MAX} particles; got {len(vals)}")
        return super().__new__(cls, vals)

    @classmethod
    def of(cls, *values: int) -> "SystemState":
        return cls(values)

    @classmethod
    def from_code(cls, code: int, num_particles: int) -> "SystemState":
        digits = []
        for _ in range(num_particles):
            code, d = divmod(code, 4)
            digits.append(d)
        return cls(reversed(digits))

    def __repr__(self) -> str:
        return f"SystemState{tuple(self)!r}"

    @property
    def num_particles(self) -> int:
        return len(self)

    @property
    def particles(self) -> tuple[ParticleState, ...]:
        return tuple(ParticleState(v) for v in self)

    @property
    def code(self) -> int:
        c = 0
        for v in self:
            c = c * 4 + v
        return c


def all_states(num_particles: int) -> list[SystemState]:
    return [SystemState.from_code(c, num_particles) for c in range(4**num_particles)]


# -- validation ---------------------------------------------------------------

_POSTULATE = {
    "duplicate_row": "2",
    "empty_outcome": "2",
    "overlap": "2",
    "not_exhaustive": "2",
    "single_valued_column": "5(i)",
    "below_quarter": "5(ii)",
}


@dataclass(frozen=True)
class ValidityReport:
    """Pass/fail plus the first violated constraint.

    ``column`` is 1-based; ``outcome`` is the outcome label the violation was
    found in (``None`` for single outcome sets).
    """

    ok: bool
    violation: str | None = None
    outcome: int | None = None
    column: int | None = None
    row: tuple[int, ...] | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    @property
    def postulate(self) -> str | None:
        return _POSTULATE.get(self.violation) if self.violation else None

    def describe(self) -> str:
        if self.ok:
            return "valid"
        where = []
        if self.outcome is not None:
            where.append(f"outcome {self.outcome}")
        if self.column is not None:
            where.append(f"column {self.column}")
        loc = f" ({', '.join(where)})" if where else ""
        return f"invalid: {self.violation}{loc} violates Postulate {self.postulate}: {self.detail}"


def _as_rows(rows: Sequence[Sequence[int]]) -> list[SystemState]:
    return [r if isinstance(r, SystemState) else SystemState(r) for r in rows]


def validate_outcome_set(rows: Sequence[Sequence[int]], *, outcome: int | None = None) -> ValidityReport:
    """Check one outcome set against the set and column rules."""
    rows = _as_rows(rows)
    if not rows:
        raise ValueError("empty outcome set")
    n = rows[0].num_particles
    if any(r.num_particles != n for r in rows):
        raise ValueError("all rows of an outcome set must have the same particle count")
    status, idx = kernels.column_check(np.asarray(rows, dtype=np.int64))
    if status == kernels.COLUMN_OK:
        return ValidityReport(True)
    if status == kernels.DUPLICATE_ROW:
        row = tuple(rows[idx])
        return ValidityReport(False, "duplicate_row", outcome, None, row, f"row {row} appears more than once")
    col = idx + 1
    column = [r[idx] for r in rows]
    if status == kernels.SINGLE_VALUED:
        return ValidityReport(
            False, "single_valued_column", outcome, col, None,
            f"column {col} holds a single value {column[0]}; needs at least two distinct values",
        )
    L = len(rows)
    low = min((v for v in set(column)), key=lambda v: (column.count(v), v))
    return ValidityReport(
        False, "below_quarter", outcome, col, None,
        f"value {low} fills {column.count(low)}/{L} of column {col}, under a quarter",
    )


@dataclass(frozen=True)
class OutcomeSet:
    """A validated outcome set ``A_r``: distinct rows passing the column rule."""

    rows: tuple[SystemState, ...]
    label: int = 0

    def __post_init__(self) -> None:
        rows = tuple(_as_rows(self.rows))
        object.__setattr__(self, "rows", rows)
        report = validate_outcome_set(rows, outcome=self.label)
        if not report:
            raise InvalidOutcomeSet(report)

    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def num_particles(self) -> int:
        return self.rows[0].num_particles

    def column(self, n: int) -> tuple[int, ...]:
        """Entries of particle ``n`` (1-based)."""
        return tuple(r[n - 1] for r in self.rows)

    def __contains__(self, state) -> bool:
        return tuple(state) in set(map(tuple, self.rows))


class Measurement:
    """Outcome sets indexed ``0 .. R-1``.

    Construction only checks shape (every row has ``num_particles`` values).
    Postulate checks live in :func:`validate_measurement`; the dynamics
    functions refuse measurements that fail it.
    """

    def __init__(
        self,
        outcomes: Sequence[Sequence[Sequence[int]]],
        num_particles: int | None = None,
        name: str | None = None,
    ) -> None:
        sets = tuple(tuple(_as_rows(rows)) for rows in outcomes)
        if num_particles is None:
            first = next((rows[0] for rows in sets if rows), None)
            if first is None:
                raise ValueError("cannot infer num_particles from empty outcomes")
            num_particles = first.num_particles
        for rows in sets:
            for row in rows:
                if row.num_particles != num_particles:
                    raise ValueError(f"row {tuple(row)} does not have {num_particles} particles")
        self.outcomes: tuple[tuple[SystemState, ...], ...] = sets
        self.num_particles = num_particles
        self.name = name
        self._report: ValidityReport | None = None
        self._table: np.ndarray | None = None

    @property
    def R(self) -> int:
        return len(self.outcomes)

    def __len__(self) -> int:
        return len(self.outcomes)

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        body = " | ".join(",".join("".join(map(str, r)) for r in rows) for rows in self.outcomes)
        return f"<Measurement{label} N={self.num_particles} {{{body}}}>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Measurement):
            return NotImplemented
        return self.num_particles == other.num_particles and self.outcomes == other.outcomes

    def __hash__(self) -> int:
        return hash((self.num_particles, self.outcomes))

    def outcome_set(self, r: int) -> OutcomeSet:
        return OutcomeSet(self.outcomes[r], label=r)

    def canonical(self) -> "Measurement":
        """Same partition with sorted rows and outcomes ordered by least state."""
        blocks = sorted(tuple(sorted(rows)) for rows in self.outcomes)
        return Measurement(blocks, self.num_particles, self.name)

    def same_partition(self, other: "Measurement") -> bool:
        return self.canonical() == other.canonical()

    def partition_key(self) -> tuple:
        return (self.num_particles, self.canonical().outcomes)

    def relabel(self, order: Sequence[int]) -> "Measurement":
        """New measurement whose outcome ``i`` is this one's outcome ``order[i]``."""
        return Measurement([self.outcomes[i] for i in order], self.num_particles, self.name)

    def lookup_table(self) -> np.ndarray:
        """Outcome label for every state code (valid measurements only)."""
        require_valid(self)
        return self._table  # type: ignore[return-value]


def validate_measurement(m: Measurement) -> ValidityReport:
    """Disjointness, exhaustiveness and the per-set rules, checked explicitly."""
    if m.num_particles > N_MAX:
        raise StateSpaceTooLarge("state space too large for explicit validation")
    if m._report is not None:
        return m._report
    report = _validate(m)
    m._report = report
    return report


def _validate(m: Measurement) -> ValidityReport:
    n_states = 4**m.num_particles
    if not m.outcomes:
        return ValidityReport(False, "not_exhaustive", None, None, None, "measurement has no outcomes")
    for r, rows in enumerate(m.outcomes):
        if not rows:
            return ValidityReport(False, "empty_outcome", r, None, None, f"outcome {r} has no states")
        rep = validate_outcome_set(rows, outcome=r)
        if not rep:
            return rep
    codes = np.concatenate([kernels.encode_rows(np.asarray(rows, dtype=np.int64)) for rows in m.outcomes])
    labels = np.concatenate([np.full(len(rows), r, dtype=np.int64) for r, rows in enumerate(m.outcomes)])
    table, status, code, first, second = kernels.outcome_table(codes, labels, n_states)
    if status == kernels.TABLE_OVERLAP:
        state = tuple(SystemState.from_code(int(code), m.num_particles))
        return ValidityReport(
            False, "overlap", int(second), None, state,
            f"state {state} is in both outcome {int(first)} and outcome {int(second)}",
        )
    if status == kernels.TABLE_MISSING:
        state = tuple(SystemState.from_code(int(code), m.num_particles))
        return ValidityReport(False, "not_exhaustive", None, None, state, f"state {state} is in no outcome set")
    m._table = table
    return ValidityReport(True)


def require_valid(m: Measurement) -> Measurement:
    report = validate_measurement(m)
    if not report:
        raise InvalidMeasurement(report)
    return m


def _check_state(m: Measurement, x: Sequence[int]) -> SystemState:
    x = x if isinstance(x, SystemState) else SystemState(x)
    if x.num_particles != m.num_particles:
        raise ValueError(f"state has {x.num_particles} particles, measurement acts on {m.num_particles}")
    return x


# -- dynamics -----------------------------------------------------------------

def find_outcome(m: Measurement, x: Sequence[int]) -> int:
    """The unique ``r`` with ``x`` in ``A_r``."""
    require_valid(m)
    x = _check_state(m, x)
    return int(m._table[x.code])  # type: ignore[index]


def measure(m: Measurement, x: Sequence[int], rng: Stream) -> tuple[int, SystemState]:
    """Outcome of measuring ``x`` and the resampled post-measurement state."""
    r = find_outcome(m, x)
    rows = m.outcomes[r]
    return r, rows[rng.randbelow(len(rows))]


@dataclass(frozen=True)
class Bijection:
    """A one-to-one relabelling of a single particle's value."""

    table: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        table = tuple(_check_value(v) for v in self.table)
        if len(table) != 4 or len(set(table)) != 4:
            raise ValueError(f"not a permutation of 0..3: {self.table!r}")
        object.__setattr__(self, "table", table)

    def __call__(self, x: int) -> int:
        return self.table[x]

    def __matmul__(self, other: "Bijection") -> "Bijection":
        """``(u @ v)(x) == u(v(x))``."""
        return Bijection(tuple(self.table[other.table[x]] for x in VALUES))

    def inverse(self) -> "Bijection":
        inv = [0] * 4
        for x, y in enumerate(self.table):
            inv[y] = x
        return Bijection(tuple(inv))

    @property
    def rotation_index(self) -> int | None:
        k = self.table[0]
        return k if self == rotation(k) else None

    @classmethod
    def identity(cls) -> "Bijection":
        return cls(VALUES)


def rotation(k: int) -> Bijection:
    """``U_k``: x -> (x + k) mod 4."""
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 0 <= k <= 3:
        raise ValueError(f"rotation index must be in 0..3; got {k!r}")
    return Bijection(tuple((x + k) % 4 for x in VALUES))


def apply_local_map(x: Sequence[int], particle_index: int, u: Bijection) -> SystemState:
    """Apply ``u`` to particle ``particle_index`` (1-based) only."""
    x = x if isinstance(x, SystemState) else SystemState(x)
    if not 1 <= particle_index <= len(x):
        raise IndexError(f"particle index {particle_index} out of range 1..{len(x)}")
    vals = list(x)
    vals[particle_index - 1] = u(vals[particle_index - 1])
    return SystemState(vals)


# -- epistemic states ---------------------------------------------------------

def _fraction(p) -> Fraction:
    if isinstance(p, float):
        raise TypeError("probabilities must be exact (int, Fraction or 'num/den' string), not float")
    return Fraction(p)


class Mixture:
    """A finite distribution over system states with exact probabilities."""

    __slots__ = ("_support",)

    def __init__(self, weights: Mapping | Iterable[tuple[Sequence[int], object]]) -> None:
        items = weights.items() if isinstance(weights, Mapping) else weights
        support: dict[SystemState, Fraction] = {}
        for state, p in items:
            s = state if isinstance(state, SystemState) else SystemState(state)
            if s in support:
                raise ValueError(f"state {tuple(s)} listed twice")
            q = _fraction(p)
            if q <= 0:
                raise ValueError(f"probability of {tuple(s)} must be positive; got {q}")
            support[s] = q
        if not support:
            raise ValueError("a mixture needs at least one state")
        if len({s.num_particles for s in support}) != 1:
            raise ValueError("all states of a mixture must have the same particle count")
        total = sum(support.values())
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")
        self._support = tuple(sorted(support.items()))

    @classmethod
    def uniform(cls, states: Iterable[Sequence[int]]) -> "Mixture":
        states = list(states)
        p = Fraction(1, len(states))
        return cls([(s, p) for s in states])

    @classmethod
    def point(cls, state: Sequence[int]) -> "Mixture":
        return cls([(state, 1)])

    @property
    def support(self) -> tuple[tuple[SystemState, Fraction], ...]:
        return self._support

    @property
    def states(self) -> tuple[SystemState, ...]:
        return tuple(s for s, _ in self._support)

    @property
    def num_particles(self) -> int:
        return self._support[0][0].num_particles

    def prob(self, state: Sequence[int]) -> Fraction:
        key = tuple(state)
        for s, p in self._support:
            if tuple(s) == key:
                return p
        return Fraction(0)

    def as_dict(self) -> dict[SystemState, Fraction]:
        return dict(self._support)

    def marginal(self, n: int) -> dict[int, Fraction]:
        """Distribution of particle ``n`` (1-based)."""
        out: dict[int, Fraction] = {}
        for s, p in self._support:
            out[s[n - 1]] = out.get(s[n - 1], Fraction(0)) + p
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mixture):
            return NotImplemented
        return self._support == other._support

    def __hash__(self) -> int:
        return hash(self._support)

    def __repr__(self) -> str:
        parts = ", ".join(
            f"{p} of {s[0] if len(s) == 1 else tuple(s)}" for s, p in self._support
        )
        return f"[{parts}]"


def posterior_mixture(m: Measurement, r: int) -> Mixture:
    """What anyone who saw outcome ``r`` knows about the post-measurement state."""
    require_valid(m)
    if not 0 <= r < m.R:
        raise IndexError(f"outcome {r} out of range 0..{m.R - 1}")
    return Mixture.uniform(m.outcomes[r])


def retrodict(prior: Mixture, m: Measurement, r: int) -> Mixture:
    """The pre-measurement state given ``prior`` and outcome ``r``."""
    require_valid(m)
    if not 0 <= r < m.R:
        raise IndexError(f"outcome {r} out of range 0..{m.R - 1}")
    if prior.num_particles != m.num_particles:
        raise ValueError("prior and measurement disagree on the particle count")
    kept = [(s, p) for s, p in prior.support if find_outcome(m, s) == r]
    mass = sum(p for _, p in kept)
    if mass == 0:
        raise ImpossibleOutcome("outcome impossible under prior")
    return Mixture([(s, p / mass) for s, p in kept])


# -- hidden-value store --------------------------------------------------------

class OnticRegister:
    """Hidden particle values behind an agent-facing interface.

    Agents measure and manipulate through :meth:`measure` and :meth:`apply`,
    which return outcome labels only. :meth:`god_view` exposes the values and
    exists for tests and explicitly flagged output.
    """

    def __init__(self) -> None:
        self._values: dict[Hashable, int] = {}

    def __contains__(self, pid) -> bool:
        return pid in self._values

    def __len__(self) -> int:
        return len(self._values)

    def add(self, pid: Hashable, value: int) -> None:
        if pid in self._values:
            raise KeyError(f"particle {pid!r} already exists")
        self._values[pid] = _check_value(value)

    def measure(self, m: Measurement, pids: Sequence[Hashable], rng: Stream) -> int:
        if len(set(pids)) != len(pids):
            raise ValueError("a particle cannot appear twice in one measurement")
        x = SystemState(self._values[p] for p in pids)
        r, post = measure(m, x, rng)
        for p, v in zip(pids, post):
            self._values[p] = v
        return r

    def apply(self, pid: Hashable, u: Bijection) -> None:
        self._values[pid] = u(self._values[pid])

    def god_view(self, pid: Hashable | None = None):
        if pid is not None:
            return self._values[pid]
        return dict(self._values)
