"""Bell-like two-particle measurement, correlated pairs and teleportation."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np
from scipy.stats import chisquare

from toylocal import kernels
from toylocal.core import Measurement, rotation
from toylocal.rng import ScriptedStream, Stream
from toylocal.spacetime import (
    World,
    WorldLog,
    joint_measure,
    local_op,
    move_particles,
    receive_messages,
    send_message,
)

ALICE_AT = 0
DEFAULT_DISTANCE = 10


@lru_cache(maxsize=None)
def bell_measurement() -> Measurement:
    """Outcome ``r`` holds the four states ``(a, (a - r) mod 4)``, ``a = 0..3``."""
    return Measurement(
        [[(a, (a - r) % 4) for a in range(4)] for r in range(4)], 2, name="bell"
    )


@dataclass(frozen=True)
class BellPairRecord:
    """A prepared pair. ``ontic_y`` is god-view: the pair's hidden state is
    ``(y, (y - pair_outcome) mod 4)``."""

    pair_outcome: int
    ontic_y: int
    particle_ids: tuple = (2, 3)

    def __post_init__(self) -> None:
        if not (0 <= self.pair_outcome <= 3 and 0 <= self.ontic_y <= 3):
            raise ValueError("pair outcome and hidden value must be in 0..3")

    @property
    def ontic_pair(self) -> tuple[int, int]:
        return self.ontic_y, (self.ontic_y - self.pair_outcome) % 4


def prepare_pair(
    rng: Stream,
    world: World | None = None,
    *,
    ids: tuple = (2, 3),
    position: int = 0,
    hidden_y: int | None = None,
) -> BellPairRecord:
    """Create two co-located particles in an unknown state and measure B on them.

    The unknown initial state is uniform over all 16 two-particle states.
    ``hidden_y`` pins the hidden value of the first particle after the
    measurement (a god-view hook for exhaustive tests; the outcome is still
    drawn).
    """
    world = world if world is not None else World()
    a, b = rng.randbelow(4), rng.randbelow(4)
    world.add_particle(ids[0], position, a)
    world.add_particle(ids[1], position, b)
    r = joint_measure(world, bell_measurement(), list(ids), rng, actor="source")
    if hidden_y is not None:
        world.register._values[ids[0]] = hidden_y
        world.register._values[ids[1]] = (hidden_y - r) % 4
    y = world.register.god_view(ids[0])
    return BellPairRecord(r, y, tuple(ids))


def normalize_pair(record: BellPairRecord, world: World | None = None) -> BellPairRecord:
    """Rotate the second particle by ``U_r`` so the pair becomes ``(y, y)``."""
    if world is not None:
        local_op(world, record.particle_ids[1], rotation(record.pair_outcome), actor="source")
    return BellPairRecord(0, record.ontic_y, record.particle_ids)


@dataclass
class TeleportationTranscript:
    input_x: int
    pair_outcome: int
    alice_outcome: int
    message: dict
    bob_correction: int
    final_state_particle3: int
    event_log: WorldLog
    ontic_y: int
    alice_post: tuple[int, int]
    distance: int
    particle3_at_send: int

    @property
    def success(self) -> bool:
        return self.final_state_particle3 == self.input_x

    def to_json(self, god_view: bool = False) -> dict:
        out = {
            "pair_outcome": self.pair_outcome,
            "alice_outcome": self.alice_outcome,
            "bob_correction": self.bob_correction,
            "message": self.message,
            "distance": self.distance,
            "events": self.event_log.to_json(),
        }
        if god_view:
            out["god_view"] = {
                "input_x": self.input_x,
                "ontic_y": self.ontic_y,
                "alice_post": list(self.alice_post),
                "particle3_at_send": self.particle3_at_send,
                "final_state_particle3": self.final_state_particle3,
            }
        return out


def teleport_run(
    x: int, rng: Stream, *, distance: int = DEFAULT_DISTANCE, hidden_y: int | None = None
) -> TeleportationTranscript:
    """One full teleportation of hidden value ``x`` from Alice (at 0) to Bob (at ``distance``).

    The pair source sits at ``distance // 2``. Draw order on ``rng``: the
    pair's initial state (two values), the pair measurement's row, Alice's
    row.
    """
    if not 0 <= x <= 3:
        raise ValueError("x must be in 0..3")
    if distance < 0:
        raise ValueError("distance must be non-negative")
    bob_at = ALICE_AT + distance
    world = World()
    world.add_particle(1, ALICE_AT, x, actor="alice")

    raw = prepare_pair(rng, world, ids=(2, 3), position=ALICE_AT + distance // 2, hidden_y=hidden_y)
    pair = normalize_pair(raw, world)
    move_particles(world, {2: ALICE_AT, 3: bob_at}, actor="source")

    r = joint_measure(world, bell_measurement(), [1, 2], rng, actor="alice")
    alice_post = (world.register.god_view(1), world.register.god_view(2))
    send_tick = world.clock
    particle3_at_send = world.register.god_view(3)
    send_message(world, r, ALICE_AT, bob_at, actor="alice")

    (msg,) = receive_messages(world, bob_at, actor="bob")
    k = msg.payload
    local_op(world, 3, rotation(k), actor="bob")

    return TeleportationTranscript(
        input_x=x,
        pair_outcome=raw.pair_outcome,
        alice_outcome=r,
        message={"content": r, "from": ALICE_AT, "to": bob_at, "send_tick": send_tick, "recv_tick": world.clock},
        bob_correction=k,
        final_state_particle3=world.register.god_view(3),
        event_log=world.log,
        ontic_y=pair.ontic_y,
        alice_post=alice_post,
        distance=distance,
        particle3_at_send=particle3_at_send,
    )


def _pvalue(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    if counts.sum() == 0:
        return 1.0
    return float(f"{chisquare(counts).pvalue:.10g}")


@dataclass
class TeleportStats:
    trials: int
    successes: int
    alice_outcomes: list[int]
    particle1_post: list[int]
    pair_outcomes: list[int]
    joint_post: dict[int, dict[tuple[int, int], int]] = field(default_factory=dict)

    @property
    def success_rate(self) -> Fraction:
        return Fraction(self.successes, self.trials)

    @property
    def alice_outcome_pvalue(self) -> float:
        return _pvalue(self.alice_outcomes)

    @property
    def particle1_pvalue(self) -> float:
        return _pvalue(self.particle1_post)

    def joint_pvalue(self, r: int) -> float:
        rows = bell_measurement().outcomes[r]
        return _pvalue([self.joint_post.get(r, {}).get(tuple(row), 0) for row in rows])

    def to_json(self) -> dict:
        rate = self.success_rate
        return {
            "trials": self.trials,
            "successes": self.successes,
            "success_rate": float(rate),
            "success_rate_exact": f"{rate.numerator}/{rate.denominator}",
            "alice_outcome_histogram": self.alice_outcomes,
            "pair_outcome_histogram": self.pair_outcomes,
            "particle1_post_histogram": self.particle1_post,
            "joint_post_histogram": {
                str(r): {f"{a},{b}": n for (a, b), n in sorted(cells.items())}
                for r, cells in sorted(self.joint_post.items())
            },
            "chi_square_pvalues": {
                "alice_outcome": self.alice_outcome_pvalue,
                "particle1_post": self.particle1_pvalue,
                "joint_post": {str(r): self.joint_pvalue(r) for r in range(4)},
            },
        }


def _trace_rows(rng: Stream, trials: int, distance: int, mode: str) -> np.ndarray:
    if mode == "fast":
        return kernels.teleport_batch(rng.key, trials)
    if mode != "full":
        raise ValueError(f"mode must be 'fast' or 'full', not {mode!r}")
    rows = np.empty((trials, len(kernels.TELEPORT_FIELDS)), dtype=np.int8)
    for i in range(trials):
        sub = rng.spawn(i)
        x = sub.randbelow(4)
        t = teleport_run(x, sub, distance=distance)
        rows[i] = (x, t.pair_outcome, t.ontic_y, t.alice_outcome, *t.alice_post, t.final_state_particle3)
    return rows


def teleport_stats(
    trials: int, rng: Stream, *, distance: int = DEFAULT_DISTANCE, mode: str = "fast"
) -> TeleportStats:
    """Batch statistics over ``trials`` runs with uniformly random inputs.

    Trial ``i`` runs on ``rng.spawn(i)``. ``mode="full"`` executes
    :func:`teleport_run` for every trial; ``mode="fast"`` replays the same
    draws through the compiled kernel and produces identical numbers.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rows = _trace_rows(rng, trials, distance, mode)
    x, pair_r, _y, r, p1, p2, final3 = (rows[:, j].astype(np.int64) for j in range(rows.shape[1]))
    joint: dict[int, Counter] = {k: Counter() for k in range(4)}
    for rr, a, b in zip(r.tolist(), p1.tolist(), p2.tolist()):
        joint[rr][(a, b)] += 1
    return TeleportStats(
        trials=trials,
        successes=int((final3 == x).sum()),
        alice_outcomes=np.bincount(r, minlength=4).tolist(),
        particle1_post=np.bincount(p1, minlength=4).tolist(),
        pair_outcomes=np.bincount(pair_r, minlength=4).tolist(),
        joint_post={k: dict(c) for k, c in joint.items()},
    )


def enumerate_runs(x: int, *, distance: int = DEFAULT_DISTANCE):
    """Every equally likely run for input ``x``: all 4**4 draw sequences."""
    for draws in product(range(4), repeat=4):
        yield teleport_run(x, ScriptedStream(draws), distance=distance)


def particle3_before_message(x: int, pair_outcome: int) -> dict[int, Fraction]:
    """Exact distribution of particle 3 when Alice sends her message, given the
    source's (public) pair outcome. Computed by running the protocol on every
    draw sequence."""
    counts: Counter = Counter()
    for t in enumerate_runs(x):
        if t.pair_outcome == pair_outcome:
            counts[t.particle3_at_send] += 1
    total = sum(counts.values())
    return {v: Fraction(counts[v], total) for v in range(4)}
