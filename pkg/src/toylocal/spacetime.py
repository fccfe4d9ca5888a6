"""Positions, unit-speed transport, classical messages and a locality auditor.

Space is a 1-D integer lattice and time a global integer tick. Particles and
messages both travel at most one cell per tick. Joint measurements require
every participant at the same coordinate. All of this is recorded in a
:class:`WorldLog` that :func:`audit_locality` can re-check after the fact,
including logs loaded from JSON.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from toylocal.core import Bijection, Measurement, OnticRegister
from toylocal.rng import Stream

EVENT_KINDS = ("create", "move", "joint_measure", "local_op", "msg_send", "msg_recv")


class LocalityViolation(RuntimeError):
    pass


class MalformedLog(ValueError):
    pass


@dataclass
class Event:
    tick: int
    actor: str
    kind: str
    payload: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"tick": self.tick, "actor": self.actor, "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Event":
        try:
            tick, actor, kind = obj["tick"], obj["actor"], obj["kind"]
        except (KeyError, TypeError) as exc:
            raise MalformedLog(f"event {obj!r} lacks tick/actor/kind") from exc
        if isinstance(tick, bool) or not isinstance(tick, int):
            raise MalformedLog(f"event tick must be an integer: {obj!r}")
        if kind not in EVENT_KINDS:
            raise MalformedLog(f"unknown event kind {kind!r}")
        return cls(tick, str(actor), kind, dict(obj.get("payload") or {}))


class WorldLog:
    """Append-only event record; ticks never decrease."""

    def __init__(self, events: Iterable[Event] = ()) -> None:
        self.events: list[Event] = list(events)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def append(self, event: Event) -> None:
        if self.events and event.tick < self.events[-1].tick:
            raise MalformedLog(f"tick {event.tick} precedes {self.events[-1].tick}")
        self.events.append(event)

    def of_kind(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.events]

    @classmethod
    def from_json(cls, obj) -> "WorldLog":
        if not isinstance(obj, list):
            raise MalformedLog("a world log is a JSON array of events")
        # no tick check here: the auditor reports non-monotone logs itself
        return cls(Event.from_json(e) for e in obj)


@dataclass
class Message:
    msg_id: int
    payload: object
    origin: int
    destination: int
    send_tick: int

    @property
    def deliver_tick(self) -> int:
        return self.send_tick + abs(self.destination - self.origin)


class World:
    """Single-run simulation state: clock, positions, messages in flight, log.

    Hidden particle values live in ``register`` and are only changed through
    :func:`joint_measure` and :func:`local_op`.
    """

    def __init__(self, register: OnticRegister | None = None) -> None:
        self.clock = 0
        self.particle_positions: dict[Hashable, int] = {}
        self.pending_messages: list[Message] = []
        self.log = WorldLog()
        self.register = register if register is not None else OnticRegister()
        self._msg_seq = 0

    def record(self, kind: str, actor: str, **payload) -> Event:
        event = Event(self.clock, actor, kind, payload)
        self.log.append(event)
        return event

    def add_particle(self, pid: Hashable, position: int, value: int, actor: str = "source") -> Event:
        if pid in self.particle_positions:
            raise KeyError(f"particle {pid!r} already exists")
        self.register.add(pid, value)
        self.particle_positions[pid] = position
        return self.record("create", actor, particle=pid, at=position)

    def position(self, pid: Hashable) -> int:
        try:
            return self.particle_positions[pid]
        except KeyError:
            raise KeyError(f"unknown particle {pid!r}") from None

    def advance(self, ticks: int) -> None:
        if ticks < 0:
            raise ValueError("time does not run backwards")
        self.clock += ticks

    def advance_to(self, tick: int) -> None:
        self.advance(max(0, tick - self.clock))


def move_particles(world: World, destinations: Mapping[Hashable, int], actor: str = "") -> list[Event]:
    """Move several particles at once, each one cell per tick, until all arrive."""
    for pid in destinations:
        world.position(pid)
    events = []
    while True:
        stepping = [(p, d) for p, d in destinations.items() if world.particle_positions[p] != d]
        if not stepping:
            return events
        world.clock += 1
        for pid, dest in stepping:
            here = world.particle_positions[pid]
            there = here + (1 if dest > here else -1)
            world.particle_positions[pid] = there
            events.append(world.record("move", actor or str(pid), particle=pid, **{"from": here, "to": there}))


def move_particle(world: World, pid: Hashable, destination: int, actor: str = "") -> list[Event]:
    """Walk one particle to ``destination``; takes ``|destination - current|`` ticks."""
    return move_particles(world, {pid: destination}, actor)


@dataclass(frozen=True)
class ColocationCheck:
    ok: bool
    positions: dict

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        spots = ", ".join(f"{p!r}@{x}" for p, x in self.positions.items())
        return ("co-located: " if self.ok else "not co-located: ") + spots


def require_colocated(world: World, pids: Sequence[Hashable]) -> ColocationCheck:
    positions = {p: world.position(p) for p in pids}
    return ColocationCheck(len(set(positions.values())) <= 1, positions)


def send_message(world: World, payload, origin: int, destination: int, actor: str = "") -> int:
    """Put a classical message in flight; returns the tick it becomes readable."""
    msg = Message(world._msg_seq, payload, origin, destination, world.clock)
    world._msg_seq += 1
    world.pending_messages.append(msg)
    world.record("msg_send", actor, msg=msg.msg_id, content=payload, **{"from": origin, "to": destination})
    return msg.deliver_tick


def receive_messages(world: World, destination: int, actor: str = "", wait: bool = True) -> list[Message]:
    """Deliver messages addressed to ``destination``.

    With ``wait`` the clock first advances to the earliest delivery tick if
    nothing is readable yet. Delivery is FIFO among messages readable now.
    """
    mine = [m for m in world.pending_messages if m.destination == destination]
    if not mine:
        return []
    if wait and all(m.deliver_tick > world.clock for m in mine):
        world.advance_to(min(m.deliver_tick for m in mine))
    ready = sorted((m for m in mine if m.deliver_tick <= world.clock), key=lambda m: (m.deliver_tick, m.msg_id))
    for m in ready:
        world.pending_messages.remove(m)
        world.record("msg_recv", actor, msg=m.msg_id, content=m.payload, **{"from": m.origin, "to": m.destination})
    return ready


def joint_measure(
    world: World, m: Measurement, pids: Sequence[Hashable], rng: Stream, actor: str = "", label: str | None = None
) -> int:
    """Measure ``m`` on the listed particles (in column order); returns the outcome."""
    check = require_colocated(world, pids)
    if not check:
        raise LocalityViolation(check.describe())
    r = world.register.measure(m, list(pids), rng)
    world.record(
        "joint_measure", actor,
        particles=list(pids), at=[check.positions[p] for p in pids],
        measurement=label or m.name or "", outcome=r,
    )
    return r


def local_op(world: World, pid: Hashable, u: Bijection, actor: str = "", label: str | None = None) -> None:
    world.register.apply(pid, u)
    k = u.rotation_index
    name = label or (f"U_{k}" if k is not None else "perm" + "".join(map(str, u.table)))
    world.record("local_op", actor, particle=pid, at=world.position(pid), op=name)


# -- auditing -------------------------------------------------------------------

@dataclass(frozen=True)
class AuditReport:
    ok: bool
    violation: str | None = None
    event_index: int | None = None
    event: dict | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "locality audit passed"
        return f"locality violation ({self.violation}) at event {self.event_index}: {self.detail}"


def _key(pid):
    # JSON turns tuples into lists; particle ids must stay hashable
    return tuple(pid) if isinstance(pid, list) else pid


def audit_locality(log: WorldLog | Sequence[Event]) -> AuditReport:
    """Replay a log and check co-location, the speed cap and message latency."""
    events = list(log.events if isinstance(log, WorldLog) else log)
    for i in range(1, len(events)):
        if events[i].tick < events[i - 1].tick:
            raise MalformedLog(f"event {i} has tick {events[i].tick} after tick {events[i - 1].tick}")

    positions: dict = {}
    last_move: dict = {}
    sent: dict = {}

    def fail(i: int, kind: str, detail: str) -> AuditReport:
        return AuditReport(False, kind, i, events[i].to_json(), detail)

    for i, e in enumerate(events):
        p = e.payload
        try:
            if e.kind == "create":
                pid = _key(p["particle"])
                if pid in positions:
                    return fail(i, "duplicate_particle", f"particle {pid!r} created twice")
                positions[pid] = p["at"]
            elif e.kind == "move":
                pid = _key(p["particle"])
                if pid not in positions:
                    return fail(i, "unknown_particle", f"particle {pid!r} moved before it exists")
                src, dst = p["from"], p["to"]
                if src != positions[pid]:
                    return fail(i, "teleport", f"particle {pid!r} is at {positions[pid]} but moves from {src}")
                if abs(dst - src) > 1:
                    return fail(i, "speed", f"particle {pid!r} jumps {abs(dst - src)} cells in one step")
                if last_move.get(pid) == e.tick:
                    return fail(i, "speed", f"particle {pid!r} moves twice in tick {e.tick}")
                positions[pid] = dst
                last_move[pid] = e.tick
            elif e.kind in ("joint_measure", "local_op"):
                pids = [_key(x) for x in p["particles"]] if "particles" in p else [_key(p["particle"])]
                unknown = [x for x in pids if x not in positions]
                if unknown:
                    return fail(i, "unknown_particle", f"particles {unknown!r} do not exist")
                where = [positions[x] for x in pids]
                if len(set(where)) > 1:
                    return fail(i, "not_colocated", f"particles {pids!r} are at {where}")
                claimed = p.get("at")
                if claimed is not None:
                    claimed = claimed if isinstance(claimed, list) else [claimed]
                    if claimed != where:
                        return fail(i, "misplaced", f"event claims {claimed}, trajectories give {where}")
            elif e.kind == "msg_send":
                sent[p["msg"]] = (e.tick, p["from"], p["to"])
            elif e.kind == "msg_recv":
                if p["msg"] not in sent:
                    return fail(i, "unsent_message", f"message {p['msg']!r} received but never sent")
                t0, src, dst = sent[p["msg"]]
                if p.get("to", dst) != dst:
                    return fail(i, "misdelivered", f"message {p['msg']!r} sent to {dst}, read at {p['to']}")
                if e.tick < t0 + abs(dst - src):
                    return fail(
                        i, "superluminal",
                        f"message {p['msg']!r} sent at {t0} over {abs(dst - src)} cells read at {e.tick}",
                    )
        except (KeyError, TypeError) as exc:
            raise MalformedLog(f"event {i} ({e.kind}) is missing field {exc}") from exc
    return AuditReport(True)
