"""Exhaustive enumeration of valid measurements in canonical form."""

from __future__ import annotations

from itertools import permutations, product
from typing import Iterator, Sequence, TypeVar

from toylocal.core import Measurement, SystemState, validate_measurement

T = TypeVar("T")


def set_partitions(items: Sequence[T]) -> Iterator[list[list[T]]]:
    """All set partitions of ``items`` via restricted growth strings.

    Blocks come out ordered by their first element, in input order.
    """
    n = len(items)
    if n == 0:
        yield []
        return
    rgs = [0] * n

    def rec(i: int, used: int) -> Iterator[list[list[T]]]:
        if i == n:
            blocks: list[list[T]] = [[] for _ in range(used)]
            for item, b in zip(items, rgs):
                blocks[b].append(item)
            yield blocks
            return
        for b in range(used + 1):
            rgs[i] = b
            yield from rec(i + 1, max(used, b + 1))

    rgs[0] = 0
    yield from rec(1, 1)


def _single_particle() -> list[Measurement]:
    found = []
    for blocks in set_partitions([0, 1, 2, 3]):
        if min(len(b) for b in blocks) < 2:
            continue
        m = Measurement([[(v,) for v in b] for b in blocks], 1).canonical()
        found.append(m)
    return sorted(found, key=lambda m: (-m.R, m.outcomes))


def _product(a: Measurement, b: Measurement) -> Measurement:
    sets = [
        [SystemState(tuple(x) + tuple(y)) for x in ra for y in rb]
        for ra in a.outcomes
        for rb in b.outcomes
    ]
    return Measurement(sets, a.num_particles + b.num_particles)


def _two_particle_subclass() -> list[Measurement]:
    # products of single-particle measurements, plus every image of the
    # Bell-like measurement under independent relabellings of each particle
    from toylocal.bell import bell_measurement

    singles = _single_particle()
    candidates = [_product(a, b) for a in singles for b in singles]
    bell = bell_measurement()
    for p1, p2 in product(permutations(range(4)), repeat=2):
        candidates.append(
            Measurement([[(p1[x], p2[y]) for x, y in rows] for rows in bell.outcomes], 2)
        )
    seen: dict[tuple, Measurement] = {}
    for m in candidates:
        c = m.canonical()
        seen.setdefault(c.outcomes, c)
    return sorted(seen.values(), key=lambda m: (-m.R, m.outcomes))


def enumerate_valid_measurements(n: int, *, generator_subclass: bool = False) -> list[Measurement]:
    """Valid measurements on ``n`` particles, one per partition, canonical order.

    ``n == 1`` is exhaustive. ``n == 2`` is only available as the generated
    subclass (products of single-particle measurements and relabelled copies
    of the Bell-like measurement) and needs ``generator_subclass=True``.
    """
    if n == 1:
        out = _single_particle()
    elif n == 2 and generator_subclass:
        out = _two_particle_subclass()
    elif n == 2:
        raise ValueError("n=2 is not enumerated exhaustively; pass generator_subclass=True")
    else:
        raise ValueError(f"unsupported particle count {n}; enumeration supports n=1 (and n=2 subclass)")
    for m in out:
        report = validate_measurement(m)
        if not report:
            raise RuntimeError(f"enumerated an invalid measurement {m!r}: {report.describe()}")
    return out
