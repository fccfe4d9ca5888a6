"""Portable, counter-based random streams.

Every random draw in the package comes from :class:`Stream`, a SplitMix64
generator keyed by a 64-bit seed. The n-th output of a stream is a pure
function of ``(key, n)``, and child streams are derived from
``(parent key, index)``, so batch runs give the same answers whether trials
are executed in order, in parallel, or by the compiled kernels.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
SPAWN_SALT = 0x632BE59BD9B4E019


def mix64(z: int) -> int:
    """SplitMix64 finalizer (Stafford variant 13)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_key(key: int, index: int) -> int:
    """Key of child stream ``index`` of the stream keyed ``key``."""
    if index < 0:
        raise ValueError("stream index must be non-negative")
    return mix64(key ^ mix64((index * GAMMA + SPAWN_SALT) & MASK64))


class Stream:
    """A seeded SplitMix64 stream.

    >>> s = Stream(42)
    >>> draws = [s.randbelow(4) for _ in range(5)]
    >>> t = Stream(42)
    >>> draws == [t.randbelow(4) for _ in range(5)]
    True
    """

    __slots__ = ("key", "counter")

    def __init__(self, seed: int = 0, *, key: int | None = None) -> None:
        self.key = mix64(seed & MASK64) if key is None else key & MASK64
        self.counter = 0

    def __repr__(self) -> str:
        return f"Stream(key=0x{self.key:016x}, counter={self.counter})"

    def next64(self) -> int:
        self.counter += 1
        return mix64((self.key + self.counter * GAMMA) & MASK64)

    def randbelow(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next64()
            if v < limit:
                return v % n

    def random(self) -> float:
        """Float in ``[0, 1)`` with 53 random bits."""
        return (self.next64() >> 11) * (1.0 / (1 << 53))

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def spawn(self, index: int) -> "Stream":
        """Independent child stream; depends only on this key and ``index``."""
        return Stream(key=derive_key(self.key, index))


def as_stream(rng: "Stream | int | None") -> Stream:
    if isinstance(rng, Stream):
        return rng
    return Stream(0 if rng is None else rng)


class ScriptedStream(Stream):
    """Replays a fixed sequence of ``randbelow`` results.

    Used to enumerate every equally likely path of a procedure exactly.
    """

    __slots__ = ("_draws", "_pos")

    def __init__(self, draws) -> None:
        super().__init__(0)
        self._draws = list(draws)
        self._pos = 0

    def randbelow(self, n: int) -> int:
        if self._pos >= len(self._draws):
            raise IndexError("scripted stream exhausted")
        v = self._draws[self._pos]
        self._pos += 1
        if not 0 <= v < n:
            raise ValueError(f"scripted draw {v} not below {n}")
        return v

    def spawn(self, index: int) -> "Stream":
        raise TypeError("scripted streams cannot spawn children")
