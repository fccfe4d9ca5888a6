from collections import Counter

import pytest
from scipy.stats import chisquare

from toylocal.rng import MASK64, ScriptedStream, Stream, derive_key, mix64


def test_splitmix_reference_values():
    # the first outputs of SplitMix64 seeded with state 0 (published reference)
    state, out = 0, []
    for _ in range(3):
        state = (state + 0x9E3779B97F4A7C15) & MASK64
        out.append(mix64(state))
    assert out == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    s = Stream(key=0)
    assert [s.next64() for _ in range(3)] == out


def test_same_seed_same_draws():
    a, b = Stream(7), Stream(7)
    assert [a.randbelow(10) for _ in range(50)] == [b.randbelow(10) for _ in range(50)]


def test_spawn_depends_only_on_key_and_index():
    s = Stream(11)
    first = s.spawn(3).randbelow(1000)
    for _ in range(10):
        s.next64()
    assert s.spawn(3).randbelow(1000) == first
    assert s.spawn(3).key == derive_key(Stream(11).key, 3)
    assert s.spawn(3).key != s.spawn(4).key


def test_randbelow_uniform():
    s = Stream(3)
    counts = Counter(s.randbelow(6) for _ in range(12_000))
    assert chisquare([counts[i] for i in range(6)]).pvalue > 0.001


def test_randbelow_rejects_bad_bound():
    with pytest.raises(ValueError):
        Stream(0).randbelow(0)


def test_negative_seed_wraps_to_64_bits():
    assert Stream(-1).key == Stream(MASK64).key


def test_shuffle_is_permutation():
    items = list(range(20))
    Stream(5).shuffle(items)
    assert sorted(items) == list(range(20))


def test_scripted_stream():
    s = ScriptedStream([1, 0, 3])
    assert [s.randbelow(4), s.randbelow(2), s.randbelow(4)] == [1, 0, 3]
    with pytest.raises(IndexError):
        s.randbelow(4)
    with pytest.raises(ValueError):
        ScriptedStream([5]).randbelow(4)
