import random

import pytest

from kotowari.trie import TrieBuildError, build_trie

from oracles import naive_prefix_search


def make_trie(surfaces):
    keys = sorted({s.encode("utf-8") for s in surfaces})
    values = [[i] for i in range(len(keys))]
    return build_trie(keys, values), dict(zip(keys, (tuple(v) for v in values)))


def test_singleton():
    trie, mapping = make_trie(["は"])
    assert trie.exact_lookup("は".encode()) == mapping["は".encode()]
    assert trie.exact_lookup("ば".encode()) is None


def test_prefix_pair():
    trie, mapping = make_trie(["麩", "麩菓子"])
    assert trie.exact_lookup("麩".encode()) is not None
    assert trie.exact_lookup("麩菓子".encode()) is not None
    assert trie.exact_lookup("麩菓".encode()) is None


def test_common_prefix_search_shortest_first():
    trie, mapping = make_trie(["麩", "麩菓子"])
    text = "麩菓子は".encode()
    got = trie.common_prefix_search(text, 0)
    assert got == [(3, mapping["麩".encode()]), (9, mapping["麩菓子".encode()])]


def test_common_prefix_search_empty_result():
    trie, _ = make_trie(["麩", "麩菓子"])
    text = "麩菓子は".encode()
    assert trie.common_prefix_search(text, len("麩菓子".encode())) == []


def test_duplicate_surface_shares_key():
    keys = ["料".encode()]
    trie = build_trie(keys, [[3, 7]])
    assert trie.exact_lookup("料".encode()) == (3, 7)


def test_unsorted_keys_rejected():
    with pytest.raises(TrieBuildError):
        build_trie([b"b", b"a"], [[0], [1]])


def test_duplicate_keys_rejected():
    with pytest.raises(TrieBuildError):
        build_trie([b"a", b"a"], [[0], [1]])


def test_empty_key_rejected():
    with pytest.raises(TrieBuildError):
        build_trie([b""], [[0]])


def test_empty_trie():
    trie = build_trie([], [])
    assert trie.exact_lookup(b"x") is None
    assert trie.common_prefix_search(b"xyz", 0) == []


def test_double_array_invariant():
    trie, _ = make_trie(["は", "麩", "麩菓子", "abc"])
    for t, s in enumerate(trie.check):
        if t != 0 and s != -1:
            assert 0 <= s < len(trie.base)


def test_determinism():
    surfaces = ["見", "見た", "麩", "麩菓子", "は", "abc"]
    t1, _ = make_trie(surfaces)
    t2, _ = make_trie(surfaces)
    assert t1.base == t2.base
    assert t1.check == t2.check


def test_randomized_oracle_equivalence():
    rng = random.Random(20230801)

    def rand_key():
        n = rng.randint(1, 6)
        return "".join(chr(rng.randrange(0x30A1, 0x30F0)) for _ in range(n))

    surfaces = {rand_key() for _ in range(1000)}
    trie, mapping = make_trie(surfaces)

    for key in mapping:
        assert trie.exact_lookup(key) == mapping[key]
    misses = 0
    while misses < 1000:
        probe = rand_key().encode()
        if probe in mapping:
            continue
        assert trie.exact_lookup(probe) is None
        misses += 1

    keys = list(mapping)
    for _ in range(500):
        probe = b"".join(rng.choice(keys) for _ in range(rng.randint(1, 3)))
        start = rng.randrange(len(probe) + 1)
        assert trie.common_prefix_search(probe, start) == naive_prefix_search(
            mapping, probe, start
        )
