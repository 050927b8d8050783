"""Double-array trie over UTF-8 byte strings.

The trie is built once from a sorted key list and is immutable afterwards.
Transitions use byte value + 1 as the transition code; code 0 marks key
acceptance, with the accepting cell's base storing -(key index + 1).
The structural invariant is check[base[s] + c] == s for every reachable
state s and traversed code c.
"""

from dataclasses import dataclass

from kotowari.errors import KotowariError

__all__ = ["DoubleArrayTrie", "build_trie"]

_TERMINAL = 0  # transition code marking end of key


class TrieBuildError(KotowariError):
    pass


@dataclass(frozen=True, slots=True)
class DoubleArrayTrie:
    base: list
    check: list
    values: tuple  # values[i] = tuple of entry ids for the i-th key

    def _walk(self, state: int, code: int):
        t = self.base[state] + code
        if 0 <= t < len(self.check) and self.check[t] == state:
            return t
        return -1

    def exact_lookup(self, key: bytes):
        """Return the entry-id tuple for key, or None if absent."""
        s = 0
        for b in key:
            s = self._walk(s, b + 1)
            if s < 0:
                return None
        t = self._walk(s, _TERMINAL)
        if t < 0:
            return None
        return self.values[-self.base[t] - 1]

    def common_prefix_search(self, text: bytes, start: int = 0):
        """All keys that prefix text[start:], shortest first.

        Returns a list of (match_byte_length, entry_id_tuple).
        """
        out = []
        s = 0
        base = self.base
        check = self.check
        size = len(check)
        for i in range(start, len(text)):
            t = base[s] + text[i] + 1
            if t < 0 or t >= size or check[t] != s:
                break
            s = t
            a = base[s] + _TERMINAL
            if 0 <= a < size and check[a] == s:
                out.append((i - start + 1, self.values[-base[a] - 1]))
        return out


class _Builder:
    def __init__(self, keys, values):
        self.keys = keys
        self.values = values
        size = 1024
        self.base = [0] * size
        self.check = [-1] * size
        self.check[0] = 0
        self.next_probe = 1  # first index possibly free

    def _ensure(self, size):
        cur = len(self.check)
        if size <= cur:
            return
        new = max(size, cur * 2)
        self.base.extend([0] * (new - cur))
        self.check.extend([-1] * (new - cur))

    def _find_base(self, codes):
        first = codes[0]
        b = max(1, self.next_probe - first)
        while True:
            ok = True
            for c in codes:
                pos = b + c
                self._ensure(pos + 1)
                if self.check[pos] != -1:
                    ok = False
                    break
            if ok:
                return b
            b += 1

    def build(self, lo, hi, depth, state):
        # children of `state` = distinct codes at `depth` over keys[lo:hi]
        codes = []
        ranges = []
        i = lo
        while i < hi:
            key = self.keys[i]
            code = _TERMINAL if len(key) == depth else key[depth] + 1
            j = i
            while j < hi:
                k2 = self.keys[j]
                c2 = _TERMINAL if len(k2) == depth else k2[depth] + 1
                if c2 != code:
                    break
                j += 1
            codes.append(code)
            ranges.append((i, j))
            i = j

        b = self._find_base(codes)
        self.base[state] = b
        for c in codes:
            self.check[b + c] = state
        # advance the free-slot probe past fully occupied prefix
        while self.next_probe < len(self.check) and self.check[self.next_probe] != -1:
            self.next_probe += 1

        for c, (klo, khi) in zip(codes, ranges):
            child = b + c
            if c == _TERMINAL:
                self.base[child] = -(klo + 1)  # key index of the accepted key
            else:
                self.build(klo, khi, depth + 1, child)


def build_trie(keys, values) -> DoubleArrayTrie:
    """Build a trie from strictly sorted unique byte-string keys.

    values[i] is the list of entry ids attached to keys[i]; order within
    each list is preserved.
    """
    if len(keys) != len(values):
        raise TrieBuildError("keys and values differ in length")
    for i, k in enumerate(keys):
        if not isinstance(k, (bytes, bytearray)):
            raise TrieBuildError(f"key {i} is not a byte string")
        if len(k) == 0:
            raise TrieBuildError(f"key {i} is empty")
        if i > 0 and keys[i - 1] >= k:
            raise TrieBuildError(
                f"keys not strictly sorted at index {i}: {keys[i - 1]!r} >= {k!r}"
            )
    builder = _Builder(list(keys), values)
    if keys:
        builder.build(0, len(keys), 0, 0)
    # trim trailing free space, keeping room for the widest transition
    last = max(
        (i for i, c in enumerate(builder.check) if c != -1), default=0
    )
    size = last + 1
    return DoubleArrayTrie(
        builder.base[:size],
        builder.check[:size],
        tuple(tuple(v) for v in values),
    )
