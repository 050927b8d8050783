"""Segmentation lattice and minimum-cost path extraction.

At every character position, dictionary words found by common-prefix
search become known nodes, and the character category table drives
unknown-word candidates.  A single left-to-right Viterbi pass then picks
the path minimizing word costs plus bigram connection costs.
"""

from dataclasses import dataclass

from kotowari.errors import KotowariError
from kotowari.features import FeatureRecord, parse_feature

__all__ = ["LatticeNode", "Lattice", "Token", "build_lattice", "viterbi", "tokenize"]

GROUP_RUN_CAP = 24  # max characters swallowed by one group=true unknown node

BOS_CONTEXT_ID = 0  # reserved in both matrix dimensions


@dataclass(slots=True)
class LatticeNode:
    start_char: int
    end_char: int
    entry_id: int  # known entry index, or -1 for unknown
    category_id: int  # unknown: char category index, else -1
    template_id: int  # unknown: template index within category, else -1
    left_id: int
    right_id: int
    word_cost: int
    best_cost: int = 0
    best_prev: object = None

    @property
    def is_unknown(self) -> bool:
        return self.entry_id < 0

    def tie_key(self):
        """Deterministic order among same-cost candidates: known before
        unknown, then by entry id (known) or category/template (unknown)."""
        if self.entry_id >= 0:
            return (0, self.entry_id, 0)
        return (1, self.category_id, self.template_id)


@dataclass(slots=True)
class Lattice:
    sentence: str
    starts: list  # starts[i] = nodes beginning at char i
    bos: LatticeNode
    eos: LatticeNode


class LatticeConnectivityError(KotowariError):
    """A character position has no covering node; the dictionary's
    unknown-word templates are incomplete."""


def _unknown_spans(sentence, pos, category, chars):
    """Candidate span lengths for an unknown word starting at pos."""
    n = len(sentence)
    cat_idx = chars.category_index(sentence[pos])
    # maximal same-category run from pos, capped
    run = 1
    while (
        pos + run < n
        and run < GROUP_RUN_CAP
        and chars.belongs_to(sentence[pos + run], cat_idx)
    ):
        run += 1
    lengths = []
    if category.length > 0:
        lengths.extend(range(1, min(category.length, run) + 1))
    if category.group and run not in lengths:
        lengths.append(run)
    return lengths


def build_lattice(dictionary, sentence: str) -> Lattice:
    """Construct the candidate graph for one analysis unit (no newlines)."""
    n = len(sentence)
    starts = [[] for _ in range(n)]
    bos = LatticeNode(-1, 0, -1, -1, -1, 0, BOS_CONTEXT_ID, 0)
    eos = LatticeNode(n, n + 1, -1, -1, -1, BOS_CONTEXT_ID, 0, 0)
    if n == 0:
        return Lattice(sentence, starts, bos, eos)

    encoded = sentence.encode("utf-8")
    char_to_byte = [0] * (n + 1)
    byte_to_char = {}
    b = 0
    for i, ch in enumerate(sentence):
        char_to_byte[i] = b
        byte_to_char[b] = i
        b += len(ch.encode("utf-8"))
    char_to_byte[n] = b
    byte_to_char[b] = n

    entries = dictionary.entries
    chars = dictionary.chars
    for i in range(n):
        start_byte = char_to_byte[i]
        has_known = False
        for blen, entry_ids in dictionary.trie.common_prefix_search(
            encoded, start_byte
        ):
            end = byte_to_char[start_byte + blen]
            for eid in entry_ids:
                e = entries[eid]
                starts[i].append(
                    LatticeNode(i, end, eid, -1, -1, e.left_id, e.right_id, e.word_cost)
                )
                has_known = True

        cat_idx = chars.category_index(sentence[i])
        category = chars.categories[cat_idx]
        if category.invoke or not has_known:
            templates = dictionary.unk.templates_for(category.name)
            for length in _unknown_spans(sentence, i, category, chars):
                for tid, t in enumerate(templates):
                    starts[i].append(
                        LatticeNode(
                            i, i + length, -1, cat_idx, tid,
                            t.left_id, t.right_id, t.word_cost,
                        )
                    )
        if not starts[i]:
            # safety net: cover the position with 1-char default-category nodes
            for tid, t in enumerate(
                dictionary.unk.templates_for(chars.categories[chars.default_index].name)
            ):
                starts[i].append(
                    LatticeNode(
                        i, i + 1, -1, chars.default_index, tid,
                        t.left_id, t.right_id, t.word_cost,
                    )
                )
        if not starts[i]:
            raise LatticeConnectivityError(
                f"no lattice node covers position {i}; the dictionary has no "
                f"unknown-word template for its DEFAULT category"
            )
    return Lattice(sentence, starts, bos, eos)


def viterbi(lattice: Lattice, matrix) -> list:
    """Minimum-cost path, BOS/EOS excluded.

    Among equal-cost predecessors the one with smaller start_char wins
    (i.e. the longest predecessor word), then known nodes before unknown,
    then smaller entry/template ids.  Costs accumulate in plain Python
    ints, so overflow is impossible.
    """
    n = len(lattice.sentence)
    ends = [[] for _ in range(n + 1)]
    if n == 0:
        lattice.eos.best_cost = matrix.cost(BOS_CONTEXT_ID, BOS_CONTEXT_ID)
        lattice.eos.best_prev = lattice.bos
        return []
    ends[0].append(lattice.bos)
    lattice.bos.best_cost = 0

    def relax(node):
        best = None
        best_key = None
        for prev in ends[node.start_char]:
            cost = (
                prev.best_cost
                + matrix.cost(prev.right_id, node.left_id)
                + node.word_cost
            )
            key = (cost, prev.start_char) + prev.tie_key()
            if best is None or key < best_key:
                best = prev
                best_key = key
        if best is None:
            raise LatticeConnectivityError(
                f"no path reaches position {node.start_char}"
            )
        node.best_prev = best
        node.best_cost = best_key[0]

    for i in range(n):
        if not ends[i]:
            continue
        for node in lattice.starts[i]:
            relax(node)
            if node.end_char <= n:
                ends[node.end_char].append(node)

    eos = lattice.eos
    best = None
    best_key = None
    for prev in ends[n]:
        cost = prev.best_cost + matrix.cost(prev.right_id, eos.left_id)
        key = (cost, prev.start_char) + prev.tie_key()
        if best is None or key < best_key:
            best = prev
            best_key = key
    if best is None:
        raise LatticeConnectivityError("no path reaches end of sentence")
    eos.best_prev = best
    eos.best_cost = best_key[0]

    path = []
    node = best
    while node is not lattice.bos:
        path.append(node)
        node = node.best_prev
    path.reverse()
    return path


@dataclass(frozen=True, slots=True)
class Token:
    """One analysis result: a surface span with structured features."""

    surface: str
    start: int
    end: int
    feature: FeatureRecord
    feature_csv: str
    is_unknown: bool

    def __str__(self):
        return self.surface


def _node_feature_csv(dictionary, node):
    if node.entry_id >= 0:
        return dictionary.entries[node.entry_id].feature_csv
    name = dictionary.chars.categories[node.category_id].name
    return dictionary.unk.templates_for(name)[node.template_id].feature_csv


def tokenize(dictionary, sentence: str) -> list:
    """Analyze one sentence into an ordered token list.

    The concatenation of token surfaces always reproduces the sentence
    exactly; callers that want whitespace skipped split beforehand (see
    the tagger module).
    """
    lattice = build_lattice(dictionary, sentence)
    path = viterbi(lattice, dictionary.matrix)
    tokens = []
    cache = dictionary.feature_cache
    for node in path:
        feature_csv = _node_feature_csv(dictionary, node)
        record = cache.get(feature_csv)
        if record is None:
            record = parse_feature(feature_csv, dictionary.schema)
            cache[feature_csv] = record
        tokens.append(
            Token(
                surface=sentence[node.start_char : node.end_char],
                start=node.start_char,
                end=node.end_char,
                feature=record,
                feature_csv=feature_csv,
                is_unknown=node.is_unknown,
            )
        )
    return tokens
