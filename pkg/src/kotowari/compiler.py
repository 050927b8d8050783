"""Dictionary compiler: validated sources in, one versioned binary out.

The on-disk format (`.ktd`) is magic `KTWR`, a u32 format version, then
length-prefixed sections in a fixed order: meta, trie, entries, matrix,
chars, unk, schema.  All integers are little-endian.  compile() and
save() are deterministic, so identical sources always produce identical
bytes.
"""

import struct
from dataclasses import dataclass, field

from kotowari.errors import DictionaryFormatError, ValidationError
from kotowari.features import FeatureSchema, _split_csv, render_feature, FeatureRecord
from kotowari.source import (
    CharCategory,
    CharCategoryTable,
    ConnectionMatrix,
    LexiconEntry,
    UnknownTemplates,
    validate_context_ids,
    validate_unknown_templates,
)
from kotowari.trie import DoubleArrayTrie, build_trie

__all__ = ["DictionaryMeta", "CompiledDictionary", "compile_dictionary", "save", "load"]

MAGIC = b"KTWR"
FORMAT_VERSION = 1

_SECTION_ORDER = ("meta", "trie", "entries", "matrix", "chars", "unk", "schema")

_I16_MIN, _I16_MAX = -32768, 32767


@dataclass(frozen=True, slots=True)
class DictionaryMeta:
    dictionary_name: str
    dictionary_version: str
    entry_count: int
    format_version: int = FORMAT_VERSION
    source_note: str = ""
    default_template: str = ""  # dictionary-supplied CLI output layout, optional


@dataclass(frozen=True, slots=True)
class CompiledDictionary:
    """Immutable bundle of everything the analyzer needs at run time."""

    trie: DoubleArrayTrie
    entries: tuple  # of LexiconEntry, sorted by surface bytes then source order
    matrix: ConnectionMatrix
    chars: CharCategoryTable
    unk: UnknownTemplates
    schema: FeatureSchema
    meta: DictionaryMeta
    # memo of parsed feature records, shared by all lookups of this dictionary
    feature_cache: dict = field(default_factory=dict, repr=False, compare=False)


def _normalize_features(entry: LexiconEntry, schema: FeatureSchema) -> str:
    """Split a hyphen-joined POS column into pos1..pos4 where the schema asks."""
    if not schema.pos_joined_in_source:
        return entry.feature_csv
    fields = _split_csv(entry.feature_csv) if entry.feature_csv else []
    pos_idx = schema.named_roles.get("pos1", 0)
    while len(fields) <= pos_idx:
        fields.append("*")
    if fields[pos_idx] not in ("", "*"):
        levels = fields[pos_idx].split("-")
    else:
        levels = []
    levels = (levels + ["*"] * 4)[:4]
    fields[pos_idx : pos_idx + 1] = levels
    rec = FeatureRecord(tuple(None if f in ("", "*") else f for f in fields), schema)
    return render_feature(rec, absent="*")


def compile_dictionary(
    lexicon,
    matrix: ConnectionMatrix,
    chars: CharCategoryTable,
    unk: UnknownTemplates,
    schema: FeatureSchema,
    meta: DictionaryMeta,
    lexicon_source=None,
) -> CompiledDictionary:
    """Cross-validate sources and assemble an immutable dictionary."""
    if not lexicon:
        raise ValidationError("lexicon has no entries")
    validate_context_ids(lexicon, matrix, source=lexicon_source)
    validate_unknown_templates(unk, chars)
    for templates in unk.by_category.values():
        validate_context_ids(templates, matrix, source="unk.def")
    for c in matrix.costs:
        if not (_I16_MIN <= c <= _I16_MAX):
            raise ValidationError(f"connection cost {c} outside 16-bit range")
    for idx, e in enumerate(lexicon):
        if not (_I16_MIN <= e.word_cost <= _I16_MAX):
            raise ValidationError(
                f"{lexicon_source or 'lexicon'}:line {idx + 1}: "
                f"word cost {e.word_cost} outside 16-bit range"
            )

    normalized = [
        LexiconEntry(
            e.surface, e.left_id, e.right_id, e.word_cost, _normalize_features(e, schema)
        )
        for e in lexicon
    ]
    if schema.pos_joined_in_source:
        schema = FeatureSchema(
            schema.name, schema.field_names, dict(schema.named_roles), False
        )

    # sort by surface bytes, stable on source order; then group homographs
    order = sorted(range(len(normalized)), key=lambda i: (normalized[i].surface.encode("utf-8"), i))
    entries = tuple(normalized[i] for i in order)
    keys = []
    values = []
    for eid, e in enumerate(entries):
        kb = e.surface.encode("utf-8")
        if keys and keys[-1] == kb:
            values[-1].append(eid)
        else:
            keys.append(kb)
            values.append([eid])
    trie = build_trie(keys, values)

    meta = DictionaryMeta(
        dictionary_name=meta.dictionary_name,
        dictionary_version=meta.dictionary_version,
        entry_count=len(entries),
        format_version=FORMAT_VERSION,
        source_note=meta.source_note,
        default_template=meta.default_template,
    )
    return CompiledDictionary(trie, entries, matrix, chars, unk, schema, meta)


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------


def _pack_str(s: str) -> bytes:
    b = s.encode("utf-8")
    return struct.pack("<I", len(b)) + b


class _Reader:
    def __init__(self, data: bytes, section: str):
        self.data = data
        self.pos = 0
        self.section = section

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise DictionaryFormatError(
                f"dictionary section {self.section!r} is truncated"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def i32(self) -> int:
        return struct.unpack("<i", self.take(4))[0]

    def u8(self) -> int:
        return self.take(1)[0]

    def string(self) -> str:
        return self.take(self.u32()).decode("utf-8")


def _save_meta(meta: DictionaryMeta) -> bytes:
    lines = [
        f"dictionary_name={meta.dictionary_name}",
        f"dictionary_version={meta.dictionary_version}",
        f"entry_count={meta.entry_count}",
        f"format_version={meta.format_version}",
        f"source_note={meta.source_note}",
        f"default_template={meta.default_template}",
    ]
    return "\n".join(lines).encode("utf-8")


def _load_meta(data: bytes) -> DictionaryMeta:
    kv = {}
    for line in data.decode("utf-8").split("\n"):
        if "=" in line:
            k, v = line.split("=", 1)
            kv[k] = v
    try:
        return DictionaryMeta(
            dictionary_name=kv["dictionary_name"],
            dictionary_version=kv["dictionary_version"],
            entry_count=int(kv["entry_count"]),
            format_version=int(kv["format_version"]),
            source_note=kv.get("source_note", ""),
            default_template=kv.get("default_template", ""),
        )
    except (KeyError, ValueError) as exc:
        raise DictionaryFormatError(f"dictionary section 'meta' is malformed: {exc}")


def _save_trie(trie: DoubleArrayTrie) -> bytes:
    parts = [struct.pack("<I", len(trie.base))]
    parts.append(struct.pack(f"<{len(trie.base)}i", *trie.base))
    parts.append(struct.pack(f"<{len(trie.check)}i", *trie.check))
    parts.append(struct.pack("<I", len(trie.values)))
    for ids in trie.values:
        parts.append(struct.pack("<I", len(ids)))
        parts.append(struct.pack(f"<{len(ids)}I", *ids))
    return b"".join(parts)


def _load_trie(data: bytes) -> DoubleArrayTrie:
    r = _Reader(data, "trie")
    n = r.u32()
    base = list(struct.unpack(f"<{n}i", r.take(4 * n)))
    check = list(struct.unpack(f"<{n}i", r.take(4 * n)))
    nvals = r.u32()
    values = []
    for _ in range(nvals):
        m = r.u32()
        values.append(tuple(struct.unpack(f"<{m}I", r.take(4 * m))))
    return DoubleArrayTrie(base, check, tuple(values))


def _save_entries(entries) -> bytes:
    pool = bytearray()
    offsets = []
    for e in entries:
        sb = e.surface.encode("utf-8")
        fb = e.feature_csv.encode("utf-8")
        offsets.append((len(pool), len(sb), len(pool) + len(sb), len(fb)))
        pool += sb + fb
    parts = [struct.pack("<I", len(entries))]
    for e, (so, sl, fo, fl) in zip(entries, offsets):
        parts.append(
            struct.pack("<IIIIhhh", so, sl, fo, fl, e.left_id, e.right_id, e.word_cost)
        )
    parts.append(struct.pack("<I", len(pool)))
    parts.append(bytes(pool))
    return b"".join(parts)


def _load_entries(data: bytes):
    r = _Reader(data, "entries")
    n = r.u32()
    recs = [struct.unpack("<IIIIhhh", r.take(22)) for _ in range(n)]
    pool = r.take(r.u32())
    entries = []
    for so, sl, fo, fl, left, right, cost in recs:
        entries.append(
            LexiconEntry(
                pool[so : so + sl].decode("utf-8"),
                left,
                right,
                cost,
                pool[fo : fo + fl].decode("utf-8"),
            )
        )
    return tuple(entries)


def _save_matrix(m: ConnectionMatrix) -> bytes:
    return (
        struct.pack("<II", m.right_size, m.left_size)
        + struct.pack(f"<{len(m.costs)}h", *m.costs)
    )


def _load_matrix(data: bytes) -> ConnectionMatrix:
    r = _Reader(data, "matrix")
    right, left = r.u32(), r.u32()
    n = right * left
    costs = struct.unpack(f"<{n}h", r.take(2 * n))
    return ConnectionMatrix(right, left, tuple(costs))


def _save_chars(t: CharCategoryTable) -> bytes:
    parts = [struct.pack("<I", len(t.categories))]
    for c in t.categories:
        parts.append(_pack_str(c.name))
        parts.append(struct.pack("<BBB", int(c.invoke), int(c.group), c.length))
    parts.append(struct.pack("<I", t.default_index))
    items = sorted(t.mapping.items())
    parts.append(struct.pack("<I", len(items)))
    for cp, (default, compat) in items:
        cl = sorted(compat)
        parts.append(struct.pack("<IHB", cp, default, len(cl)))
        parts.append(struct.pack(f"<{len(cl)}H", *cl))
    return b"".join(parts)


def _load_chars(data: bytes) -> CharCategoryTable:
    r = _Reader(data, "chars")
    ncat = r.u32()
    cats = []
    for _ in range(ncat):
        name = r.string()
        invoke, group, length = struct.unpack("<BBB", r.take(3))
        cats.append(CharCategory(name, bool(invoke), bool(group), length))
    default_index = r.u32()
    nmap = r.u32()
    mapping = {}
    for _ in range(nmap):
        cp, default, ncomp = struct.unpack("<IHB", r.take(7))
        compat = frozenset(struct.unpack(f"<{ncomp}H", r.take(2 * ncomp)))
        mapping[cp] = (default, compat)
    return CharCategoryTable(tuple(cats), mapping, default_index)


def _save_unk(unk: UnknownTemplates) -> bytes:
    parts = [struct.pack("<I", len(unk.by_category))]
    for name in sorted(unk.by_category):
        parts.append(_pack_str(name))
        templates = unk.by_category[name]
        parts.append(struct.pack("<I", len(templates)))
        for t in templates:
            parts.append(struct.pack("<hhh", t.left_id, t.right_id, t.word_cost))
            parts.append(_pack_str(t.feature_csv))
    return b"".join(parts)


def _load_unk(data: bytes) -> UnknownTemplates:
    r = _Reader(data, "unk")
    ncat = r.u32()
    by_category = {}
    for _ in range(ncat):
        name = r.string()
        n = r.u32()
        templates = []
        for _ in range(n):
            left, right, cost = struct.unpack("<hhh", r.take(6))
            feature = r.string()
            templates.append(LexiconEntry(name, left, right, cost, feature))
        by_category[name] = tuple(templates)
    return UnknownTemplates(by_category)


def _save_schema(s: FeatureSchema) -> bytes:
    parts = [_pack_str(s.name), struct.pack("<B", int(s.pos_joined_in_source))]
    parts.append(struct.pack("<I", len(s.field_names)))
    for f in s.field_names:
        parts.append(_pack_str(f))
    roles = sorted(s.named_roles.items())
    parts.append(struct.pack("<I", len(roles)))
    for role, idx in roles:
        parts.append(_pack_str(role))
        parts.append(struct.pack("<I", idx))
    return b"".join(parts)


def _load_schema(data: bytes) -> FeatureSchema:
    r = _Reader(data, "schema")
    name = r.string()
    pos_joined = bool(r.u8())
    nfields = r.u32()
    field_names = tuple(r.string() for _ in range(nfields))
    nroles = r.u32()
    roles = {}
    for _ in range(nroles):
        role = r.string()
        roles[role] = r.u32()
    return FeatureSchema(name, field_names, roles, pos_joined)


def save(dictionary: CompiledDictionary) -> bytes:
    """Serialize a compiled dictionary; deterministic for identical inputs."""
    sections = {
        "meta": _save_meta(dictionary.meta),
        "trie": _save_trie(dictionary.trie),
        "entries": _save_entries(dictionary.entries),
        "matrix": _save_matrix(dictionary.matrix),
        "chars": _save_chars(dictionary.chars),
        "unk": _save_unk(dictionary.unk),
        "schema": _save_schema(dictionary.schema),
    }
    parts = [MAGIC, struct.pack("<I", FORMAT_VERSION)]
    for name in _SECTION_ORDER:
        payload = sections[name]
        parts.append(struct.pack("<I", len(payload)))
        parts.append(payload)
    return b"".join(parts)


def load(data: bytes) -> CompiledDictionary:
    """Parse dictionary bytes produced by save()."""
    if len(data) < 8 or data[:4] != MAGIC:
        raise DictionaryFormatError("not a dictionary file (bad magic)")
    version = struct.unpack("<I", data[4:8])[0]
    if version != FORMAT_VERSION:
        raise DictionaryFormatError(
            f"dictionary format version {version} is not supported "
            f"(expected {FORMAT_VERSION}); rebuild the dictionary with "
            f"`kotowari build-dict`"
        )
    pos = 8
    payloads = {}
    for name in _SECTION_ORDER:
        if pos + 4 > len(data):
            raise DictionaryFormatError(f"dictionary section {name!r} is truncated")
        (length,) = struct.unpack("<I", data[pos : pos + 4])
        pos += 4
        if pos + length > len(data):
            raise DictionaryFormatError(f"dictionary section {name!r} is truncated")
        payloads[name] = data[pos : pos + length]
        pos += length

    meta = _load_meta(payloads["meta"])
    dictionary = CompiledDictionary(
        trie=_load_trie(payloads["trie"]),
        entries=_load_entries(payloads["entries"]),
        matrix=_load_matrix(payloads["matrix"]),
        chars=_load_chars(payloads["chars"]),
        unk=_load_unk(payloads["unk"]),
        schema=_load_schema(payloads["schema"]),
        meta=meta,
    )
    if meta.entry_count != len(dictionary.entries):
        raise DictionaryFormatError(
            f"entry count mismatch: meta says {meta.entry_count}, "
            f"entry table has {len(dictionary.entries)}"
        )
    return dictionary
