"""Parsers for MeCab-convention dictionary source files.

Four file kinds are understood: the lexicon CSV, the connection cost
matrix (matrix.def), the character category table (char.def) and the
unknown word templates (unk.def).  All parsers are pure functions over
the full file text and raise :class:`SourceParseError` with a 1-based
line number on any malformed input.
"""

from dataclasses import dataclass, field

from kotowari.errors import SourceParseError, ValidationError

__all__ = [
    "LexiconEntry",
    "ConnectionMatrix",
    "CharCategory",
    "CharCategoryTable",
    "UnknownTemplates",
    "parse_lexicon",
    "render_lexicon",
    "parse_matrix",
    "parse_char_def",
    "parse_unk_def",
    "validate_context_ids",
    "validate_unknown_templates",
]


@dataclass(frozen=True, slots=True)
class LexiconEntry:
    """One dictionary word: surface form, context ids, cost and raw features."""

    surface: str
    left_id: int
    right_id: int
    word_cost: int
    feature_csv: str


@dataclass(frozen=True, slots=True)
class ConnectionMatrix:
    """Dense bigram cost table indexed by (prev.right_id, next.left_id)."""

    right_size: int
    left_size: int
    costs: tuple  # flat, row-major: costs[r * left_size + l]

    def cost(self, right_id: int, left_id: int) -> int:
        return self.costs[right_id * self.left_size + left_id]


@dataclass(frozen=True, slots=True)
class CharCategory:
    name: str
    invoke: bool
    group: bool
    length: int  # 0 = no fixed-length unknown candidates


@dataclass(frozen=True, slots=True)
class CharCategoryTable:
    """Maps every codepoint to a default category plus compatible categories."""

    categories: tuple  # of CharCategory
    mapping: dict  # codepoint -> (default index, frozenset of compatible indices)
    default_index: int  # index of the DEFAULT category

    def category_index(self, ch: str) -> int:
        entry = self.mapping.get(ord(ch))
        return entry[0] if entry is not None else self.default_index

    def belongs_to(self, ch: str, index: int) -> bool:
        """True if ch has `index` as its default or a compatible category."""
        entry = self.mapping.get(ord(ch))
        if entry is None:
            return index == self.default_index
        return index == entry[0] or index in entry[1]


@dataclass(frozen=True, slots=True)
class UnknownTemplates:
    """Unknown-word entry templates grouped by character category name."""

    by_category: dict  # category name -> tuple of LexiconEntry

    def templates_for(self, name: str):
        return self.by_category.get(name, ())


def _split_csv_head(line: str, line_no: int, source=None):
    """Split off the first four CSV fields; return them plus the raw rest.

    Quoting is RFC-4180 style (fields containing commas wrapped in double
    quotes, embedded quotes doubled).  The remainder after the fourth comma
    is returned verbatim so quoted feature fields survive untouched.
    """
    fields = []
    i = 0
    n = len(line)
    while len(fields) < 4:
        if i > n:
            raise SourceParseError(
                f"expected at least 4 comma-separated columns, got {len(fields)}",
                line=line_no,
                source=source,
            )
        if i < n and line[i] == '"':
            # quoted field
            buf = []
            i += 1
            while True:
                if i >= n:
                    raise SourceParseError(
                        "unterminated quoted field", line=line_no, source=source
                    )
                if line[i] == '"':
                    if i + 1 < n and line[i + 1] == '"':
                        buf.append('"')
                        i += 2
                        continue
                    i += 1
                    break
                buf.append(line[i])
                i += 1
            fields.append("".join(buf))
            if i < n:
                if line[i] != ",":
                    raise SourceParseError(
                        "expected comma after quoted field",
                        line=line_no,
                        source=source,
                    )
                i += 1
            elif len(fields) < 4:
                raise SourceParseError(
                    f"expected at least 4 comma-separated columns, got {len(fields)}",
                    line=line_no,
                    source=source,
                )
        else:
            j = line.find(",", i)
            if j == -1:
                fields.append(line[i:])
                i = n + 1
                if len(fields) < 4:
                    raise SourceParseError(
                        f"expected at least 4 comma-separated columns, got {len(fields)}",
                        line=line_no,
                        source=source,
                    )
            else:
                fields.append(line[i:j])
                i = j + 1
    rest = line[i:] if i <= n else ""
    return fields, rest


def _parse_entry_line(line: str, line_no: int, source=None) -> LexiconEntry:
    (surface, left_s, right_s, cost_s), feature_csv = _split_csv_head(
        line, line_no, source
    )
    if not surface:
        raise SourceParseError("empty surface", line=line_no, source=source)
    try:
        left_id = int(left_s)
        right_id = int(right_s)
        word_cost = int(cost_s)
    except ValueError:
        raise SourceParseError(
            f"non-integer id or cost in {left_s!r},{right_s!r},{cost_s!r}",
            line=line_no,
            source=source,
        ) from None
    if left_id < 0 or right_id < 0:
        raise SourceParseError("negative context id", line=line_no, source=source)
    return LexiconEntry(surface, left_id, right_id, word_cost, feature_csv)


def _data_lines(text: str):
    """Yield (line_no, line) for every line; CSV files treat all lines as data.

    A trailing newline does not produce a final empty record.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for idx, raw in enumerate(lines, start=1):
        yield idx, raw.rstrip("\r")


def parse_lexicon(text: str, source=None):
    """Parse lexicon CSV text into a list of entries, in file order."""
    entries = []
    for line_no, line in _data_lines(text):
        entries.append(_parse_entry_line(line, line_no, source))
    return entries


def _render_field(value: str) -> str:
    if "," in value or '"' in value:
        return '"' + value.replace('"', '""') + '"'
    return value


def render_lexicon(entries) -> str:
    """Inverse of parse_lexicon; feature_csv is emitted verbatim."""
    lines = []
    for e in entries:
        head = ",".join(
            [_render_field(e.surface), str(e.left_id), str(e.right_id), str(e.word_cost)]
        )
        lines.append(head + "," + e.feature_csv if e.feature_csv else head)
    return "\n".join(lines) + ("\n" if lines else "")


def parse_matrix(text: str, source=None) -> ConnectionMatrix:
    """Parse matrix.def: a size header then one `r l cost` line per cell."""
    lines = list(_data_lines(text))
    if not lines:
        raise SourceParseError("empty matrix file", line=1, source=source)
    header = lines[0][1].split()
    if len(header) != 2:
        raise SourceParseError(
            f"malformed matrix header {lines[0][1]!r}", line=1, source=source
        )
    try:
        right_size, left_size = int(header[0]), int(header[1])
    except ValueError:
        raise SourceParseError(
            f"malformed matrix header {lines[0][1]!r}", line=1, source=source
        ) from None
    if right_size <= 0 or left_size <= 0:
        raise SourceParseError("matrix sizes must be positive", line=1, source=source)

    costs = [None] * (right_size * left_size)
    seen = 0
    for line_no, line in lines[1:]:
        parts = line.split()
        if len(parts) != 3:
            raise SourceParseError(
                f"malformed matrix cell {line!r}", line=line_no, source=source
            )
        try:
            r, l, cost = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise SourceParseError(
                f"malformed matrix cell {line!r}", line=line_no, source=source
            ) from None
        if not (0 <= r < right_size and 0 <= l < left_size):
            raise SourceParseError(
                f"matrix cell ({r},{l}) out of range {right_size}x{left_size}",
                line=line_no,
                source=source,
            )
        idx = r * left_size + l
        if costs[idx] is not None:
            raise SourceParseError(
                f"duplicate matrix cell ({r},{l})", line=line_no, source=source
            )
        costs[idx] = cost
        seen += 1
    if seen != right_size * left_size:
        raise SourceParseError(
            f"matrix cell count mismatch: expected {right_size * left_size}, got {seen}",
            source=source,
        )
    return ConnectionMatrix(right_size, left_size, tuple(costs))


def parse_char_def(text: str, source=None) -> CharCategoryTable:
    """Parse char.def: category declarations followed by codepoint mappings.

    `#` starts a comment; blank lines are permitted.  The first mapped name
    per codepoint is its default category, the rest are compatible.
    """
    categories = []
    index_by_name = {}
    mapping = {}

    for line_no, raw in _data_lines(text):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0].startswith("0x"):
            # mapping line
            rng = parts[0]
            if ".." in rng:
                lo_s, hi_s = rng.split("..", 1)
            else:
                lo_s = hi_s = rng
            try:
                lo, hi = int(lo_s, 16), int(hi_s, 16)
            except ValueError:
                raise SourceParseError(
                    f"malformed codepoint {rng!r}", line=line_no, source=source
                ) from None
            if lo > hi:
                raise SourceParseError(
                    f"codepoint range start > end in {rng!r}",
                    line=line_no,
                    source=source,
                )
            names = parts[1:]
            if not names:
                raise SourceParseError(
                    "mapping line without category name", line=line_no, source=source
                )
            indices = []
            for name in names:
                if name not in index_by_name:
                    raise SourceParseError(
                        f"mapping references undeclared category {name!r}",
                        line=line_no,
                        source=source,
                    )
                indices.append(index_by_name[name])
            default = indices[0]
            compat = frozenset(indices[1:])
            for cp in range(lo, hi + 1):
                mapping[cp] = (default, compat)
        else:
            # declaration line: NAME invoke group length
            if len(parts) != 4:
                raise SourceParseError(
                    f"malformed category declaration {line!r}",
                    line=line_no,
                    source=source,
                )
            name = parts[0]
            if name in index_by_name:
                raise SourceParseError(
                    f"duplicate category {name!r}", line=line_no, source=source
                )
            try:
                invoke, group, length = int(parts[1]), int(parts[2]), int(parts[3])
            except ValueError:
                raise SourceParseError(
                    f"malformed category declaration {line!r}",
                    line=line_no,
                    source=source,
                ) from None
            if not (0 <= length <= 15):
                raise SourceParseError(
                    f"category length {length} outside 0..15",
                    line=line_no,
                    source=source,
                )
            index_by_name[name] = len(categories)
            categories.append(
                CharCategory(name, bool(invoke), bool(group), length)
            )

    if "DEFAULT" not in index_by_name:
        raise SourceParseError("no DEFAULT category declared", source=source)
    return CharCategoryTable(
        tuple(categories), mapping, index_by_name["DEFAULT"]
    )


def parse_unk_def(text: str, source=None) -> UnknownTemplates:
    """Parse unk.def: lexicon CSV whose surface column is a category name."""
    by_category = {}
    for line_no, line in _data_lines(text):
        entry = _parse_entry_line(line, line_no, source)
        by_category.setdefault(entry.surface, []).append(entry)
    return UnknownTemplates({k: tuple(v) for k, v in by_category.items()})


def validate_context_ids(entries, matrix: ConnectionMatrix, source=None):
    """Reject any entry whose context ids fall outside the matrix dimensions."""
    for idx, e in enumerate(entries):
        if e.left_id >= matrix.left_size:
            raise ValidationError(
                f"{source or 'lexicon'}:line {idx + 1}: left_id {e.left_id} "
                f">= matrix left_size {matrix.left_size} (entry {e.surface!r})"
            )
        if e.right_id >= matrix.right_size:
            raise ValidationError(
                f"{source or 'lexicon'}:line {idx + 1}: right_id {e.right_id} "
                f">= matrix right_size {matrix.right_size} (entry {e.surface!r})"
            )


def validate_unknown_templates(unk: UnknownTemplates, chars: CharCategoryTable):
    """Every character category needs at least one unknown template."""
    declared = {c.name for c in chars.categories}
    for name in unk.by_category:
        if name not in declared:
            raise ValidationError(
                f"unknown-word template references undeclared category {name!r}"
            )
    for cat in chars.categories:
        if not unk.templates_for(cat.name):
            raise ValidationError(
                f"character category {cat.name!r} has no unknown-word template"
            )
