"""Structured access to per-token feature fields.

Dictionary entries carry their features as raw CSV text.  This module
parses that text into a FeatureRecord whose fields can be addressed by
position or, through the dictionary's FeatureSchema, by role name
(lemma, pos1, pron, ...).
"""

from dataclasses import dataclass, field

from kotowari.errors import SchemaError, SourceParseError

__all__ = [
    "FeatureSchema",
    "FeatureRecord",
    "parse_feature",
    "render_feature",
    "get_role",
    "KNOWN_ROLES",
]

KNOWN_ROLES = (
    "pos1",
    "pos2",
    "pos3",
    "pos4",
    "cType",
    "cForm",
    "lemma",
    "reading",
    "pron",
    "accent",
)


@dataclass(frozen=True, slots=True)
class FeatureSchema:
    """Names and role mapping for a dictionary's feature columns.

    pos_joined_in_source marks source CSVs whose part-of-speech levels
    arrive as one hyphen-joined column; the compiler normalizes those to
    four separate fields, so compiled dictionaries always store POS split.
    """

    name: str
    field_names: tuple
    named_roles: dict  # role name -> field index
    pos_joined_in_source: bool = False

    def __post_init__(self):
        if not self.field_names:
            raise SchemaError(f"schema {self.name!r} has no fields")
        for role, idx in self.named_roles.items():
            if not (0 <= idx < len(self.field_names)):
                raise SchemaError(
                    f"schema {self.name!r}: role {role!r} maps to field {idx}, "
                    f"but only {len(self.field_names)} fields exist"
                )

    def role_index(self, role: str) -> int:
        try:
            return self.named_roles[role]
        except KeyError:
            raise SchemaError(
                f"role {role!r} is not defined by schema {self.name!r} "
                f"(available: {', '.join(sorted(self.named_roles))})"
            ) from None


@dataclass(frozen=True, slots=True)
class FeatureRecord:
    """Ordered feature fields; absent fields are None, never an error."""

    fields: tuple  # of Optional[str]
    schema: FeatureSchema

    def get(self, index: int):
        if 0 <= index < len(self.fields):
            return self.fields[index]
        return None


def _split_csv(text: str):
    """Comma-split honoring doubled-quote quoting."""
    if '"' not in text:
        return text.split(",")
    fields = []
    buf = []
    i = 0
    n = len(text)
    while True:
        if i < n and text[i] == '"':
            i += 1
            while True:
                if i >= n:
                    raise SourceParseError("unterminated quote in feature text")
                if text[i] == '"':
                    if i + 1 < n and text[i + 1] == '"':
                        buf.append('"')
                        i += 2
                        continue
                    i += 1
                    break
                buf.append(text[i])
                i += 1
        elif i < n and text[i] != ",":
            buf.append(text[i])
            i += 1
            continue
        fields.append("".join(buf))
        buf = []
        if i >= n:
            break
        if text[i] == ",":
            i += 1
            if i == n:
                fields.append("")
                break
        else:
            raise SourceParseError("expected comma after quoted feature field")
    return fields


def parse_feature(feature_csv: str, schema: FeatureSchema) -> FeatureRecord:
    """Parse raw feature CSV; `*` and empty both normalize to absent."""
    if feature_csv == "":
        return FeatureRecord((), schema)
    raw = _split_csv(feature_csv)
    fields = tuple(None if f in ("", "*") else f for f in raw)
    return FeatureRecord(fields, schema)


def render_feature(record: FeatureRecord, absent: str = "") -> str:
    """Render a record back to CSV, re-quoting fields that need it."""
    out = []
    for f in record.fields:
        if f is None:
            out.append(absent)
        elif "," in f or '"' in f:
            out.append('"' + f.replace('"', '""') + '"')
        else:
            out.append(f)
    return ",".join(out)


def get_role(record: FeatureRecord, role: str):
    """Value of the schema role for this record, or None when absent."""
    return record.get(record.schema.role_index(role))
