"""Public analysis API.

Construction loads and validates a compiled dictionary (the expensive
part); the resulting Tagger is cheap to call and safe to reuse across
texts and threads.  Construction failures produce a Diagnostic with a
probable cause, debug details and documentation pointers rather than a
bare one-liner.
"""

import os
import re
from dataclasses import dataclass, replace
from pathlib import Path

from kotowari.compiler import CompiledDictionary, load
from kotowari.errors import DictionaryFormatError, KotowariError, TemplateError
from kotowari.lattice import Token, tokenize

__all__ = [
    "Diagnostic",
    "Tagger",
    "TaggerInitError",
    "new_tagger",
    "compile_template",
    "DICDIR_ENV",
    "FAQ_LINK",
]

DICDIR_ENV = "KOTOWARI_DICDIR"
FAQ_LINK = "README.md#faq"
LANGUAGE_NOTE = "Issues may be reported in any language. 日本語でも大丈夫です。"

# whitespace skipped between tokens: ASCII space and ideographic space
_SPACES = " 　"
_SEGMENT_RE = re.compile(f"[^{_SPACES}]+")


@dataclass(frozen=True, slots=True)
class Diagnostic:
    """Structured description of a tagger construction failure."""

    headline: str
    probable_cause: str
    debug_info: tuple  # of (key, value)
    faq_url: str = FAQ_LINK
    note: str = LANGUAGE_NOTE

    def render(self) -> str:
        lines = [self.headline, f"Probable cause: {self.probable_cause}"]
        for key, value in self.debug_info:
            lines.append(f"  {key}: {value}")
        lines.append(f"FAQ: {self.faq_url}")
        lines.append(self.note)
        return "\n".join(lines)


class TaggerInitError(KotowariError):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic
        super().__init__(diagnostic.render())


def _default_data_dir() -> Path:
    return Path(__file__).parent / "data"


def _candidate_paths(dictionary_path):
    if dictionary_path is not None:
        return [("explicit path", Path(dictionary_path))]
    candidates = []
    env = os.environ.get(DICDIR_ENV)
    if env:
        candidates.append((f"${DICDIR_ENV}", Path(env)))
    candidates.append(("bundled default", _default_data_dir()))
    return candidates


def _resolve_dictionary_file(path: Path):
    if path.is_file():
        return path
    if path.is_dir():
        found = sorted(path.glob("*.ktd"))
        if found:
            return found[0]
    return None


def load_dictionary(dictionary_path=None):
    """Locate and load a compiled dictionary.

    Returns a CompiledDictionary, or a Diagnostic when no usable
    dictionary can be found or read.
    """
    candidates = _candidate_paths(dictionary_path)
    searched = tuple(("searched", f"{label}: {p}") for label, p in candidates)
    chosen = None
    for _, p in candidates:
        chosen = _resolve_dictionary_file(p)
        if chosen is not None:
            break
    if chosen is None:
        return Diagnostic(
            headline="Failed to initialize the tagger: no dictionary found.",
            probable_cause="dictionary not installed or wrong path",
            debug_info=searched
            + (("hint", f"set {DICDIR_ENV} or pass an explicit dictionary path"),),
        )
    try:
        data = chosen.read_bytes()
    except OSError as exc:
        return Diagnostic(
            headline="Failed to initialize the tagger: dictionary unreadable.",
            probable_cause=f"cannot read {chosen}",
            debug_info=searched + (("os error", str(exc)),),
        )
    try:
        return load(data)
    except DictionaryFormatError as exc:
        return Diagnostic(
            headline="Failed to initialize the tagger: dictionary unusable.",
            probable_cause=str(exc),
            debug_info=searched
            + (("file", str(chosen)), ("size", f"{len(data)} bytes")),
        )


# ---------------------------------------------------------------------------
# output format templates
# ---------------------------------------------------------------------------

_ESCAPES = {"t": "\t", "n": "\n", "\\": "\\"}


def compile_template(template: str):
    """Parse a node-format template into a list of render ops.

    Directives: %m (surface), %s (0 known / 1 unknown), %f[n] (nth feature
    field, absent renders empty), %F-[i,j,...] (join fields with '-',
    skipping absent ones), plus \\t and \\n literals.  Unknown directives
    raise TemplateError so bad templates fail at construction time.
    """
    ops = []
    i = 0
    n = len(template)
    literal = []

    def flush():
        if literal:
            text = "".join(literal)
            ops.append(lambda tok, text=text: text)
            literal.clear()

    while i < n:
        c = template[i]
        if c == "\\":
            if i + 1 >= n or template[i + 1] not in _ESCAPES:
                raise TemplateError(f"bad escape at position {i} in {template!r}")
            literal.append(_ESCAPES[template[i + 1]])
            i += 2
        elif c == "%":
            if i + 1 >= n:
                raise TemplateError(f"dangling % at end of {template!r}")
            d = template[i + 1]
            if d == "m":
                flush()
                ops.append(lambda tok: tok.surface)
                i += 2
            elif d == "s":
                flush()
                ops.append(lambda tok: "1" if tok.is_unknown else "0")
                i += 2
            elif d == "f":
                m = re.match(r"%f\[(\d+)\]", template[i:])
                if not m:
                    raise TemplateError(f"malformed %f directive in {template!r}")
                idx = int(m.group(1))
                flush()
                ops.append(lambda tok, idx=idx: tok.feature.get(idx) or "")
                i += m.end()
            elif d == "F":
                m = re.match(r"%F-\[(\d+(?:,\d+)*)\]", template[i:])
                if not m:
                    raise TemplateError(f"malformed %F directive in {template!r}")
                idxs = [int(x) for x in m.group(1).split(",")]
                flush()
                ops.append(
                    lambda tok, idxs=idxs: "-".join(
                        v for v in (tok.feature.get(j) for j in idxs) if v is not None
                    )
                )
                i += m.end()
            else:
                raise TemplateError(f"unknown directive %{d} in {template!r}")
        else:
            literal.append(c)
            i += 1
    flush()
    return ops


def render_template(ops, token: Token) -> str:
    return "".join(op(token) for op in ops)


class Tagger:
    """Morphological analyzer over one loaded dictionary.

    Expensive to construct, cheap to call; all per-call state is local,
    so one instance may serve concurrent callers.
    """

    def __init__(self, dictionary_path=None, *, format_template=None, emit_eos=True):
        result = load_dictionary(dictionary_path)
        if isinstance(result, Diagnostic):
            raise TaggerInitError(result)
        self._init_from(result, format_template, emit_eos)

    @classmethod
    def _from_dictionary(cls, dictionary, format_template=None, emit_eos=True):
        self = cls.__new__(cls)
        self._init_from(dictionary, format_template, emit_eos)
        return self

    def _init_from(self, dictionary, format_template, emit_eos):
        self.dictionary: CompiledDictionary = dictionary
        self.emit_eos = emit_eos
        self.format_template = format_template
        self._template_ops = (
            compile_template(format_template) if format_template is not None else None
        )

    # -- analysis ----------------------------------------------------------

    def tag(self, text: str) -> list:
        """Tokens for every line of text, in order, as a plain list.

        Each input line is one analysis unit.  ASCII and ideographic
        spaces separate tokens and never appear inside a surface; token
        spans are character offsets within their line.
        """
        tokens = []
        for line in text.split("\n"):
            tokens.extend(self.tag_line(line))
        return tokens

    __call__ = tag

    def tag_line(self, line: str) -> list:
        tokens = []
        for m in _SEGMENT_RE.finditer(line):
            offset = m.start()
            for tok in tokenize(self.dictionary, m.group()):
                if offset:
                    tok = replace(tok, start=tok.start + offset, end=tok.end + offset)
                tokens.append(tok)
        return tokens

    def wakati(self, text: str) -> str:
        """Surfaces joined by single spaces, one output line per input line."""
        return "\n".join(
            " ".join(t.surface for t in self.tag_line(line))
            for line in text.split("\n")
        )

    def format_token(self, token: Token, template=None) -> str:
        ops = self._template_ops
        if template is not None:
            ops = compile_template(template)
        if ops is None:
            raise TemplateError("no format template configured")
        return render_template(ops, token)


def new_tagger(dictionary_path=None, *, format_template=None, emit_eos=True):
    """Build a Tagger, or return a Diagnostic describing why it failed."""
    result = load_dictionary(dictionary_path)
    if isinstance(result, Diagnostic):
        return result
    try:
        return Tagger._from_dictionary(result, format_template, emit_eos)
    except TemplateError as exc:
        return Diagnostic(
            headline="Failed to initialize the tagger: bad format template.",
            probable_cause=str(exc),
            debug_info=(("template", repr(format_template)),),
        )
