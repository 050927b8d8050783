"""kotowari: a self-contained MeCab-style Japanese morphological analyzer.

Dictionary-driven lattice tokenization over a double-array trie with
Viterbi minimum-cost decoding, a dictionary compiler, structured feature
access, a command-line front end and a benchmark harness.
"""

from kotowari.compiler import (
    CompiledDictionary,
    DictionaryMeta,
    compile_dictionary,
    load,
    save,
)
from kotowari.errors import (
    DictionaryFormatError,
    KotowariError,
    SchemaError,
    SourceParseError,
    TemplateError,
    ValidationError,
)
from kotowari.features import FeatureRecord, FeatureSchema, get_role, parse_feature
from kotowari.lattice import Token, tokenize
from kotowari.source import (
    CharCategoryTable,
    ConnectionMatrix,
    LexiconEntry,
    UnknownTemplates,
    parse_char_def,
    parse_lexicon,
    parse_matrix,
    parse_unk_def,
)
from kotowari.tagger import Diagnostic, Tagger, TaggerInitError, new_tagger

__version__ = "0.1.0"

__all__ = [
    "CompiledDictionary",
    "DictionaryMeta",
    "compile_dictionary",
    "load",
    "save",
    "KotowariError",
    "SourceParseError",
    "ValidationError",
    "DictionaryFormatError",
    "SchemaError",
    "TemplateError",
    "FeatureRecord",
    "FeatureSchema",
    "parse_feature",
    "get_role",
    "Token",
    "tokenize",
    "LexiconEntry",
    "ConnectionMatrix",
    "CharCategoryTable",
    "UnknownTemplates",
    "parse_lexicon",
    "parse_matrix",
    "parse_char_def",
    "parse_unk_def",
    "Diagnostic",
    "Tagger",
    "TaggerInitError",
    "new_tagger",
    "__version__",
]
