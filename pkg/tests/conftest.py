import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kotowari.compiler import DictionaryMeta, compile_dictionary
from kotowari.features import FeatureSchema
from kotowari.source import (
    parse_char_def,
    parse_lexicon,
    parse_matrix,
    parse_unk_def,
)

TOYDIC_DIR = Path(__file__).parent.parent / "src" / "kotowari" / "data" / "toydic"
TOY_KTD = Path(__file__).parent.parent / "src" / "kotowari" / "data" / "toy.ktd"
DATA_DIR = Path(__file__).parent / "data"

SAMPLE_SENTENCE = "麩菓子は、麩を主材料とした日本の菓子。"
SAMPLE_SURFACES = "麩 菓子 は 、 麩 を 主材 料 と し た 日本 の 菓子 。".split()
LEMMA_SENTENCE = "麩を用いた菓子は江戸時代からすでに存在していた。"


def build_toy_dictionary():
    lexicon = parse_lexicon((TOYDIC_DIR / "lexicon.csv").read_text(encoding="utf-8"))
    matrix = parse_matrix((TOYDIC_DIR / "matrix.def").read_text(encoding="utf-8"))
    chars = parse_char_def((TOYDIC_DIR / "char.def").read_text(encoding="utf-8"))
    unk = parse_unk_def((TOYDIC_DIR / "unk.def").read_text(encoding="utf-8"))
    manifest = json.loads((TOYDIC_DIR / "schema.json").read_text(encoding="utf-8"))
    schema = FeatureSchema(
        manifest["name"],
        tuple(manifest["fields"]),
        dict(manifest["roles"]),
        bool(manifest.get("pos_joined", False)),
    )
    meta = DictionaryMeta(
        dictionary_name=manifest["dictionary_name"],
        dictionary_version=manifest["dictionary_version"],
        entry_count=0,
        source_note=manifest.get("source_note", ""),
        default_template=manifest.get("default_template", ""),
    )
    return compile_dictionary(lexicon, matrix, chars, unk, schema, meta)


@pytest.fixture(scope="session")
def toy_dic():
    return build_toy_dictionary()
