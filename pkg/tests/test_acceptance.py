"""Acceptance suite: one test per release criterion.

Run with `pytest tests/test_acceptance.py -s` to see one PASS line per
criterion.
"""

import random
import time

import pytest

from kotowari.cli import main as cli_main
from kotowari.compiler import load, save
from kotowari.features import get_role
from kotowari.lattice import build_lattice, tokenize, viterbi
from kotowari.tagger import Diagnostic, Tagger, new_tagger
from kotowari.trie import build_trie

from conftest import (
    DATA_DIR,
    LEMMA_SENTENCE,
    SAMPLE_SENTENCE,
    SAMPLE_SURFACES,
    TOY_KTD,
    build_toy_dictionary,
)
from oracles import best_path_by_enumeration, naive_prefix_search, path_key, random_instance
from test_cli import run_cli


def report(name):
    print(f"\nACCEPTANCE {name}: PASS")


def test_gold_segmentation(toy_dic):
    tokenize(toy_dic, SAMPLE_SENTENCE)  # warm-up
    best = min(
        _timed(lambda: tokenize(toy_dic, SAMPLE_SENTENCE)) for _ in range(5)
    )
    elapsed, tokens = best
    assert [t.surface for t in tokens] == SAMPLE_SURFACES
    assert elapsed < 0.001, f"tokenize took {elapsed * 1000:.3f} ms"
    report("gold segmentation")


def _timed(fn):
    t0 = time.perf_counter()
    result = fn()
    return time.perf_counter() - t0, result


def test_gold_lemmas(toy_dic):
    tokens = {t.surface: t for t in tokenize(toy_dic, LEMMA_SENTENCE)}
    expected = {"用い": "用いる", "し": "為る", "い": "居る", "すでに": "既に"}
    for surface, lemma in expected.items():
        assert get_role(tokens[surface].feature, "lemma") == lemma
    report("gold lemmas")


VERB_GOLD = [
    ("見た", ["見", "た"]),
    ("見ました", ["見", "まし", "た"]),
    ("見なかった", ["見", "なかっ", "た"]),
    ("受け渡した", ["受け渡し", "た"]),
    ("遊べませんでした", ["遊べ", "ませ", "ん", "でし", "た"]),
    ("赤かった", ["赤かっ", "た"]),
]


def test_gold_verb_splits(toy_dic):
    for text, expected in VERB_GOLD:
        assert [t.surface for t in tokenize(toy_dic, text)] == expected, text
    report("gold verb splits")


def test_viterbi_oracle():
    rng = random.Random(20230501)
    t0 = time.perf_counter()
    for i in range(500):
        dic, sentence = random_instance(rng)
        lattice = build_lattice(dic, sentence)
        path = viterbi(lattice, dic.matrix)
        expected = best_path_by_enumeration(lattice, dic.matrix)
        assert path == expected, f"instance {i}: {sentence!r}"
        assert lattice.eos.best_cost == path_key(expected, dic.matrix)[0]
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"oracle sweep took {elapsed:.1f} s"
    report("viterbi oracle (500 instances)")


def test_trie_oracle():
    rng = random.Random(424242)
    t0 = time.perf_counter()

    def rand_key():
        return bytes(rng.randrange(1, 256) for _ in range(rng.randint(1, 8)))

    mapping = {}
    for _ in range(2000):
        mapping.setdefault(rand_key(), ())
    keys = sorted(mapping)
    for i, k in enumerate(keys):
        mapping[k] = (i,)
    trie = build_trie(keys, [list(mapping[k]) for k in keys])

    for k in keys:
        assert trie.exact_lookup(k) == mapping[k]
    for _ in range(2000):
        probe = rand_key()
        assert trie.exact_lookup(probe) == mapping.get(probe)
    for _ in range(300):
        probe = b"".join(rng.choice(keys) for _ in range(rng.randint(1, 3)))
        for _ in range(3):
            start = rng.randrange(len(probe) + 1)
            assert trie.common_prefix_search(probe, start) == naive_prefix_search(
                mapping, probe, start
            )
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0, f"trie oracle took {elapsed:.1f} s"
    report("trie oracle (2000 keys)")


def test_coverage_fuzz():
    tagger = Tagger(TOY_KTD)
    rng = random.Random(1234321)
    pools = [
        (0x3041, 0x3096), (0x30A1, 0x30FA), (0x4E00, 0x9FFF),
        (0x30, 0x39), (0x41, 0x7A), (0x1F300, 0x1F5FF), (0x2190, 0x2BFF),
        (0xE000, 0xE0FF),  # private use: unmapped
        (0x20, 0x20), (0x3000, 0x3000),  # spaces
    ]
    for _ in range(10_000):
        text = "".join(
            chr(rng.randint(*rng.choice(pools))) for _ in range(rng.randint(0, 25))
        )
        tokens = tagger.tag_line(text)
        assert "".join(t.surface for t in tokens) == text.replace(" ", "").replace(
            "　", ""
        )
        # spans tile each non-space segment
        for t in tokens:
            assert text[t.start : t.end] == t.surface
    report("coverage fuzz (10k strings)")


def test_digit_grouping(toy_dic):
    tokens = tokenize(toy_dic, "2023年")
    assert [t.surface for t in tokens] == ["2023", "年"]
    assert tokens[0].is_unknown
    report("digit grouping")


def test_dictionary_round_trip(toy_dic):
    data1 = save(toy_dic)
    data2 = save(build_toy_dictionary())
    assert data1 == data2, "compile is not byte-deterministic"

    reloaded = load(data1)
    corpus = (
        [SAMPLE_SENTENCE, LEMMA_SENTENCE, "すもももももももものうち", "2023年"]
        + [text for text, _ in VERB_GOLD]
    ) * 5
    assert len(corpus) >= 50
    for sentence in corpus:
        before = tokenize(toy_dic, sentence)
        after = tokenize(reloaded, sentence)
        assert [(t.surface, t.feature_csv, t.is_unknown) for t in before] == [
            (t.surface, t.feature_csv, t.is_unknown) for t in after
        ]
    report("dictionary round-trip")


def test_cli_golden_files():
    golden_default = (DATA_DIR / "golden_default.txt").read_text(encoding="utf-8")
    golden_wakati = (DATA_DIR / "golden_wakati.txt").read_text(encoding="utf-8")
    code, out, _ = run_cli(["analyze", "-d", str(TOY_KTD)], SAMPLE_SENTENCE + "\n")
    assert code == 0
    assert out == golden_default
    assert out.endswith("EOS\n")
    code, out, _ = run_cli(
        ["analyze", "-d", str(TOY_KTD), "-O", "wakati"], SAMPLE_SENTENCE + "\n"
    )
    assert code == 0
    assert out == golden_wakati
    report("cli golden files")


def test_diagnostics(tmp_path):
    cases = {}
    cases["missing path"] = new_tagger(str(tmp_path / "absent.ktd"))

    data = TOY_KTD.read_bytes()
    bad_magic = tmp_path / "magic.ktd"
    bad_magic.write_bytes(b"XXXX" + data[4:])
    cases["bad magic"] = new_tagger(bad_magic)

    bad_version = tmp_path / "version.ktd"
    bad_version.write_bytes(data[:4] + bytes([250]) + data[5:])
    cases["version mismatch"] = new_tagger(bad_version)

    truncated = tmp_path / "trunc.ktd"
    truncated.write_bytes(data[: len(data) // 3])
    cases["truncation"] = new_tagger(truncated)

    for kind, result in cases.items():
        assert isinstance(result, Diagnostic), kind
        assert result.probable_cause, kind
        assert len(result.debug_info) >= 1, kind
        assert "FAQ" in result.render(), kind
    report("diagnostics")


def test_benchmark_harness(tmp_path, capsys):
    sentences = [SAMPLE_SENTENCE, LEMMA_SENTENCE, "すもももももももものうち"]
    corpus = tmp_path / "corpus.txt"
    with corpus.open("w", encoding="utf-8") as f:
        size = 0
        while size < 1_000_000:  # at least 1 MB of UTF-8
            for s in sentences:
                f.write(s + "\n")
                size += len(s.encode("utf-8")) + 1
    report_dir = tmp_path / "report"
    code = cli_main(
        ["bench", str(corpus), "-d", str(TOY_KTD), "-n", "10",
         "--report-dir", str(report_dir)]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("run ") == 10
    assert "mean:" in out
    assert "tokens:" in out  # single count: identical across runs by harness check
    assert (report_dir / "bench.tsv").exists()
    assert (report_dir / "bench.png").exists()
    throughput = next(l for l in out.splitlines() if "throughput" in l)
    # soft floor of 1M chars/sec: reported, not asserted
    print(f"\nACCEPTANCE benchmark harness: PASS ({throughput.strip()})")
