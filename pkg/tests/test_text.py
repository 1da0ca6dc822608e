import pytest
from hypothesis import given
from hypothesis import strategies as st

from adaptkit.text import (CorpusError, NormalizationDecodeError, NormalizationRules, SentencePair,
                           default_rules, format_pharaoh, length_filter, normalize, parse_pharaoh,
                           read_parallel, tokenize, write_parallel)

arabic_latin = st.text(
    alphabet=st.sampled_from(
        [chr(c) for c in range(0x0620, 0x0660)] + list("أإآٱىةـ٠١٢٣٤٥٦٧٨٩") + list("abcXYZ019 .,!?%'-\t")
    ),
    max_size=60,
)


def test_normalize_examples():
    assert normalize("أإآ") == "ااا"
    assert normalize("كِتَاب") == "كتاب"
    assert normalize("abc") == "abc"


def test_normalize_rule_table_contents():
    assert normalize("ى") == "ي"
    assert normalize("ة") == "ه"
    assert normalize("ٱ") == "ا"
    assert normalize("ؤئ") == "ؤئ"
    assert normalize("كـتـاب") == "كتاب"
    assert normalize("٠١٢٣٤٥٦٧٨٩") == "0123456789"


@given(arabic_latin)
def test_normalize_idempotent(text):
    once = normalize(text)
    assert normalize(once) == once


@given(arabic_latin)
def test_normalize_output_has_no_ruled_code_points(text):
    rules = default_rules()
    out = normalize(text)
    assert not set(out) & (set(rules.substitutions) | rules.strip)


def test_normalize_bytes_decode_error_names_offset():
    with pytest.raises(NormalizationDecodeError) as err:
        normalize(b"ab\xffcd")
    assert err.value.offset == 2
    assert "offset 2" in str(err.value)


def test_rules_reject_non_idempotent_table():
    with pytest.raises(ValueError):
        NormalizationRules({"a": "b", "b": "c"})


def test_rules_from_tsv():
    rules = NormalizationRules.from_tsv(["# comment", "0061\tb", "0063\tDELETE", ""])
    assert normalize("abcabc", rules) == "bbbb"


def test_tokenize_examples():
    assert tokenize("Hello, world!") == ["Hello", ",", "world", "!"]
    assert tokenize("a b") == ["a", "b"]
    assert tokenize("3.75%") == ["3.75", "%"]
    assert tokenize("") == []
    assert tokenize("don't stop.") == ["don't", "stop", "."]


@given(arabic_latin)
def test_tokenize_stable(text):
    toks = tokenize(normalize(text))
    assert tokenize(" ".join(toks)) == toks
    assert all(t and not any(c.isspace() for c in t) for t in toks)


def _pair(n_src, n_tgt):
    return SentencePair(["s"] * n_src, ["t"] * n_tgt)


def test_length_filter_boundary():
    kept = list(length_filter([_pair(81, 10), _pair(80, 80), _pair(5, 81)], 80))
    assert kept == [_pair(80, 80)]
    assert list(length_filter([], 80)) == []
    with pytest.raises(ValueError):
        list(length_filter([], 0))


@given(st.lists(st.tuples(st.integers(1, 12), st.integers(1, 12)), max_size=30), st.integers(1, 12))
def test_length_filter_keeps_order_and_pairs(lengths, max_len):
    pairs = [_pair(a, b) for a, b in lengths]
    kept = list(length_filter(pairs, max_len))
    expected = [p for p in pairs if len(p.source) <= max_len and len(p.target) <= max_len]
    assert kept == expected


def test_sentence_pair_invariants():
    with pytest.raises(CorpusError):
        SentencePair(["a"], ["b"], {(1, 0)})
    with pytest.raises(CorpusError):
        SentencePair(["a b"], ["c"])
    with pytest.raises(CorpusError):
        SentencePair([""], ["c"])


def test_pharaoh_roundtrip():
    links = parse_pharaoh("0-1 2-0 1-1")
    assert links == {(0, 1), (2, 0), (1, 1)}
    assert format_pharaoh(links) == "0-1 1-1 2-0"
    assert parse_pharaoh("") == frozenset()


def test_parallel_io_roundtrip(tmp_path):
    pairs = [SentencePair(["a", "b"], ["x"], {(1, 0)}), SentencePair(["c"], ["y", "z"], set())]
    paths = [tmp_path / n for n in ("c.ar", "c.en", "c.align")]
    write_parallel(pairs, *paths)
    assert list(read_parallel(*paths)) == pairs


def test_parallel_io_length_mismatch(tmp_path):
    (tmp_path / "a").write_text("x\ny\n", encoding="utf-8")
    (tmp_path / "b").write_text("x\n", encoding="utf-8")
    with pytest.raises(CorpusError):
        list(read_parallel(tmp_path / "a", tmp_path / "b"))
