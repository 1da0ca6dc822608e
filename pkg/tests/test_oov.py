import logging
from collections import Counter

from hypothesis import given
from hypothesis import strategies as st

from adaptkit.oov import TranslitTable, drop_oov, find_oov, transliterate_oov

tokens = st.lists(st.lists(st.sampled_from(["a", "b", "c", "كتاب", "محمد", "x"]), max_size=8), max_size=10)
VOCAB = {"a", "b"}


def test_find_oov_examples():
    assert find_oov([["a", "c", "b", "c"]], VOCAB) == Counter({"c": 2})
    assert find_oov([["a", "b"]], VOCAB) == Counter()


@given(tokens)
def test_find_oov_matches_recount(text):
    recount = Counter()
    for line in text:
        for tok in line:
            if tok not in VOCAB:
                recount[tok] += 1
    assert find_oov(text, VOCAB) == recount


def test_drop_oov_examples():
    assert drop_oov([["a", "c", "b"]], VOCAB) == [["a", "b"]]
    assert drop_oov([["c", "c"]], VOCAB) == [[]]
    assert drop_oov([["a", "b"]], VOCAB) == [["a", "b"]]


@given(tokens)
def test_drop_keeps_in_vocab_subsequence(text):
    out = drop_oov(text, VOCAB)
    assert len(out) == len(text)
    assert out == [[t for t in line if t in VOCAB] for line in text]


def test_transliteration_examples():
    table = TranslitTable.default()
    assert transliterate_oov([["كتاب", "محمد"]], VOCAB, table) == [["ktAb", "mHmd"]]
    assert transliterate_oov([["كتاب"]], {"كتاب"}, table) == [["كتاب"]]


def test_default_table_entries():
    table = TranslitTable.default().table
    expected = {"ا": "A", "ب": "b", "ت": "t", "ث": "v", "ج": "j", "ح": "H", "خ": "x", "د": "d",
                "ذ": "*", "ر": "r", "ز": "z", "س": "s", "ش": "$", "ص": "S", "ض": "D", "ط": "T",
                "ظ": "Z", "ع": "E", "غ": "g", "ف": "f", "ق": "q", "ك": "k", "ل": "l", "م": "m",
                "ن": "n", "ه": "h", "و": "w", "ي": "y", "ء": "'", "ة": "p", "ى": "Y"}
    for ch, latin in expected.items():
        assert table[ch] == latin


@given(st.lists(st.lists(st.text(alphabet="كتابمحدءةىabc", min_size=1, max_size=6), max_size=5), max_size=5))
def test_transliterated_output_has_no_table_characters(text):
    table = TranslitTable.default()
    out = transliterate_oov(text, set(), table)
    assert not any(ch in table.table for line in out for tok in line for ch in tok)


def test_passthrough_is_counted_and_warned(caplog):
    table = TranslitTable({"ك": "k"})
    with caplog.at_level(logging.WARNING):
        out = transliterate_oov([["كz"]], set(), table)
    assert out == [["kz"]]
    assert table.passthrough["z"] == 1
    assert "no transliteration entry" in caplog.text


@given(tokens)
def test_strategies_act_on_same_tokens(text):
    dropped = drop_oov(text, VOCAB)
    translit = transliterate_oov(text, VOCAB, TranslitTable.default())
    oov = find_oov(text, VOCAB)
    removed = Counter(t for line in text for t in line) - Counter(t for line in dropped for t in line)
    changed = Counter(a for line, tl in zip(text, translit) for a, b in zip(line, tl) if a not in VOCAB)
    assert removed == oov == changed
