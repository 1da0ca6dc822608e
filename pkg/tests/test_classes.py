import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from adaptkit.classes import ClassMap, apply_classes, cluster_exchange, visit_order
from adaptkit.lm import train_lm

from oracles import best_two_class_partition, class_objective

corpora = st.lists(st.lists(st.sampled_from([f"w{i}" for i in range(9)]), min_size=1, max_size=10),
                   min_size=1, max_size=20)


def _vocab(corpus):
    return {w for line in corpus for w in line}


def test_k_one_single_class():
    corpus = [["a", "b", "c", "a"]]
    cmap, trace = cluster_exchange(corpus, k=1)
    assert set(cmap.word_class.values()) == {0}
    assert trace == [trace[0]]


def test_k_equals_vocab_is_identity():
    corpus = [["a", "b", "c", "a", "d"]]
    cmap, _ = cluster_exchange(corpus, k=4)
    assert sorted(cmap.word_class.values()) == [0, 1, 2, 3]


def test_k_too_large_and_invalid():
    with pytest.raises(ValueError):
        cluster_exchange([["a", "b"]], k=3)
    with pytest.raises(ValueError):
        cluster_exchange([["a", "b"]], k=0)


def test_function_word_example():
    corpus = [["a", "x", "a", "y", "a", "x", "a", "y"]] * 4
    cmap, _ = cluster_exchange(corpus, k=2)
    assert cmap["a"] != cmap["x"] == cmap["y"]
    best, _ = best_two_class_partition(corpus)
    assert class_objective(corpus, cmap.word_class) == pytest.approx(best, abs=1e-9)


def test_initialization_and_visit_order():
    from collections import Counter
    assert visit_order(Counter({"b": 2, "a": 2, "c": 5})) == ["c", "a", "b"]
    # before any move the K-1 most frequent words are singletons
    corpus = [["c", "c", "c", "a", "a", "b", "b", "d"]]
    _, trace = cluster_exchange(corpus, k=3, max_sweeps=0)
    init = {"c": 0, "a": 1, "b": 2, "d": 2}
    assert trace == [pytest.approx(class_objective(corpus, init), abs=1e-9)]


@given(corpora, st.integers(1, 4), st.integers(0, 5))
def test_trace_strictly_increasing_and_matches_oracle(corpus, k, sweeps):
    k = min(k, len(_vocab(corpus)))
    cmap, trace = cluster_exchange(corpus, k=k, max_sweeps=sweeps)
    for a, b in zip(trace, trace[1:]):
        assert b - a > 1e-12
    assert trace[-1] == pytest.approx(class_objective(corpus, cmap.word_class), abs=1e-9)
    assert set(cmap.word_class) == _vocab(corpus)
    # no empty classes
    assert set(cmap.word_class.values()) == set(range(k))


@given(corpora, st.integers(1, 4))
def test_deterministic(corpus, k):
    k = min(k, len(_vocab(corpus)))
    assert cluster_exchange(corpus, k=k) == cluster_exchange([list(l) for l in corpus], k=k)


@pytest.mark.parametrize("seed", range(10))
def test_converged_result_is_a_local_optimum(seed):
    """No single-word move to another non-emptying class improves the objective."""
    rng = random.Random(seed)
    vocab = [f"w{i}" for i in range(rng.randint(4, 15))]
    corpus = [[rng.choice(vocab) for _ in range(rng.randint(2, 9))] for _ in range(40)]
    k = 3
    cmap, trace = cluster_exchange(corpus, k=k, max_sweeps=100)
    assign = dict(cmap.word_class)
    f = class_objective(corpus, assign)
    sizes = {c: list(assign.values()).count(c) for c in range(k)}
    for w in assign:
        if sizes[assign[w]] == 1:
            continue
        for c in range(k):
            if c != assign[w]:
                assert class_objective(corpus, {**assign, w: c}) <= f + 1e-9


def test_apply_classes_and_unknown():
    cmap = ClassMap({"a": 0, "b": 1}, 2)
    assert apply_classes(cmap, [["a", "b", "zzz"]]) == [["0", "1", "2"]]
    const = ClassMap({"a": 0, "b": 0}, 1)
    assert apply_classes(const, [["a", "b", "a"]]) == [["0", "0", "0"]]
    ident = ClassMap({"a": 0, "b": 1, "c": 2}, 3)
    line = ["a", "b", "c", "a"]
    mapped = apply_classes(ident, [line])[0]
    assert len(set(mapped)) == len(set(line))


def test_class_lm_vocabulary_bounded():
    rng = random.Random(1)
    corpus = [[f"w{rng.randint(0, 20)}" for _ in range(8)] for _ in range(50)]
    cmap, _ = cluster_exchange(corpus, k=5)
    lm = train_lm(apply_classes(cmap, corpus + [["oov"]]), 2)
    reserved = {"</s>", "<unk>"}
    assert len(set(lm.event_words()) - reserved) <= 5 + 1


def test_class_map_file_roundtrip(tmp_path):
    cmap = ClassMap({"a": 0, "b": 2}, 3)
    cmap.save(tmp_path / "c.tsv")
    again = ClassMap.load(tmp_path / "c.tsv")
    assert again == cmap and again.unknown_class == 3
    with pytest.raises(ValueError):
        ClassMap({"a": 3}, 3)


def test_xlogx_zero_convention():
    corpus = [["a"]]
    assert class_objective(corpus, {"a": 0}) == pytest.approx(-2 * (1 * math.log(1)))
    cmap, trace = cluster_exchange(corpus, k=1)
    assert trace[0] == 0.0
