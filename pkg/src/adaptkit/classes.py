"""Exchange-algorithm word clustering on class-bigram statistics.

Maximizes

    F = sum_{c,c'} N(c,c') ln N(c,c') - 2 sum_c N(c) ln N(c)

where N(c,c') counts within-line bigrams whose words fall in classes c and
c', and N(c) is the total token count of class c (0 ln 0 = 0).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DEFAULT_K = 50
DEFAULT_SWEEPS = 30
MIN_GAIN = 1e-12
# pair swaps cost O(V^2) full recounts per pass, so only small vocabularies get them
SWAP_VOCAB_LIMIT = 100


@dataclass
class ClassMap:
    word_class: dict[str, int]
    k: int

    def __post_init__(self):
        for w, c in self.word_class.items():
            if not 0 <= c < self.k:
                raise ValueError(f"class {c} of {w!r} outside [0, {self.k})")

    @property
    def unknown_class(self) -> int:
        return self.k

    def __getitem__(self, word: str) -> int:
        return self.word_class.get(word, self.k)

    def token_map(self) -> dict[str, str]:
        return {w: str(c) for w, c in self.word_class.items()}

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"#k\t{self.k}\n")
            for w, c in self.word_class.items():
                f.write(f"{w}\t{c}\n")

    @classmethod
    def load(cls, path: str | Path) -> "ClassMap":
        mapping: dict[str, int] = {}
        k = None
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                w, _, c = line.partition("\t")
                if w == "#k" and lineno == 1:
                    k = int(c)
                    continue
                mapping[w] = int(c)
        if k is None:
            k = max(mapping.values(), default=-1) + 1
        return cls(mapping, k)


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


def objective(bigrams: np.ndarray, class_counts: np.ndarray) -> float:
    return float(_xlogx(bigrams).sum() - 2.0 * _xlogx(class_counts).sum())


def _statistics(corpus: Iterable[Sequence[str]]):
    unigrams: Counter = Counter()
    bigrams: Counter = Counter()
    for line in corpus:
        unigrams.update(line)
        bigrams.update(zip(line, line[1:]))
    return unigrams, bigrams


def visit_order(unigrams: Counter) -> list[str]:
    return sorted(unigrams, key=lambda w: (-unigrams[w], w))


def class_statistics(assign: np.ndarray, k: int, counts: np.ndarray,
                     pairs: np.ndarray, pair_counts: np.ndarray):
    big = np.zeros((k, k))
    if len(pairs):
        np.add.at(big, (assign[pairs[:, 0]], assign[pairs[:, 1]]), pair_counts)
    return big, np.bincount(assign, weights=counts, minlength=k).astype(float)


def _threshold(current: float) -> float:
    return max(MIN_GAIN, 1e-10 * abs(current))


def _swap_pass(assign, k, counts, pairs, pair_counts, current, trace) -> tuple[float, bool]:
    """Try exchanging every pair of words in different classes; keep strict improvements."""
    moved = False
    n = len(assign)
    for i in range(n):
        for j in range(i + 1, n):
            ci, cj = assign[i], assign[j]
            if ci == cj:
                continue
            assign[i], assign[j] = cj, ci
            f = objective(*class_statistics(assign, k, counts, pairs, pair_counts))
            if f - current > _threshold(current):
                current = f
                trace.append(f)
                moved = True
            else:
                assign[i], assign[j] = ci, cj
    return current, moved


def cluster_exchange(corpus: Iterable[Sequence[str]], k: int = DEFAULT_K,
                     max_sweeps: int = DEFAULT_SWEEPS,
                     swap_limit: int = SWAP_VOCAB_LIMIT) -> tuple[ClassMap, list[float]]:
    """Returns the class map and the objective after initialization and every accepted move.

    Each sweep moves single words. When a sweep finds no improving move and
    the vocabulary has at most ``swap_limit`` words, a pass of pairwise
    swaps follows; single-word moves cannot leave symmetric traps where
    every class holds half of each true cluster.
    """
    unigrams, bigram_counter = _statistics(corpus)
    words = visit_order(unigrams)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(words):
        raise ValueError(f"k={k} exceeds vocabulary size {len(words)}")
    index = {w: i for i, w in enumerate(words)}
    counts = np.array([unigrams[w] for w in words], dtype=float)
    pairs = np.array([(index[a], index[b]) for a, b in bigram_counter], dtype=np.int64).reshape(-1, 2)
    pair_counts = np.array(list(bigram_counter.values()), dtype=float)

    succ: list[list[tuple[int, float]]] = [[] for _ in words]
    pred: list[list[tuple[int, float]]] = [[] for _ in words]
    selfloop = np.zeros(len(words))
    for (a, b), c in zip(pairs.tolist(), pair_counts.tolist()):
        if a == b:
            selfloop[a] += c
        else:
            succ[a].append((b, c))
            pred[b].append((a, c))
    succ_idx = [np.array([b for b, _ in s], dtype=np.int64) for s in succ]
    succ_cnt = [np.array([c for _, c in s]) for s in succ]
    pred_idx = [np.array([a for a, _ in p], dtype=np.int64) for p in pred]
    pred_cnt = [np.array([c for _, c in p]) for p in pred]

    assign = np.minimum(np.arange(len(words)), k - 1)
    big, ncls = class_statistics(assign, k, counts, pairs, pair_counts)
    sizes = np.bincount(assign, minlength=k)
    current = objective(big, ncls)
    trace = [current]
    diag = np.arange(k)

    for _ in range(max_sweeps):
        moved = False
        for w in range(len(words)):
            c = assign[w]
            if sizes[c] == 1:
                continue
            left = np.bincount(assign[pred_idx[w]], weights=pred_cnt[w], minlength=k)
            right = np.bincount(assign[succ_idx[w]], weights=succ_cnt[w], minlength=k)
            loop = selfloop[w]
            # statistics with w removed from c
            big[:, c] -= left
            big[c, :] -= right
            big[c, c] -= loop
            ncls[c] -= counts[w]
            base_big = _xlogx(big)
            col_gain = _xlogx(big + left[:, None]) - base_big   # [k', d]: column d gains left[k']
            row_gain = _xlogx(big + right[None, :]) - base_big  # [d, k']: row d gains right[k']
            dd = big[diag, diag]
            diag_gain = _xlogx(dd + left + right + loop) - _xlogx(dd)
            gain = (col_gain.sum(axis=0) - col_gain[diag, diag]
                    + row_gain.sum(axis=1) - row_gain[diag, diag]
                    + diag_gain
                    - 2.0 * (_xlogx(ncls + counts[w]) - _xlogx(ncls)))
            best = int(np.argmax(gain))
            target = best if (best != c and gain[best] - gain[c] > _threshold(current)) else c
            big[:, target] += left
            big[target, :] += right
            big[target, target] += loop
            ncls[target] += counts[w]
            if target != c:
                assign[w] = target
                sizes[c] -= 1
                sizes[target] += 1
                # counts are integral, so the incremental tables stay exact
                current = objective(big, ncls)
                trace.append(current)
                moved = True
        if not moved and len(words) <= swap_limit and k > 1:
            current, moved = _swap_pass(assign, k, counts, pairs, pair_counts, current, trace)
            if moved:
                big, ncls = class_statistics(assign, k, counts, pairs, pair_counts)
        if not moved:
            break
    return ClassMap({w: int(assign[index[w]]) for w in words}, k), trace


def apply_classes(cmap: ClassMap, text: Iterable[Sequence[str]]) -> list[list[str]]:
    """Replace every token by its class id; unknown words get the reserved id k."""
    return [[str(cmap[t]) for t in line] for line in text]
