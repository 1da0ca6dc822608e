"""Interpolated modified Kneser-Ney estimation.

The highest order uses raw counts. Lower orders use continuation counts
(the number of distinct left extensions), except for n-grams that start
with <s>, which cannot be extended and keep their raw count.

Each order gets three discounts from its count-of-counts::

    Y  = n1 / (n1 + 2 n2)
    D1 = 1 - 2 Y n2 / n1
    D2 = 2 - 3 Y n3 / n2
    D3 = 3 - 4 Y n4 / n3

and falls back to a single discount of 0.75 when any of n1..n4 is zero or
a discount leaves its valid range. The interpolated estimate is

    p(w | h) = (a(hw) - D(a(hw))) / A(h) + gamma(h) p(w | h')
    gamma(h) = (D1 N1(h.) + D2 N2(h.) + D3 N3+(h.)) / A(h)

which is stored in back-off form with bow(h) = gamma(h). The unigram level
interpolates with the uniform distribution over the event vocabulary.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .counts import NgramCounts, count_ngrams, count_of_counts
from .model import LOG_ZERO, NgramModel
from .vocab import BOS, UNK, Vocabulary

FALLBACK_DISCOUNT = 0.75


@dataclass(frozen=True)
class Discounts:
    d1: float
    d2: float
    d3: float
    fallback: bool = False

    def __call__(self, count: int) -> float:
        if count <= 0:
            return 0.0
        if count == 1:
            return self.d1
        if count == 2:
            return self.d2
        return self.d3


def modified_discounts(n1: int, n2: int, n3: int, n4: int) -> Discounts:
    if min(n1, n2, n3, n4) == 0:
        return Discounts(FALLBACK_DISCOUNT, FALLBACK_DISCOUNT, FALLBACK_DISCOUNT, True)
    y = n1 / (n1 + 2 * n2)
    d1 = 1 - 2 * y * n2 / n1
    d2 = 2 - 3 * y * n3 / n2
    d3 = 3 - 4 * y * n4 / n3
    if not (0 < d1 <= 1 and 0 < d2 <= 2 and 0 < d3 <= 3):
        return Discounts(FALLBACK_DISCOUNT, FALLBACK_DISCOUNT, FALLBACK_DISCOUNT, True)
    return Discounts(d1, d2, d3)


def adjusted_counts(counts: NgramCounts) -> list[dict[tuple[str, ...], int]]:
    n = counts.order
    adjusted: list[dict] = [dict() for _ in range(n)]
    adjusted[n - 1] = dict(counts[n])
    for k in range(n - 1, 0, -1):
        continuation = Counter(g[1:] for g in counts[k + 1])
        adjusted[k - 1] = {g: (c if g[0] == BOS else continuation[g]) for g, c in counts[k].items()}
    return adjusted


def estimate_kn(counts: NgramCounts, unk: bool = True, vocab: Iterable[str] | None = None) -> NgramModel:
    """Estimate a back-off model from raw counts.

    With ``unk`` set, <unk> enters the unigram table with a count equal to
    the number of singleton unigram types, so unseen words get mass that
    grows with the corpus' rate of novel words. Words in ``vocab`` that
    never occur are added with count zero; they receive only the uniform
    share of the unigram distribution.
    """
    if not counts[1]:
        raise ValueError("no events: cannot estimate from empty counts")
    n = counts.order
    adjusted = adjusted_counts(counts)
    discounts = [modified_discounts(*count_of_counts(a.values())) for a in adjusted]

    unigrams = dict(adjusted[0])
    if unk:
        n1 = count_of_counts(unigrams.values())[0]
        unigrams[(UNK,)] = unigrams.get((UNK,), 0) + n1
    for w in sorted(set(vocab or ()) - {BOS}):
        unigrams.setdefault((w,), 0)
    adjusted[0] = unigrams

    prob: dict[tuple[str, ...], float] = {}
    bow: dict[tuple[str, ...], float] = {}
    linear: dict[tuple[str, ...], float] = {}

    disc = discounts[0]
    total = sum(unigrams.values())
    gamma = sum(disc(a) for a in unigrams.values()) / total
    uniform = gamma / len(unigrams)
    for g, a in unigrams.items():
        p = (a - disc(a)) / total + uniform
        linear[g] = p
        prob[g] = math.log10(p)

    for k in range(2, n + 1):
        disc = discounts[k - 1]
        table = adjusted[k - 1]
        mass: dict[tuple[str, ...], list[float]] = {}
        for g, a in table.items():
            stats = mass.get(g[:-1])
            if stats is None:
                mass[g[:-1]] = [a, disc(a)]
            else:
                stats[0] += a
                stats[1] += disc(a)
        for g, a in table.items():
            total, discounted = mass[g[:-1]]
            p = (a - disc(a)) / total + discounted / total * linear[g[1:]]
            linear[g] = p
            prob[g] = math.log10(p)
        for h, (total, discounted) in mass.items():
            bow[h] = math.log10(discounted / total)

    if (BOS,) in bow:
        prob[(BOS,)] = LOG_ZERO

    words = Vocabulary()
    for (w,), c in counts[1].items():
        words.add(w, c)
    for (w,) in unigrams:
        words.add(w, 0)
    return NgramModel(n, prob, bow, words)


def train_lm(corpus, order: int = 5, unk: bool = True, vocab: Iterable[str] | None = None) -> NgramModel:
    return estimate_kn(count_ngrams(corpus, order), unk=unk, vocab=vocab)
