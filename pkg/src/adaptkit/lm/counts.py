from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .vocab import BOS, EOS

DEFAULT_ORDER = 5


@dataclass
class NgramCounts:
    """Raw n-gram counts for orders 1..order.

    ``counts[k - 1]`` maps k-tuples of tokens to their count. Sentences are
    padded with one <s> and one </s>; <s> is never a predicted event, so it
    only appears as the first element of higher-order n-grams.
    """

    order: int
    counts: list[Counter] = field(default_factory=list)

    def __post_init__(self):
        if not self.counts:
            self.counts = [Counter() for _ in range(self.order)]

    def __getitem__(self, k: int) -> Counter:
        return self.counts[k - 1]

    def add_sentence(self, tokens: Sequence[str]) -> None:
        padded = [BOS, *tokens, EOS]
        n = self.order
        for i in range(1, len(padded)):
            for k in range(1, min(n, i + 1) + 1):
                self.counts[k - 1][tuple(padded[i - k + 1:i + 1])] += 1

    def __add__(self, other: "NgramCounts") -> "NgramCounts":
        if self.order != other.order:
            raise ValueError("cannot merge counts of different order")
        return NgramCounts(self.order, [a + b for a, b in zip(self.counts, other.counts)])

    def __eq__(self, other) -> bool:
        return (isinstance(other, NgramCounts) and self.order == other.order
                and all(dict(a) == dict(b) for a, b in zip(self.counts, other.counts)))

    def count_of_counts(self, k: int) -> tuple[int, int, int, int]:
        return count_of_counts(self[k].values())

    def num_events(self) -> int:
        return sum(self[1].values())


def count_of_counts(values: Iterable[int]) -> tuple[int, int, int, int]:
    n = [0, 0, 0, 0, 0]
    for c in values:
        if 1 <= c <= 4:
            n[c] += 1
    return n[1], n[2], n[3], n[4]


def count_ngrams(corpus: Iterable[Sequence[str]], order: int = DEFAULT_ORDER) -> NgramCounts:
    if order < 1:
        raise ValueError("order must be >= 1")
    counts = NgramCounts(order)
    for sent in corpus:
        counts.add_sentence(sent)
    if not counts[1]:
        raise ValueError("no events: corpus is empty")
    return counts
