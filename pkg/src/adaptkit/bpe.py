"""Byte-pair encoding: learn merges per language, apply them, undo them.

Words are split into characters plus a separate end-of-word symbol
``</w>``. Learning repeatedly merges the most frequent adjacent pair,
weighted by word-type frequency, with ties going to the lexicographically
smallest (left, right). Applied output marks every non-final unit with
``@@``.
"""

from __future__ import annotations

import heapq
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

log = logging.getLogger(__name__)

EOW = "</w>"
SEP = "@@"
VERSION_HEADER = "#version: adaptkit-bpe 1"
DEFAULT_MERGES = 59500


@dataclass
class BpeModel:
    merges: list[tuple[str, str]]
    ranks: dict[tuple[str, str], int] = field(init=False, repr=False)

    def __post_init__(self):
        self.merges = [tuple(m) for m in self.merges]
        self.ranks = {m: i for i, m in enumerate(self.merges)}
        if len(self.ranks) != len(self.merges):
            raise ValueError("duplicate merge pair")
        self._cache: dict[str, tuple[str, ...]] = {}

    def segment_word(self, word: str) -> tuple[str, ...]:
        """Internal symbols for ``word``, including the end-of-word marker."""
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        symbols = [*word, EOW]
        ranks = self.ranks
        while len(symbols) > 1:
            best = None
            for pair in zip(symbols, symbols[1:]):
                r = ranks.get(pair)
                if r is not None and (best is None or r < best[0]):
                    best = (r, pair)
            if best is None:
                break
            symbols = _merge_symbols(symbols, best[1])
        result = tuple(symbols)
        self._cache[word] = result
        return result

    def apply_word(self, word: str) -> list[str]:
        symbols = list(self.segment_word(word))
        if symbols[-1] == EOW:
            symbols.pop()
        else:
            symbols[-1] = symbols[-1][: -len(EOW)]
        return [s + SEP for s in symbols[:-1]] + [symbols[-1]]

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(VERSION_HEADER + "\n")
            for left, right in self.merges:
                f.write(f"{left} {right}\n")

    @classmethod
    def load(cls, path: str | Path) -> "BpeModel":
        merges = []
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.rstrip("\n")
                if lineno == 1 and line.startswith("#version"):
                    continue
                parts = line.split(" ")
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'left right'")
                merges.append((parts[0], parts[1]))
        return cls(merges)


def _merge_symbols(symbols: Sequence[str], pair: tuple[str, str]) -> list[str]:
    left, right = pair
    out = []
    i = 0
    while i < len(symbols):
        if i < len(symbols) - 1 and symbols[i] == left and symbols[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def word_frequencies(corpus: Iterable[Iterable[str]]) -> Counter:
    freqs = Counter()
    for line in corpus:
        freqs.update(line)
    return freqs


def bpe_learn(corpus: Iterable[Iterable[str]] | Mapping[str, int], num_merges: int = DEFAULT_MERGES) -> BpeModel:
    """Learn merges from a token stream or a precomputed word-frequency table."""
    if num_merges < 0:
        raise ValueError("num_merges must be >= 0")
    freqs = corpus if isinstance(corpus, Mapping) else word_frequencies(corpus)
    if not freqs:
        raise ValueError("cannot learn BPE from an empty corpus")
    words = [[*w, EOW] for w in freqs]
    weights = list(freqs.values())

    pair_counts: Counter = Counter()
    where: dict[tuple[str, str], set[int]] = defaultdict(set)
    for idx, symbols in enumerate(words):
        for pair in zip(symbols, symbols[1:]):
            pair_counts[pair] += weights[idx]
            where[pair].add(idx)
    heap = [(-c, p) for p, c in pair_counts.items()]
    heapq.heapify(heap)

    merges: list[tuple[str, str]] = []
    while len(merges) < num_merges and heap:
        neg, pair = heapq.heappop(heap)
        if pair_counts.get(pair, 0) != -neg:
            continue  # stale entry
        if -neg < 2:
            break
        merges.append(pair)
        touched: Counter = Counter()
        for idx in sorted(where.pop(pair, ())):
            old = words[idx]
            new = _merge_symbols(old, pair)
            if new == old:
                continue
            wt = weights[idx]
            for p in zip(old, old[1:]):
                touched[p] -= wt
            for p in zip(new, new[1:]):
                touched[p] += wt
                where[p].add(idx)
            words[idx] = new
        for p, delta in touched.items():
            if delta == 0:
                continue
            c = pair_counts[p] + delta
            if c > 0:
                pair_counts[p] = c
                heapq.heappush(heap, (-c, p))
            else:
                del pair_counts[p]
        pair_counts.pop(pair, None)
    return BpeModel(merges)


def bpe_apply_line(model: BpeModel, tokens: Sequence[str]) -> list[str]:
    out = []
    for tok in tokens:
        out.extend(model.apply_word(tok))
    return out


def bpe_apply(model: BpeModel, text: Iterable[Sequence[str]]) -> list[list[str]]:
    return [bpe_apply_line(model, line) for line in text]


def bpe_undo_line(line: str) -> str:
    text = line.replace(SEP + " ", "")
    if text.endswith(SEP):
        log.warning("dangling continuation marker at end of line stripped")
        text = text[: -len(SEP)]
    return text


def bpe_undo(lines: Iterable[str]) -> list[str]:
    return [bpe_undo_line(line) for line in lines]
