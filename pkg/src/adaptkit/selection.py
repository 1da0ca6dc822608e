"""Cross-entropy difference (Moore-Lewis) scoring and fraction-based selection.

Scores are in log10 units per predicted event; lower means more in-domain.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .lm.kneser_ney import train_lm
from .lm.vocab import UNK
from .text import SentencePair

SWEEP_FRACTIONS = (0.025, 0.0375, 0.05, 0.10, 0.30)


@dataclass(frozen=True)
class SelectionScore:
    index: int
    score: float
    src_score: float | None = None
    tgt_score: float | None = None


def cross_entropy(tokens: Sequence[str], lm) -> float:
    lps = lm.sentence_logprobs(tokens)
    return -math.fsum(lps) / len(lps)


def ml_score(sentence: Sequence[str], in_lm, out_lm) -> float:
    return cross_entropy(sentence, in_lm) - cross_entropy(sentence, out_lm)


def bilingual_score(pair: SentencePair, in_src, out_src, in_tgt, out_tgt) -> float:
    return ml_score(pair.source, in_src, out_src) + ml_score(pair.target, in_tgt, out_tgt)


def score_corpus(pairs: Iterable[SentencePair], in_src, out_src,
                 in_tgt=None, out_tgt=None) -> list[SelectionScore]:
    """Bilingual scores when target-side models are given, source-only otherwise."""
    scores = []
    for i, pair in enumerate(pairs):
        s = ml_score(pair.source, in_src, out_src)
        if in_tgt is None:
            scores.append(SelectionScore(i, s, s, None))
        else:
            t = ml_score(pair.target, in_tgt, out_tgt)
            scores.append(SelectionScore(i, s + t, s, t))
    return scores


def selection_size(n: int, fraction: float) -> int:
    if not (0 < fraction <= 1):
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    # decimal reading of the fraction so 0.0375 * 18.5M is exactly 693750
    return math.floor(n * Fraction(str(fraction)))


def select_fraction(scores: Sequence[SelectionScore] | np.ndarray, fraction: float) -> list[int]:
    """Indices of the floor(N * fraction) lowest scores, returned in corpus order.

    ``scores`` is either a list of SelectionScore or a 1-d array whose
    position is the corpus index. Ties go to the earlier index.
    """
    if isinstance(scores, np.ndarray):
        values = scores.astype(float, copy=False)
        index = np.arange(len(values))
    else:
        values = np.fromiter((s.score for s in scores), dtype=float, count=len(scores))
        index = np.fromiter((s.index for s in scores), dtype=np.int64, count=len(scores))
    k = selection_size(len(values), fraction)
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite selection score")
    order = np.lexsort((index, values))[:k]
    return np.sort(index[order]).tolist()


def sample_out_domain(out_corpus: Sequence, size: int, seed: int) -> list:
    """Random sample used to train the out-of-domain scoring model."""
    size = min(size, len(out_corpus))
    picks = sorted(random.Random(seed).sample(range(len(out_corpus)), size))
    return [out_corpus[i] for i in picks]


def train_scoring_lms(in_sents: Sequence[Sequence[str]], out_sents: Sequence[Sequence[str]],
                      order: int = 5, seed: int = 42):
    """In-domain LM on all in-domain text, out-domain LM on an equal-size sample.

    Both models share the in-domain vocabulary: out-domain tokens outside
    it are trained as <unk>, and in-domain words absent from the sample
    keep a zero count. Without a shared vocabulary each model's <unk> mass
    makes the other domain's words look cheap and the scores stop
    separating the domains.
    """
    vocab = {t for s in in_sents for t in s}
    sample = [[t if t in vocab else UNK for t in s]
              for s in sample_out_domain(out_sents, len(in_sents), seed)]
    return train_lm(in_sents, order, vocab=vocab), train_lm(sample, order, vocab=vocab)


def write_scores(path: str | Path, scores: Iterable[SelectionScore]) -> None:
    def fmt(x):
        return "" if x is None else repr(float(x))

    with open(path, "w", encoding="utf-8") as f:
        for s in scores:
            f.write(f"{s.index}\t{s.score!r}\t{fmt(s.src_score)}\t{fmt(s.tgt_score)}\n")


def read_scores(path: str | Path) -> list[SelectionScore]:
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields")
            src = float(parts[2]) if parts[2] else None
            tgt = float(parts[3]) if parts[3] else None
            out.append(SelectionScore(int(parts[0]), float(parts[1]), src, tgt))
    return out
