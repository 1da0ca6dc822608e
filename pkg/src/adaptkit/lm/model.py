from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .vocab import BOS, EOS, UNK, Vocabulary

# ARPA convention for "never predicted" (the <s> unigram).
LOG_ZERO = -99.0
LN10 = math.log(10.0)


class NgramModel:
    """Back-off n-gram model with log10 probabilities and back-off weights.

    ``prob`` maps every stored n-gram (any order) to its log10 conditional
    probability; ``bow`` maps stored n-grams that act as contexts to their
    log10 back-off weight. Both are treated as read-only after construction.
    """

    def __init__(self, order: int, prob: dict[tuple[str, ...], float],
                 bow: dict[tuple[str, ...], float], vocab: Vocabulary | None = None):
        self.order = order
        self.prob = prob
        self.bow = bow
        if vocab is None:
            vocab = Vocabulary(g[0] for g in prob if len(g) == 1)
        self.vocab = vocab
        self._known = frozenset(g[0] for g in prob if len(g) == 1)

    def __repr__(self):
        sizes = ", ".join(str(n) for n in self.ngram_counts())
        return f"NgramModel(order={self.order}, ngrams=[{sizes}])"

    def ngram_counts(self) -> list[int]:
        sizes = [0] * self.order
        for g in self.prob:
            sizes[len(g) - 1] += 1
        return sizes

    def ngrams(self, k: int) -> list[tuple[str, ...]]:
        return sorted(g for g in self.prob if len(g) == k)

    def contexts(self, k: int) -> list[tuple[str, ...]]:
        """Histories (length k-1) that have at least one stored k-gram continuation."""
        if k == 1:
            return [()]
        return sorted({g[:-1] for g in self.prob if len(g) == k})

    def event_words(self) -> list[str]:
        """Every word the model can predict (unigrams except <s>)."""
        return sorted(w for w in self._known if w != BOS)

    def map_token(self, token: str) -> str:
        return token if token in self._known else UNK

    def logprob(self, word: str, history: Sequence[str] = ()) -> float:
        w = self.map_token(word)
        if w not in self._known:
            return -math.inf
        n = self.order - 1
        hist = tuple(t if t == BOS else self.map_token(t) for t in history[max(0, len(history) - n):]) if n > 0 else ()
        acc = 0.0
        prob, bow = self.prob, self.bow
        for start in range(len(hist) + 1):
            ctx = hist[start:]
            p = prob.get(ctx + (w,))
            if p is not None:
                return acc + p
            acc += bow.get(ctx, 0.0)
        raise AssertionError("unreachable: every known word has a unigram")

    def sentence_logprobs(self, tokens: Sequence[str]) -> list[float]:
        """log10 p of every predicted event (tokens then </s>)."""
        hist = [BOS]
        out = []
        for tok in (*tokens, EOS):
            out.append(self.logprob(tok, hist))
            hist.append(tok)
        return out


@dataclass(frozen=True)
class PerplexityResult:
    perplexity: float
    events: int
    oov: int
    logprob: float  # log10 total


def evaluate(model, corpus: Iterable[Sequence[str]]) -> PerplexityResult:
    """Perplexity over predicted events: each token plus one </s> per sentence."""
    total_ln = []
    events = oov = 0
    known = getattr(model, "_known", None)
    for sent in corpus:
        lps = model.sentence_logprobs(sent)
        events += len(lps)
        if known is not None:
            oov += sum(1 for t in sent if t not in known)
        total_ln.extend(lp * LN10 for lp in lps)
    if events == 0:
        raise ValueError("perplexity of an empty corpus is undefined")
    ln_sum = math.fsum(total_ln)
    return PerplexityResult(math.exp(-ln_sum / events), events, oov, ln_sum / LN10)


def perplexity(model, corpus: Iterable[Sequence[str]]) -> float:
    return evaluate(model, corpus).perplexity


def iter_events(corpus: Iterable[Sequence[str]]) -> Iterator[tuple[str, tuple[str, ...]]]:
    """Yield (word, full history) for every predicted event in ``corpus``."""
    for sent in corpus:
        hist = (BOS,)
        for tok in (*sent, EOS):
            yield tok, hist
            hist = hist + (tok,)
