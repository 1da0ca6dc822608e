"""Linear interpolation of n-gram models with EM-fitted weights.

The same code fits word LMs, class LMs and OSM models: each component only
needs ``logprob(word, history)`` in log10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .lm.model import LOG_ZERO, NgramModel, iter_events
from .lm.vocab import BOS, UNK

DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITER = 100


class ZeroProbabilityError(ValueError):
    pass


@dataclass(frozen=True)
class EmTrace:
    perplexities: tuple[float, ...]  # index 0 is the uniform initialization
    iterations: int
    converged: bool


class UnionVocabulary:
    """Routes words a component does not know through that component's <unk>.

    The <unk> mass p_i(<unk>|h) is split evenly over the m_i union words
    component i lacks plus <unk> itself, so every component (and hence the
    mixture) stays a distribution over the union vocabulary. Components
    without ``event_words`` are queried as-is.
    """

    def __init__(self, components: Sequence):
        vocabs = [frozenset(c.event_words()) if hasattr(c, "event_words") else None for c in components]
        self.words = frozenset().union(*(v for v in vocabs if v is not None))
        self.vocabs = vocabs
        self.shares = [0.0 if v is None else math.log10(len(self.words - v - {UNK}) + 1) for v in vocabs]

    def logprob(self, i: int, component, word: str, history: Sequence[str]) -> float:
        vocab = self.vocabs[i]
        if vocab is None:
            return component.logprob(word, history)
        if word in vocab and word != UNK:
            return component.logprob(word, history)
        return component.logprob(UNK, history) - self.shares[i]


class MixtureModel:
    def __init__(self, components: Sequence, weights: Sequence[float]):
        if len(components) != len(weights):
            raise ValueError("one weight per component required")
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights must lie on the simplex, got {list(w)}")
        self.components = list(components)
        self.weights = w
        self.order = max(c.order for c in self.components)
        self.union = UnionVocabulary(self.components)

    def event_words(self) -> list[str]:
        return sorted(self.union.words)

    def component_logprobs(self, word: str, history: Sequence[str] = ()) -> list[float]:
        return [self.union.logprob(i, c, word, history) for i, c in enumerate(self.components)]

    def logprob(self, word: str, history: Sequence[str] = ()) -> float:
        return combine_log10(self.weights, self.component_logprobs(word, history))

    def sentence_logprobs(self, tokens: Sequence[str]) -> list[float]:
        return [self.logprob(w, h) for w, h in iter_events([tokens])]


def combine_log10(weights: Sequence[float], logprobs: Sequence[float]) -> float:
    """log10(sum_i w_i 10**lp_i), exact when a single component carries all the weight."""
    terms = [(w, lp) for w, lp in zip(weights, logprobs) if w > 0]
    if len(terms) == 1 and terms[0][0] == 1.0:
        return terms[0][1]
    finite = [lp for _, lp in terms if lp != -math.inf]
    if not finite:
        return -math.inf
    top = max(finite)
    s = math.fsum(w * 10.0 ** (lp - top) for w, lp in terms if lp != -math.inf)
    return top + math.log10(s)


def mixture_logprob(mix: MixtureModel, word: str, history: Sequence[str] = ()) -> float:
    return mix.logprob(word, history)


def event_probabilities(components: Sequence, tune: Iterable[Sequence[str]]):
    """Matrix of p_i(e) with one row per tune event and one column per component."""
    events = list(iter_events(tune))
    if not events:
        raise ValueError("tune set is empty")
    union = UnionVocabulary(components)
    probs = np.empty((len(events), len(components)))
    for i, (w, h) in enumerate(events):
        for j, comp in enumerate(components):
            probs[i, j] = 10.0 ** union.logprob(j, comp, w, h)
    return probs, events


def em_weights(probs: np.ndarray, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
               events=None) -> tuple[np.ndarray, EmTrace]:
    n_events, n_comp = probs.shape
    dead = np.flatnonzero(~(probs > 0).any(axis=1))
    if dead.size:
        i = int(dead[0])
        what = f"{events[i][0]!r} after {' '.join(events[i][1])!r}" if events else f"#{i}"
        raise ZeroProbabilityError(f"every component assigns zero probability to event {what}")
    lam = np.full(n_comp, 1.0 / n_comp)

    def ppl(weights):
        return math.exp(-np.log(probs @ weights).sum() / n_events)

    trace = [ppl(lam)]
    converged = False
    it = 0
    while it < max_iter:
        mixed = probs @ lam
        post = probs * lam / mixed[:, None]
        lam = post.mean(axis=0)
        lam /= lam.sum()
        it += 1
        trace.append(ppl(lam))
        if (trace[-2] - trace[-1]) / trace[-2] < tol:
            converged = True
            break
    return lam, EmTrace(tuple(trace), it, converged)


def em_fit(components: Sequence, tune: Iterable[Sequence[str]], tol: float = DEFAULT_TOL,
           max_iter: int = DEFAULT_MAX_ITER) -> tuple[np.ndarray, EmTrace]:
    """Fit interpolation weights that minimize tune-set perplexity."""
    if len(components) < 2:
        raise ValueError("need at least two components")
    probs, events = event_probabilities(components, tune)
    return em_weights(probs, tol, max_iter, events)


def merge_static(mix: MixtureModel) -> NgramModel:
    """Collapse a mixture into one back-off model over the union of stored n-grams.

    Stored n-grams get the exact interpolated probability; back-off weights
    are recomputed so each context sums to one. Unstored events therefore
    only approximate the dynamic mixture.
    """
    prob: dict[tuple[str, ...], float] = {}
    bow: dict[tuple[str, ...], float] = {}
    order = mix.order
    union = [sorted({g for c in mix.components for g in c.prob if len(g) == k})
             for k in range(1, order + 1)]
    merged = NgramModel(order, prob, bow)
    for k in range(1, order + 1):
        for g in union[k - 1]:
            prob[g] = LOG_ZERO if g == (BOS,) else mix.logprob(g[-1], g[:-1])
        if k == 1:
            merged = NgramModel(order, prob, bow)
            continue
        stored: dict[tuple[str, ...], list[tuple[str, ...]]] = {}
        for g in union[k - 1]:
            stored.setdefault(g[:-1], []).append(g)
        for h, gs in stored.items():
            num = 1.0 - math.fsum(10.0 ** prob[g] for g in gs)
            den = 1.0 - math.fsum(10.0 ** merged.logprob(g[-1], h[1:]) for g in gs)
            bow[h] = math.log10(max(num, 1e-12) / max(den, 1e-12))
    return NgramModel(order, prob, bow)


def save_weights(path: str | Path, names: Sequence[str], weights: Sequence[float]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for name, w in zip(names, weights):
            f.write(f"{name}\t{float(w)!r}\n")


def load_weights(path: str | Path) -> list[tuple[str, float]]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                name, w = line.rstrip("\n").split("\t")
                out.append((name, float(w)))
    return out
