"""Cased corpus BLEU (single reference, no smoothing) and progress tables."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

from .text import NormalizationRules, normalize

MAX_N = 4


@dataclass(frozen=True)
class BleuReport:
    bleu: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_length: int
    ref_length: int
    matches: tuple[int, ...] = ()
    totals: tuple[int, ...] = ()

    @property
    def ratio(self) -> float:
        return self.hyp_length / self.ref_length if self.ref_length else math.inf

    def __str__(self):
        ps = "/".join(f"{100 * p:.1f}" for p in self.precisions)
        return (f"BLEU = {self.bleu:.1f}, p1/p2/p3/p4 = {ps}, BP = {self.brevity_penalty:.3f}, "
                f"ratio = {self.ratio:.3f} ({self.hyp_length}/{self.ref_length})")


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def brevity_penalty(c: int, r: int) -> float:
    if c == 0:
        return 0.0
    return min(1.0, math.exp(1.0 - r / c))


def bleu(hypotheses: Iterable[str], references: Iterable[str], normalize_first: bool = False,
         rules: NormalizationRules | None = None) -> BleuReport:
    hyps, refs = list(hypotheses), list(references)
    if len(hyps) != len(refs):
        raise ValueError(f"line count mismatch: {len(hyps)} hypotheses vs {len(refs)} references")
    matches = [0] * MAX_N
    totals = [0] * MAX_N
    c = r = 0
    for hyp, ref in zip(hyps, refs):
        if normalize_first:
            hyp, ref = normalize(hyp, rules), normalize(ref, rules)
        h, t = hyp.split(), ref.split()
        c += len(h)
        r += len(t)
        for n in range(1, MAX_N + 1):
            hc, rc = _ngrams(h, n), _ngrams(t, n)
            matches[n - 1] += sum(min(cnt, rc[g]) for g, cnt in hc.items())
            totals[n - 1] += max(len(h) - n + 1, 0)
    # an order with no hypothesis n-grams at all is vacuously matched, so bleu(h, h) = 100
    # holds even for corpora of short segments
    precisions = tuple(m / t if t else 1.0 for m, t in zip(matches, totals))
    bp = brevity_penalty(c, r)
    if c == 0 or min(precisions) == 0:
        score = 0.0
    else:
        score = 100.0 * bp * math.exp(sum(math.log(p) for p in precisions) / MAX_N)
    return BleuReport(score, precisions, bp, c, r, tuple(matches), tuple(totals))


def round_half_up(x: float | Decimal, places: int = 1) -> Decimal:
    d = x if isinstance(x, Decimal) else Decimal(repr(x))
    return d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)


def row_average(values: Sequence[float], displayed: bool = True) -> Decimal:
    """Mean rounded half-up to one decimal.

    ``displayed`` averages the values as printed (one decimal), which is how
    published tables compute their Avg column.
    """
    if not values:
        raise ValueError("empty row")
    if displayed:
        vals = [round_half_up(v) for v in values]
    else:
        vals = [Decimal(repr(float(v))) for v in values]
    return round_half_up(sum(vals) / len(vals))


def progress_table(rows: Sequence[tuple[str, Sequence]], columns: Sequence[str],
                   displayed: bool = False, avg_label: str = "Avg") -> str:
    """Plain-text table with a per-row average column.

    Row values may be BleuReports or plain scores. Live reports average the
    unrounded scores; pass ``displayed=True`` to average printed values.
    """
    body = []
    for label, values in rows:
        if len(values) != len(columns):
            raise ValueError(f"row {label!r} has {len(values)} values for {len(columns)} columns")
        scores = [v.bleu if isinstance(v, BleuReport) else float(v) for v in values]
        cells = [str(round_half_up(s)) for s in scores]
        body.append([label, *cells, str(row_average(scores, displayed))])
    header = ["System", *columns, avg_label]
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]

    def fmt(row):
        return " ".join([row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])])

    rule = "-" * len(fmt(header))
    return "\n".join([fmt(header), rule, *(fmt(r) for r in body)]) + "\n"
