from __future__ import annotations

import re
from pathlib import Path
from typing import IO, Iterable

from .model import NgramModel

_NGRAM_HEADER = re.compile(r"^ngram (\d+)=(\d+)$")
_SECTION = re.compile(r"^\\(\d+)-grams:$")


class ArpaError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"ARPA line {lineno}: {msg}")
        self.lineno = lineno


def _fmt(x: float, precision: int | None) -> str:
    if precision is None:
        return repr(float(x))
    return format(x, f".{precision}g")


def format_arpa(model: NgramModel, precision: int | None = 7) -> str:
    """Serialize ``model``; ``precision=None`` writes full double precision."""
    lines = ["", "\\data\\"]
    sizes = model.ngram_counts()
    for k, size in enumerate(sizes, 1):
        lines.append(f"ngram {k}={size}")
    for k in range(1, model.order + 1):
        lines += ["", f"\\{k}-grams:"]
        for g in model.ngrams(k):
            fields = [_fmt(model.prob[g], precision), " ".join(g)]
            b = model.bow.get(g)
            if b is not None:
                fields.append(_fmt(b, precision))
            lines.append("\t".join(fields))
    lines += ["", "\\end\\", ""]
    return "\n".join(lines)


def export_arpa(model: NgramModel, path: str | Path | IO[str], precision: int | None = 7) -> None:
    stray = [h for h in model.bow if h not in model.prob]
    if stray:
        raise ValueError(f"back-off weight for unstored context {stray[0]}")
    text = format_arpa(model, precision)
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)


def parse_arpa(lines: Iterable[str]) -> NgramModel:
    declared: dict[int, int] = {}
    prob: dict[tuple[str, ...], float] = {}
    bow: dict[tuple[str, ...], float] = {}
    seen: dict[int, int] = {}
    state = "preamble"
    order = 0
    lineno = 0
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if state == "preamble":
            if line == "\\data\\":
                state = "header"
            continue
        if not line:
            continue
        if state == "header":
            m = _NGRAM_HEADER.match(line)
            if m:
                declared[int(m.group(1))] = int(m.group(2))
                continue
            state = "body"
        if line == "\\end\\":
            state = "end"
            break
        m = _SECTION.match(line)
        if m:
            order = int(m.group(1))
            if order not in declared:
                raise ArpaError(lineno, f"section for undeclared order {order}")
            seen[order] = 0
            continue
        if order == 0:
            raise ArpaError(lineno, f"unexpected line before any n-gram section: {line!r}")
        fields = line.split("\t") if "\t" in line else line.split()
        try:
            if "\t" in line:
                p = float(fields[0])
                words = tuple(fields[1].split())
                b = float(fields[2]) if len(fields) > 2 else None
            else:
                p = float(fields[0])
                if len(fields) == order + 2:
                    words, b = tuple(fields[1:-1]), float(fields[-1])
                else:
                    words, b = tuple(fields[1:]), None
        except (ValueError, IndexError):
            raise ArpaError(lineno, f"malformed entry {line!r}") from None
        if len(words) != order:
            raise ArpaError(lineno, f"expected {order} words, got {len(words)}")
        prob[words] = p
        if b is not None:
            bow[words] = b
        seen[order] += 1
    if state != "end":
        raise ArpaError(lineno, "missing \\data\\ or \\end\\ marker")
    for k, n in declared.items():
        if seen.get(k, 0) != n:
            raise ArpaError(lineno, f"order {k}: header declares {n} n-grams, found {seen.get(k, 0)}")
    if not declared:
        raise ArpaError(lineno, "no n-gram counts declared")
    return NgramModel(max(declared), prob, bow)


def import_arpa(path: str | Path | IO[str]) -> NgramModel:
    if hasattr(path, "read"):
        return parse_arpa(path)
    with open(path, encoding="utf-8") as f:
        return parse_arpa(f)
