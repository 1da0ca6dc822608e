from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Container, Iterable, Mapping, Sequence

log = logging.getLogger(__name__)


@dataclass
class TranslitTable:
    """Per-character romanization; characters without an entry pass through."""

    table: Mapping[str, str]
    passthrough: Counter = field(default_factory=Counter)

    @classmethod
    def from_tsv(cls, lines: Iterable[str]) -> "TranslitTable":
        table = {}
        for lineno, line in enumerate(lines, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cp, sep, latin = line.partition("\t")
            if not sep:
                raise ValueError(f"line {lineno}: expected '<hex>\\t<latin>'")
            table[chr(int(cp, 16))] = latin
        return cls(table)

    @classmethod
    def load(cls, path: str | Path) -> "TranslitTable":
        with open(path, encoding="utf-8") as f:
            return cls.from_tsv(f)

    @classmethod
    def default(cls) -> "TranslitTable":
        text = resources.files("adaptkit").joinpath("data/buckwalter.tsv").read_text("utf-8")
        return cls.from_tsv(text.splitlines())

    def transliterate(self, token: str) -> str:
        out = []
        for ch in token:
            rep = self.table.get(ch)
            if rep is None:
                self.passthrough[ch] += 1
                out.append(ch)
            else:
                out.append(rep)
        return "".join(out)


def find_oov(text: Iterable[Sequence[str]], vocab: Container[str]) -> Counter:
    found = Counter()
    for line in text:
        found.update(t for t in line if t not in vocab)
    return found


def drop_oov(text: Iterable[Sequence[str]], vocab: Container[str]) -> list[list[str]]:
    return [[t for t in line if t in vocab] for line in text]


def transliterate_oov(text: Iterable[Sequence[str]], vocab: Container[str],
                      table: TranslitTable | None = None) -> list[list[str]]:
    table = table or TranslitTable.default()
    before = sum(table.passthrough.values())
    out = [[t if t in vocab else table.transliterate(t) for t in line] for line in text]
    missed = sum(table.passthrough.values()) - before
    if missed:
        log.warning("%d character(s) in OOV tokens had no transliteration entry", missed)
    return out
