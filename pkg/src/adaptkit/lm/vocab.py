from __future__ import annotations

from pathlib import Path
from typing import Iterable

UNK = "<unk>"
BOS = "<s>"
EOS = "</s>"
RESERVED = (UNK, BOS, EOS)


class Vocabulary:
    """Token <-> id map with frequencies. Ids 0..2 are reserved for <unk>, <s>, </s>."""

    def __init__(self, tokens: Iterable[str] = ()):
        self._ids: dict[str, int] = {}
        self._tokens: list[str] = []
        self._freq: list[int] = []
        for tok in RESERVED:
            self._intern(tok)
        for tok in tokens:
            self.add(tok)

    def _intern(self, token: str) -> int:
        idx = self._ids.get(token)
        if idx is None:
            idx = len(self._tokens)
            self._ids[token] = idx
            self._tokens.append(token)
            self._freq.append(0)
        return idx

    def add(self, token: str, count: int = 1) -> int:
        idx = self._intern(token)
        self._freq[idx] += count
        return idx

    @classmethod
    def from_corpus(cls, sentences: Iterable[Iterable[str]]) -> "Vocabulary":
        vocab = cls()
        for sent in sentences:
            for tok in sent:
                vocab.add(tok)
        return vocab

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    def __len__(self) -> int:
        return len(self._tokens)

    def __iter__(self):
        return iter(self._tokens)

    def id(self, token: str) -> int:
        return self._ids.get(token, 0)

    def token(self, idx: int) -> str:
        return self._tokens[idx]

    def freq(self, token: str) -> int:
        idx = self._ids.get(token)
        return 0 if idx is None else self._freq[idx]

    def words(self) -> list[str]:
        """Non-reserved tokens in id order."""
        return self._tokens[len(RESERVED):]

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for tok in self.words():
                f.write(f"{tok}\t{self.freq(tok)}\n")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        """Read one token per line, optionally followed by a tab and a count."""
        vocab = cls()
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if not line:
                    continue
                tok, _, count = line.partition("\t")
                vocab.add(tok, int(count) if count else 1)
        return vocab
