"""Normalization, tokenization and parallel-corpus I/O.

Everything here is applied identically before training, selection and
scoring, so the functions are pure and operate on one line at a time.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from itertools import zip_longest
from pathlib import Path
from typing import Iterable, Iterator, Mapping

DELETE = "DELETE"
DEFAULT_MAX_LEN = 80


class CorpusError(ValueError):
    """Malformed corpus input (bad encoding, mismatched files, bad links)."""


class NormalizationDecodeError(CorpusError):
    def __init__(self, offset: int, reason: str):
        super().__init__(f"invalid UTF-8 at byte offset {offset}: {reason}")
        self.offset = offset


@dataclass(frozen=True)
class SentencePair:
    source: tuple[str, ...]
    target: tuple[str, ...]
    alignment: frozenset[tuple[int, int]] | None = None

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        for side in (self.source, self.target):
            for tok in side:
                if not tok or any(ch.isspace() for ch in tok):
                    raise CorpusError(f"invalid token {tok!r}")
        if self.alignment is not None:
            links = frozenset((int(i), int(j)) for i, j in self.alignment)
            for i, j in links:
                if not (0 <= i < len(self.source) and 0 <= j < len(self.target)):
                    raise CorpusError(
                        f"link {i}-{j} out of range for lengths "
                        f"{len(self.source)}/{len(self.target)}"
                    )
            object.__setattr__(self, "alignment", links)


@dataclass(frozen=True)
class NormalizationRules:
    substitutions: Mapping[str, str] = field(default_factory=dict)
    strip: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "strip", frozenset(self.strip))
        touched = set(self.substitutions) | self.strip
        for src, rep in self.substitutions.items():
            if len(src) != 1:
                raise ValueError(f"substitution key must be one code point: {src!r}")
            # replacements must be fixed points, otherwise idempotence breaks
            bad = touched.intersection(rep)
            if bad:
                raise ValueError(
                    f"replacement for U+{ord(src):04X} contains ruled code points {sorted(bad)}"
                )
        object.__setattr__(
            self,
            "_table",
            str.maketrans({**dict(self.substitutions), **{c: None for c in self.strip}}),
        )

    @classmethod
    def from_tsv(cls, lines: Iterable[str]) -> "NormalizationRules":
        subs, strip = {}, set()
        for lineno, line in enumerate(lines, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected '<hex>\\t<replacement>'")
            try:
                ch = chr(int(parts[0], 16))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad code point {parts[0]!r}") from exc
            if parts[1] == DELETE:
                strip.add(ch)
            else:
                subs[ch] = parts[1]
        return cls(subs, frozenset(strip))

    @classmethod
    def load(cls, path: str | Path) -> "NormalizationRules":
        with open(path, encoding="utf-8") as f:
            return cls.from_tsv(f)

    @classmethod
    def default(cls) -> "NormalizationRules":
        text = resources.files("adaptkit").joinpath("data/normalize.tsv").read_text("utf-8")
        return cls.from_tsv(text.splitlines())


_DEFAULT_RULES: NormalizationRules | None = None


def default_rules() -> NormalizationRules:
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        _DEFAULT_RULES = NormalizationRules.default()
    return _DEFAULT_RULES


def decode_utf8(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise NormalizationDecodeError(exc.start, exc.reason) from None


def normalize(text: str | bytes, rules: NormalizationRules | None = None) -> str:
    if isinstance(text, (bytes, bytearray)):
        text = decode_utf8(bytes(text))
    rules = rules or default_rules()
    return text.translate(rules._table)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def tokenize(text: str) -> list[str]:
    """Whitespace split, then peel punctuation off both ends of each chunk.

    Punctuation inside a chunk ("3.75", "don't") stays attached.
    """
    tokens = []
    for chunk in text.split():
        i, j = 0, len(chunk)
        while i < j and _is_punct(chunk[i]):
            i += 1
        while j > i and _is_punct(chunk[j - 1]):
            j -= 1
        tokens.extend(chunk[:i])
        if i < j:
            tokens.append(chunk[i:j])
        tokens.extend(chunk[j:])
    return tokens


def length_filter(corpus: Iterable[SentencePair], max_len: int = DEFAULT_MAX_LEN) -> Iterator[SentencePair]:
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    for pair in corpus:
        if len(pair.source) <= max_len and len(pair.target) <= max_len:
            yield pair


def parse_pharaoh(line: str) -> frozenset[tuple[int, int]]:
    links = set()
    for item in line.split():
        i, sep, j = item.partition("-")
        if not sep:
            raise CorpusError(f"bad alignment link {item!r}")
        links.add((int(i), int(j)))
    return frozenset(links)


def format_pharaoh(links: Iterable[tuple[int, int]]) -> str:
    return " ".join(f"{i}-{j}" for i, j in sorted(links))


def read_lines(path: str | Path) -> Iterator[str]:
    with open(path, "rb") as f:
        for lineno, raw in enumerate(f, 1):
            try:
                yield raw.decode("utf-8").rstrip("\r\n")
            except UnicodeDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid UTF-8 at byte {exc.start}") from None


def read_tokenized(path: str | Path) -> Iterator[list[str]]:
    for line in read_lines(path):
        yield line.split()


def read_parallel(src: str | Path, tgt: str | Path, align: str | Path | None = None) -> Iterator[SentencePair]:
    streams = [read_lines(src), read_lines(tgt)]
    if align is not None:
        streams.append(read_lines(align))
    for n, lines in enumerate(zip_longest(*streams), 1):
        if any(line is None for line in lines):
            raise CorpusError(f"parallel files differ in length at line {n}")
        links = parse_pharaoh(lines[2]) if align is not None else None
        try:
            yield SentencePair(lines[0].split(), lines[1].split(), links)
        except CorpusError as exc:
            raise CorpusError(f"line {n}: {exc}") from None


def write_parallel(pairs: Iterable[SentencePair], src: str | Path, tgt: str | Path,
                   align: str | Path | None = None) -> int:
    n = 0
    fa = open(align, "w", encoding="utf-8") if align is not None else None
    try:
        with open(src, "w", encoding="utf-8") as fs, open(tgt, "w", encoding="utf-8") as ft:
            for pair in pairs:
                fs.write(" ".join(pair.source) + "\n")
                ft.write(" ".join(pair.target) + "\n")
                if fa is not None:
                    fa.write(format_pharaoh(pair.alignment or ()) + "\n")
                n += 1
    finally:
        if fa is not None:
            fa.close()
    return n
