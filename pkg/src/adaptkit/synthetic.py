"""Deterministic synthetic corpora for tests and desk-scale runs.

The bilingual generator emits Arabic-script source text (with diacritics,
alef variants and Arabic-Indic digits for the normalizer to remove) and a
Latin-script target, already space-separated, plus Pharaoh alignments.
Two domains share a common lexicon but draw topic words from disjoint
pools, so cross-entropy selection has something to find.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import accumulate
from dataclasses import dataclass
from pathlib import Path

_AR_LETTERS = "بتثجحخدذرزسشصضطظعغفقكلمنهوي"
_AR_DIACRITICS = [chr(c) for c in range(0x064B, 0x0653)]
_ALEF_VARIANTS = "أإآ"
_AR_DIGITS = "٠١٢٣٤٥٦٧٨٩"
_EN_ONSETS = ["b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w",
              "st", "tr", "pl", "gr", "sh", "th"]
_EN_VOWELS = ["a", "e", "i", "o", "u", "ea", "ou"]
_EN_CODAS = ["", "n", "r", "s", "t", "l", "nd", "ng", "ck"]


@lru_cache(maxsize=None)
def _zipf_cum(n: int, s: float = 1.1) -> list[float]:
    return list(accumulate(1.0 / (i + 1) ** s for i in range(n)))


def _latin_word(rng: random.Random, syllables: int) -> str:
    return "".join(rng.choice(_EN_ONSETS) + rng.choice(_EN_VOWELS) + rng.choice(_EN_CODAS)
                   for _ in range(syllables))


def _arabic_word(rng: random.Random, length: int) -> str:
    word = "".join(rng.choice(_AR_LETTERS) for _ in range(length))
    return ("ا" + word) if rng.random() < 0.3 else word


def _unique(make, rng, n, taken):
    out = []
    while len(out) < n:
        w = make(rng)
        if w not in taken:
            taken.add(w)
            out.append(w)
    return out


@dataclass
class Lexicon:
    common: list[tuple[str, str]]
    topics: dict[str, list[tuple[str, str]]]
    src_particles: list[str]
    tgt_function: list[str]


def make_lexicon(seed: int = 0, common: int = 300, topic: int = 400,
                 domains: tuple[str, ...] = ("in", "out")) -> Lexicon:
    rng = random.Random(seed)
    src_taken, tgt_taken = set(), set()

    def pairs(n):
        src = _unique(lambda r: _arabic_word(r, r.randint(2, 6)), rng, n, src_taken)
        tgt = _unique(lambda r: _latin_word(r, r.randint(1, 3)), rng, n, tgt_taken)
        return list(zip(src, tgt))

    lex_common = pairs(common)
    topics = {d: pairs(topic) for d in domains}
    particles = _unique(lambda r: _arabic_word(r, 1), rng, 6, src_taken)
    function = [w for w in ("the", "of", "a", "to", "and", "is") if w not in tgt_taken]
    return Lexicon(lex_common, topics, particles, function)


def _decorate(word: str, rng: random.Random) -> str:
    """Add noise that the default normalizer removes."""
    chars = []
    for ch in word:
        if ch == "ا" and rng.random() < 0.3:
            ch = rng.choice(_ALEF_VARIANTS)
        chars.append(ch)
        if rng.random() < 0.08:
            chars.append(rng.choice(_AR_DIACRITICS))
    return "".join(chars)


def generate_pair(lex: Lexicon, domain: str, rng: random.Random, topic_share: float = 0.6):
    """Return (source tokens, target tokens, links) for one sentence."""
    topic = lex.topics[domain]
    n = rng.randint(3, 14)
    content = []
    cw, tw = _zipf_cum(len(lex.common)), _zipf_cum(len(topic))
    for _ in range(n):
        pool, cum = (topic, tw) if rng.random() < topic_share else (lex.common, cw)
        content.append(rng.choices(pool, cum_weights=cum)[0])
    order = list(range(n))
    i = 0
    while i < n - 1:
        if rng.random() < 0.25:
            order[i], order[i + 1] = order[i + 1], order[i]
            i += 2
        else:
            i += 1

    src, src_pos = [], []
    for k, (s, _) in enumerate(content):
        if rng.random() < 0.1:
            src.append(rng.choice(lex.src_particles))
        src_pos.append(len(src))
        src.append(_decorate(s, rng))
    tgt, links = [], []
    for k in order:
        if rng.random() < 0.15:
            tgt.append(rng.choice(lex.tgt_function))
        links.append((src_pos[k], len(tgt)))
        tgt.append(content[k][1])
    if rng.random() < 0.1:
        digits = "".join(rng.choice(_AR_DIGITS) for _ in range(rng.randint(1, 3)))
        links.append((len(src), len(tgt)))
        src.append(digits)
        tgt.append(digits.translate(str.maketrans(_AR_DIGITS, "0123456789")))
    end = rng.choice([".", ".", "?"])
    links.append((len(src), len(tgt)))
    src.append("؟" if end == "?" else ".")
    tgt.append(end)
    return src, tgt, links


def monolingual_corpus(n: int, seed: int = 0, domain: str = "in", side: str = "tgt") -> list[list[str]]:
    lex = make_lexicon(seed)
    rng = random.Random(seed + 1)
    out = []
    for _ in range(n):
        src, tgt, _ = generate_pair(lex, domain, rng)
        out.append(tgt if side == "tgt" else src)
    return out


FIXTURE_SIZES = {"ted": 1200, "un": 8000, "dev": 400, "tst": 400}


def write_bilingual_fixture(out_dir: str | Path, seed: int = 42,
                            sizes: dict[str, int] | None = None,
                            planted_share: float = 0.1) -> dict[str, dict[str, Path]]:
    """Write ted/un/dev/tst corpora (``.ar``, ``.en``, ``.align``) plus noisy system output.

    ``un`` is out-of-domain with ``planted_share`` of its pairs drawn from
    the in-domain distribution. ``tst.hyp.en`` is a corrupted copy of the
    test references that stands in for decoder output.
    """
    sizes = {**FIXTURE_SIZES, **(sizes or {})}
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lex = make_lexicon(seed)
    rng = random.Random(seed)
    files = {}
    for name, n in sizes.items():
        paths = {ext: out / f"{name}.{ext}" for ext in ("ar", "en", "align")}
        with open(paths["ar"], "w", encoding="utf-8") as fa, \
             open(paths["en"], "w", encoding="utf-8") as fe, \
             open(paths["align"], "w", encoding="utf-8") as fl:
            for _ in range(n):
                domain = "in"
                if name == "un" and rng.random() >= planted_share:
                    domain = "out"
                src, tgt, links = generate_pair(lex, domain, rng)
                fa.write(" ".join(src) + "\n")
                fe.write(" ".join(tgt) + "\n")
                fl.write(" ".join(f"{i}-{j}" for i, j in sorted(links)) + "\n")
        files[name] = paths
    hyp = out / "tst.hyp.en"
    vocab = [t for _, t in lex.common]
    with open(files["tst"]["en"], encoding="utf-8") as fr, open(hyp, "w", encoding="utf-8") as fh:
        for line in fr:
            toks = [rng.choice(vocab) if rng.random() < 0.2 else t for t in line.split()]
            toks = [t for t in toks if rng.random() >= 0.05]
            fh.write(" ".join(toks) + "\n")
    files["tst"]["hyp"] = hyp
    return files
