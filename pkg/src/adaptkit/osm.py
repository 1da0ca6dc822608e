"""Operation-sequence encoding of word-aligned sentence pairs.

The encoder walks the target left to right and places each linked source
word relative to a source cursor. Skipped source material is parked in
gap placeholders (INSERT_GAP); JUMP_BACK(k) re-enters the k-th placeholder
to the left of the cursor, counted from the right, and consumes it;
JUMP_FWD returns to the right end of the covered source. When the cursor
leaves a re-entered gap that still has uncovered words, a fresh
INSERT_GAP parks the remainder, so every placeholder the decoder sees is
an open gap.

Alignments are first reduced to a partial one-to-one map: each target
word keeps its lowest-index link whose source word is not already taken
by an earlier target word. Unlinked source words are emitted with
GEN_SRC_ONLY as soon as the cursor reaches them; unlinked target words
with GEN_TGT_ONLY.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .text import SentencePair

GEN = "GEN"
GEN_IDENT = "GEN_IDENT"
GEN_SRC_ONLY = "GEN_SRC_ONLY"
GEN_TGT_ONLY = "GEN_TGT_ONLY"
INSERT_GAP = "INSERT_GAP"
JUMP_BACK = "JUMP_BACK"
JUMP_FWD = "JUMP_FWD"

KINDS = (GEN, GEN_IDENT, GEN_SRC_ONLY, GEN_TGT_ONLY, INSERT_GAP, JUMP_BACK, JUMP_FWD)
REORDERING = (INSERT_GAP, JUMP_BACK, JUMP_FWD)

# serialized names carry no underscore so the first field is always the kind
_TAGS = {GEN: "GEN", GEN_IDENT: "IDENT", GEN_SRC_ONLY: "SRCONLY", GEN_TGT_ONLY: "TGTONLY",
         INSERT_GAP: "GAP", JUMP_BACK: "JUMPBACK", JUMP_FWD: "JUMPFWD"}
_KIND_OF_TAG = {v: k for k, v in _TAGS.items()}


class OsmError(ValueError):
    pass


@dataclass(frozen=True)
class Operation:
    kind: str
    src: str | None = None
    tgt: str | None = None
    jump: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise OsmError(f"unknown operation kind {self.kind!r}")
        if self.kind == JUMP_BACK and self.jump < 1:
            raise OsmError("JUMP_BACK distance must be >= 1")
        if self.kind in (GEN, GEN_IDENT, GEN_SRC_ONLY) and not self.src:
            raise OsmError(f"{self.kind} needs a source token")
        if self.kind in (GEN, GEN_TGT_ONLY) and not self.tgt:
            raise OsmError(f"{self.kind} needs a target token")

    def __str__(self):
        if self.kind == GEN:
            return f"GEN({self.src},{self.tgt})"
        if self.kind in (GEN_IDENT, GEN_SRC_ONLY):
            return f"{self.kind}({self.src})"
        if self.kind == GEN_TGT_ONLY:
            return f"{self.kind}({self.tgt})"
        if self.kind == JUMP_BACK:
            return f"JUMP_BACK({self.jump})"
        return self.kind


def gen(src: str, tgt: str) -> Operation:
    return Operation(GEN_IDENT, src) if src == tgt else Operation(GEN, src, tgt)


@dataclass(frozen=True)
class OperationSequence:
    ops: tuple[Operation, ...]
    source_length: int
    target_length: int

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)


def functionalize(pair: SentencePair) -> dict[int, int]:
    """target index -> source index, one-to-one."""
    links: dict[int, list[int]] = {}
    for i, j in pair.alignment or ():
        links.setdefault(j, []).append(i)
    taken: set[int] = set()
    out = {}
    for j in range(len(pair.target)):
        for i in sorted(links.get(j, ())):
            if i not in taken:
                taken.add(i)
                out[j] = i
                break
    return out


class _Gap:
    __slots__ = ("lo", "hi")

    def __init__(self, lo: int, hi: int):
        self.lo, self.hi = lo, hi


def osm_encode(pair: SentencePair) -> OperationSequence:
    if not pair.source or not pair.target:
        raise OsmError("cannot encode a pair with an empty side")
    if pair.alignment is None:
        raise OsmError("pair has no alignment")
    src, tgt = pair.source, pair.target
    t2s = functionalize(pair)
    linked = set(t2s.values())
    n = len(src)

    ops: list[Operation] = []
    # seq mirrors the decoder: source positions (int) and open gaps (_Gap)
    seq: list = []
    cursor = 0          # insertion index into seq
    frontier = 0        # first source position never reached at the right end
    region: _Gap | None = None  # re-entered gap the cursor sits in, None at the right end

    def next_pos():
        return frontier if region is None else region.lo

    def region_end():
        return n if region is None else region.hi

    def place(pos):
        nonlocal cursor, frontier
        seq.insert(cursor, pos)
        cursor += 1
        if region is None:
            frontier = pos + 1
        else:
            region.lo = pos + 1

    def flush_unlinked():
        while next_pos() < region_end() and next_pos() not in linked:
            pos = next_pos()
            ops.append(Operation(GEN_SRC_ONLY, src[pos]))
            place(pos)

    def park_remainder():
        nonlocal cursor
        if region is not None and region.lo < region.hi:
            ops.append(Operation(INSERT_GAP))
            seq.insert(cursor, _Gap(region.lo, region.hi))
            cursor += 1

    flush_unlinked()
    for j, word in enumerate(tgt):
        s = t2s.get(j)
        if s is None:
            ops.append(Operation(GEN_TGT_ONLY, tgt=word))
            continue
        if not (next_pos() <= s < region_end()):
            park_remainder()
            if s >= frontier:
                if region is not None:
                    ops.append(Operation(JUMP_FWD))
                    cursor = len(seq)
                    region = None
            else:
                gap_idx = next(k for k, item in enumerate(seq)
                               if isinstance(item, _Gap) and item.lo <= s < item.hi)
                if gap_idx > cursor:
                    ops.append(Operation(JUMP_FWD))
                    cursor = len(seq)
                k = sum(1 for item in seq[gap_idx:cursor] if isinstance(item, _Gap))
                ops.append(Operation(JUMP_BACK, jump=k))
                region = seq.pop(gap_idx)
                cursor = gap_idx
        if s > next_pos():
            ops.append(Operation(INSERT_GAP))
            seq.insert(cursor, _Gap(next_pos(), s))
            cursor += 1
        ops.append(gen(src[s], word))
        place(s)
        flush_unlinked()
    if any(isinstance(item, _Gap) for item in seq) or (region is not None and region.lo < region.hi):
        raise AssertionError("encoder left uncovered source words")
    if frontier < n:
        raise AssertionError("encoder left trailing source words")
    return OperationSequence(tuple(ops), n, len(tgt))


def osm_decode(seq: OperationSequence | Sequence[Operation]) -> SentencePair:
    ops = seq.ops if isinstance(seq, OperationSequence) else tuple(seq)
    gap = object()
    items: list = []   # (source token, target index or None) or the gap marker
    cursor = 0
    target: list[str] = []
    for idx, op in enumerate(ops):
        if op.kind in (GEN, GEN_IDENT):
            items.insert(cursor, (op.src, len(target)))
            target.append(op.tgt if op.kind == GEN else op.src)
            cursor += 1
        elif op.kind == GEN_SRC_ONLY:
            items.insert(cursor, (op.src, None))
            cursor += 1
        elif op.kind == GEN_TGT_ONLY:
            target.append(op.tgt)
        elif op.kind == INSERT_GAP:
            items.insert(cursor, gap)
            cursor += 1
        elif op.kind == JUMP_BACK:
            gaps = [k for k in range(cursor) if items[k] is gap]
            if op.jump > len(gaps):
                raise OsmError(f"operation {idx}: JUMP_BACK({op.jump}) but only {len(gaps)} open gap(s)")
            cursor = gaps[-op.jump]
            del items[cursor]
        elif op.kind == JUMP_FWD:
            cursor = len(items)
    if any(item is gap for item in items):
        raise OsmError(f"operation {len(ops) - 1}: sequence ends with an unfilled gap")
    source = [tok for tok, _ in items]
    links = frozenset((i, j) for i, (_, j) in enumerate(items) if j is not None)
    if isinstance(seq, OperationSequence):
        if len(source) != seq.source_length or len(target) != seq.target_length:
            raise OsmError("decoded lengths disagree with the sequence header")
    return SentencePair(source, target, links)


def _escape(tok: str) -> str:
    return tok.replace("\\", "\\\\").replace("_", "\\_")


def serialize(op: Operation) -> str:
    fields = [_TAGS[op.kind]]
    if op.kind in (GEN, GEN_IDENT, GEN_SRC_ONLY):
        fields.append(_escape(op.src))
    if op.kind in (GEN, GEN_TGT_ONLY):
        fields.append(_escape(op.tgt))
    if op.kind == JUMP_BACK:
        fields.append(str(op.jump))
    return "_".join(fields)


def parse_token(token: str) -> Operation:
    fields, buf, i = [], [], 0
    while i < len(token):
        ch = token[i]
        if ch == "\\" and i + 1 < len(token):
            buf.append(token[i + 1])
            i += 2
            continue
        if ch == "_":
            fields.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    fields.append("".join(buf))
    kind = _KIND_OF_TAG.get(fields[0])
    if kind is None:
        raise OsmError(f"unknown operation token {token!r}")
    args = fields[1:]
    if kind == GEN:
        return Operation(GEN, args[0], args[1])
    if kind in (GEN_IDENT, GEN_SRC_ONLY):
        return Operation(kind, args[0])
    if kind == GEN_TGT_ONLY:
        return Operation(kind, tgt=args[0])
    if kind == JUMP_BACK:
        return Operation(kind, jump=int(args[0]))
    return Operation(kind)


def map_pair(pair: SentencePair, src_map: Mapping[str, str] | None,
             tgt_map: Mapping[str, str] | None, unknown: str = "<unk>") -> SentencePair:
    src = [src_map.get(t, unknown) for t in pair.source] if src_map else pair.source
    tgt = [tgt_map.get(t, unknown) for t in pair.target] if tgt_map else pair.target
    return SentencePair(src, tgt, pair.alignment)


def osm_corpus(pairs: Iterable[SentencePair], src_map: Mapping[str, str] | None = None,
               tgt_map: Mapping[str, str] | None = None) -> list[list[str]]:
    """One serialized operation line per pair.

    Passing word-class maps yields the class-based OSM stream (tokens are
    mapped before encoding).
    """
    lines = []
    for idx, pair in enumerate(pairs):
        if src_map or tgt_map:
            pair = map_pair(pair, src_map, tgt_map)
        try:
            seq = osm_encode(pair)
        except OsmError as exc:
            raise OsmError(f"pair {idx}: {exc}") from None
        lines.append([serialize(op) for op in seq])
    return lines
