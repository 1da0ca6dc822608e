"""Config-driven runner that chains the toolkit into the adaptation recipe.

Config files are INI-style::

    [pipeline]
    seed = 42
    src = ar
    tgt = en

    [corpus ted]
    role = in-domain
    src = ted.ar
    tgt = ted.en
    align = ted.align

    [stage select]
    fraction = 0.1

Stages run in the order they are declared. Each stage writes into a
private temporary directory that is renamed into place only when the stage
succeeds; the manifest (``manifest.tsv``: stage, path, sha256) is rewritten
atomically after every completed stage.
"""

from __future__ import annotations

import configparser
import hashlib
import logging
import math
import os
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import bpe as bpe_mod
from .classes import ClassMap, apply_classes, cluster_exchange
from .evaluation import bleu, progress_table
from .lm import ArpaError, export_arpa, train_lm
from .lm.model import evaluate
from .mixture import MixtureModel, ZeroProbabilityError, em_fit, merge_static, save_weights
from .oov import TranslitTable, drop_oov, find_oov, transliterate_oov
from .osm import OsmError, osm_corpus
from .selection import (SWEEP_FRACTIONS, score_corpus, select_fraction,
                        train_scoring_lms, write_scores)
from .text import (CorpusError, NormalizationRules, format_pharaoh, length_filter, normalize,
                   read_parallel, tokenize)

log = logging.getLogger(__name__)

ROLES = ("in-domain", "out-domain", "tune", "test")
EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
MANIFEST = "manifest.tsv"


class ConfigError(ValueError):
    pass


class NumericError(ArithmeticError):
    pass


@dataclass
class CorpusDecl:
    name: str
    role: str
    src: Path
    tgt: Path
    align: Path | None = None


@dataclass
class StageDecl:
    kind: str
    params: dict[str, str]
    label: str


@dataclass
class PipelineConfig:
    corpora: list[CorpusDecl]
    stages: list[StageDecl]
    seed: int = 42
    src_lang: str = "src"
    tgt_lang: str = "tgt"
    base_dir: Path = Path(".")

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        return cls.parse(path.read_text(encoding="utf-8"), path.parent)

    @classmethod
    def parse(cls, text: str, base_dir: str | Path = ".") -> "PipelineConfig":
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        base = Path(base_dir)
        corpora, stages = [], []
        settings = dict(parser["pipeline"]) if parser.has_section("pipeline") else {}
        for section in parser.sections():
            kind, _, name = section.partition(" ")
            opts = dict(parser[section])
            if kind == "corpus":
                if not name:
                    raise ConfigError("corpus section needs a name: [corpus NAME]")
                missing = [k for k in ("role", "src", "tgt") if k not in opts]
                if missing:
                    raise ConfigError(f"[{section}] missing {', '.join(missing)}")
                align = opts.get("align")
                corpora.append(CorpusDecl(name, opts["role"], base / opts["src"], base / opts["tgt"],
                                          base / align if align else None))
            elif kind == "stage":
                stage_kind = name.partition(":")[0]
                stages.append(StageDecl(stage_kind, opts, name.replace(":", "-")))
            elif kind != "pipeline":
                raise ConfigError(f"unknown section [{section}]")
        try:
            seed = int(settings.get("seed", 42))
        except ValueError:
            raise ConfigError("seed must be an integer") from None
        cfg = cls(corpora, stages, seed, settings.get("src", "src"), settings.get("tgt", "tgt"), base)
        cfg.validate()
        return cfg

    def by_role(self, role: str) -> list[CorpusDecl]:
        return [c for c in self.corpora if c.role == role]

    def validate(self) -> None:
        for c in self.corpora:
            if c.role not in ROLES:
                raise ConfigError(f"corpus {c.name}: role must be one of {ROLES}")
        names = [c.name for c in self.corpora]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate corpus names")
        labels = [s.label for s in self.stages]
        if len(set(labels)) != len(labels):
            raise ConfigError("duplicate stage labels; use [stage kind:suffix]")
        needs_corpora = any(s.kind not in ("bleu", "report") for s in self.stages)
        if needs_corpora:
            if len(self.by_role("tune")) != 1:
                raise ConfigError("exactly one tune corpus is required")
            if not self.by_role("in-domain"):
                raise ConfigError("at least one in-domain corpus is required")
        for s in self.stages:
            spec = STAGES.get(s.kind)
            if spec is None:
                raise ConfigError(f"unknown stage {s.kind!r}")
            for key in s.params:
                if key not in spec.params:
                    raise ConfigError(f"stage {s.label}: unknown parameter {key!r}")
            for key, conv in spec.params.items():
                if key in s.params:
                    try:
                        conv(s.params[key])
                    except (ValueError, TypeError) as exc:
                        raise ConfigError(f"stage {s.label}: bad {key}={s.params[key]!r}: {exc}") from None
            if spec.check:
                spec.check(self, s)

    def input_files(self) -> list[Path]:
        files = []
        for c in self.corpora:
            files += [c.src, c.tgt] + ([c.align] if c.align else [])
        for s in self.stages:
            for key in STAGES[s.kind].file_params:
                if key in s.params:
                    files += [self.base_dir / p for p in s.params[key].split()]
        return files


def _bool(v: str) -> bool:
    v = v.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _pos_int(v: str) -> int:
    n = int(v)
    if n < 1:
        raise ValueError("must be >= 1")
    return n


def _nonneg_int(v: str) -> int:
    n = int(v)
    if n < 0:
        raise ValueError("must be >= 0")
    return n


def _fraction(v: str) -> float:
    f = float(v)
    if not 0 < f <= 1:
        raise ValueError("must be in (0, 1]")
    return f


def _fractions(v: str) -> list[float]:
    return [_fraction(x) for x in v.split()]


def _choice(*options):
    def conv(v):
        if v not in options:
            raise ValueError(f"expected one of {options}")
        return v
    return conv


def _roles(v: str) -> list[str]:
    roles = v.split()
    for r in roles:
        if r not in ROLES:
            raise ValueError(f"unknown role {r}")
    return roles


class Context:
    def __init__(self, config: PipelineConfig, out_dir: Path):
        self.config = config
        self.out = out_dir
        self.corpora = {c.name: {"src": c.src, "tgt": c.tgt, "align": c.align} for c in config.corpora}
        self.roles = {c.name: c.role for c in config.corpora}
        self.manifest: list[tuple[str, str, str]] = []
        self.tmp: Path | None = None
        self.files: list[str] = []
        self.class_maps: dict[str, ClassMap] = {}

    def names(self, *roles: str) -> list[str]:
        return [n for n, r in self.roles.items() if r in roles]

    def artifact(self, rel: str) -> Path:
        assert self.tmp is not None
        path = self.tmp / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        self.files.append(rel)
        return path

    def write_lines(self, rel: str, lines) -> Path:
        path = self.artifact(rel)
        with open(path, "w", encoding="utf-8") as f:
            for line in lines:
                f.write((line if isinstance(line, str) else " ".join(line)) + "\n")
        return path

    def write_text(self, rel: str, text: str) -> Path:
        path = self.artifact(rel)
        path.write_text(text, encoding="utf-8")
        return path

    def final(self, stage: StageDecl, rel: str) -> Path:
        return self.out / stage.label / rel

    def read(self, name: str, side: str) -> list[list[str]]:
        with open(self.corpora[name][side], encoding="utf-8") as f:
            return [line.split() for line in f]

    def pairs(self, name: str, aligned: bool = False):
        c = self.corpora[name]
        if aligned and c["align"] is None:
            raise CorpusError(f"corpus {name} has no alignment")
        return list(read_parallel(c["src"], c["tgt"], c["align"] if aligned else None))

    def param(self, stage: StageDecl, key: str, default=None):
        if key in stage.params:
            return STAGES[stage.kind].params[key](stage.params[key])
        return default


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _write_manifest(out: Path, rows) -> None:
    tmp = out / (MANIFEST + ".tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        for stage, rel, digest in rows:
            f.write(f"{stage}\t{rel}\t{digest}\n")
    os.replace(tmp, out / MANIFEST)


# --- stages -----------------------------------------------------------------

def stage_normalize(ctx: Context, stage: StageDecl) -> dict:
    rules_path = stage.params.get("rules")
    rules = NormalizationRules.load(ctx.config.base_dir / rules_path) if rules_path else None
    updates = {}
    for name, files in ctx.corpora.items():
        upd = {}
        aligned = files["align"] is not None
        for side, lang in (("src", ctx.config.src_lang), ("tgt", ctx.config.tgt_lang)):
            out_lines = []
            with open(files[side], "rb") as f:
                for lineno, raw in enumerate(f, 1):
                    try:
                        text = normalize(raw.rstrip(b"\r\n"), rules)
                    except CorpusError as exc:
                        raise CorpusError(f"{files[side]}:{lineno}: {exc}") from None
                    toks = tokenize(text)
                    if aligned and len(toks) != len(raw.split()):
                        raise CorpusError(f"{files[side]}:{lineno}: normalization changed the token "
                                          "count of an aligned line")
                    out_lines.append(toks)
            rel = f"{name}.{lang}"
            ctx.write_lines(rel, out_lines)
            upd[side] = rel
        if aligned:
            rel = f"{name}.align"
            path = ctx.artifact(rel)
            shutil.copyfile(files["align"], path)
            upd["align"] = rel
        updates[name] = upd
    return updates


def stage_filter(ctx: Context, stage: StageDecl) -> dict:
    max_len = ctx.param(stage, "max_len", 80)
    updates = {}
    for name in ctx.names("in-domain", "out-domain"):
        aligned = ctx.corpora[name]["align"] is not None
        kept = list(length_filter(ctx.pairs(name, aligned), max_len))
        src, tgt = f"{name}.{ctx.config.src_lang}", f"{name}.{ctx.config.tgt_lang}"
        ctx.write_lines(src, (p.source for p in kept))
        ctx.write_lines(tgt, (p.target for p in kept))
        upd = {"src": src, "tgt": tgt}
        if aligned:
            ctx.write_lines(f"{name}.align", (format_pharaoh(p.alignment) for p in kept))
            upd["align"] = f"{name}.align"
        updates[name] = upd
    return updates


def _concat(ctx: Context, names, side) -> list[list[str]]:
    out = []
    for n in names:
        out += ctx.read(n, side)
    return out


def stage_select(ctx: Context, stage: StageDecl) -> dict:
    fraction = ctx.param(stage, "fraction", 0.0375)
    order = ctx.param(stage, "order", 5)
    sweep = ctx.param(stage, "sweep", list(SWEEP_FRACTIONS))
    mode = ctx.param(stage, "mode", "bilingual")
    seed = ctx.config.seed
    in_names = ctx.names("in-domain")
    in_src, in_tgt = _concat(ctx, in_names, "src"), _concat(ctx, in_names, "tgt")
    updates = {}
    for name in ctx.names("out-domain"):
        pairs = ctx.pairs(name, ctx.corpora[name]["align"] is not None)
        lm_in_src, lm_out_src = train_scoring_lms(in_src, [p.source for p in pairs], order, seed)
        if mode == "bilingual":
            lm_in_tgt, lm_out_tgt = train_scoring_lms(in_tgt, [p.target for p in pairs], order, seed)
            scores = score_corpus(pairs, lm_in_src, lm_out_src, lm_in_tgt, lm_out_tgt)
        else:
            scores = score_corpus(pairs, lm_in_src, lm_out_src)
        if not all(math.isfinite(s.score) for s in scores):
            raise NumericError(f"non-finite selection score in corpus {name}")
        write_scores(ctx.artifact(f"{name}.scores.tsv"), scores)
        for f in sorted(set(sweep) | {fraction}):
            idx = select_fraction(scores, f)
            ctx.write_lines(f"{name}.sweep.{f:g}.txt", (str(i) for i in idx))
        chosen = select_fraction(scores, fraction)
        ctx.write_lines(f"{name}.indices.txt", (str(i) for i in chosen))
        kept = [pairs[i] for i in chosen]
        src, tgt = f"{name}.selected.{ctx.config.src_lang}", f"{name}.selected.{ctx.config.tgt_lang}"
        ctx.write_lines(src, (p.source for p in kept))
        ctx.write_lines(tgt, (p.target for p in kept))
        upd = {"src": src, "tgt": tgt}
        if pairs and pairs[0].alignment is not None:
            ctx.write_lines(f"{name}.selected.align", (format_pharaoh(p.alignment) for p in kept))
            upd["align"] = f"{name}.selected.align"
        updates[name] = upd
    return updates


def _interpolate(ctx: Context, stage: StageDecl, streams: dict[str, list], tune: list, test: dict,
                 prefix: str, order: int, merge: bool) -> None:
    """Train one LM per stream, fit weights on ``tune``, report perplexities."""
    names = list(streams)
    models = []
    for n in names:
        model = train_lm(streams[n], order)
        export_arpa(model, ctx.artifact(f"{prefix}{n}.arpa"))
        models.append(model)
    concat = train_lm([s for n in names for s in streams[n]], order)
    if len(models) >= 2:
        weights, trace = em_fit(models, tune)
        if not all(math.isfinite(p) for p in trace.perplexities):
            raise NumericError("EM produced a non-finite perplexity")
        mix = MixtureModel(models, weights)
    else:
        weights, trace, mix = [1.0], None, models[0]
    save_weights(ctx.artifact(f"{prefix}weights.tsv"),
                 [f"{stage.label}/{prefix}{n}.arpa" for n in names], weights)
    # perplexities over different vocabularies are not directly comparable
    rows = [("component", "weight", "vocab", "tune_ppl", *(f"{t}_ppl" for t in test))]
    labelled = [(n, f"{float(w):.6f}", m) for n, m, w in zip(names, models, weights)]
    labelled += [("concatenated", "", concat), ("interpolated", "", mix)]
    for label, weight, model in labelled:
        rows.append((label, weight, str(len(model.event_words())), f"{evaluate(model, tune).perplexity:.4f}",
                     *(f"{evaluate(model, t).perplexity:.4f}" for t in test.values())))
    if trace is not None:
        ctx.write_lines(f"{prefix}em_trace.txt", (f"{i}\t{p:.10f}" for i, p in enumerate(trace.perplexities)))
        if merge:
            export_arpa(merge_static(mix), ctx.artifact(f"{prefix}merged.arpa"))
    ctx.write_lines(f"{prefix}report.tsv", ("\t".join(r) for r in rows))


def stage_lm(ctx: Context, stage: StageDecl) -> dict:
    order = ctx.param(stage, "order", 5)
    train = ctx.names("in-domain", "out-domain")
    streams = {n: ctx.read(n, "tgt") for n in train}
    tune = ctx.read(ctx.names("tune")[0], "tgt")
    test = {n: ctx.read(n, "tgt") for n in ctx.names("test")}
    _interpolate(ctx, stage, streams, tune, test, "", order, ctx.param(stage, "merge", True))
    return {}


def _class_maps(ctx: Context) -> tuple[dict | None, dict | None]:
    maps = ctx.class_maps
    src = maps["src"].token_map() if "src" in maps else None
    tgt = maps["tgt"].token_map() if "tgt" in maps else None
    return src, tgt


def stage_osm(ctx: Context, stage: StageDecl) -> dict:
    order = ctx.param(stage, "order", 5)
    use_classes = ctx.param(stage, "classes", False)
    src_map = tgt_map = None
    if use_classes:
        src_map, tgt_map = _class_maps(ctx)
        if src_map is None or tgt_map is None:
            raise ConfigError(f"stage {stage.label}: classes=true needs an earlier classes stage")
    train = ctx.names("in-domain", "out-domain")
    streams = {}
    for n in train:
        streams[n] = osm_corpus(ctx.pairs(n, aligned=True), src_map, tgt_map)
        ctx.write_lines(f"{n}.ops", streams[n])
    tune_name = ctx.names("tune")[0]
    tune = osm_corpus(ctx.pairs(tune_name, aligned=True), src_map, tgt_map)
    ctx.write_lines(f"{tune_name}.ops", tune)
    test = {n: osm_corpus(ctx.pairs(n, aligned=True), src_map, tgt_map)
            for n in ctx.names("test") if ctx.corpora[n]["align"] is not None}
    _interpolate(ctx, stage, streams, tune, test, "osm.", order, ctx.param(stage, "merge", False))
    return {}


def stage_classes(ctx: Context, stage: StageDecl) -> dict:
    k = ctx.param(stage, "k", 50)
    sweeps = ctx.param(stage, "sweeps", 30)
    order = ctx.param(stage, "order", 5)
    roles = ctx.param(stage, "corpus", ["in-domain"])
    names = ctx.names(*roles)
    maps = {}
    for side, lang in (("src", ctx.config.src_lang), ("tgt", ctx.config.tgt_lang)):
        text = _concat(ctx, names, side)
        cmap, trace = cluster_exchange(text, k, sweeps)
        cmap.save(ctx.artifact(f"classes.{lang}.tsv"))
        ctx.write_lines(f"classes.{lang}.trace", (f"{v:.6f}" for v in trace))
        maps[side] = cmap
    ctx.class_maps = maps
    tgt_map = maps["tgt"]
    streams = {n: apply_classes(tgt_map, ctx.read(n, "tgt")) for n in names}
    tune = apply_classes(tgt_map, ctx.read(ctx.names("tune")[0], "tgt"))
    model = train_lm([s for v in streams.values() for s in v], order)
    export_arpa(model, ctx.artifact(f"class_lm.{ctx.config.tgt_lang}.arpa"))
    ctx.write_lines("class_lm.report.tsv",
                    [f"tune_ppl\t{evaluate(model, tune).perplexity:.4f}",
                     f"vocab\t{model.ngram_counts()[0]}"])
    return {}


def stage_bpe(ctx: Context, stage: StageDecl) -> dict:
    merges = ctx.param(stage, "merges", bpe_mod.DEFAULT_MERGES)
    roles = ctx.param(stage, "corpus", ["in-domain"])
    names = ctx.names(*roles)
    for side, lang in (("src", ctx.config.src_lang), ("tgt", ctx.config.tgt_lang)):
        # one model per language; never mixes the two sides
        model = bpe_mod.bpe_learn(_concat(ctx, names, side), merges)
        model.save(ctx.artifact(f"codes.{lang}"))
        for n in ctx.corpora:
            lines = ctx.read(n, side)
            seg = bpe_mod.bpe_apply(model, lines)
            if [line.split() for line in bpe_mod.bpe_undo(" ".join(s) for s in seg)] != lines:
                raise CorpusError(f"BPE round trip failed on corpus {n}")
            ctx.write_lines(f"{n}.bpe.{lang}", seg)
    return {}


def stage_oov(ctx: Context, stage: StageDecl) -> dict:
    mode = ctx.param(stage, "mode", "drop")
    table_path = stage.params.get("table")
    table = TranslitTable.load(ctx.config.base_dir / table_path) if table_path else TranslitTable.default()
    vocab = {t for n in ctx.names("in-domain", "out-domain") for line in ctx.read(n, "src") for t in line}
    for n in ctx.names("test", "tune"):
        text = ctx.read(n, "src")
        found = find_oov(text, vocab)
        ctx.write_lines(f"{n}.oov.tsv", (f"{w}\t{c}" for w, c in sorted(found.items(), key=lambda x: (-x[1], x[0]))))
        out = drop_oov(text, vocab) if mode == "drop" else transliterate_oov(text, vocab, table)
        ctx.write_lines(f"{n}.{mode}.{ctx.config.src_lang}", out)
    return {}


def stage_bleu(ctx: Context, stage: StageDecl) -> dict:
    base = ctx.config.base_dir
    if "ref" in stage.params:
        ref = base / stage.params["ref"]
    else:
        tests = ctx.names("test")
        if not tests:
            raise ConfigError(f"stage {stage.label}: no ref given and no test corpus declared")
        ref = ctx.corpora[tests[0]]["tgt"]
    hyp = base / stage.params["hyp"]
    with open(hyp, encoding="utf-8") as fh, open(ref, encoding="utf-8") as fr:
        report = bleu(fh.read().splitlines(), fr.read().splitlines(), ctx.param(stage, "normalize", False))
    ctx.write_text("bleu.txt", str(report) + "\n")
    log.info("%s: %s", stage.label, report)
    return {}


def stage_report(ctx: Context, stage: StageDecl) -> dict:
    ctx.write_text("table.txt", render_report(ctx.config.base_dir / stage.params["spec"]))
    return {}


def render_report(spec_path: str | Path) -> str:
    """Progress table from a report spec.

    ``[report]`` holds ``columns`` and (for computed rows) ``refs`` and
    ``normalize``; each ``[row LABEL]`` has either ``hyps`` (one file per
    column) or literal ``scores``.
    """
    spec_path = Path(spec_path)
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser.read_string(spec_path.read_text(encoding="utf-8"))
    base = spec_path.parent
    head = parser["report"]
    columns = head["columns"].split()
    refs = [base / r for r in head.get("refs", "").split()]
    norm = _bool(head.get("normalize", "false"))
    displayed = _bool(head.get("displayed", "false"))
    rows = []
    for section in parser.sections():
        if not section.startswith("row "):
            continue
        opts = parser[section]
        if "scores" in opts:
            values = [float(v) for v in opts["scores"].split()]
        else:
            hyps = [base / h for h in opts["hyps"].split()]
            if len(hyps) != len(refs):
                raise ConfigError(f"[{section}] needs one hypothesis file per reference")
            values = []
            for h, r in zip(hyps, refs):
                values.append(bleu(h.read_text("utf-8").splitlines(), r.read_text("utf-8").splitlines(), norm))
        rows.append((section[4:], values))
    return progress_table(rows, columns, displayed=displayed)


def _check_osm(cfg: PipelineConfig, stage: StageDecl) -> None:
    for c in cfg.corpora:
        if c.role in ("in-domain", "out-domain", "tune") and c.align is None:
            raise ConfigError(f"stage {stage.label}: corpus {c.name} needs an align file")


def _check_bleu(cfg: PipelineConfig, stage: StageDecl) -> None:
    if "hyp" not in stage.params:
        raise ConfigError(f"stage {stage.label}: hyp is required")
    if "ref" not in stage.params and not cfg.by_role("test"):
        raise ConfigError(f"stage {stage.label}: ref is required when no test corpus is declared")


def _check_report(cfg: PipelineConfig, stage: StageDecl) -> None:
    if "spec" not in stage.params:
        raise ConfigError(f"stage {stage.label}: spec is required")


@dataclass(frozen=True)
class StageSpec:
    run: Callable[[Context, StageDecl], dict]
    params: dict[str, Callable] = field(default_factory=dict)
    file_params: tuple[str, ...] = ()
    check: Callable | None = None


STAGES: dict[str, StageSpec] = {
    "normalize": StageSpec(stage_normalize, {"rules": str}, ("rules",)),
    "filter": StageSpec(stage_filter, {"max_len": _pos_int}),
    "select": StageSpec(stage_select, {"fraction": _fraction, "order": _pos_int, "sweep": _fractions,
                                       "mode": _choice("bilingual", "source")}),
    "lm": StageSpec(stage_lm, {"order": _pos_int, "merge": _bool}),
    "classes": StageSpec(stage_classes, {"k": _pos_int, "sweeps": _nonneg_int, "order": _pos_int,
                                         "corpus": _roles}),
    "osm": StageSpec(stage_osm, {"order": _pos_int, "merge": _bool, "classes": _bool}, check=_check_osm),
    "bpe": StageSpec(stage_bpe, {"merges": _nonneg_int, "corpus": _roles}),
    "oov": StageSpec(stage_oov, {"mode": _choice("drop", "translit"), "table": str}, ("table",)),
    "bleu": StageSpec(stage_bleu, {"hyp": str, "ref": str, "normalize": _bool}, ("hyp", "ref"),
                      check=_check_bleu),
    "report": StageSpec(stage_report, {"spec": str}, ("spec",), check=_check_report),
}


def _commit(ctx: Context, stage: StageDecl, updates: dict) -> None:
    final_dir = ctx.out / stage.label
    if final_dir.exists():
        shutil.rmtree(final_dir)
    os.replace(ctx.tmp, final_dir)
    for rel in ctx.files:
        ctx.manifest.append((stage.label, f"{stage.label}/{rel}", sha256(final_dir / rel)))
    for name, upd in updates.items():
        for side, rel in upd.items():
            ctx.corpora[name][side] = final_dir / rel
    _write_manifest(ctx.out, ctx.manifest)


def run_pipeline(config: PipelineConfig, out_dir: str | Path) -> tuple[int, list[tuple[str, str, str]]]:
    """Run every stage; returns (exit status, manifest rows)."""
    missing = [str(p) for p in config.input_files() if not p.is_file()]
    if missing:
        log.error("missing input file(s): %s", ", ".join(missing))
        return EXIT_CONFIG, []
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ctx = Context(config, out)
    _write_manifest(out, [])
    for stage in config.stages:
        ctx.tmp = out / f".tmp-{stage.label}"
        ctx.files = []
        if ctx.tmp.exists():
            shutil.rmtree(ctx.tmp)
        ctx.tmp.mkdir(parents=True)
        log.info("stage %s", stage.label)
        try:
            updates = STAGES[stage.kind].run(ctx, stage)
        except ConfigError as exc:
            status, reason = EXIT_CONFIG, exc
        except (NumericError, ZeroProbabilityError, FloatingPointError, OverflowError) as exc:
            status, reason = EXIT_NUMERIC, exc
        except (CorpusError, ArpaError, OsmError, OSError, ValueError) as exc:
            status, reason = EXIT_DATA, exc
        else:
            _commit(ctx, stage, updates)
            continue
        log.error("stage %s failed: %s", stage.label, reason)
        shutil.rmtree(ctx.tmp, ignore_errors=True)
        return status, ctx.manifest
    return EXIT_OK, ctx.manifest
