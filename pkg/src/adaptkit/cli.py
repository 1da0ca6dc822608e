"""Command-line front end: one subcommand per toolkit operation.

Exit status: 0 success, 2 configuration/usage error, 3 data error,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from contextlib import contextmanager
from pathlib import Path

from . import bpe as bpe_mod
from .classes import ClassMap, apply_classes, cluster_exchange
from .evaluation import bleu
from .lm import ArpaError, Vocabulary, evaluate, export_arpa, import_arpa, train_lm
from .mixture import MixtureModel, ZeroProbabilityError, em_fit, merge_static, save_weights
from .oov import TranslitTable, drop_oov, find_oov, transliterate_oov
from .osm import OsmError, osm_corpus
from .pipeline import (EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC, ConfigError, NumericError,
                       PipelineConfig, render_report, run_pipeline)
from .selection import read_scores, score_corpus, select_fraction, write_scores
from .text import (CorpusError, NormalizationRules, SentencePair, format_pharaoh, length_filter,
                   normalize, read_lines, read_parallel, tokenize)

log = logging.getLogger("adaptkit")


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as f:
            yield f


def _input_lines(path):
    if path is None or path == "-":
        for line in sys.stdin:
            yield line.rstrip("\r\n")
    else:
        yield from read_lines(path)


def _tokenized(path):
    return [line.split() for line in _input_lines(path)]


def _write_tokens(f, text):
    for line in text:
        f.write(" ".join(line) + "\n")


def _check_inputs(*paths):
    for p in paths:
        if p is not None and p != "-" and not Path(p).is_file():
            raise ConfigError(f"no such file: {p}")


def cmd_normalize(args):
    _check_inputs(args.input, args.rules)
    rules = NormalizationRules.load(args.rules) if args.rules else None
    with _output(args.output) as f:
        for line in _input_lines(args.input):
            f.write(normalize(line, rules) + "\n")


def cmd_tokenize(args):
    _check_inputs(args.input)
    with _output(args.output) as f:
        for line in _input_lines(args.input):
            f.write(" ".join(tokenize(line)) + "\n")


def _suffix(path, default):
    return Path(path).suffix or default


def cmd_filter(args):
    _check_inputs(args.src, args.tgt, args.align)
    pairs = list(read_parallel(args.src, args.tgt, args.align))
    kept = list(length_filter(pairs, args.max_len))
    prefix = args.out_prefix
    with open(prefix + _suffix(args.src, ".src"), "w", encoding="utf-8") as fs, \
         open(prefix + _suffix(args.tgt, ".tgt"), "w", encoding="utf-8") as ft:
        _write_tokens(fs, (p.source for p in kept))
        _write_tokens(ft, (p.target for p in kept))
    if args.align:
        with open(prefix + ".align", "w", encoding="utf-8") as fa:
            for p in kept:
                fa.write(format_pharaoh(p.alignment) + "\n")
    log.info("kept %d of %d pairs", len(kept), len(pairs))


def cmd_vocab(args):
    _check_inputs(args.input)
    Vocabulary.from_corpus(_tokenized(args.input)).save(args.output)


def cmd_train_lm(args):
    _check_inputs(args.text)
    model = train_lm(_tokenized(args.text), args.order, unk=not args.no_unk)
    export_arpa(model, args.arpa, None if args.full_precision else 7)


def cmd_ppl(args):
    _check_inputs(args.arpa, args.text)
    res = evaluate(import_arpa(args.arpa), _tokenized(args.text))
    print(f"ppl={res.perplexity:.4f} tokens={res.events} oov={res.oov}")


def cmd_interpolate(args):
    _check_inputs(*args.arpa, args.tune)
    if len(args.arpa) < 2:
        raise ConfigError("interpolate needs at least two --arpa models")
    models = [import_arpa(p) for p in args.arpa]
    weights, trace = em_fit(models, _tokenized(args.tune), args.tol, args.max_iter)
    for i, p in enumerate(trace.perplexities):
        log.info("iteration %d: ppl=%.4f", i, p)
    for name, w in zip(args.arpa, weights):
        print(f"{name}\t{float(w):.6f}")
    print(f"ppl={trace.perplexities[-1]:.4f} iterations={trace.iterations} converged={trace.converged}")
    if args.out_weights:
        save_weights(args.out_weights, args.arpa, weights)
    if args.merge_arpa:
        export_arpa(merge_static(MixtureModel(models, weights)), args.merge_arpa)


def cmd_mml_score(args):
    bilingual = args.in_tgt_lm is not None or args.out_tgt_lm is not None
    if bilingual and (args.in_tgt_lm is None or args.out_tgt_lm is None or args.tgt is None):
        raise ConfigError("bilingual scoring needs --in-tgt-lm, --out-tgt-lm and --tgt")
    _check_inputs(args.in_src_lm, args.out_src_lm, args.in_tgt_lm, args.out_tgt_lm, args.src, args.tgt)
    if args.tgt is not None:
        pairs = list(read_parallel(args.src, args.tgt))
    else:
        pairs = [SentencePair(line, ()) for line in _tokenized(args.src)]
    lms = [import_arpa(args.in_src_lm), import_arpa(args.out_src_lm)]
    if bilingual:
        lms += [import_arpa(args.in_tgt_lm), import_arpa(args.out_tgt_lm)]
    write_scores(args.out, score_corpus(pairs, *lms))


def cmd_mml_select(args):
    _check_inputs(args.scores)
    chosen = select_fraction(read_scores(args.scores), args.fraction)
    with _output(args.out) as f:
        for i in chosen:
            f.write(f"{i}\n")


def cmd_bpe_learn(args):
    _check_inputs(args.input)
    bpe_mod.bpe_learn(_tokenized(args.input), args.merges).save(args.output)


def cmd_bpe_apply(args):
    _check_inputs(args.codes, args.input)
    model = bpe_mod.BpeModel.load(args.codes)
    with _output(args.output) as f:
        for line in _input_lines(args.input):
            f.write(" ".join(bpe_mod.bpe_apply_line(model, line.split())) + "\n")


def cmd_bpe_undo(args):
    _check_inputs(args.input)
    with _output(args.output) as f:
        for line in _input_lines(args.input):
            f.write(bpe_mod.bpe_undo_line(line) + "\n")


def cmd_osm_encode(args):
    _check_inputs(args.src, args.tgt, args.align, args.src_classes, args.tgt_classes)
    src_map = ClassMap.load(args.src_classes).token_map() if args.src_classes else None
    tgt_map = ClassMap.load(args.tgt_classes).token_map() if args.tgt_classes else None
    with _output(args.output) as f:
        _write_tokens(f, osm_corpus(read_parallel(args.src, args.tgt, args.align), src_map, tgt_map))


def cmd_classes(args):
    _check_inputs(args.input)
    cmap, trace = cluster_exchange(_tokenized(args.input), args.k, args.sweeps)
    cmap.save(args.output)
    log.info("objective %.4f -> %.4f after %d moves", trace[0], trace[-1], len(trace) - 1)


def cmd_class_apply(args):
    _check_inputs(args.map, args.input)
    cmap = ClassMap.load(args.map)
    with _output(args.output) as f:
        _write_tokens(f, apply_classes(cmap, _tokenized(args.input)))


def cmd_oov(args):
    _check_inputs(args.input, args.table, args.vocab)
    vocab = Vocabulary.load(args.vocab)
    text = _tokenized(args.input)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            for w, c in sorted(find_oov(text, vocab).items(), key=lambda x: (-x[1], x[0])):
                f.write(f"{w}\t{c}\n")
    if args.mode == "drop":
        out = drop_oov(text, vocab)
    else:
        table = TranslitTable.load(args.table) if args.table else TranslitTable.default()
        out = transliterate_oov(text, vocab, table)
    with _output(args.output) as f:
        _write_tokens(f, out)


def cmd_bleu(args):
    _check_inputs(args.hyp, args.ref)
    print(bleu(list(read_lines(args.hyp)), list(read_lines(args.ref)), args.normalize))


def cmd_report(args):
    _check_inputs(args.spec)
    with _output(args.output) as f:
        f.write(render_report(args.spec))


def cmd_pipeline(args):
    config = PipelineConfig.load(args.config)
    status, manifest = run_pipeline(config, args.out)
    if status == 0:
        log.info("wrote %d artifacts; manifest at %s", len(manifest), Path(args.out) / "manifest.tsv")
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adaptkit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def io(sp, out_required=False):
        sp.add_argument("--in", dest="input", default="-", help="input file (default: stdin)")
        sp.add_argument("--out", dest="output", default=None if out_required else "-",
                        required=out_required, help="output file" + ("" if out_required else " (default: stdout)"))

    sp = sub.add_parser("normalize", help="orthographic normalization")
    io(sp)
    sp.add_argument("--rules", help="TSV of codepoint substitutions (default: bundled Arabic rules)")
    sp.set_defaults(func=cmd_normalize)

    sp = sub.add_parser("tokenize", help="split punctuation from words")
    io(sp)
    sp.set_defaults(func=cmd_tokenize)

    sp = sub.add_parser("filter", help="drop pairs with a side longer than --max-len")
    sp.add_argument("--src", required=True)
    sp.add_argument("--tgt", required=True)
    sp.add_argument("--align")
    sp.add_argument("--max-len", type=int, default=80)
    sp.add_argument("--out-prefix", required=True,
                    help="output files keep the input extensions: PREFIX.ar, PREFIX.en [, PREFIX.align]")
    sp.set_defaults(func=cmd_filter)

    sp = sub.add_parser("vocab", help="word list with counts (input for oov --vocab)")
    io(sp, out_required=True)
    sp.set_defaults(func=cmd_vocab)

    sp = sub.add_parser("train-lm", help="modified Kneser-Ney LM to ARPA")
    sp.add_argument("--text", required=True)
    sp.add_argument("--order", type=int, default=5)
    sp.add_argument("--no-unk", action="store_true", help="do not reserve probability mass for <unk>")
    sp.add_argument("--full-precision", action="store_true", help="write exact floats instead of 7 digits")
    sp.add_argument("--arpa", required=True, help="output ARPA file")
    sp.set_defaults(func=cmd_train_lm)

    sp = sub.add_parser("ppl", help="perplexity of an ARPA model on text")
    sp.add_argument("--arpa", required=True)
    sp.add_argument("--text", required=True)
    sp.set_defaults(func=cmd_ppl)

    sp = sub.add_parser("interpolate", help="EM interpolation weights on a tuning set")
    sp.add_argument("--arpa", action="append", required=True, help="component model; repeat per component")
    sp.add_argument("--tune", required=True)
    sp.add_argument("--tol", type=float, default=1e-4)
    sp.add_argument("--max-iter", type=int, default=100)
    sp.add_argument("--out-weights", help="write component_path<TAB>lambda TSV")
    sp.add_argument("--merge-arpa", help="write a single statically merged ARPA model")
    sp.set_defaults(func=cmd_interpolate)

    sp = sub.add_parser("mml-score", help="cross-entropy difference scores for a pool corpus")
    sp.add_argument("--in-src-lm", required=True)
    sp.add_argument("--out-src-lm", required=True)
    sp.add_argument("--in-tgt-lm")
    sp.add_argument("--out-tgt-lm")
    sp.add_argument("--src", required=True)
    sp.add_argument("--tgt")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_mml_score)

    sp = sub.add_parser("mml-select", help="indices of the lowest-scoring fraction")
    sp.add_argument("--scores", required=True)
    sp.add_argument("--fraction", type=float, required=True)
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_mml_select)

    sp = sub.add_parser("bpe-learn", help="learn BPE merges")
    io(sp, out_required=True)
    sp.add_argument("--merges", type=int, default=bpe_mod.DEFAULT_MERGES)
    sp.set_defaults(func=cmd_bpe_learn)

    sp = sub.add_parser("bpe-apply", help="segment text with learned merges")
    io(sp)
    sp.add_argument("--codes", required=True)
    sp.set_defaults(func=cmd_bpe_apply)

    sp = sub.add_parser("bpe-undo", help="join @@ continuation markers")
    io(sp)
    sp.set_defaults(func=cmd_bpe_undo)

    sp = sub.add_parser("osm-encode", help="operation sequences for aligned pairs")
    sp.add_argument("--src", required=True)
    sp.add_argument("--tgt", required=True)
    sp.add_argument("--align", required=True)
    sp.add_argument("--src-classes", help="class map for source words")
    sp.add_argument("--tgt-classes", help="class map for target words")
    sp.add_argument("--out", dest="output", default="-")
    sp.set_defaults(func=cmd_osm_encode)

    sp = sub.add_parser("classes", help="exchange-algorithm word clustering")
    io(sp, out_required=True)
    sp.add_argument("--k", type=int, default=50)
    sp.add_argument("--sweeps", type=int, default=30)
    sp.set_defaults(func=cmd_classes)

    sp = sub.add_parser("class-apply", help="replace words by class ids")
    io(sp)
    sp.add_argument("--map", required=True)
    sp.set_defaults(func=cmd_class_apply)

    sp = sub.add_parser("oov", help="drop or transliterate out-of-vocabulary tokens")
    io(sp)
    sp.add_argument("--vocab", required=True, help="one token per line, optional <TAB>count")
    sp.add_argument("--mode", choices=("drop", "translit"), default="drop")
    sp.add_argument("--table", help="transliteration TSV (default: bundled Buckwalter)")
    sp.add_argument("--report", help="write OOV counts here")
    sp.set_defaults(func=cmd_oov)

    sp = sub.add_parser("bleu", help="cased corpus BLEU")
    sp.add_argument("--hyp", required=True)
    sp.add_argument("--ref", required=True)
    sp.add_argument("--normalize", action="store_true", help="normalize both sides first")
    sp.set_defaults(func=cmd_bleu)

    sp = sub.add_parser("report", help="progress table from a report spec")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--out", dest="output", default="-")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("pipeline", help="run a configured pipeline")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or 0
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (ZeroProbabilityError, NumericError, FloatingPointError, OverflowError) as exc:
        log.error("numeric failure: %s", exc)
        return EXIT_NUMERIC
    except (CorpusError, ArpaError, OsmError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
