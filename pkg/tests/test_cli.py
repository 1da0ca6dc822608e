import re

import pytest

from adaptkit.bpe import BpeModel
from adaptkit.classes import ClassMap
from adaptkit.cli import main
from adaptkit.lm import import_arpa
from adaptkit.mixture import load_weights


def _write(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return str(path)


@pytest.fixture
def lm_dir(tmp_path):
    a = _write(tmp_path / "a.txt", ["the cat sat", "the cat ran", "a cat sat"])
    b = _write(tmp_path / "b.txt", ["the dog sat", "a dog ran", "the dog ran"])
    for name, text in (("a", a), ("b", b)):
        assert main(["train-lm", "--text", text, "--order", "2", "--arpa", str(tmp_path / f"{name}.arpa")]) == 0
    return tmp_path


def test_missing_input_is_config_error(tmp_path):
    assert main(["ppl", "--arpa", str(tmp_path / "no.arpa"), "--text", str(tmp_path / "no.txt")]) == 2
    assert main(["pipeline", "--config", str(tmp_path / "no.cfg"), "--out", str(tmp_path / "o")]) == 2


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["train-lm"])
    assert exc.value.code == 2


def test_bad_arpa_is_data_error(tmp_path):
    bad = _write(tmp_path / "bad.arpa", ["\\data\\", "ngram 1=2", "", "\\1-grams:", "-1.0\tx", "\\end\\"])
    text = _write(tmp_path / "t.txt", ["x"])
    assert main(["ppl", "--arpa", bad, "--text", text]) == 3


def test_ppl_output(lm_dir, capsys):
    assert main(["ppl", "--arpa", str(lm_dir / "a.arpa"), "--text", str(lm_dir / "a.txt")]) == 0
    out = capsys.readouterr().out.strip()
    assert re.fullmatch(r"ppl=\d+\.\d{4} tokens=12 oov=0", out)


def test_interpolate_writes_weights_and_merge(lm_dir, capsys):
    tune = _write(lm_dir / "tune.txt", ["the cat sat", "the dog ran"])
    code = main(["interpolate", "--arpa", str(lm_dir / "a.arpa"), "--arpa", str(lm_dir / "b.arpa"),
                 "--tune", tune, "--out-weights", str(lm_dir / "w.tsv"), "--merge-arpa", str(lm_dir / "m.arpa")])
    assert code == 0
    weights = load_weights(lm_dir / "w.tsv")
    assert sum(w for _, w in weights) == pytest.approx(1.0)
    assert "converged=" in capsys.readouterr().out
    assert import_arpa(lm_dir / "m.arpa").order == 2


def test_interpolate_needs_two_models(lm_dir):
    assert main(["interpolate", "--arpa", str(lm_dir / "a.arpa"), "--tune", str(lm_dir / "a.txt")]) == 2


def test_zero_probability_is_numeric_error(tmp_path):
    for name, line in (("a", "x y"), ("b", "y x")):
        text = _write(tmp_path / f"{name}.txt", [line])
        assert main(["train-lm", "--text", text, "--order", "2", "--no-unk",
                     "--arpa", str(tmp_path / f"{name}.arpa")]) == 0
    tune = _write(tmp_path / "tune.txt", ["x zzz"])
    code = main(["interpolate", "--arpa", str(tmp_path / "a.arpa"), "--arpa", str(tmp_path / "b.arpa"),
                 "--tune", tune])
    assert code == 4


def test_bleu_output(tmp_path, capsys):
    h = _write(tmp_path / "h.txt", ["a b c d e"])
    assert main(["bleu", "--hyp", h, "--ref", h]) == 0
    assert capsys.readouterr().out.startswith("BLEU = 100.0, ")
    r = _write(tmp_path / "r.txt", ["a b", "c"])
    assert main(["bleu", "--hyp", h, "--ref", r]) == 3


def test_filter_keeps_extensions(tmp_path):
    src = _write(tmp_path / "c.ar", ["a b", "a " * 10])
    tgt = _write(tmp_path / "c.en", ["x y", "x"])
    align = _write(tmp_path / "c.align", ["0-0 1-1", "0-0"])
    prefix = str(tmp_path / "kept")
    assert main(["filter", "--src", src, "--tgt", tgt, "--align", align, "--max-len", "5",
                 "--out-prefix", prefix]) == 0
    assert (tmp_path / "kept.ar").read_text() == "a b\n"
    assert (tmp_path / "kept.en").read_text() == "x y\n"
    assert (tmp_path / "kept.align").read_text() == "0-0 1-1\n"


def test_filter_mismatched_lines_is_data_error(tmp_path):
    src = _write(tmp_path / "c.ar", ["a", "b"])
    tgt = _write(tmp_path / "c.en", ["x"])
    assert main(["filter", "--src", src, "--tgt", tgt, "--out-prefix", str(tmp_path / "k")]) == 3


def test_bpe_roundtrip(tmp_path):
    text = _write(tmp_path / "t.txt", ["lowest newest widest", "low new wide"])
    codes = tmp_path / "codes"
    assert main(["bpe-learn", "--in", text, "--out", str(codes), "--merges", "10"]) == 0
    assert len(BpeModel.load(codes).merges) <= 10
    seg = tmp_path / "seg.txt"
    assert main(["bpe-apply", "--in", text, "--out", str(seg), "--codes", str(codes)]) == 0
    assert "@@" in seg.read_text()
    back = tmp_path / "back.txt"
    assert main(["bpe-undo", "--in", str(seg), "--out", str(back)]) == 0
    assert back.read_text() == (tmp_path / "t.txt").read_text()


def test_classes_and_osm_encode(tmp_path):
    src = _write(tmp_path / "s.txt", ["a b", "b a c"])
    tgt = _write(tmp_path / "t.txt", ["x y", "y x z"])
    align = _write(tmp_path / "al.txt", ["0-0 1-1", "0-1 1-0 2-2"])
    cls = tmp_path / "src.classes"
    assert main(["classes", "--in", src, "--out", str(cls), "--k", "2"]) == 0
    assert ClassMap.load(cls).k == 2
    ops = tmp_path / "ops.txt"
    assert main(["osm-encode", "--src", src, "--tgt", tgt, "--align", align, "--out", str(ops)]) == 0
    lines = ops.read_text().splitlines()
    assert lines[0] == "GEN_a_x GEN_b_y"
    assert "JUMPBACK_1" in lines[1]
    mapped = tmp_path / "ops.cls"
    assert main(["osm-encode", "--src", src, "--tgt", tgt, "--align", align,
                 "--src-classes", str(cls), "--out", str(mapped)]) == 0
    assert all(tok.split("_")[1].isdigit() for tok in mapped.read_text().split() if tok.startswith("GEN_"))


def test_vocab_and_oov(tmp_path):
    train = _write(tmp_path / "train.txt", ["a b", "b"])
    vocab = tmp_path / "vocab.tsv"
    assert main(["vocab", "--in", train, "--out", str(vocab)]) == 0
    text = _write(tmp_path / "x.txt", ["a كتاب b"])
    out = tmp_path / "o.txt"
    assert main(["oov", "--in", text, "--vocab", str(vocab), "--mode", "translit", "--out", str(out),
                 "--report", str(tmp_path / "rep.tsv")]) == 0
    assert out.read_text() == "a ktAb b\n"
    assert (tmp_path / "rep.tsv").read_text() == "كتاب\t1\n"
    assert main(["oov", "--in", text, "--vocab", str(vocab), "--out", str(out)]) == 0
    assert out.read_text() == "a b\n"


def test_mml_score_and_select(lm_dir):
    pool = _write(lm_dir / "pool.txt", ["the cat sat", "the dog ran", "a cat ran"])
    scores = lm_dir / "scores.tsv"
    assert main(["mml-score", "--in-src-lm", str(lm_dir / "a.arpa"), "--out-src-lm", str(lm_dir / "b.arpa"),
                 "--src", pool, "--out", str(scores)]) == 0
    sel = lm_dir / "sel.txt"
    assert main(["mml-select", "--scores", str(scores), "--fraction", "0.34", "--out", str(sel)]) == 0
    assert sel.read_text() == "0\n"
    assert main(["mml-score", "--in-src-lm", str(lm_dir / "a.arpa"), "--out-src-lm", str(lm_dir / "b.arpa"),
                 "--in-tgt-lm", str(lm_dir / "a.arpa"), "--src", pool, "--out", str(scores)]) == 2


def test_normalize_and_tokenize(tmp_path):
    text = _write(tmp_path / "in.txt", ["أحمد قال: مرحبا!"])
    out = tmp_path / "out.txt"
    assert main(["normalize", "--in", text, "--out", str(out)]) == 0
    assert out.read_text().startswith("احمد")
    assert main(["tokenize", "--in", str(out), "--out", str(tmp_path / "tok.txt")]) == 0
    assert (tmp_path / "tok.txt").read_text().split() == ["احمد", "قال", ":", "مرحبا", "!"]
