import shutil
from pathlib import Path

import pytest

from adaptkit.mixture import load_weights
from adaptkit.pipeline import (EXIT_CONFIG, EXIT_DATA, EXIT_OK, MANIFEST, ConfigError, PipelineConfig,
                               render_report, run_pipeline, sha256)
from adaptkit.selection import selection_size
from adaptkit.synthetic import write_bilingual_fixture

ROOT = Path(__file__).resolve().parents[1]
SMALL = {"ted": 150, "un": 600, "dev": 60, "tst": 60}


@pytest.fixture(scope="module")
def small_fixture(tmp_path_factory):
    d = tmp_path_factory.mktemp("fixture")
    write_bilingual_fixture(d, seed=5, sizes=SMALL)
    return d


def _config(fixture: Path, text: str) -> PipelineConfig:
    path = fixture / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return PipelineConfig.load(path)


CORPORA = """
[pipeline]
src = ar
tgt = en

[corpus ted]
role = in-domain
src = ted.ar
tgt = ted.en
align = ted.align

[corpus un]
role = out-domain
src = un.ar
tgt = un.en
align = un.align

[corpus dev]
role = tune
src = dev.ar
tgt = dev.en
align = dev.align

[corpus tst]
role = test
src = tst.ar
tgt = tst.en
align = tst.align
"""


def _rows(out: Path):
    return [line.split("\t") for line in (out / MANIFEST).read_text(encoding="utf-8").splitlines()]


def test_bleu_only_config(tmp_path):
    (tmp_path / "h.txt").write_text("a b c d e\nf g h i\n", encoding="utf-8")
    cfg = _config(tmp_path, "[stage bleu]\nhyp = h.txt\nref = h.txt\n")
    status, rows = run_pipeline(cfg, tmp_path / "out")
    assert status == EXIT_OK
    assert (tmp_path / "out" / "bleu" / "bleu.txt").read_text().startswith("BLEU = 100.0")
    assert [r[0] for r in rows] == ["bleu"]


def test_missing_file_fails_before_any_stage(tmp_path):
    cfg = _config(tmp_path, "[stage bleu]\nhyp = nope.txt\nref = nope.txt\n")
    status, rows = run_pipeline(cfg, tmp_path / "out")
    assert status == EXIT_CONFIG and rows == []
    assert not (tmp_path / "out").exists()


@pytest.mark.parametrize("text, msg", [
    (CORPORA + "[stage bogus]\n", "unknown stage"),
    ("[stage bleu]\nhyp = h\nref = h\ncolour = red\n", "unknown parameter"),
    ("[stage filter]\nmax_len = 9\n", "tune corpus"),
    (CORPORA.replace("role = test", "role = nonsense"), "role must be"),
    ("[stage bleu]\nhyp = h\n", "ref is required"),
    ("[stage bleu]\nref = h\n", "hyp is required"),
    ("[stage bleu]\nhyp = h\nref = h\n[stage bleu]\nhyp = h\nref = h\n", "already exists"),
    (CORPORA + "[stage osm:x]\n[stage osm-x]\n", "duplicate stage labels"),
    ("[weird]\n", "unknown section"),
    ("[corpus]\nrole = tune\nsrc = a\ntgt = b\n", "needs a name"),
    ("[pipeline]\nseed = x\n", "seed must be"),
], ids=["unknown-stage", "unknown-param", "no-tune", "bad-role", "no-ref", "no-hyp", "dup-section",
        "dup-label", "unknown-section", "unnamed-corpus", "bad-seed"])
def test_config_errors(tmp_path, text, msg):
    with pytest.raises(ConfigError, match=msg):
        _config(tmp_path, text)


def test_stage_params_validated(small_fixture):
    with pytest.raises(ConfigError, match="bad max_len"):
        _config(small_fixture, CORPORA + "[stage filter]\nmax_len = -3\n")
    with pytest.raises(ConfigError, match="bad fraction"):
        _config(small_fixture, CORPORA + "[stage select]\nfraction = 1.5\n")


def test_duplicate_stage_labels_need_suffix(small_fixture):
    cfg = _config(small_fixture, CORPORA + "[stage osm]\n[stage osm:again]\n")
    assert [s.label for s in cfg.stages] == ["osm", "osm-again"]


def test_full_small_run(small_fixture, tmp_path):
    cfg = _config(small_fixture, CORPORA + """
[stage normalize]
[stage filter]
max_len = 80
[stage select]
fraction = 0.1
order = 3
[stage lm]
order = 3
[stage classes]
k = 10
order = 3
[stage osm]
order = 3
[stage osm:classes]
order = 3
classes = true
[stage bpe]
merges = 100
[stage oov]
mode = drop
[stage bleu]
hyp = tst.hyp.en
""")
    out = tmp_path / "out"
    status, rows = run_pipeline(cfg, out)
    assert status == EXIT_OK
    assert {r[0] for r in rows} == {"normalize", "filter", "select", "lm", "classes", "osm",
                                   "osm-classes", "bpe", "oov", "bleu"}
    assert not list(out.glob(".tmp-*"))
    for stage, rel, digest in _rows(out):
        assert sha256(out / rel) == digest

    n_un = sum(1 for _ in open(out / "filter" / "un.en", encoding="utf-8"))
    selected = (out / "select" / "un.indices.txt").read_text().split()
    assert len(selected) == selection_size(n_un, 0.1)
    prev = set()
    for f in ("0.025", "0.0375", "0.05", "0.1", "0.3"):
        cur = set((out / "select" / f"un.sweep.{f}.txt").read_text().split())
        assert prev <= cur
        prev = cur

    weights = load_weights(out / "lm" / "weights.tsv")
    assert [n for n, _ in weights] == ["lm/ted.arpa", "lm/un.arpa"]
    assert sum(w for _, w in weights) == pytest.approx(1.0, abs=1e-12)
    assert (out / "lm" / "merged.arpa").is_file()
    trace = [float(line.split("\t")[1]) for line in (out / "lm" / "em_trace.txt").read_text().splitlines()]
    assert all(b <= a for a, b in zip(trace, trace[1:]))
    assert (out / "osm-classes" / "osm.ted.arpa").is_file()
    assert "BLEU = " in (out / "bleu" / "bleu.txt").read_text()


def test_failed_stage_is_atomic(small_fixture, tmp_path):
    broken = tmp_path / "broken"
    shutil.copytree(small_fixture, broken)
    lines = (broken / "un.align").read_text().splitlines()
    lines[3] = "0-999"
    (broken / "un.align").write_text("\n".join(lines) + "\n")
    cfg = _config(broken, CORPORA + "[stage normalize]\n[stage filter]\n[stage lm]\norder = 2\n")
    out = tmp_path / "out"
    status, rows = run_pipeline(cfg, out)
    assert status == EXIT_DATA
    assert {r[0] for r in _rows(out)} == {"normalize"}
    assert (out / "normalize").is_dir()
    assert not (out / "filter").exists()
    assert not list(out.glob(".tmp-*"))


def test_osm_classes_requires_classes_stage(small_fixture, tmp_path):
    cfg = _config(small_fixture, CORPORA + "[stage osm]\nclasses = true\norder = 2\n")
    status, _ = run_pipeline(cfg, tmp_path / "out")
    assert status == EXIT_CONFIG


def test_report_spec(tmp_path):
    (tmp_path / "r1").write_text("a b c d\n")
    (tmp_path / "h1").write_text("a b c d\n")
    (tmp_path / "report.cfg").write_text("""
[report]
columns = t1 t2 t3 t4
refs = r1 r1 r1 r1
displayed = true

[row MADA]
scores = 27.5 30.6 30.4 26.3

[row mine]
hyps = h1 h1 h1 h1
""")
    table = render_report(tmp_path / "report.cfg").splitlines()
    assert table[2].split()[-1] == "28.7"
    assert table[3].split()[1:] == ["100.0"] * 5


def test_desk_config_parses():
    fixture_dir = ROOT / "scripts"
    cfg = PipelineConfig.load(fixture_dir / "desk_run.cfg")
    assert [s.label for s in cfg.stages][:4] == ["normalize", "filter", "select", "lm"]
