import shutil

import pytest

from clpd.cli import main
from clpd.config import ConfigError, RunConfig, load_config, parse_config

SMALL = ["--n-pivots", "300", "--synonym-pairs", "40", "--n-sources", "20", "--n-suspects", "5",
         "--n-cases", "5", "--seed", "3"]
TRAIN = ["--dim", "32", "--seed", "3"]


def test_parse_config():
    values = parse_config("# comment\ndim = 64\nshuffle-tokens = no  # trailing\n\nsentence_tau=0.5\n")
    assert values == {"dim": 64, "shuffle_tokens": False, "sentence_tau": 0.5}
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("dimension = 3\n")
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("dim = 3\njunk\n")
    with pytest.raises(ConfigError, match="dim"):
        parse_config("dim = many\n")


def test_flags_override_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("dim = 64\nepochs = 2\n")
    cfg = load_config(path, {"dim": "128"})
    assert (cfg.dim, cfg.epochs) == (128, 2)
    assert load_config(None) == RunConfig()
    with pytest.raises(ConfigError):
        load_config(None, {"nope": "1"})
    assert load_config(None, {"top-k": 7}).top_k == 7


def test_dump_roundtrips(tmp_path):
    cfg = RunConfig(dim=17, shuffle_tokens=False, sentence_tau=0.45)
    path = tmp_path / "c.cfg"
    path.write_text(cfg.dump())
    assert load_config(path) == cfg


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert main(["synth", "--out", str(root / "corpus"), *SMALL]) == 0
    corpus = root / "corpus"
    assert main(["build", str(corpus / "lexicon.tsv"), str(corpus / "freqs.tsv"), "--top-k", "400",
                 "--out", str(root / "contexts.txt")]) == 0
    assert main(["train", str(root / "contexts.txt"), *TRAIN, "--out", str(root / "model.txt")]) == 0
    return root


def test_pipeline_outputs(workspace, capsys):
    corpus = workspace / "corpus"
    assert len((workspace / "contexts.txt").read_text().splitlines()) >= 300
    assert (workspace / "model.txt.stats.json").exists()
    word = (corpus / "freqs.tsv").read_text().splitlines()[150].split("\t")[0]
    capsys.readouterr()
    assert main(["query", str(workspace / "model.txt"), word, "-k", "3"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 3
    assert main(["query", str(workspace / "model.txt"), "notaword"]) == 1

    dets = workspace / "dets"
    assert main(["detect", str(workspace / "model.txt"), str(corpus / "src"), str(corpus / "susp"),
                 "--freqs", str(corpus / "freqs.tsv"), "--out", str(dets)]) == 0
    assert len(list(dets.glob("*.xml"))) == 5
    capsys.readouterr()
    assert main(["evaluate", str(corpus / "gold"), str(dets), "--out", str(workspace / "eval.tsv")]) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert header.split("\t") == ["precision", "recall", "granularity", "plagdet"]
    assert float(row.split("\t")[3]) >= 0.75

    assert main(["baseline", str(corpus / "lexicon.tsv"), str(corpus / "src"), str(corpus / "susp"),
                 "--out", str(workspace / "base")]) == 0
    assert main(["detect-pairs", str(workspace / "model.txt"), str(corpus / "pairs.tsv"),
                 "--out", str(workspace / "pairdets")]) == 0
    assert list((workspace / "pairdets").glob("*.xml"))
    assert main(["index", str(corpus / "src"), "--out", str(workspace / "index.json")]) == 0


def test_evaluate_gold_against_itself(workspace, capsys):
    gold = workspace / "corpus" / "gold"
    capsys.readouterr()
    assert main(["evaluate", str(gold), str(gold)]) == 0
    assert capsys.readouterr().out.splitlines()[1] == "1.000\t1.000\t1.000\t1.000"
    empty = workspace / "no-dets"
    empty.mkdir()
    assert main(["evaluate", str(gold), str(empty)]) == 0
    assert capsys.readouterr().out.splitlines()[1].split("\t")[1] == "0.000"


def test_training_bit_identical(workspace):
    again = workspace / "model2.txt"
    assert main(["train", str(workspace / "contexts.txt"), *TRAIN, "--out", str(again)]) == 0
    assert again.read_bytes() == (workspace / "model.txt").read_bytes()


def test_synth_deterministic(workspace, tmp_path):
    assert main(["synth", "--out", str(tmp_path / "again"), *SMALL]) == 0
    for sub in ("src", "susp", "gold"):
        for path in sorted((workspace / "corpus" / sub).iterdir()):
            assert (tmp_path / "again" / sub / path.name).read_bytes() == path.read_bytes()


def test_synth_from_lexicon_files(workspace, tmp_path):
    corpus = workspace / "corpus"
    assert main(["synth", "--lexicon", str(corpus / "lexicon.tsv"), "--freqs", str(corpus / "freqs.tsv"),
                 "--out", str(tmp_path / "s"), *SMALL]) == 0
    assert main(["synth", "--lexicon", str(corpus / "lexicon.tsv"), "--out", str(tmp_path / "t")]) == 2


def test_sweep(workspace, capsys):
    corpus = workspace / "corpus"
    args = ["sweep", str(corpus / "lexicon.tsv"), str(corpus / "freqs.tsv"), str(corpus), *TRAIN]
    capsys.readouterr()
    assert main([*args, "--sizes", "400"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2 and lines[1].startswith("400\t")
    assert main([*args, "--sizes", "400,200"]) == 2
    # a failing size is reported and the sweep continues
    assert main([*args, "--sizes", "400,100000"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "FAILED" in lines[2] and "FAILED" not in lines[1]


def test_error_exit_codes(workspace, tmp_path):
    corpus = workspace / "corpus"
    assert main(["build", str(tmp_path / "missing.tsv"), str(corpus / "freqs.tsv")]) == 2
    assert main(["build", str(corpus / "lexicon.tsv"), str(corpus / "freqs.tsv"), "--top-k", "99999",
                 "--out", str(tmp_path / "c.txt")]) == 2
    assert main(["train", str(workspace / "contexts.txt"), "--replicas", "10",
                 "--out", str(tmp_path / "m.txt")]) == 2
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["detect", str(workspace / "model.txt"), str(corpus / "src"), str(empty)]) == 2
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["build", str(corpus / "lexicon.tsv"), str(corpus / "freqs.tsv"), "--config", str(cfg)]) == 2
    bad_model = tmp_path / "bad.txt"
    bad_model.write_text("2 3\na 1 2\n")
    assert main(["query", str(bad_model), "a"]) == 2
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_detect_pairs_manifests(workspace, tmp_path):
    model = str(workspace / "model.txt")
    empty = tmp_path / "pairs.tsv"
    empty.write_text("")
    assert main(["detect-pairs", model, str(empty), "--out", str(tmp_path / "d")]) == 0
    bad = tmp_path / "bad.tsv"
    bad.write_text("only-one-column\n")
    assert main(["detect-pairs", model, str(bad)]) == 2
    # a document paired with itself is covered by one passage
    src = sorted((workspace / "corpus" / "src").glob("*.txt"))[0]
    shutil.copy(src, tmp_path / "self.txt")
    selfpair = tmp_path / "self.tsv"
    selfpair.write_text(f"self.txt\t{src}\n")
    assert main(["detect-pairs", model, str(selfpair), "--out", str(tmp_path / "s")]) == 0
    xml = (tmp_path / "s" / "self.xml").read_text()
    assert xml.count("<feature") == 1 and 'this_offset="0"' in xml
