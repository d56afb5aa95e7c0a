import json
import subprocess
import sys

import pytest

from protcascade.cli import main
from protcascade.knowledge import load_knowledge, load_warehouse, save_warehouse
from protcascade.synthetic import synthetic_warehouse

# Output line from the paper's worked example
PRP4 = (
    "MEPNKDDNVSLAATAQISAPPVQLDASSLPGFSAIPPVVPPSFPPPMAPIPMPHPPVARPPTFRPPVSQ"
    "NGGVKTSDDSESDDEHIEISEESKQVRERQEKALQDLLVKRRAAAMAVPTNDKAVRDRLRRLGEPITLFG"
    "GEQEMERRARLTQLLTRYDINGQLDKLVKDHEEDVTPKEEVDDEVLEYPPFFTEGPKELREARIEIAKFSV"
    "KRAAVRIQRAKRRRDDPDEDMDAETKWALKHAKHMALDCSNFGDDRPLTGCSFSRDGKILATCSLSGVTK"
    "LWEMPQVTNTIAVLKDKKERATDVVFSVVDCLATASADRTAKLWKTDTGTLTQTFEGHLDRLARVAFHPS"
    "GKYLGTTSYDKTWRLWDINTGAELLLQEGHSRSVYGIAFQQDGALAASCGLDSLARVWDLRTGRSILVFQ"
    "GHIKPVFVNFSPNGYHLASGGEDNQCRIWDLRMRKSLYIIPAHANLVSQVKYEPQEGYFLATASYDMKV"
    "NIWSGRDFSLVKSLAGHESKVASLDITADSSCIATVSHDRTIKLTSSGNDEDEEKETMDIDL"
)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    return tmp_path / "wh.tsv", tmp_path / "kb.tsv"


def test_insert_then_classify(capsys, files):
    wh, kb = files
    code, out, _ = run(capsys, "insert", "--warehouse", wh, "--family", "PRP4-like", "--seq", "MARETFAR")
    assert (code, out.strip()) == (0, "1")
    code, out, err = run(capsys, "classify", "--kb", kb, "--warehouse", wh, "--seq", "MARETFAR")
    assert code == 0
    ident, fam, phase, ms = out.strip().split("\t")
    assert (ident, fam, phase) == ("seq", "PRP4-like", "phase1") and float(ms) >= 0
    assert "rebuilt" in err
    code, _, err = run(capsys, "classify", "--kb", kb, "--warehouse", wh, "--seq", "MARETFAR")
    assert "cache hit" in err
    _, _, err = run(capsys, "classify", "--kb", kb, "--warehouse", wh, "--seq", "MARETFAR", "--force-rebuild")
    assert "rebuilt" in err


def test_insert_fasta_and_classify_trained_sequence(capsys, tmp_path, files):
    wh, kb = files
    fa = tmp_path / "in.fa"
    fa.write_text(">a\nMARETFAR\n>b\nMARETFARG\n>c\nMARETFARGG\n")
    assert run(capsys, "insert", "--warehouse", wh, "--family", "X", "--fasta", fa)[1].strip() == "3"
    run(capsys, "insert", "--warehouse", wh, "--family", "Y", "--seq", "WWWWWYYYYY")
    run(capsys, "insert", "--warehouse", wh, "--family", "Y", "--seq", "WWWWYYYYYY")
    assert len(load_warehouse(wh)) == 5
    code, out, _ = run(capsys, "classify", "--kb", kb, "--warehouse", wh, "--fasta", fa, "--json")
    recs = [json.loads(line) for line in out.splitlines()]
    assert [r["id"] for r in recs] == ["a", "b", "c"]
    assert all(r["family"] == "X" and r["resolved_by"] == "phase1" for r in recs)
    assert "total_ms" in recs[0] and recs[0]["trace"] == [["phase1", ["X"]]]


def test_noise_and_flag_exit_codes(capsys, tmp_path, files):
    wh, kb = files
    code, _, err = run(capsys, "classify", "--kb", kb, "--warehouse", wh, "--seq", "MARXTFAR")
    assert code == 2 and "position 4" in err and "'X'" in err
    assert run(capsys, "insert", "--warehouse", wh, "--family", "A", "--seq", "MARXTFAR")[0] == 2
    assert run(capsys, "classify", "--kb", kb, "--warehouse", wh, "--seq", "MARETFAR")[0] == 3
    assert run(capsys, "build-kb", "--warehouse", wh, "--out", kb)[0] == 3
    assert run(capsys, "insert", "--warehouse", wh, "--seq", "MARETFAR")[0] == 4
    assert run(capsys, "insert", "--warehouse", wh, "--family", "", "--seq", "MARETFAR")[0] == 4
    assert run(capsys, "classify", "--kb", kb, "--warehouse", wh, "--seq", "AA", "--fasta", "x.fa")[0] == 4
    assert run(capsys, "bench", "--synthetic", "--families", "1")[0] == 4
    assert run(capsys, "bench")[0] == 4
    bad = tmp_path / "bad.fa"
    bad.write_text("MARETFAR\n")
    code, _, err = run(capsys, "features", "--fasta", bad)
    assert code == 2 and "Traceback" not in err


def test_build_kb(capsys, tmp_path, files):
    wh, kb = files
    save_warehouse(synthetic_warehouse(2, 5, seed=0), wh)
    code, out, _ = run(capsys, "build-kb", "--warehouse", wh, "--out", kb)
    assert code == 0 and out.splitlines() == ["families\t2", "rows\t10"]
    assert len(load_knowledge(kb).ranges()) == 36
    lines = kb.read_text().splitlines()
    assert lines[0] == "countrow\t10"
    assert len(lines) == 1 + 18 + 1 + 36


def _norm(text):
    return [" ".join(line.split()) for line in text.splitlines()]


def test_features_tables(capsys):
    code, out, _ = run(capsys, "features", "--seq", "MARETFAR")
    lines = _norm(out)
    assert code == 0
    assert "Hydrophobic 4 50.00%" in lines
    assert "Hydrophobic–Hydrophilic 2 28.57%" in lines
    assert "# exchange groups e5e4e1e2e4e6e4e1" in lines
    assert "AR 2 0.2857142857142857" in lines


def test_features_pattern(capsys):
    code, out, _ = run(capsys, "features", "--seq", "AA", "--pattern")
    slots = _norm(out.split("# pattern vector nonzero slots\n")[1])
    assert slots == ["0 AA 1.0", "421 e4e4 1.0"]


def test_prp4_both_orders(capsys, files):
    wh, kb = files
    wh_obj = synthetic_warehouse(3, 30, seed=2)
    save_warehouse(wh_obj, wh)
    main(["-q", "insert", "--warehouse", str(wh), "--family", "PRP4-like", "--seq", PRP4])
    main(["-q", "insert", "--warehouse", str(wh), "--family", "PRP4-like", "--seq", PRP4[:300]])
    main(["-q", "insert", "--warehouse", str(wh), "--family", "PRP4-like", "--seq", PRP4[200:]])
    capsys.readouterr()
    results = {}
    for order in ("fuzzy-first", "neural-first"):
        code, out, _ = run(capsys, "classify", "--kb", kb, "--warehouse", wh, "--seq", PRP4, "--order", order)
        assert code == 0
        results[order] = out.strip().split("\t")
    assert results["fuzzy-first"][1] == results["neural-first"][1] == "PRP4-like"
    assert results["fuzzy-first"][2] == "phase1"
    assert float(results["fuzzy-first"][3]) <= float(results["neural-first"][3])


def test_bench_cli(capsys, tmp_path):
    argv = ["bench", "--synthetic", "--families", "3", "--per-family", "30", "--n", "40", "--seed", "1", "--no-timing"]
    code, out1, _ = run(capsys, *argv)
    _, out2, _ = run(capsys, *argv)
    assert code == 0 and out1 == out2
    rows = [line.split("\t") for line in out1.splitlines()]
    assert [r[0] for r in rows[1:]] == ["fuzzy-first", "neural-first"]
    for r in rows[1:]:
        assert sum(map(int, r[2:5])) == 40
    out_path = tmp_path / "rep.jsonl"
    run(capsys, *argv, "--json", "--out", out_path)
    assert len(out_path.read_text().splitlines()) == 2


def test_bench_cli_warehouse(capsys, tmp_path):
    wh = tmp_path / "wh.tsv"
    save_warehouse(synthetic_warehouse(2, 20, seed=0), wh)
    from protcascade.synthetic import synthetic_draws

    fa = tmp_path / "test.fa"
    fa.write_text("".join(f">q{i} {fam}\n{seq}\n" for i, (fam, seq) in enumerate(synthetic_draws(2, 6, seed=0))))
    code, out, _ = run(capsys, "bench", "--warehouse", wh, "--fasta", fa, "--n", "4")
    assert code == 0
    assert all(line.split("\t")[1] == "4" for line in out.splitlines()[1:])


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "protcascade", "features", "--seq", "MARXTFAR"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2 and "Traceback" not in proc.stderr
