import io
import json
import subprocess
import sys

import pytest

from finrel import catalog, cli, relcalc
from finrel.finstruct import CategoryId
from finrel.propcheck import classify, is_equivalence, is_reflexive
from finrel.relcalc import Relation


def run(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--format", "json")
    return code, json.loads(text)


def find_object(key, category):
    return next(e.object for e in catalog.generate_all(category, 3) if e.key == key)


def test_lemma2_on_identities():
    code, rep = run_json("lemma2", "--identities", "--category", "FinAb,FinGrp")
    assert code == 0
    assert [e["category"] for e in rep["entries"]] == ["FinAb", "FinGrp"]
    assert all(e["morphisms"] == e["objects"] for e in rep["entries"])


def test_lemma2_text_report():
    code, text = run("lemma2", "--category", "FinSet", "--max-order", "3")
    assert code == 0
    assert text.startswith("PASS lemma2 FinSet <= 3")
    assert text.rstrip().endswith("1/1 checks passed")


def test_lemma2_reports_the_failing_morphism(monkeypatch):
    real = relcalc.compose

    def broken(s, r, **kw):
        out = real(s, r, **kw)
        if out.dom.order > 1 and out.pairs[0]:
            return Relation(out.dom, out.cod, [set(list(sorted(out.pairs[0]))[:-1])], check=False)
        return out

    monkeypatch.setattr(relcalc, "compose", broken)
    code, rep = run_json("lemma2", "--category", "FinAb", "--max-order", "4")
    assert code == 1
    (entry,) = rep["entries"]
    assert not entry["pass"] and entry["passed"] < entry["morphisms"]
    failure = entry["failure"]
    assert {"dom", "cod", "maps"} <= set(failure)
    code, text = run("lemma2", "--category", "FinAb", "--max-order", "4")
    assert code == 1 and "FAIL lemma2 FinAb" in text and "failing morphism" in text


def test_maltsev_witness_in_sets_revalidates():
    code, rep = run_json("maltsev", "--category", "FinSet")
    assert code == 0
    (entry,) = rep["entries"]
    assert entry["verdict"] == "RefutedWithWitness" == entry["expected"]
    w = entry["witness"]["relation"]
    x = find_object(w["dom"], CategoryId.FinSet)
    r = Relation(x, x, [{tuple(p) for p in w["pairs"]}])
    assert is_reflexive(r) and not is_equivalence(r)
    assert r.pairs[0] == {(0, 0), (1, 1), (0, 1)}


def test_protomodular_witness_in_pointed_sets_revalidates():
    code, rep = run_json("protomodular", "--category", "FinPtSet")
    assert code == 0
    w = rep["entries"][0]["witness"]["relation"]
    assert sorted(map(tuple, w["pairs"])) == [(0, 0), (1, 1), (1, 2)]
    x = find_object(w["dom"], CategoryId.FinPtSet)
    k = classify(Relation(x, x, [{tuple(p) for p in w["pairs"]}]))
    assert k.lpr and k.lps and not k.symmetric


def test_algebraic_categories_confirm():
    code, rep = run_json("maltsev", "--category", "FinAb,FinGrp", "--max-order", "4")
    assert code == 0
    assert {e["verdict"] for e in rep["entries"]} == {"ConfirmedOnSample"}


def test_empty_corpus_confirms_vacuously(tmp_path):
    path = tmp_path / "empty.json"
    catalog.save([], path)
    code, rep = run_json("maltsev", "--category", "FinGrp", "--corpus", str(path))
    (entry,) = rep["entries"]
    assert code == 0 and entry["objects"] == 0 and entry["verdict"] == "ConfirmedOnSample"
    code, rep = run_json("maltsev", "--category", "FinSet", "--corpus", str(path))
    assert code == 1 and rep["entries"][0]["verdict"] == "ConfirmedOnSample"


def test_generate_and_corpus_round_trip(tmp_path):
    path = tmp_path / "corpus.json"
    code, text = run("generate", "--category", "FinAb,FinGrp", "--max-order", "6", "--out", str(path))
    assert code == 0 and text.startswith("wrote 15 entries")
    entries = catalog.load(path)
    assert {e.object.category.value for e in entries} == {"FinAb", "FinGrp"}
    _, from_file = run_json("protomodular", "--category", "FinGrp", "--max-order", "6", "--corpus", str(path))
    _, generated = run_json("protomodular", "--category", "FinGrp", "--max-order", "6")
    assert from_file["entries"] == generated["entries"]


def test_torsion_command():
    code, text = run("torsion", "--instance", "PPrimaryAb(2)", "--object", "Z/12")
    assert code == 0
    assert "TC [[0, 3, 6, 9]] (order 4)" in text and "SES ok" in text
    z3 = catalog.builtin("FinAb", "Z/3").canonical_key
    assert f"LC {z3}" in text
    code, rep = run_json("torsion", "--instance", "PPrimaryAb(2)", "--object", "Z/3")
    assert code == 0 and rep["entries"][0]["unit_is_identity"]
    code, rep = run_json("torsion", "--instance", "NilRedCRng", "--object", "Z/4")
    assert rep["entries"][0]["tc"]["subsets"] == [[0, 2]]


def test_exreg_command():
    code, rep = run_json("exreg", "--object", "{0,2}<|Z/4", "--eq", "[[],[[0,2]]]")
    assert code == 0
    entry = rep["entries"][0]
    assert entry["xmod"]["sorts"] == [2, 2] and entry["xmod"]["boundary"] == [0, 0]
    assert entry["xmod"]["key"] == catalog.builtin("XMod", "Z/2-0->Z/2").canonical_key
    assert entry["reflection"]["sorts"] == [1, 2]
    code, rep = run_json("exreg", "--category", "FinAb", "--object", "Z/4", "--eq", "[[[0,2]]]")
    assert code == 0 and rep["entries"][0]["reflection"]["sorts"] == [2]


@pytest.mark.parametrize("argv", [
    ["torsion", "--instance", "PPrimaryAb(2)", "--object", "Z/5x"],
    ["exreg", "--object", "nope"],
    ["exreg", "--object", "{0,2}<|Z/4", "--eq", "[[0,1]"],
    ["exreg", "--object", "{0,2}<|Z/4", "--eq", "[[[0,9]],[]]"],
    ["torsion", "--instance", "PPrimaryAb(6)", "--object", "Z/6"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _ = run(*argv)
    assert code == 2
    assert "finrel: error" in capsys.readouterr().err


def test_unknown_object_message(capsys):
    run("exreg", "--object", "nope")
    assert "unknown object" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["lemma2", "--category", "Rings"], ["lemma2", "--caps", "bogus=3"],
                                  ["lemma2", "--jobs", "0"], ["frobnicate"]])
def test_argument_errors_exit_2(argv):
    with pytest.raises(SystemExit) as err:
        cli.run(argv, io.StringIO())
    assert err.value.code == 2


def test_caps_parsing():
    caps = cli._caps("homs=10,relations=none")
    assert caps["homs"] == 10 and caps["relations"] is None and caps["samples"] == 64


def test_relation_cap_gives_unknown():
    code, rep = run_json("maltsev", "--category", "FinAb", "--max-order", "4", "--caps", "relations=3")
    assert code == 1 and rep["entries"][0]["verdict"] == "Unknown"


def test_json_is_identical_across_job_counts():
    argv = ["verify-all", "--category", "FinSet,FinPtSet,XMod", "--max-order", "2"]
    _, one = run(*argv, "--format", "json", "--jobs", "1")
    _, two = run(*argv, "--format", "json", "--jobs", "2")
    assert one == two
    rep = json.loads(one)
    assert rep["summary"]["entries"] == len(rep["entries"]) > 3


def test_console_script_exit_code():
    proc = subprocess.run([sys.executable, "-m", "finrel.cli", "torsion", "--instance", "AbNormXMod",
                           "--object", "Z/2-0->Z/2"], capture_output=True, text=True)
    assert proc.returncode == 0 and "SES ok" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "finrel.cli", "exreg", "--object", "missing"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
