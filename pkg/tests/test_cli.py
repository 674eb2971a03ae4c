import json

from cartanlie.cli import main, run


def doc_of(argv):
    text, code = run(argv)
    return (json.loads(text) if text else None), code


def test_info_H():
    doc, code = doc_of(["info", "--type", "H", "--p", "5", "--m", "2", "--n", "1,1"])
    assert code == 0 and doc["reports"][0]["evidence"]["dim_H2"] == 23


def test_info_S():
    doc, code = doc_of(["info", "--type", "S", "--n", "1,1"])
    assert doc["reports"][0]["evidence"]["codim_S1_in_S"] == 2


def test_info_W():
    doc, _ = doc_of(["info", "--type", "W", "--m", "1", "--n", "2"])
    assert doc["reports"][0]["evidence"]["dim_W"] == 25


def test_config_errors():
    assert doc_of(["verify", "--p", "3"]) == (None, 2)
    assert doc_of(["info", "--m", "2", "--n", "1"]) == (None, 2)
    assert doc_of(["verify", "--suite", "nope"]) == (None, 2)
    assert main(["bogus"]) == 2


def test_verify_jacobi_W2():
    doc, code = doc_of(["verify", "--suite", "jacobi", "--type", "W", "--m", "2", "--samples", "50"])
    assert code == 0
    (r,) = doc["reports"]
    assert r["parameters"]["algebra"] == "W(2,(1,1))" and r["evidence"]["triples"] == 50


def test_timings_opt_in():
    doc, _ = doc_of(["verify", "--suite", "dimensions", "--type", "H"])
    assert "timings" not in doc
    doc, _ = doc_of(["verify", "--suite", "dimensions", "--type", "H", "--timings"])
    assert set(doc["timings"]) == {"dimensions"}


def test_witness_commands(capsys):
    doc, code = doc_of(["witness", "--type", "S", "--elem", "d1 + -1*d2"])
    assert code == 0 and "[D,Delta]=0: true" in capsys.readouterr().err
    doc, code = doc_of(["witness", "--type", "H", "--elem", "x[1,0]"])
    assert code == 0 and doc["reports"][0]["witnesses"][1] == "x[2,0]*d2"
    doc, code = doc_of(["witness", "--type", "K", "--elem", "1"])
    assert code == 0 and doc["reports"][0]["evidence"]["dim"] >= 2


def test_witness_errors():
    assert doc_of(["witness", "--type", "H", "--elem", "x[2,0]"]) == (None, 1)
    assert doc_of(["witness", "--type", "H", "--elem", "x[2"]) == (None, 2)
    assert doc_of(["witness", "--type", "K", "--elem", "x[1,0,0]"]) == (None, 1)
    assert doc_of(["witness", "--type", "W", "--elem", "d1"]) == (None, 2)


def test_out_file(tmp_path):
    out = tmp_path / "r.json"
    text, code = run(["info", "--type", "K", "--out", str(out)])
    assert code == 0 and out.read_text() == text
