import json

import numpy as np
import pytest
from hypothesis import given

from conftest import rotated_structures
from hermitian_btp import catalog, jsonio
from hermitian_btp.cli import main
from hermitian_btp.errors import ParseError, SchemaError

N3_DOC = ('{"name":"N3","n":3,"terms":[{"k":3,"type":"pm","i":1,"j":1,"re":1,"im":0},'
          '{"k":3,"type":"pm","i":2,"j":2,"re":-1,"im":0}]}')


def _write(tmp_path, name, S_or_text):
    p = tmp_path / name
    data = S_or_text if isinstance(S_or_text, (str, bytes)) else jsonio.emit(S_or_text)
    p.write_bytes(data.encode() if isinstance(data, str) else data)
    return str(p)


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# --- document format -------------------------------------------------------------


def test_n3_document():
    S = jsonio.parse(N3_DOC)
    assert S.name == "N3" and S.n == 3
    np.testing.assert_array_equal(S.F, catalog.n3_example().S.F)


def test_empty_terms_is_abelian():
    assert not jsonio.parse('{"n": 2, "terms": []}').terms()


@given(rotated_structures())
def test_round_trip(S):
    b = jsonio.emit(S)
    S2 = jsonio.parse(b)
    np.testing.assert_array_equal(S2.E, S.E)
    np.testing.assert_array_equal(S2.F, S.F)
    assert jsonio.emit(S2) == b


def test_duplicates_are_summed():
    doc = {"n": 2, "terms": [{"k": 2, "type": "pm", "i": 1, "j": 1, "re": 1, "im": 0}] * 2}
    assert jsonio.parse(json.dumps(doc)).F[1, 0, 0] == 2


def test_pp_reversed_and_equal_indices_rejected():
    for i, j in ((1, 1), (2, 1)):
        doc = {"n": 2, "terms": [{"k": 2, "type": "pp", "i": i, "j": j, "re": 1, "im": 0}]}
        with pytest.raises(SchemaError):
            jsonio.parse(json.dumps(doc))


@pytest.mark.parametrize(
    "doc,err",
    [
        ("{", ParseError),
        ('{"terms": []}', ParseError),
        ('{"n": 9}', SchemaError),
        ('{"n": true}', ParseError),
        ('{"n": 2, "terms": [{"k": 3, "type": "pm", "i": 1, "j": 1, "re": 1, "im": 0}]}', SchemaError),
        ('{"n": 2, "terms": [{"k": 1, "type": "xx", "i": 1, "j": 1, "re": 1, "im": 0}]}', SchemaError),
        ('{"n": 2, "terms": [{"k": 1, "type": "pm", "i": 1, "j": 1, "re": "1", "im": 0}]}', ParseError),
        (b"\xff", ParseError),
    ],
)
def test_bad_documents(doc, err):
    with pytest.raises(err):
        jsonio.parse(doc)


def test_parse_error_names_location():
    with pytest.raises(ParseError, match="line 2"):
        jsonio.parse('{"n": 2,\n  oops}')


# --- exit-code matrix ----------------------------------------------------------------


@pytest.fixture
def files(tmp_path):
    return {
        "n3": _write(tmp_path, "n3.json", N3_DOC),
        "f12": _write(tmp_path, "f12.json", catalog.family_ab(1, 2).S),
        "f11i": _write(tmp_path, "f11i.json", catalog.family_ab(1, 1 + 1j).S),
        "rand": _write(tmp_path, "rand.json", catalog.random_2step(2, 4, 2)),
        "mm": _write(tmp_path, "mm.json", '{"n": 3, "terms": [{"k": 3, "type": "mm", "i": 1, "j": 2, "re": 1, "im": 0}]}'),
        "bad": _write(tmp_path, "bad.json", "{not json"),
        "jacobi": _write(tmp_path, "jac.json", json.dumps({"n": 3, "terms": [
            {"k": 1, "type": "pm", "i": 2, "j": 3, "re": 1, "im": 0},
            {"k": 3, "type": "pm", "i": 1, "j": 1, "re": 1, "im": 0}]})),
        "missing": str(tmp_path / "nope.json"),
    }


@pytest.mark.parametrize(
    "argv,code",
    [
        (["validate", "n3"], 0),
        (["validate", "jacobi"], 1),
        (["validate", "mm"], 1),
        (["validate", "bad"], 2),
        (["validate", "missing"], 2),
        (["classify", "n3"], 0),
        (["classify", "rand"], 0),
        (["classify", "mm"], 2),
        (["identities", "rand"], 0),
        (["theorem11", "f12"], 0),
        (["theorem11", "rand"], 0),
        (["threefold", "f11i"], 0),
        (["threefold", "n3"], 2),
        (["threefold", "jacobi"], 2),
    ],
)
def test_exit_codes(capsys, files, argv, code):
    argv = [argv[0], files[argv[1]]]
    got, _, err = _run(capsys, *argv)
    assert got == code, err


def test_mm_classify_names_precondition(capsys, files):
    code, _, err = _run(capsys, "classify", files["mm"])
    assert code == 2 and "integrability violated" in err


def test_theorem11_output(capsys, files):
    code, out, _ = _run(capsys, "theorem11", files["f12"], "--json")
    data = json.loads(out)
    assert code == 0 and data["equivalent"] and data["btp_direct"]
    assert max(data["conditions"].values()) < 1e-9


def test_threefold_output(capsys, files):
    _, out, _ = _run(capsys, "threefold", files["f11i"], "--json")
    assert json.loads(out)["case"] == "Case2"


def test_tolerance_flag_changes_verdict(capsys, files):
    assert _run(capsys, "identities", files["rand"])[0] == 0
    # below the round-off floor the same residuals count as failures
    assert _run(capsys, "identities", files["rand"], "--tol", "1e-30")[0] == 1


# --- text vs json -----------------------------------------------------------------------


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


@pytest.mark.parametrize("cmd", ["validate", "classify", "theorem11", "identities"])
def test_text_mirrors_json(capsys, files, cmd):
    _, js, _ = _run(capsys, cmd, files["f12"], "--json")
    _, text, _ = _run(capsys, cmd, files["f12"])
    data = json.loads(js)
    flat = _flatten(data)
    lines = {ln.strip().split(":", 1)[0] for ln in text.splitlines() if ":" in ln}
    for key in flat:
        assert key.split(".")[-1] in lines, key
    for key, v in flat.items():
        if isinstance(v, bool):
            assert f"{key.split('.')[-1]}: {v}" in text


# --- catalog, chart, fuzz ---------------------------------------------------------------


def test_catalog_list_and_emit(capsys):
    code, out, _ = _run(capsys, "catalog", "list", "--json")
    assert code == 0 and any(e["name"] == "family_ab" for e in json.loads(out)["entries"])
    code, out, _ = _run(capsys, "catalog", "emit", "family_ab", "--param", "a=1", "--param", "b=1+1i")
    S = jsonio.parse(out)
    np.testing.assert_array_equal(S.F, catalog.family_ab(1, 1 + 1j).S.F)
    assert out.encode() == jsonio.emit(S)


def test_catalog_emit_errors(capsys):
    assert _run(capsys, "catalog", "emit")[0] == 2
    assert _run(capsys, "catalog", "emit", "nope")[0] == 2
    assert _run(capsys, "catalog", "emit", "family_ab", "--param", "a=0")[0] == 2
    assert _run(capsys, "catalog", "emit", "family_ab", "--param", "a=x")[0] == 2


def test_chart_command(capsys):
    code, out, _ = _run(capsys, "chart", "vaisman", "--center", "2,0.5,-1,1", "--samples", "50", "--json")
    assert code == 0 and json.loads(out)["max_residual"] < 1e-9
    assert _run(capsys, "chart", "vaisman", "--center", "1,2")[0] == 2


def test_fuzz_command(capsys):
    code, out, _ = _run(capsys, "fuzz", "--seed", "3", "--count", "10", "--json")
    data = json.loads(out)
    assert code == 0 and data["failures"] == 0 and len(data["results"]) == 10


def test_usage_error(capsys):
    assert _run(capsys)[0] == 2
    assert _run(capsys, "bogus")[0] == 2
