import io
import json
from fractions import Fraction

import numpy as np
import pytest

from upblab import __version__
from upblab.bestate import upb_complement_state
from upblab.catalog import CATALOG, tiles_3x3
from upblab.cli import run
from upblab.io import FormatError, decode_amp, density_from_dict, density_to_dict, digest, encode_amp, set_from_dict, set_to_dict
from upblab.linalg import default_tol, resolve_tol
from upblab.states import LocalVector, ProductBasisSet, ProductState


def invoke(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    text = buf.getvalue()
    return code, (json.loads(text) if text else None)


@pytest.fixture
def setfile(tmp_path):
    def write(name):
        path = tmp_path / f"{name}.json"
        code, doc = invoke("catalog", name)
        assert code == 0
        path.write_text(json.dumps(doc))
        return str(path)
    return write


# ---------------------------------------------------------------- JSON round trips


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_set_round_trip_is_exact(name):
    upb = CATALOG[name]()
    doc = json.loads(json.dumps(set_to_dict(upb)))
    back = set_from_dict(doc)
    assert back.states == upb.states and back.stopper == upb.stopper and back.dims == upb.dims
    for st in doc["states"]:
        for v in st["locals"]:
            assert all(isinstance(a, int) for a in v)


def test_amplitude_encoding():
    for a in (3, Fraction(-2, 7), 0.5, complex(1, -2)):
        assert decode_amp(json.loads(json.dumps(encode_amp(a)))) == a
    with pytest.raises(FormatError):
        decode_amp(True)
    with pytest.raises(FormatError):
        decode_amp("x/y")
    with pytest.raises(FormatError):
        decode_amp({"re": 1})


def test_rational_set_round_trip():
    upb = ProductBasisSet((2, 2), [ProductState([LocalVector([Fraction(1, 3), 1]), LocalVector([1, 0])])])
    assert set_from_dict(json.loads(json.dumps(set_to_dict(upb)))).states == upb.states


def test_density_round_trip():
    rho = upb_complement_state(tiles_3x3())
    back = density_from_dict(json.loads(json.dumps(density_to_dict(rho))))
    assert np.array_equal(back.matrix, rho.matrix) and back.declared_rank == 4


def test_bad_documents():
    with pytest.raises(FormatError):
        set_from_dict({"dims": [2, 2]})
    with pytest.raises(FormatError):
        set_from_dict({"dims": [2, 2], "states": [{"loc": []}]})
    with pytest.raises(FormatError):
        density_from_dict({"dims": [2, 2], "entries": [0.0] * 3})


def test_digest_is_canonical():
    assert digest({"a": 1, "b": [1, 2]}) == digest({"b": [1, 2], "a": 1})
    assert digest({"a": 1}) != digest({"a": 2})


# ---------------------------------------------------------------- subcommands


def test_catalog_tiles():
    code, doc = invoke("catalog", "tiles3x3")
    assert code == 0 and len(doc["states"]) == 5 and doc["stopper"] == 4


def test_catalog_generalized():
    code, doc = invoke("catalog", "generalized", "--d1", "4", "--d2", "4", "--s", "0", "--t", "2", "--g", "0", "--h", "2")
    assert code == 0 and len(doc["states"]) == 12
    assert invoke("catalog", "generalized", "--d1", "3")[0] == 64
    assert invoke("catalog", "generalized", "--d1", "3", "--d2", "3", "--s", "0", "--t", "2", "--g", "0", "--h", "1")[0] == 64


def test_verify_shift(setfile):
    code, doc = invoke("verify", setfile("shift"))
    assert code == 0
    assert doc["payload"]["unextendible"] is True and doc["payload"]["size"] == 4
    assert doc["checks"] == {"orthogonal": "pass", "unextendible": "pass", "stopper_removal_completable": "pass"}
    assert doc["version"] == __version__ and doc["command"] == "verify"
    assert len(doc["input_digest"]) == 64 and doc["wall_time"] >= 0


def test_verify_reports_failures(tmp_path):
    upb = tiles_3x3().without([4])
    p = tmp_path / "four.json"
    p.write_text(json.dumps(set_to_dict(upb)))
    code, doc = invoke("verify", str(p))
    assert code == 1
    assert doc["checks"]["unextendible"] == "fail" and "witness" in doc["payload"]
    bad = set_to_dict(tiles_3x3())
    bad["states"][4]["locals"] = [[1, 0, 0], [1, 0, 0]]
    p.write_text(json.dumps(bad))
    code, doc = invoke("verify", str(p))
    assert code == 1 and doc["payload"]["non_orthogonal_pair"] == [0, 4]


def test_bestate_writes_state(setfile, tmp_path):
    out = tmp_path / "rho.json"
    code, doc = invoke("bestate", setfile("tiles3x3"), "-o", str(out), "--restarts", "16")
    assert code == 0
    assert doc["payload"]["rank"] == 4 and doc["checks"]["edge_candidate"] == "pass"
    assert doc["seed"] == 1
    assert density_from_dict(json.loads(out.read_text())).rank() == 4


def test_mix_and_witness(setfile, tmp_path):
    s = setfile("shift")
    out = tmp_path / "sigma.json"
    code, doc = invoke("mix", s, "--lambda", "0.02", "--weights", "0.25", "0.25", "0.25", "0.25", "-o", str(out))
    assert code == 0 and doc["payload"]["rank"] == 8
    code, doc = invoke("witness", s, str(out))
    assert code == 0 and doc["checks"]["detected"] == "pass"
    code, doc = invoke("mix", s, "--lambda", "0.5", "--weights", "0.25", "0.25", "0.25", "0.25")
    assert code == 1 and doc["checks"]["witness_detected"] == "fail"
    assert invoke("mix", s, "--lambda", "0.5", "--weights", "1")[0] == 64


def test_range_command(setfile, tmp_path):
    s = setfile("tiles3x3")
    rho = tmp_path / "rho.json"
    invoke("bestate", s, "-o", str(rho), "--restarts", "8")
    code, doc = invoke("range", str(rho), "--complement", s)
    assert code == 1 and doc["payload"]["status"] == "violated"
    sigma = tmp_path / "sigma.json"
    invoke("mix", s, "--lambda", "0.05", "--weights", "0", "0", "0", "0", "1", "-o", str(sigma), "--restarts", "8")
    four = tmp_path / "four.json"
    four.write_text(json.dumps(set_to_dict(tiles_3x3().without([4]))))
    code, doc = invoke("range", str(sigma), "--complement", str(four))
    assert code == 0 and doc["payload"]["status"] == "satisfied"
    assert len(doc["payload"]["spanning_products"]) == 5
    code, doc = invoke("range", str(sigma), "--restarts", "8")
    assert code == 2 and doc["checks"]["range_criterion"] == "inconclusive"


def test_reduce_reducible_2x2x3(setfile):
    code, doc = invoke("reduce", setfile("reducible2x2x3"))
    assert code == 0
    parties = doc["payload"]["parties"]
    assert [p["trivial"] for p in parties] == [True, True, False]
    assert len(parties[2]["projectors"]) == 2
    assert doc["payload"]["verdict"] == "first-round reducible"


def test_usage_errors(tmp_path, setfile):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert invoke("verify", str(bad))[0] == 64
    assert invoke("verify", str(tmp_path / "missing.json"))[0] == 64
    mismatch = set_to_dict(tiles_3x3())
    mismatch["dims"] = [3, 4]
    bad.write_text(json.dumps(mismatch))
    assert invoke("verify", str(bad))[0] == 64
    rho = tmp_path / "rho.json"
    invoke("bestate", setfile("shift"), "-o", str(rho), "--restarts", "4")
    assert invoke("witness", setfile("tiles3x3"), str(rho), "--restarts", "4")[0] == 64
    with pytest.raises(SystemExit) as info:
        run(["nonsense"])
    assert info.value.code == 64


def test_tolerance_env_override(monkeypatch, setfile):
    assert default_tol() == 1e-9
    monkeypatch.setenv("UPBLAB_TOL", "1e-6")
    assert default_tol() == 1e-6 and resolve_tol(None) == 1e-6 and resolve_tol(1e-3) == 1e-3
    assert invoke("verify", setfile("shift"))[1]["tolerance"] == 1e-6
    monkeypatch.setenv("UPBLAB_TOL", "abc")
    with pytest.raises(ValueError):
        default_tol()


def _stable(doc):
    return {k: v for k, v in doc.items() if k != "wall_time"}


def test_reports_are_deterministic(setfile):
    s = setfile("tiles3x3")
    for argv in (["verify", s], ["witness", s, "--restarts", "8"], ["reduce", s]):
        assert _stable(invoke(*argv)[1]) == _stable(invoke(*argv)[1])
