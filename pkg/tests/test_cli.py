import csv
import json

import numpy as np
import pytest
from click.testing import CliRunner

from subalg import algebra as A
from subalg import atoms
from subalg.cli import (
    EXIT_CODES,
    OPS,
    collection_from_document,
    collection_to_document,
    dump_collection,
    format_entry,
    load_collection,
    main,
    parse_z_list,
)
from subalg.collections import YCollection
from subalg.generators import random_superfunction, random_y_collection, random_z_collection
from subalg.hexmap import CSV_COLUMNS
from subalg.reduction import prune_z
from subalg.spaces import Subspace


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)

    return invoke


@pytest.fixture
def files(tmp_path):
    rng = np.random.default_rng(7)
    made = {
        "z2": prune_z(random_z_collection(rng, 6, m=1, n=2))[0],
        "z3": prune_z(random_z_collection(rng, 7, m=1, n=3))[0],
        "zm2": random_z_collection(rng, 7, m=2, n=2),
        "plug": prune_z(random_z_collection(rng, 4, m=1, n=2))[0],
        "y1": random_y_collection(rng, 5, m=2, n=2),
        "y2": random_y_collection(rng, 6, m=2, n=2),
        "s1": random_superfunction(rng, 1, 2, 1),
        "s2": random_superfunction(rng, 1, 2, 1),
        "ident": A.identity_superfunction(A.PortMaps.default(1)),
    }
    made["ext"] = A.extension(made["zm2"], np.eye(2))
    out = {}
    for name, c in made.items():
        out[name] = tmp_path / f"{name}.json"
        dump_collection(c, out[name])
    out["dir"] = tmp_path
    return out


def test_format_helpers():
    assert format_entry(1) == "1+0i"
    assert format_entry(-0.5 + 2j) == "-0.5+2i"
    assert np.allclose(parse_z_list("1, 2+1i,0.5j"), [1, 2 + 1j, 0.5j])


def test_roundtrip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(1)
    for c in (random_z_collection(rng, 6, m=2, n=3), random_y_collection(rng, 5, m=1, n=2),
              random_superfunction(rng, 1, 2, 1)):
        path = tmp_path / "c.json"
        dump_collection(c, path)
        back, _ = load_collection(path)
        doc = collection_to_document(c)
        assert collection_to_document(back) == doc
        again = collection_from_document(json.loads(json.dumps(doc)))
        assert collection_to_document(again) == doc


def test_realize_writes_files(run, tmp_path):
    out = tmp_path / "prod.json"
    res = run("realize", "z1*z2/z3", "--out", out)
    assert res.exit_code == 0, res.output
    assert "max residual" in res.output
    cert = json.loads(out.with_suffix(".cert.json").read_text())
    assert cert["passed"] and cert["max_residual"] < 1e-7
    c, meta = load_collection(out)
    assert c.kind == "Z" and meta["target"] == "(z1*z2)/(z3)"


def test_realize_errors(run, tmp_path):
    res = run("realize", "z1+", "--out", tmp_path / "x.json")
    assert res.exit_code == EXIT_CODES["parse"]
    assert "offset 3" in res.output
    res = run("realize", "z1-z2", "--out", tmp_path / "x.json")
    assert res.exit_code == EXIT_CODES["parse"]
    assert "NotNormalizable" in res.output


def test_eval(run, files):
    res = run("eval", files["zm2"], "--z", "1,1")
    assert res.exit_code == 0
    assert res.output.split() == ["1+0i", "0+0i", "0+0i", "1+0i"] or all(
        abs(complex(x.replace("i", "j")) - v) < 1e-11
        for x, v in zip(res.output.split(), [1, 0, 0, 1]))
    res = run("eval", files["z2"], "--z", "0,1", "--method", "direct")
    assert res.exit_code == EXIT_CODES["solver"]
    assert "SingularL" in res.output
    res = run("eval", files["z2"], "--z", "0,1", "--method", "shifted")
    assert res.exit_code == 0


OP_ARGS = {
    "add": (["y1", "y2"], []),
    "mul": (["s1", "s2"], []),
    "subst-y": (["y1", "plug"], ["--slot", 1]),
    "subst-z": (["z2", "plug"], ["--slot", 0]),
    "dual": (["y1"], []),
    "merge": (["z3"], ["--i", 0, "--j", 2]),
    "extend": (["zm2"], ["--matrix", "[[1, 2], [0, 1]]"]),
    "refscale": (["y1"], ["--c-e", "1,2", "--c-j", "1,-1"]),
    "addinv": (["y1"], []),
    "mulinv": (["s1"], []),
    "prune": (["zm2"], []),
    "normalize": (["ext"], []),
    "reduce": (["z2"], []),
    "cf": (["z2"], ["--depth", 5]),
    "project-u": (["zm2"], ["--matrix", "[[1], [0]]"]),
    "embed": (["y1"], ["--dim", 3]),
}


def test_every_op_is_covered():
    assert set(OP_ARGS) == set(OPS)


@pytest.mark.parametrize("name", sorted(OP_ARGS))
def test_ops_succeed(run, files, name):
    operands, extra = OP_ARGS[name]
    out = files["dir"] / f"out-{name}.json"
    res = run("op", name, *[files[k] for k in operands], "--out", out, *extra)
    assert res.exit_code == 0, res.output
    assert "validate: ok" in res.output
    _, meta = load_collection(out)
    assert meta["law_residual"] < 1e-8


def test_add_with_inverse_is_zero(run, files):
    inv = files["dir"] / "inv.json"
    assert run("op", "addinv", files["y1"], "--out", inv).exit_code == 0
    out = files["dir"] / "zero.json"
    assert run("op", "add", files["y1"], inv, "--out", out).exit_code == 0
    _, meta = load_collection(out)
    assert meta["max_entry"] < 1e-8


def test_mul_with_identity(run, files):
    out = files["dir"] / "same.json"
    res = run("op", "mul", files["s1"], files["ident"], "--out", out)
    assert res.exit_code == 0
    _, meta = load_collection(out)
    assert meta["law_residual"] < 1e-10


def test_kind_mismatch_and_condition(run, files, tmp_path):
    res = run("op", "add", files["z2"], files["z2"], "--out", tmp_path / "x.json")
    assert res.exit_code == EXIT_CODES["kind"]
    e = np.eye(2)
    bad = YCollection(Subspace(e[:, [1]]), Subspace(e[:, [0]]), Subspace(e[:, [0]]),
                      (Subspace(e[:, [1]]), Subspace.zero(2)))
    path = tmp_path / "bad.json"
    dump_collection(bad, path)
    res = run("op", "normalize", path, "--out", tmp_path / "x.json")
    assert res.exit_code == EXIT_CODES["condition"]
    assert "V" in res.output and "J" in res.output


def test_hexplot(run, files, tmp_path):
    csv_path, svg_path = tmp_path / "poles.csv", tmp_path / "poles.svg"
    res = run("hexplot", files["z3"], "--out", csv_path, "--svg", svg_path, "--grid-count", 5)
    assert res.exit_code == 0, res.output
    rows = list(csv.reader(csv_path.open()))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert svg_path.read_text().startswith("<svg")
    counts = dict(kv.split(": ") for kv in res.output.splitlines()[0].split(": ", 1)[1].split(", "))
    dims = [int(x) for x in res.output.splitlines()[1].split(": ")[1].split(", ")]
    assert all(int(counts[str(i + 1)]) <= dims[i] for i in range(3))
    res = run("hexplot", files["z2"], "--out", csv_path)
    assert res.exit_code == EXIT_CODES["hexplot"]


def test_seed_from_environment(files, tmp_path):
    runner = CliRunner()
    out = tmp_path / "p.json"
    res = runner.invoke(main, ["op", "prune", str(files["zm2"]), "--out", str(out)],
                        env={"SUBALG_SEED": "11"})
    assert res.exit_code == 0
    assert "seed 11" in res.output
