import json
from pathlib import Path

from expecttest import assert_expected_inline
import pytest

from hhtannaka.cli import load_project, load_seed_file, main, parse_project, serialize_project
from hhtannaka.corpus import BUNDLED
from hhtannaka.errors import ProjectParseError

PROJECTS = Path(__file__).resolve().parents[1] / "hhtannaka" / "projects"


def path_category_json(coefficient="1"):
    return {
        "name": "path",
        "field": "QQ",
        "objects": ["0", "1", "2", "3"],
        "homs": {
            "f": ["0", "1", 0], "g": ["1", "2", 0], "h": ["2", "3", 0],
            "gf": ["0", "2", 0], "hg": ["1", "3", 0], "hgf": ["0", "3", 0],
        },
        "compose": [
            ["g", "f", [["gf", "1"]]],
            ["h", "g", [["hg", "1"]]],
            ["h", "gf", [["hgf", "1"]]],
            ["hg", "f", [["hgf", coefficient]]],
        ],
    }


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(p)


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_bundled_json_matches_builder(name):
    P = load_project(PROJECTS / f"{name}.json")
    Q = BUNDLED[name]()
    assert P.category.signature() == Q.category.signature()
    assert sorted(P.fibres) == sorted(Q.fibres)
    assert (P.monoidal is None) == (Q.monoidal is None)


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_serialize_round_trip(name):
    P = load_project(PROJECTS / f"{name}.json")
    data = serialize_project(P)
    Q = parse_project(json.loads(json.dumps(data)), name)
    assert Q.category.signature() == P.category.signature()
    assert serialize_project(Q) == data


def test_validate_exit_codes(tmp_path, capsys):
    assert main(["validate", str(PROJECTS / "kellerex.json")]) == 0
    assert main(["validate", write(tmp_path, "path.json", path_category_json())]) == 0
    capsys.readouterr()
    assert main(["validate", write(tmp_path, "bad.json", path_category_json("2"))]) == 1
    assert "associativity fails on ('h', 'g', 'f')" in capsys.readouterr().out


def test_validate_empty_category(tmp_path):
    assert main(["validate", write(tmp_path, "empty.json", {"name": "∅", "objects": []})]) == 0


def test_validate_csv(capsys):
    assert main(["--csv", "validate", str(PROJECTS / "k.json")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "check,passed,checks,failures"
    assert [l.split(",")[:2] for l in lines[1:]] == [["category k", "True"], ["fibre functor ω", "True"]]


def test_input_errors_exit_2(tmp_path, capsys):
    assert main(["validate", write(tmp_path, "broken.json", "{not json")]) == 2
    assert "not JSON" in capsys.readouterr().err
    assert main(["validate", str(tmp_path / "missing.json")]) == 2
    unknown = path_category_json()
    unknown["compose"].append(["g", "nope", [["gf", "1"]]])
    assert main(["validate", write(tmp_path, "unknown.json", unknown)]) == 2
    assert "unknown morphism" in capsys.readouterr().err


def test_parse_errors():
    with pytest.raises(ProjectParseError, match="unknown object"):
        parse_project({"objects": ["a"], "homs": {"f": ["a", "b", 0]}})
    with pytest.raises(ProjectParseError, match="top level"):
        parse_project([1, 2])
    with pytest.raises(ProjectParseError, match="malformed"):
        parse_project({"objects": ["a"], "homs": {"f": ["a", "a"]}})


def test_tannakian_dual_table(capsys):
    path = str(PROJECTS / "kellerex.json")
    assert main(["--csv", "tannakian-dual", path, "--level", "6", "--homology-window=-6..0"]) == 0
    assert_expected_inline(
        capsys.readouterr().out,
        """\
degree,dim,H
0,1,1
-1,1,1
-2,1,1
-3,1,1
-4,1,1
-5,1,1
-6,1,1
""",
    )


def test_tannakian_dual_refuses_outside_window(capsys):
    path = str(PROJECTS / "kellerex.json")
    assert main(["tannakian-dual", path, "--level", "2", "--homology-window=-5..0"]) == 2
    assert "rebuild with truncation level" in capsys.readouterr().err


def test_bialgebra_and_shuffle_commands(capsys):
    assert main(["bialgebra", str(PROJECTS / "Z2.json"), "--level", "2"]) == 0
    assert "bialgebra" in capsys.readouterr().out
    k = str(PROJECTS / "kellerex.json")
    assert main(["shuffle-check", k, k, "--level", "4", "--degrees=-3..0"]) == 0


def test_corpus_command(tmp_path, capsys):
    assert main(["--csv", "corpus", "--count", "3", "--level", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "instance,objects,dim C,valid,coalgebra,simplicial,normalization"
    assert len(lines) == 4
    assert load_seed_file(PROJECTS / "random.json") == {"count": 25, "seed": 0, "field": "109", "level": 4}
    assert main(["corpus", write(tmp_path, "seeds.json", {"count": 1})]) == 2


def test_unknown_module_spec(capsys):
    assert main(["adjunction", str(PROJECTS / "kellerex.json"), "--module", "sphere", "--level", "2"]) == 2
    assert "Unknown module" in capsys.readouterr().err


def test_adjunction_commands(capsys):
    path = str(PROJECTS / "kellerex.json")
    assert main(["adjunction", path, "--comodule", "C"]) == 0
    assert capsys.readouterr().out.startswith("counit at ")
    assert main(["--csv", "adjunction", path, "--module", "h:*"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "check,degree,H source,H target,rank"
    rows = [l.split(",") for l in lines[1:]]
    assert {r[0] for r in rows} == {"a: η at '*'", "b: η⊗P"}
    assert all(r[2] == r[3] == r[4] for r in rows)
    assert main(["--csv", "adjunction", path, "--comodule", "C"]) == 0
    assert [l.split(",")[1] for l in capsys.readouterr().out.splitlines()[1:]] == ["-3", "-2", "-1", "0", "1", "2"]


def test_field_override_reaches_projects(tmp_path, monkeypatch, capsys):
    bare = json.loads((PROJECTS / "k.json").read_text())
    del bare["field"]
    path = write(tmp_path, "bare.json", bare)
    monkeypatch.setenv("HHTANNAKA_FIELD", "7")
    assert main(["tannakian-dual", path, "--level", "2"]) == 0
    assert " over GF(7): L = 2" in capsys.readouterr().out
    # an explicit field in the file wins
    assert main(["tannakian-dual", str(PROJECTS / "k.json"), "--level", "2"]) == 0
    assert " over QQ: L = 2" in capsys.readouterr().out


def test_bad_corpus_field_is_an_input_error(capsys):
    assert main(["corpus", "--field", "12", "--count", "1"]) == 2
    assert "Unknown field" in capsys.readouterr().err
