import json

import pytest
import yaml

from splitkit.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main


@pytest.fixture
def run(capsys, tmp_path):
    config = str(tmp_path / "splitkit_config.yaml")

    def _run(*argv):
        code = main([*argv, "--config", config])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    _run.config = config
    return _run


def test_validate(run, fixture_path):
    code, out, _ = run("validate", fixture_path("star"))
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["ok"] is True
    assert {check["name"] for check in report["checks"]} >= {"generates_ambient", "fa_subgraph"}


def test_check_exit_codes(run, fixture_path):
    code, out, _ = run("check", fixture_path("loop_placement"), "b", "c")
    assert code == EXIT_FAILED
    assert json.loads(out)["criterion_met"] is False
    code, out, _ = run("check", fixture_path("edge_placement"), "b", "c")
    assert code == EXIT_OK
    assert json.loads(out)["criterion_met"] is True
    assert json.loads(out)["certificate"]["leading"] == "c"


def test_lenient_flag_overrides_default(run, fixture_path):
    code, _, _ = run("check", fixture_path("loop_placement"), "b", "c", "--envelope-disjointness", "lenient")
    assert code == EXIT_OK


def test_malformed_json(run, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"schema": ')
    code, out, err = run("validate", str(path))
    assert code == EXIT_INPUT
    assert out == ""
    assert "malformed JSON" in err


def test_schema_error_names_the_location(run, tmp_path, fixture_path):
    with open(fixture_path("star"), encoding="utf-8") as f:
        data = json.load(f)
    data["edges"][0]["to"] = "Q"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, _, err = run("validate", str(path))
    assert code == EXIT_INPUT
    assert "$.edges[0].to" in err


def test_missing_file_and_unknown_tuple(run, tmp_path, fixture_path):
    code, _, err = run("validate", str(tmp_path / "nowhere.json"))
    assert code == EXIT_INPUT
    assert err.startswith("Error:")
    code, _, err = run("minsub", fixture_path("star"), "d")
    assert code == EXIT_INPUT
    assert "unknown tuple" in err


def test_invalid_saturation(run, fixture_path):
    code, _, err = run("blocks", fixture_path("star"), "c", "--saturation", "0")
    assert code == EXIT_INPUT
    assert "--saturation" in err


def test_no_command_prints_help(capsys):
    assert main([]) == EXIT_INPUT
    assert "usage" in capsys.readouterr().out


def test_minsub_and_blocks(run, fixture_path):
    code, out, _ = run("minsub", fixture_path("star"), "b")
    assert code == EXIT_OK
    assert json.loads(out)["subgraph"]["edges"] == ["e_RZ", "e_ZW"]
    code, out, _ = run("blocks", fixture_path("star"), "c")
    assert code == EXIT_OK
    data = json.loads(out)
    assert [block["edges"] for block in data["blocks"]] == [["e_RZ", "e_UZ"], ["e_VZ", "e_ZW", "e_t"]]
    _, out, _ = run("blocks", fixture_path("star"), "c", "--saturation", "2")
    assert json.loads(out)["saturation"] == 2


def test_dot_output_is_deterministic(run, fixture_path):
    args = ("dot", fixture_path("star"), "--overlay", "b", "--overlay", "fa")
    code, first, _ = run(*args)
    assert code == EXIT_OK
    _, second, _ = run(*args)
    assert first == second
    assert first.startswith('graph "star" {')


def test_dot_vertex_group(run, fixture_path):
    code, out, _ = run("dot", fixture_path("star"), "--vertex-group", "W")
    assert code == EXIT_OK
    assert out.startswith('digraph "W" {')


def test_unknown_overlay(run, fixture_path):
    code, _, err = run("dot", fixture_path("star"), "--overlay", "nope")
    assert code == EXIT_INPUT
    assert "--overlay" in err


def test_check_as_dot(run, fixture_path):
    code, out, _ = run("check", fixture_path("star"), "b", "c", "--format", "dot")
    assert code == EXIT_OK
    assert "// overlay b:block0" in out


def test_certify(run, fixture_path):
    code, out, _ = run("certify", fixture_path("chain"), "b", "c")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["status"] == "certified"
    assert data["verified"] is True
    assert data["certificate"]["leading"] == "c"
    code, out, _ = run("certify", fixture_path("loop_placement"), "b", "c")
    assert code == EXIT_FAILED
    assert json.loads(out)["status"] == "criterion_failed"


def test_twist(run, fixture_path):
    code, out, _ = run("twist", fixture_path("star"), "e_ZW", "1", "w")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["image"] == "zwZ"
    assert data["automorphism"]["w"] == "zwZ"
    code, _, _ = run("twist", fixture_path("star"), "e_t", "1", "w")
    assert code == EXIT_INPUT


def test_witness(run, fixture_path):
    code, out, _ = run("witness", fixture_path("star"), "b", "c",
                       "--twist", "e_RZ=1", "--twist", "e_ZW=2", "--conjugator", "Z")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["images"]["c"] == ["u", "tvwT"]
    assert data["images"]["b"] == ["zwZ"]
    code, out, _ = run("witness", fixture_path("star"), "b", "c", "--twist", "e_RZ=1")
    assert code == EXIT_FAILED
    assert json.loads(out)["witness"] is None
    code, _, err = run("witness", fixture_path("star"), "b", "c", "--twist", "e_RZ")
    assert code == EXIT_INPUT
    assert "--twist" in err


def test_amalgamate(run, fixture_path):
    code, out, _ = run("amalgamate", fixture_path("edge_placement"), fixture_path("edge_placement"))
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["renaming"]["t"] == "a"
    assert data["scenario"]["rank"] == 5
    assert data["scenario"]["tuples"]["b'"] == ["ayA"]


def test_selfcheck(run, fixture_path):
    code, out, _ = run("selfcheck", fixture_path("chain"), "--samples", "25", "--max-length", "12", "--seed", "7")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data == {"seed": 7, "samples": 25, "max_length": 12, "ok": True, "failures": []}


def test_config_round_trip(run):
    code, out, _ = run("config", "--saturation", "3", "--envelope-disjointness", "lenient")
    assert code == EXIT_OK
    assert out.startswith("Config updated:")
    with open(run.config, encoding="utf-8") as f:
        assert yaml.safe_load(f) == {"saturation": 3, "envelope_disjointness": "lenient"}
    code, out, _ = run("config")
    assert json.loads(out)["config"]["saturation"] == 3


def test_config_file_feeds_commands(run, fixture_path):
    run("config", "--envelope-disjointness", "lenient")
    code, _, _ = run("check", fixture_path("loop_placement"), "b", "c")
    assert code == EXIT_OK
