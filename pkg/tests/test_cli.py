import json
import subprocess
import sys

import pytest

from hexalab.cli import dumps, jsonable, main


def run(argv, tmp_path, name="r.json"):
    out = tmp_path / name
    code = main(["verify", *argv, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def test_report_shape_and_exit_zero(tmp_path):
    code, rep, _ = run(["cocycle3", "--seed", "1", "--trials", "2"], tmp_path)
    assert code == 0
    assert list(rep) == ["config", "checks", "summary"]
    assert rep["config"]["field"]["modulus"] == "2147483647"
    (check,) = rep["checks"]
    assert check["name"] == "cocycle3.signed_sum" and check["status"] == "pass"
    assert [t["seed"] for t in check["trials"]] == [1, 2]
    assert rep["summary"]["passed"]


def test_reports_are_byte_identical(tmp_path):
    _, _, a = run(["isotropy", "--field", "gf2=16", "--seed", "9"], tmp_path, "a.json")
    _, _, b = run(["isotropy", "--field", "gf2=16", "--seed", "9"], tmp_path, "b.json")
    assert a.read_bytes() == b.read_bytes()


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("HEXALAB_SEED", "17")
    _, rep, _ = run(["cocycle3"], tmp_path)
    assert rep["config"]["seed"] == 17
    monkeypatch.setenv("HEXALAB_SEED", "x")
    assert main(["verify", "cocycle3"]) == 2


def test_char2_suite_needs_binary_field(capsys):
    assert main(["verify", "cocycle4char2", "--field", "p=7"]) == 2
    assert "binary field" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "nosuch"],
        ["verify", "cocycle3", "--field", "p=9"],
        ["verify", "pachner", "--cluster", "omit=9"],
        ["verify", "exotic", "--complex", "/nonexistent/file"],
        ["verify", "cocycle3", "--trials", "0"],
        ["verify", "cocycle3", "--seed", "-1"],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    assert main(argv) == 2


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 2


def test_failing_check_exits_one(tmp_path):
    # the lifted 4-cocycle is not nontrivial in characteristic 2
    code, rep, _ = run(["cocycle4", "--field", "gf2=16"], tmp_path)
    assert code == 1
    assert rep["checks"][0]["status"] == "fail"


def test_unattainable_sampling_is_an_error(tmp_path):
    code, rep, _ = run(["cocycle4", "--field", "p=3"], tmp_path)
    assert code == 1
    trial = rep["checks"][0]["trials"][0]
    assert rep["checks"][0]["status"] == "error" and "no general-position" in trial["error"]


def test_resampling_is_recorded(tmp_path):
    # rank-certified sampling over F_3 drops rank often
    code, rep, _ = run(["cocycle3", "--field", "p=3", "--seed", "0", "--trials", "3"], tmp_path)
    assert code == 0
    check = rep["checks"][0]
    assert check["status"] == "degenerate-resampled"
    assert any(t["attempts"] > 1 and t["resampled"] for t in check["trials"])


def test_cluster_and_complex_options(tmp_path):
    cx = tmp_path / "k.txt"
    cx.write_text("1 2 3 4 5\n2 3 4 5 6\n")
    code, rep, _ = run(["exotic", "--complex", str(cx)], tmp_path)
    assert code == 0
    assert rep["checks"][-1]["name"] == "exotic.general.file"
    code, rep, _ = run(["pachner", "--cluster", "omit=6,5"], tmp_path)
    assert code == 0
    last = rep["checks"][-1]
    assert last["name"] == "pachner.cluster"
    assert last["trials"][0]["data"]["boundary_dim"] == 8


def test_all_skips_char2_suite_on_odd_fields(tmp_path):
    code, rep, _ = run(["all", "--seed", "1"], tmp_path)
    names = [c["name"] for c in rep["checks"]]
    assert not any(n.startswith("cocycle4char2") for n in names)
    assert code == 0


def test_large_ints_become_strings():
    assert jsonable({"a": 2**60, "b": [3, True]}) == {"a": str(2**60), "b": [3, True]}
    assert dumps({"x": 1}).endswith("\n")


def test_stdout_and_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hexalab", "verify", "cocycle3", "--seed", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["summary"]["passed"]
    assert "checks" in proc.stderr
