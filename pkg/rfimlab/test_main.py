import json

import pytest

from rfimlab.main import EXIT_INVARIANT, EXIT_OK, EXIT_VALIDATION, main, parse_list
from rfimlab.utils.records import RECORDS_FILE
from rfimlab.utils.report import CHART_FILE, CSV_FILE, RUN_CONFIG_FILE, SUMMARY_FILE


def mn_args(out, *extra):
    return ["mn", "--N", "0,2", "--eps", "1", "--samples", "100", "--seed", "5", "--out", str(out), *extra]


def test_parse_list():
    assert parse_list(int)("0, 2,4") == [0, 2, 4]
    with pytest.raises(ValueError):
        parse_list(float)(" , ")


def test_validation_errors_exit_with_one(tmp_path):
    assert main(["mn", "--N", "2", "--samples", "0", "--out", str(tmp_path)]) == EXIT_VALIDATION
    assert main(["mn", "--eps", "abc", "--out", str(tmp_path)]) == EXIT_VALIDATION
    assert main(["geodesic", "--N", "12", "--samples", "1", "--out", str(tmp_path)]) == EXIT_VALIDATION
    assert main(["nonsense"]) == EXIT_VALIDATION


def test_run_writes_artifacts(tmp_path, capsys):
    assert main(mn_args(tmp_path)) == EXIT_OK
    run_dir = tmp_path / "mn"
    for name in (RUN_CONFIG_FILE, RECORDS_FILE, SUMMARY_FILE, CSV_FILE, CHART_FILE):
        assert (run_dir / name).exists(), name
    lines = (run_dir / RECORDS_FILE).read_text(encoding="utf-8").splitlines()
    assert len(lines) == 200
    summary = json.loads((run_dir / SUMMARY_FILE).read_text(encoding="utf-8"))
    assert summary["kind"] == "mn"
    assert (run_dir / CHART_FILE).read_text(encoding="utf-8").startswith("<svg")
    assert "mn" in capsys.readouterr().out


def test_reruns_are_byte_identical(tmp_path):
    assert main(mn_args(tmp_path / "a")) == EXIT_OK
    assert main(mn_args(tmp_path / "b", "--workers", "8")) == EXIT_OK
    for name in (RECORDS_FILE, SUMMARY_FILE, CSV_FILE):
        a = (tmp_path / "a" / "mn" / name).read_bytes()
        b = (tmp_path / "b" / "mn" / name).read_bytes()
        assert a == b, name


def test_report_rebuilds_the_summary(tmp_path, capsys):
    assert main(mn_args(tmp_path)) == EXIT_OK
    run_dir = tmp_path / "mn"
    before = (run_dir / SUMMARY_FILE).read_bytes()
    assert main(["report", str(run_dir)]) == EXIT_OK
    assert "matches" in capsys.readouterr().out
    assert (run_dir / SUMMARY_FILE).read_bytes() == before


def test_report_on_missing_directory_is_an_io_error(tmp_path):
    assert main(["report", str(tmp_path / "absent")]) == 3


def test_config_file_with_overrides(tmp_path):
    config_path = tmp_path / "star.json"
    config_path.write_text(json.dumps({"N": [4], "epsilon": [1.0], "samples": 3}), encoding="utf-8")
    out = tmp_path / "out"
    assert main(["star", "--config", str(config_path), "--samples", "2", "--out", str(out)]) == EXIT_OK
    stored = json.loads((out / "star" / RUN_CONFIG_FILE).read_text(encoding="utf-8"))
    assert stored["samples"] == 2 and stored["N"] == [4]
    assert not (out / "star" / CHART_FILE).exists()


def test_gs_dumps(tmp_path, capsys):
    assert main(["gs", "--N", "2", "--eps", "1", "--seed", "3", "--out", str(tmp_path)]) == EXIT_OK
    for name in ("field.txt", "spins_plus.txt", "spins_minus.txt", "labels.txt"):
        assert (tmp_path / name).exists()
    assert len((tmp_path / "field.txt").read_text(encoding="utf-8").splitlines()) == 25
    assert len((tmp_path / "labels.txt").read_text(encoding="utf-8").splitlines()) == 5
    assert "labels" in capsys.readouterr().out
    assert main(["gs", "--N", "-1"]) == EXIT_VALIDATION


def test_verify_coupling_and_negative_control(tmp_path):
    assert main(["verify", "--quick", "--suite", "coupling", "--out", str(tmp_path)]) == EXIT_OK
    results = json.loads((tmp_path / "verify.json").read_text(encoding="utf-8"))
    assert results[0]["name"] == "coupling" and results[0]["passed"]
    assert main(["verify", "--quick", "--suite", "coupling", "--inject-fault"]) == EXIT_INVARIANT


def test_verify_exact_suites():
    assert main(["verify", "--quick", "--suite", "oracle", "--suite", "duality"]) == EXIT_OK


def test_verify_reruns_are_byte_identical(tmp_path):
    for name in ("a", "b"):
        args = ["verify", "--quick", "--suite", "determinism", "--suite", "duality", "--out", str(tmp_path / name)]
        assert main(args) == EXIT_OK
    a = (tmp_path / "a" / "verify.json").read_bytes()
    b = (tmp_path / "b" / "verify.json").read_bytes()
    assert a == b
    assert [r["name"] for r in json.loads(a)] == ["determinism", "duality"]
