import csv
import json

import pytest

from incppm.cli import main
from incppm.event_log import read_log
from incppm.pipelines import ClusteringPipeline

PHI = 'F("Accept Claim")'


@pytest.fixture(scope="module")
def drift_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "drift.csv"
    assert main(["generate-drift", "--variant", "drift1", "--cases", "120", "--seed", "1",
                 "--out", str(path)]) == 0
    return path


def test_generate_drift(drift_csv):
    log = read_log(drift_csv)
    assert len(log.cases) == 120
    assert log.static_schema == {"age": "int", "claim_value": "float", "status": "string",
                                 "previous_cases": "int"}
    assert list(log.dynamic_schema) == ["resource"]


def test_generate_to_stdout(capsys):
    assert main(["generate-drift", "--variant", "baseline", "--cases", "4"]) == 0
    assert capsys.readouterr().out.startswith("case_id,activity,timestamp,")


def test_label_export(drift_csv, tmp_path):
    out = tmp_path / "labels.csv"
    assert main(["label", "--log", str(drift_csv), "--outcome", PHI, "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["case_id", "label"] and len(rows) == 121
    assert {r[1] for r in rows[1:]} == {"true", "false"}


def test_encode_export(drift_csv, tmp_path):
    out = tmp_path / "enc.csv"
    assert main(["encode", "--log", str(drift_csv), "--encoding", "index", "--length", "3",
                 "--outcome", PHI, "--out", str(out)]) == 0
    meta = json.loads((tmp_path / "enc.csv.schema.json").read_text())
    assert len(meta["features"]) == 4 + 3 + 3
    assert sum(1 for _ in out.open()) == 121


def test_train_saves_versioned_model(drift_csv, tmp_path):
    out = tmp_path / "model.pkl"
    assert main(["train", "--log", str(drift_csv), "--outcome", PHI, "--classifier", "aht",
                 "--grace", "20", "--out", str(out)]) == 0
    assert ClusteringPipeline.load(out).cfg.classifier == "aht"


def test_evaluate_writes_report(drift_csv, tmp_path, capsys):
    out = tmp_path / "rep"
    args = ["evaluate", "--scenario", "3", "--log", str(drift_csv), "--format", "csv",
            "--outcome", PHI, "--approach", "clustering", "--seed", "2", "--grace", "20",
            "--out", str(out)]
    assert main(args) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["metrics"]["metadata"]["drift_index"] == 60
    assert (out / "report.txt").exists()
    assert "Scenario 3" in capsys.readouterr().out


@pytest.mark.parametrize("extra", [
    ["--log", "missing.csv", "--outcome", PHI],
    ["--outcome", "F((a"],
    ["--outcome", PHI, "--t1", "1", "--t2", "5"],
])
def test_evaluate_errors_exit_nonzero(drift_csv, tmp_path, extra, capsys):
    args = ["evaluate", "--scenario", "1", "--out", str(tmp_path / "x")]
    if "--log" not in extra:
        args += ["--log", str(drift_csv)]
    assert main(args + extra) != 0
    assert "error" in capsys.readouterr().err


def test_bad_flag_exits_nonzero():
    with pytest.raises(SystemExit) as err:
        main(["evaluate", "--scenario", "4"])
    assert err.value.code != 0
