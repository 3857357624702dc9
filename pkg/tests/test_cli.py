import os
from pathlib import Path

import pytest

from dslake.cli import main

from conftest import FIG5_SCRIPT

SPEC_TEXT = """\
dataset d1
area 48.3416 -24.7851 66.1605 32.8710
time 2011-01-01T00:00Z 2011-02-28T18:00Z
step 6
spacing 0.5
random-cyclones count=2 northeast=1
"""


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("DSLAKE_STORAGE_ROOT", raising=False)
    monkeypatch.delenv("DSLAKE_NODES", raising=False)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_prints_canonical_script(workdir, capsys):
    script = workdir / "fig5.dq"
    script.write_text(FIG5_SCRIPT)
    code, out, err = run(capsys, "validate", str(script))
    assert code == 0
    assert out.startswith("area 48.3416,-24.7851 - 66.1605,")
    assert "select cyclon-path" in out
    # validate is a pure front-end path: no storage root appears
    assert not (workdir / "dslake-storage").exists()


def test_validate_unknown_object_exit_one(workdir, capsys):
    script = workdir / "bad.dq"
    script.write_text("select martian-storm")
    code, out, err = run(capsys, "validate", str(script))
    assert code == 1
    assert "martian-storm" in err
    assert out == ""


def test_missing_script_exit_two(workdir, capsys):
    code, out, err = run(capsys, "submit", "--dataset", "d1", "missing.dq")
    assert code == 2
    assert "missing.dq" in err


def test_usage_error_exit_two(workdir, capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(["submit"])  # --dataset is required
    assert exit_info.value.code == 2


def test_submit_empty_dataset_zero_objects(workdir, capsys):
    script = workdir / "fig5.dq"
    script.write_text(FIG5_SCRIPT)
    code, out, err = run(capsys, "submit", "--dataset", "d1", str(script))
    assert code == 0
    assert "OBJECTS\nSIMULATIONS" in out


def test_full_pipeline_and_determinism(workdir, capsys):
    spec = workdir / "spec.txt"
    spec.write_text(SPEC_TEXT)
    code, out, _ = run(capsys, "gen-synthetic", str(spec), "--seed", "11", "--out", "src-data")
    assert code == 0
    manifest = Path(out.strip())
    assert manifest.exists()
    assert (manifest.parent / "groundtruth.txt").read_text().startswith("GROUND-TRUTH")

    code, _, err = run(capsys, "ingest", str(manifest))
    assert code == 0
    assert "ingested" in err

    script = workdir / "fig5.dq"
    script.write_text(FIG5_SCRIPT)
    code, first, _ = run(capsys, "submit", "--dataset", "d1", str(script))
    assert code == 0
    assert first.startswith("RESULT ")
    assert "simulation" in first

    # identical invocation over the identical storage root: identical bytes
    code, second, _ = run(capsys, "submit", "--dataset", "d1", str(script))
    assert code == 0
    assert second == first

    task_id = first.split("\n", 1)[0].split()[1]
    code, stored, _ = run(capsys, "results", task_id)
    assert code == 0
    assert stored == first

    code, listing, _ = run(capsys, "registry", "list")
    assert code == 0
    assert "object cyclone-path" in listing
    assert "package BSM" in listing


def test_emit_csv(workdir, capsys):
    spec = workdir / "spec.txt"
    spec.write_text(SPEC_TEXT)
    _, out, _ = run(capsys, "gen-synthetic", str(spec), "--seed", "3", "--out", "src-data")
    run(capsys, "ingest", out.strip())
    script = workdir / "fig5.dq"
    script.write_text(FIG5_SCRIPT)
    code, _, _ = run(capsys, "submit", "--dataset", "d1", str(script), "--emit-csv", "levels.csv")
    assert code == 0
    import csv

    with open(workdir / "levels.csv", newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["object_id", "package", "output", "time", "value"]
    assert len(rows) > 1
    assert rows[1][1] == "BSM"
    assert rows[1][2] == "level[440,414]"


def test_config_precedence_env_and_flags(workdir, capsys, monkeypatch):
    spec = workdir / "spec.txt"
    spec.write_text(SPEC_TEXT)
    _, out, _ = run(capsys, "gen-synthetic", str(spec), "--seed", "5", "--out", "src-data")

    (workdir / "dslake.conf").write_text("storage_root=conf-root\nnodes=3\n")
    monkeypatch.setenv("DSLAKE_STORAGE_ROOT", str(workdir / "env-root"))
    code, _, err = run(capsys, "ingest", out.strip())
    assert code == 0
    assert (workdir / "env-root").exists()  # env overrides config file
    assert not (workdir / "conf-root").exists()
    assert "3 nodes" in err  # nodes from config file still applies

    monkeypatch.delenv("DSLAKE_STORAGE_ROOT")
    code, _, err = run(
        capsys, "--storage-root", str(workdir / "flag-root"), "--nodes", "2",
        "ingest", out.strip(),
    )
    assert code == 0
    assert (workdir / "flag-root").exists()  # flag overrides everything
    assert "2 nodes" in err


def test_fail_node_does_not_change_output(workdir, capsys):
    spec = workdir / "spec.txt"
    spec.write_text(SPEC_TEXT)
    _, out, _ = run(capsys, "gen-synthetic", str(spec), "--seed", "9", "--out", "src-data")
    run(capsys, "ingest", out.strip())
    script = workdir / "fig5.dq"
    script.write_text(FIG5_SCRIPT)
    _, baseline, _ = run(capsys, "submit", "--dataset", "d1", str(script))
    code, degraded, _ = run(capsys, "submit", "--dataset", "d1", str(script), "--fail-node", "0")
    assert code == 0
    assert degraded == baseline
