import subprocess
import sys

import pytest

from cooplocks.bench import read_records
from cooplocks.cli import main


def test_bench_command_writes_csv(tmp_path):
    out = tmp_path / "results.csv"
    code = main(["bench", "--lock", "TTAS", "--strategy", "SY*",
                 "--scenario", "cache", "--carriers", "1", "--tasks", "1",
                 "--duration", "0.1", "--warmup", "0", "--reps", "1",
                 "--out", str(out)])
    assert code == 0
    records = read_records(str(out))
    assert len(records) == 1
    assert records[0].status == "ok"
    assert records[0].lock == "TTAS"


def test_bench_command_append_mode(tmp_path):
    out = tmp_path / "results.csv"
    args = ["bench", "--lock", "TTAS", "--strategy", "SY*", "--carriers", "1",
            "--tasks", "1", "--duration", "0.1", "--warmup", "0",
            "--reps", "1", "--append", "--out", str(out)]
    assert main(args) == 0
    assert main(args) == 0
    assert len(read_records(str(out))) == 2
    assert out.read_text().count("lock,strategy") == 1


def test_sweep_command_covers_the_grid(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--lock", "MCS", "--strategy", "SYS",
                 "--scenario", "cache", "--carriers", "1",
                 "--task-grid", "1,2", "--duration", "0.1", "--warmup", "0",
                 "--reps", "2", "--out", str(out)])
    assert code == 0
    records = read_records(str(out))
    assert sorted({r.tasks for r in records}) == [1, 2]
    assert len(records) == 4


def test_bad_configuration_is_a_clean_error(tmp_path, capsys):
    code = main(["bench", "--lock", "NOPE", "--duration", "0.1",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "unknown lock name" in capsys.readouterr().err


def test_bad_task_grid_rejected(tmp_path):
    with pytest.raises(SystemExit):
        main(["sweep", "--lock", "MCS", "--task-grid", "1,zero",
              "--duration", "0.1", "--out", str(tmp_path / "x.csv")])


def test_verify_command_exits_zero_when_oracles_behave():
    # Small sizes: the point here is the table/exit-code contract.
    code = main(["verify", "--carriers", "1", "--tasks", "2",
                 "--iterations", "100", "--duration", "0.15"])
    assert code == 0


def test_console_entry_point_help():
    proc = subprocess.run([sys.executable, "-m", "cooplocks.cli", "--help"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    for sub in ("bench", "sweep", "verify"):
        assert sub in proc.stdout
