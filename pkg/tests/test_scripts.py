import json
import subprocess
import sys
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def run(name, *args):
    return subprocess.run([sys.executable, str(SCRIPTS / name), *args], capture_output=True,
                          text=True, check=True).stdout


def test_precession_demo_runs():
    out = run("precession_demo.py", "--t-end", "1", "--dts", "0.02,0.01")
    assert out.count("endpoint error") == 6


def test_equivalence_experiment_runs(tmp_path):
    out_file = tmp_path / "eq.json"
    run("equivalence_experiment.py", "--samples", "5", "--out", str(out_file))
    runs = json.loads(out_file.read_text())["runs"]
    assert len(runs) == 22
    fam = [r for r in runs if r["section"].startswith("scaled")]
    assert [r["verdict"] for r in fam] == ["CONSISTENT", "INCONSISTENT"]
