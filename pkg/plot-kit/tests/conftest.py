"""Fixture CSVs for the figure tests.

Real input files are produced by running the simulator CLI once per
session, scaled down to seconds. The library under test never imports
the simulator; only this conftest shells out to it.
"""

import importlib.util
import subprocess
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

_HAVE_SIM = importlib.util.find_spec("qnn_entropy") is not None

_ACCEPTANCE_FILE = "test_acceptance.py"
_LABELS = {
    "test_renders_all_five_kinds": "renders the five figure kinds with overlays",
}


def _simulate(args, out):
    subprocess.run(
        [sys.executable, "-m", "qnn_entropy.cli", *args, "--out", str(out)],
        check=True, capture_output=True, text=True, timeout=600,
    )


@pytest.fixture(scope="session")
def csv_dir(tmp_path_factory):
    if not _HAVE_SIM:
        pytest.skip("qnn-entropy is not installed; cannot generate input CSVs")
    root = tmp_path_factory.mktemp("csvs")
    _simulate(["bond-profile", "--n", "6", "--lmax", "3", "--samples", "10",
               "--backend", "dense", "--seed", "5"],
              root / "bond-profile.csv")
    _simulate(["reupload-compare", "--n", "6", "--l-values", "1,2,4",
               "--samples", "20", "--seed", "5"],
              root / "delta-reupload.csv")
    _simulate(["scaling-ltilde", "--n", "6,8", "--lmax", "8",
               "--samples", "15", "--seed", "5"],
              root / "ltilde-scaling.csv")
    _simulate(["speed", "--n", "6,8", "--l-values", "1,2,3,4,5,6",
               "--samples", "15", "--feature", "C1", "--variational", "C3",
               "--seed", "5"],
              root / "speed-collapse.csv")
    _simulate(["expressibility", "--n", "4", "--l-values", "1,4",
               "--samples", "300", "--bins", "15", "--seed", "5"],
              root / "expressibility.csv")
    return root


def pytest_terminal_summary(terminalreporter):
    seen = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            path, _, name = rep.location
            if not path.endswith(_ACCEPTANCE_FILE):
                continue
            base = name.split("[")[0]
            if base in _LABELS:
                if outcome in ("failed", "error") or seen.get(base) == "FAIL":
                    seen[base] = "FAIL"
                else:
                    seen[base] = "PASS"
    if not seen:
        return
    tw = terminalreporter
    tw.section("plot-kit acceptance")
    for base, label in _LABELS.items():
        if base in seen:
            tw.write_line(f"{seen[base]}  {label}")
