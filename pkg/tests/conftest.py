"""Shared pytest configuration.

Prints a one-line verdict per acceptance test at the end of the run so
the pass/fail state of each top-level claim is visible without
scrolling.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE_FILE = "test_acceptance.py"

_LABELS = {
    "test_mps_matches_dense_oracle": "MPS vs dense oracle (1e-8)",
    "test_page_formula_monte_carlo": "Page mean entropy vs Haar sampling",
    "test_harmonic_and_haar_max": "harmonic bound and haar_max(50)",
    "test_cnot_network_identity": "full = reversed-linear CNOT identity",
    "test_deep_circuit_reaches_haar": "bond profile converges to Haar",
    "test_entangling_speed_table": "entangling speed windows",
    "test_full_topology_shortcut": "full topology entangles in one layer",
    "test_reupload_contrast": "re-uploading entropy contrast",
    "test_expressibility_ordering": "expressibility drops with depth",
    "test_speed_collapse_across_sizes": "normalized-entropy collapse",
}


def pytest_terminal_summary(terminalreporter):
    seen = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            path, _, name = rep.location
            if not path.endswith(_ACCEPTANCE_FILE):
                continue
            base = name.split("[")[0]
            if base in _LABELS:
                prev = seen.get(base)
                seen[base] = "FAIL" if prev == "FAIL" else outcome.upper()
                if outcome in ("failed", "error"):
                    seen[base] = "FAIL"
    if not seen:
        return
    tw = terminalreporter
    tw.section("acceptance summary")
    for base, label in _LABELS.items():
        if base in seen:
            verdict = "PASS" if seen[base] == "PASSED" else "FAIL"
            tw.write_line(f"{verdict}  {label}")
