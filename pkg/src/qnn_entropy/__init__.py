"""Tensor-network simulation and entanglement analysis of layered
randomly parameterized quantum circuits.

The package splits into a simulation core (linalg, mps, circuits,
dense), closed-form references (haar), derived metrics (analysis), a
GF(2) circuit-identity checker (gf2), and an experiment driver with a
CSV wire format (experiments, cli).
"""

from .analysis import (
    AggregatedSeries,
    SpeedFit,
    delta_s_bar,
    entangling_layers,
    expressibility,
    fit_entangling_speed,
    normalized_entropy,
    total_entanglement,
)
from .circuits import (
    GateOp,
    ParamVector,
    QnnSpec,
    Topology,
    build_block,
    build_qnn,
    entangling_edges,
    gate_matrix,
    gates_from_text,
    gates_to_text,
    param_count,
    run_qnn,
    sample_params,
)
from .dense import dense_bond_entropies, dense_fidelities, run_qnn_dense
from .experiments import (
    EXPERIMENT_KINDS,
    ExperimentConfig,
    ResultRecord,
    emit_csv,
    load_config,
    parse_csv,
    run,
)
from .gf2 import (
    Gf2Matrix,
    cnot_network_matrix,
    dense_unitary,
    verify_full_equals_reversed_linear,
)
from .haar import (
    HaarProfile,
    haar_average,
    haar_fidelity_pdf,
    haar_max,
    haar_profile,
    harmonic,
    page_entropy,
    sample_haar_state,
)
from .linalg import SvdResult, svd, truncate_spectrum
from .mps import MpsState

__version__ = "0.1.0"

__all__ = [
    "AggregatedSeries", "SpeedFit", "delta_s_bar", "entangling_layers",
    "expressibility", "fit_entangling_speed", "normalized_entropy",
    "total_entanglement", "GateOp", "ParamVector", "QnnSpec", "Topology",
    "build_block", "build_qnn", "entangling_edges", "gate_matrix",
    "gates_from_text", "gates_to_text", "param_count", "run_qnn",
    "sample_params", "dense_bond_entropies", "dense_fidelities",
    "run_qnn_dense", "EXPERIMENT_KINDS", "ExperimentConfig", "ResultRecord",
    "emit_csv", "load_config", "parse_csv", "run", "Gf2Matrix",
    "cnot_network_matrix", "dense_unitary",
    "verify_full_equals_reversed_linear", "HaarProfile", "haar_average",
    "haar_fidelity_pdf", "haar_max", "haar_profile", "harmonic",
    "page_entropy", "sample_haar_state", "SvdResult", "svd",
    "truncate_spectrum", "MpsState",
]
