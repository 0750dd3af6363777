"""Layered variational-circuit construction and execution.

A network is a repetition of a feature-map block F(x) and a
variational block V(theta_l) over n qubits. Both blocks are drawn
from the same small family:

    C1   per-qubit RX then per-qubit RZ, no entanglers
    C2   per-qubit RY, then CNOT over the topology's edges
    C3   per-qubit RY, then CRZ(angle) over the topology's edges
    CZZ  H on every qubit, RZ(2 x_i), then for every edge (i, j)
         CNOT(i,j) . RZ(2 (pi - x_i)(pi - x_j)) on j . CNOT(i,j)

The data vector x is reused by every feature block; each variational
repetition gets its own weight row. Angle parameters may be numpy
arrays (one value per Monte Carlo sample) as well as floats; builders
are elementwise in the angle, which is what lets a batched simulator
reuse them unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidSizeError, SizeMismatchError
from .mps import MpsState

BLOCK_KINDS = ("C1", "C2", "C3", "CZZ")
MODES = ("alternated", "sequential")

# The pairwise phase of the ZZ feature block is
# CZZ_PAIR_SCALE * (pi - x_i) * (pi - x_j), applied as a Z rotation on
# the edge target between two CNOTs. The scale matches the defining
# reference for this feature map.
CZZ_PAIR_SCALE = 2.0

_ONE_QUBIT_KINDS = frozenset({"H", "RX", "RY", "RZ"})
_TWO_QUBIT_KINDS = frozenset({"CNOT", "CRZ", "SWAP"})
_PARAMETRIC_KINDS = frozenset({"RX", "RY", "RZ", "CRZ"})


class Topology(Enum):
    """Which qubit pairs an entangling block touches."""

    LINEAR = "linear"
    CIRCULAR = "circular"
    FULL = "full"

    @classmethod
    def parse(cls, name: str) -> Topology:
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(t.value for t in cls)
            raise InvalidSizeError(f"unknown topology '{name}' (expected {valid})")


@dataclass(frozen=True)
class GateOp:
    """One gate in a flattened circuit.

    Attributes:
        kind: One of H, RX, RY, RZ, CNOT, CRZ, SWAP.
        qubits: Target qubit indices; for two-qubit kinds the first
            entry is the control (or the first tensor factor).
        angle: Rotation angle, present iff the kind is parametric.
            May be an array of per-sample angles.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | np.ndarray | None = None

    def __post_init__(self):
        if self.kind in _ONE_QUBIT_KINDS:
            arity = 1
        elif self.kind in _TWO_QUBIT_KINDS:
            arity = 2
        else:
            raise InvalidSizeError(f"unknown gate kind '{self.kind}'")
        if len(self.qubits) != arity:
            raise InvalidSizeError(
                f"{self.kind} takes {arity} qubit(s), got {self.qubits}"
            )
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise InvalidSizeError(f"{self.kind} needs distinct qubits")
        if (self.angle is None) == (self.kind in _PARAMETRIC_KINDS):
            raise InvalidSizeError(
                f"{self.kind} {'requires' if self.angle is None else 'takes no'} angle"
            )


def gate_matrix(op: GateOp) -> np.ndarray:
    """Dense unitary for a gate with a scalar angle.

    Two-qubit matrices are ordered control-first: basis |c t> with the
    control as the more significant bit.
    """
    if op.angle is not None and np.ndim(op.angle) != 0:
        raise InvalidSizeError("gate_matrix needs a scalar angle")
    k = op.kind
    if k == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    if k in ("RX", "RY", "RZ", "CRZ"):
        half = float(op.angle) / 2.0
        c, s = np.cos(half), np.sin(half)
        if k == "RX":
            return np.array([[c, -1j * s], [-1j * s, c]])
        if k == "RY":
            return np.array([[c, -s], [s, c]], dtype=complex)
        if k == "RZ":
            return np.diag([np.exp(-1j * half), np.exp(1j * half)])
        return np.diag([1.0, 1.0, np.exp(-1j * half), np.exp(1j * half)])
    if k == "CNOT":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if k == "SWAP":
        return np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
        )
    raise InvalidSizeError(f"unknown gate kind '{op.kind}'")


def entangling_edges(topology: Topology, n: int) -> list[tuple[int, int]]:
    """Ordered edge list for an entangling sweep.

    Linear walks the chain (0,1)..(n-2,n-1); circular appends the wrap
    edge (n-1,0); full lists every pair (i,j), i<j, lexicographically.
    """
    if n < 2:
        raise InvalidSizeError(f"need at least 2 qubits, got {n}")
    chain = [(i, i + 1) for i in range(n - 1)]
    if topology is Topology.LINEAR:
        return chain
    if topology is Topology.CIRCULAR:
        return chain + [(n - 1, 0)]
    if topology is Topology.FULL:
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    raise InvalidSizeError(f"unknown topology {topology!r}")


def param_count(kind: str, topology: Topology, n: int) -> int:
    """Number of free angles one block consumes."""
    if kind not in BLOCK_KINDS:
        raise InvalidSizeError(f"unknown block kind '{kind}'")
    if n < 2:
        raise InvalidSizeError(f"need at least 2 qubits, got {n}")
    if kind == "C1":
        return 2 * n
    if kind in ("C2", "CZZ"):
        return n
    return n + len(entangling_edges(topology, n))  # C3


def build_block(kind: str, topology: Topology, n: int, params) -> list[GateOp]:
    """Flatten one block into gates.

    Args:
        kind: Block family, one of C1, C2, C3, CZZ.
        topology: Edge layout for entangling kinds.
        n: Qubit count.
        params: Sequence of param_count(kind, topology, n) angles;
            entries may be scalars or per-sample arrays.
    """
    expected = param_count(kind, topology, n)
    if len(params) != expected:
        raise SizeMismatchError(
            f"{kind} on {n} qubits ({topology.value}) needs {expected} "
            f"parameters, got {len(params)}"
        )
    ops: list[GateOp] = []
    if kind == "C1":
        ops += [GateOp("RX", (q,), params[q]) for q in range(n)]
        ops += [GateOp("RZ", (q,), params[n + q]) for q in range(n)]
        return ops
    if kind == "C2":
        ops += [GateOp("RY", (q,), params[q]) for q in range(n)]
        ops += [GateOp("CNOT", e) for e in entangling_edges(topology, n)]
        return ops
    if kind == "C3":
        ops += [GateOp("RY", (q,), params[q]) for q in range(n)]
        edges = entangling_edges(topology, n)
        ops += [GateOp("CRZ", e, params[n + j]) for j, e in enumerate(edges)]
        return ops
    # CZZ: basis change, single-qubit phases, then pairwise phases
    # compiled as CNOT-conjugated RZ on the edge target.
    ops += [GateOp("H", (q,)) for q in range(n)]
    ops += [GateOp("RZ", (q,), 2.0 * params[q]) for q in range(n)]
    for i, j in entangling_edges(topology, n):
        phase = CZZ_PAIR_SCALE * (np.pi - params[i]) * (np.pi - params[j])
        ops.append(GateOp("CNOT", (i, j)))
        ops.append(GateOp("RZ", (j,), phase))
        ops.append(GateOp("CNOT", (i, j)))
    return ops


@dataclass(frozen=True)
class QnnSpec:
    """Structure of one network: sizes, block kinds, wiring, layering.

    mode 'alternated' interleaves [F, V_1, F, V_2, ...]; 'sequential'
    stacks all L feature blocks first, then V_1..V_L. The two coincide
    at L = 1.
    """

    n: int
    layers: int
    feature: str
    variational: str
    topology: Topology = Topology.LINEAR
    mode: str = "alternated"
    epsilon: float = 1e-9
    chi_max: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise InvalidSizeError(f"need at least 2 qubits, got {self.n}")
        if self.layers < 1:
            raise InvalidSizeError(f"need at least 1 layer, got {self.layers}")
        for kind in (self.feature, self.variational):
            if kind not in BLOCK_KINDS:
                raise InvalidSizeError(f"unknown block kind '{kind}'")
        if self.mode not in MODES:
            raise InvalidSizeError(
                f"unknown mode '{self.mode}' (expected {' or '.join(MODES)})"
            )

    @property
    def input_count(self) -> int:
        return param_count(self.feature, self.topology, self.n)

    @property
    def weight_count(self) -> int:
        """Angles per variational repetition."""
        return param_count(self.variational, self.topology, self.n)


@dataclass(frozen=True)
class ParamVector:
    """One draw of data inputs and variational weights.

    Attributes:
        inputs: Feature-map angles, shape (m,); shared by every
            feature repetition.
        weights: Variational angles, shape (L, p); row l feeds the
            l-th variational repetition.

    Batched simulations append a trailing sample axis to both arrays;
    the builders are agnostic to it.
    """

    inputs: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)


def check_params(spec: QnnSpec, pv: ParamVector) -> None:
    """Validate that a parameter draw matches a network structure."""
    m, p = spec.input_count, spec.weight_count
    if pv.inputs.shape[0] != m:
        raise SizeMismatchError(
            f"feature block {spec.feature} needs {m} inputs, got {pv.inputs.shape[0]}"
        )
    if pv.weights.shape[0] != spec.layers or pv.weights.shape[1] != p:
        raise SizeMismatchError(
            f"weights must have shape ({spec.layers}, {p}), got {pv.weights.shape}"
        )


def sample_params(spec: QnnSpec, seed) -> ParamVector:
    """Draw inputs and weights independently Unif[0, pi].

    Args:
        seed: Anything np.random.default_rng accepts (int, SeedSequence,
            Generator). Inputs are drawn before weights, which pins the
            stream layout for reproducibility.
    """
    rng = np.random.default_rng(seed)
    inputs = rng.uniform(0.0, np.pi, size=spec.input_count)
    weights = rng.uniform(0.0, np.pi, size=(spec.layers, spec.weight_count))
    return ParamVector(inputs=inputs, weights=weights)


def build_qnn(spec: QnnSpec, pv: ParamVector) -> list[GateOp]:
    """Flatten the full network for one parameter draw."""
    check_params(spec, pv)
    feature = lambda: build_block(spec.feature, spec.topology, spec.n, pv.inputs)
    variational = lambda l: build_block(
        spec.variational, spec.topology, spec.n, pv.weights[l]
    )
    ops: list[GateOp] = []
    if spec.mode == "alternated":
        for l in range(spec.layers):
            ops += feature()
            ops += variational(l)
    else:
        for _ in range(spec.layers):
            ops += feature()
        for l in range(spec.layers):
            ops += variational(l)
    return ops


def run_qnn(spec: QnnSpec, pv: ParamVector) -> MpsState:
    """Simulate the network on |0...0> and return the final MPS."""
    state = MpsState(spec.n, chi_max=spec.chi_max, epsilon=spec.epsilon)
    for op in build_qnn(spec, pv):
        u = gate_matrix(op)
        if len(op.qubits) == 1:
            state.apply_1q(u, op.qubits[0])
        else:
            state.apply_2q(u, *op.qubits)
    return state


# ----------------------------------------------------------------------
# text form: one gate per line, "KIND q0 [q1] [angle]"


def gates_to_text(ops: list[GateOp]) -> str:
    """Serialize gates to the line-oriented text form.

    Angles are written with repr so parsing recovers them exactly.
    """
    lines = []
    for op in ops:
        if op.angle is not None and np.ndim(op.angle) != 0:
            raise InvalidSizeError("cannot serialize batched angles")
        parts = [op.kind, *map(str, op.qubits)]
        if op.angle is not None:
            parts.append(repr(float(op.angle)))
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


def gates_from_text(text: str) -> list[GateOp]:
    """Parse the text form back into gates.

    Blank lines and lines starting with '#' are skipped. Malformed
    lines raise with their 1-based line number.
    """
    ops = []
    for num, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        kind = tokens[0].upper()
        if kind in _ONE_QUBIT_KINDS:
            arity = 1
        elif kind in _TWO_QUBIT_KINDS:
            arity = 2
        else:
            raise InvalidSizeError(f"line {num}: unknown gate kind '{tokens[0]}'")
        wants_angle = kind in _PARAMETRIC_KINDS
        if len(tokens) != 1 + arity + int(wants_angle):
            raise InvalidSizeError(
                f"line {num}: '{kind}' expects {arity} qubit(s)"
                f"{' and an angle' if wants_angle else ''}"
            )
        try:
            qubits = tuple(int(t) for t in tokens[1 : 1 + arity])
        except ValueError:
            raise InvalidSizeError(f"line {num}: qubit indices must be integers")
        angle = None
        if wants_angle:
            try:
                angle = float(tokens[1 + arity])
            except ValueError:
                raise InvalidSizeError(f"line {num}: bad angle '{tokens[1 + arity]}'")
        try:
            ops.append(GateOp(kind, qubits, angle))
        except InvalidSizeError as exc:
            raise InvalidSizeError(f"line {num}: {exc}")
    return ops
