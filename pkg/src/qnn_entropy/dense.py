"""Exact dense-statevector execution, vectorized over parameter draws.

Small-n Monte Carlo experiments are dominated by Python/gate overhead
when run one draw at a time. This backend carries a whole batch of
draws as a (B, 2**n) array and applies each gate to every draw at
once; circuit builders already accept per-sample angle arrays, so the
batch reuses the exact same gate sequence and parameter streams as
the per-sample engine. No truncation is involved: results are exact,
which the tensor-network engine reproduces as epsilon -> 0.

Qubit 0 is the most significant bit of amplitude indices, matching
MpsState.to_dense.
"""

import numpy as np

from .circuits import GateOp, ParamVector, QnnSpec, build_qnn
from .errors import CapacityError, InvalidSizeError
from .mps import DENSE_MAX_QUBITS

_RSQRT2 = 1.0 / np.sqrt(2.0)

# Schmidt weights below this contribute zero entropy (matches the
# tensor-network convention).
_WEIGHT_FLOOR = 1e-30


def _bc(values, ndim: int):
    """Broadcast per-sample scalars against (B, ...) slice shapes."""
    arr = np.asarray(values)
    if arr.ndim == 0:
        return arr
    return arr.reshape(arr.shape + (1,) * (ndim - 1))


def _apply_1q(state: np.ndarray, op: GateOp, n: int) -> None:
    q = op.qubits[0]
    batch = state.shape[0]
    v = state.reshape(batch, 1 << q, 2, 1 << (n - 1 - q))
    x0 = v[:, :, 0, :]
    x1 = v[:, :, 1, :]
    kind = op.kind
    if kind == "H":
        a = (x0 + x1) * _RSQRT2
        v[:, :, 1, :] = (x0 - x1) * _RSQRT2
        v[:, :, 0, :] = a
        return
    half = _bc(np.asarray(op.angle) / 2.0, 3)
    if kind == "RZ":
        x0 *= np.exp(-1j * half)
        x1 *= np.exp(1j * half)
        return
    c, s = np.cos(half), np.sin(half)
    if kind == "RX":
        a = c * x0 - 1j * s * x1
        v[:, :, 1, :] = -1j * s * x0 + c * x1
        v[:, :, 0, :] = a
        return
    if kind == "RY":
        a = c * x0 - s * x1
        v[:, :, 1, :] = s * x0 + c * x1
        v[:, :, 0, :] = a
        return
    raise InvalidSizeError(f"unsupported one-qubit kind '{kind}'")


def _apply_2q(state: np.ndarray, op: GateOp, n: int) -> None:
    cq, tq = op.qubits
    lo, hi = (cq, tq) if cq < tq else (tq, cq)
    batch = state.shape[0]
    v = state.reshape(
        batch, 1 << lo, 2, 1 << (hi - lo - 1), 2, 1 << (n - 1 - hi)
    )
    if cq > tq:
        # Canonicalize so axis 2 is the control, axis 4 the target.
        v = np.swapaxes(v, 2, 4)
    kind = op.kind
    if kind == "CNOT":
        tmp = v[:, :, 1, :, 0, :].copy()
        v[:, :, 1, :, 0, :] = v[:, :, 1, :, 1, :]
        v[:, :, 1, :, 1, :] = tmp
        return
    if kind == "CRZ":
        half = _bc(np.asarray(op.angle) / 2.0, 4)
        v[:, :, 1, :, 0, :] *= np.exp(-1j * half)
        v[:, :, 1, :, 1, :] *= np.exp(1j * half)
        return
    if kind == "SWAP":
        tmp = v[:, :, 0, :, 1, :].copy()
        v[:, :, 0, :, 1, :] = v[:, :, 1, :, 0, :]
        v[:, :, 1, :, 0, :] = tmp
        return
    raise InvalidSizeError(f"unsupported two-qubit kind '{kind}'")


def run_qnn_dense(spec: QnnSpec, pv: ParamVector) -> np.ndarray:
    """Simulate a network exactly on |0...0> for one or many draws.

    Args:
        spec: Network structure; epsilon/chi_max are ignored (exact).
        pv: Parameter draw. A trailing batch axis on both arrays runs
            B draws at once.

    Returns:
        Statevector(s): shape (2**n,) for a single draw, (B, 2**n)
        for a batched one.
    """
    if spec.n > DENSE_MAX_QUBITS:
        raise CapacityError(
            f"dense execution capped at n <= {DENSE_MAX_QUBITS}, got {spec.n}"
        )
    batched = np.asarray(pv.inputs).ndim == 2
    if batched != (np.asarray(pv.weights).ndim == 3):
        raise InvalidSizeError("inputs and weights must agree on the batch axis")
    batch = pv.inputs.shape[-1] if batched else 1
    state = np.zeros((batch, 2**spec.n), dtype=complex)
    state[:, 0] = 1.0
    for op in build_qnn(spec, pv):
        if len(op.qubits) == 1:
            _apply_1q(state, op, spec.n)
        else:
            _apply_2q(state, op, spec.n)
    return state if batched else state[0]


def dense_bond_entropies(
    states: np.ndarray, n: int, bonds=None
) -> np.ndarray:
    """Von Neumann entropy (nats) across chain cuts of dense states.

    Args:
        states: (B, 2**n) batch of normalized statevectors.
        n: Qubit count.
        bonds: Iterable of 0-based cuts; defaults to all n-1.

    Returns:
        Array of shape (B, len(bonds)).
    """
    states = np.asarray(states)
    if states.ndim != 2 or states.shape[1] != 2**n:
        raise InvalidSizeError(
            f"states must have shape (B, {2**n}), got {states.shape}"
        )
    if bonds is None:
        bonds = range(n - 1)
    bonds = list(bonds)
    for b in bonds:
        if not 0 <= b <= n - 2:
            raise InvalidSizeError(f"bond {b} out of range for n={n}")
    batch = states.shape[0]
    out = np.empty((batch, len(bonds)))
    for j, b in enumerate(bonds):
        mat = states.reshape(batch, 2 ** (b + 1), 2 ** (n - 1 - b))
        s = np.linalg.svd(mat, compute_uv=False)
        p = s**2
        terms = np.where(p >= _WEIGHT_FLOOR, p * np.log(np.maximum(p, _WEIGHT_FLOOR)), 0.0)
        out[:, j] = -terms.sum(axis=1) + 0.0
    return out


def dense_fidelities(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rowwise |<a_i|b_i>|^2 for two equal-shape state batches."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2:
        raise InvalidSizeError("need two equal-shape (B, N) state batches")
    inner = np.sum(a.conj() * b, axis=1)
    # Roundoff can push |<a|b>|^2 a few ulp past 1; clip so downstream
    # domain checks on fidelities never trip on noise.
    return np.clip(np.abs(inner) ** 2, 0.0, 1.0)
