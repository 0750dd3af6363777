"""GF(2) model of CNOT networks and the topology-reduction identity.

A pure-CNOT circuit implements a linear map x -> M x over GF(2) on
the computational basis; tracking M is enough to decide whether two
CNOT networks are the same unitary. The identity checked here: the
all-pairs (full-topology) CNOT sweep equals the linear-chain sweep
run in reverse order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import Topology, entangling_edges
from .errors import CapacityError, InvalidSizeError

# Largest n for which the dense cross-check materializes 2^n x 2^n.
DENSE_CHECK_MAX = 6


@dataclass(frozen=True, eq=False)
class Gf2Matrix:
    """An n x n matrix over GF(2), stored as 0/1 bytes.

    Row r of `bits` gives output bit r as a parity of input bits.
    """

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=np.uint8)
        if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] < 1:
            raise InvalidSizeError(f"need a square matrix, got shape {b.shape}")
        if np.any(b > 1):
            raise InvalidSizeError("entries must be 0 or 1")
        object.__setattr__(self, "bits", b)

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    @classmethod
    def identity(cls, n: int) -> Gf2Matrix:
        if n < 1:
            raise InvalidSizeError(f"need n >= 1, got {n}")
        return cls(np.eye(n, dtype=np.uint8))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gf2Matrix):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.bits, other.bits))


def _check_edges(edges, n: int) -> None:
    for c, t in edges:
        if not (0 <= c < n and 0 <= t < n):
            raise InvalidSizeError(f"edge ({c}, {t}) out of range for n={n}")
        if c == t:
            raise InvalidSizeError(f"edge ({c}, {t}) must join distinct qubits")


def cnot_network_matrix(edges, n: int) -> Gf2Matrix:
    """GF(2) matrix of a CNOT sequence applied in listed order.

    CNOT(control c, target t) sets bit t to t XOR c, i.e. adds row c
    into row t of the accumulated map.
    """
    if n < 1:
        raise InvalidSizeError(f"need n >= 1, got {n}")
    _check_edges(edges, n)
    bits = np.eye(n, dtype=np.uint8)
    for c, t in edges:
        bits[t, :] ^= bits[c, :]
    return Gf2Matrix(bits)


def dense_unitary(edges, n: int) -> np.ndarray:
    """Dense 2^n x 2^n unitary of a CNOT sequence, for small n.

    Qubit 0 is the most significant bit of basis indices, matching
    the statevector convention elsewhere in the package.
    """
    if n < 1:
        raise InvalidSizeError(f"need n >= 1, got {n}")
    if n > DENSE_CHECK_MAX:
        raise CapacityError(f"dense CNOT network capped at n <= {DENSE_CHECK_MAX}")
    _check_edges(edges, n)
    dim = 2**n
    basis = np.arange(dim)
    perm = basis.copy()
    for c, t in edges:
        cbit = (perm >> (n - 1 - c)) & 1
        perm = perm ^ (cbit << (n - 1 - t))
    u = np.zeros((dim, dim), dtype=complex)
    u[perm, basis] = 1.0
    return u


def verify_full_equals_reversed_linear(n: int) -> bool:
    """Check that the all-pairs CNOT sweep equals the reversed chain.

    Compares the GF(2) matrices of the full-topology edge list and the
    reversed linear edge list; for n small enough, additionally
    compares the dense unitaries elementwise.
    """
    if n < 2:
        raise InvalidSizeError(f"need at least 2 qubits, got {n}")
    full = entangling_edges(Topology.FULL, n)
    rev_linear = list(reversed(entangling_edges(Topology.LINEAR, n)))
    ok = cnot_network_matrix(full, n) == cnot_network_matrix(rev_linear, n)
    if ok and n <= DENSE_CHECK_MAX:
        ok = bool(
            np.allclose(
                dense_unitary(full, n), dense_unitary(rev_linear, n), atol=1e-12
            )
        )
    return ok
