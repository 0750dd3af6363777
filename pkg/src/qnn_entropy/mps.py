"""Matrix-product-state engine for qubit chains.

States are stored as one rank-3 tensor per site with index order
(left bond, physical, right bond) and kept in mixed-canonical form:
every tensor strictly left of the orthogonality center is a left
isometry, every tensor strictly right of it is a right isometry.
Two-qubit updates contract the two site tensors, apply the gate, and
split back with a truncated SVD; the Schmidt spectrum of the updated
bond is cached so entropies never require extra decompositions.

Qubit 0 is the most significant bit of dense amplitude indices.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    CapacityError,
    InternalConsistencyError,
    InvalidSizeError,
    SizeMismatchError,
    UnitarityError,
)
from .linalg import svd, truncate_spectrum

# Unitarity tolerance for gate matrices: max |u u^H - I| elementwise.
UNITARY_TOL = 1e-10
# Largest chain that may be flattened to a dense statevector.
DENSE_MAX_QUBITS = 14
# Cached bond spectra must renormalize to this accuracy to be trusted.
SPECTRUM_NORM_TOL = 1e-8
# Schmidt weights below this contribute zero entropy.
ENTROPY_WEIGHT_FLOOR = 1e-30

_SWAP = np.array(
    [
        [1, 0, 0, 0],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
    ],
    dtype=complex,
)


def _check_unitary(u: np.ndarray, dim: int) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (dim, dim):
        raise InvalidSizeError(f"gate must be {dim}x{dim}, got shape {u.shape}")
    dev = np.max(np.abs(u @ u.conj().T - np.eye(dim)))
    if dev > UNITARY_TOL:
        raise UnitarityError(f"gate deviates from unitarity by {dev:.3e}")
    return u


class MpsState:
    """Mixed-canonical MPS over n qubits, initialized to |00...0>.

    Args:
        n: Number of qubits, >= 2.
        chi_max: Hard cap on internal bond dimensions, or None for no
            cap beyond the exact one implied by the chain geometry.
        epsilon: Relative truncation threshold passed to every
            two-qubit split. 0 keeps splits exact.

    Attributes:
        discarded_total: Sum of discarded Schmidt weight over every
            truncation performed on this state so far.
    """

    def __init__(self, n: int, chi_max: int | None = None, epsilon: float = 1e-9):
        if n < 2:
            raise InvalidSizeError(f"need at least 2 qubits, got {n}")
        if chi_max is not None and chi_max < 1:
            raise InvalidSizeError(f"chi_max must be >= 1, got {chi_max}")
        if not 0.0 <= epsilon < 1.0:
            raise InvalidSizeError(f"epsilon must lie in [0, 1), got {epsilon}")
        self.n = n
        self.chi_max = chi_max
        self.epsilon = epsilon
        self.discarded_total = 0.0
        zero = np.zeros((1, 2, 1), dtype=complex)
        zero[0, 0, 0] = 1.0
        self.sites: list[np.ndarray] = [zero.copy() for _ in range(n)]
        # One Schmidt spectrum per internal bond; bond b sits between
        # qubits b and b+1. A product state has trivial spectra.
        self.bond_spectra: list[np.ndarray] = [np.ones(1) for _ in range(n - 1)]
        self.ortho_center = 0

    # ------------------------------------------------------------------
    # canonical-form bookkeeping

    def _center_right(self) -> None:
        c = self.ortho_center
        t = self.sites[c]
        left, d, right = t.shape
        q, r = np.linalg.qr(t.reshape(left * d, right))
        self.sites[c] = q.reshape(left, d, -1)
        self.sites[c + 1] = np.tensordot(r, self.sites[c + 1], axes=(1, 0))
        self.ortho_center = c + 1

    def _center_left(self) -> None:
        c = self.ortho_center
        t = self.sites[c]
        left, d, right = t.shape
        # QR of the transpose yields a right isometry for site c.
        q, r = np.linalg.qr(t.reshape(left, d * right).conj().T)
        self.sites[c] = q.conj().T.reshape(-1, d, right)
        self.sites[c - 1] = np.tensordot(self.sites[c - 1], r.conj().T, axes=(2, 0))
        self.ortho_center = c - 1

    def _move_center(self, target: int) -> None:
        while self.ortho_center < target:
            self._center_right()
        while self.ortho_center > target:
            self._center_left()

    # ------------------------------------------------------------------
    # gates

    def apply_1q(self, u: np.ndarray, q: int) -> None:
        """Apply a single-qubit unitary to qubit q.

        Never changes any bond spectrum or the canonical form, so no
        decomposition is needed.
        """
        u = _check_unitary(u, 2)
        if not 0 <= q < self.n:
            raise InvalidSizeError(f"qubit {q} out of range for n={self.n}")
        self.sites[q] = np.einsum("st,ltr->lsr", u, self.sites[q])

    def apply_2q_adjacent(self, u: np.ndarray, q: int) -> float:
        """Apply a two-qubit unitary to the adjacent pair (q, q+1).

        The gate's first tensor factor acts on qubit q, the second on
        qubit q+1. Returns the Schmidt weight discarded by truncating
        the updated bond.
        """
        u = _check_unitary(u, 4)
        if not 0 <= q <= self.n - 2:
            raise InvalidSizeError(f"pair ({q}, {q + 1}) out of range for n={self.n}")
        if self.ortho_center < q:
            self._move_center(q)
        elif self.ortho_center > q + 1:
            self._move_center(q + 1)
        a, b = self.sites[q], self.sites[q + 1]
        left, right = a.shape[0], b.shape[2]
        theta = np.tensordot(a, b, axes=(2, 0))  # (left, 2, 2, right)
        theta = np.tensordot(u.reshape(2, 2, 2, 2), theta, axes=([2, 3], [1, 2]))
        theta = theta.transpose(2, 0, 1, 3).reshape(left * 2, 2 * right)
        cap = self.chi_max if self.chi_max is not None else theta.shape[0]
        kept, discarded = truncate_spectrum(svd(theta), self.epsilon, cap)
        # Renormalize after every truncation so downstream entropies
        # see a unit-norm Schmidt distribution.
        lam = kept.s / np.linalg.norm(kept.s)
        k = lam.size
        self.sites[q] = kept.u.reshape(left, 2, k)
        self.sites[q + 1] = (lam[:, None] * kept.vh).reshape(k, 2, right)
        self.bond_spectra[q] = lam
        self.ortho_center = q + 1
        self.discarded_total += discarded
        return discarded

    def apply_2q(self, u: np.ndarray, qa: int, qb: int) -> float:
        """Apply a two-qubit unitary to an arbitrary pair (qa, qb).

        The gate's first factor acts on qa, the second on qb. Distant
        pairs are routed with explicit SWAP chains: qb's column is
        swapped next to qa, the gate applied, and the swaps undone, so
        the final qubit order is unchanged. Returns the total discarded
        weight across the swaps and the gate itself.
        """
        u = np.asarray(u, dtype=complex)
        if qa == qb:
            raise InvalidSizeError("two-qubit gate needs two distinct qubits")
        for q in (qa, qb):
            if not 0 <= q < self.n:
                raise InvalidSizeError(f"qubit {q} out of range for n={self.n}")
        if qb < qa:
            # Reorder the gate so its factors match ascending qubits.
            u = _SWAP @ u @ _SWAP
            qa, qb = qb, qa
        if qb == qa + 1:
            return self.apply_2q_adjacent(u, qa)
        discarded = 0.0
        for p in range(qb - 1, qa, -1):
            discarded += self.apply_2q_adjacent(_SWAP, p)
        discarded += self.apply_2q_adjacent(u, qa)
        for p in range(qa + 1, qb):
            discarded += self.apply_2q_adjacent(_SWAP, p)
        return discarded

    # ------------------------------------------------------------------
    # observables

    def bond_dimensions(self) -> list[int]:
        """Current internal bond dimensions, length n-1."""
        return [t.shape[2] for t in self.sites[:-1]]

    def _spectrum(self, bond: int) -> np.ndarray:
        if not 0 <= bond <= self.n - 2:
            raise InvalidSizeError(f"bond {bond} out of range for n={self.n}")
        lam = self.bond_spectra[bond]
        total = float(np.sum(lam**2))
        if abs(total - 1.0) > SPECTRUM_NORM_TOL:
            raise InternalConsistencyError(
                f"cached spectrum at bond {bond} has norm {total:.3e}; "
                "the cache is stale"
            )
        if np.any(np.diff(lam) > 1e-12):
            raise InternalConsistencyError(
                f"cached spectrum at bond {bond} is not descending"
            )
        return lam

    def bond_entropy(self, bond: int) -> float:
        """Von Neumann entropy (nats) across bond b = (b, b+1)."""
        p = self._spectrum(bond) ** 2
        p = p[p >= ENTROPY_WEIGHT_FLOOR]
        # + 0.0 turns IEEE -0.0 into 0.0 for clean reporting.
        return float(-np.sum(p * np.log(p)) + 0.0)

    def entanglement_profile(self) -> np.ndarray:
        """Entropies of all n-1 bonds, left to right."""
        return np.array([self.bond_entropy(b) for b in range(self.n - 1)])

    def norm(self) -> float:
        """Global state norm; 1 up to accumulated roundoff."""
        return float(np.sqrt(abs(self.overlap(self))))

    def overlap(self, other: MpsState) -> complex:
        """Inner product <self|other>."""
        if self.n != other.n:
            raise SizeMismatchError(
                f"overlap needs equal qubit counts, got {self.n} and {other.n}"
            )
        env = np.ones((1, 1), dtype=complex)
        for sa, sb in zip(self.sites, other.sites):
            tmp = np.tensordot(env, sb, axes=(1, 0))  # (la, 2, rb)
            env = np.tensordot(sa.conj(), tmp, axes=([0, 1], [0, 1]))
        return complex(env[0, 0])

    def to_dense(self) -> np.ndarray:
        """Contract to a dense statevector of length 2**n.

        Qubit 0 is the most significant bit of the amplitude index.
        Refuses chains above DENSE_MAX_QUBITS.
        """
        if self.n > DENSE_MAX_QUBITS:
            raise CapacityError(
                f"dense vector for n={self.n} exceeds the n<={DENSE_MAX_QUBITS} cap"
            )
        acc = self.sites[0]
        for t in self.sites[1:]:
            acc = np.tensordot(acc, t, axes=(acc.ndim - 1, 0))
        return acc.reshape(2**self.n)

    def copy(self) -> MpsState:
        """Independent deep copy of this state."""
        dup = MpsState.__new__(MpsState)
        dup.n = self.n
        dup.chi_max = self.chi_max
        dup.epsilon = self.epsilon
        dup.discarded_total = self.discarded_total
        dup.sites = [t.copy() for t in self.sites]
        dup.bond_spectra = [s.copy() for s in self.bond_spectra]
        dup.ortho_center = self.ortho_center
        return dup
