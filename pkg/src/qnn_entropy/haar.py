"""Closed-form Haar-random reference quantities.

Everything a simulation result gets compared against: average
bipartite entropies of Haar-random pure states, their profile over
chain cuts, the large-n asymptotics, and the fidelity distribution
used as the expressibility baseline. All entropies are in nats.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import fsum, log

import numpy as np

from .errors import CapacityError, DomainError, InvalidSizeError, UnsupportedCaseError

EULER_GAMMA = float(np.euler_gamma)

# Largest k summed exactly; beyond it the asymptotic expansion's error
# bound (1 / (8 k^2) ~ 1e-13) is already below double-precision noise
# relative to H_k ~ 14.
HARMONIC_EXACT_MAX = 10**6


@lru_cache(maxsize=None)
def _harmonic_exact(k: int) -> float:
    # fsum keeps the error at one ulp; plain accumulation drifts ~1e-13
    # by k = 1e6, which is the same order as the bound tests pin.
    return fsum(1.0 / i for i in range(1, k + 1))


def harmonic(k: int) -> float:
    """Harmonic number H_k = sum_{i<=k} 1/i.

    Exact (compensated) summation up to HARMONIC_EXACT_MAX, then the
    asymptotic form log k + gamma + 1/(2k), whose error is between 0
    and 1/(8 k^2).
    """
    if k < 1:
        raise DomainError(f"harmonic number needs k >= 1, got {k}")
    if k <= HARMONIC_EXACT_MAX:
        return _harmonic_exact(k)
    return log(k) + EULER_GAMMA + 1.0 / (2.0 * k)


def page_entropy(n_a: int, n_b: int) -> float:
    """Average entanglement entropy of a Haar-random bipartite pure state.

    For subsystem dimensions d_A = 2**n_a <= d_B = 2**n_b:

        <S> = H(d_A d_B) - H(d_B) - (d_A - 1) / (2 d_B)

    The arguments are qubit counts; order does not matter.
    """
    if n_a < 1 or n_b < 1:
        raise InvalidSizeError(f"both parts need >= 1 qubit, got ({n_a}, {n_b})")
    if n_a > n_b:
        n_a, n_b = n_b, n_a
    d_a, d_b = 2**n_a, 2**n_b
    return harmonic(d_a * d_b) - harmonic(d_b) - (d_a - 1) / (2.0 * d_b)


@dataclass(frozen=True)
class HaarProfile:
    """Expected bond-entropy profile of a Haar state on n qubits.

    Attributes:
        n: Qubit count.
        entropies: entry i (0-based) is the expected entropy across
            the cut after qubit i, i.e. the (i+1 : n-i-1) bipartition.
        total: Sum over all n-1 cuts.
        max_value: Largest entry (the central cut).
    """

    n: int
    entropies: np.ndarray
    total: float
    max_value: float


def haar_profile(n: int) -> HaarProfile:
    """Expected entropy at every chain cut of an n-qubit Haar state."""
    if n < 2:
        raise InvalidSizeError(f"need at least 2 qubits, got {n}")
    ent = np.array([page_entropy(i, n - i) for i in range(1, n)])
    return HaarProfile(
        n=n, entropies=ent, total=float(ent.sum()), max_value=float(ent.max())
    )


def haar_max(n: int) -> float:
    """Expected entropy of the most entangled cut.

    Exact profile maximum up to n = 30; beyond that the asymptotic
    half-chain value (n/2) log 2 - 1/2, already accurate to <1e-4
    at the crossover.
    """
    if n < 2:
        raise InvalidSizeError(f"need at least 2 qubits, got {n}")
    if n <= 30:
        return haar_profile(n).max_value
    return (n / 2.0) * log(2.0) - 0.5


def haar_average(n: int) -> float:
    """Asymptotic average bond entropy over all cuts, even n only:

        (1/2) (n/2 - 1) log 2 - 4 / (3 n)

    Odd chains have no closed form of this shape; asking for one is an
    error rather than a silent approximation.
    """
    if n < 2:
        raise InvalidSizeError(f"need at least 2 qubits, got {n}")
    if n % 2 != 0:
        raise UnsupportedCaseError(f"average-entropy closed form needs even n, got {n}")
    return 0.5 * (n / 2.0 - 1.0) * log(2.0) - 4.0 / (3.0 * n)


def sample_haar_state(n: int, seed) -> np.ndarray:
    """Draw a Haar-random statevector on n qubits.

    Standard complex-Gaussian vector, normalized. Dense, so capped at
    n <= 14.
    """
    if n < 1:
        raise InvalidSizeError(f"need at least 1 qubit, got {n}")
    if n > 14:
        raise CapacityError(f"dense Haar sampling capped at n <= 14, got {n}")
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return vec / np.linalg.norm(vec)


def haar_fidelity_pdf(f, dim: int):
    """Fidelity density between independent Haar states, P(F) on [0, 1].

    For Hilbert dimension N: P(F) = (N - 1) (1 - F)^(N - 2), the
    normalized density (integrates to 1 for every N >= 2).

    Args:
        f: Fidelity value(s) in [0, 1]; scalar or array.
        dim: Hilbert-space dimension N >= 2.
    """
    if dim < 2:
        raise InvalidSizeError(f"need Hilbert dimension >= 2, got {dim}")
    arr = np.asarray(f, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("fidelity values must lie in [0, 1]")
    out = (dim - 1) * (1.0 - arr) ** (dim - 2)
    return float(out) if np.ndim(f) == 0 else out


def haar_bin_log_masses(bins: int, dim: int) -> np.ndarray:
    """Log of the Haar fidelity mass in each of `bins` uniform bins.

    Computed in log space: the upper-bin masses underflow float64
    already at dim = 2**8, but their logs are perfectly representable.
    """
    if bins < 1:
        raise InvalidSizeError(f"need at least 1 bin, got {bins}")
    if dim < 2:
        raise InvalidSizeError(f"need Hilbert dimension >= 2, got {dim}")
    edges = np.linspace(0.0, 1.0, bins + 1)
    u = dim - 1
    # mass_k = (1-a)^u - (1-b)^u for bin [a, b)
    log_lo = u * np.log1p(-edges[:-1])
    out = np.empty(bins)
    # log(x - y) = log x + log1p(-exp(log y - log x))
    log_hi = u * np.log1p(-edges[1:-1])
    out[:-1] = log_lo[:-1] + np.log1p(-np.exp(log_hi - log_lo[:-1]))
    out[-1] = log_lo[-1]  # last bin reaches F = 1 where (1-b)^u = 0
    return out
