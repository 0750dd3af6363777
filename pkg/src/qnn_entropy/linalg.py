"""Dense linear-algebra primitives backing the tensor-network engine.

Thin wrappers around LAPACK (via scipy/numpy) that pin down the exact
conventions the rest of the package relies on: descending singular
values, deterministic fallback between SVD drivers, and the spectrum
truncation rule used after every two-qubit update.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DecompositionError, DegenerateStateError, InvalidSizeError

# Singular values below this are treated as exact zeros before any
# relative-ratio test: they are LAPACK noise, not Schmidt weight.
CLAMP_TOL = 1e-14


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD of a matrix a = u @ diag(s) @ vh.

    Attributes:
        u: Left factor, orthonormal columns, shape (m, k).
        s: Singular values, real, descending, shape (k,).
        vh: Right factor (adjoint), orthonormal rows, shape (k, n).
    """

    u: np.ndarray
    s: np.ndarray
    vh: np.ndarray


def svd(a: np.ndarray) -> SvdResult:
    """Thin SVD with deterministic driver fallback.

    Tries the divide-and-conquer driver first; if it fails to converge
    (rare but possible for ill-conditioned inputs) retries with the
    slower Jacobi-style driver before giving up.

    Args:
        a: Matrix of shape (m, n), real or complex, both dims >= 1.

    Returns:
        SvdResult with k = min(m, n) singular values in descending order.

    Raises:
        InvalidSizeError: If ``a`` is not a 2-D matrix with m, n >= 1.
        DecompositionError: If both LAPACK drivers fail to converge.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidSizeError(f"svd expects a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DecompositionError("svd input contains non-finite entries")
    try:
        u, s, vh = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesdd")
    except scipy.linalg.LinAlgError:
        try:
            u, s, vh = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesvd")
        except scipy.linalg.LinAlgError as exc:
            raise DecompositionError(
                f"SVD failed to converge on both drivers for shape {a.shape}"
            ) from exc
    return SvdResult(u=u, s=s, vh=vh)


def truncate_spectrum(
    res: SvdResult, epsilon: float, chi_max: int
) -> tuple[SvdResult, float]:
    """Truncate an SVD by relative weight and a hard rank cap.

    Keeps the leading k singular values where k is the largest count
    such that k <= chi_max and s[k-1] / s[0] >= epsilon. Values below
    an absolute floor (1e-14) are clamped to zero before the ratio
    test. The kept factors are sliced, never rescaled, so applying the
    truncation twice with the same arguments changes nothing.

    Args:
        res: Decomposition to truncate.
        epsilon: Relative discard threshold in [0, 1). epsilon = 0
            disables ratio-based truncation.
        chi_max: Hard cap on the kept rank, >= 1.

    Returns:
        (truncated SvdResult, discarded weight) where the discarded
        weight is the sum of squares of the dropped singular values.

    Raises:
        DomainError-style InvalidSizeError for bad epsilon/chi_max.
        DegenerateStateError: If every singular value clamps to zero.
    """
    if not 0.0 <= epsilon < 1.0:
        raise InvalidSizeError(f"epsilon must lie in [0, 1), got {epsilon}")
    if chi_max < 1:
        raise InvalidSizeError(f"chi_max must be >= 1, got {chi_max}")
    s = np.asarray(res.s, dtype=float)
    clamped = np.where(s < CLAMP_TOL, 0.0, s)
    if clamped[0] == 0.0:
        raise DegenerateStateError("all singular values are numerically zero")
    keep = clamped / clamped[0] >= epsilon if epsilon > 0.0 else np.ones(s.shape, bool)
    if epsilon > 0.0:
        # Spectrum is descending, so the kept set is a prefix.
        k = int(np.count_nonzero(keep))
    else:
        k = s.size
    k = min(k, chi_max)
    discarded = float(np.sum(s[k:] ** 2))
    out = SvdResult(u=res.u[:, :k], s=s[:k].copy(), vh=res.vh[:k, :])
    return out, discarded
