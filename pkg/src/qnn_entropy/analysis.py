"""Scalar metrics derived from simulated entanglement data.

These functions consume per-sample or aggregated entropy data and
produce the quantities the experiments report: the layering contrast,
total and normalized entropies, the depth at which a network reaches
the Haar plateau, the entangling-speed fit, and the expressibility
divergence.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientDataError,
    InvalidSizeError,
    NotConvergedError,
    SizeMismatchError,
    UndefinedMetricError,
)
from .haar import haar_bin_log_masses, haar_max

# Fraction of the Haar total entanglement that counts as "reached".
PLATEAU_FRACTION = 0.9


def delta_s_bar(s_alt: float, s_seq: float) -> float:
    """Relative entropy gain of alternated over sequential layering.

    (s_alt - s_seq) / ((s_alt + s_seq) / 2); undefined when both
    entropies vanish.
    """
    if s_alt < 0.0 or s_seq < 0.0:
        raise UndefinedMetricError("entropies must be non-negative")
    mean = 0.5 * (s_alt + s_seq)
    if mean == 0.0:
        raise UndefinedMetricError("both entropies are zero; contrast is undefined")
    return (s_alt - s_seq) / mean


def total_entanglement(profile: np.ndarray) -> float:
    """Sum of the bond-entropy profile over all cuts."""
    profile = np.asarray(profile, dtype=float)
    if profile.ndim != 1 or profile.size < 1:
        raise InvalidSizeError(f"profile must be a 1-D array, got shape {profile.shape}")
    return float(profile.sum())


def normalized_entropy(profile: np.ndarray, n: int) -> float:
    """Peak bond entropy relative to the Haar expectation for n qubits."""
    profile = np.asarray(profile, dtype=float)
    if profile.shape != (n - 1,):
        raise SizeMismatchError(
            f"profile for n={n} must have {n - 1} entries, got shape {profile.shape}"
        )
    return float(profile.max() / haar_max(n))


@dataclass(frozen=True)
class AggregatedSeries:
    """Monte Carlo means of one scalar metric over a depth grid.

    Attributes:
        l_values: Strictly increasing layer counts.
        means: Sample mean at each depth.
        stderrs: Standard error of each mean.
    """

    l_values: np.ndarray
    means: np.ndarray
    stderrs: np.ndarray

    def __post_init__(self):
        l, m, s = map(np.asarray, (self.l_values, self.means, self.stderrs))
        if not (l.shape == m.shape == s.shape) or l.ndim != 1:
            raise SizeMismatchError("series arrays must be 1-D and equal length")
        if l.size > 1 and np.any(np.diff(l) <= 0):
            raise InvalidSizeError("depth grid must be strictly increasing")


def entangling_layers(series: AggregatedSeries, haar_total: float) -> int:
    """Smallest depth whose mean total entropy reaches the Haar plateau.

    The plateau is PLATEAU_FRACTION of `haar_total`. Raises
    NotConvergedError if no depth in the series reaches it.
    """
    if haar_total <= 0.0:
        raise InvalidSizeError(f"haar_total must be positive, got {haar_total}")
    target = PLATEAU_FRACTION * haar_total
    for l, mean in zip(series.l_values, series.means):
        if mean >= target:
            return int(l)
    raise NotConvergedError(
        f"no depth up to L={int(series.l_values[-1])} reached "
        f"{PLATEAU_FRACTION:.0%} of the Haar total {haar_total:.4f}"
    )


@dataclass(frozen=True)
class SpeedFit:
    """Zero-intercept weighted fit of normalized entropy vs depth ratio.

    Attributes:
        v_s: Fitted slope.
        v_s_err: One-sigma slope uncertainty from the fit covariance.
        points_used: Points below the linear-regime threshold.
        threshold: The regime cutoff that selected them.
    """

    v_s: float
    v_s_err: float
    points_used: int
    threshold: float


def fit_entangling_speed(
    x: np.ndarray,
    y: np.ndarray,
    yerr: np.ndarray | None = None,
    threshold: float = 0.5,
) -> SpeedFit:
    """Fit y = v x through the origin on the linear regime y <= threshold.

    Weighted least squares with weights 1/yerr^2 (unit weights when
    yerr is None): v = sum(w x y) / sum(w x^2), var(v) = 1 / sum(w x^2).

    Args:
        x: Depth ratios L/n.
        y: Mean normalized entropies.
        yerr: Standard errors of y; must be positive where given.
        threshold: Upper edge of the linear regime.

    Raises:
        InsufficientDataError: Fewer than 2 points fall in the regime.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise SizeMismatchError("x and y must be 1-D arrays of equal length")
    if yerr is None:
        w = np.ones_like(x)
    else:
        yerr = np.asarray(yerr, dtype=float)
        if yerr.shape != x.shape:
            raise SizeMismatchError("yerr must match x in shape")
        if np.any(yerr <= 0.0):
            raise InvalidSizeError("yerr entries must be positive")
        w = 1.0 / yerr**2
    sel = y <= threshold
    if int(sel.sum()) < 2:
        raise InsufficientDataError(
            f"need at least 2 points with y <= {threshold}, got {int(sel.sum())}"
        )
    xs, ys, ws = x[sel], y[sel], w[sel]
    sxx = float(np.sum(ws * xs * xs))
    if sxx == 0.0:
        raise InsufficientDataError("all selected points sit at x = 0")
    v = float(np.sum(ws * xs * ys)) / sxx
    return SpeedFit(
        v_s=v, v_s_err=float(np.sqrt(1.0 / sxx)), points_used=int(sel.sum()),
        threshold=threshold,
    )


def expressibility(fidelities: np.ndarray, dim: int, bins: int = 75) -> float:
    """KL divergence of sampled fidelities from the Haar fidelity law.

    Both distributions are discretized over `bins` uniform bins on
    [0, 1]; empty empirical bins contribute zero (0 log 0 = 0). The
    Haar bin masses are evaluated in log space so high-dimension tails
    never underflow. Lower is more expressible; 0 means the sampled
    ensemble is indistinguishable from Haar at this binning.
    """
    fid = np.asarray(fidelities, dtype=float)
    if fid.ndim != 1 or fid.size < 1:
        raise InvalidSizeError("fidelities must be a non-empty 1-D array")
    if np.any(fid < 0.0) or np.any(fid > 1.0):
        raise UndefinedMetricError("fidelities must lie in [0, 1]")
    if bins < 1:
        raise InvalidSizeError(f"need at least 1 bin, got {bins}")
    counts, _ = np.histogram(fid, bins=bins, range=(0.0, 1.0))
    p_hat = counts / counts.sum()
    log_q = haar_bin_log_masses(bins, dim)
    mask = p_hat > 0.0
    return float(np.sum(p_hat[mask] * (np.log(p_hat[mask]) - log_q[mask])))
