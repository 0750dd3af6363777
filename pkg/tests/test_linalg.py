"""Unit tests for the SVD wrapper and the spectrum truncation rule."""

import numpy as np
import pytest

from qnn_entropy.errors import (
    DecompositionError,
    DegenerateStateError,
    InvalidSizeError,
)
from qnn_entropy.linalg import SvdResult, svd, truncate_spectrum


def _random_complex(rng, m, n):
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


@pytest.mark.parametrize("shape", [(4, 4), (6, 3), (3, 6), (1, 5), (5, 1)])
def test_svd_reconstructs(shape):
    rng = np.random.default_rng(7)
    a = _random_complex(rng, *shape)
    res = svd(a)
    k = min(shape)
    assert res.s.shape == (k,)
    assert np.all(np.diff(res.s) <= 0)
    assert np.all(res.s >= 0)
    back = res.u @ np.diag(res.s) @ res.vh
    assert np.allclose(back, a, atol=1e-12)
    assert np.allclose(res.u.conj().T @ res.u, np.eye(k), atol=1e-12)
    assert np.allclose(res.vh @ res.vh.conj().T, np.eye(k), atol=1e-12)


def test_svd_rank_deficient():
    rng = np.random.default_rng(3)
    col = _random_complex(rng, 5, 1)
    row = _random_complex(rng, 1, 5)
    res = svd(col @ row)
    assert res.s[0] > 0
    assert np.all(res.s[1:] < 1e-12)


def test_svd_rejects_bad_input():
    with pytest.raises(InvalidSizeError):
        svd(np.zeros(3))
    with pytest.raises(InvalidSizeError):
        svd(np.zeros((0, 2)))
    bad = np.ones((2, 2))
    bad[0, 0] = np.nan
    with pytest.raises(DecompositionError):
        svd(bad)


def _fake(s):
    s = np.asarray(s, dtype=float)
    k = s.size
    return SvdResult(u=np.eye(k), s=s, vh=np.eye(k))


def test_truncate_epsilon_zero_keeps_everything():
    res = _fake([0.9, 0.3, 1e-16])
    out, disc = truncate_spectrum(res, 0.0, 10)
    assert out.s.size == 3
    assert disc == 0.0


def test_truncate_ratio_rule():
    res = _fake([1.0, 0.5, 0.01, 0.005])
    out, disc = truncate_spectrum(res, 0.02, 10)
    assert np.array_equal(out.s, [1.0, 0.5])
    assert disc == pytest.approx(0.01**2 + 0.005**2)
    assert out.u.shape == (4, 2)
    assert out.vh.shape == (2, 4)


def test_truncate_chi_cap():
    res = _fake([1.0, 0.8, 0.6, 0.4])
    out, disc = truncate_spectrum(res, 0.0, 2)
    assert np.array_equal(out.s, [1.0, 0.8])
    assert disc == pytest.approx(0.6**2 + 0.4**2)


def test_truncate_clamps_noise_before_ratio_test():
    # 1e-16 is numerical noise; with a tiny epsilon it must still drop.
    res = _fake([1.0, 1e-16])
    out, disc = truncate_spectrum(res, 1e-20, 10)
    assert out.s.size == 1
    assert disc == pytest.approx(1e-32)


def test_truncate_is_idempotent():
    res = _fake([1.0, 0.5, 0.25, 0.125])
    once, _ = truncate_spectrum(res, 0.2, 3)
    twice, disc2 = truncate_spectrum(once, 0.2, 3)
    assert np.array_equal(once.s, twice.s)
    assert disc2 == 0.0


def test_truncate_all_zero_spectrum():
    with pytest.raises(DegenerateStateError):
        truncate_spectrum(_fake([1e-15, 1e-16]), 0.1, 4)


def test_truncate_argument_validation():
    res = _fake([1.0])
    with pytest.raises(InvalidSizeError):
        truncate_spectrum(res, -0.1, 4)
    with pytest.raises(InvalidSizeError):
        truncate_spectrum(res, 1.0, 4)
    with pytest.raises(InvalidSizeError):
        truncate_spectrum(res, 0.1, 0)
