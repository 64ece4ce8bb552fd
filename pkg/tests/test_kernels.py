"""Both kernel variants (jitted and numpy) must agree on random inputs."""

import numpy as np
import pytest

from heterosum import _kernels

pytestmark = pytest.mark.skipif(
    not _kernels.NUMBA_ENABLED, reason="numba disabled; single path only"
)


def _random_transition(rng, n):
    w = rng.random((n, n))
    w = (w + w.T) / 2
    np.fill_diagonal(w, 0.0)
    rowsum = w.sum(axis=1)
    mt = np.zeros_like(w)
    nz = rowsum > 0
    mt[:, nz] = (w[nz, :] / rowsum[nz, None]).T
    return mt


def test_rank_iterate_paths_agree():
    rng = np.random.default_rng(7)
    for n in [1, 2, 5, 12]:
        mt = _random_transition(rng, n)
        s1, i1, c1 = _kernels.IMPLEMENTATIONS["rank_iterate"]["numba"](mt, 0.85, 1e-8, 300)
        s2, i2, c2 = _kernels.IMPLEMENTATIONS["rank_iterate"]["numpy"](mt, 0.85, 1e-8, 300)
        assert c1 == c2 and i1 == i2
        np.testing.assert_allclose(s1, s2, rtol=1e-10, atol=1e-12)


def test_lcs_paths_agree():
    rng = np.random.default_rng(11)
    for _ in range(30):
        a = rng.integers(0, 6, size=rng.integers(0, 25)).astype(np.int32)
        b = rng.integers(0, 6, size=rng.integers(0, 25)).astype(np.int32)
        assert _kernels.IMPLEMENTATIONS["lcs_table"]["numba"](a, b).tolist() == (
            _kernels.IMPLEMENTATIONS["lcs_table"]["numpy"](a, b).tolist()
        )


def test_ward_paths_agree():
    rng = np.random.default_rng(13)
    for n in [1, 2, 8, 20]:
        x = rng.random((n, 3))
        sq = ((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2) / 2.0
        cost = sq.copy()
        cost[np.tril_indices(n)] = np.inf
        p1 = _kernels.IMPLEMENTATIONS["ward_merge"]["numba"](cost.copy(), 0.05)
        p2 = _kernels.IMPLEMENTATIONS["ward_merge"]["numpy"](cost.copy(), 0.05)
        assert p1.tolist() == p2.tolist()


def test_block_matches_paths_agree():
    rng = np.random.default_rng(17)
    for _ in range(40):
        a = rng.integers(0, 4, size=rng.integers(1, 30)).astype(np.int32)
        b = rng.integers(0, 4, size=rng.integers(1, 30)).astype(np.int32)
        m1 = _kernels.IMPLEMENTATIONS["block_matches"]["numba"](a, b)
        m2 = _kernels.IMPLEMENTATIONS["block_matches"]["numpy"](a, b)
        assert m1 == m2
