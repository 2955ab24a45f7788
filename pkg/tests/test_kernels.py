import numpy as np
import pytest

from subcover import _kernels as K

pytestmark = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")


def random_csr(rng, n, n_cols, density):
    rows = [np.unique(rng.integers(0, n_cols, size=rng.integers(0, int(density * n_cols) + 2)))
            for _ in range(n)]
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([r.size for r in rows])
    return indptr, np.concatenate(rows).astype(np.int64)


def symmetric_graph(rng, n, p):
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    src = np.concatenate([iu[keep], ju[keep]])
    dst = np.concatenate([ju[keep], iu[keep]])
    w = rng.uniform(0.5, 2.0, size=int(keep.sum()))
    w = np.concatenate([w, w])
    order = np.lexsort((dst, src))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst[order].astype(np.int64), w[order]


@pytest.mark.parametrize("seed", range(20))
def test_cut_backends_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 40))
    indptr, indices, w = symmetric_graph(rng, n, 0.3)
    members = rng.integers(0, n, size=rng.integers(1, n + 3))  # duplicates on purpose
    a = K.cut_value_np(indptr, indices, w, members, n)
    b = K.cut_value_nb(indptr, indices, w, members, n)
    assert a == pytest.approx(b, abs=1e-9)


@pytest.mark.parametrize("seed", range(20))
def test_coverage_backends_agree(seed):
    rng = np.random.default_rng(100 + seed)
    n, n_tags = int(rng.integers(1, 30)), int(rng.integers(1, 25))
    indptr, tags = random_csr(rng, n, n_tags, 0.3)
    weights = rng.uniform(0, 2, size=n_tags)
    members = rng.integers(0, n, size=rng.integers(1, n + 3))
    a = K.coverage_value_np(indptr, tags, weights, members, n_tags)
    b = K.coverage_value_nb(indptr, tags, weights, members, n_tags)
    assert a == pytest.approx(b, abs=1e-9)


@pytest.mark.parametrize("literal", [False, True])
@pytest.mark.parametrize("seed", range(15))
def test_pair_similarity_backends_agree(seed, literal):
    rng = np.random.default_rng(200 + seed)
    n, n_tags = int(rng.integers(2, 25)), int(rng.integers(2, 12))
    rows = [np.unique(rng.integers(0, n_tags, size=rng.integers(1, 4))) for _ in range(n)]
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([r.size for r in rows])
    tags = np.concatenate(rows).astype(np.int64)
    members = rng.integers(0, n, size=rng.integers(2, n + 2))
    a = K.pair_similarity_sum_np(indptr, tags, members, n_tags, literal)
    b = K.pair_similarity_sum_nb(indptr, tags, members, n_tags, literal)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv("SUBCOVER_DISABLE_NUMBA", "1")
    assert K._env_disabled()
    monkeypatch.setenv("SUBCOVER_DISABLE_NUMBA", "0")
    assert not K._env_disabled()
