"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 50]

Both paths are imported directly, so the result does not depend on
SUBCOVER_DISABLE_NUMBA.  The first numba call (compilation) is excluded.
"""
import argparse
import timeit

import numpy as np

from subcover import _kernels as K


def csr(rng, n, cols, avg_deg):
    deg = rng.poisson(avg_deg, size=n)
    indptr = np.concatenate(([0], np.cumsum(deg))).astype(np.int64)
    indices = np.concatenate([np.sort(rng.choice(cols, size=min(d, cols), replace=False)) for d in deg])
    return indptr, indices.astype(np.int64)


def cases(n, seed):
    rng = np.random.default_rng(seed)
    indptr, indices = csr(rng, n, n, 10)
    weights = rng.random(indices.size)
    members = rng.choice(n, size=n // 4, replace=False).astype(np.int64)
    yield "cut_value", (indptr, indices, weights, members, n)

    n_tags = n // 2
    tptr, tags = csr(rng, n, n_tags, 8)
    tw = rng.random(n_tags)
    yield "coverage_value", (tptr, tags, tw, members, n_tags)

    small = members[:400]
    yield "pair_similarity_sum", (tptr, tags, small, n_tags, False)


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    print(f"numba available: {K.HAVE_NUMBA}; active backend: {K.backend()}")
    print(f"{'kernel':<22}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, call_args in cases(args.n, args.seed):
        f_np = getattr(K, name + "_np")
        f_nb = getattr(K, name + "_nb")
        a, b = f_np(*call_args), f_nb(*call_args)
        assert np.isclose(a, b), (name, a, b)
        t_np = min(timeit.repeat(lambda: f_np(*call_args), number=1, repeat=args.repeat)) * 1e3
        t_nb = min(timeit.repeat(lambda: f_nb(*call_args), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<22}{t_np:>12.3f}{t_nb:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
