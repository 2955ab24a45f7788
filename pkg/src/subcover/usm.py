"""Unconstrained submodular maximization subroutines.

Each routine takes an oracle and an ordered list ``S`` of element ids and
returns a subset of ``S`` (as a list, in ``S`` order).  Randomized routines
derive their generator from ``(seed, S)`` so that the output is a pure
function of oracle, input and seed.
"""
import math
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import InputError

EXACT_LIMIT = 20


def _rng(seed, S):
    """Generator keyed on the seed and the exact input list (PCG64)."""
    key = zlib.crc32(np.asarray(S, dtype="<i8").tobytes())
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, len(S), key])


def _dg_once(oracle, arr, randomized, rng):
    m = arr.size
    in_x = np.zeros(m, dtype=bool)
    in_y = np.ones(m, dtype=bool)
    for i in range(m):
        f_x = oracle.evaluate(arr[in_x])
        in_x[i] = True
        gain_add = oracle.evaluate(arr[in_x]) - f_x
        in_x[i] = False
        f_y = oracle.evaluate(arr[in_y])
        in_y[i] = False
        gain_drop = oracle.evaluate(arr[in_y]) - f_y
        in_y[i] = True
        if randomized:
            a, b = max(gain_add, 0.0), max(gain_drop, 0.0)
            p = 1.0 if a + b == 0 else a / (a + b)
            take = rng.random() < p
        else:
            # both options negative and equal: drop u
            take = gain_add > gain_drop or (gain_add == gain_drop and gain_add >= 0)
        if take:
            in_x[i] = True
        else:
            in_y[i] = False
    return arr[in_x].tolist()


def double_greedy(oracle, S, randomized=False, seed=0):
    """One pass of two-sided greedy over ``S`` in the given order.

    Deterministic: add ``u`` when the gain of adding it to ``X`` beats the
    gain of removing it from ``Y`` (1/3-approximation).  Randomized: add
    with probability proportional to the positive parts (1/2 in
    expectation).  Four oracle queries per element.
    """
    S = list(S)
    if not S:
        return []
    rng = _rng(seed, S) if randomized else None
    return _dg_once(oracle, np.asarray(S, dtype=np.int64), randomized, rng)


def _best_of(oracle, candidates):
    best, best_val = None, -math.inf
    for cand in candidates:
        val = oracle.evaluate(cand)
        if val > best_val:
            best, best_val = cand, val
    return best


def repeated_double_greedy(oracle, S, reps=50, seed=0):
    """Best of ``reps`` independent randomized double greedy runs."""
    S = list(S)
    if not S:
        return []
    rng = _rng(seed, S)
    arr = np.asarray(S, dtype=np.int64)
    runs = [_dg_once(oracle, arr, True, rng) for _ in range(reps)]
    if reps == 1:
        return runs[0]
    return _best_of(oracle, runs)


def random_set(oracle, S, reps=1, seed=0):
    """Best of ``reps`` uniform random subsets; one query per sample."""
    if reps < 1:
        raise InputError("reps must be >= 1")
    S = list(S)
    if not S:
        return []
    rng = _rng(seed, S)
    arr = np.asarray(S)
    samples = []
    for _ in range(reps):
        pick = rng.random(len(S)) < 0.5
        samples.append(arr[pick].tolist())
    return _best_of(oracle, samples)


def local_search(oracle, S, eps_ls=0.25):
    """Add/remove local search with improvement factor ``1 + eps_ls/n^2``.

    Returns the better of the local optimum and its complement within ``S``.
    """
    if not 0 < eps_ls < 1:
        raise InputError("eps_ls must lie in (0, 1)")
    S = list(S)
    if not S:
        return []
    n = len(S)
    factor = 1.0 + eps_ls / (n * n)
    singles = [oracle.evaluate([u]) for u in S]
    start = int(np.argmax(singles))
    inside = {S[start]}
    cur = singles[start]

    def members():
        return [u for u in S if u in inside]

    improved = True
    while improved:
        improved = False
        for u in S:
            if u in inside:
                continue
            val = oracle.evaluate(members() + [u])
            if val > factor * cur:
                inside.add(u)
                cur = val
                improved = True
                break
        if improved:
            continue
        for u in S:
            if u not in inside:
                continue
            inside.discard(u)
            val = oracle.evaluate(members())
            if val > factor * cur:
                cur = val
                improved = True
                break
            inside.add(u)
    local = members()
    comp = [u for u in S if u not in inside]
    return local if cur >= oracle.evaluate(comp) else comp


def exact_usm(oracle, S):
    """Exhaustive argmax of ``f`` over subsets of ``S`` (|S| <= 20).

    Ties go to the lexicographically smallest sorted id tuple.
    """
    S = list(S)
    m = len(S)
    if m > EXACT_LIMIT:
        raise InputError(f"exact_usm refuses |S| = {m} > {EXACT_LIMIT}")
    if m == 0:
        return []
    best, best_val = (), -math.inf
    for mask in range(1 << m):
        sub = [S[i] for i in range(m) if mask >> i & 1]
        val = oracle.evaluate(sub)
        if val > best_val:
            best, best_val = tuple(sorted(sub)), val
        elif val == best_val:
            key = tuple(sorted(sub))
            if key < best:
                best = key
    chosen = set(best)
    return [u for u in S if u in chosen]


# ---------------------------------------------------------------------------


def local_search_queries(m, eps_ls=0.25):
    """Upper bound on local search queries for an input of size ``m``."""
    if m <= 1:
        return 2 * m + 1
    moves = math.log(m) / math.log1p(eps_ls / (m * m)) + 1
    return m + 2 * m * (moves + 1) + 1


@dataclass(frozen=True)
class UsmAlgorithm:
    """A configured USM subroutine with its guarantee ratio ``gamma``."""

    name: str
    gamma: float
    reps: int = 1
    seed: int = 0
    eps_ls: float = 0.25

    def __call__(self, oracle, S):
        if self.name == "dg":
            return repeated_double_greedy(oracle, S, self.reps, self.seed)
        if self.name == "dg-det":
            return double_greedy(oracle, S, randomized=False)
        if self.name == "rs":
            return random_set(oracle, S, self.reps, self.seed)
        if self.name == "ls":
            return local_search(oracle, S, self.eps_ls)
        if self.name == "exact":
            return exact_usm(oracle, S)
        raise InputError(f"unknown USM algorithm {self.name!r}")

    def query_bound(self, m):
        """``T(m)``: maximum oracle queries on an input of ``m`` elements."""
        m = max(0, int(math.floor(m)))
        if m == 0:
            return 0
        if self.name == "dg":
            return self.reps * 4 * m + (self.reps if self.reps > 1 else 0)
        if self.name == "dg-det":
            return 4 * m
        if self.name == "rs":
            return self.reps
        if self.name == "ls":
            return local_search_queries(m, self.eps_ls)
        if self.name == "exact":
            return 2 ** m if m <= 1000 else math.inf
        raise InputError(f"unknown USM algorithm {self.name!r}")


USM_NAMES = ("dg", "dg-det", "rs", "ls", "exact")


def make_usm(name, reps=50, seed=0, eps_ls=0.25):
    """Build a USM subroutine by CLI name.

    ``dg`` is best-of-``reps`` randomized double greedy (gamma 1/2),
    ``dg-det`` deterministic double greedy (1/3), ``rs`` best-of-``reps``
    random sets (1/4), ``ls`` local search (1/3), ``exact`` brute force (1).
    """
    gammas = {"dg": 0.5, "dg-det": 1 / 3, "rs": 0.25, "ls": 1 / 3, "exact": 1.0}
    if name not in gammas:
        raise InputError(f"unknown USM algorithm {name!r}; choose from {USM_NAMES}")
    if reps < 1:
        raise InputError("reps must be >= 1")
    if name in ("dg-det", "ls", "exact"):
        reps = 1
    return UsmAlgorithm(name, gammas[name], reps, seed, eps_ls)
