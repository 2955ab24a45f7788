"""Brute-force reference solvers for small instances (n <= 20).

Subset ``mask`` bit ``i`` selects the ``i``-th element of the enumeration
list (ascending ids unless stated otherwise).  Ties are broken toward the
numerically smallest mask.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InputError

ENUM_LIMIT = 20


@dataclass(frozen=True)
class ExactAnswer:
    elements: tuple
    value: float
    cost: float
    count: int
    feasible: bool = True


def _guard(k):
    if k > ENUM_LIMIT:
        raise InputError(f"refusing to enumerate 2^{k} subsets (limit n <= {ENUM_LIMIT})")


def mask_members(mask, elements):
    return [elements[i] for i in range(len(elements)) if mask >> i & 1]


def value_table(oracle, elements):
    """``f`` on every subset of ``elements``, indexed by mask (2^k queries)."""
    elements = list(elements)
    _guard(len(elements))
    out = np.empty(1 << len(elements))
    for mask in range(out.size):
        out[mask] = oracle.evaluate(mask_members(mask, elements))
    return out


def cost_table(costs, elements):
    elements = list(elements)
    _guard(len(elements))
    k = len(elements)
    masks = np.arange(1 << k, dtype=np.int64)
    w = np.asarray([costs[e] for e in elements], dtype=np.float64)
    bits = (masks[:, None] >> np.arange(k)) & 1
    return bits @ w if k else np.zeros(1)


def _answer(mask, elements, values, costs, feasible=True):
    return ExactAnswer(tuple(mask_members(int(mask), elements)), float(values[mask]),
                       float(costs[mask]), values.size, feasible)


def _sc_from_tables(values, costs, tau, elements):
    ok = values >= tau
    if not ok.any():
        return ExactAnswer((), float("nan"), float("inf"), values.size, False)
    best_cost = costs[ok].min()
    mask = int(np.flatnonzero(ok & (costs == best_cost))[0])
    return _answer(mask, elements, values, costs)


def exact_sc_opt(instance):
    """Minimum-cost set with ``f >= tau`` (``feasible=False`` if none)."""
    elements = sorted(int(e) for e in instance.universe.order)
    _guard(len(elements))
    if instance.tau <= 0:
        return ExactAnswer((), float(instance.oracle.evaluate([])), 0.0, 1)
    values = value_table(instance.oracle, elements)
    costs = cost_table(instance.universe.costs, elements)
    return _sc_from_tables(values, costs, instance.tau, elements)


def exact_kcsm_opt(instance):
    """Maximum-value set with cost at most ``kappa``."""
    elements = sorted(int(e) for e in instance.universe.order)
    _guard(len(elements))
    values = value_table(instance.oracle, elements)
    costs = cost_table(instance.universe.costs, elements)
    ok = costs <= instance.kappa
    best_val = values[ok].max()
    mask = int(np.flatnonzero(ok & (values == best_val))[0])
    return _answer(mask, elements, values, costs)


def _gray_walk(oracle, costs, elements):
    """Yield (mask, value, cost) over all subsets in reflected Gray-code order."""
    k = len(elements)
    current = set()
    cost = 0.0
    mask = 0
    yield 0, oracle.evaluate([]), 0.0
    for step in range(1, 1 << k):
        bit = (step & -step).bit_length() - 1
        e = elements[bit]
        mask ^= 1 << bit
        if e in current:
            current.discard(e)
            cost -= costs[e]
        else:
            current.add(e)
            cost += costs[e]
        yield mask, oracle.evaluate(sorted(current)), cost


def exact_sc_opt_gray(instance):
    """Independent Gray-code enumeration of the cover optimum (cross-check)."""
    elements = sorted(int(e) for e in instance.universe.order)
    _guard(len(elements))
    best = None
    count = 0
    for mask, val, cost in _gray_walk(instance.oracle, instance.universe.costs, elements):
        count += 1
        if val < instance.tau:
            continue
        # exact sums: recompute cost from scratch to avoid drift
        cost = float(sum(instance.universe.costs[e] for e in mask_members(mask, elements)))
        if best is None or cost < best[0] or (cost == best[0] and mask < best[1]):
            best = (cost, mask, val)
    if best is None:
        return ExactAnswer((), float("nan"), float("inf"), count, False)
    cost, mask, val = best
    return ExactAnswer(tuple(mask_members(mask, elements)), float(val), cost, count)


def exact_kcsm_opt_gray(instance):
    elements = sorted(int(e) for e in instance.universe.order)
    _guard(len(elements))
    best = None
    count = 0
    for mask, val, _ in _gray_walk(instance.oracle, instance.universe.costs, elements):
        count += 1
        cost = float(sum(instance.universe.costs[e] for e in mask_members(mask, elements)))
        if cost > instance.kappa:
            continue
        if best is None or val > best[0] or (val == best[0] and mask < best[1]):
            best = (val, mask, cost)
    val, mask, cost = best
    return ExactAnswer(tuple(mask_members(mask, elements)), float(val), cost, count)


def prefix_opts(oracle, universe, tau):
    """Optimal cover cost for every stream prefix ``U_1..U_n`` (inf when infeasible).

    Entry ``i - 1`` holds ``OPT_i`` for the first ``i`` arrivals.
    """
    elements = [int(e) for e in universe.order]
    _guard(len(elements))
    values = value_table(oracle, elements)
    costs = cost_table(universe.costs, elements)
    masks = np.arange(values.size)
    prefix_len = np.zeros(values.size, dtype=np.int64)
    for i in range(len(elements)):
        prefix_len[masks >> i > 0] = i + 1
    out = []
    for i in range(1, len(elements) + 1):
        ok = (values >= tau) & (prefix_len <= i)
        out.append(float(costs[ok].min()) if ok.any() else float("inf"))
    return out


# ---------------------------------------------------------------------------
# averaging facts behind the stream's value bound


def _check_disjoint(parts):
    seen = set()
    for p in parts:
        p = set(p)
        if seen & p:
            raise InputError(f"sets overlap on {sorted(seen & p)}")
        seen |= p


def check_best_part_bound(oracle, parts, B, tol=1e-9):
    """True iff some ``A_i`` has ``f(A_i | B) >= (1 - 1/m) f(B)``."""
    parts = [list(p) for p in parts]
    if not parts:
        raise InputError("need at least one set")
    _check_disjoint(parts)
    B = list(B)
    m = len(parts)
    rhs = (1 - 1 / m) * oracle.evaluate(B)
    best = max(oracle.evaluate(sorted(set(p) | set(B))) for p in parts)
    return best >= rhs - tol


def disjoint_average(oracle, parts, B=()):
    """Mean of ``g(A_i)`` over disjoint parts and the bound ``(1 - 1/m) g(empty)``,
    where ``g(X) = f(X | B)``.  The mean never falls below the bound for
    nonnegative submodular ``f``.
    """
    parts = [list(p) for p in parts]
    _check_disjoint(parts)
    B = set(B)
    m = len(parts)
    mean = sum(oracle.evaluate(sorted(set(p) | B)) for p in parts) / m
    return mean, (1 - 1 / m) * oracle.evaluate(sorted(B))


# documented operation name
check_claim1 = check_best_part_bound
