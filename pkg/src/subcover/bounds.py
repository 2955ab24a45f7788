"""Closed-form resource and quality bounds for ``multi``, ``single`` and ``single_max``.

Each report carries two flavours of the query/memory bound:

* ``*_formula`` fields evaluate the closed-form expressions literally (with ``T``
  applied to an element count, i.e. ``T(size_bound / w_min)``);
* the unsuffixed fields add the bookkeeping queries this implementation
  makes (``f(empty)``, ``f(S_0)``, singleton probes) and use
  ``ceil(2/eps)`` buffers, so measured counts can be asserted against them.
"""
import math
from dataclasses import dataclass

from .errors import InputError
from .stream import bucket_count


@dataclass(frozen=True)
class InstanceStats:
    n: int
    w_min: float
    tau: float = 0.0
    opt: float = None
    xi: float = None


def instance_stats(universe, oracle, tau=0.0, opt=None):
    """Collect ``n``, ``w_min`` and ``xi = min w(u)/f({u})`` (n oracle calls)."""
    xi = math.inf
    for u in universe.order:
        fu = oracle.evaluate([int(u)])
        if fu > 0:
            xi = min(xi, universe.costs[u] / fu)
    return InstanceStats(universe.n, universe.w_min, tau, opt, xi)


@dataclass(frozen=True)
class BoundReport:
    kind: str
    value_lb: float = None
    cost: float = None
    passes_formula: float = None
    pass_limit: int = None
    stream_passes: int = None
    peak_stored_formula: float = None
    peak_stored: float = None
    queries_formula: float = None
    queries: float = None
    per_element_queries_formula: float = None
    per_element_queries: float = None
    instances: int = None


def size_factor(epsilon):
    """``4/eps^2 + 1``: stored-cost multiple of the guess for one stream."""
    return 4 / epsilon ** 2 + 1


def stream_factor(epsilon):
    """Stored-cost multiple actually enforced with ``ceil(2/eps)`` buffers."""
    return bucket_count(epsilon) * 2 / epsilon + 1


def _union_size(n, epsilon, scale, w_min):
    return min(n, math.floor(stream_factor(epsilon) * scale / w_min + 1e-9))


def memory_bound_single(x, epsilon, tau, xi):
    """``m(x)`` for the one-pass cover driver."""
    return (1 + epsilon) * size_factor(epsilon) * x * math.log(2 * x / (epsilon * tau * xi)) / math.log1p(epsilon)


def query_bound_single(x, epsilon, tau, xi, w_min, usm):
    """``q(x)``: queries per arriving element, ``T`` taken on ``(4/eps^2+1) x / w_min`` elements."""
    return (math.log(2 * x / (epsilon * tau * xi)) / math.log1p(epsilon)
            * (2 / epsilon + usm.query_bound(size_factor(epsilon) * x / w_min)))


def theorem_bounds(kind, stats, epsilon, usm, bound=None):
    """Evaluate the guarantees for ``kind`` in ``{"multi", "single", "singlemax"}``.

    ``bound`` is ``B`` for ``single`` and ``kappa`` for ``singlemax``;
    ``multi`` reads ``stats.opt`` (any upper bound on ``OPT`` is valid).
    """
    if not 0 < epsilon < 1:
        raise InputError("epsilon must lie in (0, 1)")
    base = 1 + epsilon
    lb = math.log1p(epsilon)
    b = bucket_count(epsilon)
    sf = size_factor(epsilon)
    n = stats.n

    if kind == "multi":
        opt = stats.opt
        ratio = max(opt / stats.w_min, 1.0)
        raw = math.log(ratio) / lb
        q = math.ceil(raw - 1e-12)
        stream_passes = q + 1
        m_formula = math.floor((1 + epsilon) * sf * opt / stats.w_min + 1e-9)
        union = _union_size(n, epsilon, base * opt, stats.w_min)
        per_pass = b * n + 2 + usm.query_bound(union)
        return BoundReport(
            kind,
            value_lb=usm.gamma * (1 - epsilon) * stats.tau,
            cost=(1 + epsilon) * sf * opt,
            passes_formula=raw,
            pass_limit=q + 1,
            stream_passes=stream_passes,
            peak_stored_formula=(1 + epsilon) * sf * opt,
            peak_stored=(1 + epsilon) * stream_factor(epsilon) * opt,
            queries_formula=raw * (2 * n / epsilon + usm.query_bound(m_formula)),
            queries=stream_passes * per_pass,
        )

    if kind == "single":
        x = float(bound)
        tau, xi = stats.tau, stats.xi
        # grid points from L >= eps tau xi / 2 up to the first one at or above x
        count = math.floor(math.log(2 * x / (epsilon * tau * xi)) / lb + 1e-9) + 2
        union = _union_size(n, epsilon, base * x, stats.w_min)
        per_elem = 1 + count * (b + usm.query_bound(union) + 1)
        return BoundReport(
            kind,
            value_lb=usm.gamma * (1 - epsilon) * tau,
            cost=(1 + epsilon) * sf * stats.opt if stats.opt is not None else None,
            passes_formula=1.0,
            pass_limit=1,
            stream_passes=1,
            peak_stored_formula=memory_bound_single(x, epsilon, tau, xi),
            peak_stored=count * stream_factor(epsilon) * base * x,
            per_element_queries_formula=query_bound_single(x, epsilon, tau, xi, stats.w_min, usm),
            per_element_queries=per_elem,
            queries=n * per_elem + 1,
            instances=count,
        )

    if kind == "singlemax":
        kappa = float(bound)
        raw = math.log(2 * kappa / (stats.w_min * epsilon)) / lb
        count = math.floor(raw + 1e-9) + 2
        union = _union_size(n, epsilon, kappa, stats.w_min)
        m_formula = math.floor(sf * kappa / stats.w_min + 1e-9)
        return BoundReport(
            kind,
            value_lb=None,
            cost=(1 + epsilon) * sf * kappa,
            passes_formula=1.0,
            pass_limit=1,
            stream_passes=1,
            peak_stored_formula=sf * math.ceil(raw - 1e-12) * kappa,
            peak_stored=count * stream_factor(epsilon) * kappa,
            queries_formula=raw * (2 * n / epsilon + usm.query_bound(m_formula)),
            queries=n + 1 + n * count * b + count * (usm.query_bound(union) + 1),
            instances=count,
        )

    raise InputError(f"unknown bound kind {kind!r}")
