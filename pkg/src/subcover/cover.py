"""Submodular cover drivers: multi-pass ``multi`` and one-pass ``single``.

Both return a :class:`BicriteriaSolution` whose value is certified against
``gamma * (1 - eps) * tau`` where ``gamma`` is the USM subroutine's ratio.
"""
import math
import time
from dataclasses import dataclass

from .errors import InputError
from .ladder import ceil_exp
from .objectives import instrument
from .solution import BicriteriaSolution, RunMetrics
from .stream import StreamParams, StreamState, bucket_count, run_stream

# relative slack on the certification test, absorbs float summation order
CERT_RTOL = 1e-12


@dataclass
class CoverInstance:
    universe: object
    oracle: object
    tau: float

    def __post_init__(self):
        if not self.tau >= 0:
            raise InputError("tau must be >= 0")


def certify_target(usm, epsilon, tau):
    return usm.gamma * (1 - epsilon) * tau


def meets(value, target):
    return value >= target - CERT_RTOL * max(1.0, abs(target))


def _check_eps(epsilon):
    if not 0 < epsilon < 1:
        raise InputError("epsilon must lie in (0, 1)")


def _trivial(oracle, feasible, metrics, t0):
    value = oracle.evaluate([])
    metrics.queries += 1
    metrics.wall_time = time.perf_counter() - t0
    return BicriteriaSolution([], value, 0.0, feasible, metrics)


def multi(instance, epsilon, usm):
    """Run the stream pass for guesses ``w_min * (1+eps)^i``, i = 0, 1, ...

    Returns the first pass result meeting ``gamma (1-eps) tau``.  Guesses
    stop after exceeding ``w(U) (1+eps)``; the best result so far is then
    returned with ``feasible=False``.  ``metrics.passes`` includes the
    preliminary pass that finds ``w_min``.
    """
    _check_eps(epsilon)
    t0 = time.perf_counter()
    oracle = instrument(instance.oracle)
    start = oracle.queries
    universe, tau = instance.universe, instance.tau
    metrics = RunMetrics()
    if tau == 0:
        return _trivial(oracle, True, metrics, t0)
    if universe.n == 0:
        return _trivial(oracle, False, metrics, t0)

    w_min = universe.w_min
    metrics.passes = 1
    target = certify_target(usm, epsilon, tau)
    limit = universe.total * (1 + epsilon)
    base = 1 + epsilon
    best = None
    i = 0
    while True:
        guess = w_min * base ** i
        if guess > limit:
            break
        sol, _ = run_stream(oracle, universe, StreamParams(epsilon, tau, guess), usm)
        m = sol.metrics
        metrics.passes += 1
        metrics.guesses.append(guess)
        metrics.observe_stored(m.peak_stored_cost)
        metrics.marginal_evals += m.marginal_evals
        metrics.usm_calls += m.usm_calls
        if best is None or sol.value > best.value:
            best = sol
        if meets(sol.value, target):
            best = sol
            break
        i += 1

    feasible = meets(best.value, target)
    metrics.queries = oracle.queries - start
    metrics.terminated_early = best.metrics.terminated_early
    metrics.wall_time = time.perf_counter() - t0
    return BicriteriaSolution(best.elements, best.value, best.cost, feasible, metrics,
                              guess=best.guess, notes=dict(best.notes))


class _GuessRun:
    """One parallel stream instance inside ``single``/``single_max``."""

    __slots__ = ("state", "s0", "s0_value", "ready")

    def __init__(self, buckets, empty_value=None):
        self.state = StreamState(buckets)
        self.state.empty_value = empty_value
        self.s0 = []
        self.s0_value = None
        self.ready = False

    def refresh_s0(self, oracle, usm):
        union = self.state.admitted
        if union:
            cand = usm(oracle, list(union))
            val = oracle.evaluate(cand)
        else:
            cand, val = [], self.state.value_of(0, oracle)
        # the previous S0 is a subset of the current union: keep the better one
        if self.s0_value is None or val > self.s0_value:
            self.s0, self.s0_value = cand, val
        self.ready = True

    def best(self, oracle):
        """(index, set, value) of the best among S0 and the buffers; ties to lowest index."""
        idx, chosen, val = 0, self.s0, self.s0_value
        for j, buf in enumerate(self.state.buffers):
            v = self.state.value_of(j, oracle)
            if v > val:
                idx, chosen, val = j + 1, buf, v
        return idx, list(chosen), val


def single(instance, epsilon, upper_bound, usm, lazy_usm=True):
    """One-pass cover over parallel guesses ``(1+eps)^i`` from ``L`` up to the
    smallest grid point at or above ``B``.

    ``upper_bound`` is the initial ``B`` and must be at least ``OPT``; the
    grid point just above it is kept so that some live guess lies in
    ``[OPT, (1+eps) OPT]`` even when ``B = OPT`` falls between grid points.
    ``L`` is lowered lazily from singleton densities.  Whenever the
    instance for guess ``sigma`` holds a set of value at least
    ``gamma (1-eps) tau``, ``B`` drops to ``sigma`` and larger guesses are
    discarded.  ``lazy_usm=False`` reruns the USM subroutine for every live
    guess on every element instead of only after a buffer change.
    """
    _check_eps(epsilon)
    t0 = time.perf_counter()
    oracle = instrument(instance.oracle)
    start = oracle.queries
    universe, tau = instance.universe, instance.tau
    metrics = RunMetrics()
    if tau == 0:
        return _trivial(oracle, True, metrics, t0)
    if universe.n == 0:
        return _trivial(oracle, False, metrics, t0)
    if upper_bound < universe.w_min:
        raise InputError(f"upper bound {upper_bound} is below w_min = {universe.w_min}")

    base = 1 + epsilon
    b = bucket_count(epsilon)
    target = certify_target(usm, epsilon, tau)
    costs = universe.costs
    B = float(upper_bound)
    L = None
    runs = {}
    certified = None
    stored = 0.0
    lower_history, upper_history = [], []
    end_stored = []

    metrics.passes = 1
    empty = oracle.evaluate([])
    for u in universe.order:
        u = int(u)
        q0 = oracle.queries
        peak_here = stored
        w = float(costs[u])
        fu = oracle.evaluate([u])
        if fu > 0 and (L is None or fu / w > epsilon * tau / (2 * L)):
            L = epsilon * tau * w / (2 * fu)
        if L is not None:
            lo, hi = ceil_exp(L, base), ceil_exp(B, base)
            for i in range(lo, hi + 1):
                sigma = base ** i
                run = runs.get(i)
                if run is None:
                    run = runs[i] = _GuessRun(b, empty)
                changed = False
                st = run.state
                if not st.saturated(2 * sigma / epsilon) and w <= sigma:
                    before = st.stored_cost
                    changed = st.try_admit(oracle, u, w, epsilon * tau / (2 * sigma)) is not None
                    stored += st.stored_cost - before
                    peak_here = max(peak_here, stored)
                if changed or not run.ready or not lazy_usm:
                    run.refresh_s0(oracle, usm)
                    metrics.usm_calls += 1
                if meets(run.best(oracle)[2], target):
                    B = sigma
                    certified = i
                    for k in [k for k in runs if k > i]:
                        stored -= runs.pop(k).state.stored_cost
                    break
        metrics.observe_stored(peak_here)
        metrics.stored_trajectory.append(peak_here)
        end_stored.append(stored)
        lower_history.append(L)
        upper_history.append(B)
        metrics.per_element_queries.append(oracle.queries - q0)

    metrics.marginal_evals = sum(r.state.marginal_evals for r in runs.values())
    if certified is not None:
        idx, chosen, value = runs[certified].best(oracle)
        guess = base ** certified
    else:
        idx, chosen, value, guess = 0, [], None, None
        for i in sorted(runs):
            j, c, v = runs[i].best(oracle)
            if value is None or v > value:
                idx, chosen, value, guess = j, c, v, base ** i
        if value is None:
            value = empty
    metrics.guesses = [base ** i for i in sorted(runs)]
    metrics.queries = oracle.queries - start
    metrics.wall_time = time.perf_counter() - t0
    cost = float(sum(costs[x] for x in chosen))
    return BicriteriaSolution(
        chosen, value, cost, certified is not None and meets(value, target), metrics, guess=guess,
        notes={"chosen_index": idx, "lower": lower_history, "upper": upper_history,
               "end_stored": end_stored, "B": B},
    )


def xi(universe, oracle):
    """``min_u w(u) / f({u})`` over elements with positive singleton value."""
    best = math.inf
    for u in universe.order:
        fu = oracle.evaluate([int(u)])
        if fu > 0:
            best = min(best, universe.costs[u] / fu)
    return best
