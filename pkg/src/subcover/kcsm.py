"""One-pass bicriteria maximization under a knapsack budget (``single_max``)."""
import time
from dataclasses import dataclass

from .cover import _GuessRun, _check_eps
from .errors import InputError
from .ladder import floor_exp
from .objectives import instrument
from .solution import BicriteriaSolution, RunMetrics
from .stream import bucket_count


@dataclass
class KcsmInstance:
    universe: object
    oracle: object
    kappa: float

    def __post_init__(self):
        if not self.kappa >= 0:
            raise InputError("kappa must be >= 0")


def single_max(instance, epsilon, usm):
    """Parallel streams over value guesses ``(1+eps)^i``, budget fixed at ``kappa``.

    ``m`` tracks the best singleton density among elements with
    ``w(x) <= kappa``; live guesses run from the largest grid point not above
    the best affordable singleton value up to ``2 m kappa / eps``.  Guesses
    that fall below the window are dropped with their buffers.  After the
    pass each live guess runs the USM subroutine on its buffer union and the
    global best set is returned (ties: smallest guess, then lowest buffer).
    """
    _check_eps(epsilon)
    t0 = time.perf_counter()
    oracle = instrument(instance.oracle)
    start = oracle.queries
    universe, kappa = instance.universe, float(instance.kappa)
    metrics = RunMetrics(passes=1)
    costs = universe.costs
    base = 1 + epsilon
    b = bucket_count(epsilon)
    cap = 2 * kappa / epsilon

    density = None
    best_single = None
    runs = {}
    stored = 0.0
    density_history = []
    empty = oracle.evaluate([])
    for x in universe.order:
        x = int(x)
        q0 = oracle.queries
        peak_here = stored
        w = float(costs[x])
        fx = oracle.evaluate([x])
        if w <= kappa and fx > 0:
            if density is None or fx / w > density:
                density = fx / w
            if best_single is None or fx > best_single:
                best_single = fx
        density_history.append(density)
        if density is not None:
            lo = floor_exp(best_single, base)
            hi = floor_exp(2 * density * kappa / epsilon, base)
            for k in [k for k in runs if k < lo]:
                stored -= runs.pop(k).state.stored_cost
            for i in range(lo, hi + 1):
                run = runs.get(i)
                if run is None:
                    run = runs[i] = _GuessRun(b, empty)
                st = run.state
                if w <= kappa and not st.saturated(cap):
                    before = st.stored_cost
                    st.try_admit(oracle, x, w, epsilon * base ** i / (2 * kappa))
                    stored += st.stored_cost - before
                    peak_here = max(peak_here, stored)
        metrics.observe_stored(peak_here)
        metrics.stored_trajectory.append(peak_here)
        metrics.per_element_queries.append(oracle.queries - q0)

    chosen, value, guess, idx = [], None, None, 0
    for i in sorted(runs):
        run = runs[i]
        run.refresh_s0(oracle, usm)
        metrics.usm_calls += 1
        j, c, v = run.best(oracle)
        if value is None or v > value:
            chosen, value, guess, idx = c, v, base ** i, j
    if value is None:
        value = empty
    metrics.marginal_evals = sum(r.state.marginal_evals for r in runs.values())
    metrics.guesses = [base ** i for i in sorted(runs)]
    metrics.queries = oracle.queries - start
    metrics.wall_time = time.perf_counter() - t0
    cost = float(sum(costs[e] for e in chosen))
    # no value target is known for KCSM; "feasible" reports the relaxed budget bound
    feasible = cost <= (1 + epsilon) * (4 / epsilon ** 2 + 1) * kappa
    return BicriteriaSolution(chosen, value, cost, feasible, metrics, guess=guess,
                              notes={"chosen_index": idx, "density": density_history,
                                     "buffers": {i: [list(b) for b in runs[i].state.buffers] for i in sorted(runs)}})
