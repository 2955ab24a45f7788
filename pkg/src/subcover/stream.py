"""The buffered filtering pass shared by every cover and maximization driver.

One pass over the stream keeps ``b = ceil(2/eps)`` disjoint buffers.  An
arriving element ``u`` with ``w(u) <= opt_guess`` joins the first buffer
whose density gain ``(f(S_j + u) - f(S_j)) / w(u)`` reaches
``eps * tau / (2 * opt_guess)``.  Reading stops once a buffer's cost goes
over ``2 * opt_guess / eps``.  Finalizing runs a USM subroutine on the union
of the buffers and returns the best of that result and the buffers.
"""
import math
from dataclasses import dataclass

from .errors import ContractViolation, InputError
from .objectives import instrument
from .solution import BicriteriaSolution, RunMetrics

ADMITTED = "admitted"
DISCARDED = "discarded"
CLOSED = "closed"


def bucket_count(epsilon):
    return max(2, math.ceil(2.0 / epsilon - 1e-9))


@dataclass(frozen=True)
class StreamParams:
    epsilon: float
    tau: float
    opt_guess: float

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise InputError("epsilon must lie in (0, 1)")
        if not self.tau >= 0:
            raise InputError("tau must be >= 0")
        if not self.opt_guess > 0:
            raise InputError("opt_guess must be > 0")

    @property
    def buckets(self):
        return bucket_count(self.epsilon)

    @property
    def threshold(self):
        return self.epsilon * self.tau / (2.0 * self.opt_guess)

    @property
    def capacity(self):
        return 2.0 * self.opt_guess / self.epsilon


@dataclass(frozen=True)
class Offer:
    """Outcome of one offer; ``buffer`` is the 1-based receiving buffer."""

    kind: str
    buffer: int = None


class StreamState:
    """Buffers ``S_1..S_b`` with cached values and costs.

    Buffer ``j`` is ``buffers[j - 1]``.  ``f(empty)`` is queried once, lazily.
    """

    def __init__(self, buckets):
        self.buffers = [[] for _ in range(buckets)]
        self.buffer_costs = [0.0] * buckets
        self.buffer_values = [None] * buckets
        self.admitted = []
        self.empty_value = None
        self.closed = False
        self.consumed = 0
        self.stored_cost = 0.0
        self.peak_stored_cost = 0.0
        self.marginal_evals = 0
        self.trace = []

    @property
    def buckets(self):
        return len(self.buffers)

    def value_of(self, j, oracle):
        """Cached ``f(S_j)`` for 0-based ``j``."""
        val = self.buffer_values[j]
        if val is None:
            if self.empty_value is None:
                self.empty_value = oracle.evaluate([])
            val = self.empty_value
        return val

    def saturated(self, capacity):
        return any(c >= capacity for c in self.buffer_costs)

    def try_admit(self, oracle, u, w, threshold):
        """Admit ``u`` to the first qualifying buffer; return its 0-based index or None."""
        for j, buf in enumerate(self.buffers):
            base = self.value_of(j, oracle)
            new = oracle.evaluate(buf + [u])
            self.marginal_evals += 1
            if (new - base) / w >= threshold:
                buf.append(u)
                self.buffer_values[j] = new
                self.buffer_costs[j] += w
                self.admitted.append(u)
                self.stored_cost += w
                if self.stored_cost > self.peak_stored_cost:
                    self.peak_stored_cost = self.stored_cost
                return j
        return None


def new_state(params):
    return StreamState(params.buckets)


def stream_offer(state, params, oracle, costs, u):
    """Offer element ``u`` to the buffers; see module docstring for the rule."""
    if state.closed:
        raise ContractViolation("stream already closed; no further offers allowed")
    w = float(costs[u])
    if not w > 0:
        raise InputError(f"element {u} has non-positive cost {w}")
    state.consumed += 1
    if w > params.opt_guess:
        state.trace.append((u, DISCARDED, None))
        return Offer(DISCARDED)
    j = state.try_admit(oracle, u, w, params.threshold)
    if j is None:
        state.trace.append((u, DISCARDED, None))
        return Offer(DISCARDED)
    if state.buffer_costs[j] > params.capacity:
        state.closed = True
        state.trace.append((u, CLOSED, j + 1))
        return Offer(CLOSED, j + 1)
    state.trace.append((u, ADMITTED, j + 1))
    return Offer(ADMITTED, j + 1)


def pick_best(oracle, state, usm, costs):
    """Run ``usm`` on the buffer union; return (index, set, value) of the best candidate.

    Index 0 is the USM result, ``j`` is buffer ``S_j``; ties go to the lowest index.
    """
    union = list(state.admitted)
    if union:
        s0 = usm(oracle, union)
        v0 = oracle.evaluate(s0)
    else:
        s0 = []
        v0 = state.value_of(0, oracle)
    best_idx, best_set, best_val = 0, s0, v0
    for j, buf in enumerate(state.buffers):
        val = state.value_of(j, oracle)
        if val > best_val:
            best_idx, best_set, best_val = j + 1, buf, val
    return best_idx, list(best_set), best_val


def stream_finalize(state, params, oracle, usm, costs):
    """Finish a pass: USM over the union, then argmax over ``S_0..S_b``."""
    oracle = instrument(oracle)
    before = oracle.queries
    idx, chosen, value = pick_best(oracle, state, usm, costs)
    cost = float(sum(costs[u] for u in chosen))
    metrics = RunMetrics(
        queries=oracle.queries - before,
        passes=1,
        peak_stored_cost=state.peak_stored_cost,
        marginal_evals=state.marginal_evals,
        usm_calls=1 if state.admitted else 0,
        guesses=[params.opt_guess],
        terminated_early=state.closed,
    )
    feasible = value >= usm.gamma * (1 - params.epsilon) * params.tau
    return BicriteriaSolution(chosen, value, cost, feasible, metrics, guess=params.opt_guess,
                              notes={"chosen_index": idx})


def run_stream(oracle, universe, params, usm):
    """One complete pass of the stream over ``universe.order``."""
    oracle = instrument(oracle)
    start = oracle.queries
    state = new_state(params)
    if params.tau == 0:
        value = oracle.evaluate([])
        metrics = RunMetrics(queries=oracle.queries - start, guesses=[params.opt_guess])
        return BicriteriaSolution([], value, 0.0, True, metrics, guess=params.opt_guess), state
    for u in universe.order:
        stream_offer(state, params, oracle, universe.costs, int(u))
        if state.closed:
            break
    sol = stream_finalize(state, params, oracle, usm, universe.costs)
    sol.metrics.queries = oracle.queries - start
    return sol, state
