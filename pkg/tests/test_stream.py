import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subcover.errors import ContractViolation, InputError
from subcover.objectives import CostedUniverse, ModularOracle, instrument
from subcover.stream import (
    ADMITTED, CLOSED, DISCARDED, StreamParams, bucket_count, new_state, run_stream,
    stream_finalize, stream_offer,
)
from subcover.usm import make_usm

from instances import fixture_oracle, fixture_universe, random_costs, random_oracle

EXACT = make_usm("exact")


def test_params():
    p = StreamParams(0.5, 5, 2)
    assert (p.buckets, p.threshold, p.capacity) == (4, 0.625, 8.0)
    assert bucket_count(0.2) == 10
    assert bucket_count(0.3) == 7
    with pytest.raises(InputError):
        StreamParams(1.0, 5, 2)
    with pytest.raises(InputError):
        StreamParams(0.5, 5, 0)


def test_fixture_guess_two_admits_everything():
    f, U = instrument(fixture_oracle()), fixture_universe()
    p = StreamParams(0.5, 5, 2)
    state = new_state(p)
    offers = [stream_offer(state, p, f, U.costs, u) for u in range(3)]
    assert [(o.kind, o.buffer) for o in offers] == [(ADMITTED, 1)] * 3
    sol = stream_finalize(state, p, f, EXACT, U.costs)
    assert sorted(sol.elements) == [0, 1, 2]
    assert sol.value == 6 and sol.cost == 3
    assert sol.cost <= (4 / 0.25 + 1) * 2


def test_low_gain_element_is_discarded():
    f = ModularOracle([3.0, 2.0, 0.5])
    U = CostedUniverse.uniform(3)
    p = StreamParams(0.5, 5, 2)
    state = new_state(p)
    kinds = [stream_offer(state, p, f, U.costs, u).kind for u in range(3)]
    assert kinds == [ADMITTED, ADMITTED, DISCARDED]


def test_cost_gate_makes_no_query():
    f = instrument(ModularOracle([3.0]))
    U = CostedUniverse([3.0])
    p = StreamParams(0.5, 5, 2)
    state = new_state(p)
    assert stream_offer(state, p, f, U.costs, 0).kind == DISCARDED
    assert f.queries == 0


def test_fixture_guess_one_trace():
    sol, state = run_stream(fixture_oracle(), fixture_universe(), StreamParams(0.5, 5, 1), EXACT)
    assert state.trace == [(0, ADMITTED, 1), (1, ADMITTED, 1), (2, DISCARDED, None)]
    assert sorted(sol.elements) == [0, 1] and sol.value == 5


def test_all_buffers_empty_returns_empty_set():
    sol, _ = run_stream(ModularOracle([1.0, 1.0]), CostedUniverse.uniform(2), StreamParams(0.5, 100, 1), EXACT)
    assert sol.elements == [] and sol.value == 0


def test_closing_and_contract():
    f = ModularOracle(np.full(6, 10.0))
    U = CostedUniverse.uniform(6)
    p = StreamParams(0.5, 1, 1)  # cap 4, every element clears the threshold
    state = new_state(p)
    kinds = [stream_offer(state, p, f, U.costs, u).kind for u in range(5)]
    assert kinds == [ADMITTED] * 4 + [CLOSED]
    with pytest.raises(ContractViolation):
        stream_offer(state, p, f, U.costs, 5)


def test_random_set_stream_is_reproducible():
    rng = np.random.default_rng(3)
    f = random_oracle(rng, "cut", 10)
    U = random_costs(rng, 10)
    rs = make_usm("rs", reps=5, seed=4)
    a, _ = run_stream(f, U, StreamParams(0.3, 5, 3), rs)
    b, _ = run_stream(f, U, StreamParams(0.3, 5, 3), rs)
    assert a.elements == b.elements and a.value == b.value


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["modular", "coverage", "cut", "diverse"]),
       st.sampled_from([0.2, 0.3, 0.5, 0.9]))
def test_buffer_invariants(seed, kind, eps):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 15))
    f = instrument(random_oracle(rng, kind, n))
    U = random_costs(rng, n)
    guess = float(rng.uniform(U.w_min, U.total))
    tau = float(rng.uniform(0.1, 1.0)) * max(f(range(n)), 1e-3)
    p = StreamParams(eps, tau, guess)
    state = new_state(p)
    for u in U.order:
        before = list(state.buffer_costs)
        assert all(c <= p.capacity + 1e-12 for c in before) or state.closed
        q0 = f.queries
        o = stream_offer(state, p, f, U.costs, int(u))
        # one query per buffer tested (plus f(empty) once)
        assert f.queries - q0 <= p.buckets + 1
        if o.kind in (ADMITTED, CLOSED):
            assert state.buffer_costs[o.buffer - 1] <= p.capacity + guess + 1e-9
        if state.closed:
            break
    members = [x for buf in state.buffers for x in buf]
    assert len(members) == len(set(members))
    assert all(U.costs[x] <= guess for x in members)
    # every buffer stays within (2/eps + 1) * guess, the union within b times that
    assert all(c <= (2 / eps + 1) * guess + 1e-9 for c in state.buffer_costs)
    assert state.peak_stored_cost <= p.buckets * p.capacity + guess + 1e-9
    sol = stream_finalize(state, p, f, EXACT, U.costs)
    assert sol.value >= max(f(b) for b in state.buffers) - 1e-12
