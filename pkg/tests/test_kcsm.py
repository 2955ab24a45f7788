import math

import numpy as np
import pytest

from subcover.bounds import InstanceStats, theorem_bounds
from subcover.errors import InputError
from subcover.exact import exact_kcsm_opt
from subcover.kcsm import KcsmInstance, single_max
from subcover.ladder import floor_exp
from subcover.objectives import CostedUniverse, ModularOracle
from subcover.usm import make_usm

from instances import fixture_oracle, fixture_universe, kcsm_instance

EXACT = make_usm("exact")


def test_fixture_trace():
    sol = single_max(KcsmInstance(fixture_universe(), fixture_oracle(), 2), 0.5, EXACT)
    # window: floor_exp(3) = 2 .. floor_exp(2 * 3 * 2 / 0.5 = 24) = 7
    assert list(sol.notes["buffers"]) == [2, 3, 4, 5, 6, 7]
    buf = {i: b[0] for i, b in sol.notes["buffers"].items()}
    assert buf[7] == [0]  # theta = 17.09/8 > 2 rejects b
    assert buf[6] == [0, 1]  # theta = 1.42 rejects c
    assert all(buf[i] == [0, 1, 2] for i in (2, 3, 4, 5))
    assert sorted(sol.elements) == [0, 1, 2]
    assert sol.value == 6 and sol.cost == 3
    assert sol.guess == pytest.approx(1.5 ** 2)
    assert sol.value >= 0.5 * 5 and sol.cost <= 1.5 * 17 * 2


def test_single_element():
    sol = single_max(KcsmInstance(CostedUniverse([1.0]), ModularOracle([3.0]), 1), 0.5, EXACT)
    assert sol.elements == [0] and sol.value == 3


def test_budget_below_every_cost():
    sol = single_max(KcsmInstance(fixture_universe(), fixture_oracle(), 0.5), 0.5, EXACT)
    assert sol.elements == [] and sol.value == 0


def test_empty_universe_and_validation():
    sol = single_max(KcsmInstance(CostedUniverse(np.ones(0)), ModularOracle(np.zeros(0)), 1), 0.5, EXACT)
    assert sol.elements == []
    with pytest.raises(InputError):
        KcsmInstance(fixture_universe(), fixture_oracle(), -1)
    with pytest.raises(InputError):
        single_max(KcsmInstance(fixture_universe(), fixture_oracle(), 1), 1.5, EXACT)


@pytest.mark.parametrize("seed", range(40))
def test_density_tracks_running_max(seed):
    inst, _ = kcsm_instance(seed)
    sol = single_max(inst, 0.5, EXACT)
    best = None
    for u, m in zip(inst.universe.order, sol.notes["density"]):
        w, fu = inst.universe.costs[u], inst.oracle([int(u)])
        if w <= inst.kappa and fu > 0:
            best = fu / w if best is None else max(best, fu / w)
        assert m == best


@pytest.mark.parametrize("seed", range(40))
def test_window_contains_optimum_grid_point(seed):
    inst, _ = kcsm_instance(seed)
    opt = exact_kcsm_opt(inst).value
    if opt <= 0:
        return
    for eps in (0.2, 0.5):
        sol = single_max(inst, eps, EXACT)
        q = floor_exp(opt, 1 + eps)
        assert q in sol.notes["buffers"]


@pytest.mark.parametrize("seed", range(40))
def test_queries_within_bound(seed):
    inst, _ = kcsm_instance(seed)
    for name in ("exact", "dg"):
        usm = make_usm(name, reps=3)
        for eps in (0.2, 0.5):
            sol = single_max(inst, eps, usm)
            rep = theorem_bounds("singlemax", InstanceStats(inst.universe.n, inst.universe.w_min), eps, usm,
                                 inst.kappa)
            assert sol.metrics.queries <= rep.queries
            assert sol.metrics.peak_stored_cost <= rep.peak_stored + 1e-9
            assert len(sol.metrics.guesses) <= rep.instances
