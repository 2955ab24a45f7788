import threading
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subcover.errors import ClampWarning, InputError
from subcover.exact import check_best_part_bound, disjoint_average
from subcover.objectives import (
    CostedUniverse, CoverageOracle, CutGraph, DiverseSummaryOracle, GraphCutOracle,
    InstrumentedOracle, TaggedCorpus, default_gamma_div, diverse_summary_value,
    graph_cut_value, make_modular, marginal_gain,
)

from instances import random_oracle


# ---------------------------------------------------------------------------
# independent reference evaluations (pure Python, no kernels)


def cut_by_edges(graph, X):
    X = set(X)
    return sum(w for (u, v), w in zip(graph.edges.tolist(), graph.weights) if (u in X) != (v in X))


def coverage_by_sets(tag_lists, weights, X):
    covered = set()
    for x in set(X):
        covered |= set(tag_lists[x])
    return sum(weights[t] for t in covered)


def diverse_by_formula(tag_sets, gamma, X, literal=False):
    X = sorted(set(X))
    covered = set().union(*(tag_sets[x] for x in X)) if X else set()
    pen = 0.0
    for x in X:
        for y in X:
            if x == y:
                continue
            inter = len(tag_sets[x] & tag_sets[y])
            union = len(tag_sets[x] | tag_sets[y])
            if literal:
                pen += union / inter if inter else 0.0
            else:
                pen += inter / union
    return max(0.0, len(covered) - gamma * pen)


# ---------------------------------------------------------------------------
# examples


def test_modular_examples():
    f = make_modular({"a": 3, "b": 2, "c": 1})
    assert f.labels == ("a", "b", "c")
    assert f([0, 2]) == 4
    assert f([]) == 0
    assert f([0, 1, 2]) == 6


def test_modular_rejects_negative():
    with pytest.raises(InputError):
        make_modular([1, -2])


def test_marginal_gain_examples():
    f = make_modular({"a": 3, "b": 2, "c": 1})
    assert marginal_gain(f, [], 1) == f([1]) - f([])
    assert marginal_gain(f, [0, 1], 1) == 0
    assert marginal_gain(f, [1], 0) == 3


def test_cut_examples():
    tri = CutGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert graph_cut_value(tri, []) == 0
    assert graph_cut_value(tri, [1]) == 2
    assert GraphCutOracle(tri)([0, 1, 2]) == 0


@pytest.mark.parametrize("trial", range(10))
def test_cut_matches_edge_scan(trial):
    rng = np.random.default_rng(7)
    iu, ju = np.triu_indices(8, k=1)
    keep = rng.random(iu.size) < 0.5
    g = CutGraph(8, np.stack([iu[keep], ju[keep]], 1), np.ones(int(keep.sum())))
    X = np.flatnonzero(np.random.default_rng(trial).random(8) < 0.5)
    assert graph_cut_value(g, X) == pytest.approx(cut_by_edges(g, X))


def test_cut_graph_canonicalizes():
    g = CutGraph.from_edges(4, [(1, 0), (0, 1), (2, 2), (3, 1)])
    assert g.edges.tolist() == [[0, 1], [1, 3]]
    with pytest.raises(InputError):
        CutGraph(3, [[1, 0]], [1.0])
    with pytest.raises(InputError):
        CutGraph(3, [[0, 1], [0, 1]], [1.0, 1.0])


def test_diverse_examples():
    same = TaggedCorpus.from_tag_lists([["x", "y", "z"], ["x", "y", "z"]], gamma_div=1.0)
    assert diverse_summary_value(same, []) == 0
    assert diverse_summary_value(same, [0]) == 3
    with pytest.warns(ClampWarning):
        # 3 - 2 * 1 = 1 with the ordered pair convention; larger gamma clamps
        assert diverse_summary_value(same, [0, 1]) == 1
        clamp = TaggedCorpus.from_tag_lists([["x", "y", "z"], ["x", "y", "z"]], gamma_div=5.0)
        assert diverse_summary_value(clamp, [0, 1]) == 0


def test_default_gamma_examples():
    k, m = 4, 5
    shared = TaggedCorpus.from_tag_lists([[str(t) for t in range(k)]] * m)
    assert shared.gamma_div == pytest.approx(k / (m * (m - 1)))
    disjoint = TaggedCorpus.from_tag_lists([["a"], ["b"], ["c"]])
    assert disjoint.gamma_div == 0
    two = TaggedCorpus.from_tag_lists([["1", "2"], ["2", "3"]])
    assert default_gamma_div(two) == pytest.approx(4.5)


def test_literal_similarity_mode():
    corpus = TaggedCorpus.from_tag_lists([["1", "2"], ["2", "3"], ["9"]], gamma_div=0.1,
                                         similarity="literal")
    sets = [{"1", "2"}, {"2", "3"}, {"9"}]
    for X in ([0, 1], [0, 1, 2], [0, 2]):
        assert diverse_summary_value(corpus, X) == pytest.approx(diverse_by_formula(sets, 0.1, X, True))


def test_tagged_corpus_rejects_empty_row():
    with pytest.raises(InputError):
        TaggedCorpus(np.array([0, 1, 1]), np.array([0]), 1)


@pytest.mark.parametrize("seed", range(10))
def test_coverage_and_diverse_match_reference(seed):
    rng = np.random.default_rng(seed)
    n, n_tags = 9, 7
    rows = [sorted(set(rng.integers(0, n_tags, size=3).tolist())) for _ in range(n)]
    w = rng.uniform(0, 2, size=n_tags)
    cov = CoverageOracle(rows, w, n_tags)
    corpus = TaggedCorpus.from_tag_lists([[str(t) for t in r] for r in rows])
    div = DiverseSummaryOracle(corpus)
    sets = [{str(t) for t in r} for r in rows]
    for _ in range(20):
        X = np.flatnonzero(rng.random(n) < 0.5)
        assert cov(X) == pytest.approx(coverage_by_sets(rows, w, X))
        assert div(X) == pytest.approx(diverse_by_formula(sets, corpus.gamma_div, X))


# ---------------------------------------------------------------------------
# properties


def submodularity_violations(oracle, n, rng, trials):
    bad = 0
    for _ in range(trials):
        B = rng.random(n) < 0.5
        A = B & (rng.random(n) < 0.5)
        outside = np.flatnonzero(~B)
        if outside.size == 0:
            continue
        x = int(rng.choice(outside))
        a, b = np.flatnonzero(A).tolist(), np.flatnonzero(B).tolist()
        if marginal_gain(oracle, a, x) < marginal_gain(oracle, b, x) - 1e-9:
            bad += 1
    return bad


@pytest.mark.parametrize("kind", ["modular", "coverage", "cut", "diverse"])
def test_submodularity_1000_triples(kind):
    rng = np.random.default_rng(hash(kind) % 2**32)
    bad = 0
    for rep in range(10):
        n = int(rng.integers(4, 13))
        oracle = random_oracle(rng, kind, n)
        bad += submodularity_violations(oracle, n, rng, 100)
    assert bad == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 14), st.integers(0, 2**32 - 1))
def test_cut_symmetry(n, seed):
    rng = np.random.default_rng(seed)
    g = GraphCutOracle(random_oracle(rng, "cut", n).graph)
    X = np.flatnonzero(rng.random(n) < 0.5)
    comp = np.setdiff1d(np.arange(n), X)
    assert g(X) == pytest.approx(g(comp), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["modular", "coverage", "cut", "diverse"]), st.integers(1, 12),
       st.integers(0, 2**32 - 1))
def test_nonnegative_and_deterministic(kind, n, seed):
    rng = np.random.default_rng(seed)
    oracle = random_oracle(rng, kind, max(n, 3))
    X = np.flatnonzero(rng.random(oracle.n) < 0.5)
    assert oracle([]) >= 0
    v = oracle(X)
    assert v >= 0
    assert oracle(X) == v


def test_unknown_element_rejected():
    f = make_modular([1, 2])
    with pytest.raises(InputError):
        f([2])


def test_costed_universe_validation():
    with pytest.raises(InputError):
        CostedUniverse([1.0, 0.0])
    with pytest.raises(InputError):
        CostedUniverse([1.0, 2.0], order=[0, 0])
    U = CostedUniverse([2.0, 0.5, 1.5], order=[2, 0, 1])
    assert (U.w_min, U.w_max, U.total) == (0.5, 2.0, 4.0)
    assert U.weight([0, 2]) == 3.5


def test_instrumentation_counts_and_phases():
    f = InstrumentedOracle(make_modular([1, 2, 3]))
    f([0])
    with f.phase("p"):
        f([1])
        f([])
    assert f.queries == 3
    assert f.phase_counts["p"] == 2
    marginal_gain(f, [0], 1)
    assert f.queries == 5
    f.reset()
    assert f.queries == 0


def test_instrumentation_is_thread_safe():
    f = InstrumentedOracle(make_modular(np.ones(5)))

    def work():
        for _ in range(500):
            f([0, 1])

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert f.queries == 4000


# ---------------------------------------------------------------------------
# averaging facts


def random_parts(rng, n, m):
    labels = rng.integers(-1, m, size=n)  # -1: in no part
    return [np.flatnonzero(labels == i).tolist() for i in range(m)], labels


def test_best_part_bound_500_draws():
    rng = np.random.default_rng(1234)
    bad = 0
    for trial in range(500):
        kind = ("modular", "coverage", "cut", "diverse")[trial % 4]
        n = int(rng.integers(3, 11))
        oracle = random_oracle(rng, kind, n)
        m = int(rng.integers(1, 5))
        parts, labels = random_parts(rng, n, m)
        rest = np.flatnonzero(labels == -1)
        B = rest[rng.random(rest.size) < 0.5].tolist()
        if not check_best_part_bound(oracle, parts, B, tol=1e-9):
            bad += 1
    assert bad == 0


def test_best_part_bound_examples():
    f = make_modular([3, 2, 1])
    assert check_best_part_bound(f, [[0], [1]], [])
    assert check_best_part_bound(f, [[]], [2])
    with pytest.raises(InputError):
        check_best_part_bound(f, [[0], [0, 1]], [])


def test_best_part_bound_coverage_partition():
    rng = np.random.default_rng(10)
    oracle = random_oracle(rng, "coverage", 10)
    parts, _ = random_parts(rng, 10, 4)
    assert check_best_part_bound(oracle, parts, [])


def test_disjoint_averaging_bound():
    rng = np.random.default_rng(99)
    bad = 0
    for trial in range(300):
        kind = ("modular", "coverage", "cut", "diverse")[trial % 4]
        n = int(rng.integers(3, 11))
        oracle = random_oracle(rng, kind, n)
        m = int(rng.integers(1, 6))
        parts, labels = random_parts(rng, n, m)
        rest = np.flatnonzero(labels == -1)
        B = rest[rng.random(rest.size) < 0.5].tolist()
        mean, bound = disjoint_average(oracle, parts, B)
        if mean < bound - 1e-9:
            bad += 1
    assert bad == 0
