"""Value oracles, costed universes, and the shipped submodular objectives.

Elements are integer ids ``0..n-1``.  Loaders and ``make_modular`` keep the
original labels alongside so results can be reported by name.

An oracle is anything with an ``n`` attribute and an ``evaluate(subset)``
method; subclass :class:`SubmodularOracle` to get id validation for free.
"""
import threading
import warnings
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .errors import ClampWarning, InputError

SIMILARITY_MODES = ("jaccard", "literal")


def as_members(subset, n):
    """Convert ``subset`` to an int64 array of ids, checking the range."""
    if isinstance(subset, np.ndarray):
        arr = subset.astype(np.int64, copy=False)
    elif isinstance(subset, (set, frozenset)):
        arr = np.fromiter(subset, dtype=np.int64, count=len(subset))
    else:
        arr = np.asarray(list(subset), dtype=np.int64)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        bad = arr[(arr < 0) | (arr >= n)][0]
        raise InputError(f"unknown element id {int(bad)} (ground set has {n} elements)")
    return arr


class SubmodularOracle:
    """Value oracle for a set function ``f: 2^U -> R>=0`` over ids ``0..n-1``."""

    n = 0
    labels = None

    def evaluate(self, subset):
        return self._value(as_members(subset, self.n))

    def __call__(self, subset):
        return self.evaluate(subset)

    def _value(self, members):
        raise NotImplementedError


class SetFunctionOracle(SubmodularOracle):
    """Wrap a Python callable taking a ``frozenset`` of ids."""

    def __init__(self, fn, n, labels=None):
        self.fn = fn
        self.n = int(n)
        self.labels = labels

    def _value(self, members):
        return float(self.fn(frozenset(int(m) for m in members)))


class ModularOracle(SubmodularOracle):
    def __init__(self, values, labels=None):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 1:
            raise InputError("modular values must be one-dimensional")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise InputError("modular values must be finite and nonnegative")
        self.values = values
        self.n = values.size
        self.labels = labels

    def _value(self, members):
        if members.size == 0:
            return 0.0
        return float(self.values[np.unique(members)].sum())


def make_modular(values):
    """Modular oracle ``f(X) = sum of values[x]``.

    ``values`` is a sequence (ids are positions) or a mapping (ids follow
    insertion order, keys are kept as labels).
    """
    if isinstance(values, dict):
        labels = tuple(values)
        vals = [values[k] for k in labels]
    else:
        labels = None
        vals = list(values)
    for v in vals:
        if v < 0:
            raise InputError(f"negative modular value {v}")
    return ModularOracle(vals, labels=labels)


def _csr_from_lists(rows):
    """Sorted, deduplicated CSR (indptr, indices) from a list of int lists."""
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    chunks = []
    for i, row in enumerate(rows):
        r = np.unique(np.asarray(list(row), dtype=np.int64))
        chunks.append(r)
        indptr[i + 1] = indptr[i] + r.size
    indices = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    return indptr, indices.astype(np.int64)


class CoverageOracle(SubmodularOracle):
    """Weighted coverage: total weight of tags covered by the chosen items."""

    def __init__(self, tag_lists, tag_weights=None, n_tags=None, labels=None):
        self.indptr, self.tags = _csr_from_lists(tag_lists)
        self.n = len(tag_lists)
        if n_tags is None:
            n_tags = int(self.tags.max()) + 1 if self.tags.size else 0
        self.n_tags = int(n_tags)
        if tag_weights is None:
            tag_weights = np.ones(self.n_tags)
        self.tag_weights = np.asarray(tag_weights, dtype=np.float64)
        if self.tag_weights.size != self.n_tags or np.any(self.tag_weights < 0):
            raise InputError("tag weights must be nonnegative, one per tag")
        self.labels = labels

    def _value(self, members):
        if members.size == 0:
            return 0.0
        return float(_kernels.coverage_value(self.indptr, self.tags, self.tag_weights, members, self.n_tags))


def make_coverage(tag_lists, tag_weights=None):
    return CoverageOracle(tag_lists, tag_weights=tag_weights)


# ---------------------------------------------------------------------------
# graph cut


@dataclass(frozen=True)
class CutGraph:
    """Undirected weighted graph; ``edges`` holds each pair once with u < v."""

    n: int
    edges: np.ndarray
    weights: np.ndarray
    labels: tuple = None
    indptr: np.ndarray = field(init=False, repr=False, compare=False)
    indices: np.ndarray = field(init=False, repr=False, compare=False)
    adj_weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=np.float64).ravel()
        if weights.size != edges.shape[0]:
            raise InputError("one weight per edge required")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise InputError("edge weights must be finite and nonnegative")
        if edges.size and (edges.min() < 0 or edges.max() >= self.n):
            raise InputError("edge endpoint outside 0..n-1")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise InputError("self-loops are not allowed")
        if np.any(edges[:, 0] > edges[:, 1]):
            raise InputError("edges must be canonical (u < v)")
        keys = edges[:, 0] * max(self.n, 1) + edges[:, 1]
        if np.unique(keys).size != keys.size:
            raise InputError("duplicate undirected edge")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        w = np.concatenate([weights, weights])
        order = np.lexsort((dst, src))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", dst[order].astype(np.int64))
        object.__setattr__(self, "adj_weights", w[order])

    @classmethod
    def from_edges(cls, n, pairs, weights=None, labels=None):
        """Canonicalize arbitrary (u, v) pairs: drop self-loops, merge duplicates.

        Duplicate pairs keep the first weight seen.
        """
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if weights is None:
            weights = np.ones(pairs.shape[0])
        weights = np.asarray(weights, dtype=np.float64)
        keep = pairs[:, 0] != pairs[:, 1]
        pairs, weights = pairs[keep], weights[keep]
        canon = np.sort(pairs, axis=1)
        keys = canon[:, 0] * max(int(n), 1) + canon[:, 1]
        _, first = np.unique(keys, return_index=True)
        first.sort()
        return cls(int(n), canon[first], weights[first], labels)

    @property
    def m(self):
        return int(self.edges.shape[0])


def graph_cut_value(graph, subset):
    """Total weight of edges with exactly one endpoint in ``subset``."""
    members = as_members(subset, graph.n)
    if members.size == 0:
        return 0.0
    return float(_kernels.cut_value(graph.indptr, graph.indices, graph.adj_weights, members, graph.n))


class GraphCutOracle(SubmodularOracle):
    def __init__(self, graph):
        self.graph = graph
        self.n = graph.n
        self.labels = graph.labels

    def _value(self, members):
        if members.size == 0:
            return 0.0
        g = self.graph
        return float(_kernels.cut_value(g.indptr, g.indices, g.adj_weights, members, g.n))


# ---------------------------------------------------------------------------
# diverse summarization of tagged data


@dataclass
class TaggedCorpus:
    """Items with nonempty tag sets, stored as sorted CSR rows."""

    indptr: np.ndarray
    tags: np.ndarray
    n_tags: int
    gamma_div: float = None
    similarity: str = "jaccard"
    labels: tuple = None
    tag_names: tuple = None

    def __post_init__(self):
        if self.similarity not in SIMILARITY_MODES:
            raise InputError(f"similarity must be one of {SIMILARITY_MODES}")
        sizes = np.diff(self.indptr)
        if np.any(sizes == 0):
            raise InputError(f"item {int(np.flatnonzero(sizes == 0)[0])} has no tags")
        if self.gamma_div is None:
            self.gamma_div = default_gamma_div(self)
        if not np.isfinite(self.gamma_div) or self.gamma_div < 0:
            raise InputError("gamma_div must be finite and nonnegative")
        self._unit_weights = np.ones(self.n_tags)

    @classmethod
    def from_tag_lists(cls, tag_lists, gamma_div=None, similarity="jaccard", labels=None):
        vocab = {}
        rows = []
        for row in tag_lists:
            rows.append([vocab.setdefault(t, len(vocab)) for t in row])
        indptr, tags = _csr_from_lists(rows)
        names = tuple(vocab)
        return cls(indptr, tags, len(vocab), gamma_div, similarity, labels, names)

    @property
    def n(self):
        return self.indptr.size - 1

    def tag_set(self, item):
        return self.tags[self.indptr[item]:self.indptr[item + 1]]


def _incidence(corpus):
    data = np.ones(corpus.tags.size, dtype=np.float64)
    return sp.csr_matrix((data, corpus.tags, corpus.indptr), shape=(corpus.n, corpus.n_tags))


def total_pair_similarity(corpus, block=2048):
    """Sum of sim(x, y) over all ordered pairs x != y of the corpus."""
    inc = _incidence(corpus)
    sizes = np.diff(corpus.indptr).astype(np.float64)
    literal = corpus.similarity == "literal"
    total = 0.0
    for lo in range(0, corpus.n, block):
        hi = min(lo + block, corpus.n)
        prod = (inc[lo:hi] @ inc.T).tocoo()
        rows = prod.row + lo
        off = rows != prod.col
        r, c, inter = rows[off], prod.col[off], prod.data[off]
        union = sizes[r] + sizes[c] - inter
        total += float(np.sum(union / inter if literal else inter / union))
    return total


def default_gamma_div(corpus):
    """|tags covered by the whole corpus| / total pairwise similarity (0 if none)."""
    covered = np.unique(corpus.tags).size
    denom = total_pair_similarity(corpus)
    if denom == 0:
        return 0.0
    return covered / denom


def _diverse_raw(corpus, members):
    cover = _kernels.coverage_value(corpus.indptr, corpus.tags, corpus._unit_weights, members, corpus.n_tags)
    if corpus.gamma_div == 0 or members.size < 2:
        return float(cover)
    pen = _kernels.pair_similarity_sum(
        corpus.indptr, corpus.tags, members, corpus.n_tags, corpus.similarity == "literal"
    )
    return float(cover) - corpus.gamma_div * float(pen)


def diverse_summary_value(corpus, subset):
    """Tags covered minus ``gamma_div`` times pairwise similarity, clamped at 0.

    Clamping issues a :class:`ClampWarning`.
    """
    members = as_members(subset, corpus.n)
    if members.size == 0:
        return 0.0
    raw = _diverse_raw(corpus, members)
    if raw < 0:
        warnings.warn(f"diverse summary value {raw:.6g} clamped to 0", ClampWarning, stacklevel=2)
        return 0.0
    return raw


class DiverseSummaryOracle(SubmodularOracle):
    def __init__(self, corpus):
        self.corpus = corpus
        self.n = corpus.n
        self.labels = corpus.labels
        self.clamp_count = 0

    @property
    def clamped(self):
        return self.clamp_count > 0

    def _value(self, members):
        if members.size == 0:
            return 0.0
        raw = _diverse_raw(self.corpus, members)
        if raw < 0:
            self.clamp_count += 1
            if self.clamp_count == 1:
                warnings.warn("diverse summary value clamped to 0; gamma_div may be too large",
                              ClampWarning, stacklevel=3)
            return 0.0
        return raw


# ---------------------------------------------------------------------------
# costs and instrumentation


@dataclass(frozen=True)
class CostedUniverse:
    """Element costs (indexed by id) and the stream order."""

    costs: np.ndarray
    order: np.ndarray = None
    labels: tuple = None

    def __post_init__(self):
        costs = np.asarray(self.costs, dtype=np.float64).ravel()
        if not np.all(np.isfinite(costs)) or np.any(costs <= 0):
            bad = int(np.flatnonzero(~(np.isfinite(costs) & (costs > 0)))[0])
            raise InputError(f"cost of element {bad} must be finite and > 0, got {costs[bad]}")
        order = np.arange(costs.size, dtype=np.int64) if self.order is None else (
            np.asarray(self.order, dtype=np.int64).ravel())
        if order.size and (order.min() < 0 or order.max() >= costs.size):
            raise InputError("stream order references an unknown element")
        if np.unique(order).size != order.size:
            raise InputError("stream order repeats an element")
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "order", order)

    @classmethod
    def uniform(cls, n, labels=None):
        return cls(np.ones(int(n)), labels=labels)

    def with_order(self, order):
        return CostedUniverse(self.costs, order, self.labels)

    @property
    def n(self):
        return int(self.order.size)

    @property
    def w_min(self):
        return float(self.costs[self.order].min())

    @property
    def w_max(self):
        return float(self.costs[self.order].max())

    @property
    def total(self):
        return float(self.costs[self.order].sum())

    def weight(self, subset):
        members = as_members(subset, self.costs.size)
        if members.size == 0:
            return 0.0
        return float(self.costs[np.unique(members)].sum())


class InstrumentedOracle(SubmodularOracle):
    """Counts every ``evaluate`` call; values pass through untouched.

    ``phase(name)`` attributes the queries made inside a ``with`` block to
    ``name`` in :attr:`phase_counts`.
    """

    def __init__(self, inner):
        self.inner = inner
        self.n = inner.n
        self.labels = getattr(inner, "labels", None)
        self._lock = threading.Lock()
        self._count = 0
        self._phase = threading.local()
        self.phase_counts = defaultdict(int)

    @property
    def queries(self):
        return self._count

    def reset(self):
        with self._lock:
            self._count = 0
            self.phase_counts.clear()

    @contextmanager
    def phase(self, name):
        prev = getattr(self._phase, "name", None)
        self._phase.name = name
        try:
            yield self
        finally:
            self._phase.name = prev

    def evaluate(self, subset):
        value = self.inner.evaluate(subset)
        name = getattr(self._phase, "name", None)
        with self._lock:
            self._count += 1
            if name is not None:
                self.phase_counts[name] += 1
        return value


def instrument(oracle):
    """Return ``oracle`` if already instrumented, else wrap it."""
    return oracle if isinstance(oracle, InstrumentedOracle) else InstrumentedOracle(oracle)


def marginal_gain(oracle, subset, x):
    """``f(X + x) - f(X)``; always two oracle queries."""
    base = list(subset) if not isinstance(subset, np.ndarray) else subset.tolist()
    with_x = base if x in base else base + [x]
    return oracle.evaluate(with_x) - oracle.evaluate(base)
