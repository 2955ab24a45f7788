"""Dataset loaders and seeded synthetic instances.

File formats (UTF-8, LF or CRLF):

* SNAP edge list: one whitespace-separated ``u v`` pair per line, ``#``
  starts a comment line.  Vertices are numbered in order of first
  appearance; a vertex seen only in a self-loop is kept as an isolated
  vertex.  Both directions of an edge collapse to one undirected edge.
* tagged corpus: ``item<TAB>tags`` or ``item<TAB>cost<TAB>tags`` where
  ``tags`` is comma separated.
* cost file: ``element-id<TAB>cost`` per line, ids matching the labels of
  the loaded dataset.

Synthetic generators use numpy's PCG64 (``np.random.default_rng(seed)``),
which produces the same stream on every platform.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DatasetError, InputError
from .objectives import (
    CostedUniverse, CoverageOracle, CutGraph, DiverseSummaryOracle, GraphCutOracle,
    ModularOracle, TaggedCorpus,
)

COST_MODES = ("uniform", "column", "file")
SYNTH_KINDS = ("er_graph", "coverage", "modular", "tagged")


@dataclass
class Dataset:
    """A resolved instance: the objective, the costed universe and its source."""

    name: str
    oracle: object
    universe: CostedUniverse
    graph: CutGraph = None
    corpus: TaggedCorpus = None
    stats: dict = field(default_factory=dict)


def _read_lines(path):
    try:
        with open(path, "r", encoding="utf-8", newline=None) as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise DatasetError(f"cannot read file: {exc.strerror}", path) from exc
    except UnicodeDecodeError as exc:
        raise DatasetError("file is not valid UTF-8", path) from exc


def _parse_cost(token, path, lineno):
    try:
        w = float(token)
    except ValueError:
        raise DatasetError(f"cost {token!r} is not a number", path, lineno) from None
    if not np.isfinite(w) or w <= 0:
        raise DatasetError(f"cost must be finite and > 0, got {token!r}", path, lineno)
    return w


def load_cost_file(path, labels):
    """Costs for ``labels`` (in order) from an ``id<TAB>cost`` file."""
    index = {lab: i for i, lab in enumerate(labels)}
    costs = np.full(len(labels), np.nan)
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise DatasetError("expected 'element-id<TAB>cost'", path, lineno)
        key = parts[0].strip()
        if key not in index:
            raise DatasetError(f"unknown element id {key!r}", path, lineno)
        if not np.isnan(costs[index[key]]):
            raise DatasetError(f"duplicate cost for {key!r}", path, lineno)
        costs[index[key]] = _parse_cost(parts[1].strip(), path, lineno)
    missing = [labels[i] for i in np.flatnonzero(np.isnan(costs))]
    if missing:
        raise DatasetError(f"no cost given for {len(missing)} element(s), first {missing[0]!r}", path)
    return costs


def _resolve_costs(labels, cost_mode, cost_file, column_costs=None):
    if cost_mode not in COST_MODES:
        raise InputError(f"cost mode must be one of {COST_MODES}")
    if cost_mode == "file":
        if cost_file is None:
            raise InputError("cost mode 'file' needs a cost file")
        costs = load_cost_file(cost_file, labels)
    elif cost_mode == "column":
        if column_costs is None:
            raise InputError("this format has no cost column")
        costs = np.asarray(column_costs, dtype=np.float64)
    else:
        costs = np.ones(len(labels))
    return CostedUniverse(costs, labels=tuple(labels))


# ---------------------------------------------------------------------------
# SNAP edge lists


def parse_snap_lines(lines, path=None):
    """Return (labels, pairs, self_loops, duplicates) from edge-list lines."""
    ids = {}
    pairs = []
    seen = set()
    self_loops = duplicates = 0
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) != 2:
            raise DatasetError(f"expected 'u v', got {text!r}", path, lineno)
        u = ids.setdefault(parts[0], len(ids))
        v = ids.setdefault(parts[1], len(ids))
        if u == v:
            self_loops += 1
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        pairs.append(key)
    return list(ids), pairs, self_loops, duplicates


def read_snap_graph(path, cost_mode="uniform", cost_file=None):
    """Like :func:`load_snap_graph` plus a dict of dropped-line counters."""
    labels, pairs, loops, dups = parse_snap_lines(_read_lines(path), path)
    if not pairs:
        raise DatasetError("graph has no edges", path)
    graph = CutGraph.from_edges(len(labels), pairs, labels=tuple(labels))
    universe = _resolve_costs(labels, cost_mode, cost_file)
    return graph, universe, {"self_loops": loops, "duplicates": dups}


def load_snap_graph(path, cost_mode="uniform", cost_file=None):
    """Parse a SNAP edge list into ``(CutGraph, CostedUniverse)``.

    The graph's ``labels`` hold the original vertex tokens.
    """
    graph, universe, _ = read_snap_graph(path, cost_mode, cost_file)
    return graph, universe


def write_snap_graph(graph, path):
    """Write ``graph`` in canonical form; isolated vertices appear as self-loops."""
    labels = graph.labels or tuple(str(i) for i in range(graph.n))
    touched = np.zeros(graph.n, dtype=bool)
    touched[graph.edges.ravel()] = True
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# vertices {graph.n} edges {graph.m}\n")
        for u, v in graph.edges:
            fh.write(f"{labels[u]} {labels[v]}\n")
        for u in np.flatnonzero(~touched):
            fh.write(f"{labels[u]} {labels[u]}\n")


def edge_label_set(graph):
    """Edges as a set of unordered label pairs (for round-trip comparison)."""
    labels = graph.labels or tuple(str(i) for i in range(graph.n))
    return {frozenset((labels[u], labels[v])) for u, v in graph.edges}


# ---------------------------------------------------------------------------
# tagged corpora


def load_tagged_corpus(path, cost_mode="uniform", cost_file=None, gamma_div=None,
                       similarity="jaccard"):
    """Parse a tagged-corpus TSV into ``(TaggedCorpus, CostedUniverse)``."""
    items, rows, column = [], [], []
    seen = set()
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) == 2:
            item, cost_tok, tag_tok = parts[0], None, parts[1]
        elif len(parts) == 3:
            item, cost_tok, tag_tok = parts
        else:
            raise DatasetError("expected 'item<TAB>[cost<TAB>]tags'", path, lineno)
        item = item.strip()
        if not item:
            raise DatasetError("empty item id", path, lineno)
        if item in seen:
            raise DatasetError(f"duplicate item id {item!r}", path, lineno)
        seen.add(item)
        tags = list(dict.fromkeys(t.strip() for t in tag_tok.split(",") if t.strip()))
        if not tags:
            raise DatasetError(f"item {item!r} has no tags", path, lineno)
        if cost_mode == "column":
            if cost_tok is None:
                raise DatasetError("cost column missing", path, lineno)
            column.append(_parse_cost(cost_tok.strip(), path, lineno))
        items.append(item)
        rows.append(tags)
    if not items:
        raise DatasetError("corpus has no items", path)
    corpus = TaggedCorpus.from_tag_lists(rows, gamma_div, similarity, labels=tuple(items))
    universe = _resolve_costs(items, cost_mode, cost_file, column if cost_mode == "column" else None)
    return corpus, universe


# ---------------------------------------------------------------------------
# synthetic instances


def _synth_costs(rng, n, mode):
    if mode == "uniform":
        return np.ones(n)
    if mode == "random":
        return np.round(rng.uniform(0.5, 3.0, size=n), 3)
    raise InputError(f"unknown synthetic cost mode {mode!r}")


def synth_instance(kind, n, seed=0, **params):
    """Seeded instance of ``kind``; returns a :class:`Dataset`.

    er_graph: ``p`` edge probability (default 0.5), graph cut objective.
    coverage: ``tags`` vocabulary size, ``k`` max tags per item, random tag weights.
    modular: values ``n, n-1, ..., 1`` (so ``n=3`` is the ``{3, 2, 1}`` fixture).
    tagged: diverse-summary objective over random tag sets.
    ``costs`` is ``uniform`` (default) or ``random``.
    """
    if kind not in SYNTH_KINDS:
        raise InputError(f"synthetic kind must be one of {SYNTH_KINDS}")
    n = int(n)
    if n < 1:
        raise InputError("n must be >= 1")
    rng = np.random.default_rng(int(seed))
    cost_mode = params.pop("costs", "uniform")
    name = f"synth:{kind}:n={n},seed={seed}"
    graph = corpus = None
    if kind == "er_graph":
        p = float(params.pop("p", 0.5))
        if not 0 <= p <= 1:
            raise InputError("p must lie in [0, 1]")
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(iu.size) < p
        graph = CutGraph(n, np.stack([iu[keep], ju[keep]], axis=1), np.ones(int(keep.sum())))
        oracle = GraphCutOracle(graph)
    elif kind == "modular":
        oracle = ModularOracle(np.arange(n, 0, -1, dtype=np.float64))
    else:
        n_tags = int(params.pop("tags", max(4, n)))
        k = int(params.pop("k", 3))
        if n_tags < 1 or k < 1:
            raise InputError("tags and k must be >= 1")
        rows = []
        for _ in range(n):
            size = int(rng.integers(1, min(k, n_tags) + 1))
            rows.append(sorted(int(t) for t in rng.choice(n_tags, size=size, replace=False)))
        if kind == "coverage":
            weights = np.round(rng.uniform(0.5, 2.0, size=n_tags), 3)
            oracle = CoverageOracle(rows, weights, n_tags)
        else:
            gamma = params.pop("gamma", None)
            corpus = TaggedCorpus.from_tag_lists([[str(t) for t in r] for r in rows],
                                                 None if gamma is None else float(gamma))
            oracle = DiverseSummaryOracle(corpus)
    if params:
        raise InputError(f"unknown parameter(s) for {kind}: {sorted(params)}")
    universe = CostedUniverse(_synth_costs(rng, n, cost_mode))
    return Dataset(name, oracle, universe, graph=graph, corpus=corpus)


# ---------------------------------------------------------------------------
# dataset strings used by the command line


def _parse_params(text):
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise InputError(f"expected key=value, got {item!r}")
        key, val = item.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def resolve_dataset(spec, cost_file=None, cost_column=False, seed=0):
    """Resolve ``snap:PATH``, ``tagged:PATH`` or ``synth:KIND[:k=v,...]``."""
    kind, _, rest = spec.partition(":")
    if not rest and kind not in ("synth",):
        raise InputError(f"dataset must look like 'snap:PATH', 'tagged:PATH' or 'synth:KIND', got {spec!r}")
    mode = "file" if cost_file else ("column" if cost_column else "uniform")
    if kind == "snap":
        graph, universe, stats = read_snap_graph(rest, "file" if cost_file else "uniform", cost_file)
        return Dataset(spec, GraphCutOracle(graph), universe, graph=graph, stats=stats)
    if kind == "tagged":
        corpus, universe = load_tagged_corpus(rest, mode, cost_file)
        return Dataset(spec, DiverseSummaryOracle(corpus), universe, corpus=corpus)
    if kind == "synth":
        sub, _, ptext = rest.partition(":")
        params = _parse_params(ptext)
        n = params.pop("n", None)
        if n is None:
            raise InputError("synthetic datasets need n=...")
        s = params.pop("seed", seed)
        for key in ("p", "gamma"):
            if key in params:
                params[key] = float(params[key])
        try:
            ds = synth_instance(sub, int(n), int(s), **params)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        ds.name = spec
        if cost_file:
            labels = [str(i) for i in range(ds.universe.n)]
            ds.universe = CostedUniverse(load_cost_file(cost_file, labels), labels=tuple(labels))
        return ds
    raise InputError(f"unknown dataset kind {kind!r}")
