"""Experiment cells: baseline double greedy, then one CSV row per (algorithm, eps, tau).

Values are normalized by the baseline: ``f_norm = f / f0``,
``cost_norm = cost / c0``, ``queries_norm = queries / q0`` and
``peak_stored_norm = peak_stored_cost / n``.  The divisors are written
alongside so the raw numbers can always be recovered.  Cells that do not
apply (e.g. ``tau`` for the knapsack driver, a bound that needs
``xi < inf``) are left empty; every other numeric cell is a finite real.
"""
import csv
import io
import math
import time
from dataclasses import dataclass, field

from .bounds import instance_stats, theorem_bounds
from .cover import CoverInstance, multi, single
from .errors import ConfigError
from .ingest import resolve_dataset
from .kcsm import KcsmInstance, single_max
from .objectives import instrument
from .usm import USM_NAMES, make_usm, repeated_double_greedy

ALGORITHMS = ("multi", "single", "singlemax", "dg-baseline")
DEFAULT_USM = {"multi": "dg", "single": "rs", "singlemax": "dg", "dg-baseline": "dg"}

COLUMNS = (
    "dataset", "algorithm", "usm", "epsilon", "tau_abs", "tau_norm", "kappa", "upper_bound",
    "f", "f_norm", "cost", "cost_norm", "queries", "queries_norm", "passes",
    "peak_stored_cost", "peak_stored_norm", "feasible", "seed", "wall_ms",
    "n", "f0", "c0", "q0",
    "bound_value", "bound_cost", "bound_passes", "bound_peak_stored", "bound_queries",
    "note", "error",
)


@dataclass
class ExperimentConfig:
    dataset: str
    algorithms: tuple = ("multi",)
    usm: str = None
    reps: int = 50
    seed: int = 0
    epsilons: tuple = (0.5,)
    tau: tuple = ()
    tau_frac: tuple = ()
    upper_bound: float = None
    kappa: tuple = ()
    cost_file: str = None
    cost_column: bool = False
    timings: bool = False
    out: str = None
    extra: dict = field(default_factory=dict)

    def validate(self):
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {alg!r}; choose from {ALGORITHMS}")
        if self.usm is not None and self.usm not in USM_NAMES:
            raise ConfigError(f"unknown --usm {self.usm!r}; choose from {USM_NAMES}")
        if self.reps < 1:
            raise ConfigError("--reps must be >= 1")
        for eps in self.epsilons:
            if not 0 < eps < 1:
                raise ConfigError(f"epsilon {eps} outside (0, 1)")
        if self.tau and self.tau_frac:
            raise ConfigError("give either --tau or --tau-frac, not both")
        needs_tau = any(a in ("multi", "single") for a in self.algorithms)
        if needs_tau and not (self.tau or self.tau_frac):
            raise ConfigError("cover algorithms need --tau or --tau-frac (fraction of the baseline f0)")
        if any(t < 0 for t in self.tau) or any(t < 0 for t in self.tau_frac):
            raise ConfigError("tau must be >= 0")
        if "singlemax" in self.algorithms and not self.kappa:
            raise ConfigError("singlemax needs --kappa")
        if any(k <= 0 for k in self.kappa):
            raise ConfigError("kappa must be > 0")
        if self.upper_bound is not None and not self.upper_bound > 0:
            raise ConfigError("--upper-bound must be > 0")

    def usm_for(self, algorithm):
        return self.usm or DEFAULT_USM[algorithm]


@dataclass(frozen=True)
class Baseline:
    f0: float
    c0: float
    q0: int
    elements: tuple


def run_baseline(dataset, reps=50, seed=0):
    """Randomized double greedy (best of ``reps``) over the whole universe."""
    oracle = instrument(dataset.oracle)
    start = oracle.queries
    order = [int(u) for u in dataset.universe.order]
    chosen = repeated_double_greedy(oracle, order, reps, seed)
    f0 = oracle.evaluate(chosen)
    q0 = oracle.queries - start
    c0 = dataset.universe.weight(chosen)
    return Baseline(float(f0), float(c0), int(q0), tuple(chosen))


def load(config):
    return resolve_dataset(config.dataset, config.cost_file, config.cost_column, config.seed)


def resolve_taus(config, baseline):
    if config.tau:
        return list(config.tau)
    if not baseline.f0 > 0:
        raise ConfigError("--tau-frac needs a baseline value f0 > 0")
    return [frac * baseline.f0 for frac in config.tau_frac]


def _ratio(x, d):
    if x is None or d is None or not d:
        return None
    return x / d


def _opt_upper(dataset, baseline, tau):
    # the baseline set certifies OPT <= c0 whenever it reaches tau
    if baseline.f0 >= tau and baseline.elements:
        return baseline.c0
    return dataset.universe.total


def run_cell(dataset, baseline, config, algorithm, epsilon, tau=None, kappa=None):
    """One experiment cell as a dict keyed by :data:`COLUMNS`."""
    usm_name = config.usm_for(algorithm)
    row = {
        "dataset": dataset.name, "algorithm": algorithm, "usm": usm_name,
        "epsilon": epsilon, "tau_abs": tau, "tau_norm": _ratio(tau, baseline.f0),
        "kappa": kappa, "seed": config.seed, "n": dataset.universe.n,
        "f0": baseline.f0, "c0": baseline.c0, "q0": baseline.q0,
    }
    usm = make_usm(usm_name, config.reps, config.seed)
    universe = dataset.universe
    note = ""
    t0 = time.perf_counter()
    if algorithm == "multi":
        sol = multi(CoverInstance(universe, dataset.oracle, tau), epsilon, usm)
        passes = sol.metrics.passes
    elif algorithm == "single":
        B = config.upper_bound
        extra_pass = 0
        if B is None:
            B = universe.total
            extra_pass = 1
            note = "preliminary pass sets B = w(U)"
        row["upper_bound"] = B
        sol = single(CoverInstance(universe, dataset.oracle, tau), epsilon, B, usm)
        passes = sol.metrics.passes + extra_pass
    elif algorithm == "singlemax":
        sol = single_max(KcsmInstance(universe, dataset.oracle, kappa), epsilon, usm)
        passes = sol.metrics.passes
    else:
        raise ConfigError(f"algorithm {algorithm!r} has no experiment cell")
    wall = time.perf_counter() - t0
    m = sol.metrics
    row.update({
        "f": sol.value, "f_norm": _ratio(sol.value, baseline.f0),
        "cost": sol.cost, "cost_norm": _ratio(sol.cost, baseline.c0),
        "queries": m.queries, "queries_norm": _ratio(m.queries, baseline.q0),
        "passes": passes, "peak_stored_cost": m.peak_stored_cost,
        "peak_stored_norm": m.peak_stored_cost / universe.n,
        "feasible": int(bool(sol.feasible)),
        "wall_ms": round(wall * 1000, 3) if config.timings else 0,
        "note": note,
    })
    row.update(bound_columns(dataset, baseline, algorithm, epsilon, usm, tau, kappa, row.get("upper_bound")))
    return row


def bound_columns(dataset, baseline, algorithm, epsilon, usm, tau=None, kappa=None, B=None):
    """Predicted resources for the cell (empty where a bound does not apply)."""
    universe = dataset.universe
    if algorithm == "singlemax":
        stats = instance_stats(universe, dataset.oracle)
        rep = theorem_bounds("singlemax", stats, epsilon, usm, kappa)
        return {"bound_cost": rep.cost, "bound_passes": rep.pass_limit,
                "bound_peak_stored": rep.peak_stored, "bound_queries": rep.queries}
    if tau == 0:
        return {}
    opt = _opt_upper(dataset, baseline, tau)
    if algorithm == "multi":
        stats = instance_stats(universe, dataset.oracle, tau, opt)
        rep = theorem_bounds("multi", stats, epsilon, usm)
        # the driver's first pass only finds w_min
        return {"bound_value": rep.value_lb, "bound_cost": rep.cost,
                "bound_passes": rep.stream_passes + 1,
                "bound_peak_stored": rep.peak_stored, "bound_queries": rep.queries}
    stats = instance_stats(universe, dataset.oracle, tau, opt)
    if not math.isfinite(stats.xi):
        return {"bound_value": usm.gamma * (1 - epsilon) * tau}
    rep = theorem_bounds("single", stats, epsilon, usm, B)
    return {"bound_value": rep.value_lb, "bound_cost": rep.cost, "bound_passes": rep.pass_limit,
            "bound_peak_stored": rep.peak_stored, "bound_queries": rep.queries}


def cells(config, baseline):
    taus = None
    for algorithm in config.algorithms:
        if algorithm == "dg-baseline":
            yield algorithm, None, None, None
            continue
        for eps in config.epsilons:
            if algorithm == "singlemax":
                for kappa in config.kappa:
                    yield algorithm, eps, None, kappa
            else:
                if taus is None:
                    taus = resolve_taus(config, baseline)
                for tau in taus:
                    yield algorithm, eps, tau, None


def baseline_row(dataset, baseline, config):
    return {
        "dataset": dataset.name, "algorithm": "dg-baseline", "usm": "dg", "seed": config.seed,
        "n": dataset.universe.n, "f": baseline.f0, "f_norm": 1.0 if baseline.f0 else None,
        "cost": baseline.c0, "cost_norm": 1.0 if baseline.c0 else None,
        "queries": baseline.q0, "queries_norm": 1.0 if baseline.q0 else None,
        "passes": 1, "feasible": 1, "wall_ms": 0,
        "f0": baseline.f0, "c0": baseline.c0, "q0": baseline.q0,
    }


def run_experiment(config, dataset=None):
    """Run every cell; failures become rows with ``error`` set.  Returns sorted rows."""
    config.validate()
    if dataset is None:
        dataset = load(config)
    baseline = run_baseline(dataset, config.reps, config.seed)
    rows = []
    for algorithm, eps, tau, kappa in cells(config, baseline):
        if algorithm == "dg-baseline":
            rows.append(baseline_row(dataset, baseline, config))
            continue
        try:
            rows.append(run_cell(dataset, baseline, config, algorithm, eps, tau, kappa))
        except ConfigError:
            raise
        except Exception as exc:  # noqa: BLE001 - a failing cell must not stop the sweep
            rows.append({"dataset": dataset.name, "algorithm": algorithm,
                         "usm": config.usm_for(algorithm), "epsilon": eps, "tau_abs": tau,
                         "kappa": kappa, "seed": config.seed, "wall_ms": 0,
                         "error": f"{type(exc).__name__}: {exc}"})
    rows.sort(key=_sort_key)
    return rows


def _sort_key(row):
    def num(k):
        v = row.get(k)
        return -math.inf if v is None else float(v)
    return (row["algorithm"], row.get("usm") or "", num("epsilon"), num("tau_abs"), num("kappa"))


def format_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([format_cell(row.get(c)) for c in COLUMNS])
    return buf.getvalue()
