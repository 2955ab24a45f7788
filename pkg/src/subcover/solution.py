"""Result and resource-accounting records shared by every algorithm."""
from dataclasses import dataclass, field


@dataclass
class RunMetrics:
    """Resources used by one run.

    ``queries`` counts oracle calls actually made.  ``marginal_evals`` counts
    buffer marginal-gain tests; each was answered with one query against a
    cached buffer value, so the uncached pseudocode would have made
    ``raw_queries = queries + marginal_evals``.
    """

    queries: int = 0
    passes: int = 0
    peak_stored_cost: float = 0.0
    marginal_evals: int = 0
    usm_calls: int = 0
    guesses: list = field(default_factory=list)
    per_element_queries: list = field(default_factory=list)
    stored_trajectory: list = field(default_factory=list)
    wall_time: float = 0.0
    terminated_early: bool = False

    @property
    def raw_queries(self):
        return self.queries + self.marginal_evals

    def observe_stored(self, stored):
        if stored > self.peak_stored_cost:
            self.peak_stored_cost = stored


@dataclass
class BicriteriaSolution:
    elements: list
    value: float
    cost: float
    feasible: bool
    metrics: RunMetrics = field(default_factory=RunMetrics)
    guess: float = None
    notes: dict = field(default_factory=dict)

    def as_set(self):
        return frozenset(self.elements)

    def named(self, labels):
        """Element labels in ``elements`` order."""
        if labels is None:
            return list(self.elements)
        return [labels[e] for e in self.elements]
