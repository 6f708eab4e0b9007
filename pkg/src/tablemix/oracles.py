"""Brute-force reference implementations, used only by tests.

Everything here trades speed for independence: exhaustive subset search
instead of component arithmetic, augmenting-path matching instead of
peeling, plain big-integer arithmetic instead of field tricks, and a
shadow set instead of table bookkeeping.  Budgets are hard caps; asking
an oracle for more is a test-configuration bug, not a runtime condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .graphs import LabeledHypergraph, components
from .hashfam import PRIME


@dataclass(frozen=True)
class OracleBudget:
    max_edges_exhaustive: int = 12
    max_edges_matching: int = 1000
    max_keys_shadow: int = 10_000


DEFAULT_BUDGET = OracleBudget()


def _check_edges(g: LabeledHypergraph, cap: int, what: str) -> None:
    if g.n > cap:
        raise ValueError(f"{what} oracle refuses graphs with more than {cap} edges")


def excess_bruteforce(g: LabeledHypergraph, budget: OracleBudget = DEFAULT_BUDGET) -> int:
    """Minimum number of removed edges leaving every component with at most
    one cycle, by exhaustive search over removal subsets."""
    if g.d != 2:
        raise ValueError("excess is defined for bipartite graphs")
    _check_edges(g, budget.max_edges_exhaustive, "excess")

    def ok(edge_indices: tuple[int, ...]) -> bool:
        sub = g.subgraph(list(edge_indices))
        summaries, _ = components(sub)
        return all(s.cyclomatic <= 1 for s in summaries)

    all_edges = range(g.n)
    for removed in range(g.n + 1):
        for keep in combinations(all_edges, g.n - removed):
            if ok(keep):
                return removed
    return g.n


def orientability_matching(g: LabeledHypergraph, budget: OracleBudget = DEFAULT_BUDGET) -> bool:
    """Is there an injective edge -> incident vertex map?  Maximum bipartite
    matching between edges and their vertices via augmenting paths."""
    _check_edges(g, budget.max_edges_matching, "orientability")
    ids = g.vertex_ids()
    owner: dict[int, int] = {}  # vertex -> matched edge
    match_of_edge: dict[int, int] = {}

    for e0 in range(g.n):
        # BFS for an augmenting alternating path starting at edge e0
        parent: dict[int, int] = {}  # vertex -> edge that reached it
        frontier = [e0]
        visited = {e0}
        free_vertex = None
        while frontier and free_vertex is None:
            nxt = []
            for e in frontier:
                for v in ids[e]:
                    v = int(v)
                    if v in parent:
                        continue
                    parent[v] = e
                    if v not in owner:
                        free_vertex = v
                        break
                    e2 = owner[v]
                    if e2 not in visited:
                        visited.add(e2)
                        nxt.append(e2)
                if free_vertex is not None:
                    break
            frontier = nxt
        if free_vertex is None:
            return False
        v = free_vertex
        while True:
            e = parent[v]
            prev = match_of_edge.get(e)
            owner[v] = e
            match_of_edge[e] = v
            if e == e0:
                break
            v = prev
    return True


def mog_exhaustive(g: LabeledHypergraph, budget: OracleBudget = DEFAULT_BUDGET) -> bool:
    """Does some sub-multiset of edges form a connected graph with two or
    more independent cycles?  Exhaustive over edge subsets."""
    if g.d != 2:
        raise ValueError("obstruction search is defined for bipartite graphs")
    _check_edges(g, budget.max_edges_exhaustive, "obstruction")
    for size in range(1, g.n + 1):
        for subset in combinations(range(g.n), size):
            sub = g.subgraph(list(subset))
            summaries, _ = components(sub)
            if len(summaries) == 1 and summaries[0].cyclomatic >= 2:
                return True
    return False


def poly_eval_reference(coefficients, x: int, range_size: int) -> int:
    """Direct power-sum evaluation with Python big integers; independent of
    the Horner and vectorized field paths."""
    total = sum(a * x**i for i, a in enumerate(coefficients))
    return (total % PRIME) % range_size


class ShadowSet:
    """Reference dictionary model: a plain set with the oracle budget."""

    def __init__(self, budget: OracleBudget = DEFAULT_BUDGET):
        self._keys: set[int] = set()
        self._cap = budget.max_keys_shadow

    def insert(self, x: int) -> None:
        if len(self._keys) >= self._cap:
            raise ValueError("shadow set over budget")
        self._keys.add(x)

    def remove(self, x: int) -> bool:
        if x in self._keys:
            self._keys.remove(x)
            return True
        return False

    def lookup(self, x: int) -> bool:
        return x in self._keys

    def __len__(self) -> int:
        return len(self._keys)
