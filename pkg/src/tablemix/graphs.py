"""Labeled d-partite multi-hypergraphs built from keys and hash vectors.

Each key x in a (duplicate-free) key set contributes one edge
(h_1(x), ..., h_d(x)), where coordinate i is a vertex in copy i of [m];
edges carry the 1-based rank of their key in sorted order as a label.
The analytics here are the structural quantities the applications hinge
on: connected components with their cyclomatic numbers, the excess of a
bipartite graph, the 2-core and a peel order reaching it, obstruction
detection, and a peel-based 1-orientation.

Isolated vertices are disregarded everywhere.  For a connected component
with e edges and v (non-isolated) vertices we use the cyclomatic number
gamma = (d-1)*e - v + 1, the bipartite-representation value; a component
is a (hyper)tree iff gamma = 0, unicyclic iff gamma = 1, and complex iff
gamma >= 2 (equivalently (d-1)*e > v).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

_MISSING = -1


@dataclass(frozen=True)
class ComponentSummary:
    vertex_count: int
    edge_count: int
    cyclomatic: int
    is_cyclic: bool
    is_complex: bool
    leaf_edge_count: int


@dataclass(frozen=True)
class ObstructionReport:
    has_mog: bool
    has_complex: bool


class LabeledHypergraph:
    """Edge-labeled d-partite multi-hypergraph on d disjoint copies of [m].

    ``vertices`` has shape (n, d); row r holds the vertex ids of the edge
    labeled ``labels[r]``.  Duplicate edges are allowed, labels must be
    distinct.  Instances are immutable after construction.
    """

    def __init__(self, d: int, m: int, labels, vertices):
        if d < 2:
            raise ValueError("d must be >= 2")
        if m < 1:
            raise ValueError("m must be >= 1")
        labels = np.asarray(labels, dtype=np.int64)
        vertices = np.asarray(vertices, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] != d:
            vertices = vertices.reshape(-1, d)
        if labels.shape[0] != vertices.shape[0]:
            raise ValueError("labels and vertices disagree on edge count")
        if labels.size != np.unique(labels).size:
            raise ValueError("edge labels must be distinct")
        if vertices.size and (int(vertices.min()) < 0 or int(vertices.max()) >= m):
            raise ValueError("vertex ids must lie in [0, m)")
        self.d = d
        self.m = m
        self.labels = labels
        self.vertices = vertices

    @classmethod
    def from_edges(cls, d: int, m: int, edges: Iterable[tuple[int, tuple[int, ...]]]):
        edges = list(edges)
        labels = [lab for lab, _ in edges]
        verts = [list(vs) for _, vs in edges]
        return cls(d, m, labels, np.array(verts, dtype=np.int64).reshape(-1, d))

    @property
    def n(self) -> int:
        return int(self.labels.shape[0])

    def edges(self) -> Iterator[tuple[int, tuple[int, ...]]]:
        for r in range(self.n):
            yield int(self.labels[r]), tuple(int(v) for v in self.vertices[r])

    def vertex_ids(self) -> np.ndarray:
        """Global ids part*m + v, shape (n, d)."""
        offsets = np.arange(self.d, dtype=np.int64) * self.m
        return self.vertices + offsets

    def subgraph(self, edge_indices) -> "LabeledHypergraph":
        idx = np.asarray(edge_indices, dtype=np.int64)
        return LabeledHypergraph(self.d, self.m, self.labels[idx], self.vertices[idx])

    def dump_text(self) -> str:
        """One edge per line: ``label v_1 ... v_d``."""
        lines = [
            " ".join([str(lab)] + [str(v) for v in vs]) for lab, vs in self.edges()
        ]
        return "\n".join(lines) + ("\n" if lines else "")


def build(source, keys) -> LabeledHypergraph:
    """Build the graph of a key set under a hash source.

    ``source`` is anything with ``d``, ``m`` and ``evaluate_many`` (a drawn
    family or a :class:`~tablemix.prng.RandomOracle`).  The edge of the
    i-th smallest key gets label i (1-based).
    """
    keys = list(keys)
    if len(set(keys)) != len(keys):
        raise ValueError("key set contains duplicates")
    keys = np.sort(np.asarray(keys, dtype=np.uint64)) if keys else np.empty(0, np.uint64)
    labels = np.arange(1, len(keys) + 1, dtype=np.int64)
    if len(keys):
        verts = source.evaluate_many(keys)
    else:
        verts = np.empty((0, source.d), dtype=np.int64)
    return LabeledHypergraph(source.d, source.m, labels, verts)


class _DisjointSet:
    __slots__ = ("parent",)

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, a: int) -> int:
        parent = self.parent
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def components(g: LabeledHypergraph) -> tuple[list[ComponentSummary], np.ndarray]:
    """Connected components, plus the component index of every edge."""
    if g.n == 0:
        return [], np.empty(0, dtype=np.int64)
    ids = g.vertex_ids()
    used = np.unique(ids.ravel())
    local = np.searchsorted(used, ids)  # (n, d) compact vertex indices
    dsu = _DisjointSet(used.size)
    union = dsu.union
    for row in local.tolist():
        a = row[0]
        for b in row[1:]:
            union(a, b)
    find = dsu.find
    vertex_root = np.array([find(i) for i in range(used.size)], dtype=np.int64)
    roots, vertex_comp = np.unique(vertex_root, return_inverse=True)
    edge_comp = vertex_comp[local[:, 0]]

    deg = np.bincount(local.ravel(), minlength=used.size)
    edge_has_leaf = (deg[local] == 1).any(axis=1)

    ncomp = roots.size
    vcount = np.bincount(vertex_comp, minlength=ncomp)
    ecount = np.bincount(edge_comp, minlength=ncomp)
    leafcount = np.bincount(edge_comp, weights=edge_has_leaf, minlength=ncomp).astype(int)

    summaries = []
    for i in range(ncomp):
        e, v = int(ecount[i]), int(vcount[i])
        gamma = (g.d - 1) * e - v + 1
        summaries.append(
            ComponentSummary(
                vertex_count=v,
                edge_count=e,
                cyclomatic=gamma,
                is_cyclic=gamma >= 1,
                is_complex=gamma >= 2,
                leaf_edge_count=int(leafcount[i]),
            )
        )
    return summaries, edge_comp


def excess(g: LabeledHypergraph) -> int:
    """Minimum edge removals so every component is acyclic or unicyclic.

    Equals gamma(G) minus the number of cyclic components; this is the
    stash size needed to store the key set in two cuckoo tables.
    """
    if g.d != 2:
        raise ValueError("excess is defined for bipartite graphs (d = 2)")
    summaries, _ = components(g)
    return sum(max(s.cyclomatic - 1, 0) for s in summaries if s.is_cyclic)


def peel_2core(
    g: LabeledHypergraph,
) -> tuple[list[tuple[int, tuple[int, int]]], LabeledHypergraph]:
    """Sequential peel: repeatedly remove an edge incident to a degree-1
    vertex, always choosing the smallest (part, vertex-id) candidate.

    Returns the peel order as (edge_index, (part, vertex_id)) records and
    the residual graph, which is the 2-core.
    """
    n = g.n
    ids = g.vertex_ids()
    total = g.d * g.m
    deg = np.bincount(ids.ravel(), minlength=total)
    incident: dict[int, list[int]] = {}
    for e in range(n):
        for v in ids[e]:
            incident.setdefault(int(v), []).append(e)
    alive = np.ones(n, dtype=bool)
    alive_deg = deg.copy()
    heap = [int(v) for v in np.nonzero(deg == 1)[0]]
    heapq.heapify(heap)
    order: list[tuple[int, tuple[int, int]]] = []
    while heap:
        v = heapq.heappop(heap)
        if alive_deg[v] != 1:
            continue
        edge = next(e for e in incident[v] if alive[e])
        alive[edge] = False
        order.append((edge, (v // g.m, v % g.m)))
        for u in ids[edge]:
            u = int(u)
            alive_deg[u] -= 1
            if alive_deg[u] == 1:
                heapq.heappush(heap, u)
    residual = g.subgraph(np.nonzero(alive)[0])
    return order, residual


def parallel_peel(g: LabeledHypergraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Round-based peel to the 2-core, fully vectorized.

    Rounds remove every edge incident to a vertex of degree 1
    simultaneously; the fixed point is the same 2-core as the sequential
    peel, only the order differs.  Returns (edge_order, peel_vertex_global,
    alive_mask): the first two are aligned arrays giving a valid peel
    sequence, the mask marks residual edges.
    """
    n = g.n
    ids = g.vertex_ids()
    total = g.d * g.m
    alive = np.ones(n, dtype=bool)
    order_edges: list[np.ndarray] = []
    order_verts: list[np.ndarray] = []
    while True:
        deg = np.bincount(ids[alive].ravel(), minlength=total)
        is_leaf = deg == 1
        leaf_slots = is_leaf[ids] & alive[:, None]
        peelable = leaf_slots.any(axis=1)
        if not peelable.any():
            break
        rows = np.nonzero(peelable)[0]
        # smallest (part, vertex-id) among the edge's degree-1 vertices
        slot = np.argmax(leaf_slots[rows], axis=1)
        order_edges.append(rows)
        order_verts.append(ids[rows, slot])
        alive[rows] = False
    if order_edges:
        return np.concatenate(order_edges), np.concatenate(order_verts), alive
    return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), alive


def core_is_empty(g: LabeledHypergraph) -> bool:
    """True iff peeling removes every edge (empty 2-core).

    For d = 2 this is exactly acyclicity; for d >= 3 it is the emptiness
    criterion used by the core-threshold experiments.
    """
    _, _, alive = parallel_peel(g)
    return not bool(alive.any())


def one_orientation(g: LabeledHypergraph) -> dict[int, tuple[int, int]] | None:
    """Injective edge -> incident vertex assignment via peeling.

    Peels to the 2-core, orienting each removed edge to its degree-1
    vertex.  A bipartite residual in which every vertex has degree exactly
    2 is a disjoint union of cycles and is oriented cyclically; any other
    nonempty residual means some component is complex and ``None`` is
    returned.  (For d >= 3 a complex component can still admit an
    orientation by matching; this routine deliberately reports failure
    there, matching the peel-based placement procedures it models.)
    """
    order, residual = peel_2core(g)
    orient: dict[int, tuple[int, int]] = {e: pv for e, pv in order}
    if residual.n == 0:
        return orient
    if g.d != 2:
        return None
    # residual must be disjoint pure cycles: every vertex degree exactly 2
    res_rows = sorted(set(range(g.n)) - set(orient))
    ids = g.vertex_ids()
    incident: dict[int, list[int]] = {}
    for e in res_rows:
        for v in ids[e]:
            incident.setdefault(int(v), []).append(e)
    if any(len(es) != 2 for es in incident.values()):
        return None
    seen: set[int] = set()
    for start in res_rows:
        if start in seen:
            continue
        # walk the cycle, orienting each edge to the vertex it enters
        edge = start
        exit_v = int(ids[edge][1])
        while edge not in seen:
            seen.add(edge)
            orient[edge] = (exit_v // g.m, exit_v % g.m)
            edge = next(e for e in incident[exit_v] if e != edge)
            row = ids[edge]
            exit_v = int(row[1]) if int(row[0]) == exit_v else int(row[0])
    return orient


def orientation_is_valid(g: LabeledHypergraph, orient: dict[int, tuple[int, int]]) -> bool:
    """Check injectivity and incidence of an edge -> vertex assignment."""
    if set(orient) != set(range(g.n)):
        return False
    cells = set()
    for e, (part, v) in orient.items():
        if int(g.vertices[e][part]) != v:
            return False
        if (part, v) in cells:
            return False
        cells.add((part, v))
    return True


def detect_obstructions(g: LabeledHypergraph) -> ObstructionReport:
    """Component-arithmetic obstruction check.

    ``has_complex`` is true iff some component has (d-1)*e > v.  For d = 2
    that is exactly the presence of a minimal obstruction subgraph (a
    cycle with a chord, or two cycles joined by a path), reported as
    ``has_mog``; for d >= 3 ``has_mog`` is not defined and stays False.
    """
    summaries, _ = components(g)
    has_complex = any(s.is_complex for s in summaries)
    has_mog = has_complex if g.d == 2 else False
    return ObstructionReport(has_mog=has_mog, has_complex=has_complex)
