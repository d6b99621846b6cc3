"""Finite weighted graphs and their 2^r subdivisions.

Subdivision vertices are identified by the triple (base edge, numerator,
denominator) with the fraction reduced to lowest terms, so the nesting
``level l`` ⊆ ``level r`` holds by plain value equality.  Base-edge
orientation is fixed by the order of the endpoints in the vertex list; it is
bookkeeping only and never affects any law.  Graphs are immutable after
construction and safe to share across workers; structure is stored as edge
lists, with dense matrices materialized on demand (supported sizes stay in
the low thousands of vertices).
"""

from __future__ import annotations

import json
from typing import Hashable, Mapping, NamedTuple, Sequence

import numpy as np

VertexId = Hashable


class SubVertex(NamedTuple):
    """Interior vertex of a subdivided edge at reduced position num/den."""

    edge: tuple
    num: int
    den: int

    def label(self) -> str:
        u, v = self.edge
        return f"e:{u}~{v}:{self.num}/{self.den}"


class SubEdge(NamedTuple):
    """The j-th piece (1-based) of a base edge at subdivision level."""

    edge: tuple
    j: int
    level: int


def _reduce(num: int, den: int):
    while num % 2 == 0 and den > 1:
        num //= 2
        den //= 2
    return num, den


def _grid_vertex(edge: tuple, num: int, den: int):
    """Vertex at position num/den on ``edge`` (endpoints included)."""
    if num == 0:
        return edge[0]
    if num == den:
        return edge[1]
    return SubVertex(edge, *_reduce(num, den))


class Graph:
    """Undirected connected graph with strictly positive edge weights."""

    def __init__(self, vertices: Sequence[VertexId],
                 weights: Mapping[tuple, float]):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        self._index = {v: i for i, v in enumerate(self.vertices)}
        edges = []
        canon = {}
        for (u, v), w in weights.items():
            if u == v:
                raise ValueError(f"self-loop at {u!r} not allowed")
            if u not in self._index or v not in self._index:
                raise ValueError(f"edge ({u!r}, {v!r}) references unknown vertex")
            if w <= 0:
                raise ValueError(f"nonpositive weight on edge ({u!r}, {v!r})")
            if self._index[u] > self._index[v]:
                u, v = v, u
            if (u, v) in canon:
                raise ValueError(f"duplicate edge ({u!r}, {v!r})")
            canon[(u, v)] = float(w)
            edges.append((u, v))
        self.edges = tuple(sorted(edges, key=lambda e: (self._index[e[0]], self._index[e[1]])))
        self.weights = {e: canon[e] for e in self.edges}
        if not self._connected():
            raise ValueError("graph is not connected")

    def _connected(self) -> bool:
        if len(self.vertices) <= 1:
            return True
        adj: dict = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, v: VertexId) -> int:
        return self._index[v]

    def weight_matrix(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        for (u, v), wt in self.weights.items():
            i, j = self._index[u], self._index[v]
            w[i, j] = w[j, i] = wt
        return w

    def degree(self, v: VertexId) -> int:
        return sum(1 for e in self.edges if v in e)

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        data = json.loads(text)
        weights = {}
        for u, v, w in data["edges"]:
            u = tuple(u) if isinstance(u, list) else u
            v = tuple(v) if isinstance(v, list) else v
            weights[(u, v)] = w
        return cls(data["vertices"], weights)

    def to_json(self) -> str:
        return json.dumps({
            "vertices": list(self.vertices),
            "edges": [[u, v, self.weights[(u, v)]] for u, v in self.edges],
        })


class SubdividedGraph:
    """2^r subdivision of a base graph with per-level bookkeeping.

    Vertices and edges of every level l <= r are answerable by index
    arithmetic; only the level-r structure is materialized.
    """

    def __init__(self, base: Graph, r: int):
        if r < 0:
            raise ValueError("subdivision level must be nonnegative")
        self.base = base
        self.r = r
        den = 2 ** r
        verts = list(base.vertices)
        for e in base.edges:
            verts.extend(_grid_vertex(e, j, den) for j in range(1, den))
        self.vertices = tuple(verts)
        self._index = {v: i for i, v in enumerate(self.vertices)}
        self.edges = tuple(SubEdge(e, j, r) for e in base.edges
                           for j in range(1, den + 1))
        assert len(self.vertices) == base.n + (den - 1) * len(base.edges)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, v) -> int:
        return self._index[v]

    def endpoints(self, e: SubEdge):
        den = 2 ** e.level
        return (_grid_vertex(e.edge, e.j - 1, den), _grid_vertex(e.edge, e.j, den))

    def level_member(self, v, l: int) -> bool:
        """Whether ``v`` belongs to the level-l vertex set."""
        if not 0 <= l <= self.r:
            raise ValueError(f"level {l} out of range 0..{self.r}")
        if isinstance(v, SubVertex):
            return v in self._index and v.den <= 2 ** l
        return v in self.base._index

    def vertices_at_level(self, l: int):
        return tuple(v for v in self.vertices if self.level_member(v, l))

    def edges_at_level(self, l: int):
        if not 0 <= l <= self.r:
            raise ValueError(f"level {l} out of range 0..{self.r}")
        return tuple(SubEdge(e, j, l) for e in self.base.edges
                     for j in range(1, 2 ** l + 1))

    def split(self, l: int, ebar: SubEdge):
        """Children (e', e'') of the level-(l-1) edge ``ebar`` and their midpoint."""
        if not 1 <= l <= self.r:
            raise ValueError(f"level {l} out of range 1..{self.r}")
        if ebar.level != l - 1 or not 1 <= ebar.j <= 2 ** (l - 1) \
                or ebar.edge not in self.base.weights:
            raise ValueError(f"{ebar} is not an edge of level {l - 1}")
        j = ebar.j
        mid = _grid_vertex(ebar.edge, 2 * j - 1, 2 ** l)
        return SubEdge(ebar.edge, 2 * j - 1, l), SubEdge(ebar.edge, 2 * j, l), mid

    def survivor(self, l: int, vbar):
        """Edges and neighbours in level l around a surviving interior vertex.

        ``vbar`` must lie in level l-1 but not in the base graph; returns
        (e1, e2, v1, v2) with e1, e2 its incident level-l edges and v1, v2 the
        adjacent midpoints eliminated when passing to level l-1.
        """
        if not 2 <= l <= self.r:
            raise ValueError(f"level {l} out of range 2..{self.r}")
        if not isinstance(vbar, SubVertex) or not self.level_member(vbar, l - 1):
            raise ValueError(f"{vbar} is not an interior vertex of level {l - 1}")
        j = vbar.num * (2 ** (l - 1) // vbar.den)
        den = 2 ** l
        return (SubEdge(vbar.edge, 2 * j, l), SubEdge(vbar.edge, 2 * j + 1, l),
                _grid_vertex(vbar.edge, 2 * j - 1, den),
                _grid_vertex(vbar.edge, 2 * j + 1, den))

    def weight_matrix(self, edge_weights=None) -> np.ndarray:
        """Dense weight matrix on the level-r vertex set.

        ``edge_weights`` maps level-r edges to weights (array over
        ``self.edges`` order, or mapping); by default every piece inherits its
        base edge's weight.
        """
        w = np.zeros((self.n, self.n))
        for k, e in enumerate(self.edges):
            if edge_weights is None:
                wt = self.base.weights[e.edge]
            elif isinstance(edge_weights, Mapping):
                wt = edge_weights[e]
            else:
                wt = edge_weights[k]
            a, b = self.endpoints(e)
            i, j = self._index[a], self._index[b]
            w[i, j] = w[j, i] = wt
        return w

    def to_json(self) -> str:
        labels = {v: (v.label() if isinstance(v, SubVertex) else v)
                  for v in self.vertices}
        return json.dumps({
            "vertices": [labels[v] for v in self.vertices],
            "edges": [[labels[a], labels[b], self.base.weights[e.edge]]
                      for e in self.edges for a, b in [self.endpoints(e)]],
        })


def build_subdivision(g: Graph, r: int) -> SubdividedGraph:
    """Replace every edge of ``g`` by a series of 2^r edges."""
    return SubdividedGraph(g, r)
