"""Tiny undirected multigraph with deterministic traversal.

The correctness criteria need three things from a graph: connectedness,
acyclicity with an explicit cycle witness, and the component split of a
disconnected graph.  Vertices and edges are kept in insertion order so
that the first witness found is reproducible run to run.  Parallel edges
and self loops count as cycles, which matters for the partition
orthogonality test where two classes can share several elements.
"""

from __future__ import annotations

from typing import Hashable, Optional

Vertex = Hashable


class Graph:
    def __init__(self) -> None:
        self._adj: dict[Vertex, list[tuple[Vertex, int]]] = {}
        self._edges: list[tuple[Vertex, Vertex]] = []

    def add_vertex(self, v: Vertex) -> None:
        if v not in self._adj:
            self._adj[v] = []

    def add_edge(self, a: Vertex, b: Vertex) -> int:
        self.add_vertex(a)
        self.add_vertex(b)
        eid = len(self._edges)
        self._edges.append((a, b))
        self._adj[a].append((b, eid))
        if a != b:
            self._adj[b].append((a, eid))
        return eid

    def vertices(self) -> list[Vertex]:
        return list(self._adj)

    def edges(self) -> list[tuple[Vertex, Vertex]]:
        return list(self._edges)

    def vertex_count(self) -> int:
        return len(self._adj)

    def edge_count(self) -> int:
        return len(self._edges)

    def neighbors(self, v: Vertex) -> list[Vertex]:
        return [u for (u, _) in self._adj[v]]

    def components(self) -> list[list[Vertex]]:
        seen: set[Vertex] = set()
        comps: list[list[Vertex]] = []
        for start in self._adj:
            if start in seen:
                continue
            comp = [start]
            seen.add(start)
            stack = [start]
            while stack:
                v = stack.pop()
                for (u, _) in self._adj[v]:
                    if u not in seen:
                        seen.add(u)
                        comp.append(u)
                        stack.append(u)
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return len(self._adj) <= 1 or len(self.components()) == 1

    def find_cycle(self) -> Optional[list[Vertex]]:
        """First cycle in DFS order as a closed vertex list, or None.

        Each vertex records the edge used to reach it, so a parallel edge
        back to the parent is a genuine cycle while re-walking the entry
        edge is not.
        """
        color: dict[Vertex, int] = {}  # 1 = on stack, 2 = done
        parent: dict[Vertex, tuple[Optional[Vertex], Optional[int]]] = {}
        for root in self._adj:
            if root in color:
                continue
            parent[root] = (None, None)
            # stack holds (vertex, iterator index into adjacency)
            stack: list[tuple[Vertex, int]] = [(root, 0)]
            color[root] = 1
            while stack:
                v, i = stack.pop()
                adj = self._adj[v]
                advanced = False
                while i < len(adj):
                    u, eid = adj[i]
                    i += 1
                    if u == v:
                        return [v, v]  # self loop
                    if u not in color:
                        color[u] = 1
                        parent[u] = (v, eid)
                        stack.append((v, i))
                        stack.append((u, 0))
                        advanced = True
                        break
                    if color[u] == 1 and eid != parent[v][1]:
                        # back edge v -> u; walk parents from v up to u
                        cycle = [v]
                        w = v
                        while w != u:
                            w = parent[w][0]
                            cycle.append(w)
                        cycle.reverse()
                        cycle.append(cycle[0])
                        return cycle
                if not advanced:
                    color[v] = 2
        return None

    def is_tree(self) -> bool:
        if len(self._adj) == 0:
            return False
        return self.is_connected() and len(self._edges) == len(self._adj) - 1

    def is_forest(self) -> bool:
        return self.find_cycle() is None
