"""Even-order multigraph, fractional solution vectors, support structure.

Node ids are 1-based.  Edges are stored in input order; that order fixes the
cost perturbation and all edge indexing.  Parallel edges are permitted,
self-loops are not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ParseError
from .rational import HALF, ONE, Rat, ZERO


@dataclass(frozen=True)
class Graph:
    """Undirected multigraph with per-edge costs.

    `edges[i] = (u, v, cost)`.  Costs are integers for instances read from
    files; contracted graphs carry exact rationals.
    """

    n: int
    edges: tuple

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative node count")
        for u, v, _c in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge endpoint out of range: ({u},{v})")
            if u == v:
                raise ValueError(f"self-loop at node {u}")

    @property
    def m(self) -> int:
        return len(self.edges)

    def costs(self) -> list:
        return [c for _u, _v, c in self.edges]

    def endpoints(self, e: int):
        u, v, _c = self.edges[e]
        return u, v

    def incident(self, u: int) -> list:
        return [e for e, (a, b, _c) in enumerate(self.edges) if a == u or b == u]

    def delta(self, nodes) -> list:
        """Edge ids with exactly one endpoint in `nodes`."""
        s = set(nodes)
        return [
            e
            for e, (a, b, _c) in enumerate(self.edges)
            if (a in s) != (b in s)
        ]

    def inside(self, nodes) -> list:
        """Edge ids with both endpoints in `nodes`."""
        s = set(nodes)
        return [e for e, (a, b, _c) in enumerate(self.edges) if a in s and b in s]


def make_graph(n: int, edges: Iterable) -> Graph:
    return Graph(n=n, edges=tuple((u, v, c) for u, v, c in edges))


def parse_instance(text: str) -> Graph:
    """Parse the `p edge <n> <m>` / `e <u> <v> <cost>` format.

    Edge order in the file defines the perturbation order.
    """
    n = None
    declared_m = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise ParseError(f"line {lineno}: duplicate problem line")
            if len(parts) != 4 or parts[1] != "edge":
                raise ParseError(f"line {lineno}: malformed problem line: {raw!r}")
            try:
                n, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer sizes") from None
        elif parts[0] == "e":
            if n is None:
                raise ParseError(f"line {lineno}: edge before problem line")
            if len(parts) != 4:
                raise ParseError(f"line {lineno}: malformed edge line: {raw!r}")
            try:
                u, v, c = int(parts[1]), int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer edge data") from None
            edges.append((u, v, c))
        else:
            raise ParseError(f"line {lineno}: unknown line type {parts[0]!r}")
    if n is None:
        raise ParseError("missing problem line")
    if declared_m != len(edges):
        raise ParseError(f"declared {declared_m} edges, found {len(edges)}")
    try:
        return make_graph(n, edges)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def write_instance(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.m}"]
    lines.extend(f"e {u} {v} {c}" for u, v, c in g.edges)
    return "\n".join(lines) + "\n"


@dataclass
class SupportDecomposition:
    """Partition of a proper-half-integral support into 1-edges and odd cycles.

    Cycles are node lists, sorted by minimum node id; each starts at its
    minimum node and proceeds toward its smaller-id neighbor.
    """

    matched_edges: list = field(default_factory=list)
    odd_cycles: list = field(default_factory=list)

    @property
    def o(self) -> int:
        return len(self.odd_cycles)

    def cycle_node_sets(self) -> list:
        return [frozenset(c) for c in self.odd_cycles]


def _half_adjacency(x: Sequence, g: Graph):
    adj = {}
    for e, val in enumerate(x):
        if val == HALF:
            u, v, _c = g.edges[e]
            adj.setdefault(u, []).append((v, e))
            adj.setdefault(v, []).append((u, e))
    for u in adj:
        adj[u].sort()
    return adj


def decompose_support(x: Sequence, g: Graph) -> SupportDecomposition:
    """Split supp(x) into value-1 edges and odd cycles of value-1/2 edges.

    Purely structural: degree feasibility is not checked here.  Raises
    ValueError when x is not proper-half-integral.
    """
    matched = []
    for e, val in enumerate(x):
        if val == ZERO or val == HALF:
            continue
        if val == ONE:
            matched.append(e)
        else:
            raise ValueError(f"value of edge {e} not in {{0, 1/2, 1}}: {val}")

    adj = _half_adjacency(x, g)
    for u, nbrs in adj.items():
        if len(nbrs) != 2:
            raise ValueError(f"node {u} has {len(nbrs)} half-edges; expected 2")

    used_nodes = set()
    for e in matched:
        for u in g.endpoints(e):
            if u in used_nodes:
                raise ValueError(f"node {u} covered twice by 1-edges")
            used_nodes.add(u)
    if used_nodes & set(adj):
        bad = min(used_nodes & set(adj))
        raise ValueError(f"node {bad} lies on both a 1-edge and a half-cycle")

    cycles = []
    seen = set()
    for start in sorted(adj):
        if start in seen:
            continue
        # walk toward the smaller-id neighbor first
        cycle = [start]
        seen.add(start)
        prev_edge = None
        cur = start
        while True:
            options = [(w, e) for (w, e) in adj[cur] if e != prev_edge]
            if not options:
                raise ValueError("broken half-edge structure")
            nxt, edge = options[0]
            prev_edge = edge
            if nxt == start:
                break
            if nxt in seen:
                raise ValueError(f"half-edges at node {nxt} do not form disjoint cycles")
            cycle.append(nxt)
            seen.add(nxt)
            cur = nxt
        if len(cycle) < 3 or len(cycle) % 2 == 0:
            raise ValueError(f"half-edge cycle of length {len(cycle)} is not odd >= 3")
        cycles.append(cycle)

    cycles.sort(key=lambda c: c[0])
    return SupportDecomposition(matched_edges=matched, odd_cycles=cycles)


def is_proper_half_integral(x: Sequence, g: Graph) -> bool:
    """True iff values lie in {0,1/2,1} and the half-support is a disjoint
    union of odd cycles with 1-edges disjoint from them."""
    try:
        decompose_support(x, g)
    except ValueError:
        return False
    return True


def reassemble(dec: SupportDecomposition, g: Graph) -> list:
    """Inverse of decompose_support (cycle edges picked lowest-id first)."""
    x = [ZERO] * g.m
    for e in dec.matched_edges:
        x[e] = ONE
    for cycle in dec.odd_cycles:
        k = len(cycle)
        for i in range(k):
            u, v = cycle[i], cycle[(i + 1) % k]
            cands = [
                e
                for e, (a, b, _c) in enumerate(g.edges)
                if {a, b} == {u, v} and x[e] == ZERO
            ]
            if not cands:
                raise ValueError(f"no free edge between {u} and {v}")
            x[min(cands)] = HALF
    return x


def solution_degree(x: Sequence, g: Graph, u: int):
    return sum((x[e] for e in g.incident(u)), ZERO)


def check_degree_and_cut_feasibility(x: Sequence, g: Graph, cut_sets) -> bool:
    """x >= 0, x(delta(u)) = 1 for all nodes, x(delta(S)) >= 1 for all cuts."""
    if any(val < ZERO for val in x):
        return False
    deg = {u: ZERO for u in range(1, g.n + 1)}
    for e, val in enumerate(x):
        u, v, _c = g.edges[e]
        deg[u] += val
        deg[v] += val
    if any(d != ONE for d in deg.values()):
        return False
    for s in cut_sets:
        if sum((x[e] for e in g.delta(s)), ZERO) < ONE:
            return False
    return True


def solution_cost(x: Sequence, costs: Sequence):
    return sum((Rat(c) * val for c, val in zip(costs, x)), ZERO)
