"""Interaction graph builders: periodic square lattice, Watts-Strogatz
small world, and Erdos-Renyi, plus a flat CSR view for the simulation
kernels and an edge-list file format.

All randomness flows through the package's own generator so graphs are
reproducible bit-for-bit from a seed across backends and platforms.
Builders guarantee simple graphs (no self-loops, no multi-edges) with no
isolated nodes; every node must have at least one neighbor to imitate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import impl
from .rng import MASK64, Xoshiro256StarStar, derive_seed


@dataclass
class Network:
    """Undirected simple graph as sorted adjacency lists."""

    num_nodes: int
    adjacency: list[list[int]]
    _csr: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @property
    def num_edges(self) -> int:
        return int(self.degrees.sum()) // 2

    def edge_set(self) -> set[tuple[int, int]]:
        return {(u, v) for u in range(self.num_nodes)
                for v in self.adjacency[u] if u < v}

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(offsets, flat neighbor array) for the kernels; cached."""
        if self._csr is None:
            offsets = np.zeros(self.num_nodes + 1, dtype=np.int64)
            offsets[1:] = np.cumsum(self.degrees)
            flat = np.empty(offsets[-1], dtype=np.int64)
            for u, nbrs in enumerate(self.adjacency):
                flat[offsets[u]:offsets[u + 1]] = nbrs
            self._csr = (offsets, flat)
        return self._csr


def _from_edge_set(num_nodes: int, edges) -> Network:
    adjacency = [[] for _ in range(num_nodes)]
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at node {u}")
        adjacency[u].append(v)
        adjacency[v].append(u)
    for u, nbrs in enumerate(adjacency):
        nbrs.sort()
        for a, b in zip(nbrs, nbrs[1:]):
            if a == b:
                raise ValueError(f"duplicate edge ({u}, {a})")
        if not nbrs:
            raise ValueError(f"node {u} is isolated")
    return Network(num_nodes, adjacency)


def _lattice_edges(side: int, periodic: bool) -> list[tuple[int, int]]:
    # right and down neighbors only, so each undirected edge appears once;
    # a set() catches the side=2 wrap where both directions coincide
    edges = set()
    for r in range(side):
        for c in range(side):
            u = r * side + c
            if periodic or c + 1 < side:
                v = r * side + (c + 1) % side
                if u != v:
                    edges.add((min(u, v), max(u, v)))
            if periodic or r + 1 < side:
                v = ((r + 1) % side) * side + c
                if u != v:
                    edges.add((min(u, v), max(u, v)))
    return sorted(edges)


def build_square_lattice(side: int, periodic: bool = True) -> Network:
    """side x side square lattice with von Neumann (4-)neighborhoods."""
    if side < 2:
        raise ValueError(f"side must be >= 2, got {side}")
    return _from_edge_set(side * side, _lattice_edges(side, periodic))


def build_small_world(side: int, rewire_p: float, seed: int) -> Network:
    """Watts-Strogatz graph over the periodic lattice's edge set.

    Each edge (u, v), visited in sorted order, is rewired with probability
    rewire_p: v is replaced by a uniform draw over nodes that are not u and
    not already neighbors of u (rejection sampling keeps it uniform). Nodes
    left isolated by rewiring are reattached to a uniform random partner.
    """
    if side < 2:
        raise ValueError(f"side must be >= 2, got {side}")
    if not 0.0 <= rewire_p <= 1.0:
        raise ValueError(f"rewire_p must be in [0, 1], got {rewire_p}")
    n = side * side
    rng = Xoshiro256StarStar(seed)
    adjacency = [set() for _ in range(n)]
    for u, v in _lattice_edges(side, True):
        adjacency[u].add(v)
        adjacency[v].add(u)
    for u, v in _lattice_edges(side, True):
        if rng.next_double() >= rewire_p:
            continue
        if len(adjacency[u]) >= n - 1:
            continue  # u already saturated, nothing to rewire to
        while True:
            w = rng.next_below(n)
            if w != u and w not in adjacency[u]:
                break
        adjacency[u].discard(v)
        adjacency[v].discard(u)
        adjacency[u].add(w)
        adjacency[w].add(u)
    _repair_isolated(adjacency, rng)
    return _from_edge_set(n, {(min(u, v), max(u, v))
                              for u in range(n) for v in adjacency[u]})


def _repair_isolated(adjacency: list[set], rng: Xoshiro256StarStar) -> None:
    n = len(adjacency)
    for u in range(n):
        if adjacency[u]:
            continue
        while True:
            w = rng.next_below(n)
            if w != u:
                break
        adjacency[u].add(w)
        adjacency[w].add(u)


def build_erdos_renyi(num_nodes: int, avg_degree: float, seed: int) -> Network:
    """G(n, p) with p = avg_degree / (n - 1); isolated nodes repaired.

    Pair sampling runs in the compiled kernel when available; the repair
    pass uses an independently derived stream so the two stages cannot
    alias.
    """
    if num_nodes < 2:
        raise ValueError(f"num_nodes must be >= 2, got {num_nodes}")
    if not 0.0 < avg_degree < num_nodes - 1 + 1e-12:
        raise ValueError(
            f"avg_degree must be in (0, num_nodes-1], got {avg_degree}")
    p = avg_degree / (num_nodes - 1)
    # integer threshold so edge decisions compare raw 64-bit draws, exactly
    # reproducible in both backends
    threshold = min(MASK64, int(p * 2.0 ** 64))
    us, vs = impl.er_pair_sample(num_nodes, threshold, derive_seed(seed, 0))
    adjacency = [set() for _ in range(num_nodes)]
    for u, v in zip(us, vs):
        adjacency[u].add(int(v))
        adjacency[v].add(int(u))
    _repair_isolated(adjacency, Xoshiro256StarStar(derive_seed(seed, 1)))
    return _from_edge_set(num_nodes, {(min(u, v), max(u, v))
                                      for u in range(num_nodes)
                                      for v in adjacency[u]})


def write_edge_list(path, net: Network) -> None:
    """Plain text: '# nodes=<N>' header then one 'u v' line per edge,
    u < v, sorted."""
    with open(path, "w", newline="") as f:
        f.write(f"# nodes={net.num_nodes}\n")
        for u, v in sorted(net.edge_set()):
            f.write(f"{u} {v}\n")


def read_edge_list(path) -> Network:
    """Inverse of `write_edge_list`."""
    with open(path) as f:
        header = f.readline().strip()
        if not header.startswith("# nodes="):
            raise ValueError(f"{path}: missing '# nodes=' header")
        num_nodes = int(header.split("=", 1)[1])
        edges = []
        for line in f:
            line = line.strip()
            if not line:
                continue
            u, v = map(int, line.split())
            if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                raise ValueError(f"{path}: edge ({u}, {v}) out of range")
            edges.append((u, v))
    return _from_edge_set(num_nodes, edges)
