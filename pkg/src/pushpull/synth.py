"""Small synthetic graph families used by tests, benchmarks and the CLI demos."""

from __future__ import annotations

import numpy as np

from .graph import CsrGraph, RawEdges, build_graph


def _graph(n, src, dst, w=None, name="") -> CsrGraph:
    src = np.asarray(src, dtype=np.int64)
    w = np.ones(len(src)) if w is None else np.asarray(w, dtype=np.float64)
    g = build_graph(RawEdges(n, src, np.asarray(dst, dtype=np.int64), w))
    return CsrGraph(g.num_vertices, g.out_offsets, g.out_targets, g.out_weights, name)


def star(leaves: int) -> CsrGraph:
    """Vertex 0 connected to ``leaves`` other vertices."""
    leaf = np.arange(1, leaves + 1)
    return _graph(leaves + 1, np.zeros(leaves, dtype=np.int64), leaf, name=f"star{leaves}")


def clique_ring(num_cliques: int, clique_size: int) -> CsrGraph:
    """Disjoint cliques on consecutive ids, each linked to the next by one edge."""
    src, dst = [], []
    for c in range(num_cliques):
        lo = c * clique_size
        ids = np.arange(lo, lo + clique_size)
        a, b = np.meshgrid(ids, ids, indexing="ij")
        mask = a < b
        src.append(a[mask])
        dst.append(b[mask])
        src.append([lo + clique_size - 1])
        dst.append([((c + 1) % num_cliques) * clique_size])
    n = num_cliques * clique_size
    return _graph(n, np.concatenate(src), np.concatenate(dst), name=f"cliques{num_cliques}x{clique_size}")


def ring_lattice(n: int, k: int) -> CsrGraph:
    """Each vertex joined to its ``k`` nearest successors (and, by symmetry, predecessors)."""
    v = np.repeat(np.arange(n), k)
    off = np.tile(np.arange(1, k + 1), n)
    return _graph(n, v, (v + off) % n, name=f"ring{n}k{k}")


def random_graph(n: int, m: int, rng: np.random.Generator, max_weight: int = 10) -> CsrGraph:
    """Up to ``m`` undirected edges drawn uniformly, integer weights in ``[1, max_weight]``."""
    src = rng.integers(0, n, m)
    dst = rng.integers(0, n, m)
    w = rng.integers(1, max_weight + 1, m).astype(np.float64)
    return _graph(n, src, dst, w, name=f"rand{n}")
