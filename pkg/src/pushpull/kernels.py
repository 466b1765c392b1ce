"""Functional semantics of the simulated vertex-centric kernels.

A :class:`KernelSpec` captures one algorithm in one update direction using the
push/pull kernel vocabulary (source/target predicates, vertex property, the
reduction and its identity, the target update). :func:`execute` runs a spec
sequentially, and :func:`reference_result` computes ground truth with
textbook algorithms that share no code with either the specs or the
simulator.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .advisor import Direction
from .graph import CsrGraph

SIMULATED_ALGOS = ("PR", "SSSP", "CC")


class KernelSpecError(ValueError):
    pass


@dataclass(frozen=True)
class AlgoParams:
    damping: float = 0.85
    epsilon: float = 1e-4
    max_iters: int = 50
    source: int = 0
    # safety cap for SSSP/CC; both converge well before |V| iterations
    max_rounds: int | None = None

    def rounds(self, g: CsrGraph) -> int:
        return self.max_rounds if self.max_rounds is not None else max(2, g.num_vertices + 1)


@dataclass
class VertexState:
    current: np.ndarray
    next: np.ndarray
    aux: dict = field(default_factory=dict)

    def swap(self):
        self.current, self.next = self.next, self.current


@dataclass(frozen=True)
class KernelSpec:
    algo: str
    direction: Direction
    op_name: str
    spred: Callable | None = None
    tpred: Callable | None = None
    vprop: Callable | None = None
    edge: Callable | None = None
    op: Callable | None = None
    init: float | None = None
    update: Callable | None = None
    prepare: Callable | None = None
    converged: Callable | None = None

    @property
    def atomic(self) -> bool:
        """Push and dynamic kernels update through atomics; pull kernels never do."""
        return self.direction is not Direction.PULL


def _as_direction(direction) -> Direction:
    if isinstance(direction, Direction):
        return direction
    try:
        return Direction(str(direction).capitalize())
    except ValueError:
        raise KernelSpecError(f"unknown direction {direction!r}") from None


def kernel_spec(algo: str, direction, params: AlgoParams = AlgoParams()) -> KernelSpec:
    algo = algo.upper()
    direction = _as_direction(direction)
    if algo not in SIMULATED_ALGOS:
        raise KernelSpecError(f"{algo} has no kernel semantics; simulated algorithms: {', '.join(SIMULATED_ALGOS)}")
    if algo == "CC":
        if direction is not Direction.DYNAMIC:
            raise KernelSpecError("CC has dynamic traversal: neither a pure push nor a pure pull kernel exists")
        return KernelSpec("CC", direction, "cas-min")
    if direction is Direction.DYNAMIC:
        raise KernelSpecError(f"{algo} has static traversal and needs a Push or Pull kernel")
    return _pr_spec(direction, params) if algo == "PR" else _sssp_spec(direction, params)


def _pr_spec(direction: Direction, params: AlgoParams) -> KernelSpec:
    d = params.damping

    def prepare(g, st, it):
        n = g.num_vertices
        deg = st.aux["deg"]
        dangling = float(st.current[deg == 0].sum())
        st.aux["base"] = (1.0 - d) / n + d * dangling / n
        if direction is Direction.PUSH:
            st.next[:] = st.aux["base"]

    def vprop(s, st):
        deg = st.aux["deg"][s]
        return d * st.current[s] / deg if deg else 0.0

    def update(t, p_t, st):
        if direction is Direction.PULL:
            st.next[t] = st.aux["base"] + p_t
        else:
            st.next[t] += p_t

    def converged(st, it):
        return float(np.abs(st.next - st.current).sum()) < params.epsilon or it + 1 >= params.max_iters

    return KernelSpec(
        "PR", direction, "add",
        spred=lambda s, st: True, tpred=lambda t, st: True, vprop=vprop,
        edge=lambda p, w: p, op=lambda a, b: a + b, init=0.0,
        update=update, prepare=prepare, converged=converged,
    )


def _sssp_spec(direction: Direction, params: AlgoParams) -> KernelSpec:
    def prepare(g, st, it):
        st.next[:] = st.current

    def update(t, p_t, st):
        if p_t < st.next[t]:
            st.next[t] = p_t

    def converged(st, it):
        changed = st.next < st.current
        st.aux["frontier"] = changed
        return not changed.any()

    return KernelSpec(
        "SSSP", direction, "min",
        spred=lambda s, st: bool(st.aux["frontier"][s]), tpred=lambda t, st: True,
        vprop=lambda s, st: st.current[s], edge=lambda p, w: p + w,
        op=min, init=math.inf, update=update, prepare=prepare, converged=converged,
    )


def initial_state(g: CsrGraph, algo: str, params: AlgoParams = AlgoParams()) -> VertexState:
    n = g.num_vertices
    algo = algo.upper()
    if algo == "PR":
        cur = np.full(n, 1.0 / n) if n else np.zeros(0)
        return VertexState(cur, np.zeros(n), {"deg": g.out_degrees()})
    if algo == "SSSP":
        _check_source(g, params.source)
        cur = np.full(n, np.inf)
        cur[params.source] = 0.0
        front = np.zeros(n, dtype=bool)
        front[params.source] = True
        return VertexState(cur, cur.copy(), {"frontier": front})
    if algo == "CC":
        par = np.arange(n, dtype=np.int64)
        return VertexState(par, par, {})
    raise KernelSpecError(f"no initial state for {algo}")


def _check_source(g: CsrGraph, source: int):
    if not 0 <= source < g.num_vertices:
        raise ValueError(f"SSSP source {source} out of range for {g.num_vertices} vertices")


def execute(g: CsrGraph, spec: KernelSpec, params: AlgoParams = AlgoParams()) -> np.ndarray:
    """Run a kernel spec sequentially, one kernel invocation per iteration."""
    st = initial_state(g, spec.algo, params)
    if g.num_vertices == 0:
        return st.current
    if spec.algo == "CC":
        return _execute_cc(g, st.current.copy(), params)
    off, tgt, wts = g.out_offsets, g.out_targets, g.out_weights
    n = g.num_vertices
    limit = params.max_iters if spec.algo == "PR" else params.rounds(g)
    for it in range(limit):
        spec.prepare(g, st, it)
        if spec.direction is Direction.PUSH:
            for s in range(n):
                if not spec.spred(s, st):
                    continue
                p_s = spec.vprop(s, st)
                for k in range(off[s], off[s + 1]):
                    t = tgt[k]
                    if spec.tpred(t, st):
                        spec.update(t, spec.edge(p_s, wts[k]), st)  # atomicUpdate
        else:
            for t in range(n):
                if not spec.tpred(t, st):
                    continue
                p_t = spec.init
                for k in range(off[t], off[t + 1]):
                    s = tgt[k]  # in-neighbor: in-adjacency equals out-adjacency
                    if spec.spred(s, st):
                        p_t = spec.op(p_t, spec.edge(spec.vprop(s, st), wts[k]))
                spec.update(t, p_t, st)
        done = spec.converged(st, it)
        st.swap()
        if done:
            break
    return st.current.copy()


def _execute_cc(g: CsrGraph, parent: np.ndarray, params: AlgoParams) -> np.ndarray:
    """Hooking with compare-and-swap followed by pointer jumping, until no parent moves."""
    off, tgt = g.out_offsets, g.out_targets
    for _ in range(params.rounds(g)):
        before = parent.copy()
        for v in range(g.num_vertices):
            for k in range(off[v], off[v + 1]):
                rv, ru = parent[v], parent[tgt[k]]
                if rv != ru:
                    hi, lo = max(rv, ru), min(rv, ru)
                    if parent[hi] == hi:  # CAS(parent[hi], hi, lo)
                        parent[hi] = lo
        for v in range(g.num_vertices):
            p = parent[v]
            while parent[p] != p:
                p = parent[p]
            parent[v] = p
        if np.array_equal(before, parent):
            break
    return parent


# -- ground truth ------------------------------------------------------------------

def reference_result(g: CsrGraph, algo: str, params: AlgoParams = AlgoParams()) -> np.ndarray:
    algo = algo.upper()
    if algo == "PR":
        return reference_pagerank(g, params)
    if algo == "SSSP":
        return reference_sssp(g, params.source)
    if algo == "CC":
        return reference_cc(g)
    raise KernelSpecError(f"no reference oracle for {algo}")


def reference_pagerank(g: CsrGraph, params: AlgoParams = AlgoParams()) -> np.ndarray:
    """Jacobi power iteration with uniform redistribution of dangling mass."""
    n = g.num_vertices
    if n == 0:
        return np.zeros(0)
    d = params.damping
    deg = g.out_degrees()
    src = g.edge_sources()
    x = np.full(n, 1.0 / n)
    for _ in range(params.max_iters):
        base = (1.0 - d) / n + d * x[deg == 0].sum() / n
        share = np.where(deg > 0, x / np.maximum(deg, 1), 0.0)
        x_new = base + d * np.bincount(g.out_targets, weights=share[src], minlength=n)
        delta = np.abs(x_new - x).sum()
        x = x_new
        if delta < params.epsilon:
            break
    return x


def reference_sssp(g: CsrGraph, source: int = 0) -> np.ndarray:
    """Dijkstra's algorithm; unreachable vertices stay at +inf."""
    _check_source(g, source)
    dist = np.full(g.num_vertices, np.inf)
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = np.zeros(g.num_vertices, dtype=bool)
    off, tgt, wts = g.out_offsets, g.out_targets, g.out_weights
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for k in range(off[u], off[u + 1]):
            v = tgt[k]
            nd = du + wts[k]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, int(v)))
    return dist


def reference_cc(g: CsrGraph) -> np.ndarray:
    """Union-find; every vertex is labeled with the smallest id in its component."""
    parent = list(range(g.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    src = g.edge_sources()
    for u, v in zip(src.tolist(), g.out_targets.tolist()):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    return np.array([find(v) for v in range(g.num_vertices)], dtype=np.int64)


def export_result(values, path=None) -> str:
    """``vertex value`` lines; returns the text and writes it when ``path`` is given."""
    lines = []
    for v, x in enumerate(np.asarray(values).tolist()):
        lines.append(f"{v} {'inf' if x == math.inf else repr(x)}")
    text = "\n".join(lines) + ("\n" if lines else "")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def result_to_json(values) -> list:
    """JSON-safe list; unreachable (+inf) distances become ``None``."""
    out = []
    for x in np.asarray(values).tolist():
        out.append(None if isinstance(x, float) and math.isinf(x) else x)
    return out
