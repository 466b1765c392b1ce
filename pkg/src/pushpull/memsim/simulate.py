from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..advisor import (
    Coherence, Consistency, Direction, SystemConfig, Traversal, algo_properties, parse_config,
)
from ..graph import CsrGraph
from ..kernels import AlgoParams, KernelSpecError, kernel_spec
from . import _engine as E
from .params import SimParams
from .report import COUNTERS, SimReport

_COH = {Coherence.GPU: E.COH_GPU, Coherence.DENOVO: E.COH_DENOVO}
_CONS = {Consistency.DRF0: E.CONS_DRF0, Consistency.DRF1: E.CONS_DRF1, Consistency.DRFRLX: E.CONS_RLX}


def _as_config(cfg) -> SystemConfig:
    return cfg if isinstance(cfg, SystemConfig) else parse_config(str(cfg))


def default_config_set(algo: str) -> list[SystemConfig]:
    """Configurations a simulator sweep covers by default for ``algo``.

    Raises ``KeyError`` for ids missing from the algorithm registry.
    """
    props = algo_properties(algo)
    if props.traversal is Traversal.DYNAMIC:
        codes = ("DG1", "DGR", "DD1", "DDR")
    else:
        codes = ("TG0", "SG1", "SGR", "SD1", "SDR")
    return [parse_config(c) for c in codes]


def check_compatible(algo: str, cfg) -> SystemConfig:
    """Raise ``KernelSpecError`` when ``algo`` has no kernel for ``cfg``'s direction."""
    cfg = _as_config(cfg)
    kernel_spec(algo, cfg.direction)
    return cfg


def _param_vector(p: SimParams, cfg: SystemConfig) -> np.ndarray:
    P = np.zeros(E.NUM_PARAMS, dtype=np.int64)
    P[E.P_S] = p.num_sms
    P[E.P_WS] = p.warp_size
    P[E.P_TB] = p.tb_size
    P[E.P_MAXRES] = p.max_resident_blocks_per_sm
    P[E.P_L1SETS] = p.l1_sets
    P[E.P_L1WAYS] = p.l1_ways
    P[E.P_L2SETS] = p.l2_sets
    P[E.P_L2WAYS] = p.l2_ways
    P[E.P_BANKS] = p.l2_banks
    P[E.P_MSHR] = p.l1_mshrs
    P[E.P_SB] = p.store_buffer_entries
    P[E.P_LAT_L1] = p.latency_l1_hit
    P[E.P_LAT_L2] = p.latency_l2_hit
    P[E.P_LAT_REM] = p.latency_remote_l1
    P[E.P_LAT_MEM] = p.latency_memory
    P[E.P_CPO] = p.compute_cycles_per_abstract_op
    P[E.P_L2ATOM] = p.l2_atomic_cycles
    P[E.P_EPL] = p.cache_line_bytes // p.element_bytes
    P[E.P_COH] = _COH[cfg.coherence]
    P[E.P_CONS] = _CONS[cfg.consistency]
    P[E.P_ACQINV] = int(p.acquire_invalidate)
    P[E.P_L1BANKS] = p.l1_banks
    return P


class _Machine:
    """Memory-system state that persists across the kernel launches of one simulation."""

    def __init__(self, g: CsrGraph, p: SimParams, cfg: SystemConfig):
        n, m = g.num_vertices, g.num_edges
        epl = p.cache_line_bytes // p.element_bytes
        sizes = [n + 1, m, m, n, n, n, n, n, n]
        rbase = np.zeros(E.NUM_REGIONS, dtype=np.int64)
        at = 0
        for r, size in enumerate(sizes):
            rbase[r] = at
            at += -(-max(size, 1) // epl) * epl
        nlines = at // epl

        self.g, self.p, self.cfg, self.n = g, p, cfg, n
        self.rbase = rbase
        self.P = _param_vector(p, cfg)
        self.off = g.out_offsets.astype(np.int64)
        self.tgt = g.out_targets.astype(np.int64)
        self.wts = g.out_weights.astype(np.float64)
        self.deg = g.out_degrees().astype(np.int64)
        self.fv = np.zeros((4, max(n, 1)), dtype=np.float64)
        self.par = np.arange(n, dtype=np.int64)

        self.pc = np.zeros(max(n, 1), dtype=np.int64)
        self.ri = np.zeros((max(n, 1), 4), dtype=np.int64)
        self.rf = np.zeros((max(n, 1), 3), dtype=np.float64)
        self.okind = np.zeros(max(n, 1), dtype=np.int64)
        self.oaddr = np.zeros(max(n, 1), dtype=np.int64)

        S = p.num_sms
        self.l1_tag = np.full((S, p.l1_sets, p.l1_ways), -1, dtype=np.int64)
        self.l1_lru = np.zeros((S, p.l1_sets, p.l1_ways), dtype=np.int64)
        self.l1_rdy = np.zeros((S, p.l1_sets, p.l1_ways), dtype=np.int64)
        self.l1_own = np.zeros((S, p.l1_sets, p.l1_ways), dtype=np.bool_)
        self.l1_ver = np.zeros((S, p.l1_sets, p.l1_ways), dtype=np.int64)
        self.l2_tag = np.full((p.l2_sets, p.l2_ways), -1, dtype=np.int64)
        self.l2_lru = np.zeros((p.l2_sets, p.l2_ways), dtype=np.int64)
        self.owner = np.full(nlines, -1, dtype=np.int64)
        self.line_ver = np.zeros(nlines, dtype=np.int64)
        self.line_wl = np.full(nlines, -1, dtype=np.int64)
        self.line_pv = np.zeros(nlines, dtype=np.int64)
        self.clock = np.zeros(1, dtype=np.int64)
        self.counters = np.zeros(E.NUM_COUNTERS, dtype=np.int64)
        self.breakdown = np.zeros((S, 5), dtype=np.int64)
        self.launches: list[int] = []

    def launch(self, prog, cur=E.R_B0, nxt=E.R_B1, fcur=E.R_F0, fnx=E.R_F1, base=0.0, damping=0.0):
        cycles = E.run_launch(
            prog, cur, nxt, fcur, fnx, float(base), float(damping), len(self.launches),
            self.n, self.off, self.tgt, self.wts, self.deg, self.fv, self.par, self.rbase, self.P,
            self.pc, self.ri, self.rf, self.okind, self.oaddr,
            self.l1_tag, self.l1_lru, self.l1_rdy, self.l1_own, self.l1_ver,
            self.l2_tag, self.l2_lru, self.owner, self.line_ver, self.line_wl, self.line_pv,
            self.clock, self.counters, self.breakdown,
        )
        self.launches.append(int(cycles))
        return int(cycles)

    def row(self, region):
        return self.fv[region - E.R_B0, : self.n]


def _run_pr(mc: _Machine, push: bool, ap: AlgoParams) -> tuple[np.ndarray, int]:
    n, d = mc.n, ap.damping
    cur, nxt = E.R_B0, E.R_B1
    mc.row(cur)[:] = 1.0 / n
    it = 0
    for it in range(1, ap.max_iters + 1):
        x = mc.row(cur)
        base = (1.0 - d) / n + d * float(x[mc.deg == 0].sum()) / n
        if push:
            mc.launch(E.PR_INIT, cur, nxt, base=base, damping=d)
            mc.launch(E.PR_PUSH, cur, nxt, base=base, damping=d)
        else:
            mc.launch(E.PR_PULL, cur, nxt, base=base, damping=d)
        delta = float(np.abs(mc.row(nxt) - mc.row(cur)).sum())
        cur, nxt = nxt, cur
        if delta < ap.epsilon:
            break
    return mc.row(cur).copy(), it


def _run_sssp(mc: _Machine, push: bool, ap: AlgoParams) -> tuple[np.ndarray, int]:
    cur, nxt = E.R_B0, E.R_B1
    mc.row(cur)[:] = math.inf
    mc.row(cur)[ap.source] = 0.0
    if push:
        mc.row(nxt)[:] = math.inf
    else:
        fcur, fnx = E.R_F0, E.R_F1
        mc.row(fcur)[:] = 0.0
        mc.row(fcur)[ap.source] = 1.0
    it = 0
    for it in range(1, ap.rounds(mc.g) + 1):
        if push:
            mc.launch(E.SSSP_INIT, cur, nxt)
            mc.launch(E.SSSP_PUSH, cur, nxt)
            changed = bool((mc.row(nxt) < mc.row(cur)).any())
        else:
            mc.launch(E.SSSP_PULL, cur, nxt, fcur, fnx)
            changed = bool(mc.row(fnx).any())
            fcur, fnx = fnx, fcur
        cur, nxt = nxt, cur
        if not changed:
            break
    return mc.row(cur).copy(), it


def _run_cc(mc: _Machine, ap: AlgoParams) -> tuple[np.ndarray, int]:
    it = 0
    for it in range(1, ap.rounds(mc.g) + 1):
        before = mc.par.copy()
        mc.launch(E.CC_HOOK)
        mc.launch(E.CC_JUMP)
        if np.array_equal(before, mc.par):
            break
    return mc.par.copy(), it


def simulate(g: CsrGraph, algo: str, cfg, params: SimParams | None = None,
             algo_params: AlgoParams | None = None) -> SimReport:
    """Run ``algo`` on ``g`` under configuration ``cfg`` through the timing model.

    Host-side work between launches (convergence checks, buffer swaps, the
    PageRank teleport term) costs zero cycles. Push kernels that accumulate
    into ``next`` are preceded by a small initialization launch.
    """
    params = params or SimParams()
    ap = algo_params or AlgoParams()
    cfg = check_compatible(algo, cfg)
    algo = algo.upper()
    if algo == "SSSP" and g.num_vertices and not 0 <= ap.source < g.num_vertices:
        raise ValueError(f"SSSP source {ap.source} out of range for {g.num_vertices} vertices")

    mc = _Machine(g, params, cfg)
    if g.num_vertices == 0:
        result, iters = np.zeros(0, dtype=np.int64 if algo == "CC" else np.float64), 0
    elif algo == "PR":
        result, iters = _run_pr(mc, cfg.direction is Direction.PUSH, ap)
    elif algo == "SSSP":
        result, iters = _run_sssp(mc, cfg.direction is Direction.PUSH, ap)
    else:
        result, iters = _run_cc(mc, ap)

    return SimReport(
        config=cfg.code(),
        algorithm=algo,
        total_cycles=int(sum(mc.launches)),
        per_sm=mc.breakdown.copy(),
        counters={k: int(mc.counters[i]) for i, k in enumerate(COUNTERS)},
        kernel_launches=len(mc.launches),
        iterations=iters,
        functional_result=result,
        launch_cycles=list(mc.launches),
    )


@dataclass(frozen=True)
class LitmusResult:
    stale_reads: int
    values_ok: bool
    report_cycles: int


def litmus(cfg, params: SimParams | None = None, n: int = 1024, rounds: int = 3) -> LitmusResult:
    """Producer/consumer check across kernel boundaries.

    Each round every thread writes a fresh value, then (next launch) reads a
    value written by a thread in another block. With correct acquire
    invalidation no read may observe an older round's value.
    """
    params = params or SimParams()
    cfg = _as_config(cfg)
    g = CsrGraph(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0))
    mc = _Machine(g, params, cfg)
    ok = True
    for r in range(rounds):
        value = float(r + 1)
        mc.launch(E.LIT_WRITE, base=value)
        mc.launch(E.LIT_READ)
        ok &= bool(np.all(mc.fv[1, :n] == value))
    return LitmusResult(int(mc.counters[E.N_STALE]), ok, int(sum(mc.launches)))


def sweep(g: CsrGraph, algo: str, configs=None, params: SimParams | None = None,
          algo_params: AlgoParams | None = None, workers: int = 1) -> list[SimReport]:
    """Simulate each configuration; results sorted by cycles, ties broken by code."""
    configs = [_as_config(c) for c in (configs or default_config_set(algo))]
    for c in configs:
        check_compatible(algo, c)

    def one(c):
        return simulate(g, algo, c, params, algo_params)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            reports = list(ex.map(one, configs))
    else:
        reports = [one(c) for c in configs]
    return sorted(reports, key=lambda r: (r.total_cycles, r.config))


__all__ = [
    "KernelSpecError", "LitmusResult", "check_compatible", "default_config_set",
    "litmus", "simulate", "sweep",
]
