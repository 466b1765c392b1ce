"""Cycle-approximate event loop for one kernel launch.

Everything here works on flat numpy arrays so the same code runs compiled
(numba) or interpreted. Times are integer cycles relative to the launch start.

Threads map 1:1 onto vertices. Each thread runs a small per-program state
machine: ``_op_at`` names the memory/compute operation at a program counter
and ``_effect`` applies it functionally and returns the next program counter.
A warp issues one "bundle" per cycle, made of the current operation of every
lane that has not finished (lanes that branched differently simply contribute
different operations to the same bundle).
"""

import numpy as np

from .._jit import njit

# operation kinds; K_LOADNB is a load whose value is first used two or more ops later,
# so the warp keeps issuing and only the consumer waits (scoreboarding)
K_DONE, K_LOAD, K_STORE, K_RMW, K_ALOAD, K_COMP, K_LOADNB = 0, 1, 2, 3, 4, 5, 6

# address regions (4-byte elements, each region line aligned)
R_OFF, R_IDX, R_W, R_DEG, R_B0, R_B1, R_F0, R_F1, R_PAR = range(9)
NUM_REGIONS = 9

# programs
(PR_INIT, PR_PUSH, PR_PULL, SSSP_INIT, SSSP_PUSH, SSSP_PULL,
 CC_HOOK, CC_JUMP, LIT_WRITE, LIT_READ) = range(10)

# stall classes
C_BUSY, C_COMP, C_DATA, C_SYNC, C_IDLE = range(5)

# counters
(N_L1H, N_L1M, N_L2H, N_L2M, N_AL1, N_AL2, N_INV, N_FLUSH, N_OWN, N_REM, N_STALE) = range(11)
NUM_COUNTERS = 11

# integer parameter vector layout
(P_S, P_WS, P_TB, P_MAXRES, P_L1SETS, P_L1WAYS, P_L2SETS, P_L2WAYS, P_BANKS, P_MSHR,
 P_SB, P_LAT_L1, P_LAT_L2, P_LAT_REM, P_LAT_MEM, P_CPO, P_L2ATOM, P_EPL, P_COH, P_CONS,
 P_ACQINV, P_L1BANKS) = range(22)
NUM_PARAMS = 22

COH_GPU, COH_DENOVO = 0, 1
CONS_DRF0, CONS_DRF1, CONS_RLX = 0, 1, 2

INF = np.int64(1) << np.int64(62)


# -- thread programs -------------------------------------------------------------

@njit
def _op_at(prog, pc, v, ri, cur, nxt, fcur, fnx, rbase):
    """(kind, element address) of the operation at ``pc`` for thread ``v``."""
    e = ri[v, 0]
    rb = ri[v, 3]
    if prog == PR_INIT:
        return K_STORE, rbase[nxt] + v
    if prog == PR_PUSH:
        if pc == 0:
            return K_LOADNB, rbase[cur] + v
        if pc == 1:
            return K_LOADNB, rbase[R_DEG] + v
        if pc == 2:
            return K_COMP, 0
        if pc == 3:
            return K_LOADNB, rbase[R_OFF] + v
        if pc == 4:
            return K_LOAD, rbase[R_OFF] + v + 1
        if pc == 5:
            return K_LOAD, rbase[R_IDX] + e
        return K_RMW, rbase[nxt] + rb
    if prog == PR_PULL:
        if pc == 0:
            return K_LOADNB, rbase[R_OFF] + v
        if pc == 1:
            return K_LOAD, rbase[R_OFF] + v + 1
        if pc == 2:
            return K_LOAD, rbase[R_IDX] + e
        if pc == 3:
            return K_LOADNB, rbase[cur] + rb
        if pc == 4:
            return K_LOADNB, rbase[R_DEG] + rb
        if pc == 5:
            return K_COMP, 0
        return K_STORE, rbase[nxt] + v
    if prog == SSSP_INIT:
        if pc == 0:
            return K_LOADNB, rbase[cur] + v
        if pc == 1:
            return K_LOADNB, rbase[nxt] + v
        if pc == 2:
            return K_COMP, 0
        if pc == 3:
            return K_STORE, rbase[R_F0] + v
        return K_STORE, rbase[nxt] + v
    if prog == SSSP_PUSH:
        if pc == 0:
            return K_LOAD, rbase[R_F0] + v
        if pc == 1:
            return K_LOADNB, rbase[cur] + v
        if pc == 2:
            return K_LOADNB, rbase[R_OFF] + v
        if pc == 3:
            return K_LOAD, rbase[R_OFF] + v + 1
        if pc == 4:
            return K_LOADNB, rbase[R_IDX] + e
        if pc == 5:
            return K_LOADNB, rbase[R_W] + e
        if pc == 6:
            return K_COMP, 0
        return K_RMW, rbase[nxt] + rb
    if prog == SSSP_PULL:
        if pc == 0:
            return K_LOADNB, rbase[R_OFF] + v
        if pc == 1:
            return K_LOADNB, rbase[R_OFF] + v + 1
        if pc == 2:
            return K_LOAD, rbase[cur] + v
        if pc == 3:
            return K_LOAD, rbase[R_IDX] + e
        if pc == 4:
            return K_LOAD, rbase[fcur] + rb
        if pc == 5:
            return K_LOADNB, rbase[cur] + rb
        if pc == 6:
            return K_LOADNB, rbase[R_W] + e
        if pc == 7:
            return K_COMP, 0
        if pc == 8:
            return K_STORE, rbase[nxt] + v
        return K_STORE, rbase[fnx] + v
    if prog == CC_HOOK:
        if pc == 0:
            return K_LOADNB, rbase[R_OFF] + v
        if pc == 1:
            return K_LOAD, rbase[R_OFF] + v + 1
        if pc == 2:
            return K_LOAD, rbase[R_IDX] + e
        if pc == 3:
            return K_ALOAD, rbase[R_PAR] + v
        if pc == 4:
            return K_ALOAD, rbase[R_PAR] + rb
        if pc == 5:
            return K_COMP, 0
        return K_RMW, rbase[R_PAR] + ri[v, 2]
    if prog == CC_JUMP:
        if pc == 0:
            return K_ALOAD, rbase[R_PAR] + v
        if pc == 1:
            return K_ALOAD, rbase[R_PAR] + ri[v, 2]
        return K_RMW, rbase[R_PAR] + v
    if prog == LIT_WRITE:
        return K_STORE, rbase[R_B0] + v
    # LIT_READ: read the value written by a thread in another block
    return K_LOAD, rbase[R_B0] + rb


@njit
def _effect(prog, pc, v, ri, rf, cur, nxt, fcur, fnx, base, damping,
            off, tgt, wts, deg, fv, par):
    """Apply the operation at ``pc`` for thread ``v``; return the next pc (-1 when done)."""
    if prog == PR_INIT:
        fv[nxt - R_B0, v] = base
        return -1
    if prog == PR_PUSH:
        if pc == 0:
            rf[v, 0] = fv[cur - R_B0, v]
            return 1
        if pc == 1:
            ri[v, 2] = deg[v]
            return 2
        if pc == 2:
            if ri[v, 2] == 0:
                return -1
            rf[v, 1] = damping * rf[v, 0] / ri[v, 2]
            return 3
        if pc == 3:
            ri[v, 0] = off[v]
            return 4
        if pc == 4:
            ri[v, 1] = off[v + 1]
            return 5 if ri[v, 0] < ri[v, 1] else -1
        if pc == 5:
            ri[v, 3] = tgt[ri[v, 0]]
            return 6
        fv[nxt - R_B0, ri[v, 3]] += rf[v, 1]
        ri[v, 0] += 1
        return 5 if ri[v, 0] < ri[v, 1] else -1
    if prog == PR_PULL:
        if pc == 0:
            ri[v, 0] = off[v]
            rf[v, 0] = 0.0
            return 1
        if pc == 1:
            ri[v, 1] = off[v + 1]
            return 2 if ri[v, 0] < ri[v, 1] else 6
        if pc == 2:
            ri[v, 3] = tgt[ri[v, 0]]
            return 3
        if pc == 3:
            rf[v, 1] = fv[cur - R_B0, ri[v, 3]]
            return 4
        if pc == 4:
            ri[v, 2] = deg[ri[v, 3]]
            return 5
        if pc == 5:
            rf[v, 0] += damping * rf[v, 1] / ri[v, 2]
            ri[v, 0] += 1
            return 2 if ri[v, 0] < ri[v, 1] else 6
        fv[nxt - R_B0, v] = base + rf[v, 0]
        return -1
    if prog == SSSP_INIT:
        if pc == 0:
            rf[v, 0] = fv[cur - R_B0, v]
            return 1
        if pc == 1:
            rf[v, 1] = fv[nxt - R_B0, v]
            return 2
        if pc == 2:
            return 3
        if pc == 3:
            fv[R_F0 - R_B0, v] = 1.0 if rf[v, 0] < rf[v, 1] else 0.0
            return 4
        fv[nxt - R_B0, v] = rf[v, 0]
        return -1
    if prog == SSSP_PUSH:
        if pc == 0:
            return -1 if fv[R_F0 - R_B0, v] == 0.0 else 1
        if pc == 1:
            rf[v, 0] = fv[cur - R_B0, v]
            return 2
        if pc == 2:
            ri[v, 0] = off[v]
            return 3
        if pc == 3:
            ri[v, 1] = off[v + 1]
            return 4 if ri[v, 0] < ri[v, 1] else -1
        if pc == 4:
            ri[v, 3] = tgt[ri[v, 0]]
            return 5
        if pc == 5:
            rf[v, 1] = wts[ri[v, 0]]
            return 6
        if pc == 6:
            rf[v, 1] = rf[v, 0] + rf[v, 1]
            return 7
        t = ri[v, 3]
        if rf[v, 1] < fv[nxt - R_B0, t]:
            fv[nxt - R_B0, t] = rf[v, 1]
        ri[v, 0] += 1
        return 4 if ri[v, 0] < ri[v, 1] else -1
    if prog == SSSP_PULL:
        if pc == 0:
            ri[v, 0] = off[v]
            return 1
        if pc == 1:
            ri[v, 1] = off[v + 1]
            return 2
        if pc == 2:
            rf[v, 0] = fv[cur - R_B0, v]
            rf[v, 1] = rf[v, 0]
            return 3 if ri[v, 0] < ri[v, 1] else 8
        if pc == 3:
            ri[v, 3] = tgt[ri[v, 0]]
            return 4
        if pc == 4:
            if fv[fcur - R_B0, ri[v, 3]] == 0.0:
                ri[v, 0] += 1
                return 3 if ri[v, 0] < ri[v, 1] else 8
            return 5
        if pc == 5:
            rf[v, 2] = fv[cur - R_B0, ri[v, 3]]
            return 6
        if pc == 6:
            rf[v, 2] = rf[v, 2] + wts[ri[v, 0]]
            return 7
        if pc == 7:
            if rf[v, 2] < rf[v, 1]:
                rf[v, 1] = rf[v, 2]
            ri[v, 0] += 1
            return 3 if ri[v, 0] < ri[v, 1] else 8
        if pc == 8:
            fv[nxt - R_B0, v] = rf[v, 1]
            return 9
        fv[fnx - R_B0, v] = 1.0 if rf[v, 1] < rf[v, 0] else 0.0
        return -1
    if prog == CC_HOOK:
        if pc == 0:
            ri[v, 0] = off[v]
            return 1
        if pc == 1:
            ri[v, 1] = off[v + 1]
            return 2 if ri[v, 0] < ri[v, 1] else -1
        if pc == 2:
            ri[v, 3] = tgt[ri[v, 0]]
            return 3
        if pc == 3:
            ri[v, 2] = par[v]
            return 4
        if pc == 4:
            ri[v, 3] = par[ri[v, 3]]
            return 5
        if pc == 5:
            a = ri[v, 2]
            b = ri[v, 3]
            if a == b:
                ri[v, 0] += 1
                return 2 if ri[v, 0] < ri[v, 1] else -1
            ri[v, 2] = max(a, b)
            ri[v, 3] = min(a, b)
            return 6
        hi = ri[v, 2]
        if par[hi] == hi:  # compare-and-swap
            par[hi] = ri[v, 3]
        ri[v, 0] += 1
        return 2 if ri[v, 0] < ri[v, 1] else -1
    if prog == CC_JUMP:
        if pc == 0:
            ri[v, 2] = par[v]
            ri[v, 0] = ri[v, 2]
            return 1
        if pc == 1:
            p = ri[v, 2]
            gp = par[p]
            if gp == p:
                return 2 if p != ri[v, 0] else -1
            ri[v, 2] = gp
            return 1
        par[v] = ri[v, 2]
        return -1
    if prog == LIT_WRITE:
        fv[0, v] = base
        return -1
    fv[1, v] = fv[0, ri[v, 3]]
    return -1


@njit
def _set_op(prog, v, pc, ri, okind, oaddr, cur, nxt, fcur, fnx, rbase):
    if pc < 0:
        okind[v] = K_DONE
        oaddr[v] = 0
    else:
        k, a = _op_at(prog, pc, v, ri, cur, nxt, fcur, fnx, rbase)
        okind[v] = k
        oaddr[v] = a


# -- cache structures ----------------------------------------------------------------

@njit
def _l1_find(l1_tag, s, line, nsets, nways):
    st = line % nsets
    for w in range(nways):
        if l1_tag[s, st, w] == line:
            return w
    return -1


@njit
def _l2_access(l2_tag, l2_lru, line, clock, nsets, nways):
    """Touch ``line`` in the L2, allocating on a miss; True on a hit."""
    st = line % nsets
    clock[0] += 1
    victim = 0
    oldest = INF
    for w in range(nways):
        if l2_tag[st, w] == line:
            l2_lru[st, w] = clock[0]
            return True
        if l2_tag[st, w] < 0:
            if oldest > -1:
                victim = w
                oldest = -1
        elif l2_lru[st, w] < oldest:
            victim = w
            oldest = l2_lru[st, w]
    l2_tag[st, victim] = line
    l2_lru[st, victim] = clock[0]
    return False


@njit
def _l1_install(s, line, ready, owned, ver, l1_tag, l1_lru, l1_rdy, l1_own, l1_ver,
                owner, l2_tag, l2_lru, clock, counters, P):
    """Allocate ``line`` in SM ``s``'s L1 (or refresh it); evicting an owned line writes it back."""
    nsets = P[P_L1SETS]
    nways = P[P_L1WAYS]
    st = line % nsets
    clock[0] += 1
    way = -1
    oldest = INF
    for w in range(nways):
        if l1_tag[s, st, w] == line:
            way = w
            break
    if way < 0:
        for w in range(nways):
            if l1_tag[s, st, w] < 0:
                way = w
                break
    if way < 0:
        for w in range(nways):
            if l1_lru[s, st, w] < oldest:
                oldest = l1_lru[s, st, w]
                way = w
        old = l1_tag[s, st, way]
        if l1_own[s, st, way]:
            counters[N_FLUSH] += 1
            owner[old] = -1
            _l2_access(l2_tag, l2_lru, old, clock, P[P_L2SETS], P[P_L2WAYS])
    l1_tag[s, st, way] = line
    l1_lru[s, st, way] = clock[0]
    l1_rdy[s, st, way] = ready
    l1_own[s, st, way] = owned
    l1_ver[s, st, way] = ver
    return way


@njit
def _l1_drop(s, line, l1_tag, l1_own, nsets, nways):
    w = _l1_find(l1_tag, s, line, nsets, nways)
    if w >= 0:
        st = line % nsets
        l1_tag[s, st, w] = -1
        l1_own[s, st, w] = False


@njit
def _self_invalidate(s, keep_owned, l1_tag, l1_own):
    n = 0
    for st in range(l1_tag.shape[1]):
        for w in range(l1_tag.shape[2]):
            if l1_tag[s, st, w] >= 0 and not (keep_owned and l1_own[s, st, w]):
                l1_tag[s, st, w] = -1
                l1_own[s, st, w] = False
                n += 1
    return n


@njit
def _mshr_acquire(heap, hn, s, ts, cap):
    """Earliest start for a new miss at ``ts``; frees the oldest entry if all are busy."""
    if hn[s] < cap:
        return ts
    top = heap[s, 0]
    # pop root
    hn[s] -= 1
    n = hn[s]
    heap[s, 0] = heap[s, n]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= n:
            break
        c = l
        if l + 1 < n and heap[s, l + 1] < heap[s, l]:
            c = l + 1
        if heap[s, c] < heap[s, i]:
            tmp = heap[s, c]
            heap[s, c] = heap[s, i]
            heap[s, i] = tmp
            i = c
        else:
            break
    return max(ts, top)


@njit
def _mshr_push(heap, hn, s, done):
    i = hn[s]
    heap[s, i] = done
    hn[s] += 1
    while i > 0:
        p = (i - 1) // 2
        if heap[s, p] > heap[s, i]:
            tmp = heap[s, p]
            heap[s, p] = heap[s, i]
            heap[s, i] = tmp
            i = p
        else:
            break


@njit
def _sb_push(sb, sb_head, sb_cnt, sb_last, s, ts, lat, cap):
    """Queue a write in the store buffer; returns (accept time, completion time)."""
    start = ts
    if sb_cnt[s] == cap:
        start = max(ts, sb[s, sb_head[s]])
        sb_head[s] = (sb_head[s] + 1) % cap
        sb_cnt[s] -= 1
    done = max(sb_last[s], start + lat)
    sb[s, (sb_head[s] + sb_cnt[s]) % cap] = done
    sb_cnt[s] += 1
    sb_last[s] = done
    return start, done


@njit
def _note_write(line, launch_id, line_ver, line_wl, line_pv):
    if line_wl[line] != launch_id:
        line_pv[line] = line_ver[line]
        line_wl[line] = launch_id
    line_ver[line] += 1


# -- one kernel launch ---------------------------------------------------------------

@njit
def run_launch(prog, cur, nxt, fcur, fnx, base, damping, launch_id,
               n, off, tgt, wts, deg, fv, par, rbase, P,
               pc, ri, rf, okind, oaddr,
               l1_tag, l1_lru, l1_rdy, l1_own, l1_ver,
               l2_tag, l2_lru, owner, line_ver, line_wl, line_pv,
               clock, counters, breakdown):
    """Simulate one launch of ``prog`` over ``n`` threads; returns its cycle count.

    ``breakdown`` (num_sms x 5) is incremented with this launch's busy/comp/data/sync/idle
    cycles; every row grows by exactly the returned count.
    """
    S = P[P_S]
    ws = P[P_WS]
    tb = P[P_TB]
    maxres = P[P_MAXRES]
    l1sets = P[P_L1SETS]
    l1ways = P[P_L1WAYS]
    l2sets = P[P_L2SETS]
    l2ways = P[P_L2WAYS]
    nbanks = P[P_BANKS]
    l1banks = P[P_L1BANKS]
    mcap = P[P_MSHR]
    sbcap = P[P_SB]
    lat_l1 = P[P_LAT_L1]
    lat_l2 = P[P_LAT_L2]
    lat_rem = P[P_LAT_REM]
    lat_mem = P[P_LAT_MEM]
    cpo = P[P_CPO]
    l2atom = P[P_L2ATOM]
    epl = P[P_EPL]
    denovo = P[P_COH] == COH_DENOVO
    cons = P[P_CONS]

    nw = (n + ws - 1) // ws
    wpb = tb // ws
    nblocks = (n + tb - 1) // tb

    w_state = np.zeros(nw, np.int64)  # 0 waiting, 1 active, 2 finished issuing, 3 retired
    w_ready = np.zeros(nw, np.int64)
    w_reason = np.zeros(nw, np.int64)
    w_adone = np.zeros(nw, np.int64)
    w_pend = np.zeros(nw, np.int64)

    ldst_free = np.zeros(S, np.int64)
    heap = np.zeros((S, mcap), np.int64)
    hn = np.zeros(S, np.int64)
    sb = np.zeros((S, sbcap), np.int64)
    sb_head = np.zeros(S, np.int64)
    sb_cnt = np.zeros(S, np.int64)
    sb_last = np.zeros(S, np.int64)
    bank_busy = np.zeros(nbanks, np.int64)
    l1bank_busy = np.zeros((S, l1banks), np.int64)

    slots = np.full((S, maxres), -1, np.int64)
    next_k = np.zeros(S, np.int64)
    acct = np.zeros(S, np.int64)
    cls = np.full(S, C_SYNC, np.int64)
    nxt_ev = np.zeros(S, np.int64)
    fin = np.zeros(S, np.bool_)
    done_t = np.zeros(S, np.int64)
    rr = np.zeros(S, np.int64)

    req_line = np.zeros(ws, np.int64)
    req_kind = np.zeros(ws, np.int64)
    req_cnt = np.zeros(ws, np.int64)
    req_mult = np.zeros(ws, np.int64)

    # every fill of the previous launch completed before it ended; times restart at 0
    l1_rdy[:] = 0

    # acquire at kernel start
    if P[P_ACQINV] != 0:
        for s in range(S):
            counters[N_INV] += _self_invalidate(s, denovo, l1_tag, l1_own)

    for s in range(S):
        if s >= nblocks:
            fin[s] = True

    kernel_end = np.int64(0)
    nslotw = maxres * wpb

    while True:
        s = -1
        t = INF
        for q in range(S):
            if not fin[q] and nxt_ev[q] < t:
                t = nxt_ev[q]
                s = q
        if s < 0:
            break

        breakdown[s, cls[s]] += t - acct[s]
        acct[s] = t

        # retire finished warps and free their blocks
        for j in range(maxres):
            b = slots[s, j]
            if b < 0:
                continue
            alive = False
            for w in range(b * wpb, min(b * wpb + wpb, nw)):
                if w_state[w] == 2 and w_ready[w] <= t:
                    w_state[w] = 3
                if w_state[w] != 3:
                    alive = True
            if not alive:
                slots[s, j] = -1

        # dispatch waiting blocks into free slots
        for j in range(maxres):
            if slots[s, j] >= 0:
                continue
            b = s + next_k[s] * S
            if b >= nblocks:
                break
            next_k[s] += 1
            slots[s, j] = b
            for w in range(b * wpb, min(b * wpb + wpb, nw)):
                w_state[w] = 1
                w_ready[w] = t
                w_reason[w] = C_COMP
                w_adone[w] = 0
                w_pend[w] = 0
                for v in range(w * ws, min(w * ws + ws, n)):
                    pc[v] = 0
                    ri[v, 0] = 0
                    ri[v, 1] = 0
                    ri[v, 2] = 0
                    ri[v, 3] = (v + tb) % n if prog == LIT_READ else v
                    rf[v, 0] = 0.0
                    rf[v, 1] = 0.0
                    rf[v, 2] = 0.0
                    _set_op(prog, v, 0, ri, okind, oaddr, cur, nxt, fcur, fnx, rbase)

        occupied = False
        for j in range(maxres):
            if slots[s, j] >= 0:
                occupied = True
        if not occupied:
            # all blocks done: drain the store buffer, then idle until the kernel ends
            d = max(t, sb_last[s])
            breakdown[s, C_SYNC] += d - t
            acct[s] = d
            fin[s] = True
            done_t[s] = d
            if d > kernel_end:
                kernel_end = d
            continue

        issued = False
        for q in range(nslotw):
            idx = (rr[s] + q) % nslotw
            b = slots[s, idx // wpb]
            if b < 0:
                continue
            w = b * wpb + idx % wpb
            if w >= nw or w_state[w] != 1 or w_ready[w] > t:
                continue
            lo = w * ws
            hi = min(lo + ws, n)

            has_atomic = False
            consumer = False
            for v in range(lo, hi):
                k = okind[v]
                if k == K_RMW or k == K_ALOAD:
                    has_atomic = True
                if k != K_LOADNB and k != K_DONE:
                    consumer = True
            if consumer and w_pend[w] > t:
                w_ready[w] = w_pend[w]
                w_reason[w] = C_DATA
                continue
            if has_atomic and cons != CONS_RLX:
                c = w_adone[w]
                if cons == CONS_DRF0 and sb_last[s] > c:
                    c = sb_last[s]
                if c > t:
                    w_ready[w] = c
                    w_reason[w] = C_SYNC
                    continue

            # ---- issue this warp's bundle ----
            if has_atomic and cons == CONS_DRF0 and P[P_ACQINV] != 0:
                counters[N_INV] += _self_invalidate(s, denovo, l1_tag, l1_own)

            nreq = 0
            comp = False
            for v in range(lo, hi):
                k = okind[v]
                if k == K_DONE:
                    continue
                if k == K_COMP:
                    comp = True
                    continue
                line = oaddr[v] // epl
                # same-address lanes of an atomic request serialize; distinct words proceed together
                mult = 1
                if k == K_RMW or k == K_ALOAD:
                    for u in range(lo, v):
                        if okind[u] == k and oaddr[u] == oaddr[v]:
                            mult += 1
                found = False
                for r in range(nreq):
                    if req_line[r] == line and req_kind[r] == k:
                        req_cnt[r] += 1
                        if mult > req_mult[r]:
                            req_mult[r] = mult
                        found = True
                        break
                if not found:
                    req_line[nreq] = line
                    req_kind[nreq] = k
                    req_cnt[nreq] = 1
                    req_mult[nreq] = 1
                    nreq += 1

            r_data = np.int64(0)
            r_pend = np.int64(0)
            r_sync = np.int64(0)
            r_comp = t + cpo if comp else np.int64(0)
            slot_end = t

            for r in range(nreq):
                line = req_line[r]
                k = req_kind[r]
                cnt = req_cnt[r]
                mult = req_mult[r]
                ts = max(t, ldst_free[s])
                ldst_free[s] = ts + 1
                slot_end = ts + 1

                if k == K_LOAD or k == K_LOADNB:
                    way = _l1_find(l1_tag, s, line, l1sets, l1ways)
                    if way >= 0:
                        st = line % l1sets
                        rdy = l1_rdy[s, st, way]
                        if rdy <= ts:
                            counters[N_L1H] += 1
                            done = ts + lat_l1
                        else:
                            counters[N_L1M] += 1  # merged into the in-flight fill
                            done = rdy
                        if not l1_own[s, st, way]:
                            need = line_pv[line] if line_wl[line] == launch_id else line_ver[line]
                            if l1_ver[s, st, way] < need:
                                counters[N_STALE] += 1
                        clock[0] += 1
                        l1_lru[s, st, way] = clock[0]
                    else:
                        counters[N_L1M] += 1
                        o = owner[line]
                        if denovo and o >= 0 and o != s:
                            counters[N_REM] += 1
                            lat = lat_rem
                        elif _l2_access(l2_tag, l2_lru, line, clock, l2sets, l2ways):
                            counters[N_L2H] += 1
                            lat = lat_l2
                        else:
                            counters[N_L2M] += 1
                            lat = lat_mem
                        st0 = _mshr_acquire(heap, hn, s, ts, mcap)
                        done = st0 + lat
                        _mshr_push(heap, hn, s, done)
                        _l1_install(s, line, done, False, line_ver[line], l1_tag, l1_lru, l1_rdy,
                                    l1_own, l1_ver, owner, l2_tag, l2_lru, clock, counters, P)
                    if k == K_LOADNB:
                        if done > r_pend:
                            r_pend = done
                    elif done > r_data:
                        r_data = done

                elif k == K_STORE:
                    _note_write(line, launch_id, line_ver, line_wl, line_pv)
                    if denovo:
                        if owner[line] == s:
                            way = _l1_find(l1_tag, s, line, l1sets, l1ways)
                            st = line % l1sets
                            clock[0] += 1
                            l1_lru[s, st, way] = clock[0]
                            l1_ver[s, st, way] = line_ver[line]
                        else:
                            counters[N_OWN] += 1
                            o = owner[line]
                            if o >= 0:
                                counters[N_REM] += 1
                                _l1_drop(o, line, l1_tag, l1_own, l1sets, l1ways)
                                lat = lat_rem
                            else:
                                _l2_access(l2_tag, l2_lru, line, clock, l2sets, l2ways)
                                lat = lat_l2
                            acc, done = _sb_push(sb, sb_head, sb_cnt, sb_last, s, ts, lat, sbcap)
                            owner[line] = s
                            _l1_install(s, line, done, True, line_ver[line], l1_tag, l1_lru, l1_rdy,
                                        l1_own, l1_ver, owner, l2_tag, l2_lru, clock, counters, P)
                            if acc + 1 > r_data:
                                r_data = acc + 1
                    else:
                        # write-through, no write-allocate
                        counters[N_FLUSH] += 1
                        _l2_access(l2_tag, l2_lru, line, clock, l2sets, l2ways)
                        acc, done = _sb_push(sb, sb_head, sb_cnt, sb_last, s, ts, lat_l2, sbcap)
                        way = _l1_find(l1_tag, s, line, l1sets, l1ways)
                        if way >= 0:
                            l1_ver[s, line % l1sets, way] = line_ver[line]
                        if acc + 1 > r_data:
                            r_data = acc + 1

                else:  # atomic read-modify-write or atomic load
                    if k == K_RMW:
                        _note_write(line, launch_id, line_ver, line_wl, line_pv)
                    if denovo:
                        counters[N_AL1] += cnt
                        if owner[line] == s:
                            way = _l1_find(l1_tag, s, line, l1sets, l1ways)
                            st = line % l1sets
                            bk = line % l1banks
                            svc = max(ts, l1bank_busy[s, bk], l1_rdy[s, st, way])
                            l1bank_busy[s, bk] = svc + mult * lat_l1
                            done = svc + mult * lat_l1
                            clock[0] += 1
                            l1_lru[s, st, way] = clock[0]
                            l1_ver[s, st, way] = line_ver[line]
                        else:
                            counters[N_OWN] += 1
                            o = owner[line]
                            if o >= 0:
                                counters[N_REM] += 1
                                _l1_drop(o, line, l1_tag, l1_own, l1sets, l1ways)
                                lat = lat_rem
                            elif _l2_access(l2_tag, l2_lru, line, clock, l2sets, l2ways):
                                counters[N_L2H] += 1
                                lat = lat_l2
                            else:
                                counters[N_L2M] += 1
                                lat = lat_mem
                            st0 = _mshr_acquire(heap, hn, s, ts, mcap)
                            bk = line % nbanks
                            svc = max(st0, bank_busy[bk])
                            bank_busy[bk] = svc + l2atom
                            fill = svc + lat
                            done = fill + mult * lat_l1
                            _mshr_push(heap, hn, s, fill)
                            owner[line] = s
                            _l1_install(s, line, fill, True, line_ver[line], l1_tag, l1_lru, l1_rdy,
                                        l1_own, l1_ver, owner, l2_tag, l2_lru, clock, counters, P)
                    else:
                        counters[N_AL2] += cnt
                        if _l2_access(l2_tag, l2_lru, line, clock, l2sets, l2ways):
                            counters[N_L2H] += 1
                            lat = lat_l2
                        else:
                            counters[N_L2M] += 1
                            lat = lat_mem
                        st0 = _mshr_acquire(heap, hn, s, ts, mcap)
                        bk = line % nbanks
                        svc = max(st0, bank_busy[bk])
                        bank_busy[bk] = svc + mult * l2atom
                        done = svc + lat + mult * l2atom
                        _mshr_push(heap, hn, s, done)
                    if k == K_ALOAD or cons == CONS_DRF0:
                        if done > r_sync:
                            r_sync = done
                    elif done > w_adone[w]:
                        w_adone[w] = done

            if nreq > 0 and slot_end + 1 > r_data:
                r_data = slot_end + 1

            # functional commit, lane order
            alldone = True
            for v in range(lo, hi):
                if okind[v] == K_DONE:
                    continue
                npc = _effect(prog, pc[v], v, ri, rf, cur, nxt, fcur, fnx, base, damping,
                              off, tgt, wts, deg, fv, par)
                pc[v] = npc
                _set_op(prog, v, npc, ri, okind, oaddr, cur, nxt, fcur, fnx, rbase)
                if npc >= 0:
                    alldone = False

            ready = r_data
            reason = C_DATA
            if r_comp > ready:
                ready = r_comp
                reason = C_COMP
            if r_sync >= ready:
                ready = r_sync
                reason = C_SYNC
            if ready < t + 1:
                ready = t + 1
            if r_pend > w_pend[w]:
                w_pend[w] = r_pend
            if alldone:
                w_state[w] = 2
                if w_pend[w] > ready:
                    ready = w_pend[w]
                    reason = C_DATA
                if w_adone[w] > ready:
                    ready = w_adone[w]
                    reason = C_SYNC
            w_ready[w] = ready
            w_reason[w] = reason

            breakdown[s, C_BUSY] += 1
            acct[s] = t + 1
            rr[s] = (idx + 1) % nslotw
            issued = True
            break

        # next event for this SM and the stall class until then
        mn = INF
        any_data = False
        any_comp = False
        for j in range(maxres):
            b = slots[s, j]
            if b < 0:
                continue
            for w in range(b * wpb, min(b * wpb + wpb, nw)):
                if w_state[w] == 1 or w_state[w] == 2:
                    if w_ready[w] < mn:
                        mn = w_ready[w]
                    if w_reason[w] == C_DATA:
                        any_data = True
                    elif w_reason[w] == C_COMP:
                        any_comp = True
        if issued and mn < t + 1:
            mn = t + 1
        if mn <= t:
            mn = t + 1  # a block with only retired warps is freed on the next visit
        nxt_ev[s] = mn
        if any_data:
            cls[s] = C_DATA
        elif any_comp:
            cls[s] = C_COMP
        else:
            cls[s] = C_SYNC

    for s in range(S):
        breakdown[s, C_IDLE] += kernel_end - done_t[s]
    return kernel_end
