"""Compiled full-game engine.

One njit-compiled loop plays an entire match: Maker policy, Breaker policy,
incremental potentials, the per-turn change decomposition, optional
per-claim inequality counters and the episode state machine. It mirrors the
pure-Python engine (game/potential/strategies/ledger modules) move for move
and float for float; tests/test_kernel.py enforces the lockstep, so any
rule change must land in both places.

Selection of the maximum-potential unclaimed edge exploits that a node's
potential depends only on its degree pair (deg_M, deg_B): nodes are grouped
into equivalence classes with bitset member sets, classes are ranked by a
lazy max-heap, and class pairs are enumerated best-first. Claiming an edge
moves both endpoints into other classes, so exhausted class pairs do not
pile up in front of the search the way claimed node pairs would. The
min-edge-index tie-break inside a class pair is a word-parallel scan over
the unclaimed-adjacency bitsets.

Numbers shared with the Python side use literally identical expressions
(see potential.node_deficit_value / node_potential_value).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .game import Owner
from .ledger import EpisodeConstants, TurnLedger
from .potential import PotentialParams
from .strategies import StrategyConfig, StrategyKind

MAKER_CODES = {
    StrategyKind.MAKER_CE_STAR: 0,
    StrategyKind.MAKER_RANDOM: 1,
    StrategyKind.MAKER_MAX_POTENTIAL: 2,
    StrategyKind.MAKER_GREEDY_DEGREE: 3,
}
BREAKER_CODES = {
    StrategyKind.BREAKER_POTENTIAL: 0,
    StrategyKind.BREAKER_CE: 1,
}

# Float ledger columns.
(
    COL_POT_BEFORE,
    COL_POT_AFTER,
    COL_INC,
    COL_DEC_FREE,
    COL_UTT,
    COL_OTT,
    COL_DEC_TAILS,
    COL_DEC_ZERO,
    COL_CRITDIFF,
    COL_RESTDIFF,
    COL_POT_U_BEFORE,
    COL_POT_V_BEFORE,
    COL_INC_U,
    COL_INC_V,
    COL_DEC_HEADS_U,
    COL_DEC_HEADS_V,
    COL_MAXPOT_AFTER,
) = range(17)
N_FCOLS = 17

# Integer ledger columns.
(
    ICOL_MU,
    ICOL_MV,
    ICOL_F,
    ICOL_ISOLATION,
    ICOL_SHORTFALL,
    ICOL_CRITICAL,
    ICOL_RAGGED,
    ICOL_EPISODE,
) = range(8)
N_ICOLS = 8

# Episode record columns; trigger is a bitmask (1 = t1, 2 = t2, 4 = t3).
EPI_T0, EPI_ANCHOR, EPI_TSTAR, EPI_CRIT, EPI_TRIGGER, EPI_L8, EPI_L9, EPI_VIOL = range(8)
EPF_POT_REF, EPF_ANCHOR_REF, EPF_POT_STAR, EPF_INC_SUM = range(4)

# Per-claim check counters.
(
    CHK_L3,
    CHK_L4I_FACTOR,
    CHK_L4I_TOTAL,
    CHK_L4II_EXACT,
    CHK_L4II_TOTAL,
    CHK_L2_EVENTS,
    CHK_L2_VIOL,
) = range(7)
N_CHK = 7

# Registry scalar slots (rst array).
RST_HEAP, RST_FREE_TOP, RST_FRESH, RST_OCC = range(4)

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True, inline="always")
def _eidx(n, u, v):
    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


@njit(cache=True, inline="always")
def _row_start(n, u):
    return u * (2 * n - u - 1) // 2


@njit(cache=True, inline="always")
def _edge_uv(n, idx):
    # Invert the lexicographic rank; float estimate plus exact fix-up.
    t = 2.0 * n - 1.0
    u = int((t - math.sqrt(t * t - 8.0 * idx)) * 0.5)
    if u < 0:
        u = 0
    while u > 0 and _row_start(n, u) > idx:
        u -= 1
    while u + 1 < n and _row_start(n, u + 1) <= idx:
        u += 1
    v = u + 1 + (idx - _row_start(n, u))
    return u, v


@njit(cache=True, inline="always")
def _rng_next(rng_state):
    rng_state[0] = rng_state[0] + np.uint64(_GAMMA)
    z = rng_state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _deficit(dm, db, p0, q):
    # Must stay literally identical to potential.node_deficit_value.
    return p0 * dm * (q - 0.5 * dm) - db


@njit(cache=True, inline="always")
def _pot_value(d, q, ln_mu):
    x = (d / q) * ln_mu
    if x > 709.0:
        return np.inf
    return math.exp(x)


@njit(cache=True, inline="always")
def _lowest_bit(word):
    b = 0
    while (word >> np.uint64(b)) & np.uint64(1) == np.uint64(0):
        b += 1
    return b


# -- lazy max-heap over (score desc, id asc) with version stamps -------------


@njit(cache=True, inline="always")
def _heap_less(hp, hn, i, j):
    if hp[i] != hp[j]:
        return hp[i] > hp[j]
    return hn[i] < hn[j]


@njit(cache=True)
def _heap_push(hp, hn, hv, size, score, node, ver):
    i = size
    hp[i] = score
    hn[i] = node
    hv[i] = ver
    while i > 0:
        parent = (i - 1) >> 1
        if _heap_less(hp, hn, i, parent):
            hp[i], hp[parent] = hp[parent], hp[i]
            hn[i], hn[parent] = hn[parent], hn[i]
            hv[i], hv[parent] = hv[parent], hv[i]
            i = parent
        else:
            break
    return size + 1


@njit(cache=True)
def _heap_pop(hp, hn, hv, size):
    size -= 1
    score = hp[0]
    node = hn[0]
    ver = hv[0]
    if size > 0:
        hp[0] = hp[size]
        hn[0] = hn[size]
        hv[0] = hv[size]
        i = 0
        while True:
            left = 2 * i + 1
            if left >= size:
                break
            best = left
            right = left + 1
            if right < size and _heap_less(hp, hn, right, left):
                best = right
            if _heap_less(hp, hn, best, i):
                hp[i], hp[best] = hp[best], hp[i]
                hn[i], hn[best] = hn[best], hn[i]
                hv[i], hv[best] = hv[best], hv[i]
                i = best
            else:
                break
    return score, node, ver, size


# -- class registry -----------------------------------------------------------
#
# A class is a set of unsaturated nodes sharing one (deg_M, deg_B) pair and
# therefore one potential. Arrays per registry:
#   node_cls[n]      class id per node (-1 = saturated / none)
#   cls_key[CCAP]    packed (dm << 32) | db, valid while size > 0
#   cls_pot[CCAP]    class score (node potential, or deg_M for the greedy
#                    Maker's registry)
#   cls_size[CCAP]   live member count (0 = dead, id recyclable)
#   cls_ver[CCAP]    bumped on death so heap entries go stale
#   cls_bits[CCAP,W] member bitset (all-zero when dead)
#   freelist[CCAP]   stack of recyclable ids
#   tabk/tabc        open-addressing key -> cid table (cid -2 empty, -1 dead)
#   chp/chn/chv      lazy class heap by (pot desc, cid asc)
#   rst[4]           heap size, freelist top, fresh counter, table occupancy


@njit(cache=True, inline="always")
def _tab_hash(key, mask):
    z = np.uint64(key) * np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(31)
    return np.int64(z & np.uint64(mask))


@njit(cache=True)
def _tab_rebuild(tabk, tabc, cls_key, cls_size, rst, fresh):
    mask = tabk.shape[0] - 1
    for s in range(tabk.shape[0]):
        tabc[s] = -2
    occ = 0
    for cid in range(fresh):
        if cls_size[cid] > 0:
            slot = _tab_hash(cls_key[cid], mask)
            while tabc[slot] >= 0:
                slot = (slot + 1) & mask
            tabk[slot] = cls_key[cid]
            tabc[slot] = cid
            occ += 1
    rst[RST_OCC] = occ


@njit(cache=True)
def _reg_leave(w, node_cls, cls_key, cls_size, cls_ver, cls_bits, freelist,
               tabk, tabc, rst):
    cid = node_cls[w]
    node_cls[w] = -1
    cls_bits[cid, w >> 6] &= ~(np.uint64(1) << np.uint64(w & 63))
    cls_size[cid] -= 1
    if cls_size[cid] == 0:
        cls_ver[cid] += 1
        # invalidate the table entry so the id can be recycled safely
        mask = tabk.shape[0] - 1
        slot = _tab_hash(cls_key[cid], mask)
        while True:
            if tabc[slot] == cid and tabk[slot] == cls_key[cid]:
                tabc[slot] = -1
                break
            if tabc[slot] == -2:
                break
            slot = (slot + 1) & mask
        freelist[rst[RST_FREE_TOP]] = cid
        rst[RST_FREE_TOP] += 1


@njit(cache=True)
def _reg_join(w, key, potval, node_cls, cls_key, cls_pot, cls_size, cls_ver,
              cls_bits, freelist, tabk, tabc, chp, chn, chv, rst):
    mask = tabk.shape[0] - 1
    slot = _tab_hash(key, mask)
    dead_slot = -1
    cid = -1
    while True:
        c = tabc[slot]
        if c == -2:
            break
        if c == -1:
            if dead_slot < 0:
                dead_slot = slot
        elif tabk[slot] == key:
            cid = c
            break
        slot = (slot + 1) & mask
    if cid < 0:
        # create a class
        if rst[RST_FREE_TOP] > 0:
            rst[RST_FREE_TOP] -= 1
            cid = freelist[rst[RST_FREE_TOP]]
        else:
            cid = rst[RST_FRESH]
            rst[RST_FRESH] += 1
        cls_key[cid] = key
        cls_pot[cid] = potval
        cls_size[cid] = 0
        rst[RST_HEAP] = _heap_push(chp, chn, chv, rst[RST_HEAP], potval, cid,
                                   cls_ver[cid])
        if rst[RST_HEAP] >= chp.shape[0] - 8:
            # compact: one live entry per live class
            size = 0
            for c2 in range(rst[RST_FRESH]):
                if cls_size[c2] > 0 or c2 == cid:
                    size = _heap_push(chp, chn, chv, size, cls_pot[c2], c2,
                                      cls_ver[c2])
            rst[RST_HEAP] = size
        if dead_slot >= 0:
            slot = dead_slot
        else:
            rst[RST_OCC] += 1
        tabk[slot] = key
        tabc[slot] = cid
    node_cls[w] = cid
    cls_bits[cid, w >> 6] |= np.uint64(1) << np.uint64(w & 63)
    cls_size[cid] += 1
    if rst[RST_OCC] > (tabk.shape[0]) * 3 // 4:
        _tab_rebuild(tabk, tabc, cls_key, cls_size, rst, rst[RST_FRESH])


@njit(cache=True)
def _cross_test(n, W, uadj, bits_a, bits_b, same):
    """Smallest-index unclaimed edge with one endpoint per class (or both in
    the same class when ``same``); -1 if none. Rows ascend, so the first hit
    is the minimum edge index."""
    for w in range(W):
        rows = bits_a[w] if same else (bits_a[w] | bits_b[w])
        while rows != np.uint64(0):
            b = _lowest_bit(rows)
            rows &= rows - np.uint64(1)
            r = 64 * w + b
            if same:
                tgt = bits_a
            elif (bits_a[w] >> np.uint64(b)) & np.uint64(1) != np.uint64(0):
                tgt = bits_b
            else:
                tgt = bits_a
            if b < 63:
                m = uadj[r, w] & tgt[w] & (_ONES << np.uint64(b + 1))
                if m != np.uint64(0):
                    return np.int64(_eidx(n, r, 64 * w + _lowest_bit(m)))
            for ww in range(w + 1, W):
                m = uadj[r, ww] & tgt[ww]
                if m != np.uint64(0):
                    return np.int64(_eidx(n, r, 64 * ww + _lowest_bit(m)))
    return np.int64(-1)


@njit(cache=True)
def _select_registry(
    n, W, uadj,
    cls_pot, cls_size, cls_ver, cls_bits, chp, chn, chv, rst,
    prefix_cid, prefix_pot, tmp_pot, tmp_cid, tmp_ver,
    pk_sum, pk_i, pk_j,
):
    """Unclaimed edge maximizing class-pot sums, ties by edge index, or -1.

    Best-first over class pairs (i <= j in the harvested descending class
    order). All class pairs tied at the current best sum are flushed
    together and the smallest edge index among their candidates wins.
    """
    top_size = 0
    harvested = 0
    ph_size = 0
    heap_size = rst[RST_HEAP]

    def _ensure(k, heap_size, top_size, harvested):
        while top_size <= k:
            if heap_size == 0:
                return False, heap_size, top_size, harvested
            pot, cid, ver, heap_size = _heap_pop(chp, chn, chv, heap_size)
            if ver != cls_ver[cid] or cls_size[cid] == 0:
                continue
            prefix_cid[top_size] = cid
            prefix_pot[top_size] = pot
            top_size += 1
            tmp_pot[harvested] = pot
            tmp_cid[harvested] = cid
            tmp_ver[harvested] = ver
            harvested += 1
        return True, heap_size, top_size, harvested

    best = np.int64(-1)
    ok, heap_size, top_size, harvested = _ensure(0, heap_size, top_size, harvested)
    if ok:
        # seed the lattice with the diagonal pair (0, 0)
        pk_sum[0] = prefix_pot[0] + prefix_pot[0]
        pk_i[0] = 0
        pk_j[0] = 0
        ph_size = 1
        cur_sum = np.inf
        while ph_size > 0:
            s = pk_sum[0]
            ii = pk_i[0]
            jj = pk_j[0]
            # pop root
            ph_size -= 1
            if ph_size > 0:
                pk_sum[0] = pk_sum[ph_size]
                pk_i[0] = pk_i[ph_size]
                pk_j[0] = pk_j[ph_size]
                pos = 0
                while True:
                    left = 2 * pos + 1
                    if left >= ph_size:
                        break
                    pick = left
                    right = left + 1
                    if right < ph_size and pk_sum[right] > pk_sum[left]:
                        pick = right
                    if pk_sum[pick] > pk_sum[pos]:
                        pk_sum[pos], pk_sum[pick] = pk_sum[pick], pk_sum[pos]
                        pk_i[pos], pk_i[pick] = pk_i[pick], pk_i[pos]
                        pk_j[pos], pk_j[pick] = pk_j[pick], pk_j[pos]
                        pos = pick
                    else:
                        break
            if best >= 0 and s < cur_sum:
                break  # a strictly lower sum level: the flush is complete
            cur_sum = s

            # push lattice successors (ii, jj+1) and, diagonal, (ii+1, ii+1)
            ok2, heap_size, top_size, harvested = _ensure(
                jj + 1, heap_size, top_size, harvested
            )
            if ok2:
                pos = ph_size
                pk_sum[pos] = prefix_pot[ii] + prefix_pot[jj + 1]
                pk_i[pos] = ii
                pk_j[pos] = jj + 1
                ph_size += 1
                while pos > 0:
                    parent = (pos - 1) >> 1
                    if pk_sum[pos] > pk_sum[parent]:
                        pk_sum[pos], pk_sum[parent] = pk_sum[parent], pk_sum[pos]
                        pk_i[pos], pk_i[parent] = pk_i[parent], pk_i[pos]
                        pk_j[pos], pk_j[parent] = pk_j[parent], pk_j[pos]
                        pos = parent
                    else:
                        break
                if jj == ii:
                    pos = ph_size
                    pk_sum[pos] = prefix_pot[ii + 1] + prefix_pot[jj + 1]
                    pk_i[pos] = ii + 1
                    pk_j[pos] = jj + 1
                    ph_size += 1
                    while pos > 0:
                        parent = (pos - 1) >> 1
                        if pk_sum[pos] > pk_sum[parent]:
                            pk_sum[pos], pk_sum[parent] = (
                                pk_sum[parent],
                                pk_sum[pos],
                            )
                            pk_i[pos], pk_i[parent] = pk_i[parent], pk_i[pos]
                            pk_j[pos], pk_j[parent] = pk_j[parent], pk_j[pos]
                            pos = parent
                        else:
                            break

            e = _cross_test(
                n, W, uadj,
                cls_bits[prefix_cid[ii]], cls_bits[prefix_cid[jj]], ii == jj,
            )
            if e >= 0 and (best < 0 or e < best):
                best = e

    for k in range(harvested):
        heap_size = _heap_push(chp, chn, chv, heap_size, tmp_pot[k], tmp_cid[k],
                               tmp_ver[k])
    rst[RST_HEAP] = heap_size
    return best


@njit(cache=True)
def _run_game(
    n, q, p0, mu, ln_mu, eta,
    maker_kind, hub_start, breaker_kind, maker_seed,
    track_episodes, gamma, epsilon, c_const,
    check_claims, compute_maxpot, record_moves, delta,
):
    E = n * (n - 1) // 2
    W = (n + 63) // 64
    max_turns = E // (q + 1) + 2
    CCAP = n + 64

    owner = np.zeros(E, dtype=np.uint8)
    open_mark = np.zeros(E, dtype=np.uint8)
    deg_m = np.zeros(n, dtype=np.int64)
    deg_b = np.zeros(n, dtype=np.int64)
    und = np.full(n, n - 1, dtype=np.int64)
    d_arr = np.zeros(n, dtype=np.float64)
    pot = np.ones(n, dtype=np.float64)
    madj = np.zeros((n, W), dtype=np.uint64)
    uadj = np.zeros((n, W), dtype=np.uint64)
    for v in range(n):
        for w in range(W):
            uadj[v, w] = _ONES
        uadj[v, v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
        tail = n & 63
        if tail != 0:
            uadj[v, W - 1] &= (np.uint64(1) << np.uint64(tail)) - np.uint64(1)

    # potential registry
    node_cls = np.full(n, -1, dtype=np.int64)
    cls_key = np.zeros(CCAP, dtype=np.int64)
    cls_pot = np.zeros(CCAP, dtype=np.float64)
    cls_size = np.zeros(CCAP, dtype=np.int64)
    cls_ver = np.zeros(CCAP, dtype=np.int64)
    cls_bits = np.zeros((CCAP, W), dtype=np.uint64)
    freelist = np.zeros(CCAP, dtype=np.int64)
    tab_bits = 12
    while (1 << tab_bits) < 8 * n:
        tab_bits += 1
    tabk = np.zeros(1 << tab_bits, dtype=np.int64)
    tabc = np.full(1 << tab_bits, -2, dtype=np.int64)
    chp = np.empty(4 * CCAP + 64, dtype=np.float64)
    chn = np.empty(4 * CCAP + 64, dtype=np.int64)
    chv = np.empty(4 * CCAP + 64, dtype=np.int64)
    rst = np.zeros(4, dtype=np.int64)
    for v in range(n):
        _reg_join(v, 0, 1.0, node_cls, cls_key, cls_pot, cls_size, cls_ver,
                  cls_bits, freelist, tabk, tabc, chp, chn, chv, rst)

    # greedy-degree registry (only for that Maker)
    use_deg = maker_kind == 3
    GCAP = CCAP if use_deg else 1
    g_node_cls = np.full(n if use_deg else 1, -1, dtype=np.int64)
    g_cls_key = np.zeros(GCAP, dtype=np.int64)
    g_cls_pot = np.zeros(GCAP, dtype=np.float64)
    g_cls_size = np.zeros(GCAP, dtype=np.int64)
    g_cls_ver = np.zeros(GCAP, dtype=np.int64)
    g_cls_bits = np.zeros((GCAP, W if use_deg else 1), dtype=np.uint64)
    g_freelist = np.zeros(GCAP, dtype=np.int64)
    g_tabk = np.zeros((1 << tab_bits) if use_deg else 1, dtype=np.int64)
    g_tabc = np.full((1 << tab_bits) if use_deg else 1, -2, dtype=np.int64)
    g_chp = np.empty(4 * GCAP + 64, dtype=np.float64)
    g_chn = np.empty(4 * GCAP + 64, dtype=np.int64)
    g_chv = np.empty(4 * GCAP + 64, dtype=np.int64)
    g_rst = np.zeros(4, dtype=np.int64)
    if use_deg:
        for v in range(n):
            _reg_join(v, 0, 0.0, g_node_cls, g_cls_key, g_cls_pot, g_cls_size,
                      g_cls_ver, g_cls_bits, g_freelist, g_tabk, g_tabc,
                      g_chp, g_chn, g_chv, g_rst)

    # selection workspace (shared by both registries)
    prefix_cid = np.empty(CCAP, dtype=np.int64)
    prefix_pot = np.empty(CCAP, dtype=np.float64)
    tmp_pot = np.empty(CCAP, dtype=np.float64)
    tmp_cid = np.empty(CCAP, dtype=np.int64)
    tmp_ver = np.empty(CCAP, dtype=np.int64)
    pk_sum = np.empty(CCAP + 8, dtype=np.float64)
    pk_i = np.empty(CCAP + 8, dtype=np.int64)
    pk_j = np.empty(CCAP + 8, dtype=np.int64)

    closing_cap = 4 * n + 8
    cl_eidx = np.empty(closing_cap, dtype=np.int64)
    cl_head = np.empty(closing_cap, dtype=np.int64)
    cl_tail = np.empty(closing_cap, dtype=np.int64)
    cl_owned_head = np.empty(closing_cap, dtype=np.int64)

    frows = np.zeros((max_turns, N_FCOLS), dtype=np.float64)
    irows = np.zeros((max_turns, N_ICOLS), dtype=np.int64)
    epi_i = np.zeros((max_turns, 8), dtype=np.int64)
    epi_f = np.zeros((max_turns, 4), dtype=np.float64)
    n_episodes = 0
    runmin = np.zeros(n, dtype=np.float64)
    checks = np.zeros(N_CHK, dtype=np.int64)

    moves_eidx = np.empty(E if record_moves else 1, dtype=np.int64)
    moves_who = np.empty(E if record_moves else 1, dtype=np.uint8)
    n_moves = 0

    rng_state = np.zeros(1, dtype=np.uint64)
    rng_state[0] = maker_seed

    POT = float(n)
    unclaimed_total = E
    open_count = 0
    hub = hub_start % n
    hub_next = 0
    ce_global_ptr = 0
    half_star = (q + 1) // 2
    root_n = int(math.ceil(math.sqrt(n)))
    l2_threshold = 2.0 * delta * n / 3.0
    mu_inv_q = math.exp(-ln_mu / q)

    epi_active = False
    epi_anchor = -1
    epi_t0 = -1
    epi_pot_ref = 0.0
    epi_anchor_ref = 0.0
    epi_crit = 0
    epi_inc_sum = 0.0
    epi_l8 = 0

    winner = 0  # 1 = Maker, 2 = Breaker
    turn = 0
    rows = 0
    max_pot = POT
    max_deg_m = 0
    isolation_turns = 0
    shortfall_turns = 0
    tri_a = -1
    tri_b = -1
    tri_c = -1

    while unclaimed_total > 0:
        turn += 1
        if turn % 1024 == 0:
            s = 0.0
            for v in range(n):
                if und[v] > 0:
                    s += pot[v]
            POT = s
        pot_before = POT

        # ---- Maker move ----------------------------------------------------
        pick = np.int64(-1)
        if open_count > 0:
            for idx in range(E):
                if open_mark[idx] == 1:
                    pick = np.int64(idx)
                    break
        if pick < 0:
            if maker_kind == 0:
                if und[hub] == 0:
                    best = -1
                    best_deg = -1
                    for v in range(n):
                        if und[v] > 0 and deg_m[v] > best_deg:
                            best_deg = deg_m[v]
                            best = v
                    hub = best
                    hub_next = 0
                while hub_next < n:
                    x = hub_next
                    if x != hub:
                        idx = _eidx(n, x, hub)
                        if owner[idx] == 0:
                            pick = np.int64(idx)
                            break
                    hub_next += 1
            elif maker_kind == 1:
                while True:
                    idx = np.int64(_rng_next(rng_state) % np.uint64(E))
                    if owner[idx] == 0:
                        pick = idx
                        break
            elif maker_kind == 2:
                pick = _select_registry(
                    n, W, uadj, cls_pot, cls_size, cls_ver, cls_bits,
                    chp, chn, chv, rst, prefix_cid, prefix_pot,
                    tmp_pot, tmp_cid, tmp_ver, pk_sum, pk_i, pk_j,
                )
            else:
                pick = _select_registry(
                    n, W, uadj, g_cls_pot, g_cls_size, g_cls_ver, g_cls_bits,
                    g_chp, g_chn, g_chv, g_rst, prefix_cid, prefix_pot,
                    tmp_pot, tmp_cid, tmp_ver, pk_sum, pk_i, pk_j,
                )
        mu_node, mv_node = _edge_uv(n, pick)
        pot_u_before = pot[mu_node]
        pot_v_before = pot[mv_node]

        if open_mark[pick] == 1:
            open_mark[pick] = 0
            open_count -= 1
        owner[pick] = 1
        unclaimed_total -= 1
        uadj[mu_node, mv_node >> 6] &= ~(np.uint64(1) << np.uint64(mv_node & 63))
        uadj[mv_node, mu_node >> 6] &= ~(np.uint64(1) << np.uint64(mu_node & 63))
        if record_moves:
            moves_eidx[n_moves] = pick
            moves_who[n_moves] = 1
            n_moves += 1
        for w in range(W):
            inter = madj[mu_node, w] & madj[mv_node, w]
            if inter != np.uint64(0):
                tri_a = mu_node
                tri_b = mv_node
                tri_c = 64 * w + _lowest_bit(inter)
                winner = 1
                break
        deg_m[mu_node] += 1
        deg_m[mv_node] += 1
        if deg_m[mu_node] > max_deg_m:
            max_deg_m = deg_m[mu_node]
        if deg_m[mv_node] > max_deg_m:
            max_deg_m = deg_m[mv_node]
        madj[mu_node, mv_node >> 6] |= np.uint64(1) << np.uint64(mv_node & 63)
        madj[mv_node, mu_node >> 6] |= np.uint64(1) << np.uint64(mu_node & 63)
        und[mu_node] -= 1
        und[mv_node] -= 1

        inc_u = 0.0
        inc_v = 0.0
        dec_zero = 0.0
        for k in range(2):
            w = mu_node if k == 0 else mv_node
            dm_old = deg_m[w] - 1
            d_old = d_arr[w]
            old = pot[w]
            dnew = _deficit(deg_m[w], deg_b[w], p0, q)
            baln = _pot_value(dnew, q, ln_mu)
            sat = und[w] == 0
            newp = 0.0 if sat else baln
            d_arr[w] = dnew
            pot[w] = newp
            if sat:
                dec_zero += baln
            _reg_leave(w, node_cls, cls_key, cls_size, cls_ver, cls_bits,
                       freelist, tabk, tabc, rst)
            if not sat:
                _reg_join(w, (deg_m[w] << 32) | deg_b[w], newp, node_cls,
                          cls_key, cls_pot, cls_size, cls_ver, cls_bits,
                          freelist, tabk, tabc, chp, chn, chv, rst)
            if use_deg:
                _reg_leave(w, g_node_cls, g_cls_key, g_cls_size, g_cls_ver,
                           g_cls_bits, g_freelist, g_tabk, g_tabc, g_rst)
                if not sat:
                    _reg_join(w, deg_m[w] << 32, float(deg_m[w]), g_node_cls,
                              g_cls_key, g_cls_pot, g_cls_size, g_cls_ver,
                              g_cls_bits, g_freelist, g_tabk, g_tabc,
                              g_chp, g_chn, g_chv, g_rst)
            if check_claims:
                expect = p0 * (q - dm_old - 0.5)
                if abs((dnew - d_old) - expect) > 1e-9 * max(1.0, abs(expect)):
                    checks[CHK_L3] += 1
                if newp > mu * old + 1e-9 * max(1.0, mu * old):
                    checks[CHK_L4I_FACTOR] += 1
                if newp > 0.0 and deg_m[w] == half_star - 1:
                    checks[CHK_L2_EVENTS] += 1
                    if dnew < l2_threshold - 1e-9 * max(1.0, l2_threshold):
                        checks[CHK_L2_VIOL] += 1
            POT += newp - old
            if k == 0:
                inc_u = baln - old
            else:
                inc_v = baln - old
        if check_claims:
            total_inc_claim = (pot[mu_node] - pot_u_before) + (
                pot[mv_node] - pot_v_before
            )
            bound = (mu - 1.0) * (pot_u_before + pot_v_before)
            if total_inc_claim > bound + 1e-9 * max(1.0, abs(bound)):
                checks[CHK_L4I_TOTAL] += 1

        if winner == 1:
            break
        if unclaimed_total == 0:
            winner = 2
            break

        # ---- enumerate required closing edges ------------------------------
        n_cl = 0
        n_owned = 0
        for hh in range(2):
            head = mu_node if hh == 0 else mv_node
            other = mv_node if hh == 0 else mu_node
            for w in range(W):
                bits = madj[other, w]
                while bits != np.uint64(0):
                    b = _lowest_bit(bits)
                    bits &= bits - np.uint64(1)
                    tail = 64 * w + b
                    if tail == head:
                        continue
                    idx = _eidx(n, head, tail)
                    st = owner[idx]
                    if st == 0:
                        cl_eidx[n_cl] = idx
                        cl_head[n_cl] = head
                        cl_tail[n_cl] = tail
                        n_cl += 1
                        if open_mark[idx] == 0:
                            open_mark[idx] = 1
                            open_count += 1
                    elif st == 2:
                        cl_owned_head[n_owned] = head
                        n_owned += 1
                    # st == 1 cannot happen: the triangle check above fired

        # ---- Breaker turn ---------------------------------------------------
        budget = q if unclaimed_total >= q else unclaimed_total
        ragged = 1 if budget < q else 0
        claimed = 0
        free_count = 0
        isolation = 0
        shortfall = 0
        dec_free = 0.0
        dec_tails = 0.0
        dh_u = 0.0
        dh_v = 0.0

        if n_cl > budget:
            shortfall = n_cl - budget
            if breaker_kind == 0:
                # keep the budget-many whose tails carry maximum potential,
                # ties by edge index: insertion sort on (-pot[tail], eidx);
                # the baseline Breaker just closes in enumeration order
                for a in range(1, n_cl):
                    ke = cl_eidx[a]
                    kh = cl_head[a]
                    kt = cl_tail[a]
                    kp = pot[kt]
                    b = a - 1
                    while b >= 0 and (
                        pot[cl_tail[b]] < kp
                        or (pot[cl_tail[b]] == kp and cl_eidx[b] > ke)
                    ):
                        cl_eidx[b + 1] = cl_eidx[b]
                        cl_head[b + 1] = cl_head[b]
                        cl_tail[b + 1] = cl_tail[b]
                        b -= 1
                    cl_eidx[b + 1] = ke
                    cl_head[b + 1] = kh
                    cl_tail[b + 1] = kt
            n_cl = budget

        n_claim_steps = n_cl + (n_owned if shortfall == 0 else 0)
        if breaker_kind == 1:
            n_claim_steps = n_cl  # baseline Breaker pads instead of substituting
        for step in range(n_claim_steps):
            if claimed >= budget:
                break
            head = np.int64(-1)
            if step < n_cl:
                idx = cl_eidx[step]
                head = cl_head[step]
            else:
                # substitute at the head of an already-closed path: the
                # unclaimed edge there whose tail has maximum potential,
                # ties to the smallest tail id
                sub_head = cl_owned_head[step - n_cl]
                idx = np.int64(-1)
                best_pot = -1.0
                for x in range(n):
                    if x == sub_head:
                        continue
                    cand = _eidx(n, sub_head, x)
                    if owner[cand] == 0 and pot[x] > best_pot:
                        best_pot = pot[x]
                        idx = np.int64(cand)
                if idx >= 0:
                    head = sub_head
                else:
                    isolation = 1
                    if unclaimed_total == 0:
                        break
                    idx = _select_registry(
                        n, W, uadj, cls_pot, cls_size, cls_ver, cls_bits,
                        chp, chn, chv, rst, prefix_cid, prefix_pot,
                        tmp_pot, tmp_cid, tmp_ver, pk_sum, pk_i, pk_j,
                    )
                    head = np.int64(-1)

            a_node, b_node = _edge_uv(n, idx)
            if open_mark[idx] == 1:
                open_mark[idx] = 0
                open_count -= 1
            owner[idx] = 2
            unclaimed_total -= 1
            claimed += 1
            uadj[a_node, b_node >> 6] &= ~(np.uint64(1) << np.uint64(b_node & 63))
            uadj[b_node, a_node >> 6] &= ~(np.uint64(1) << np.uint64(a_node & 63))
            if record_moves:
                moves_eidx[n_moves] = idx
                moves_who[n_moves] = 2
                n_moves += 1
            deg_b[a_node] += 1
            deg_b[b_node] += 1
            und[a_node] -= 1
            und[b_node] -= 1
            pe_before = pot[a_node] + pot[b_node]
            dec_claim = 0.0
            for k in range(2):
                w = a_node if k == 0 else b_node
                old = pot[w]
                dnew = _deficit(deg_m[w], deg_b[w], p0, q)
                baln = _pot_value(dnew, q, ln_mu)
                sat = und[w] == 0
                newp = 0.0 if sat else baln
                d_arr[w] = dnew
                pot[w] = newp
                if sat:
                    dec_zero += baln
                _reg_leave(w, node_cls, cls_key, cls_size, cls_ver, cls_bits,
                           freelist, tabk, tabc, rst)
                if not sat:
                    _reg_join(w, (deg_m[w] << 32) | deg_b[w], newp, node_cls,
                              cls_key, cls_pot, cls_size, cls_ver, cls_bits,
                              freelist, tabk, tabc, chp, chn, chv, rst)
                if use_deg and sat:
                    _reg_leave(w, g_node_cls, g_cls_key, g_cls_size, g_cls_ver,
                               g_cls_bits, g_freelist, g_tabk, g_tabc, g_rst)
                if check_claims and old > 0.0:
                    if abs(baln - old * mu_inv_q) > 1e-9 * max(
                        1e-300, old * mu_inv_q
                    ):
                        checks[CHK_L4II_EXACT] += 1
                decrease = old - baln
                dec_claim += old - newp
                if w == head:
                    if w == mu_node:
                        dh_u += decrease
                    else:
                        dh_v += decrease
                else:
                    dec_tails += decrease
                POT += newp - old
            if check_claims:
                lb = (1.0 - mu_inv_q) * pe_before
                if dec_claim < lb - 1e-9 * max(1.0, abs(lb)):
                    checks[CHK_L4II_TOTAL] += 1

        # Part 2: free edges (potential strategy) or padding (baseline)
        if breaker_kind == 0:
            while claimed < budget and unclaimed_total > 0:
                idx = _select_registry(
                    n, W, uadj, cls_pot, cls_size, cls_ver, cls_bits,
                    chp, chn, chv, rst, prefix_cid, prefix_pot,
                    tmp_pot, tmp_cid, tmp_ver, pk_sum, pk_i, pk_j,
                )
                a_node, b_node = _edge_uv(n, idx)
                if open_mark[idx] == 1:
                    open_mark[idx] = 0
                    open_count -= 1
                owner[idx] = 2
                unclaimed_total -= 1
                claimed += 1
                free_count += 1
                uadj[a_node, b_node >> 6] &= ~(
                    np.uint64(1) << np.uint64(b_node & 63)
                )
                uadj[b_node, a_node >> 6] &= ~(
                    np.uint64(1) << np.uint64(a_node & 63)
                )
                if record_moves:
                    moves_eidx[n_moves] = idx
                    moves_who[n_moves] = 2
                    n_moves += 1
                deg_b[a_node] += 1
                deg_b[b_node] += 1
                und[a_node] -= 1
                und[b_node] -= 1
                pe_before = pot[a_node] + pot[b_node]
                dec_claim = 0.0
                for k in range(2):
                    w = a_node if k == 0 else b_node
                    old = pot[w]
                    dnew = _deficit(deg_m[w], deg_b[w], p0, q)
                    baln = _pot_value(dnew, q, ln_mu)
                    sat = und[w] == 0
                    newp = 0.0 if sat else baln
                    d_arr[w] = dnew
                    pot[w] = newp
                    if sat:
                        dec_zero += baln
                    _reg_leave(w, node_cls, cls_key, cls_size, cls_ver,
                               cls_bits, freelist, tabk, tabc, rst)
                    if not sat:
                        _reg_join(w, (deg_m[w] << 32) | deg_b[w], newp,
                                  node_cls, cls_key, cls_pot, cls_size,
                                  cls_ver, cls_bits, freelist, tabk, tabc,
                                  chp, chn, chv, rst)
                    if use_deg and sat:
                        _reg_leave(w, g_node_cls, g_cls_key, g_cls_size,
                                   g_cls_ver, g_cls_bits, g_freelist, g_tabk,
                                   g_tabc, g_rst)
                    if check_claims and old > 0.0:
                        if abs(baln - old * mu_inv_q) > 1e-9 * max(
                            1e-300, old * mu_inv_q
                        ):
                            checks[CHK_L4II_EXACT] += 1
                    dec_free += old - baln
                    dec_claim += old - newp
                    POT += newp - old
                if check_claims:
                    lb = (1.0 - mu_inv_q) * pe_before
                    if dec_claim < lb - 1e-9 * max(1.0, abs(lb)):
                        checks[CHK_L4II_TOTAL] += 1
        else:
            count_u = 0
            count_v = 0
            for s in range(min(n_cl, claimed)):
                if cl_head[s] == mu_node:
                    count_u += 1
                else:
                    count_v += 1
            for phase in range(3):
                if phase == 0:
                    hnode = mu_node
                    target = root_n
                    have = count_u
                elif phase == 1:
                    hnode = mv_node
                    target = q - root_n
                    have = count_v
                else:
                    hnode = -1
                    target = 0
                    have = 0
                while claimed < budget and unclaimed_total > 0 and (
                    phase == 2 or have < target
                ):
                    idx = np.int64(-1)
                    if phase < 2:
                        for x in range(hnode):
                            cand = _eidx(n, x, hnode)
                            if owner[cand] == 0:
                                idx = np.int64(cand)
                                break
                        if idx < 0:
                            for x in range(hnode + 1, n):
                                cand = _eidx(n, hnode, x)
                                if owner[cand] == 0:
                                    idx = np.int64(cand)
                                    break
                        if idx < 0:
                            break
                    else:
                        while ce_global_ptr < E and owner[ce_global_ptr] != 0:
                            ce_global_ptr += 1
                        if ce_global_ptr >= E:
                            break
                        idx = np.int64(ce_global_ptr)
                    have += 1
                    a_node, b_node = _edge_uv(n, idx)
                    if open_mark[idx] == 1:
                        open_mark[idx] = 0
                        open_count -= 1
                    owner[idx] = 2
                    unclaimed_total -= 1
                    claimed += 1
                    free_count += 1
                    uadj[a_node, b_node >> 6] &= ~(
                        np.uint64(1) << np.uint64(b_node & 63)
                    )
                    uadj[b_node, a_node >> 6] &= ~(
                        np.uint64(1) << np.uint64(a_node & 63)
                    )
                    if record_moves:
                        moves_eidx[n_moves] = idx
                        moves_who[n_moves] = 2
                        n_moves += 1
                    deg_b[a_node] += 1
                    deg_b[b_node] += 1
                    und[a_node] -= 1
                    und[b_node] -= 1
                    for k in range(2):
                        w = a_node if k == 0 else b_node
                        old = pot[w]
                        dnew = _deficit(deg_m[w], deg_b[w], p0, q)
                        baln = _pot_value(dnew, q, ln_mu)
                        sat = und[w] == 0
                        newp = 0.0 if sat else baln
                        d_arr[w] = dnew
                        pot[w] = newp
                        if sat:
                            dec_zero += baln
                        _reg_leave(w, node_cls, cls_key, cls_size, cls_ver,
                                   cls_bits, freelist, tabk, tabc, rst)
                        if not sat:
                            _reg_join(w, (deg_m[w] << 32) | deg_b[w], newp,
                                      node_cls, cls_key, cls_pot, cls_size,
                                      cls_ver, cls_bits, freelist, tabk,
                                      tabc, chp, chn, chv, rst)
                        if use_deg and sat:
                            _reg_leave(w, g_node_cls, g_cls_key, g_cls_size,
                                       g_cls_ver, g_cls_bits, g_freelist,
                                       g_tabk, g_tabc, g_rst)
                        dec_free += old - baln
                        POT += newp - old

        # ---- ledger row ------------------------------------------------------
        utt = min(inc_u, dh_u) + min(inc_v, dh_v)
        ott = (dh_u + dh_v) - utt
        inc_total = inc_u + inc_v
        critdiff = inc_total - utt - (1.0 - eta) * dec_free
        restdiff = ott + dec_tails + eta * dec_free + dec_zero
        critical = 1 if critdiff > 0.0 else 0
        if isolation == 1:
            isolation_turns += 1
        if shortfall > 0:
            shortfall_turns += 1
        if POT > max_pot:
            max_pot = POT

        frows[rows, COL_POT_BEFORE] = pot_before
        frows[rows, COL_POT_AFTER] = POT
        frows[rows, COL_INC] = inc_total
        frows[rows, COL_DEC_FREE] = dec_free
        frows[rows, COL_UTT] = utt
        frows[rows, COL_OTT] = ott
        frows[rows, COL_DEC_TAILS] = dec_tails
        frows[rows, COL_DEC_ZERO] = dec_zero
        frows[rows, COL_CRITDIFF] = critdiff
        frows[rows, COL_RESTDIFF] = restdiff
        frows[rows, COL_POT_U_BEFORE] = pot_u_before
        frows[rows, COL_POT_V_BEFORE] = pot_v_before
        frows[rows, COL_INC_U] = inc_u
        frows[rows, COL_INC_V] = inc_v
        frows[rows, COL_DEC_HEADS_U] = dh_u
        frows[rows, COL_DEC_HEADS_V] = dh_v
        maxpot_after = -1.0
        crossing = (POT > n) and (pot_before <= n)
        need_maxpot = compute_maxpot and (
            critical == 1 or epi_active or (track_episodes and crossing)
        )
        if need_maxpot and unclaimed_total > 0:
            bidx = _select_registry(
                n, W, uadj, cls_pot, cls_size, cls_ver, cls_bits,
                chp, chn, chv, rst, prefix_cid, prefix_pot,
                tmp_pot, tmp_cid, tmp_ver, pk_sum, pk_i, pk_j,
            )
            if bidx >= 0:
                ba, bb = _edge_uv(n, bidx)
                maxpot_after = pot[ba] + pot[bb]
        frows[rows, COL_MAXPOT_AFTER] = maxpot_after
        irows[rows, ICOL_MU] = mu_node
        irows[rows, ICOL_MV] = mv_node
        irows[rows, ICOL_F] = free_count
        irows[rows, ICOL_ISOLATION] = isolation
        irows[rows, ICOL_SHORTFALL] = shortfall
        irows[rows, ICOL_CRITICAL] = critical
        irows[rows, ICOL_RAGGED] = ragged

        # ---- episode tracking ------------------------------------------------
        if track_episodes:
            trigger = 0
            if not epi_active:
                if crossing:
                    epi_active = True
                    epi_t0 = turn
                    if pot_u_before >= pot_v_before:
                        epi_anchor = mu_node
                        epi_anchor_ref = pot_u_before
                    else:
                        epi_anchor = mv_node
                        epi_anchor_ref = pot_v_before
                    epi_pot_ref = pot_before
                    epi_crit = 0
                    epi_inc_sum = 0.0
                    epi_l8 = 0
                    for v in range(n):
                        runmin[v] = pot[v]
                    if critical == 1:
                        epi_crit = 1
                        epi_inc_sum = inc_total
                        if epi_crit >= c_const:
                            trigger |= 4
                    if pot[epi_anchor] <= (1.0 - gamma) * epi_anchor_ref:
                        trigger |= 1
                    if compute_maxpot and maxpot_after >= 0.0:
                        factor = (1.0 + epsilon) * mu * p0 / (1.0 - eta)
                        kk = epi_crit if epi_crit > 1 else 1
                        bound = factor**kk * 2.0 * epi_anchor_ref
                        if maxpot_after >= bound + 1e-6 * max(1.0, bound):
                            epi_l8 += 1
                    irows[rows, ICOL_EPISODE] = n_episodes + 1
            else:
                irows[rows, ICOL_EPISODE] = n_episodes + 1
                if pot[epi_anchor] <= (1.0 - gamma) * epi_anchor_ref:
                    trigger |= 1
                # untouched nodes keep their potential, so they can never
                # newly exceed (1+eps) times their running minimum; the full
                # scan is equivalent to checking touched nodes only
                t2_fired = False
                for v in range(n):
                    pv = pot[v]
                    if pv > 0.0 and pv >= (1.0 + epsilon) * runmin[v]:
                        t2_fired = True
                    if pv < runmin[v]:
                        runmin[v] = pv
                if t2_fired:
                    trigger |= 2
                if critical == 1:
                    epi_crit += 1
                    epi_inc_sum += inc_total
                    if epi_crit >= c_const:
                        trigger |= 4
                if compute_maxpot and not t2_fired and maxpot_after >= 0.0:
                    factor = (1.0 + epsilon) * mu * p0 / (1.0 - eta)
                    kk = epi_crit if epi_crit > 1 else 1
                    bound = factor**kk * 2.0 * epi_anchor_ref
                    if maxpot_after >= bound + 1e-6 * max(1.0, bound):
                        epi_l8 += 1
            if epi_active and trigger != 0:
                epi_i[n_episodes, EPI_T0] = epi_t0
                epi_i[n_episodes, EPI_ANCHOR] = epi_anchor
                epi_i[n_episodes, EPI_TSTAR] = turn
                epi_i[n_episodes, EPI_CRIT] = epi_crit
                epi_i[n_episodes, EPI_TRIGGER] = trigger
                epi_i[n_episodes, EPI_L8] = epi_l8
                l9_bound = 2.0 * c_const * (mu - 1.0) * epi_anchor_ref
                epi_i[n_episodes, EPI_L9] = (
                    1 if epi_inc_sum > l9_bound + 1e-6 * max(1.0, l9_bound) else 0
                )
                viol = POT > epi_pot_ref + 1e-6 * max(1.0, epi_pot_ref)
                epi_i[n_episodes, EPI_VIOL] = 1 if viol else 0
                epi_f[n_episodes, EPF_POT_REF] = epi_pot_ref
                epi_f[n_episodes, EPF_ANCHOR_REF] = epi_anchor_ref
                epi_f[n_episodes, EPF_POT_STAR] = POT
                epi_f[n_episodes, EPF_INC_SUM] = epi_inc_sum
                n_episodes += 1
                epi_active = False

        rows += 1

    if winner == 0:
        winner = 2
    if track_episodes and epi_active:
        # game ended inside an open window: record it without a t*
        epi_i[n_episodes, EPI_T0] = epi_t0
        epi_i[n_episodes, EPI_ANCHOR] = epi_anchor
        epi_i[n_episodes, EPI_TSTAR] = -1
        epi_i[n_episodes, EPI_CRIT] = epi_crit
        epi_i[n_episodes, EPI_TRIGGER] = 0
        epi_i[n_episodes, EPI_L8] = epi_l8
        epi_i[n_episodes, EPI_L9] = 0
        epi_i[n_episodes, EPI_VIOL] = 0
        epi_f[n_episodes, EPF_POT_REF] = epi_pot_ref
        epi_f[n_episodes, EPF_ANCHOR_REF] = epi_anchor_ref
        epi_f[n_episodes, EPF_POT_STAR] = -1.0
        epi_f[n_episodes, EPF_INC_SUM] = epi_inc_sum
        n_episodes += 1

    return (
        winner, turn, rows, frows, irows,
        n_episodes, epi_i, epi_f, checks,
        max_pot, max_deg_m, isolation_turns, shortfall_turns,
        moves_eidx, moves_who, n_moves,
        tri_a, tri_b, tri_c, POT,
    )


@dataclass
class KernelResult:
    """Everything one kernel game produced."""

    winner: Owner
    turns: int
    rows: int
    frows: np.ndarray
    irows: np.ndarray
    n_episodes: int
    episodes_i: np.ndarray
    episodes_f: np.ndarray
    checks: np.ndarray
    max_pot: float
    max_deg_m: int
    isolation_turns: int
    shortfall_turns: int
    moves: Optional[list[tuple[int, int]]]  # (edge_index, who) in claim order
    triangle: Optional[tuple[int, int, int]]
    final_pot: float

    def turn_ledgers(self) -> list[TurnLedger]:
        """Materialize the recorded rows as TurnLedger objects."""
        out = []
        for r in range(self.rows):
            fr = self.frows[r]
            ir = self.irows[r]
            out.append(
                TurnLedger(
                    turn=r + 1,
                    maker_u=int(ir[ICOL_MU]),
                    maker_v=int(ir[ICOL_MV]),
                    f=int(ir[ICOL_F]),
                    isolation_turn=bool(ir[ICOL_ISOLATION]),
                    shortfall=int(ir[ICOL_SHORTFALL]),
                    pot_before=float(fr[COL_POT_BEFORE]),
                    pot_after=float(fr[COL_POT_AFTER]),
                    pot_u_before=float(fr[COL_POT_U_BEFORE]),
                    pot_v_before=float(fr[COL_POT_V_BEFORE]),
                    inc=float(fr[COL_INC]),
                    dec_free=float(fr[COL_DEC_FREE]),
                    dec_heads=float(fr[COL_DEC_HEADS_U] + fr[COL_DEC_HEADS_V]),
                    utt=float(fr[COL_UTT]),
                    ott=float(fr[COL_OTT]),
                    dec_tails=float(fr[COL_DEC_TAILS]),
                    dec_zero=float(fr[COL_DEC_ZERO]),
                    inc_u=float(fr[COL_INC_U]),
                    inc_v=float(fr[COL_INC_V]),
                    dec_heads_u=float(fr[COL_DEC_HEADS_U]),
                    dec_heads_v=float(fr[COL_DEC_HEADS_V]),
                    critdiff=float(fr[COL_CRITDIFF]),
                    restdiff=float(fr[COL_RESTDIFF]),
                    critical=bool(ir[ICOL_CRITICAL]),
                )
            )
        return out


def run_game(
    params: PotentialParams,
    maker: StrategyConfig,
    breaker: StrategyConfig,
    eta: float,
    episode: Optional[EpisodeConstants] = None,
    check_claims: bool = False,
    compute_maxpot: bool = False,
    record_moves: bool = False,
) -> KernelResult:
    """Play one full game in the compiled engine."""
    track = episode is not None
    (
        winner, turns, rows, frows, irows,
        n_epi, epi_i, epi_f, checks,
        max_pot, max_deg_m, iso, short,
        mv_eidx, mv_who, n_moves,
        tri_a, tri_b, tri_c, final_pot,
    ) = _run_game(
        params.n,
        params.q,
        params.p0,
        params.mu,
        params.ln_mu,
        eta,
        MAKER_CODES[maker.kind],
        maker.hub,
        BREAKER_CODES[breaker.kind],
        np.uint64(maker.seed & _MASK),
        track,
        episode.gamma if track else 0.5,
        episode.epsilon if track else 0.01,
        episode.c if track else 1,
        check_claims,
        compute_maxpot,
        record_moves,
        params.delta,
    )
    moves = None
    if record_moves:
        moves = [(int(mv_eidx[i]), int(mv_who[i])) for i in range(n_moves)]
    triangle = None
    if winner == 1 and tri_a >= 0:
        triangle = tuple(sorted((int(tri_a), int(tri_b), int(tri_c))))
    return KernelResult(
        winner=Owner.MAKER if winner == 1 else Owner.BREAKER,
        turns=int(turns),
        rows=int(rows),
        frows=frows,
        irows=irows,
        n_episodes=int(n_epi),
        episodes_i=epi_i,
        episodes_f=epi_f,
        checks=checks,
        max_pot=float(max_pot),
        max_deg_m=int(max_deg_m),
        isolation_turns=int(iso),
        shortfall_turns=int(short),
        moves=moves,
        triangle=triangle,
        final_pot=float(final_pot),
    )
