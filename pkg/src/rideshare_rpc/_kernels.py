"""Compiled hot loops.

``sfp_batch`` mirrors ``matchgen.shortest_feasible_path`` step for step
(same visiting order, same pruning, same float expressions), so both return
identical routes. Tokens are encoded as ``2 * j + kind`` for the j-th rider
of a set. ``sspa_run`` mirrors ``flow.SSPA`` in integer arithmetic with the
same heap tie-breaking, so both produce the same flows.
"""
from __future__ import annotations

import heapq

import numpy as np
from numba import njit

UNPICKED, ONBOARD, DROPPED = 0, 1, 2


@njit(cache=True)
def _sfp_one(D, T, d_org, d_dst, alpha, d_late, spend, o, dd, ed, late, dur, out_order):
    k = o.shape[0]
    n = 2 * k
    # local index: 0 driver origin, 1 driver destination, 2 + 2j rider origin, 3 + 2j rider destination
    node = np.empty(n + 2, dtype=np.int64)
    node[0] = d_org
    node[1] = d_dst
    for j in range(k):
        node[2 + 2 * j] = o[j]
        node[3 + 2 * j] = dd[j]
    status = np.zeros(k, dtype=np.int64)
    ptime = np.zeros(k)
    cur = np.zeros(n + 1, dtype=np.int64)
    tt = np.zeros(n + 1)
    dist = np.zeros(n + 1, dtype=np.int64)
    nxt = np.zeros(n + 1, dtype=np.int64)
    tok = np.zeros(n + 1, dtype=np.int64)
    best = -1
    depth = 0
    tt[0] = alpha
    entered = True
    while depth >= 0:
        if entered:
            entered = False
            here = node[cur[depth]]
            t = tt[depth]
            dead = best >= 0 and dist[depth] + D[here, d_dst] >= best
            if not dead and (t > d_late or t - alpha > spend):
                dead = True
            if not dead:
                for j in range(k):
                    if status[j] == UNPICKED and t > late[j]:
                        dead = True
                        break
                    if status[j] == ONBOARD and (t > late[j] or t - ptime[j] > dur[j]):
                        dead = True
                        break
            if not dead and depth == n:
                end = t + T[here, d_dst]
                if end <= d_late and end - alpha <= spend:
                    best = dist[depth] + D[here, d_dst]
                    for a in range(n):
                        out_order[a] = tok[a + 1]
                dead = True
            if dead:
                # undo the move that led here, then resume the parent
                if depth > 0:
                    c = tok[depth]
                    j = c // 2
                    status[j] = UNPICKED if c % 2 == 0 else ONBOARD
                depth -= 1
                continue
            nxt[depth] = 0
        here_loc = cur[depth]
        here = node[here_loc]
        t = tt[depth]
        moved = False
        c = nxt[depth]
        while c < n:
            j = c // 2
            loc = 2 + c
            if c % 2 == 0:
                if status[j] == UNPICKED:
                    nt = max(t + T[here, node[loc]], ed[j])
                    status[j] = ONBOARD
                    ptime[j] = nt
                    moved = True
            elif status[j] == ONBOARD:
                nt = t + T[here, node[loc]]
                if not (nt > late[j] or nt - ptime[j] > dur[j]):
                    status[j] = DROPPED
                    moved = True
            c += 1
            if moved:
                nxt[depth] = c
                cur[depth + 1] = loc
                tt[depth + 1] = nt
                dist[depth + 1] = dist[depth] + D[here, node[loc]]
                tok[depth + 1] = c - 1
                depth += 1
                entered = True
                break
        if not moved:
            if depth > 0:
                c = tok[depth]
                j = c // 2
                status[j] = UNPICKED if c % 2 == 0 else ONBOARD
            depth -= 1
    return best


@njit(cache=True)
def sfp_batch(D, T, d_org, d_dst, alpha, d_late, spend, sets, r_o, r_d, r_ed, r_late, r_dur):
    """Best distance (-1 if infeasible) and token order for each row of ``sets``."""
    m, k = sets.shape
    best = np.full(m, -1, dtype=np.int64)
    orders = np.full((m, 2 * k), -1, dtype=np.int64)
    for i in range(m):
        idx = sets[i]
        best[i] = _sfp_one(D, T, d_org, d_dst, alpha, d_late, spend,
                           r_o[idx], r_d[idx], r_ed[idx], r_late[idx], r_dur[idx], orders[i])
    return best, orders


# --- successive shortest paths -------------------------------------------

STOP_TARGET, STOP_POSITIVE = 0, 1


@njit(cache=True)
def sspa_run(n, tail, head, cost, chat, usable, mode, target):
    """SSPA with node potentials and early-terminating Dijkstra.

    ``mode == STOP_TARGET``: stop before an augmentation whose cost rises
    above the previous cost and above ``target``. ``mode == STOP_POSITIVE``:
    stop before the first path of positive original cost. Returns the flow
    per arc and the cost sequence ``c(f_0), c(f_1), ...``.
    """
    m = tail.shape[0]
    s, t = 0, n - 1
    out_cnt = np.zeros(n + 1, dtype=np.int64)
    in_cnt = np.zeros(n + 1, dtype=np.int64)
    for a in range(m):
        if usable[a]:
            out_cnt[tail[a] + 1] += 1
            in_cnt[head[a] + 1] += 1
    out_ptr = np.cumsum(out_cnt)
    in_ptr = np.cumsum(in_cnt)
    out_arcs = np.empty(out_ptr[n], dtype=np.int64)
    in_arcs = np.empty(in_ptr[n], dtype=np.int64)
    fo = out_ptr[:n].copy()
    fi = in_ptr[:n].copy()
    for a in range(m):
        if usable[a]:
            out_arcs[fo[tail[a]]] = a
            fo[tail[a]] += 1
            in_arcs[fi[head[a]]] = a
            fi[head[a]] += 1

    big = np.iinfo(np.int64).max
    flow = np.zeros(m, dtype=np.uint8)
    pi = np.zeros(n, dtype=np.int64)
    dist = np.empty(n, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    pred_arc = np.empty(n, dtype=np.int64)
    pred_back = np.zeros(n, dtype=np.bool_)
    costs = [0]
    while True:
        dist[:] = big
        done[:] = False
        dist[s] = 0
        heap = [(0, s)]
        while len(heap) > 0:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            if u == t:
                break
            pu = pi[u]
            for k in range(out_ptr[u], out_ptr[u + 1]):
                a = out_arcs[k]
                if flow[a]:
                    continue
                v = head[a]
                if done[v]:
                    continue
                nd = d + chat[a] - pu + pi[v]
                if nd < dist[v]:
                    dist[v] = nd
                    pred_arc[v] = a
                    pred_back[v] = False
                    heapq.heappush(heap, (nd, v))
            for k in range(in_ptr[u], in_ptr[u + 1]):
                a = in_arcs[k]
                if not flow[a]:
                    continue
                v = tail[a]
                if done[v]:
                    continue
                nd = d - chat[a] + pi[v] - pu
                if nd < dist[v]:
                    dist[v] = nd
                    pred_arc[v] = a
                    pred_back[v] = True
                    heapq.heappush(heap, (nd, v))
        if not done[t]:
            break
        dt = dist[t]
        for u in range(n):
            pi[u] -= dist[u] if done[u] else dt
        delta = 0
        v = t
        while v != s:
            a = pred_arc[v]
            if pred_back[v]:
                delta -= cost[a]
                v = head[a]
            else:
                delta += cost[a]
                v = tail[a]
        prev = costs[-1]
        nxt = prev + delta
        if mode == STOP_POSITIVE:
            if delta > 0:
                break
        elif nxt > prev and nxt > target:
            break
        v = t
        while v != s:
            a = pred_arc[v]
            if pred_back[v]:
                flow[a] = 0
                v = head[a]
            else:
                flow[a] = 1
                v = tail[a]
        costs.append(nxt)
    return flow, np.array(costs, dtype=np.int64)
