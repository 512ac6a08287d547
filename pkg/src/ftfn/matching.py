"""Exact minimum-weight perfect matching on dense defect graphs.

The solver is the classic O(n^3) primal-dual blossom algorithm for
maximum-weight matching on a dense graph, jitted with numba and driven
through the standard complement trick (maximize W - w on a complete
graph, which forces a perfect matching and minimizes total w).  Weights
enter as integers; callers scale float distances by 2^20 and compare in
the integer domain so that optimality checks against the brute-force
oracle are exact.

State that the textbook formulation keeps in globals lives in arrays
passed between the jitted helpers: `state` packs
[queue head, queue tail, lca timestamp, highest blossom id].
"""

from __future__ import annotations

import numpy as np
from numba import njit

WEIGHT_SCALE = float(1 << 20)
INT_INF = np.int64(2**62)

_QH, _QT, _VIST, _NX = 0, 1, 2, 3


@njit(cache=True)
def _e_delta(lab, g_u, g_v, g_w, u, v):
    return lab[g_u[u, v]] + lab[g_v[u, v]] - g_w[g_u[u, v], g_v[u, v]] * 2


@njit(cache=True)
def _update_slack(lab, g_u, g_v, g_w, slack, u, x):
    if slack[x] == 0 or _e_delta(lab, g_u, g_v, g_w, u, x) < _e_delta(
            lab, g_u, g_v, g_w, slack[x], x):
        slack[x] = u


@njit(cache=True)
def _set_slack(lab, g_u, g_v, g_w, slack, st, s_lbl, n, x):
    slack[x] = 0
    for u in range(1, n + 1):
        if g_w[u, x] > 0 and st[u] != x and s_lbl[st[u]] == 0:
            _update_slack(lab, g_u, g_v, g_w, slack, u, x)


@njit(cache=True)
def _q_push(queue, state, stack, flower, flower_len, n, x):
    top = 0
    stack[top] = x
    top += 1
    while top > 0:
        top -= 1
        y = stack[top]
        if y <= n:
            queue[state[_QT] % len(queue)] = y
            state[_QT] += 1
        else:
            for i in range(flower_len[y]):
                stack[top] = flower[y, i]
                top += 1


@njit(cache=True)
def _set_st(st, stack, flower, flower_len, n, x, b):
    top = 0
    stack[top] = x
    top += 1
    while top > 0:
        top -= 1
        y = stack[top]
        st[y] = b
        if y > n:
            for i in range(flower_len[y]):
                stack[top] = flower[y, i]
                top += 1


@njit(cache=True)
def _get_pr(flower, flower_len, b, xr):
    pr = 0
    for i in range(flower_len[b]):
        if flower[b, i] == xr:
            pr = i
            break
    if pr % 2 == 1:
        lo = 1
        hi = flower_len[b] - 1
        while lo < hi:
            tmp = flower[b, lo]
            flower[b, lo] = flower[b, hi]
            flower[b, hi] = tmp
            lo += 1
            hi -= 1
        return flower_len[b] - pr
    return pr


@njit(cache=True)
def _set_match(match, g_u, g_v, flower, flower_len, flower_from,
               pair_stack, scratch, n, u0, v0):
    top = 0
    pair_stack[top, 0] = u0
    pair_stack[top, 1] = v0
    top += 1
    while top > 0:
        top -= 1
        u = pair_stack[top, 0]
        v = pair_stack[top, 1]
        match[u] = g_v[u, v]
        if u > n:
            eu = g_u[u, v]
            xr = flower_from[u, eu]
            pr = _get_pr(flower, flower_len, u, xr)
            for i in range(pr):
                pair_stack[top, 0] = flower[u, i]
                pair_stack[top, 1] = flower[u, i ^ 1]
                top += 1
            pair_stack[top, 0] = xr
            pair_stack[top, 1] = v
            top += 1
            if pr > 0:
                ln = flower_len[u]
                for i in range(ln):
                    scratch[i] = flower[u, (i + pr) % ln]
                for i in range(ln):
                    flower[u, i] = scratch[i]


@njit(cache=True)
def _augment(match, st, pa, g_u, g_v, flower, flower_len, flower_from,
             pair_stack, scratch, n, u, v):
    uu = u
    vv = v
    while True:
        xnv = st[match[uu]]
        _set_match(match, g_u, g_v, flower, flower_len, flower_from,
                   pair_stack, scratch, n, uu, vv)
        if xnv == 0:
            return
        _set_match(match, g_u, g_v, flower, flower_len, flower_from,
                   pair_stack, scratch, n, xnv, st[pa[xnv]])
        uu = st[pa[xnv]]
        vv = xnv


@njit(cache=True)
def _get_lca(vis, state, st, match, pa, u, v):
    state[_VIST] += 1
    t = state[_VIST]
    uu = u
    vv = v
    while uu != 0 or vv != 0:
        if uu != 0:
            if vis[uu] == t:
                return uu
            vis[uu] = t
            uu = st[match[uu]]
            if uu != 0:
                uu = st[pa[uu]]
        tmp = uu
        uu = vv
        vv = tmp
    return 0


@njit(cache=True)
def _add_blossom(lab, g_u, g_v, g_w, match, slack, st, pa, s_lbl, flower,
                 flower_len, flower_from, queue, stack, state, n, u, lca, v):
    b = n + 1
    while b <= state[_NX] and st[b] != 0:
        b += 1
    if b > state[_NX]:
        state[_NX] += 1
    lab[b] = 0
    s_lbl[b] = 0
    match[b] = match[lca]
    flower[b, 0] = lca
    flower_len[b] = 1
    x = u
    while x != lca:
        flower[b, flower_len[b]] = x
        flower_len[b] += 1
        y = st[match[x]]
        flower[b, flower_len[b]] = y
        flower_len[b] += 1
        _q_push(queue, state, stack, flower, flower_len, n, y)
        x = st[pa[y]]
    lo = 1
    hi = flower_len[b] - 1
    while lo < hi:
        tmp = flower[b, lo]
        flower[b, lo] = flower[b, hi]
        flower[b, hi] = tmp
        lo += 1
        hi -= 1
    x = v
    while x != lca:
        flower[b, flower_len[b]] = x
        flower_len[b] += 1
        y = st[match[x]]
        flower[b, flower_len[b]] = y
        flower_len[b] += 1
        _q_push(queue, state, stack, flower, flower_len, n, y)
        x = st[pa[y]]
    _set_st(st, stack, flower, flower_len, n, b, b)
    n_x = state[_NX]
    for x in range(1, n_x + 1):
        g_w[b, x] = 0
        g_w[x, b] = 0
    for x in range(1, n + 1):
        flower_from[b, x] = 0
    for i in range(flower_len[b]):
        xs = flower[b, i]
        for x in range(1, n_x + 1):
            if g_w[xs, x] > 0 and (
                    g_w[b, x] == 0
                    or _e_delta(lab, g_u, g_v, g_w, xs, x)
                    < _e_delta(lab, g_u, g_v, g_w, b, x)):
                g_u[b, x] = g_u[xs, x]
                g_v[b, x] = g_v[xs, x]
                g_w[b, x] = g_w[xs, x]
                g_u[x, b] = g_u[x, xs]
                g_v[x, b] = g_v[x, xs]
                g_w[x, b] = g_w[x, xs]
        for x in range(1, n + 1):
            if flower_from[xs, x] != 0:
                flower_from[b, x] = xs
    _set_slack(lab, g_u, g_v, g_w, slack, st, s_lbl, n, b)


@njit(cache=True)
def _expand_blossom(lab, g_u, g_v, g_w, slack, st, pa, s_lbl, flower,
                    flower_len, flower_from, queue, stack, state, n, b):
    for i in range(flower_len[b]):
        _set_st(st, stack, flower, flower_len, n, flower[b, i], flower[b, i])
    xr = flower_from[b, g_u[b, pa[b]]]
    pr = _get_pr(flower, flower_len, b, xr)
    i = 0
    while i < pr:
        xs = flower[b, i]
        xns = flower[b, i + 1]
        pa[xs] = g_u[xns, xs]
        s_lbl[xs] = 1
        s_lbl[xns] = 0
        slack[xs] = 0
        _set_slack(lab, g_u, g_v, g_w, slack, st, s_lbl, n, xns)
        _q_push(queue, state, stack, flower, flower_len, n, xns)
        i += 2
    s_lbl[xr] = 1
    pa[xr] = pa[b]
    for i in range(pr + 1, flower_len[b]):
        xs = flower[b, i]
        s_lbl[xs] = -1
        _set_slack(lab, g_u, g_v, g_w, slack, st, s_lbl, n, xs)
    st[b] = 0


@njit(cache=True)
def _on_found_edge(lab, g_u, g_v, g_w, match, slack, st, pa, s_lbl, vis,
                   flower, flower_len, flower_from, queue, stack, pair_stack,
                   scratch, state, n, eu, ev):
    u = st[eu]
    v = st[ev]
    if s_lbl[v] == -1:
        pa[v] = eu
        s_lbl[v] = 1
        nu = st[match[v]]
        slack[v] = 0
        slack[nu] = 0
        s_lbl[nu] = 0
        _q_push(queue, state, stack, flower, flower_len, n, nu)
    elif s_lbl[v] == 0:
        lca = _get_lca(vis, state, st, match, pa, u, v)
        if lca == 0:
            _augment(match, st, pa, g_u, g_v, flower, flower_len,
                     flower_from, pair_stack, scratch, n, u, v)
            _augment(match, st, pa, g_u, g_v, flower, flower_len,
                     flower_from, pair_stack, scratch, n, v, u)
            return True
        else:
            _add_blossom(lab, g_u, g_v, g_w, match, slack, st, pa, s_lbl,
                         flower, flower_len, flower_from, queue, stack,
                         state, n, u, lca, v)
    return False


@njit(cache=True)
def _matching_phase(lab, g_u, g_v, g_w, match, slack, st, pa, s_lbl, vis,
                    flower, flower_len, flower_from, queue, stack,
                    pair_stack, scratch, state, n, nbr, nbr_cnt):
    for x in range(1, state[_NX] + 1):
        s_lbl[x] = -1
        slack[x] = 0
    state[_QH] = 0
    state[_QT] = 0
    for x in range(1, state[_NX] + 1):
        if st[x] == x and match[x] == 0:
            pa[x] = 0
            s_lbl[x] = 0
            _q_push(queue, state, stack, flower, flower_len, n, x)
    if state[_QH] == state[_QT]:
        return False
    while True:
        while state[_QH] < state[_QT]:
            u = queue[state[_QH] % len(queue)]
            state[_QH] += 1
            if s_lbl[st[u]] == 1:
                continue
            for vi in range(nbr_cnt[u]):
                v = nbr[u, vi]
                if g_w[u, v] > 0 and st[u] != st[v]:
                    # real-real edge: e_delta without indirection
                    if lab[u] + lab[v] - 2 * g_w[u, v] == 0:
                        if _on_found_edge(lab, g_u, g_v, g_w, match, slack,
                                          st, pa, s_lbl, vis, flower,
                                          flower_len, flower_from, queue,
                                          stack, pair_stack, scratch, state,
                                          n, u, v):
                            return True
                    else:
                        _update_slack(lab, g_u, g_v, g_w, slack, u, st[v])
        d = INT_INF
        for b in range(n + 1, state[_NX] + 1):
            if st[b] == b and s_lbl[b] == 1:
                half = lab[b] // 2
                if half < d:
                    d = half
        for x in range(1, state[_NX] + 1):
            if st[x] == x and slack[x] != 0:
                if s_lbl[x] == -1:
                    val = _e_delta(lab, g_u, g_v, g_w, slack[x], x)
                    if val < d:
                        d = val
                elif s_lbl[x] == 0:
                    val = _e_delta(lab, g_u, g_v, g_w, slack[x], x) // 2
                    if val < d:
                        d = val
        for u in range(1, n + 1):
            if s_lbl[st[u]] == 0:
                if lab[u] <= d:
                    return False
                lab[u] -= d
            elif s_lbl[st[u]] == 1:
                lab[u] += d
        for b in range(n + 1, state[_NX] + 1):
            if st[b] == b:
                if s_lbl[b] == 0:
                    lab[b] += d * 2
                elif s_lbl[b] == 1:
                    lab[b] -= d * 2
        state[_QH] = 0
        state[_QT] = 0
        x = 1
        while x <= state[_NX]:
            if (st[x] == x and slack[x] != 0 and st[slack[x]] != x
                    and _e_delta(lab, g_u, g_v, g_w, slack[x], x) == 0):
                if _on_found_edge(lab, g_u, g_v, g_w, match, slack, st, pa,
                                  s_lbl, vis, flower, flower_len,
                                  flower_from, queue, stack, pair_stack,
                                  scratch, state, n, slack[x], x):
                    return True
            x += 1
        for b in range(n + 1, state[_NX] + 1):
            if st[b] == b and s_lbl[b] == 1 and lab[b] == 0:
                _expand_blossom(lab, g_u, g_v, g_w, slack, st, pa, s_lbl,
                                flower, flower_len, flower_from, queue,
                                stack, state, n, b)
    return False


@njit(cache=True)
def _blossom_max_matching(w_in: np.ndarray, nbr: np.ndarray,
                          nbr_cnt: np.ndarray):
    """Maximum-weight matching; w_in is (n+1, n+1) int64, 1-indexed,
    w > 0 marks an existing edge; nbr/nbr_cnt give each real vertex's
    candidate partners.  Returns (match, lab, st, flower_from, n_x)."""
    n = w_in.shape[0] - 1
    sz = n + n // 2 + 2
    g_w = np.zeros((sz, sz), dtype=np.int64)
    g_u = np.zeros((sz, sz), dtype=np.int32)
    g_v = np.zeros((sz, sz), dtype=np.int32)
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            g_w[u, v] = w_in[u, v]
            g_u[u, v] = u
            g_v[u, v] = v
    lab = np.zeros(sz, dtype=np.int64)
    match = np.zeros(sz, dtype=np.int32)
    slack = np.zeros(sz, dtype=np.int32)
    st = np.zeros(sz, dtype=np.int32)
    pa = np.zeros(sz, dtype=np.int32)
    s_lbl = np.full(sz, -1, dtype=np.int32)
    vis = np.zeros(sz, dtype=np.int64)
    flower = np.zeros((sz, sz), dtype=np.int32)
    flower_len = np.zeros(sz, dtype=np.int32)
    flower_from = np.zeros((sz, n + 1), dtype=np.int32)
    queue = np.zeros(4 * sz + 16, dtype=np.int32)
    stack = np.zeros(4 * sz + 16, dtype=np.int32)
    pair_stack = np.zeros((4 * sz + 16, 2), dtype=np.int32)
    scratch = np.zeros(sz, dtype=np.int32)
    state = np.zeros(4, dtype=np.int64)
    state[_NX] = n

    w_max = np.int64(0)
    for u in range(1, n + 1):
        st[u] = u
        for v in range(1, n + 1):
            flower_from[u, v] = u if u == v else 0
            if g_w[u, v] > w_max:
                w_max = g_w[u, v]
    for u in range(1, n + 1):
        lab[u] = w_max

    while _matching_phase(lab, g_u, g_v, g_w, match, slack, st, pa, s_lbl,
                          vis, flower, flower_len, flower_from, queue,
                          stack, pair_stack, scratch, state, n, nbr,
                          nbr_cnt):
        pass
    return match, lab, st, flower_from, state[_NX]


def _full_neighbor_lists(n: int) -> tuple[np.ndarray, np.ndarray]:
    nbr = np.zeros((n + 1, max(1, n)), dtype=np.int32)
    for u in range(1, n + 1):
        col = 0
        for v in range(1, n + 1):
            if v != u:
                nbr[u, col] = v
                col += 1
    cnt = np.full(n + 1, n - 1 if n > 1 else 0, dtype=np.int32)
    cnt[0] = 0
    return nbr, cnt


def max_weight_matching_dense(weights: np.ndarray) -> np.ndarray:
    """Maximum-weight matching; weights (n, n) int64, 0 = missing edge.

    Returns partner array (0-indexed, -1 = unmatched)."""
    n = weights.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    w = np.zeros((n + 1, n + 1), dtype=np.int64)
    w[1:, 1:] = weights
    for i in range(1, n + 1):
        w[i, i] = 0
    nbr, cnt = _full_neighbor_lists(n)
    match = _blossom_max_matching(w, nbr, cnt)[0]
    out = np.full(n, -1, dtype=np.int64)
    for u in range(1, n + 1):
        if match[u] > 0:
            out[u - 1] = match[u] - 1
    return out


def scale_weights(dist: np.ndarray) -> np.ndarray:
    """Round a float distance matrix into the common integer domain."""
    finite = np.isfinite(dist)
    out = np.full(dist.shape, INT_INF, dtype=np.int64)
    out[finite] = np.round(dist[finite] * WEIGHT_SCALE).astype(np.int64)
    return out


def min_weight_perfect_matching(
    dist_int: np.ndarray, knn: int = 20
) -> tuple[np.ndarray, int]:
    """Exact minimum-weight perfect matching of an even-sized dense graph.

    dist_int: symmetric int64 distances (INT_INF = unusable edge).
    Runs the blossom on the k-nearest-neighbour edge subset first and
    accepts only if the LP duals certify optimality over every excluded
    edge; otherwise re-solves on the full graph.  Exact either way.
    Returns (partner array, total integer weight).
    """
    n = dist_int.shape[0]
    if n % 2:
        raise ValueError("perfect matching needs an even number of vertices")
    if n == 0:
        return np.zeros(0, dtype=np.int64), 0
    usable = dist_int < INT_INF
    if n == 2:
        if not usable[0, 1]:
            raise ValueError("defect pair is unreachable")
        return np.array([1, 0], dtype=np.int64), int(dist_int[0, 1])
    w_cap = int(dist_int[usable].max()) if usable.any() else 0
    big = w_cap + 1
    comp = np.zeros((n, n), dtype=np.int64)
    rows, cols = np.nonzero(usable)
    comp[rows, cols] = big - dist_int[rows, cols] + 1
    np.fill_diagonal(comp, 0)

    if knn and knn < n - 1:
        result = _solve_sparse_certified(dist_int, comp, usable, knn)
        if result is not None:
            return result
    partner = max_weight_matching_dense(comp)
    if np.any(partner < 0):
        raise ValueError("no perfect matching exists on usable edges")
    total = 0
    for i in range(n):
        j = int(partner[i])
        if j > i:
            total += int(dist_int[i, j])
    return partner, total


def _solve_sparse_certified(dist_int, comp, usable, knn):
    """Blossom on k-NN edges plus dual-certificate check; None on failure."""
    n = dist_int.shape[0]
    order = np.argsort(dist_int + np.where(usable, 0, INT_INF), axis=1,
                       kind="stable")
    include = np.zeros((n, n), dtype=bool)
    for i in range(n):
        picked = 0
        for j in order[i]:
            if j == i or not usable[i, j]:
                continue
            include[i, j] = True
            include[j, i] = True
            picked += 1
            if picked >= knn:
                break
    w = np.zeros((n + 1, n + 1), dtype=np.int64)
    sub = np.where(include, comp, 0)
    w[1:, 1:] = sub
    nbr = np.zeros((n + 1, n), dtype=np.int32)
    cnt = np.zeros(n + 1, dtype=np.int32)
    for i in range(n):
        js = np.nonzero(include[i])[0]
        cnt[i + 1] = len(js)
        nbr[i + 1, : len(js)] = js + 1
    match, lab, st, flower_from, n_x = _blossom_max_matching(w, nbr, cnt)
    partner = np.full(n, -1, dtype=np.int64)
    for u in range(1, n + 1):
        if match[u] > 0:
            partner[u - 1] = match[u] - 1
    if np.any(partner < 0):
        return None
    # certificate: excluded edges must satisfy lab_u + lab_v (+ nested
    # blossom duals for pairs inside one blossom) >= 2 * complement weight
    lab_v = lab[1 : n + 1]
    lhs = lab_v[:, None] + lab_v[None, :]
    rhs = 2 * comp
    slackness = lhs - rhs
    excluded = usable & ~include
    np.fill_diagonal(excluded, False)
    bad = excluded & (slackness < 0)
    if bad.any():
        for i, j in zip(*np.nonzero(bad)):
            if i > j:
                continue
            z = 0
            for b in range(n + 1, int(n_x) + 1):
                if st[b] != 0 and flower_from[b, i + 1] != 0 \
                        and flower_from[b, j + 1] != 0:
                    z += 2 * int(lab[b])
            if int(slackness[i, j]) + z < 0:
                return None
    total = 0
    for i in range(n):
        j = int(partner[i])
        if j > i:
            total += int(dist_int[i, j])
    return partner, total


def brute_force_min_perfect(dist_int: np.ndarray) -> tuple[list[tuple[int, int]], int]:
    """Enumerate all (2k-1)!! pairings; oracle for small defect sets."""
    n = dist_int.shape[0]
    if n % 2:
        raise ValueError("odd vertex count")
    if n > 12:
        raise ValueError("brute force oracle limited to 12 vertices")
    best: list = [None]
    best_pairs: list = [[]]

    def rec(remaining, acc, pairs):
        if not remaining:
            if best[0] is None or acc < best[0]:
                best[0] = acc
                best_pairs[0] = list(pairs)
            return
        a = remaining[0]
        for idx in range(1, len(remaining)):
            b = remaining[idx]
            w = int(dist_int[a, b])
            if w >= INT_INF:
                continue
            if best[0] is not None and acc + w >= best[0]:
                continue
            rest = remaining[1:idx] + remaining[idx + 1:]
            pairs.append((a, b))
            rec(rest, acc + w, pairs)
            pairs.pop()

    rec(list(range(n)), 0, [])
    if best[0] is None:
        raise ValueError("no perfect matching exists")
    return best_pairs[0], best[0]
