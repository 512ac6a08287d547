"""Matching decoder with erasure support and torus homology accounting.

Decoding runs in two exactness-preserving stages.  Defects inside a
connected cluster of erased (zero-weight) edges pair up at zero cost by
peeling a spanning forest of the cluster; the leftover defects (at most
one per odd cluster) are matched by the exact blossom solver over
shortest-path distances computed with the per-sample weights.  Failure
is decided by the winding parity of the residual chain around the three
torus directions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from numba import njit
from scipy.sparse.csgraph import dijkstra

from .lattice import PeriodicSyndromeLattice
from .matching import min_weight_perfect_matching, scale_weights
from .noise import CollapsedLattice, NoiseSample, defects_of


@dataclass
class DecodeResult:
    correction: np.ndarray      # bool per edge
    failed: bool
    failure_cause: str          # 'homology' or 'none'
    matching_weight: int = 0    # integer-domain weight of the blossom stage


@dataclass
class DecoderContext:
    """Reusable per-(lattice, params) decoding state."""

    collapsed: CollapsedLattice
    csr: sp.csr_matrix
    csr_eid: sp.csr_matrix          # edge ids in the same sparsity pattern
    static_dist: Optional[np.ndarray] = None
    static_pred: Optional[np.ndarray] = None
    _csr_data_perm: Optional[np.ndarray] = None


def build_context(collapsed: CollapsedLattice,
                  precompute_static: bool = False) -> DecoderContext:
    lat = collapsed.lattice
    n = lat.n_vertices
    rows = np.concatenate([lat.edges_u, lat.edges_v])
    cols = np.concatenate([lat.edges_v, lat.edges_u])
    pairs = set(zip(rows.tolist(), cols.tolist()))
    if len(pairs) != 2 * lat.n_edges:
        raise ValueError("parallel edges survived multi-edge collapse")
    data = np.concatenate([collapsed.weight, collapsed.weight])
    csr = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    eids = np.concatenate([np.arange(lat.n_edges), np.arange(lat.n_edges)])
    csr_eid = sp.csr_matrix((eids + 1, (rows, cols)), shape=(n, n))
    csr_eid.sort_indices()
    csr.sort_indices()
    ctx = DecoderContext(collapsed, csr, csr_eid)
    if precompute_static:
        dist, pred = dijkstra(csr, directed=False, return_predecessors=True)
        ctx.static_dist = dist
        ctx.static_pred = pred.astype(np.int32)
    return ctx


@njit(cache=True)
def _peel_erased(n_vertices, edges_u, edges_v, erased_ids, parity):
    """Pair defects inside erased clusters along a spanning forest.

    Mutates `parity`; returns (correction edge ids, leftover defect ids).
    """
    parent = np.arange(n_vertices, dtype=np.int32)
    tree_parent = np.full(n_vertices, -1, dtype=np.int32)
    tree_edge = np.full(n_vertices, -1, dtype=np.int32)
    tree_child_count = np.zeros(n_vertices, dtype=np.int32)

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            nxt = parent[x]
            parent[x] = root
            x = nxt
        return root

    tree_edges = np.empty(len(erased_ids), dtype=np.int64)
    n_tree = 0
    for k in range(len(erased_ids)):
        e = erased_ids[k]
        ru = find(edges_u[e])
        rv = find(edges_v[e])
        if ru != rv:
            parent[ru] = rv
            tree_edges[n_tree] = e
            n_tree += 1
    # build a rooted forest over the tree edges via BFS from roots
    adj_head = np.full(n_vertices, -1, dtype=np.int64)
    adj_next = np.full(2 * n_tree, -1, dtype=np.int64)
    adj_vert = np.empty(2 * n_tree, dtype=np.int32)
    adj_eid = np.empty(2 * n_tree, dtype=np.int64)
    slot = 0
    for k in range(n_tree):
        e = tree_edges[k]
        for (a, b) in ((edges_u[e], edges_v[e]), (edges_v[e], edges_u[e])):
            adj_vert[slot] = b
            adj_eid[slot] = e
            adj_next[slot] = adj_head[a]
            adj_head[a] = slot
            slot += 1
    order = np.empty(n_vertices, dtype=np.int32)
    visited = np.zeros(n_vertices, dtype=np.uint8)
    n_order = 0
    for root in range(n_vertices):
        if visited[root]:
            continue
        # BFS only through tree edges
        visited[root] = 1
        order[n_order] = root
        n_order += 1
        head = n_order - 1
        while head < n_order:
            v = order[head]
            head += 1
            s = adj_head[v]
            while s != -1:
                w = adj_vert[s]
                if not visited[w]:
                    visited[w] = 1
                    tree_parent[w] = v
                    tree_edge[w] = adj_eid[s]
                    order[n_order] = w
                    n_order += 1
                s = adj_next[s]
    # peel leaves upward: reverse BFS order guarantees children first
    correction = np.empty(n_tree, dtype=np.int64)
    n_corr = 0
    for i in range(n_order - 1, -1, -1):
        v = order[i]
        if parity[v] and tree_parent[v] != -1:
            correction[n_corr] = tree_edge[v]
            n_corr += 1
            parity[v] = 0
            parity[tree_parent[v]] ^= 1
    leftover = np.nonzero(parity)[0].astype(np.int32)
    return correction[:n_corr], leftover


@njit(cache=True)
def _walk_paths(pred_rows, sources_pos, partner, defect_vertices,
                eid_indptr, eid_indices, eid_data, correction):
    """XOR shortest-path edges between matched defect pairs into correction.

    pred_rows[i]: predecessor row for the i-th free defect (aligned with
    sources_pos); partner pairs index into the free-defect list.
    """
    for i in range(len(partner)):
        j = partner[i]
        if j < i:
            continue
        cur = defect_vertices[j]
        target = defect_vertices[i]
        row = sources_pos[i]
        while cur != target:
            prev = pred_rows[row, cur]
            # edge id between prev and cur
            eid = -1
            for s in range(eid_indptr[prev], eid_indptr[prev + 1]):
                if eid_indices[s] == cur:
                    eid = eid_data[s] - 1
                    break
            correction[eid] ^= True
            cur = prev


def decode(ctx: DecoderContext, noise: NoiseSample) -> DecodeResult:
    """MWPM decode of one sample; erased edges decode at weight zero."""
    lat = ctx.collapsed.lattice
    parity = np.zeros(lat.n_vertices, dtype=np.uint8)
    parity[noise.defects] = 1
    if len(noise.defects) % 2:
        raise ValueError("odd defect count on a closed manifold")
    correction = np.zeros(lat.n_edges, dtype=bool)
    erased_ids = np.nonzero(noise.erased)[0]
    matching_weight = 0
    if len(erased_ids):
        peel_edges, free = _peel_erased(
            lat.n_vertices, lat.edges_u, lat.edges_v, erased_ids, parity
        )
        correction[peel_edges] = True
    else:
        free = noise.defects.astype(np.int32)
    if len(free):
        if not len(erased_ids) and ctx.static_dist is not None:
            dist = ctx.static_dist[np.ix_(free, free)]
            pred_rows = ctx.static_pred[free]
            sources_pos = np.arange(len(free))
        else:
            weights = np.where(noise.erased, 0.0, ctx.collapsed.weight)
            data = np.concatenate([weights, weights])
            graph = sp.csr_matrix(ctx.csr)
            graph.data = data[_csr_perm(ctx)]
            full_dist, full_pred = dijkstra(
                graph, directed=False, indices=free, return_predecessors=True
            )
            dist = full_dist[:, free]
            pred_rows = full_pred.astype(np.int32)
            sources_pos = np.arange(len(free))
        dist_int = scale_weights(dist)
        partner, matching_weight = min_weight_perfect_matching(dist_int)
        _walk_paths(pred_rows, sources_pos.astype(np.int64), partner,
                    free.astype(np.int64), ctx.csr_eid.indptr,
                    ctx.csr_eid.indices, ctx.csr_eid.data.astype(np.int64),
                    correction)
    residual_defects = defects_of(lat, noise.flipped ^ correction)
    if len(residual_defects):
        raise AssertionError("correction does not annihilate the syndrome")
    failed = logical_failure(lat, noise.flipped ^ correction)
    return DecodeResult(correction, failed, "homology" if failed else "none",
                        matching_weight)


def _csr_perm(ctx: DecoderContext) -> np.ndarray:
    """Permutation mapping doubled edge data into CSR order."""
    if ctx._csr_data_perm is not None:
        return ctx._csr_data_perm
    lat = ctx.collapsed.lattice
    rows = np.concatenate([lat.edges_u, lat.edges_v])
    cols = np.concatenate([lat.edges_v, lat.edges_u])
    marker = sp.csr_matrix(
        (np.arange(2 * lat.n_edges) + 1, (rows, cols)),
        shape=(lat.n_vertices, lat.n_vertices),
    )
    marker.sort_indices()
    ctx._csr_data_perm = marker.data - 1
    return ctx._csr_data_perm


def logical_failure(lattice: PeriodicSyndromeLattice,
                    residual: np.ndarray) -> bool:
    """True iff the residual closed chain winds an odd number of times
    around any of the three torus directions."""
    if len(defects_of(lattice, residual)):
        raise ValueError("residual chain has a nonempty boundary")
    crossings = lattice.crossings[residual].sum(axis=0) % 2
    return bool(crossings.any())


@njit(cache=True)
def _percolates(n_vertices, edges_u, edges_v, disp, erased_ids):
    parent = np.arange(n_vertices, dtype=np.int32)
    offset = np.zeros((n_vertices, 3), dtype=np.int64)

    def find(x):
        # collect chain, then compress with accumulated offsets
        root = x
        depth = 0
        while parent[root] != root:
            root = parent[root]
            depth += 1
        cur = x
        ox = np.int64(0)
        oy = np.int64(0)
        oz = np.int64(0)
        while parent[cur] != cur:
            nxt = parent[cur]
            ox += offset[cur, 0]
            oy += offset[cur, 1]
            oz += offset[cur, 2]
            cur = nxt
        # second pass: rewrite chain to point at root
        cur = x
        cx, cy, cz = ox, oy, oz
        while parent[cur] != cur:
            nxt = parent[cur]
            tx = offset[cur, 0]
            ty = offset[cur, 1]
            tz = offset[cur, 2]
            parent[cur] = root
            offset[cur, 0] = cx
            offset[cur, 1] = cy
            offset[cur, 2] = cz
            cx -= tx
            cy -= ty
            cz -= tz
            cur = nxt
        return root, ox, oy, oz

    for k in range(len(erased_ids)):
        e = erased_ids[k]
        u = edges_u[e]
        v = edges_v[e]
        ru, ux, uy, uz = find(u)
        rv, vx, vy, vz = find(v)
        dx = np.int64(disp[e, 0])
        dy = np.int64(disp[e, 1])
        dz = np.int64(disp[e, 2])
        if ru != rv:
            # lift(v) = lift(u) + d  =>  offset of rv under ru
            parent[rv] = ru
            offset[rv, 0] = ux + dx - vx
            offset[rv, 1] = uy + dy - vy
            offset[rv, 2] = uz + dz - vz
        else:
            if ux + dx != vx or uy + dy != vy or uz + dz != vz:
                return True
    return False


def percolation_check(lattice: PeriodicSyndromeLattice,
                      erased: np.ndarray) -> bool:
    """True iff the erased subgraph contains a homologically nontrivial
    cycle, detected by inconsistent lifts in the universal cover."""
    erased_ids = np.nonzero(erased)[0]
    if not len(erased_ids):
        return False
    return bool(_percolates(lattice.n_vertices, lattice.edges_u,
                            lattice.edges_v,
                            lattice.edges_disp.astype(np.int64), erased_ids))
