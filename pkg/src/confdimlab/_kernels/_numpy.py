"""Pure-numpy reference kernels.

Each function here has a numba twin in ``_numba.py`` with the same
signature and the same results (bitwise for the combinatorial kernels,
to rounding for the reductions).
"""

import heapq

import numpy as np

_BLOCK = 256


def triangle_violation(D, rtol):
    """First triple (i, j, k) with D[i,j] > D[i,k] + D[k,j] beyond tolerance."""
    n = D.shape[0]
    for k in range(n):
        via = D[:, k][:, None] + D[k, :][None, :]
        bad = D > via + rtol * np.maximum(via, 1.0)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return int(i), int(j), int(k), float(D[i, j] - via[i, j])
    return -1, -1, -1, 0.0


def pair_ratio_max(u, D, rows, cols, alpha):
    """max |u_i - u_j| / D_ij**alpha over i in rows, j in cols, D_ij > 0."""
    best, bi, bj = 0.0, -1, -1
    uc = u[cols]
    for start in range(0, len(rows), _BLOCK):
        r = rows[start:start + _BLOCK]
        d = D[np.ix_(r, cols)]
        diff = np.abs(u[r][:, None] - uc[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(d > 0, diff / d ** alpha, 0.0)
        flat = int(np.argmax(ratio))
        val = ratio.flat[flat]
        if val > best:
            a, b = divmod(flat, len(cols))
            best, bi, bj = float(val), int(r[a]), int(cols[b])
    return best, bi, bj


def mcshane(vals, D, w_idx, L):
    """f(x) = min_t vals[t] + L * D[x, w_idx[t]] for every point x."""
    n = D.shape[0]
    out = np.empty(n)
    for start in range(0, n, _BLOCK):
        block = D[start:start + _BLOCK][:, w_idx]
        out[start:start + _BLOCK] = (vals[None, :] + L * block).min(axis=1)
    return out


def vertex_dijkstra(indptr, indices, w, src_mask, tgt_mask):
    """Vertex-weighted multi-source Dijkstra, stopping at the first target.

    A path's weight is the sum of ``w`` over its vertices, both ends
    included.  Returns ``(target, dist, pred)``; ``target`` is -1 when no
    target is reachable.
    """
    n = len(w)
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    heap = []
    for v in np.flatnonzero(src_mask):
        v = int(v)
        dist[v] = w[v]
        heap.append((float(w[v]), v))
    heapq.heapify(heap)
    while heap:
        d, v = heapq.heappop(heap)
        if done[v]:
            continue
        done[v] = True
        if tgt_mask[v]:
            return v, dist, pred
        for e in range(indptr[v], indptr[v + 1]):
            x = int(indices[e])
            nd = d + w[x]
            if nd < dist[x]:
                dist[x] = nd
                pred[x] = v
                heapq.heappush(heap, (nd, x))
    return -1, dist, pred


def _solve_multiplier(a, lam0, p):
    q = 1.0 / (p - 1.0)
    if np.sum((a / p) ** q) >= 1.0:
        return 0.0
    lo, hi = 0.0, p * len(a) ** (1.0 - p)
    x = min(max(lam0, lo), hi)
    for _ in range(200):
        t = (a + x) / p
        phi = np.sum(t ** q) - 1.0
        if phi == 0.0:
            return x
        if phi < 0.0:
            lo = x
        else:
            hi = x
        if hi - lo <= 1e-16 * hi:
            break
        dphi = q / p * np.sum(t ** (q - 1.0)) if np.all(t > 0) else np.inf
        nx = x - phi / dphi if np.isfinite(dphi) and dphi > 0 else 0.5 * (lo + hi)
        if not (lo < nx < hi):
            nx = 0.5 * (lo + hi)
        if abs(nx - x) <= 1e-16 * max(x, 1e-300) and abs(phi) < 1e-15:
            x = nx
            break
        x = nx
    return x


def dual_sweep(ptr, idx, lam, s, p):
    """One cyclic pass of exact dual coordinate ascent, in place."""
    for c in range(len(ptr) - 1):
        cells = idx[ptr[c]:ptr[c + 1]]
        old = lam[c]
        a = np.maximum(s[cells] - old, 0.0)
        new = _solve_multiplier(a, old, p)
        if new != old:
            s[cells] = a + new
            lam[c] = new


def curve_lengths(ptr, idx, rho):
    out = np.zeros(len(ptr) - 1)
    for c in range(len(ptr) - 1):
        out[c] = rho[idx[ptr[c]:ptr[c + 1]]].sum()
    return out
