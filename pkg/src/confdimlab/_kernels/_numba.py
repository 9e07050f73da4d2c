"""numba ports of the kernels in ``_numpy.py``."""

import numpy as np
from numba import njit


@njit(cache=True)
def triangle_violation(D, rtol):
    n = D.shape[0]
    for k in range(n):
        for i in range(n):
            dik = D[i, k]
            for j in range(n):
                via = dik + D[k, j]
                if D[i, j] > via + rtol * max(via, 1.0):
                    return i, j, k, D[i, j] - via
    return -1, -1, -1, 0.0


@njit(cache=True)
def pair_ratio_max(u, D, rows, cols, alpha):
    best = 0.0
    bi = -1
    bj = -1
    one = alpha == 1.0
    for a in range(rows.shape[0]):
        i = rows[a]
        ui = u[i]
        for b in range(cols.shape[0]):
            j = cols[b]
            d = D[i, j]
            if d > 0.0:
                diff = abs(ui - u[j])
                if diff > 0.0:
                    r = diff / d if one else diff / d ** alpha
                    if r > best:
                        best = r
                        bi = i
                        bj = j
    return best, bi, bj


@njit(cache=True)
def mcshane(vals, D, w_idx, L):
    n = D.shape[0]
    out = np.empty(n)
    for x in range(n):
        m = np.inf
        for t in range(w_idx.shape[0]):
            c = vals[t] + L * D[x, w_idx[t]]
            if c < m:
                m = c
        out[x] = m
    return out


@njit(cache=True)
def _push(hk, hv, size, key, v):
    i = size
    hk[i] = key
    hv[i] = v
    while i > 0:
        par = (i - 1) >> 1
        if hk[par] < hk[i] or (hk[par] == hk[i] and hv[par] <= hv[i]):
            break
        hk[par], hk[i] = hk[i], hk[par]
        hv[par], hv[i] = hv[i], hv[par]
        i = par
    return size + 1


@njit(cache=True)
def _pop(hk, hv, size):
    key = hk[0]
    v = hv[0]
    size -= 1
    hk[0] = hk[size]
    hv[0] = hv[size]
    i = 0
    while True:
        l = 2 * i + 1
        r = l + 1
        m = i
        if l < size and (hk[l] < hk[m] or (hk[l] == hk[m] and hv[l] < hv[m])):
            m = l
        if r < size and (hk[r] < hk[m] or (hk[r] == hk[m] and hv[r] < hv[m])):
            m = r
        if m == i:
            break
        hk[m], hk[i] = hk[i], hk[m]
        hv[m], hv[i] = hv[i], hv[m]
        i = m
    return key, v, size


@njit(cache=True)
def vertex_dijkstra(indptr, indices, w, src_mask, tgt_mask):
    n = w.shape[0]
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    cap = n + indices.shape[0] + 1
    hk = np.empty(cap)
    hv = np.empty(cap, dtype=np.int64)
    size = 0
    for v in range(n):
        if src_mask[v]:
            dist[v] = w[v]
            size = _push(hk, hv, size, w[v], v)
    while size > 0:
        d, v, size = _pop(hk, hv, size)
        if done[v]:
            continue
        done[v] = True
        if tgt_mask[v]:
            return v, dist, pred
        for e in range(indptr[v], indptr[v + 1]):
            x = indices[e]
            nd = d + w[x]
            if nd < dist[x]:
                dist[x] = nd
                pred[x] = v
                size = _push(hk, hv, size, nd, x)
    return -1, dist, pred


@njit(cache=True)
def _solve_multiplier(a, lam0, p):
    q = 1.0 / (p - 1.0)
    m = a.shape[0]
    tot = 0.0
    for i in range(m):
        tot += (a[i] / p) ** q
    if tot >= 1.0:
        return 0.0
    lo = 0.0
    hi = p * m ** (1.0 - p)
    x = min(max(lam0, lo), hi)
    for _ in range(200):
        phi = -1.0
        dphi = 0.0
        finite = True
        for i in range(m):
            t = (a[i] + x) / p
            phi += t ** q
            if t > 0.0:
                dphi += t ** (q - 1.0)
            else:
                finite = False
        if phi == 0.0:
            return x
        if phi < 0.0:
            lo = x
        else:
            hi = x
        if hi - lo <= 1e-16 * hi:
            break
        dphi *= q / p
        if finite and dphi > 0.0:
            nx = x - phi / dphi
        else:
            nx = 0.5 * (lo + hi)
        if not (lo < nx < hi):
            nx = 0.5 * (lo + hi)
        if abs(nx - x) <= 1e-16 * max(x, 1e-300) and abs(phi) < 1e-15:
            x = nx
            break
        x = nx
    return x


@njit(cache=True)
def dual_sweep(ptr, idx, lam, s, p):
    nc = ptr.shape[0] - 1
    for c in range(nc):
        b0 = ptr[c]
        b1 = ptr[c + 1]
        old = lam[c]
        a = np.empty(b1 - b0)
        for t in range(b0, b1):
            v = s[idx[t]] - old
            a[t - b0] = v if v > 0.0 else 0.0
        new = _solve_multiplier(a, old, p)
        if new != old:
            for t in range(b0, b1):
                s[idx[t]] = a[t - b0] + new
            lam[c] = new


@njit(cache=True)
def curve_lengths(ptr, idx, rho):
    nc = ptr.shape[0] - 1
    out = np.zeros(nc)
    for c in range(nc):
        acc = 0.0
        for t in range(ptr[c], ptr[c + 1]):
            acc += rho[idx[t]]
        out[c] = acc
    return out
