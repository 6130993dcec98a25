"""Loop-based kernels compiled with numba.

Same contracts as the functions in ``_numpy``; written as explicit loops so
the compiled code avoids the temporaries einsum allocates.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _first_kind(dg, d2g, d3g, m, order):
    low = np.zeros((m, m, m))
    dlow = np.zeros((m, m, m, m))
    d2low = np.zeros((m, m, m, m, m))
    for s in range(m):
        for i in range(m):
            for j in range(m):
                low[s, i, j] = 0.5 * (dg[s, j, i] + dg[s, i, j] - dg[i, j, s])
                for l in range(m):
                    dlow[s, i, j, l] = 0.5 * (d2g[s, j, i, l] + d2g[s, i, j, l] - d2g[i, j, s, l])
                    if order >= 3:
                        for r in range(m):
                            d2low[s, i, j, l, r] = 0.5 * (
                                d3g[s, j, i, l, r] + d3g[s, i, j, l, r] - d3g[i, j, s, l, r])
    return low, dlow, d2low


@njit(cache=True)
def _inverse_partials(G, dg, d2g, m, order):
    # dG[k, s, l] = -G^ka d_l g_ab G^bs
    tmp = np.zeros((m, m, m))
    for k in range(m):
        for b in range(m):
            for l in range(m):
                acc = 0.0
                for a in range(m):
                    acc += G[k, a] * dg[a, b, l]
                tmp[k, b, l] = acc
    dG = np.zeros((m, m, m))
    for k in range(m):
        for s in range(m):
            for l in range(m):
                acc = 0.0
                for b in range(m):
                    acc += tmp[k, b, l] * G[b, s]
                dG[k, s, l] = -acc
    d2G = np.zeros((m, m, m, m))
    if order < 3:
        return dG, d2G
    for k in range(m):
        for s in range(m):
            for l in range(m):
                for r in range(m):
                    acc = 0.0
                    for a in range(m):
                        for b in range(m):
                            acc += dG[k, a, l] * dg[a, b, r] * G[b, s]
                            acc += G[k, a] * dg[a, b, r] * dG[b, s, l]
                            acc += G[k, a] * d2g[a, b, l, r] * G[b, s]
                    d2G[k, s, l, r] = -acc
    return dG, d2G


@njit(cache=True)
def _jet(g, G, dg, d2g, d3g, order):
    m = g.shape[0]
    low, dlow, d2low = _first_kind(dg, d2g, d3g, m, order)
    dG, d2G = _inverse_partials(G, dg, d2g, m, order)

    gam = np.zeros((m, m, m))
    dgam = np.zeros((m, m, m, m))
    d2gam = np.zeros((m, m, m, m, m))
    for k in range(m):
        for i in range(m):
            for j in range(i, m):
                acc = 0.0
                for s in range(m):
                    acc += G[k, s] * low[s, i, j]
                gam[k, i, j] = acc
                gam[k, j, i] = acc
                for l in range(m):
                    acc = 0.0
                    for s in range(m):
                        acc += dG[k, s, l] * low[s, i, j] + G[k, s] * dlow[s, i, j, l]
                    dgam[k, i, j, l] = acc
                    dgam[k, j, i, l] = acc
                    if order >= 3:
                        for r in range(m):
                            acc = 0.0
                            for s in range(m):
                                acc += (d2G[k, s, l, r] * low[s, i, j]
                                        + dG[k, s, l] * dlow[s, i, j, r]
                                        + dG[k, s, r] * dlow[s, i, j, l]
                                        + G[k, s] * d2low[s, i, j, l, r])
                            d2gam[k, i, j, l, r] = acc
                            d2gam[k, j, i, l, r] = acc

    Rup = np.zeros((m, m, m, m))
    dRup = np.zeros((m, m, m, m, m))
    for r in range(m):
        for s in range(m):
            for a in range(m):
                for b in range(a + 1, m):
                    acc = dgam[r, b, s, a] - dgam[r, a, s, b]
                    for l in range(m):
                        acc += gam[r, a, l] * gam[l, b, s] - gam[r, b, l] * gam[l, a, s]
                    Rup[r, s, a, b] = acc
                    Rup[r, s, b, a] = -acc
                    if order >= 3:
                        for c in range(m):
                            acc = d2gam[r, b, s, a, c] - d2gam[r, a, s, b, c]
                            for l in range(m):
                                acc += (dgam[r, a, l, c] * gam[l, b, s] + gam[r, a, l] * dgam[l, b, s, c]
                                        - dgam[r, b, l, c] * gam[l, a, s] - gam[r, b, l] * dgam[l, a, s, c])
                            dRup[r, s, a, b, c] = acc
                            dRup[r, s, b, a, c] = -acc

    R = np.zeros((m, m, m, m))
    for p in range(m):
        for s in range(m):
            for a in range(m):
                for b in range(m):
                    acc = 0.0
                    for r in range(m):
                        acc += g[p, r] * Rup[r, s, a, b]
                    R[p, s, a, b] = acc

    nablaR = np.zeros((m, m, m, m, m))
    if order < 3:
        return gam, dgam, R, nablaR
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for q in range(m):
                    for a in range(m):
                        acc = 0.0
                        for r in range(m):
                            acc += dg[i, r, a] * Rup[r, j, k, q] + g[i, r] * dRup[r, j, k, q, a]
                        for l in range(m):
                            acc -= (gam[l, a, i] * R[l, j, k, q] + gam[l, a, j] * R[i, l, k, q]
                                    + gam[l, a, k] * R[i, j, l, q] + gam[l, a, q] * R[i, j, k, l])
                        nablaR[i, j, k, q, a] = acc
    return gam, dgam, R, nablaR


def curvature_jet(g, G, dg, d2g, d3g):
    return _jet(g, G, dg, d2g, d3g, 3)


def curvature_low(g, G, dg, d2g):
    m = g.shape[0]
    gam, dgam, R, _ = _jet(g, G, dg, d2g, np.zeros((m, m, m, m, m)), 2)
    return gam, dgam, R


@njit(cache=True)
def _sturm_count(d, e2, x, pivmin):
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, d.size):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


@njit(cache=True)
def _min_eig(d, e, tol):
    n = d.size
    lo = np.inf
    hi = -np.inf
    for i in range(n):
        rad = 0.0
        if i > 0:
            rad += abs(e[i - 1])
        if i < n - 1:
            rad += abs(e[i])
        lo = min(lo, d[i] - rad)
        hi = max(hi, d[i] + rad)
    e2 = e * e
    scale = max(abs(lo), abs(hi))
    pivmin = max(2.2250738585072014e-308, 2.220446049250313e-16 * scale * 1e-6)
    eps = tol if tol > 0 else 4 * 2.220446049250313e-16 * max(scale, 1.0)
    while hi - lo > eps:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _sturm_count(d, e2, mid, pivmin) >= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def tridiag_min_eig(d, e, tol=0.0):
    return _min_eig(np.ascontiguousarray(d, dtype=np.float64),
                    np.ascontiguousarray(e, dtype=np.float64), float(tol))
