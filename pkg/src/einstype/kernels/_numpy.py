"""Vectorised reference implementations of the hot kernels."""

import numpy as np


def curvature_jet(g, G, dg, d2g, d3g):
    """Connection and curvature data from a third-order metric jet.

    Returns ``(gam, dgam, R, nablaR)`` with
    ``gam[k, i, j] = Gamma^k_ij``, ``dgam[k, i, j, l] = d_l Gamma^k_ij``,
    ``R[i, j, k, l]`` the fully lowered Riemann tensor and
    ``nablaR[i, j, k, l, a] = nabla_a R_ijkl``.
    """
    # first-kind symbols and their partials: low[s, i, j] = Gamma_{s ij}
    low = 0.5 * (np.einsum("sji->sij", dg) + dg - np.einsum("ijs->sij", dg))
    dlow = 0.5 * (np.einsum("sjil->sijl", d2g) + d2g - np.einsum("ijsl->sijl", d2g))
    d2low = 0.5 * (np.einsum("sjilr->sijlr", d3g) + d3g - np.einsum("ijslr->sijlr", d3g))

    # dG[k, s, l] = d_l G^ks ; d2G[k, s, l, r] = d_r d_l G^ks
    dG = -np.einsum("ka,abl,bs->ksl", G, dg, G)
    d2G = (
        -np.einsum("kal,abr,bs->kslr", dG, dg, G)
        - np.einsum("ka,abr,bsl->kslr", G, dg, dG)
        - np.einsum("ka,ablr,bs->kslr", G, d2g, G)
    )

    gam = np.einsum("ks,sij->kij", G, low)
    dgam = np.einsum("ksl,sij->kijl", dG, low) + np.einsum("ks,sijl->kijl", G, dlow)
    d2gam = (
        np.einsum("kslr,sij->kijlr", d2G, low)
        + np.einsum("ksl,sijr->kijlr", dG, dlow)
        + np.einsum("ksr,sijl->kijlr", dG, dlow)
        + np.einsum("ks,sijlr->kijlr", G, d2low)
    )

    # R^r_{s mu nu} = d_mu Gam^r_{nu s} - d_nu Gam^r_{mu s} + Gam^r_{mu l} Gam^l_{nu s} - (mu <-> nu)
    t = np.einsum("rnsm->rsmn", dgam) + np.einsum("rml,lns->rsmn", gam, gam)
    Rup = t - t.transpose(0, 1, 3, 2)
    dt = np.einsum("rnsma->rsmna", d2gam) + np.einsum("rmla,lns->rsmna", dgam, gam) \
        + np.einsum("rml,lnsa->rsmna", gam, dgam)
    dRup = dt - dt.transpose(0, 1, 3, 2, 4)

    R = np.einsum("pr,rsmn->psmn", g, Rup)
    dR = np.einsum("pra,rsmn->psmna", dg, Rup) + np.einsum("pr,rsmna->psmna", g, dRup)
    nablaR = (
        dR
        - np.einsum("lai,ljkm->ijkma", gam, R)
        - np.einsum("laj,ilkm->ijkma", gam, R)
        - np.einsum("lak,ijlm->ijkma", gam, R)
        - np.einsum("lam,ijkl->ijkma", gam, R)
    )
    return gam, dgam, R, nablaR


def curvature_low(g, G, dg, d2g):
    """Second-order variant: ``(gam, dgam, R)`` without the Riemann derivative."""
    low = 0.5 * (np.einsum("sji->sij", dg) + dg - np.einsum("ijs->sij", dg))
    dlow = 0.5 * (np.einsum("sjil->sijl", d2g) + d2g - np.einsum("ijsl->sijl", d2g))
    dG = -np.einsum("ka,abl,bs->ksl", G, dg, G)
    gam = np.einsum("ks,sij->kij", G, low)
    dgam = np.einsum("ksl,sij->kijl", dG, low) + np.einsum("ks,sijl->kijl", G, dlow)
    t = np.einsum("rnsm->rsmn", dgam) + np.einsum("rml,lns->rsmn", gam, gam)
    Rup = t - t.transpose(0, 1, 3, 2)
    R = np.einsum("pr,rsmn->psmn", g, Rup)
    return gam, dgam, R


def tridiag_min_eig(d, e, tol=0.0):
    """Smallest eigenvalue of the symmetric tridiagonal matrix (d, e).

    Vectorised multisection on Sturm counts: each sweep evaluates the count
    at many shifts at once, shrinking the bracket by a factor of ``k + 1``.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = d.size
    r = np.abs(e)
    rad = np.zeros(n)
    rad[:-1] += r
    rad[1:] += r
    lo = float(np.min(d - rad))
    hi = float(np.max(d + rad))
    e2 = e * e
    k = 63
    pivmin = max(np.finfo(float).tiny, np.finfo(float).eps * max(abs(lo), abs(hi)) * 1e-6)
    eps = tol if tol > 0 else 4 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0)
    while hi - lo > eps:
        shifts = np.linspace(lo, hi, k + 2)[1:-1]
        q = d[0] - shifts
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count = (q < 0).astype(np.int64)
        for i in range(1, n):
            q = d[i] - shifts - e2[i - 1] / q
            q = np.where(np.abs(q) < pivmin, -pivmin, q)
            count += q < 0
        j = int(np.searchsorted(count >= 1, True))
        new_hi = shifts[j] if j < k else hi
        new_lo = shifts[j - 1] if j > 0 else lo
        if new_hi - new_lo >= hi - lo:
            break
        lo, hi = new_lo, new_hi
    return 0.5 * (lo + hi)
