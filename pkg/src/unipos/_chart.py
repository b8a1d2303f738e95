"""Inside-outside kernels for the head-outward dependency model.

Probability-space charts over positions 0..n, with the artificial
root at position 0.  Six item families, each an [N, N] array:

  Cr[i, j]  head i, right spine over span i..j, still accepting deps
  Sr[i, j]  Cr[i, j] sealed by the rightward stop decision
  Or[i, j]  arc i -> j just built; j's left field lies inside
  Cl[h, i], Sl[h, i], Ol[h, i]  left mirrors over span i..h

The adjacency flag of every stop or continue decision is read off the
span: an empty spine span means no dependent was taken yet (index 1).
Position 0 never becomes a dependent, takes no left dependents, and
its left seal is pinned to probability one, so the sentence total is
Sr[0, n].

Compiled with numba; compilation is cached on disk after first use.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def inside(hidx, attach, stop, bias):
    """Fill the six inside charts; returns (Or, Cr, Sr, Ol, Cl, Sl)."""
    N = hidx.shape[0]
    Or = np.zeros((N, N))
    Cr = np.zeros((N, N))
    Sr = np.zeros((N, N))
    Ol = np.zeros((N, N))
    Cl = np.zeros((N, N))
    Sl = np.zeros((N, N))
    for i in range(N):
        t = hidx[i]
        Cr[i, i] = 1.0
        Sr[i, i] = stop[t, 1, 1]
        Cl[i, i] = 1.0
        Sl[i, i] = stop[t, 0, 1]
    for w in range(1, N):
        for i in range(N - w):
            j = i + w
            ti = hidx[i]
            tj = hidx[j]
            # Rightward arc i -> j over every split of j's left field.
            a = attach[ti, 1, tj] * bias[ti, tj]
            acc = 0.0
            for k in range(i, j):
                adj = 1 if k == i else 0
                acc += Cr[i, k] * (1.0 - stop[ti, 1, adj]) * Sl[j, k + 1]
            Or[i, j] = acc * a
            # Extend i's right spine to j with j's sealed right field.
            acc = 0.0
            for k in range(i + 1, j + 1):
                acc += Or[i, k] * Sr[k, j]
            Cr[i, j] = acc
            Sr[i, j] = Cr[i, j] * stop[ti, 1, 0]
            if i == 0:
                # The root takes no left dependents and never hangs
                # under another token; the left mirrors stay zero.
                continue
            al = attach[tj, 0, ti] * bias[tj, ti]
            acc = 0.0
            for k in range(i + 1, j + 1):
                adj = 1 if k == j else 0
                acc += Cl[j, k] * (1.0 - stop[tj, 0, adj]) * Sr[i, k - 1]
            Ol[j, i] = acc * al
            acc = 0.0
            for k in range(i, j):
                acc += Ol[j, k] * Sl[k, i]
            Cl[j, i] = acc
            Sl[j, i] = Cl[j, i] * stop[tj, 0, 0]
    return Or, Cr, Sr, Ol, Cl, Sl


@njit(cache=True)
def estep_sentence(hidx, attach, stop, bias, att_acc, stop_acc, cont_acc):
    """One sentence of expected counts, accumulated into the _acc arrays.

    Returns the sentence log likelihood.  The outside pass visits
    spans widest first; within one span sealed items hand mass to
    their unsealed twin, which hands mass to same-span arc items, so
    every outside value is complete before it is consumed.
    """
    N = hidx.shape[0]
    Or, Cr, Sr, Ol, Cl, Sl = inside(hidx, attach, stop, bias)
    n = N - 1
    Z = Sr[0, n]
    if Z <= 0.0:
        return -np.inf
    oOr = np.zeros((N, N))
    oCr = np.zeros((N, N))
    oSr = np.zeros((N, N))
    oOl = np.zeros((N, N))
    oCl = np.zeros((N, N))
    oSl = np.zeros((N, N))
    oSr[0, n] = 1.0
    for w in range(n, -1, -1):
        for i in range(N - w):
            j = i + w
            ti = hidx[i]
            tj = hidx[j]
            # Seals feed their unsealed twin; log the stop decision.
            adj = 1 if i == j else 0
            oCr[i, j] += oSr[i, j] * stop[ti, 1, adj]
            stop_acc[ti, 1, adj] += oSr[i, j] * Sr[i, j] / Z
            oCl[j, i] += oSl[j, i] * stop[tj, 0, adj]
            stop_acc[tj, 0, adj] += oSl[j, i] * Sl[j, i] / Z
            if i == j:
                continue
            # Spine extensions feed the arc and the dependent's seal.
            for k in range(i + 1, j + 1):
                oOr[i, k] += oCr[i, j] * Sr[k, j]
                oSr[k, j] += oCr[i, j] * Or[i, k]
            for k in range(i, j):
                oOl[j, k] += oCl[j, i] * Sl[k, i]
                oSl[k, i] += oCl[j, i] * Ol[j, k]
            # Arcs feed the head's spine and the dependent's left
            # field; log the attach and continue decisions.
            a = attach[ti, 1, tj] * bias[ti, tj]
            for k in range(i, j):
                adj = 1 if k == i else 0
                common = oOr[i, j] * (1.0 - stop[ti, 1, adj]) * a
                oCr[i, k] += common * Sl[j, k + 1]
                oSl[j, k + 1] += common * Cr[i, k]
                g = common * Cr[i, k] * Sl[j, k + 1] / Z
                att_acc[ti, 1, tj] += g
                cont_acc[ti, 1, adj] += g
            if i == 0:
                continue
            al = attach[tj, 0, ti] * bias[tj, ti]
            for k in range(i + 1, j + 1):
                adj = 1 if k == j else 0
                common = oOl[j, i] * (1.0 - stop[tj, 0, adj]) * al
                oCl[j, k] += common * Sr[i, k - 1]
                oSr[i, k - 1] += common * Cl[j, k]
                g = common * Cl[j, k] * Sr[i, k - 1] / Z
                att_acc[tj, 0, ti] += g
                cont_acc[tj, 0, adj] += g
    return np.log(Z)


@njit(cache=True)
def loglikelihood_sentence(hidx, attach, stop, bias):
    """Sentence log likelihood without count accumulation."""
    _, _, Sr, _, _, _ = inside(hidx, attach, stop, bias)
    Z = Sr[0, hidx.shape[0] - 1]
    if Z <= 0.0:
        return -np.inf
    return np.log(Z)
