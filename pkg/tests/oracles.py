"""Independent brute-force oracles for the test suite.

Everything here re-derives quantities from first principles with plain
loops and dense matrices, deliberately sharing no code with the library's
vectorized/sparse production paths.
"""

import numpy as np


def brute_transition(g, kernel="base"):
    """Dense one-step matrix over all 2^n configurations by direct enumeration."""
    n = g.n
    size = 1 << n
    p = np.zeros((size, size))
    f_max = max(g.m.max(), g.r.max())
    for x in range(size):
        if x == 0 or x == size - 1:
            p[x, x] = 1.0
            continue
        fit = np.array([g.m[u] if (x >> u) & 1 else g.r[u] for u in range(n)])
        total = fit.sum()
        for u in range(n):
            tgts, wts = g.out_arcs(u)
            if kernel == "base":
                pu = fit[u] / total
            else:
                pu = (fit[u] / f_max) / n
                p[x, x] += (1.0 - fit[u] / f_max) / n
            for v, w in zip(tgts, wts):
                y = x | (1 << int(v)) if (x >> u) & 1 else x & ~(1 << int(v))
                p[x, y] += pu * w
    return p


def brute_fixation(g, kernel="base"):
    """Fixation probability for every configuration from the dense chain."""
    n = g.n
    size = 1 << n
    p = brute_transition(g, kernel)
    trans = list(range(1, size - 1))
    fp = np.zeros(size)
    fp[size - 1] = 1.0
    if trans:
        q = p[np.ix_(trans, trans)]
        b = p[trans, size - 1]
        h = np.linalg.solve(np.eye(len(trans)) - q, b)
        fp[1:size - 1] = h
    return fp


def brute_expected_time(g, kernel="base"):
    """Expected steps to absorption for every configuration."""
    n = g.n
    size = 1 << n
    p = brute_transition(g, kernel)
    trans = list(range(1, size - 1))
    t = np.zeros(size)
    if trans:
        q = p[np.ix_(trans, trans)]
        t[1:size - 1] = np.linalg.solve(np.eye(len(trans)) - q, np.ones(len(trans)))
    return t


def conditional_kernel(p):
    """Row-normalized off-diagonal part: the law of the next state given a change."""
    q = p.copy()
    np.fill_diagonal(q, 0.0)
    sums = q.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        q = np.where(sums > 0, q / sums, 0.0)
    return q
