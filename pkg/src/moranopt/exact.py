"""Ground-truth fixation probabilities via the absorbing chain over all 2^n configurations.

The chain's states are configuration bitmasks; the empty and full sets are
absorbing.  Fixation probabilities solve ``(I - Q) h = b`` where ``Q`` is
the transient-to-transient block and ``b`` collects one-step probabilities
into the full set; expected absorption times solve the same system with a
unit right-hand side.

The transition structure is assembled arc by arc, vectorized over all
masks at once, and never materialized dense beyond the configured cap:
small systems are eliminated directly, mid-sized ones factorized sparse,
and the largest supported sizes solved matrix-free.
"""

from __future__ import annotations

import warnings
import weakref
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import NotNeutral, NotUndirected, NoConvergence, SingularSystem, TooLarge
from .graphs import FitnessGraph, is_neutral, out_degrees, summary
from .process import full_mask, mask_from_nodes

DENSE_CAP_DEFAULT = 14
CAP_DEFAULT = 20
_DENSE_AUTO = 12      # above this, auto mode goes sparse to bound memory
_SPARSE_DIRECT_MAX = 16
RESIDUAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ExactResult:
    """Fixation probability (and optionally expected absorption time) for every configuration.

    Arrays are indexed by configuration bitmask; ``fp[0] == 0`` and
    ``fp[full] == 1`` by construction.
    """

    fp: np.ndarray
    expected_steps: np.ndarray | None = None


_table_cache: "weakref.WeakKeyDictionary[FitnessGraph, dict]" = weakref.WeakKeyDictionary()


def _transition_entries(g: FitnessGraph, kernel: str):
    """COO entries of Q over transient masks, plus the fixation RHS.

    Returns ``(rows, cols, probs, b)`` with rows/cols as transient indices
    (mask - 1).  Base kernel: reproducer u w.p. f_X(u)/F, arc w(u, v).
    Loopy kernel: reproducer uniform, arc (f_X(u)/f_max) w(u, v), plus the
    self-loop remainder on the diagonal.
    """
    n = g.n
    full = full_mask(n)
    masks = np.arange(1, full, dtype=np.int64)
    t = masks.size
    bits = [(masks >> u) & 1 for u in range(n)]

    if kernel == "base":
        totals = np.zeros(t)
        for u in range(n):
            totals += np.where(bits[u] == 1, g.m[u], g.r[u])
    elif kernel == "loopy":
        f_max = summary(g).f_max
    else:
        raise ValueError(f"unknown kernel {kernel!r}")

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    probs: list[np.ndarray] = []
    b = np.zeros(t)
    diag_extra = np.zeros(t)

    idx = masks - 1
    for u in range(n):
        f_u = np.where(bits[u] == 1, g.m[u], g.r[u])
        if kernel == "base":
            repro = f_u / totals
        else:
            repro = (f_u / f_max) / n
            diag_extra += (1.0 - f_u / f_max) / n
        tgts, wts = g.out_arcs(u)
        for v, w in zip(tgts, wts):
            p = repro * w
            nxt = np.where(bits[u] == 1, masks | (1 << int(v)), masks & ~(1 << int(v)))
            hits_full = nxt == full
            if np.any(hits_full):
                np.add.at(b, idx[hits_full], p[hits_full])
            interior = (nxt != full) & (nxt != 0)
            rows.append(idx[interior])
            cols.append(nxt[interior] - 1)
            probs.append(p[interior])
    if kernel == "loopy":
        rows.append(idx)
        cols.append(idx)
        probs.append(diag_extra)

    return (
        np.concatenate(rows) if rows else np.empty(0, dtype=np.int64),
        np.concatenate(cols) if cols else np.empty(0, dtype=np.int64),
        np.concatenate(probs) if probs else np.empty(0),
        b,
    )


def _solve_dense(rows, cols, probs, B, t):
    A = np.eye(t)
    np.subtract.at(A, (rows, cols), probs)
    try:
        with warnings.catch_warnings():
            # singularity is detected and rethrown below; the warning is noise
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(A)
            X = scipy.linalg.lu_solve((lu, piv), B)
            # one refinement pass keeps stiff instances honest at ~1e-12 residuals
            X += scipy.linalg.lu_solve((lu, piv), B - A @ X)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        # a singular factorization surfaces as NaN/Inf in the refinement input
        raise SingularSystem(str(exc)) from None
    return (lambda Y: A @ Y), X


def _solve_sparse(rows, cols, probs, B, t):
    q = scipy.sparse.coo_matrix((probs, (rows, cols)), shape=(t, t)).tocsc()
    A = (scipy.sparse.identity(t, format="csc") - q).tocsc()
    try:
        lu = scipy.sparse.linalg.splu(A)
        X = np.column_stack([lu.solve(B[:, j]) for j in range(B.shape[1])])
        X += np.column_stack([lu.solve((B - A @ X)[:, j]) for j in range(B.shape[1])])
    except RuntimeError as exc:
        raise SingularSystem(str(exc)) from None
    return (lambda Y: A @ Y), X


def _solve_matfree(rows, cols, probs, B, t):
    q = scipy.sparse.coo_matrix((probs, (rows, cols)), shape=(t, t)).tocsr()
    op = scipy.sparse.linalg.LinearOperator((t, t), matvec=lambda x: x - q @ x)
    X = np.empty_like(B)
    for j in range(B.shape[1]):
        x, info = scipy.sparse.linalg.lgmres(op, B[:, j], rtol=1e-13, atol=0.0, maxiter=5000)
        if info != 0:
            raise NoConvergence(f"lgmres stopped with info={info}")
        X[:, j] = x
    return (lambda Y: np.column_stack([op.matvec(Y[:, j]) for j in range(Y.shape[1])])), X


_SOLVERS = {"dense": _solve_dense, "sparse": _solve_sparse, "iterative": _solve_matfree}


def _method_chain(method: str, n: int, dense_cap: int) -> list[str]:
    """Krylov is far faster than factorizing past the dense range, but it can
    stagnate on stiff metastable chains; sparse LU is the fallback while its
    fill-in stays affordable."""
    if method != "auto":
        return [method]
    if n <= min(dense_cap, _DENSE_AUTO):
        return ["dense"]
    if n <= _SPARSE_DIRECT_MAX:
        return ["iterative", "sparse"]
    return ["iterative"]


def fixation_table(
    g: FitnessGraph,
    kernel: str = "base",
    with_times: bool = False,
    dense_cap: int = DENSE_CAP_DEFAULT,
    cap: int = CAP_DEFAULT,
    method: str = "auto",
) -> ExactResult:
    """Solve the absorbing chain and tabulate all 2^n fixation probabilities.

    ``method`` is ``auto`` (dense direct up to n=12, then matrix-free
    iterative with a sparse-LU fallback through n=16, iterative alone
    beyond) or an explicit ``dense``/``sparse``/``iterative``.  Results
    are cached per graph and kernel.
    """
    if g.n > cap:
        raise TooLarge(f"n={g.n} exceeds the exact-solver cap {cap}")
    if method == "dense" and g.n > dense_cap:
        raise TooLarge(f"n={g.n} exceeds the dense cap {dense_cap}")

    per_graph = _table_cache.setdefault(g, {})
    cached = per_graph.get(kernel)
    if cached is not None and (not with_times or cached.expected_steps is not None):
        return cached

    n = g.n
    full = full_mask(n)
    fp = np.zeros(full + 1)
    fp[full] = 1.0
    times = np.zeros(full + 1) if with_times else None

    if n > 1:
        rows, cols, probs, b = _transition_entries(g, kernel)
        t = full - 1
        B = np.column_stack([b, np.ones(t)]) if with_times else b.reshape(t, 1)
        chain = _method_chain(method, n, dense_cap)
        apply_a = X = None
        for i, m in enumerate(chain):
            try:
                apply_a, X = _SOLVERS[m](rows, cols, probs, B, t)
                break
            except NoConvergence:
                if i == len(chain) - 1:
                    raise

        resid = np.abs(B - apply_a(X))
        # expected-time columns grow with the chain's stiffness, so the
        # residual criterion is relative to each solution column
        scale = np.maximum(1.0, np.abs(X).max(axis=0))
        if not np.all(np.isfinite(X)) or np.any(resid.max(axis=0) > 1e-9 * scale):
            raise SingularSystem(
                f"absorbing-chain solve failed (residual {resid.max():.3e}); "
                "is the graph strongly connected?")

        fp[1:full] = np.clip(X[:, 0], 0.0, 1.0)
        if with_times:
            times[1:full] = X[:, 1]

    result = ExactResult(fp=fp, expected_steps=times)
    per_graph[kernel] = result
    return result


def exact_fixation(g: FitnessGraph, seed_mask: int, kernel: str = "base", **kw) -> float:
    """Fixation probability from one seed configuration (solves and caches the full table)."""
    return float(fixation_table(g, kernel=kernel, **kw).fp[seed_mask])


def expected_absorption_time(g: FitnessGraph, seed_mask: int, kernel: str = "base", **kw) -> float:
    """Expected number of steps until absorption from the seed configuration."""
    table = fixation_table(g, kernel=kernel, with_times=True, **kw)
    return float(table.expected_steps[seed_mask])


def neutral_closed_form(g: FitnessGraph, seed) -> float:
    """Degree-weighted closed form: fp(S) = (sum_{u in S} 1/d(u)) / (sum_v 1/d(v)).

    Additive over disjoint seeds because the neutral fixation probability is
    linear.  Requires an undirected graph whose fitness is type-independent
    AND constant across nodes: with node-heterogeneous (if type-independent)
    fitness the harmonic weights become f(u)/d(u) and this quotient is wrong,
    so that case is rejected rather than silently mis-evaluated.
    """
    if g.directed:
        raise NotUndirected("closed form requires an undirected graph")
    if not is_neutral(g):
        raise NotNeutral("closed form requires m(u) == r(u) everywhere")
    if not np.all(g.m == g.m[0]):
        raise NotNeutral("closed form requires one constant fitness value across nodes")
    mask = seed if isinstance(seed, int) else mask_from_nodes(seed)
    if g.n == 1:
        return 1.0 if mask else 0.0
    inv_deg = 1.0 / out_degrees(g)
    chosen = np.array([(mask >> u) & 1 for u in range(g.n)], dtype=bool)
    return float(inv_deg[chosen].sum() / inv_deg.sum())


def exhaustive_opt(g: FitnessGraph, k: int, table: ExactResult | None = None, **kw) -> tuple[int, float]:
    """Best seed set of size <= k by exact fixation probability.

    Ties break toward the smallest integer bitmask.  Returns
    ``(best_mask, fp)``; with ``k == 0`` that is ``(0, 0.0)``.
    """
    if k < 0 or k > g.n:
        raise ValueError(f"budget k={k} outside [0, {g.n}]")
    if table is None:
        table = fixation_table(g, **kw)
    best_mask, best_fp = 0, 0.0
    for size in range(1, k + 1):
        for nodes in combinations(range(g.n), size):
            mask = mask_from_nodes(nodes)
            v = float(table.fp[mask])
            if v > best_fp or (v == best_fp and mask < best_mask):
                best_mask, best_fp = mask, v
    return best_mask, best_fp
