"""
Deterministic eigen/singular solvers and k-means.

The eigensolver is a block Lanczos iteration with full reorthogonalization
and Rayleigh-Ritz extraction. Blocks rather than single vectors are used so
that repeated eigenvalues among the wanted ones are found: a single Krylov
sequence only ever sees one direction per eigenspace. Singular triplets come
from the same solver applied to ``[[0, A], [A^T, 0]]``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, aslinearoperator

__all__ = [
    "ConvergenceError",
    "SpectrumResult",
    "KMeansResult",
    "top_k_eigs_symmetric",
    "top_k_svd",
    "kmeans",
    "spectrum_for_scree",
    "fix_sign",
]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10


class ConvergenceError(RuntimeError):
    """The iteration hit its limit before every residual met the tolerance."""

    def __init__(self, message: str, best_residual: float):
        super().__init__(f"{message} (best relative residual {best_residual:.3e})")
        self.best_residual = best_residual


@dataclass(frozen=True)
class SpectrumResult:
    """
    Leading eigenpairs or singular triplets.

    ``left_vectors`` and ``right_vectors`` hold unit vectors as columns. For
    symmetric eigenproblems they are the same array.
    """

    values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    residuals: np.ndarray
    iterations: int

    @property
    def k(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    n_iter: int
    restart: int
    history: tuple = field(default=(), repr=False)

    @property
    def n_clusters(self) -> int:
        return len(self.centers)


def _as_operator(A) -> LinearOperator:
    if isinstance(A, LinearOperator):
        return A
    if sp.issparse(A):
        return aslinearoperator(A.astype(np.float64))
    return aslinearoperator(np.asarray(A, dtype=np.float64))


def _sign_of(v: np.ndarray) -> float:
    a = np.abs(v)
    top = a.max()
    if top == 0:
        return 1.0
    i = int(np.flatnonzero(a >= top * (1 - 1e-9))[0])
    return -1.0 if v[i] < 0 else 1.0


def fix_sign(v: np.ndarray) -> np.ndarray:
    """
    Flip ``v`` so its largest-magnitude entry is positive.

    Near-ties (within 1e-9 relative) go to the lowest index so that vectors
    with several equal-magnitude entries get a reproducible sign.
    """
    return v * _sign_of(v)


def _start_block(n: int, b: int, rng: np.random.Generator) -> np.ndarray:
    block = rng.standard_normal((n, b))
    ones = np.ones(n) / np.sqrt(n)
    block[:, 0] = ones + 0.1 * block[:, 0] / np.sqrt(n)
    return block


def _orthonormalize_against(W, Q, m, rng, scale):
    """
    Orthonormalize the columns of W against Q[:, :m] and each other.

    Columns that collapse (the Krylov space hit an invariant subspace) are
    replaced by fresh random directions so the basis keeps growing.
    """
    n = W.shape[0]
    out = []
    basis = Q[:, :m]
    for j in range(W.shape[1]):
        w = W[:, j].copy()
        ref = max(np.linalg.norm(w), scale)
        for attempt in range(3):
            for _ in range(2):
                w -= basis @ (basis.T @ w)
                for u in out:
                    w -= u * (u @ w)
            nrm = np.linalg.norm(w)
            if nrm > 1e-10 * ref:
                out.append(w / nrm)
                break
            if m + len(out) >= n:
                break
            w = rng.standard_normal(n)
            ref = np.linalg.norm(w)
        if m + len(out) >= n:
            break
    if not out:
        return np.empty((n, 0))
    return np.column_stack(out)


def _select(theta: np.ndarray, k: int, which: str) -> np.ndarray:
    if which == "LM":
        # |theta| descending; +/- pairs equal to rounding put the positive first
        order = np.lexsort((-theta, -np.abs(theta)))
        a = np.abs(theta[order])
        eps = 1e-9 * max(a[0], 1e-300) if len(a) else 0.0
        i = 0
        while i < len(order):
            j = i + 1
            while j < len(order) and a[i] - a[j] <= eps:
                j += 1
            if j - i > 1:
                run = order[i:j]
                order[i:j] = run[np.argsort(-theta[run], kind="stable")]
            i = j
    elif which == "LA":
        order = np.argsort(-theta, kind="stable")
    else:
        raise ValueError(f"unknown selection {which!r}")
    return order[:k]


def _block_lanczos(op: LinearOperator, k: int, which: str, tol: float,
                   max_iter: int, seed: int):
    n = op.shape[0]
    rng = np.random.default_rng(seed)
    b = min(max(k, 1), n)
    cap = n if n <= 4 * b + 64 else 4 * b + 64
    Q = np.zeros((n, cap))
    AQ = np.zeros((n, cap))
    T = np.zeros((cap, cap))

    def grow(cols_needed):
        nonlocal Q, AQ, T
        if cols_needed <= Q.shape[1]:
            return
        new = min(n, max(cols_needed, 2 * Q.shape[1]))
        extra = new - Q.shape[1]
        Q = np.hstack([Q, np.zeros((n, extra))])
        AQ = np.hstack([AQ, np.zeros((n, extra))])
        T = np.pad(T, ((0, extra), (0, extra)))

    block = _orthonormalize_against(_start_block(n, b, rng), Q, 0, rng, 1.0)
    m = 0
    best = np.inf
    it = 0
    while True:
        it += 1
        nb = block.shape[1]
        grow(m + nb)
        Q[:, m:m + nb] = block
        AQ[:, m:m + nb] = np.asarray(op.matmat(block)).reshape(n, nb)
        last = slice(m, m + nb)
        m += nb

        # projected matrix: only the new columns need computing
        cross = Q[:, :m].T @ AQ[:, last]
        T[:m, last] = cross
        T[last, :m] = cross.T
        Tm = T[:m, :m]
        theta, Y = np.linalg.eigh(0.5 * (Tm + Tm.T))
        sel = _select(theta, k, which)
        vals = theta[sel]
        X = Q[:, :m] @ Y[:, sel]
        AX = AQ[:, :m] @ Y[:, sel]
        normest = float(np.abs(theta).max())
        res = np.linalg.norm(AX - X * vals, axis=0)
        rel = res / normest if normest > 0 else res
        worst = float(rel.max()) if len(rel) else 0.0
        best = min(best, worst)
        if m >= n or np.all(res <= tol * normest) or normest == 0 and worst == 0:
            return vals, X, res, it
        if it >= max_iter:
            raise ConvergenceError(f"no convergence after {it} block steps", best)
        block = _orthonormalize_against(AQ[:, last], Q, m, rng, normest)
        if block.shape[1] == 0:
            return vals, X, res, it


def _finish_vectors(X: np.ndarray) -> np.ndarray:
    X = X / np.linalg.norm(X, axis=0)
    for j in range(X.shape[1]):
        X[:, j] = fix_sign(X[:, j])
    return X


def _check_symmetric(op: LinearOperator, seed: int):
    n = op.shape[0]
    rng = np.random.default_rng(seed + 1)
    x, y = rng.standard_normal(n), rng.standard_normal(n)
    ax, ay = op.matvec(x), op.matvec(y)
    lhs, rhs = float(y @ ax), float(x @ ay)
    scale = np.linalg.norm(ax) * np.linalg.norm(y) + np.linalg.norm(ay) * np.linalg.norm(x)
    if abs(lhs - rhs) > 1e-8 * max(scale, 1e-300):
        raise ValueError("operator failed the symmetry probe")


def top_k_eigs_symmetric(A, k: int, tol: float = DEFAULT_TOL, max_iter: int | None = None,
                         seed: int = 0, which: str = "LM") -> SpectrumResult:
    """
    Leading eigenpairs of a symmetric matrix or operator.

    Parameters
    ----------
    A : array, sparse matrix or LinearOperator
        Symmetric ``n x n`` operator.
    k : int
        Number of eigenpairs, ``1 <= k <= n``.
    tol : float
        Relative residual target: ``||A v - lam v|| <= tol * ||A||``.
    max_iter : int, optional
        Limit on block steps; defaults to ``10 * n``.
    which : {"LM", "LA"}
        Largest magnitude (default) or largest algebraic.

    Returns
    -------
    SpectrumResult
        Values ordered by the selection rule; each vector's largest-magnitude
        entry is positive.
    """
    op = _as_operator(A)
    n, n2 = op.shape
    if n != n2:
        raise ValueError(f"operator must be square, got {op.shape}")
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= n={n}, got {k}")
    _check_symmetric(op, seed)
    vals, X, res, it = _block_lanczos(op, k, which, tol, max_iter or 10 * n, seed)
    X = _finish_vectors(X)
    return SpectrumResult(values=vals, left_vectors=X, right_vectors=X,
                          residuals=res, iterations=it)


def _complete_basis(V: np.ndarray, j: int, rng) -> np.ndarray:
    # unit vector orthogonal to the first j columns of V
    for _ in range(10):
        w = rng.standard_normal(V.shape[0])
        for _ in range(2):
            w -= V[:, :j] @ (V[:, :j].T @ w)
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            return w / nrm
    raise ConvergenceError("could not complete a null-space basis", np.inf)


def top_k_svd(A, k: int, tol: float = DEFAULT_TOL, max_iter: int | None = None,
              seed: int = 0) -> SpectrumResult:
    """
    Leading singular triplets ``A v_j = s_j u_j``.

    Runs the symmetric solver on the augmented matrix ``[[0, A], [A^T, 0]]``
    whose top eigenpairs are ``(s_j, (u_j, v_j)/sqrt(2))``. Signs are fixed on
    the left vectors; right vectors follow.
    """
    op = _as_operator(A)
    r, c = op.shape
    if not 1 <= k <= min(r, c):
        raise ValueError(f"k must satisfy 1 <= k <= min(shape)={min(r, c)}, got {k}")

    def mv(x):
        x = np.asarray(x).reshape(r + c, -1)
        top = op.matmat(x[r:])
        bot = op.rmatmat(x[:r])
        return np.vstack([top, bot])

    aug = LinearOperator((r + c, r + c), matvec=mv, matmat=mv, rmatvec=mv, rmatmat=mv,
                         dtype=np.float64)
    vals, X, res, it = _block_lanczos(aug, k, "LA", tol, max_iter or 10 * (r + c), seed)
    sig = np.clip(vals, 0.0, None)
    normest = sig[0] if len(sig) else 0.0
    U = np.zeros((r, k))
    V = np.zeros((c, k))
    rng = np.random.default_rng(seed + 2)
    for j in range(k):
        u, v = X[:r, j], X[r:, j]
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if sig[j] > 1e-12 * max(normest, 1e-300) and nu > 1e-8 and nv > 1e-8:
            U[:, j], V[:, j] = u / nu, v / nv
        else:
            # zero singular value: every earlier column already spans range(A)
            sig[j] = 0.0
            U[:, j] = _complete_basis(U, j, rng)
            V[:, j] = _complete_basis(V, j, rng)
        s = _sign_of(U[:, j])
        U[:, j] *= s
        V[:, j] *= s
    AV = np.asarray(op.matmat(V)).reshape(r, k)
    residuals = np.linalg.norm(AV - U * sig, axis=0)
    return SpectrumResult(values=sig, left_vectors=U, right_vectors=V,
                          residuals=residuals, iterations=it)


def spectrum_for_scree(A, k: int, symmetric: bool = True, tol: float = DEFAULT_TOL,
                       seed: int = 0) -> list[float]:
    """Top-k eigenvalues (by magnitude) or singular values as plain floats."""
    if symmetric:
        res = top_k_eigs_symmetric(A, k, tol=tol, seed=seed)
    else:
        res = top_k_svd(A, k, tol=tol, seed=seed)
    return [float(v) for v in res.values]


# -- k-means -----------------------------------------------------------------

def _sqdist(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - C[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _plusplus(X: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    centers = [X[rng.integers(n)]]
    d2 = _sqdist(X, centers[0][None, :])[:, 0]
    for _ in range(1, K):
        total = d2.sum()
        if total > 0:
            i = int(rng.choice(n, p=d2 / total))
        else:
            i = int(rng.integers(n))
        centers.append(X[i])
        d2 = np.minimum(d2, _sqdist(X, X[i][None, :])[:, 0])
    return np.array(centers, dtype=np.float64)


def _lloyd(X: np.ndarray, C: np.ndarray, max_iter: int = 300):
    K = len(C)
    labels = None
    history = []
    for it in range(1, max_iter + 1):
        d2 = _sqdist(X, C)
        new = np.argmin(d2, axis=1)
        counts = np.bincount(new, minlength=K)
        # repair empty clusters with the point farthest from its own center
        for c in np.flatnonzero(counts == 0):
            own = d2[np.arange(len(X)), new]
            donors = counts[new] > 1
            own = np.where(donors, own, -1.0)
            far = int(np.argmax(own))
            if own[far] <= 0:
                continue
            counts[new[far]] -= 1
            new[far] = c
            counts[c] = 1
            C[c] = X[far]
            d2[:, c] = _sqdist(X, X[far][None, :])[:, 0]
        history.append(float(d2[np.arange(len(X)), new].sum()))
        for c in range(K):
            if counts[c]:
                C[c] = X[new == c].mean(axis=0)
        if labels is not None and np.array_equal(new, labels):
            labels = new
            break
        labels = new
    inertia = float(_sqdist(X, C)[np.arange(len(X)), labels].sum())
    history.append(inertia)
    return labels, C, inertia, it, history


def kmeans(points, K: int, restarts: int = 100, seed: int = 0,
           max_iter: int = 300) -> KMeansResult:
    """
    Lloyd's k-means with k-means++ seeding, best of ``restarts`` runs.

    Restart ``r`` draws from a generator seeded with ``(seed, r)``, so runs
    are reproducible and independent of each other. The lowest inertia wins,
    ties to the earliest restart. Clusters left empty (only possible with
    duplicate points) are dropped and labels compacted.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = len(X)
    if not np.all(np.isfinite(X)):
        raise ValueError("kmeans input contains non-finite values")
    if not 1 <= K <= n:
        raise ValueError(f"K must satisfy 1 <= K <= n={n}, got {K}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        C0 = _plusplus(X, K, rng)
        labels, C, inertia, it, hist = _lloyd(X, C0, max_iter)
        if best is None or inertia < best[2]:
            best = (labels, C, inertia, it, r, hist)
    labels, C, inertia, it, r, hist = best
    used = np.unique(labels)
    if len(used) < K:
        remap = np.full(K, -1)
        remap[used] = np.arange(len(used))
        labels, C = remap[labels], C[used]
    return KMeansResult(labels=labels.astype(np.int64), centers=C, inertia=inertia,
                        n_iter=it, restart=r, history=tuple(hist))
