"""Small dense linear algebra, exact over mpq arrays and SVD-based over floats."""

from __future__ import annotations

import numpy as np

from . import arith
from .arith import mpq


def _rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of an exact matrix; returns (R, pivot columns)."""
    a = m.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if a[i, c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] / a[r, c]
        for i in range(rows):
            if i != r and a[i, c] != 0:
                a[i] = a[i] - a[i, c] * a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def det(m: np.ndarray):
    n = m.shape[0]
    if not arith.is_exact(m):
        return float(np.linalg.det(m))
    a = m.copy()
    d = mpq(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i, c] != 0), None)
        if piv is None:
            return mpq(0)
        if piv != c:
            a[[c, piv]] = a[[piv, c]]
            d = -d
        d *= a[c, c]
        for i in range(c + 1, n):
            if a[i, c] != 0:
                a[i] = a[i] - (a[i, c] / a[c, c]) * a[c]
    return d


def inv(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    if not arith.is_exact(m):
        return np.linalg.inv(m)
    aug = np.concatenate([m, arith.identity(n, like=m)], axis=1)
    r, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("singular matrix")
    return r[:, n:].copy()


def rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    if arith.is_exact(m):
        return len(_rref(m)[1])
    s = np.linalg.svd(m, compute_uv=False)
    return int((s > arith.tolerance() * max(1.0, s[0])).sum()) if s.size else 0


def nullspace(m: np.ndarray) -> list[np.ndarray]:
    """Basis of {v : m v = 0}.

    Exact mode: one vector per free column, normalized so the first nonzero
    entry is positive.  Float mode: right singular vectors below the threshold
    tau * (largest singular value).
    """
    rows, cols = m.shape
    if arith.is_exact(m):
        r, pivots = _rref(m)
        free = [c for c in range(cols) if c not in pivots]
        basis = []
        for f in free:
            v = arith.zeros(cols, like=m)
            v[f] = mpq(1)
            for i, p in enumerate(pivots):
                v[p] = -r[i, f]
            lead = next(x for x in v if x != 0)
            basis.append(v if lead > 0 else -v)
        return basis
    if rows == 0:
        return [row for row in np.eye(cols)]
    _, s, vt = np.linalg.svd(m)
    top = s[0] if s.size else 0.0
    k = int((s > arith.tolerance() * max(1.0, top)).sum())
    return [vt[i].copy() for i in range(k, cols)]


def row_basis(vectors: list[np.ndarray], dim: int, like: np.ndarray | None = None) -> list[np.ndarray]:
    """A basis (as rows) of the span of ``vectors``."""
    if not vectors:
        return []
    m = np.array(vectors, dtype=vectors[0].dtype).reshape(len(vectors), dim)
    if arith.is_exact(m):
        r, pivots = _rref(m)
        return [r[i].copy() for i in range(len(pivots))]
    _, s, vt = np.linalg.svd(m, full_matrices=False)
    top = s[0] if s.size else 0.0
    k = int((s > arith.tolerance() * max(1.0, top)).sum())
    return [vt[i].copy() for i in range(k)]


def in_span(basis: list[np.ndarray], v: np.ndarray) -> bool:
    if not basis:
        return arith.is_zero(v)
    m = np.array(basis + [v], dtype=v.dtype)
    return rank(m) == rank(np.array(basis, dtype=v.dtype))


def solve_least_squares(a: np.ndarray, b: np.ndarray):
    """Least-squares solution of a x = b; exact via normal equations."""
    if arith.is_exact(a):
        at = a.T
        return inv(at.dot(a)).dot(at.dot(b))
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    return x
