"""Multilinear algebra over a fixed left-invariant frame.

Conventions
-----------
* Vectors are 1-d arrays of frame coefficients; an endomorphism ``A`` is a
  square array acting on column vectors, ``A[i, j]`` = coefficient of ``e_i``
  in ``A(e_j)``.
* ``[e_i, e_j] = sum_k c[i, j, k] e_k``.
* Wedge products carry no ``1/k!`` factor: ``(a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X)``,
  so ``e^1 ^ ... ^ e^k`` evaluates to 1 on ``(e_1, ..., e_k)``.
* The exterior derivative of a left-invariant form is the Chevalley-Eilenberg
  differential ``dw(X_0..X_k) = sum_{i<j} (-1)^(i+j) w([X_i, X_j], X_0..^i..^j..X_k)``.
"""

from __future__ import annotations

import itertools
import math
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from . import arith, linalg
from .arith import mpq
from .errors import InvalidStructure


def _perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if an index repeats."""
    s = list(seq)
    if len(set(s)) != len(s):
        return 0
    sign = 1
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


def _signed_key(seq: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    sign = _perm_sign(seq)
    return sign, tuple(sorted(seq))


# ---------------------------------------------------------------- Lie algebra

class LieAlgebra:
    """Structure constants of a left-invariant frame."""

    def __init__(self, structconst: Any, labels: Sequence[str] | None = None):
        c = structconst if isinstance(structconst, np.ndarray) and structconst.ndim == 3 else arith.array(structconst)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise InvalidStructure("structure constants must be an n x n x n array")
        if not arith.is_zero(c + c.transpose(1, 0, 2)):
            raise InvalidStructure("structure constants are not antisymmetric in the first two indices")
        self.c = c
        self.dim = c.shape[0]
        self.labels = list(labels) if labels is not None else [f"e{i + 1}" for i in range(self.dim)]
        if len(self.labels) != self.dim:
            raise InvalidStructure("label count does not match dimension")

    @classmethod
    def from_brackets(cls, dim: int, brackets: Mapping[tuple[int, int], Mapping[int, Any]],
                      labels: Sequence[str] | None = None) -> "LieAlgebra":
        """Build from ``{(i, j): {k: coefficient}}`` with ``i < j`` (the rest by antisymmetry)."""
        c = arith.zeros((dim, dim, dim))
        for (i, j), value in brackets.items():
            if i == j:
                raise InvalidStructure(f"bracket [e{i}, e{i}] must vanish")
            for k, v in value.items():
                c[i, j, k] = arith.scalar(v)
                c[j, i, k] = -arith.scalar(v)
        return cls(c, labels)

    @property
    def exact(self) -> bool:
        return arith.is_exact(self.c)

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if len(x) != self.dim or len(y) != self.dim:
            raise ValueError("vector length does not match the Lie algebra dimension")
        return np.einsum("i,j,ijk->k", x, y, self.c)

    def ad(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ``Y -> [x, Y]``."""
        return np.einsum("a,ajk->kj", x, self.c)

    def basis_vector(self, i: int) -> np.ndarray:
        v = arith.zeros(self.dim, like=self.c)
        v[i] = mpq(1) if self.exact else 1.0
        return v

    def jacobi_defect(self):
        c = self.c
        # [[e_i, e_j], e_k] = sum_m c[i,j,m] c[m,k,l]
        t = np.einsum("ijm,mkl->ijkl", c, c)
        cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return arith.magnitude(cyc)


def lie_bracket(L: LieAlgebra, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return L.bracket(x, y)


def check_jacobi(L: LieAlgebra):
    """Max-norm of the Jacobiator over all frame triples; zero iff L is a Lie algebra."""
    return L.jacobi_defect()


# ---------------------------------------------------------------- metric

class Gram:
    """A symmetric positive definite Gram matrix and its inverse."""

    def __init__(self, g: Any):
        g = g if isinstance(g, np.ndarray) and g.ndim == 2 else arith.array(g)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InvalidStructure("Gram matrix must be square")
        if not arith.is_zero(g - g.T):
            raise InvalidStructure("Gram matrix is not symmetric")
        n = g.shape[0]
        for k in range(1, n + 1):
            minor = linalg.det(g[:k, :k])
            if not (minor > (0 if arith.is_exact(g) else arith.tolerance())):
                raise InvalidStructure("Gram matrix is not positive definite")
        self.g = g
        self.ginv = linalg.inv(g)
        self.dim = n

    def inner(self, x: np.ndarray, y: np.ndarray):
        return x.dot(self.g).dot(y)

    def flat(self, x: np.ndarray) -> np.ndarray:
        return self.g.dot(x)

    def sharp(self, eta: np.ndarray) -> np.ndarray:
        return self.ginv.dot(eta)


def flat(G: Gram, x: np.ndarray) -> "KForm":
    return KForm.covector(G.flat(x))


def sharp(G: Gram, eta: "KForm | np.ndarray") -> np.ndarray:
    coeffs = eta.coefficients() if isinstance(eta, KForm) else eta
    return G.sharp(coeffs)


# ---------------------------------------------------------------- forms

class KForm:
    """An exterior k-form stored on strictly increasing index tuples."""

    __slots__ = ("dim", "degree", "exact", "_comp", "_dense")

    def __init__(self, dim: int, degree: int, components: Mapping[tuple[int, ...], Any] | None = None,
                 exact: bool | None = None):
        if degree < 0:
            raise ValueError(f"negative degree {degree}")
        self.dim = dim
        self.degree = degree
        self.exact = arith.is_exact_mode() if exact is None else exact
        comp: dict[tuple[int, ...], Any] = {}
        for key, v in (components or {}).items():
            key = tuple(int(i) for i in key)
            if len(key) != degree or any(a >= b for a, b in zip(key, key[1:])):
                raise ValueError(f"component index {key} is not strictly increasing of length {degree}")
            if key and not (0 <= key[0] and key[-1] < dim):
                raise ValueError(f"component index {key} out of range")
            if v != 0:
                comp[key] = v
        self._comp = comp
        self._dense: np.ndarray | None = None

    # constructors
    @classmethod
    def zero(cls, dim: int, degree: int, exact: bool | None = None) -> "KForm":
        return cls(dim, degree, {}, exact)

    @classmethod
    def covector(cls, coeffs: np.ndarray) -> "KForm":
        return cls(len(coeffs), 1, {(i,): v for i, v in enumerate(coeffs)}, arith.is_exact(coeffs))

    @classmethod
    def from_dense(cls, arr: np.ndarray) -> "KForm":
        """Take the increasing-index entries of ``arr`` (assumed alternating)."""
        k = arr.ndim
        n = arr.shape[0] if k else 0
        comp = {idx: arr[idx] for idx in itertools.combinations(range(n), k)}
        return cls(n, k, comp, arith.is_exact(arr))

    @classmethod
    def basis(cls, dim: int, indices: Sequence[int], exact: bool | None = None) -> "KForm":
        """``e^{i1} ^ ... ^ e^{ik}`` for the dual coframe."""
        sign, key = _signed_key(indices)
        one = mpq(1) if (arith.is_exact_mode() if exact is None else exact) else 1.0
        return cls(dim, len(key), {key: sign * one} if sign else {}, exact)

    # access
    def _zero(self):
        return mpq(0) if self.exact else 0.0

    def items(self) -> list[tuple[tuple[int, ...], Any]]:
        return sorted(self._comp.items())

    def component(self, *idx: int):
        sign, key = _signed_key(idx)
        if sign == 0:
            return self._zero()
        v = self._comp.get(key)
        return self._zero() if v is None else sign * v

    def coefficients(self) -> np.ndarray:
        if self.degree != 1:
            raise ValueError("coefficients() only applies to 1-forms")
        out = arith.zeros(self.dim, like=np.empty(0, dtype=object if self.exact else float))
        for (i,), v in self._comp.items():
            out[i] = v
        return out

    def dense(self) -> np.ndarray:
        """Full alternating coefficient array (cached)."""
        if self._dense is None:
            like = np.empty(0, dtype=object if self.exact else float)
            arr = arith.zeros((self.dim,) * self.degree, like=like) if self.degree else arith.zeros((), like=like)
            perms = [(p, _perm_sign(p)) for p in itertools.permutations(range(self.degree))]
            for key, v in self._comp.items():
                for p, sgn in perms:
                    arr[tuple(key[i] for i in p)] = sgn * v
            self._dense = arr
        return self._dense

    def __call__(self, *vectors: np.ndarray):
        if len(vectors) != self.degree:
            raise ValueError(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        total = self._zero()
        for key, v in self._comp.items():
            block = np.array([[vec[i] for i in key] for vec in vectors], dtype=object if self.exact else float)
            total += v * linalg.det(block) if self.degree else v
        return total

    # algebra
    def _combine(self, other: "KForm", sign: int) -> "KForm":
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise ValueError("forms of different shape")
        comp = dict(self._comp)
        for k, v in other._comp.items():
            comp[k] = comp.get(k, self._zero()) + sign * v
        return KForm(self.dim, self.degree, comp, self.exact and other.exact)

    def __add__(self, other: "KForm") -> "KForm":
        return self._combine(other, 1)

    def __sub__(self, other: "KForm") -> "KForm":
        return self._combine(other, -1)

    def __neg__(self) -> "KForm":
        return KForm(self.dim, self.degree, {k: -v for k, v in self._comp.items()}, self.exact)

    def __mul__(self, s: Any) -> "KForm":
        return KForm(self.dim, self.degree, {k: s * v for k, v in self._comp.items()},
                     self.exact and arith.is_exact(s))

    __rmul__ = __mul__

    def __xor__(self, other: "KForm") -> "KForm":
        return wedge(self, other)

    def defect(self, other: "KForm"):
        """Max-norm of the componentwise difference."""
        diff = self - other
        vals = [abs(v) for v in diff._comp.values()]
        return max(vals) if vals else self._zero()

    def equals(self, other: "KForm", tol: float | None = None) -> bool:
        return arith.is_zero(self.defect(other), tol)

    def is_zero(self, tol: float | None = None) -> bool:
        vals = [abs(v) for v in self._comp.values()]
        return arith.is_zero(max(vals) if vals else self._zero(), tol)

    def max_abs(self):
        vals = [abs(v) for v in self._comp.values()]
        return max(vals) if vals else self._zero()

    def __repr__(self) -> str:
        terms = ", ".join(f"{k}: {arith.fmt(v)}" for k, v in self.items())
        return f"KForm(deg={self.degree}, {{{terms}}})"


def wedge(a: KForm, b: KForm) -> KForm:
    """Alternating product in the determinant convention (no 1/k! factor)."""
    if a.dim != b.dim:
        raise ValueError("forms on different spaces")
    if a.degree + b.degree > a.dim:
        raise ValueError("degree overflow in wedge product")
    comp: dict[tuple[int, ...], Any] = {}
    for ka, va in a._comp.items():
        for kb, vb in b._comp.items():
            sign, key = _signed_key(ka + kb)
            if sign:
                comp[key] = comp.get(key, a._zero()) + sign * va * vb
    return KForm(a.dim, a.degree + b.degree, comp, a.exact and b.exact)


def wedge_all(forms: Iterable[KForm]) -> KForm:
    forms = list(forms)
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def interior_product(x: np.ndarray, w: KForm) -> KForm:
    """``(x _| w)(Y_1, ...) = w(x, Y_1, ...)``."""
    if w.degree < 1:
        raise ValueError("interior product of a 0-form")
    comp: dict[tuple[int, ...], Any] = {}
    for key, v in w._comp.items():
        for pos, m in enumerate(key):
            if x[m] == 0:
                continue
            rest = key[:pos] + key[pos + 1:]
            # moving index m to the front costs (-1)^pos
            term = (-1) ** pos * x[m] * v
            comp[rest] = comp.get(rest, w._zero()) + term
    return KForm(w.dim, w.degree - 1, comp, w.exact and arith.is_exact(x))


def ce_d(L: LieAlgebra, w: KForm) -> KForm:
    """Exterior derivative of a left-invariant form."""
    k = w.degree
    n = L.dim
    if w.dim != n:
        raise ValueError("form and Lie algebra dimensions differ")
    if k + 1 > n:
        return KForm.zero(n, k + 1, w.exact)
    c = L.c
    zero = w._zero()
    comp: dict[tuple[int, ...], Any] = {}
    if not w._comp:
        return KForm.zero(n, k + 1, w.exact)
    for J in itertools.combinations(range(n), k + 1):
        total = zero
        for a in range(k + 1):
            for b in range(a + 1, k + 1):
                rest = J[:a] + J[a + 1:b] + J[b + 1:]
                sgn = -1 if (a + b) % 2 else 1
                ca = c[J[a], J[b]]
                for m in range(n):
                    if ca[m] == 0:
                        continue
                    val = w.component(m, *rest)
                    if val != 0:
                        total += sgn * ca[m] * val
        if total != 0:
            comp[J] = total
    return KForm(n, k + 1, comp, w.exact and L.exact)


def form_norm_sq(G: Gram, T: KForm):
    """``|T|^2 = (1/k!) sum T_{a..} T_{b..} g^{ab} ...``; for 3-forms the factor is 1/6."""
    if T.degree == 0:
        raise ValueError("norm of a 0-form")
    t = T.dense()
    up = t
    for axis in range(T.degree):
        up = np.moveaxis(np.tensordot(G.ginv, up, axes=([1], [axis])), 0, axis)
    total = (t * up).sum()
    return total / math.factorial(T.degree)


# ---------------------------------------------------------------- vector-valued 2-forms

class VectorValuedTwoForm:
    """``M(e_i, e_j) = sum_k M[i, j, k] e_k``, antisymmetric in (i, j)."""

    __slots__ = ("m",)

    def __init__(self, m: np.ndarray):
        if m.ndim != 3:
            raise ValueError("vector-valued 2-form needs a 3-index array")
        self.m = m

    @property
    def dim(self) -> int:
        return self.m.shape[0]

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.m)

    def lower(self, G: Gram) -> np.ndarray:
        """``M(X, Y, Z) = g(M(X, Y), Z)`` as a 3-index array."""
        return np.einsum("ijm,mk->ijk", self.m, G.g)

    @classmethod
    def raise_form(cls, T: KForm, G: Gram) -> "VectorValuedTwoForm":
        return cls(np.einsum("ijm,mk->ijk", T.dense(), G.ginv))

    def antisymmetry_defect(self):
        return arith.magnitude(self.m + self.m.transpose(1, 0, 2))

    def is_zero(self) -> bool:
        return arith.is_zero(self.m)
