"""Metric f-structures on Lie algebras: validation, Nijenhuis tensors, classification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from . import arith, linalg
from .algebra import Gram, KForm, LieAlgebra, VectorValuedTwoForm, ce_d, wedge
from .errors import InternalConsistencyError, InvalidStructure


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class MetricFManifold:
    """A left-invariant metric f-structure ``(phi, xi_i, eta_i, g)``.

    ``phi`` acts on column vectors; ``xi`` is a list of ``s`` frame vectors.
    ``eta`` defaults to ``g``-duals of ``xi`` and may be given explicitly to
    model inconsistent data (validation then reports the mismatch).
    """

    def __init__(self, L: LieAlgebra, G: Gram | Any, phi: Any, xi: Sequence[Any],
                 eta: Sequence[Any] | None = None, name: str = "structure"):
        self.L = L
        self.G = G if isinstance(G, Gram) else Gram(G)
        n = L.dim
        if self.G.dim != n:
            raise InvalidStructure("Gram size does not match the Lie algebra dimension")
        self.phi = _freeze(phi if isinstance(phi, np.ndarray) else arith.array(phi))
        if self.phi.shape != (n, n):
            raise InvalidStructure("phi must be an n x n matrix")
        self.xi = [_freeze(x if isinstance(x, np.ndarray) else arith.array(x)) for x in xi]
        if any(x.shape != (n,) for x in self.xi):
            raise InvalidStructure("every xi must be a vector of length n")
        if eta is None:
            eta_c = [self.G.flat(x) for x in self.xi]
        else:
            eta_c = [e if isinstance(e, np.ndarray) else arith.array(e) for e in eta]
            if len(eta_c) != len(self.xi) or any(e.shape != (n,) for e in eta_c):
                raise InvalidStructure("eta must list one covector per xi")
        self.eta_coeffs = [_freeze(e) for e in eta_c]
        self.name = name
        _freeze(L.c)

    # basic data
    @property
    def dim(self) -> int:
        return self.L.dim

    @property
    def s(self) -> int:
        return len(self.xi)

    @property
    def n(self) -> int:
        return (self.dim - self.s) // 2

    @property
    def labels(self) -> list[str]:
        return self.L.labels

    @property
    def exact(self) -> bool:
        return arith.is_exact(self.L.c) and arith.is_exact(self.G.g) and arith.is_exact(self.phi)

    def e(self, i: int) -> np.ndarray:
        return self.L.basis_vector(i)

    @cached_property
    def eta(self) -> list[KForm]:
        return [KForm.covector(e) for e in self.eta_coeffs]

    @cached_property
    def xi_bar(self) -> np.ndarray:
        out = arith.zeros(self.dim, like=self.G.g)
        for x in self.xi:
            out = out + x
        return out

    @cached_property
    def eta_bar(self) -> KForm:
        out = KForm.zero(self.dim, 1, self.exact)
        for e in self.eta:
            out = out + e
        return out

    @cached_property
    def F(self) -> KForm:
        return fundamental_form(self)

    @cached_property
    def deta(self) -> list[KForm]:
        return [ce_d(self.L, e) for e in self.eta]

    @cached_property
    def dF(self) -> KForm:
        return ce_d(self.L, self.F)

    @cached_property
    def N_phi(self) -> VectorValuedTwoForm:
        return nijenhuis_phi(self)

    @cached_property
    def N1(self) -> VectorValuedTwoForm:
        return nijenhuis_n1(self)

    @cached_property
    def N1_lowered(self) -> np.ndarray:
        return self.N1.lower(self.G)

    @cached_property
    def N2(self) -> list[KForm]:
        return n2_forms(self)

    @cached_property
    def horizontal_basis(self) -> list[np.ndarray]:
        """Basis of the distribution D = ker(eta_1, ..., eta_s)."""
        if not self.eta_coeffs:
            return [self.e(i) for i in range(self.dim)]
        return linalg.nullspace(np.array(self.eta_coeffs, dtype=self.G.g.dtype))

    def is_vertical(self, v: np.ndarray) -> bool:
        """v lies in D-perp = span(xi)."""
        return linalg.in_span(list(self.xi), v)

    def __repr__(self) -> str:
        return f"MetricFManifold({self.name!r}, dim={self.dim}, n={self.n}, s={self.s})"


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class Check:
    name: str
    defect: Any
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _check(name: str, defect: Any, note: str = "") -> Check:
    return Check(name, arith.to_plain(defect), arith.is_zero(defect), note)


def _max(values: list[Any], like_exact: bool) -> Any:
    zero = arith.mpq(0) if like_exact else 0.0
    return max([abs(v) for v in values], default=zero)


def validate_f_structure(M: MetricFManifold) -> ValidationReport:
    """Evaluate every defining identity of a metric f-structure over the frame."""
    n, s = M.dim, M.s
    phi, g = M.phi, M.G.g
    ident = arith.identity(n, like=g)
    E = np.array(M.eta_coeffs, dtype=g.dtype).reshape(s, n)
    Xi = np.array(M.xi, dtype=g.dtype).reshape(s, n)
    checks: list[Check] = []

    checks.append(_check("jacobi", M.L.jacobi_defect()))
    checks.append(_check("phi^3 + phi = 0", arith.magnitude(phi.dot(phi).dot(phi) + phi)))
    r = linalg.rank(phi)
    checks.append(Check("rank(phi) = 2n", abs(r - (n - s)), r == n - s and (n - s) % 2 == 0,
                        f"rank {r}, expected {n - s}"))
    checks.append(_check("eta_i(xi_j) = delta_ij", arith.magnitude(E.dot(Xi.T) - arith.identity(s, like=g))))
    checks.append(_check("eta_i o phi = 0", arith.magnitude(E.dot(phi))))
    proj = Xi.T.dot(E) if s else arith.zeros((n, n), like=g)
    checks.append(_check("phi^2 = -Id + sum eta_i (x) xi_i", arith.magnitude(phi.dot(phi) + ident - proj)))
    checks.append(_check("g(phi X, phi Y) = g(X, Y) - sum eta_i(X) eta_i(Y)",
                         arith.magnitude(phi.T.dot(g).dot(phi) - g + E.T.dot(E))))
    checks.append(_check("g(phi X, Y) + g(X, phi Y) = 0", arith.magnitude(phi.T.dot(g) + g.dot(phi))))
    checks.append(_check("g(xi_i, xi_j) = delta_ij", arith.magnitude(Xi.dot(g).dot(Xi.T) - arith.identity(s, like=g))))
    checks.append(_check("eta_i = g(xi_i, .)", arith.magnitude(E - Xi.dot(g))))
    Fm = M.F.dense()
    checks.append(_check("F(phi X, phi Y) = F(X, Y)", arith.magnitude(phi.T.dot(Fm).dot(phi) - Fm)))
    checks.append(_check("F(phi X, Y) + F(X, phi Y) = 0", arith.magnitude(phi.T.dot(Fm) + Fm.dot(phi))))
    checks.append(_volume_check(M))
    return ValidationReport(checks)


def _volume_check(M: MetricFManifold) -> Check:
    name = "eta_1 ^ ... ^ eta_s ^ F^n != 0"
    if M.n < 0 or (M.dim - M.s) % 2:
        return Check(name, 1, False, "dimension is not 2n + s")
    vol = KForm(M.dim, 0, {(): arith.mpq(1) if M.exact else 1.0}, M.exact)
    for e in M.eta:
        vol = wedge(vol, e)
    for _ in range(M.n):
        vol = wedge(vol, M.F)
    top = vol.component(*range(M.dim)) if vol.degree == M.dim else 0
    ok = not arith.is_zero(top)
    return Check(name, 0 if ok else 1, ok, f"top coefficient {arith.fmt(top)}")


# ---------------------------------------------------------------- tensors

def fundamental_form(M: MetricFManifold) -> KForm:
    """``F(e_i, e_j) = g(e_i, phi e_j)``."""
    return KForm.from_dense(M.G.g.dot(M.phi))


def nijenhuis_phi(M: MetricFManifold) -> VectorValuedTwoForm:
    """``N_phi(X, Y) = [phiX, phiY] + phi^2 [X, Y] - phi[X, phiY] - phi[phiX, Y]``."""
    c, phi = M.L.c, M.phi
    pp = np.einsum("ai,bj,abk->ijk", phi, phi, c)
    ppc = np.einsum("lk,ijk->ijl", phi.dot(phi), c)
    xpy = np.einsum("bj,ibk->ijk", phi, c)
    pxy = np.einsum("ai,ajk->ijk", phi, c)
    mixed = np.einsum("lk,ijk->ijl", phi, xpy + pxy)
    return VectorValuedTwoForm(pp + ppc - mixed)


def nijenhuis_n1(M: MetricFManifold) -> VectorValuedTwoForm:
    """``N^(1) = N_phi + sum_i d eta_i (x) xi_i``."""
    m = M.N_phi.m.copy()
    for d, x in zip(M.deta, M.xi):
        m = m + np.einsum("ab,k->abk", d.dense(), x)
    return VectorValuedTwoForm(m)


def n2_forms(M: MetricFManifold) -> list[KForm]:
    """``N^(2)_i(X, Y) = d eta_i(phi X, Y) + d eta_i(X, phi Y)``."""
    out = []
    for d in M.deta:
        D = d.dense()
        out.append(KForm.from_dense(M.phi.T.dot(D) + D.dot(M.phi)))
    return out


def killing_defect(M: MetricFManifold, v: np.ndarray) -> Any:
    """Max-norm of ``ad(v)^T g + g ad(v)``; zero iff v is a Killing field."""
    A = M.L.ad(v)
    return arith.magnitude(A.T.dot(M.G.g) + M.G.g.dot(A))


def is_killing(M: MetricFManifold, i: int) -> bool:
    """Whether ``xi_i`` is Killing; ``i`` counts from 1 as in the notation ``xi_1..xi_s``."""
    if not 1 <= i <= M.s:
        raise IndexError(f"xi index {i} out of range 1..{M.s}")
    return arith.is_zero(killing_defect(M, M.xi[i - 1]))


def commute_defect(M: MetricFManifold) -> Any:
    vals = [arith.magnitude(M.L.bracket(a, b)) for a, b in itertools.combinations(M.xi, 2)]
    return _max(vals, M.exact)


def skewness_defect_n1(M: MetricFManifold) -> Any:
    """Max over frame triples of ``|N1(X, Y, Z) + N1(X, Z, Y)|`` for the lowered tensor."""
    t = M.N1_lowered
    return arith.magnitude(t + t.transpose(0, 2, 1))


# ---------------------------------------------------------------- classification

_FLAGS = ("valid_metric_f", "xi_commute", "xi_all_killing", "normal", "dF_zero", "contact_metric",
          "all_deta_zero", "is_K", "is_S", "is_C", "is_almost_S", "admits_characteristic_connection")


@dataclass(frozen=True)
class ClassificationReport:
    valid_metric_f: bool
    xi_commute: bool
    xi_all_killing: bool
    normal: bool
    dF_zero: bool
    contact_metric: bool
    all_deta_zero: bool
    is_K: bool
    is_S: bool
    is_C: bool
    is_almost_S: bool
    admits_characteristic_connection: bool
    alpha: list[Any] | None
    n: int
    s: int
    defects: dict[str, Any] = field(default_factory=dict)

    @property
    def obstruction_reasons(self) -> list[str]:
        reasons = []
        if not self.xi_commute:
            reasons.append("commute")
        if not self.xi_all_killing:
            reasons.append("killing")
        if self.defects.get("n1_skewness", 0) != 0 and not arith.is_zero(self.defects["n1_skewness"]):
            reasons.append("skewness")
        return reasons

    def flags(self) -> dict[str, bool]:
        return {k: getattr(self, k) for k in _FLAGS}

    def summary(self) -> str:
        if not self.valid_metric_f:
            return "not a metric f-structure"
        if self.is_S:
            if self.s == 1:
                return "Sasakian (S-manifold, s=1)"
            return f"S-manifold, s={self.s}, n={self.n}"
        parts = ["normal" if self.normal else "not normal"]
        if self.normal:
            if self.is_C:
                parts.append("C-manifold")
            elif self.is_K:
                parts.append("K-manifold")
            else:
                parts.append("not K (dF ≠ 0)")
        elif self.is_almost_S:
            parts.append("almost S-manifold")
        if self.admits_characteristic_connection:
            parts.append("admits characteristic connection")
        else:
            parts.append("no characteristic connection (" + ", ".join(self.obstruction_reasons) + ")")
        return ", ".join(parts)


def _alpha(M: MetricFManifold) -> list[Any] | None:
    """Scalars with ``alpha_j F = d eta_j``, or None if some d eta_j is not a multiple of F."""
    f = [v for _, v in sorted(M.F._comp.items())]
    keys = sorted(M.F._comp)
    ff = sum((v * v for v in f), arith.mpq(0) if M.exact else 0.0)
    out = []
    for d in M.deta:
        if ff == 0:
            if not d.is_zero():
                return None
            out.append(arith.mpq(0) if M.exact else 0.0)
            continue
        num = sum((d.component(*k) * v for k, v in zip(keys, f)), arith.mpq(0) if M.exact else 0.0)
        a = num / ff
        if not d.equals(M.F * a):
            return None
        out.append(arith.to_plain(a))
    return out


def classify(M: MetricFManifold) -> ClassificationReport:
    """Compute each flag independently, then cross-check the implications between classes."""
    valid = validate_f_structure(M).ok
    d_commute = commute_defect(M)
    d_killing = _max([killing_defect(M, x) for x in M.xi], M.exact)
    d_normal = arith.magnitude(M.N1.m)
    d_dF = M.dF.max_abs()
    d_contact = _max([(d - 2 * M.F).max_abs() for d in M.deta], M.exact)
    d_deta = _max([d.max_abs() for d in M.deta], M.exact)
    d_skew = skewness_defect_n1(M)

    xi_commute = arith.is_zero(d_commute)
    xi_killing = arith.is_zero(d_killing)
    normal = arith.is_zero(d_normal)
    dF_zero = arith.is_zero(d_dF)
    contact = M.s >= 1 and arith.is_zero(d_contact)
    deta_zero = arith.is_zero(d_deta)
    is_K = normal and dF_zero
    is_S = normal and contact
    admits = xi_commute and xi_killing and arith.is_zero(d_skew)

    report = ClassificationReport(
        valid_metric_f=valid, xi_commute=xi_commute, xi_all_killing=xi_killing, normal=normal,
        dF_zero=dF_zero, contact_metric=contact, all_deta_zero=deta_zero, is_K=is_K, is_S=is_S,
        is_C=is_K and deta_zero, is_almost_S=contact, admits_characteristic_connection=admits,
        alpha=_alpha(M), n=M.n, s=M.s,
        defects={"commute": arith.to_plain(d_commute), "killing": arith.to_plain(d_killing),
                 "n1": arith.to_plain(d_normal), "dF": arith.to_plain(d_dF),
                 "contact": arith.to_plain(d_contact), "deta": arith.to_plain(d_deta),
                 "n1_skewness": arith.to_plain(d_skew)},
    )
    if valid:
        _cross_check(report)
    return report


def _cross_check(r: ClassificationReport) -> None:
    implications = [
        ("S => K", not r.is_S or r.is_K),
        ("almost S => dF = 0", not r.is_almost_S or r.dF_zero),
        ("normal => xi commute", not r.normal or r.xi_commute),
        ("S => xi Killing", not r.is_S or r.xi_all_killing),
        ("K => admits connection", not r.is_K or r.admits_characteristic_connection),
        ("contact => alpha = 2", not r.contact_metric or (r.alpha is not None and all(arith.eq(a, 2) for a in r.alpha))),
    ]
    broken = [name for name, ok in implications if not ok]
    if broken:
        raise InternalConsistencyError("classification flags inconsistent: " + "; ".join(broken))
