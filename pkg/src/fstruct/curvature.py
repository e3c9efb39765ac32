"""Curvature, Ricci and scalar curvature, the S-tensor, sigma_T and the torsion kernel.

Conventions: ``R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X, Y] Z`` with
``R[i, j, k, l]`` the coefficient of ``e_l`` in ``R(e_i, e_j) e_k``, and
``Ric(U, V) = sum_{p, q} g^{pq} g(R(e_p, U) V, e_q)`` (for an orthonormal frame
``sum_p g(R(e_p, U) V, e_p)``).  ``Scal`` is the metric trace of ``Ric``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import arith, linalg
from .algebra import KForm, form_norm_sq, interior_product, wedge, ce_d
from .connection import (Connection, TorsionData, characteristic_connection, characteristic_torsion,
                         derivative, levi_civita)
from .errors import InternalConsistencyError, NotSManifold
from .fstructure import MetricFManifold, classify
from .report import PropertyReport


@dataclass(frozen=True)
class CurvatureTensor:
    R: np.ndarray

    def endomorphism(self, i: int, j: int) -> np.ndarray:
        """Matrix of ``R(e_i, e_j)`` acting on column vectors."""
        return self.R[i, j].T.copy()

    def lowered(self, G) -> np.ndarray:
        """``R(X, Y, Z, V) = g(R(X, Y) Z, V)``."""
        return np.einsum("ijkm,ml->ijkl", self.R, G.g)

    def nonzero(self) -> list[tuple[tuple[int, int, int, int], Any]]:
        return [(idx, v) for idx, v in np.ndenumerate(self.R) if not arith.is_zero(v)]


@dataclass(frozen=True)
class RicciData:
    ric: np.ndarray
    scal: Any


@dataclass(frozen=True)
class KernelData:
    basis: list[np.ndarray]
    rank: int


def curvature(M: MetricFManifold, conn: Connection) -> CurvatureTensor:
    G, c = conn.gamma, M.L.c
    R = (np.einsum("jkm,iml->ijkl", G, G) - np.einsum("ikm,jml->ijkl", G, G)
         - np.einsum("ijm,mkl->ijkl", c, G))
    return CurvatureTensor(R)


def curvature_as_f_phi(M: MetricFManifold, conn: Connection) -> Any | None:
    """Scalar ``c`` with ``R(X, Y) Z = c F(X, Y) phi Z`` identically, or None."""
    R = curvature(M, conn).R
    model = np.einsum("ij,lk->ijkl", M.F.dense(), M.phi)
    mags = abs(model)
    if arith.is_zero(arith.magnitude(model)):
        return None
    pivot = np.unravel_index(np.argmax(arith.as_float(mags)), model.shape)
    factor = R[pivot] / model[pivot]
    if not arith.is_zero(R - model * factor):
        return None
    return arith.to_plain(factor)


def ricci(M: MetricFManifold, conn: Connection) -> RicciData:
    Rl = curvature(M, conn).lowered(M.G)
    ric = np.einsum("pq,puvq->uv", M.G.ginv, Rl)
    return RicciData(ric, arith.to_plain((M.G.ginv * ric).sum()))


def s_tensor(M: MetricFManifold, T: TorsionData) -> np.ndarray:
    """``S(U, V) = sum_{p, q} g^{pq} g(T(e_p, U), T(e_q, V))``."""
    t = T.vv_form.m
    return np.einsum("pq,pua,ab,qvb->uv", M.G.ginv, t, M.G.g, t)


def _sigma_wedge(M: MetricFManifold, T: KForm) -> KForm:
    ginv = M.G.ginv
    contractions = [interior_product(M.e(p), T) for p in range(M.dim)]
    out = KForm.zero(M.dim, 4, T.exact)
    for p in range(M.dim):
        for q in range(M.dim):
            if ginv[p, q] != 0:
                out = out + wedge(contractions[p], contractions[q]) * ginv[p, q]
    return out * (arith.mpq(1, 2) if T.exact else 0.5)


def _sigma_expanded(M: MetricFManifold, T: TorsionData) -> KForm:
    t = T.vv_form.m
    pair = np.einsum("xya,ab,zwb->xyzw", t, M.G.g, t)  # g(T(X, Y), T(Z, W))
    comp = {}
    for x, y, z, w in itertools.combinations(range(M.dim), 4):
        comp[(x, y, z, w)] = pair[x, y, z, w] + pair[y, z, x, w] + pair[z, x, y, w]
    return KForm(M.dim, 4, comp, T.three_form.exact)


def sigma_four_form(M: MetricFManifold, T: TorsionData) -> KForm:
    """``sigma_T``, computed as ``(1/2) sum g^{pq} (e_p _| T) ^ (e_q _| T)`` and by the pairing formula."""
    if M.dim < 4:
        return KForm.zero(M.dim, 4, T.three_form.exact)
    a = _sigma_wedge(M, T.three_form)
    b = _sigma_expanded(M, T)
    if not a.equals(b):
        raise InternalConsistencyError("the two sigma_T formulas disagree")
    return a


def torsion_kernel(M: MetricFManifold, T: TorsionData) -> KernelData:
    """``Ker T = {U : U _| T = 0}``."""
    n = M.dim
    t = T.three_form.dense()
    mat = t.reshape(n, n * n).T.copy()
    basis = linalg.nullspace(mat)
    return KernelData(basis, len(basis))


def torsion_norm_sq(M: MetricFManifold, T: TorsionData) -> Any:
    return arith.to_plain(form_norm_sq(M.G, T.three_form))


def adapted_frame(M: MetricFManifold) -> list[np.ndarray]:
    """Orthogonal (not normalized) horizontal basis followed by ``xi_1..xi_s``."""
    out: list[np.ndarray] = []
    for v in M.horizontal_basis:
        for u in out:
            v = v - u * (M.G.inner(u, v) / M.G.inner(u, u))
        out.append(v)
    return out + list(M.xi)


def frame_matrix(M: MetricFManifold, B: np.ndarray, frame: list[np.ndarray] | None = None) -> np.ndarray:
    """Components of a bilinear form in the orthonormal frame obtained by normalizing ``frame``.

    Raises ExactModeUnsupported when a normalization factor is irrational.
    """
    frame = adapted_frame(M) if frame is None else frame
    norms = [M.G.inner(u, u) for u in frame]
    k = len(frame)
    out = arith.zeros((k, k), like=B)
    for a in range(k):
        for b in range(k):
            v = frame[a].dot(B).dot(frame[b])
            if not arith.is_zero(v):
                out[a, b] = v / arith.sqrt(norms[a] * norms[b])
    return out


def curvature_identity_suite(M: MetricFManifold, conn: Connection | None = None,
                             T: TorsionData | None = None) -> PropertyReport:
    """Identities between the curvature of an adapted skew-torsion connection and the Riemannian one."""
    rep = PropertyReport("curvature identities")
    if T is None:
        T = characteristic_torsion(M)
    if conn is None:
        conn = characteristic_connection(M)
    lc = levi_civita(M)
    Rn = curvature(M, conn).lowered(M.G)
    Rg = curvature(M, lc).lowered(M.G)
    t = T.vv_form.m
    nabla_T = derivative(conn.gamma, t, "llu")
    sigma = sigma_four_form(M, T)
    parallel = arith.is_zero(nabla_T)
    sigma_zero = sigma.is_zero()

    rep.add("R(X,Y,Z,V) = -R(Y,X,Z,V)", Rn + Rn.transpose(1, 0, 2, 3))
    rep.add("R(X,Y,Z,V) = -R(X,Y,V,Z)", Rn + Rn.transpose(0, 1, 3, 2))
    ric_n, ric_g = ricci(M, conn), ricci(M, lc)
    norm = form_norm_sq(M.G, T.three_form)
    rep.add("Scal^nabla = Scal^g - (3/2)|T|^2", ric_n.scal - ric_g.scal + norm * 3 / 2)

    reason = []
    if not parallel:
        reason.append("nabla T != 0")
    if not sigma_zero:
        reason.append("sigma_T != 0")
    pair = np.einsum("xya,ab,zwb->xyzw", t, M.G.g, t)
    if not reason:
        rep.add("R^nabla = R^g + (1/4) g(T(X,Y), T(Z,V))", Rn - Rg - pair / 4)
        rep.add("first Bianchi identity, classical form",
                Rn + Rn.transpose(1, 2, 0, 3) + Rn.transpose(2, 0, 1, 3))
        rep.add("R(X,Y,Z,V) = R(Z,V,X,Y)", Rn - Rn.transpose(2, 3, 0, 1))
    else:
        why = " and ".join(reason)
        for name in ("R^nabla = R^g + (1/4) g(T(X,Y), T(Z,V))", "first Bianchi identity, classical form",
                     "R(X,Y,Z,V) = R(Z,V,X,Y)"):
            rep.skip(name, why)
    if parallel:
        rep.add("Ric^nabla = Ric^g - S/4", ric_n.ric - ric_g.ric + s_tensor(M, T) / 4)
        rep.add("Ric^nabla symmetric", ric_n.ric - ric_n.ric.T)
        dT = ce_d(M.L, T.three_form)
        rep.add("dT = 2 sigma_T", dT.defect(sigma * 2))
    else:
        for name in ("Ric^nabla = Ric^g - S/4", "Ric^nabla symmetric", "dT = 2 sigma_T"):
            rep.skip(name, "nabla T != 0")
    return rep


def s_manifold_ricci_identity(M: MetricFManifold) -> PropertyReport:
    """``Ric^g(X, xi_i) = 2n sum_j eta_j(X)`` on an S-manifold."""
    if not classify(M).is_S:
        raise NotSManifold(f"{M.name} is not an S-manifold")
    ric = ricci(M, levi_civita(M)).ric
    eb = M.eta_bar.coefficients()
    rep = PropertyReport("S-manifold Ricci identity")
    for i, xi in enumerate(M.xi, start=1):
        rep.add(f"Ric^g(X, xi_{i}) = 2n sum eta_j(X)", ric.dot(xi) - eb * (2 * M.n))
    return rep
