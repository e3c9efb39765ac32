"""Identity suites: exhaustive frame evaluation of the structural identities.

Every identity is evaluated on all frame tuples and recorded as a max-norm defect.
Identities with hypotheses are skipped, with the reason, when the hypotheses fail.
Array index conventions: a tensor evaluated on ``(e_x, e_y, e_z)`` is stored at
``[x, y, z]``; vector-valued tensors carry the output component last.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import arith
from .algebra import KForm, wedge, ce_d
from .connection import (Connection, TorsionData, _tw_tensor, characteristic_connection,
                         characteristic_torsion, connection_torsion, d_phi_F, derivative,
                         levi_civita, verify_adapted)
from .curvature import curvature_identity_suite, s_manifold_ricci_identity, sigma_four_form, torsion_kernel
from .errors import ObstructionError
from .fstructure import ClassificationReport, MetricFManifold, classify, killing_defect, validate_f_structure
from .report import PropertyReport


def _on(t: np.ndarray, A: np.ndarray, slot: int) -> np.ndarray:
    """Replace the argument in ``slot`` by ``A`` applied to it."""
    return np.moveaxis(np.tensordot(t, A, axes=([slot], [0])), -1, slot)


def _out(v: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Apply ``A`` to the vector output (last index)."""
    return np.tensordot(v, A, axes=([v.ndim - 1], [1]))


def _cyclic(t: np.ndarray) -> np.ndarray:
    return t + np.einsum("yzx->xyz", t) + np.einsum("zxy->xyz", t)


@dataclass
class _Data:
    """Frame arrays shared by the suites, built lazily."""

    M: MetricFManifold

    @property
    def P(self) -> np.ndarray:
        return self.M.phi

    @property
    def g(self) -> np.ndarray:
        return self.M.G.g

    @property
    def c(self) -> np.ndarray:
        return self.M.L.c

    @cached_property
    def lc(self) -> np.ndarray:
        return levi_civita(self.M).gamma

    @cached_property
    def Dphi(self) -> np.ndarray:
        """``Dphi[w, a, b]``: component a of ``(nabla^g_w phi) e_b``."""
        return derivative(self.lc, self.P, "ul")

    @cached_property
    def Dxi(self) -> list[np.ndarray]:
        return [derivative(self.lc, x, "u") for x in self.M.xi]

    @cached_property
    def Deta(self) -> list[np.ndarray]:
        return [derivative(self.lc, e, "l") for e in self.M.eta_coeffs]

    @cached_property
    def DF(self) -> np.ndarray:
        return derivative(self.lc, self.M.F.dense(), "ll")

    @cached_property
    def deta(self) -> list[np.ndarray]:
        return [d.dense() for d in self.M.deta]

    @cached_property
    def dF(self) -> np.ndarray:
        return self.M.dF.dense()

    @cached_property
    def N1(self) -> np.ndarray:
        return self.M.N1.m

    @cached_property
    def N1low(self) -> np.ndarray:
        return self.M.N1_lowered

    @cached_property
    def N2(self) -> list[np.ndarray]:
        return [f.dense() for f in self.M.N2]

    @property
    def eta(self) -> list[np.ndarray]:
        return self.M.eta_coeffs

    @property
    def xi(self) -> list[np.ndarray]:
        return self.M.xi

    def zeros(self, *shape: int) -> np.ndarray:
        return arith.zeros(shape, like=self.g)

    def lower(self, v: np.ndarray) -> np.ndarray:
        return np.tensordot(v, self.g, axes=([v.ndim - 1], [0]))

    def lie_eta(self, i: int, j: int) -> np.ndarray:
        """``(L_{xi_i} eta_j)(e_b) = -eta_j([xi_i, e_b])`` for left-invariant data."""
        return -np.einsum("a,abk,k->b", self.xi[i], self.c, self.eta[j])


def _pairs(s: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(s) for j in range(s)]


def _max_of(rep: PropertyReport, name: str, arrays: list[np.ndarray], like: np.ndarray) -> None:
    rep.add(name, max((arith.magnitude(a) for a in arrays), default=arith.magnitude(like[:0])))


# ---------------------------------------------------------------- metric f-structures

def f_structure_identities(M: MetricFManifold, cls: ClassificationReport | None = None) -> PropertyReport:
    """Identities of metric f-manifolds involving nabla^g, d eta, dF, N1 and N2."""
    cls = cls or classify(M)
    D = _Data(M)
    rep = PropertyReport("metric f-structure identities")
    s, P, g, empty = M.s, D.P, D.g, D.zeros(0)

    _max_of(rep, "(nabla^g_X eta_i)Y = g(nabla^g_X xi_i, Y)",
            [D.Deta[i] - D.Dxi[i].dot(g) for i in range(s)], empty)
    _max_of(rep, "(L_xi_i eta_j)(X) = d eta_j(xi_i, X)",
            [D.lie_eta(i, j) - D.xi[i].dot(D.deta[j]) for i, j in _pairs(s)], empty)
    _max_of(rep, "d eta_j(xi_i, X) = g(X, nabla^g_xi_i xi_j) + g(nabla^g_X xi_i, xi_j)",
            [D.xi[i].dot(D.deta[j]) - g.dot(D.xi[i].dot(D.Dxi[j])) - D.Dxi[i].dot(g).dot(D.xi[j])
             for i, j in _pairs(s)], empty)

    names = ("d eta_j = 2 nabla^g eta_j", "L_xi_i eta_j = 0", "nabla^g_xi_i xi_j = 0",
             "xi_j _| d eta_i = 0", "g(nabla^g_X xi_i, xi_j) = 0")
    if cls.xi_commute and cls.xi_all_killing:
        _max_of(rep, names[0], [D.deta[j] - 2 * D.Deta[j] for j in range(s)], empty)
        _max_of(rep, names[1], [D.lie_eta(i, j) for i, j in _pairs(s)], empty)
        _max_of(rep, names[2], [D.xi[i].dot(D.Dxi[j]) for i, j in _pairs(s)], empty)
        _max_of(rep, names[3], [D.xi[j].dot(D.deta[i]) for i, j in _pairs(s)], empty)
        _max_of(rep, names[4], [D.Dxi[i].dot(g).dot(D.xi[j]) for i, j in _pairs(s)], empty)
    else:
        for name in names:
            rep.skip(name, "xi not all Killing and commuting")

    names = ("normal: [xi_i, xi_j] = 0", "normal: L_xi_i eta_j = 0", "normal: L_xi_i phi = 0",
             "normal: N2_i = 0")
    if cls.normal:
        _max_of(rep, names[0], [M.L.bracket(D.xi[i], D.xi[j]) for i, j in _pairs(s)], empty)
        _max_of(rep, names[1], [D.lie_eta(i, j) for i, j in _pairs(s)], empty)
        ads = [M.L.ad(x) for x in D.xi]
        _max_of(rep, names[2], [A.dot(P) - P.dot(A) for A in ads], empty)
        _max_of(rep, names[3], D.N2, empty)
    else:
        for name in names:
            rep.skip(name, "N1 != 0")

    # (nabla^g_X phi) phi Y = -nabla^g_X Y + sum eta_i(Y) nabla^g_X xi_i - phi(nabla^g_X phi Y)
    lhs = np.einsum("wak,kb->wab", D.Dphi, P)
    rhs = -D.lc.transpose(0, 2, 1) - np.einsum("ak,jb,wjk->wab", P, P, D.lc)
    for e, dx in zip(D.eta, D.Dxi):
        rhs = rhs + np.einsum("b,wa->wab", e, dx)
    rep.add("(nabla^g_X phi)phi Y = -nabla^g_X Y + sum eta_i(Y) nabla^g_X xi_i - phi(nabla^g_X phi Y)", lhs - rhs)

    rep.add("(nabla^g_X F)(Y,Z) = g((nabla^g_X phi)Z, Y)", D.DF - np.einsum("wkb,ka->wab", D.Dphi, g))
    rep.add("(nabla^g_X F)(Y,Z) = -(nabla^g_X F)(Z,Y)", D.DF + D.DF.transpose(0, 2, 1))

    gx = [dx.dot(g) for dx in D.Dxi]  # gx[j][w, k] = g(nabla^g_w xi_j, e_k)
    terms = []
    for i in range(s):
        lhs = np.einsum("wad,a,db->wb", D.DF, D.xi[i], P)
        rhs = D.Deta[i]
        for j in range(s):
            rhs = rhs + np.einsum("b,w->wb", D.eta[j], gx[j].dot(D.xi[i]))
        terms.append(lhs - rhs)
    _max_of(rep, "(nabla^g_X F)(xi_i, phi Y) = (nabla^g_X eta_i)Y + sum eta_j(Y) g(nabla^g_X xi_j, xi_i)",
            terms, empty)

    lhs = D.DF + np.einsum("wcd,cy,dz->wyz", D.DF, P, P)
    rhs = D.zeros(M.dim, M.dim, M.dim)
    for e, de in zip(D.eta, D.Deta):
        dp = de.dot(P)
        rhs = rhs + np.einsum("z,wy->wyz", e, dp) - np.einsum("y,wz->wyz", e, dp)
    rep.add("(nabla^g_X F)(Y,Z) + (nabla^g_X F)(phi Y, phi Z) = sum eta_i(Z)(nabla^g_X eta_i)phi Y"
            " - eta_i(Y)(nabla^g_X eta_i)phi Z", lhs - rhs)

    bl = D.lower(D.c)
    t1 = np.einsum("ai,bj,abk->ijk", P, P, bl)
    t2 = D.lower(_out(np.einsum("ai,ajm->ijm", P, D.c), P))
    t3 = D.lower(_out(np.einsum("bj,ibm->ijm", P, D.c), P))
    rhs = t1 - t2 - t3 - bl
    for e, de in zip(D.eta, D.deta):
        rhs = rhs + np.einsum("ij,k->ijk", D.c.dot(e) + de, e)
    rep.add("N1(X,Y,Z) = g([phiX,phiY],Z) - g(phi[phiX,Y],Z) - g(phi[X,phiY],Z) - g([X,Y],Z)"
            " + sum (eta_k([X,Y]) + d eta_k(X,Y)) eta_k(Z)", D.N1low - rhs)

    A = np.einsum("wi,waj->ija", P, D.Dphi)
    C = np.einsum("iak,kj->ija", D.Dphi, P)
    rhs = A - A.transpose(1, 0, 2) + C - C.transpose(1, 0, 2)
    for e, dx in zip(D.eta, D.Dxi):
        rhs = rhs + np.einsum("i,ya->iya", e, dx) - np.einsum("y,ia->iya", e, dx)
    rep.add("N1(X,Y) = (nabla^g_phiX phi)Y - (nabla^g_phiY phi)X + (nabla^g_X phi)phiY - (nabla^g_Y phi)phiX"
            " + sum (eta_j(X) nabla^g_Y xi_j - eta_j(Y) nabla^g_X xi_j)", D.N1 - rhs)

    lhs = 2 * np.einsum("xay,az->xyz", D.Dphi, g)
    rhs = (np.einsum("xbc,by,cz->xyz", D.dF, P, P) - D.dF + np.einsum("yzk,kx->xyz", D.N1low, P))
    for e, n2, de in zip(D.eta, D.N2, D.deta):
        rhs = (rhs + np.einsum("x,yz->xyz", e, n2) + np.einsum("z,by,bx->xyz", e, P, de)
               + np.einsum("y,xb,bz->xyz", e, de, P))
    rep.add("2g((nabla^g_X phi)Y,Z) = dF(X,phiY,phiZ) - dF(X,Y,Z) + N1(Y,Z,phiX)"
            " + sum (eta_i(X) N2_i(Y,Z) + eta_i(Z) d eta_i(phiY,X) + eta_i(Y) d eta_i(X,phiZ))", lhs - rhs)

    bracket = D.zeros(M.dim, M.dim, M.dim)
    for i, j in _pairs(s):
        v = D.lower(M.L.bracket(D.xi[i], D.xi[j]))
        bracket = bracket + np.einsum("x,y,z->xyz", D.eta[i], D.eta[j], v)
    rhs = -np.einsum("ai,bj,abk->ijk", P, P, D.N1low) + bracket
    for e, x in zip(D.eta, D.xi):
        rhs = (rhs + np.einsum("x,yz->xyz", e, np.tensordot(x, D.N1low, axes=([0], [0])))
               + np.einsum("y,xz->xyz", e, np.einsum("xaz,a->xz", D.N1low, x)))
    rep.add("N1(X,Y,Z) = -N1(phiX,phiY,Z) + sum eta_i(X) N1(xi_i,Y,Z) + sum eta_i(Y) N1(X,xi_i,Z)"
            " + sum eta_i(X) eta_j(Y) g([xi_i,xi_j],Z)", D.N1low - rhs)
    if cls.xi_commute:
        rep.add("sum eta_i(X) eta_j(Y) g([xi_i,xi_j],Z) = 0 for commuting xi", bracket)
    else:
        rep.skip("sum eta_i(X) eta_j(Y) g([xi_i,xi_j],Z) = 0 for commuting xi", "xi do not commute")

    dFm = (np.einsum("xbc,by,cz->xyz", D.dF, P, P) + np.einsum("abz,ax,by->xyz", D.dF, P, P)
           + np.einsum("ayc,ax,cz->xyz", D.dF, P, P) - D.dF)
    Q = _on(D.N1low, P, 2)
    rep.add("dF^-(X,Y,Z) = -N1(X,Y,phiZ) - N1(Y,Z,phiX) - N1(Z,X,phiY)", dFm + _cyclic(Q))

    names = ("N1(X, xi_i, xi_j) = 0", "N1(phiX,Y,xi_i) = N1(X,phiY,xi_i)", "N1(X,phiY,xi_i) = N2_i(X,Y)",
             "N2_i(X,Y) = dF(X,Y,xi_i)", "dF(X,Y,xi_i) = -dF(phiX,phiY,xi_i)")
    if cls.xi_commute and cls.xi_all_killing and arith.is_zero(D.N1low + D.N1low.transpose(0, 2, 1)):
        _max_of(rep, names[0], [np.einsum("xab,a,b->x", D.N1low, D.xi[i], D.xi[j]) for i, j in _pairs(s)],
                empty)
        nx = [D.N1low.dot(x) for x in D.xi]  # N1(X, Y, xi_i)
        dfx = [D.dF.dot(x) for x in D.xi]  # dF(X, Y, xi_i)
        _max_of(rep, names[1], [P.T.dot(a) - a.dot(P) for a in nx], empty)
        _max_of(rep, names[2], [a.dot(P) - n2 for a, n2 in zip(nx, D.N2)], empty)
        _max_of(rep, names[3], [n2 - f for n2, f in zip(D.N2, dfx)], empty)
        _max_of(rep, names[4], [f + P.T.dot(f).dot(P) for f in dfx], empty)
    else:
        for name in names:
            rep.skip(name, "requires commuting Killing xi and totally skew N1")
    return rep


# ---------------------------------------------------------------- adapted skew-torsion connections

def torsion_characterization(M: MetricFManifold, conn: Connection, T: TorsionData) -> PropertyReport:
    """Identities linking the torsion of an adapted connection with d eta, dF, N1 and phi."""
    D = _Data(M)
    rep = PropertyReport("torsion characterization")
    s, P, g, empty = M.s, D.P, D.g, D.zeros(0)
    t3, tv = T.three_form.dense(), T.vv_form.m
    ad = verify_adapted(M, conn)

    rep.add("nabla = nabla^g + T/2", conn.gamma - D.lc - tv / 2)
    rep.add("torsion of nabla equals T", connection_torsion(M, conn).m - tv)
    for key, val in ad.defects().items():
        rep.add(f"adapted: {key.replace('_', ' ')} = 0", val)

    dn_xi = [derivative(conn.gamma, x, "u") for x in D.xi]
    dn_eta = [derivative(conn.gamma, e, "l") for e in D.eta]
    _max_of(rep, "(nabla_X eta_i)Y = g(nabla_X xi_i, Y)", [a - b.dot(g) for a, b in zip(dn_eta, dn_xi)], empty)
    rep.add("xi_i Killing", max((killing_defect(M, x) for x in D.xi), default=arith.magnitude(empty)))
    _max_of(rep, "d eta_i = xi_i _| T", [de - np.tensordot(x, t3, axes=([0], [0]))
                                         for de, x in zip(D.deta, D.xi)], empty)
    _max_of(rep, "d eta_i = 2 nabla^g eta_i", [de - 2 * e for de, e in zip(D.deta, D.Deta)], empty)
    _max_of(rep, "xi_i _| d eta_i = 0", [x.dot(de) for de, x in zip(D.deta, D.xi)], empty)

    t_minus = (np.einsum("xbc,by,cz->xyz", t3, P, P) + np.einsum("abz,ax,by->xyz", t3, P, P)
               + np.einsum("ayc,ax,cz->xyz", t3, P, P) - t3)
    rep.add("N1 = -T^-", D.N1low + t_minus)

    low_dphi = np.einsum("xay,az->xyz", D.Dphi, g)
    rep.add("(nabla^g_X F)(Y,Z) = -g((nabla^g_X phi)Y,Z)", D.DF + low_dphi)
    rep.add("2(nabla^g_X F)(Y,Z) = T(X,Y,phiZ) + T(X,phiY,Z)", 2 * D.DF - _on(t3, P, 2) - _on(t3, P, 1))
    rep.add("dF = cyclic sum T(X,Y,phiZ)", D.dF - _cyclic(_on(t3, P, 2)))

    lhs = np.einsum("abc,ax,by,cz->xyz", t3, P, P, P)
    rhs = D.dF - _on(D.N1low, P, 2)
    for e, n2 in zip(D.eta, D.N2):
        rhs = rhs - np.einsum("z,xy->xyz", e, n2)
    rep.add("T(phiX,phiY,phiZ) = dF(X,Y,Z) - N1(X,Y,phiZ) - sum eta_i(Z) N2_i(X,Y)", lhs - rhs)

    P2 = P.dot(P)
    lhs = np.einsum("abc,ax,by,cz->xyz", t3, P2, P2, P2)
    rhs = -t3
    for i in range(s):
        e, de = D.eta[i], D.deta[i]
        rhs = (rhs + np.einsum("x,yz->xyz", e, de) - np.einsum("y,xz->xyz", e, de)
               + np.einsum("z,xy->xyz", e, de))
    for i, j in _pairs(s):
        ei, ej = D.eta[i], D.eta[j]
        rhs = (rhs - np.einsum("x,y,z->xyz", ei, ej, D.deta[j].dot(D.xi[i]))
               - np.einsum("y,z,x->xyz", ei, ej, D.deta[j].dot(D.xi[i]))
               + np.einsum("x,z,y->xyz", ei, ej, D.deta[j].dot(D.xi[i])))
        for k in range(s):
            rhs = rhs + np.einsum("x,y,z->xyz", ei, ej, D.eta[k]) * D.xi[i].dot(D.deta[k]).dot(D.xi[j])
    rep.add("T(phi^2 X, phi^2 Y, phi^2 Z) expanded through eta_i and d eta_i", lhs - rhs)
    if classify(M).xi_commute:
        w = KForm.zero(M.dim, 3, M.exact)
        for e, de in zip(M.eta, M.deta):
            w = w + wedge(e, de)
        rep.add("T(phi^2 X, phi^2 Y, phi^2 Z) = -T + sum eta_i ^ d eta_i", lhs + t3 - w.dense())
    else:
        rep.skip("T(phi^2 X, phi^2 Y, phi^2 Z) = -T + sum eta_i ^ d eta_i", "xi do not commute")

    Dn = derivative(conn.gamma, P, "ul")
    A = np.einsum("wi,waj->ija", P, Dn)
    K = np.einsum("iaj->ija", Dn)
    rhs = (A - A.transpose(1, 0, 2) + _out(K.transpose(1, 0, 2) - K, P) + tv
           - np.einsum("ai,bj,abk->ijk", P, P, tv) + _out(_on(tv, P, 0) + _on(tv, P, 1), P))
    rep.add("N1(X,Y) = (nabla_phiX phi)Y - (nabla_phiY phi)X + phi((nabla_Y phi)X - (nabla_X phi)Y)"
            " + T(X,Y) - T(phiX,phiY) + phi(T(phiX,Y) + T(X,phiY))", D.N1 - rhs)
    return rep


def characteristic_suite(M: MetricFManifold, cls: ClassificationReport | None = None) -> PropertyReport:
    """The torsion formula against direct adaptedness, and its specializations to normal, K and S classes."""
    cls = cls or classify(M)
    rep = PropertyReport("characteristic connection")
    T = characteristic_torsion(M)
    conn = characteristic_connection(M)
    t = T.three_form
    for key, val in verify_adapted(M, conn).defects().items():
        rep.add(f"formula connection: {key.replace('_', ' ')} = 0", val)
    low = connection_torsion(M, conn).lower(M.G)
    rep.add("formula connection: torsion totally skew", low + low.transpose(0, 2, 1))
    rep.add("formula connection: torsion equals T", low - t.dense())

    eta_deta = KForm.zero(M.dim, 3, M.exact)
    for e, de in zip(M.eta, M.deta):
        eta_deta = eta_deta + wedge(e, de)
    for flag, name, expected in (
            (cls.normal, "normal: T = sum eta_i ^ d eta_i + d^phi F", lambda: eta_deta + d_phi_F(M)),
            (cls.is_K, "K-manifold: T = sum eta_i ^ d eta_i", lambda: eta_deta),
            (cls.is_S, "S-manifold: T = 2 eta_bar ^ F", lambda: wedge(M.eta_bar, M.F) * 2)):
        if flag:
            rep.add(name, t.defect(expected()))
        else:
            rep.skip(name, "class hypothesis fails")
    return rep


def s_manifold_suite(M: MetricFManifold) -> PropertyReport:
    """Torsion shape, parallel torsion, kernel law and Ricci identity on S-manifolds."""
    D = _Data(M)
    rep = PropertyReport("S-manifold identities")
    P, empty = D.P, D.zeros(0)
    T = characteristic_torsion(M)
    conn = characteristic_connection(M)
    tv, t3 = T.vv_form.m, T.three_form.dense()

    rep.add("T(X,Y) = 2 sum (F(X,Y) xi_j - eta_j(X) phiY + eta_j(Y) phiX)", tv - 2 * _tw_tensor(M, -1).m)
    hor = M.horizontal_basis
    _max_of(rep, "T(X, xi_i) = 2 phi X for horizontal X",
            [np.einsum("i,j,ijk->k", h, x, tv) - 2 * P.dot(h) for h in hor for x in D.xi], empty)
    _max_of(rep, "T(xi_i, xi_j) = 0", [np.einsum("i,j,ijk->k", a, b, tv) for a in D.xi for b in D.xi], empty)
    F = M.F.dense()
    _max_of(rep, "T(X,Y) = 2 F(X,Y) xi_bar for horizontal X, Y",
            [np.einsum("i,j,ijk->k", a, b, tv) - 2 * a.dot(F).dot(b) * M.xi_bar for a in hor for b in hor], empty)
    _max_of(rep, "T(X,Y,Z) = 0 for horizontal X, Y, Z",
            [np.einsum("i,j,k,ijk->", a, b, c, t3) for a in hor for b in hor for c in hor], empty)
    _max_of(rep, "nabla^g xi_i = -phi", [dx + P.T for dx in D.Dxi], empty)
    rep.add("nabla T = 0", derivative(conn.gamma, tv, "llu"))
    rep.add("dT = 2 sigma_T", ce_d(M.L, T.three_form).defect(sigma_four_form(M, T) * 2))

    ker = torsion_kernel(M, T)
    rep.add("rank Ker T = s - 1", arith.scalar(abs(ker.rank - (M.s - 1))))
    _max_of(rep, "Ker T lies in D-perp",
            [v - sum((e.dot(v) * x for e, x in zip(D.eta, D.xi)), D.zeros(M.dim)) for v in ker.basis], empty)
    _max_of(rep, "Ker T orthogonal to xi_bar", [M.eta_bar.coefficients().dot(v) for v in ker.basis], empty)
    rep.extend(s_manifold_ricci_identity(M))
    return rep


def structure_checks(M: MetricFManifold) -> PropertyReport:
    rep = PropertyReport("metric f-structure axioms")
    for chk in validate_f_structure(M).checks:
        if chk.passed:
            rep.add(f"structure: {chk.name}", arith.magnitude(chk.defect) if chk.defect is not None else 0)
        else:
            rep.add(f"structure: {chk.name}", chk.defect if chk.defect is not None and not arith.is_zero(chk.defect)
                    else arith.scalar(1))
    return rep


def verify(M: MetricFManifold) -> PropertyReport:
    """Every applicable identity suite for one structure."""
    rep = PropertyReport(M.name)
    rep.extend(structure_checks(M))
    cls = classify(M)
    rep.extend(f_structure_identities(M, cls))
    if not cls.admits_characteristic_connection:
        reasons = ", ".join(cls.obstruction_reasons)
        rep.skip("characteristic connection suites", f"no adapted connection ({reasons})")
        return rep
    try:
        T = characteristic_torsion(M)
    except ObstructionError as exc:
        rep.skip("characteristic connection suites", f"no adapted connection ({', '.join(exc.conditions)})")
        return rep
    conn = characteristic_connection(M)
    rep.extend(characteristic_suite(M, cls))
    rep.extend(torsion_characterization(M, conn, T))
    rep.extend(curvature_identity_suite(M, conn, T))
    if cls.is_S:
        rep.extend(s_manifold_suite(M))
    return rep
