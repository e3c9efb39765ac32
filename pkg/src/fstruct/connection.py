"""Levi-Civita, characteristic and Tanaka-Webster connections of a left-invariant structure.

A connection is stored by ``Gamma[i, j, k]`` with ``nabla_{e_i} e_j = sum_k Gamma[i, j, k] e_k``.
Frame fields are left-invariant, so covariant derivatives of constant-coefficient
tensors consist of connection-coefficient terms only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import arith
from .algebra import KForm, VectorValuedTwoForm, interior_product, wedge
from .errors import InternalConsistencyError, NotSManifold, ObstructionError
from .fstructure import (MetricFManifold, classify, commute_defect, killing_defect,
                         skewness_defect_n1, _max)

KINDS = ("levi_civita", "characteristic", "tanaka_webster", "custom")


@dataclass(frozen=True)
class Connection:
    gamma: np.ndarray
    kind: str = "custom"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown connection kind {self.kind!r}")
        if self.gamma.ndim != 3:
            raise ValueError("connection coefficients need three indices")

    def nabla(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """``nabla_x y`` for constant-coefficient (left-invariant) fields."""
        return np.einsum("i,j,ijk->k", x, y, self.gamma)


@dataclass(frozen=True)
class TorsionData:
    three_form: KForm
    vv_form: VectorValuedTwoForm


def torsion_data(M: MetricFManifold, T: KForm) -> TorsionData:
    return TorsionData(T, VectorValuedTwoForm.raise_form(T, M.G))


def levi_civita(M: MetricFManifold) -> Connection:
    """Koszul: ``2 g(nabla_X Y, Z) = g([X, Y], Z) - g([X, Z], Y) - g([Y, Z], X)``."""
    c, g = M.L.c, M.G.g
    cg = np.einsum("ijl,lm->ijm", c, g)
    K = (cg - cg.transpose(0, 2, 1) - np.einsum("jml,li->ijm", c, g)) / 2
    return Connection(np.einsum("ijm,mk->ijk", K, M.G.ginv), "levi_civita")


def connection_torsion(M: MetricFManifold, conn: Connection) -> VectorValuedTwoForm:
    """``T(X, Y) = nabla_X Y - nabla_Y X - [X, Y]`` on the frame."""
    G = conn.gamma
    return VectorValuedTwoForm(G - G.transpose(1, 0, 2) - M.L.c)


def _obstructions(M: MetricFManifold) -> tuple[list[str], dict[str, Any]]:
    d = {
        "commute": commute_defect(M),
        "killing": _max([killing_defect(M, x) for x in M.xi], M.exact),
        "skewness": skewness_defect_n1(M),
    }
    failed = [k for k in ObstructionError.CONDITIONS if not arith.is_zero(d[k])]
    return failed, {k: arith.to_plain(v) for k, v in d.items()}


def d_phi_F(M: MetricFManifold) -> KForm:
    """``d^phi F(X, Y, Z) = -dF(phi X, phi Y, phi Z)``."""
    phi = M.phi
    dense = np.einsum("abc,ai,bj,ck->ijk", M.dF.dense(), phi, phi, phi)
    return -KForm.from_dense(dense)


def characteristic_torsion(M: MetricFManifold) -> TorsionData:
    """``T = sum eta_i ^ d eta_i + d^phi F + N1 - sum eta_i ^ (xi_i _| N1)``.

    Raises ObstructionError naming every failed condition among commuting
    characteristic fields, Killing characteristic fields and skew N1.
    """
    failed, details = _obstructions(M)
    if failed:
        raise ObstructionError(failed, details)
    n1 = KForm.from_dense(M.N1_lowered)
    T = d_phi_F(M) + n1
    for eta, d, xi in zip(M.eta, M.deta, M.xi):
        T = T + wedge(eta, d) - wedge(eta, interior_product(xi, n1))
    for xi, d in zip(M.xi, M.deta):
        if not interior_product(xi, T).equals(d):
            raise InternalConsistencyError("characteristic torsion violates xi _| T = d eta")
    return torsion_data(M, T)


def s_manifold_torsion(M: MetricFManifold) -> TorsionData:
    """``T = sum eta_i ^ d eta_i`` for S-manifolds, cross-checked against the general formula."""
    if not classify(M).is_S:
        raise NotSManifold(f"{M.name} is not an S-manifold")
    T = KForm.zero(M.dim, 3, M.exact)
    for eta, d in zip(M.eta, M.deta):
        T = T + wedge(eta, d)
    if not T.equals(characteristic_torsion(M).three_form):
        raise InternalConsistencyError("S-manifold torsion differs from the general formula")
    return torsion_data(M, T)


def with_torsion(M: MetricFManifold, conn_g: Connection, T: TorsionData, kind: str = "custom") -> Connection:
    """``nabla = nabla^g + T / 2`` with ``T`` raised by the metric."""
    return Connection(conn_g.gamma + T.vv_form.m / 2, kind)


def characteristic_connection(M: MetricFManifold) -> Connection:
    return with_torsion(M, levi_civita(M), characteristic_torsion(M), kind="characteristic")


# ---------------------------------------------------------------- covariant derivatives

def derivative(gamma: np.ndarray, tensor: np.ndarray, variance: str) -> np.ndarray:
    """Covariant derivative of a constant-coefficient tensor.

    ``variance`` has one letter per slot, ``l`` (covariant) or ``u`` (contravariant).
    The result carries the differentiation direction as its first index.
    """
    if len(variance) != tensor.ndim:
        raise ValueError("variance string does not match the tensor rank")
    out = None
    for s, kind in enumerate(variance):
        if kind == "l":
            term = -np.moveaxis(np.tensordot(gamma, tensor, axes=([2], [s])), 1, s + 1)
        elif kind == "u":
            term = np.moveaxis(np.tensordot(gamma, tensor, axes=([1], [s])), 1, s + 1)
        else:
            raise ValueError(f"unknown slot type {kind!r}")
        out = term if out is None else out + term
    if out is None:
        return arith.zeros((gamma.shape[0],), like=gamma)
    return out


def covariant_derivative(M: MetricFManifold, conn: Connection, tensor: Any, variance: str | None = None) -> np.ndarray:
    """``nabla`` of a KForm, VectorValuedTwoForm, EndoField (2-d array), Vec (1-d array).

    Returns a dense array whose first index is the direction ``W`` of ``nabla_W``.
    A Vec ``V`` yields ``D[w, k]``, the k-th component of ``nabla_{e_w} V``.
    """
    if isinstance(tensor, KForm):
        arr, var = tensor.dense(), "l" * tensor.degree
    elif isinstance(tensor, VectorValuedTwoForm):
        arr, var = tensor.m, "llu"
    elif isinstance(tensor, np.ndarray) and variance is None and tensor.ndim in (1, 2):
        arr, var = tensor, ("u" if tensor.ndim == 1 else "ul")
    elif isinstance(tensor, np.ndarray) and variance is not None:
        arr, var = tensor, variance
    else:
        raise TypeError(f"unsupported tensor kind {type(tensor).__name__}")
    return derivative(conn.gamma, arr, variance or var)


@dataclass(frozen=True)
class AdaptednessReport:
    nabla_g: Any
    nabla_phi: Any
    nabla_xi: Any
    nabla_eta: Any

    def defects(self) -> dict[str, Any]:
        return {"nabla_g": self.nabla_g, "nabla_phi": self.nabla_phi,
                "nabla_xi": self.nabla_xi, "nabla_eta": self.nabla_eta}

    @property
    def ok(self) -> bool:
        return all(arith.is_zero(v) for v in self.defects().values())


def verify_adapted(M: MetricFManifold, conn: Connection) -> AdaptednessReport:
    """Defects of ``nabla g``, ``nabla phi``, ``nabla xi_i``, ``nabla eta_i``."""
    gam = conn.gamma
    ex = M.exact
    return AdaptednessReport(
        nabla_g=arith.to_plain(arith.magnitude(derivative(gam, M.G.g, "ll"))),
        nabla_phi=arith.to_plain(arith.magnitude(derivative(gam, M.phi, "ul"))),
        nabla_xi=arith.to_plain(_max([arith.magnitude(derivative(gam, x, "u")) for x in M.xi], ex)),
        nabla_eta=arith.to_plain(_max([arith.magnitude(derivative(gam, e, "l")) for e in M.eta_coeffs], ex)),
    )


def torsion_characterization_suite(M: MetricFManifold, conn: Connection, T: TorsionData):
    """Identities linking the torsion of an adapted connection with d eta, dF, N1 and phi."""
    from .suites import torsion_characterization
    return torsion_characterization(M, conn, T)


# ---------------------------------------------------------------- Tanaka-Webster

@dataclass(frozen=True)
class TanakaWebsterReport:
    connection: Connection
    a_tilde: VectorValuedTwoForm
    a: VectorValuedTwoForm
    a_minus_half_T: Any
    adapted: AdaptednessReport
    torsion: VectorValuedTwoForm
    torsion_skew_defect: Any
    distinct_from_characteristic: bool

    @property
    def torsion_type(self) -> str:
        if arith.is_zero(self.torsion_skew_defect):
            return "totally skew"
        return "mixed (not totally skew)"


def _tw_tensor(M: MetricFManifold, sign: int) -> VectorValuedTwoForm:
    """``sum_j {F(X, Y) xi_j + sign eta_j(X) phi Y + eta_j(Y) phi X}``."""
    F = M.F.dense()
    xb = M.xi_bar
    eb = M.eta_bar.coefficients()
    phi = M.phi
    m = (np.einsum("ij,k->ijk", F, xb) + sign * np.einsum("i,kj->ijk", eb, phi)
         + np.einsum("j,ki->ijk", eb, phi))
    return VectorValuedTwoForm(m)


def tanaka_webster(M: MetricFManifold) -> Connection:
    """``tilde nabla = nabla^g + tilde A``; S-manifolds only."""
    if not classify(M).is_S:
        raise NotSManifold(f"{M.name} is not an S-manifold")
    return Connection(levi_civita(M).gamma + _tw_tensor(M, +1).m, "tanaka_webster")


def tanaka_webster_report(M: MetricFManifold) -> TanakaWebsterReport:
    tw = tanaka_webster(M)
    T = characteristic_torsion(M)
    a = _tw_tensor(M, -1)
    tor = connection_torsion(M, tw)
    low = tor.lower(M.G)
    return TanakaWebsterReport(
        connection=tw,
        a_tilde=_tw_tensor(M, +1),
        a=a,
        a_minus_half_T=arith.to_plain(arith.magnitude(a.m - T.vv_form.m / 2)),
        adapted=verify_adapted(M, tw),
        torsion=tor,
        torsion_skew_defect=arith.to_plain(arith.magnitude(low + low.transpose(0, 2, 1))),
        distinct_from_characteristic=not arith.eq(tw.gamma, characteristic_connection(M).gamma),
    )
