"""Infinitesimal holonomy algebra and the Ambrose-Singer check.

The infinitesimal holonomy algebra at the identity is spanned by the curvature
endomorphisms ``R(X, Y)``, all their covariant derivatives ``(nabla^k R)(W..; X, Y)``,
and brackets.  For left-invariant data

    (nabla_W R)(X, Y) = [Lambda_W, R(X, Y)] - R(nabla_W X, Y) - R(X, nabla_W Y),

where ``Lambda_W`` is the matrix of ``Y -> nabla_W Y``.  The last two terms already lie in
the span of curvature values, so adjoining ``[Lambda_{e_m}, A]`` for every ``A`` in the
current span produces, level by level, exactly the span of the covariant
derivatives.  Iterating that closure together with brackets is what is implemented.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import arith, linalg
from .connection import Connection, connection_torsion, derivative
from .curvature import curvature
from .errors import HolonomyNotStabilized
from .fstructure import MetricFManifold


@dataclass(frozen=True)
class HolonomyResult:
    generators: list[np.ndarray]
    dim: int
    is_abelian: bool
    stabilized_at: int


def _flatten(mats: list[np.ndarray]) -> list[np.ndarray]:
    return [m.reshape(-1) for m in mats]


def _lambda(conn: Connection, w: int) -> np.ndarray:
    """Matrix of ``Y -> nabla_{e_w} Y``: column j holds ``Gamma[w, j, :]``."""
    return conn.gamma[w].T


def infinitesimal_holonomy(M: MetricFManifold, conn: Connection) -> HolonomyResult:
    n = M.dim
    R = curvature(M, conn)
    values = [R.endomorphism(i, j) for i in range(n) for j in range(i + 1, n)]
    basis = linalg.row_basis(_flatten(values), n * n) if values else []
    lambdas = [_lambda(conn, w) for w in range(n)]
    cap = n * n
    for it in range(cap + 1):
        mats = [b.reshape(n, n) for b in basis]
        new = list(mats)
        for A in mats:
            new.extend(L.dot(A) - A.dot(L) for L in lambdas)
        for a in range(len(mats)):
            for b in range(a + 1, len(mats)):
                new.append(mats[a].dot(mats[b]) - mats[b].dot(mats[a]))
        grown = linalg.row_basis(_flatten(new), n * n) if new else []
        if len(grown) == len(basis):
            gens = [b.reshape(n, n) for b in basis]
            abelian = all(arith.is_zero(A.dot(B) - B.dot(A)) for A in gens for B in gens)
            return HolonomyResult(gens, len(gens), abelian, it)
        basis = grown
    raise HolonomyNotStabilized(f"holonomy dimension still growing after {cap} iterations")


@dataclass(frozen=True)
class AmbroseSingerResult:
    nabla_T_zero: bool
    nabla_T_defect: Any
    nabla_R_zero: bool
    nabla_R_defect: Any

    @property
    def ambrose_singer(self) -> bool:
        return self.nabla_T_zero and self.nabla_R_zero


def ambrose_singer_check(M: MetricFManifold, conn: Connection) -> AmbroseSingerResult:
    """Componentwise ``nabla T`` and ``nabla R`` for the torsion of ``conn``."""
    T = connection_torsion(M, conn).m
    R = curvature(M, conn).R
    dT = arith.magnitude(derivative(conn.gamma, T, "llu"))
    dR = arith.magnitude(derivative(conn.gamma, R, "lllu"))
    return AmbroseSingerResult(arith.is_zero(dT), arith.to_plain(dT), arith.is_zero(dR), arith.to_plain(dR))
