"""Shared test helpers."""

import random

import numpy as np

from fstruct import arith, linalg
from fstruct.algebra import LieAlgebra
from fstruct.fstructure import MetricFManifold


def twist(M, seed, steps=3):
    """Same Lie algebra, structure moved by a random unipotent rational frame change.

    Unless the change is an automorphism this is a genuinely different metric f-structure.
    """
    rng = random.Random(seed)
    n = M.dim
    A = arith.identity(n)
    for _ in range(steps):
        i, j = sorted(rng.sample(range(n), 2))
        A[i, j] += arith.mpq(rng.randint(-3, 3), rng.randint(1, 3))
    Ai = linalg.inv(A)
    return MetricFManifold(M.L, Ai.T.dot(M.G.g).dot(Ai), A.dot(M.phi).dot(Ai),
                           [A.dot(x) for x in M.xi], name=f"{M.name}~{seed}")


def isomorphic_copy(M, seed, steps=3):
    """The same structure written in a random unipotent rational frame (brackets transformed too)."""
    rng = random.Random(seed)
    n = M.dim
    A = arith.identity(n)
    for _ in range(steps):
        i, j = sorted(rng.sample(range(n), 2))
        A[i, j] += arith.mpq(rng.randint(-3, 3), rng.randint(1, 3))
    Ai = linalg.inv(A)
    c = np.einsum("ia,jb,ijk,ck->abc", A, A, M.L.c, Ai)
    L = LieAlgebra(c, [f"f{k + 1}" for k in range(n)])
    return MetricFManifold(L, A.T.dot(M.G.g).dot(A), Ai.dot(M.phi).dot(A), [Ai.dot(x) for x in M.xi],
                           name=f"{M.name}#{seed}")
