import itertools
import random

import numpy as np
import pytest

from fstruct import arith, catalog, linalg
from fstruct.algebra import KForm
from fstruct.connection import (Connection, characteristic_connection, characteristic_torsion, connection_torsion,
                                derivative, levi_civita, s_manifold_torsion, tanaka_webster, tanaka_webster_report,
                                torsion_data, verify_adapted, with_torsion)
from fstruct.curvature import torsion_norm_sq
from fstruct.errors import NotSManifold, ObstructionError
from fstruct.fstructure import MetricFManifold, classify
from helpers import isomorphic_copy, twist

q = arith.mpq
ADMITTING = ["u2", "u3", "h3", "h5", "h3t3", "t3", "product:h3:4"]


def _koszul_oracle(M):
    """Levi-Civita coefficients straight from the Koszul formula on frame vectors."""
    n = M.dim
    g, L = M.G.inner, M.L.bracket
    e = [M.e(i) for i in range(n)]
    low = arith.zeros((n, n, n))
    for i, j, k in itertools.product(range(n), repeat=3):
        low[i, j, k] = (g(L(e[i], e[j]), e[k]) - g(L(e[j], e[k]), e[i]) + g(L(e[k], e[i]), e[j])) / 2
    return np.einsum("ijm,mk->ijk", low, M.G.ginv)


@pytest.mark.parametrize("name", ["u2", "h3", "h3t3", "u3"])
def test_levi_civita_matches_koszul(name):
    M = catalog.example(name)
    assert all(v == 0 for v in (levi_civita(M).gamma - _koszul_oracle(M)).flat)


@pytest.mark.parametrize("seed", range(3))
def test_levi_civita_torsion_free_and_metric(seed):
    M = twist(catalog.example("h5"), seed)
    lc = levi_civita(M)
    assert connection_torsion(M, lc).is_zero()
    assert arith.is_zero(derivative(lc.gamma, M.G.g, "ll"))


def test_heisenberg_levi_civita_values():
    M = catalog.example("h3")  # [X, Y] = Z, |X|^2 = |Y|^2 = 1/2, |Z|^2 = 1
    lc = levi_civita(M)
    X, Y, Z = (M.e(i) for i in range(3))
    assert list(lc.nabla(X, Y)) == list(Z / 2)
    assert list(lc.nabla(X, Z)) == list(-Y)
    assert list(lc.nabla(Z, X)) == list(-Y)


def _skew_torsion_solutions(M):
    """All 3-forms T with nabla^g + T/2 preserving phi and xi, by direct linear solve."""
    n = M.dim
    lc = levi_civita(M)
    keys = list(itertools.combinations(range(n), 3))

    def residual(gamma):
        parts = [derivative(gamma, M.phi, "ul").reshape(-1)]
        parts += [derivative(gamma, x, "u").reshape(-1) for x in M.xi]
        return np.concatenate(parts)

    base = residual(lc.gamma)
    cols = []
    for key in keys:
        b = torsion_data(M, KForm(n, 3, {key: q(1)}))
        cols.append(residual(lc.gamma + b.vv_form.m / 2) - base)
    A = np.array(cols, dtype=object).T
    aug = np.hstack([A, base.reshape(-1, 1)])
    sols = [v for v in linalg.nullspace(aug) if v[-1] != 0]
    return keys, A, sols


@pytest.mark.parametrize("name", ["u2", "h3", "h5", "t3", "h3t3"])
def test_characteristic_torsion_is_the_unique_solution(name):
    M = catalog.example(name)
    keys, A, sols = _skew_torsion_solutions(M)
    assert linalg.rank(A) == len(keys)
    assert sols
    v = sols[0] / sols[0][-1]
    T = characteristic_torsion(M).three_form
    assert [v[k] for k in range(len(keys))] == [T.component(*key) for key in keys]


@pytest.mark.parametrize("name", ADMITTING)
def test_characteristic_connection_adapted(name):
    M = catalog.example(name)
    conn = characteristic_connection(M)
    assert verify_adapted(M, conn).ok
    low = connection_torsion(M, conn).lower(M.G)
    assert arith.is_zero(low + low.transpose(0, 2, 1))
    assert arith.is_zero(low + low.transpose(2, 1, 0))


@pytest.mark.parametrize("name", ["u2", "h3", "h3t3", "product:h3:4"])
def test_s_manifold_torsion_agrees(name):
    M = catalog.example(name)
    assert s_manifold_torsion(M).three_form.equals(characteristic_torsion(M).three_form)


def test_s_manifold_torsion_rejects_u3():
    with pytest.raises(NotSManifold):
        s_manifold_torsion(catalog.example("u3"))


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("base", ["u2", "h5", "u3"])
def test_torsion_norm_frame_independent(base, seed):
    M = catalog.example(base)
    C = isomorphic_copy(M, seed)
    assert torsion_norm_sq(C, characteristic_torsion(C)) == torsion_norm_sq(M, characteristic_torsion(M))


def test_levi_civita_not_adapted_on_u2():
    M = catalog.example("u2")
    assert not verify_adapted(M, levi_civita(M)).ok


# ---------------------------------------------------------------- obstructions

def _raise_reasons(M):
    try:
        characteristic_torsion(M)
    except ObstructionError as exc:
        return exc
    return None


def test_obstruction_reasons_agree_with_classification():
    seen = set()
    for base in ("u2", "h5"):
        for seed in range(40):
            M = twist(catalog.example(base), seed)
            cls = classify(M)
            exc = _raise_reasons(M)
            if cls.admits_characteristic_connection:
                assert exc is None
            else:
                assert exc is not None and exc.conditions == cls.obstruction_reasons
                seen.add(tuple(exc.conditions))
    assert ("skewness",) in seen


def test_obstruction_message_lists_reasons():
    for seed in range(40):
        exc = _raise_reasons(twist(catalog.example("h5"), seed))
        if exc is not None and exc.conditions == ["skewness"]:
            assert str(exc) == "no adapted connection; reasons: [skewness]"
            assert exc.details["skewness"] != 0
            assert exc.details["commute"] == 0 and exc.details["killing"] == 0
            return
    pytest.fail("no skewness-only perturbation in the seed range")


def test_skewness_only_has_no_brute_force_solution():
    for seed in range(40):
        M = twist(catalog.example("h5"), seed)
        exc = _raise_reasons(M)
        if exc is not None and exc.conditions == ["skewness"]:
            assert _skew_torsion_solutions(M)[2] == []
            return
    pytest.fail("no skewness-only perturbation in the seed range")


def _cayley(rng, n):
    K = arith.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            v = q(rng.randint(-2, 2), rng.randint(1, 3))
            K[i, j], K[j, i] = v, -v
    I = arith.identity(n)
    return (I - K).dot(linalg.inv(I + K))


def test_u2_rotation_names_killing_and_skewness_together():
    U = catalog.example("u2")
    rng = random.Random(7)
    for _ in range(300):
        Q = _cayley(rng, 4)
        Qi = Q.T
        M = MetricFManifold(U.L, U.G, Q.dot(U.phi).dot(Qi), [Q[:, 2], Q[:, 3]])
        exc = _raise_reasons(M)
        if exc is not None and exc.conditions == ["killing", "skewness"]:
            assert str(exc) == "no adapted connection; reasons: [killing, skewness]"
            return
    pytest.fail("no (killing, skewness) rotation found")


# ---------------------------------------------------------------- Tanaka-Webster

@pytest.mark.parametrize("name", ["h3", "u2", "h3t3"])
def test_tanaka_webster(name):
    M = catalog.example(name)
    rep = tanaka_webster_report(M)
    assert rep.adapted.ok
    assert rep.a_minus_half_T == 0
    assert rep.distinct_from_characteristic
    assert rep.torsion_type == "mixed (not totally skew)"


def test_tanaka_webster_requires_s():
    with pytest.raises(NotSManifold):
        tanaka_webster(catalog.example("u3"))


def test_with_torsion_zero_is_levi_civita():
    M = catalog.example("u2")
    lc = levi_civita(M)
    conn = with_torsion(M, lc, torsion_data(M, KForm.zero(4, 3)))
    assert isinstance(conn, Connection)
    assert all(v == 0 for v in (conn.gamma - lc.gamma).flat)
