"""Built-in example structures, the Sasakian product construction, structure files."""

from __future__ import annotations

import json
import warnings
from contextlib import nullcontext
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import arith
from .algebra import Gram, LieAlgebra
from .arith import mpq
from .errors import ExactModeUnsupported, InvalidStructure, NotSasakian, StructureFileError
from .fstructure import MetricFManifold, classify, validate_f_structure


def _q(x: Any) -> Any:
    return arith.scalar(x)


def _complex_structure(dim: int, pairs: Sequence[tuple[int, int]]) -> np.ndarray:
    """phi with phi(e_a) = e_b and phi(e_b) = -e_a for each pair (a, b)."""
    phi = arith.zeros((dim, dim))
    for a, b in pairs:
        phi[b, a] = _q(1)
        phi[a, b] = _q(-1)
    return phi


def _diag(values: Sequence[Any]) -> np.ndarray:
    g = arith.zeros((len(values), len(values)))
    for i, v in enumerate(values):
        g[i, i] = _q(v)
    return g


def _unit(dim: int, i: int) -> np.ndarray:
    v = arith.zeros(dim)
    v[i] = _q(1)
    return v


# ---------------------------------------------------------------- U(2)

def example_u2() -> MetricFManifold:
    """U(2) with frame (X12, Y12, xi1, xi2), orthonormal, phi X12 = Y12."""
    X, Y, x1, x2 = range(4)
    L = LieAlgebra.from_brackets(4, {
        (X, Y): {x1: 2, x2: 2},
        (X, x1): {Y: -1}, (X, x2): {Y: -1},
        (Y, x1): {X: 1}, (Y, x2): {X: 1},
    }, labels=["X12", "Y12", "xi1", "xi2"])
    return MetricFManifold(L, _diag([1] * 4), _complex_structure(4, [(X, Y)]),
                           [_unit(4, x1), _unit(4, x2)], name="u2")


# ---------------------------------------------------------------- U(3)

U3_LABELS = ["X12", "Y12", "X13", "Y13", "X23", "Y23", "xi1", "xi2", "xi3"]


def _u3_brackets() -> dict[tuple[int, int], dict[int, int]]:
    idx = {name: i for i, name in enumerate(U3_LABELS)}
    table: dict[tuple[str, str], dict[str, int]] = {
        ("X12", "Y12"): {"xi1": 2, "xi2": -2},
        ("X13", "Y13"): {"xi1": 2, "xi3": -2},
        ("X23", "Y23"): {"xi2": 2, "xi3": -2},
        ("X12", "X13"): {"X23": -1}, ("X12", "X23"): {"X13": 1},
        ("X12", "Y13"): {"Y23": -1}, ("X12", "Y23"): {"Y13": 1},
        ("X13", "X23"): {"X12": -1}, ("X13", "Y12"): {"Y23": -1},
        ("X13", "Y23"): {"Y12": 1},
        ("X23", "Y12"): {"Y13": -1}, ("X23", "Y13"): {"Y12": 1},
        ("Y12", "Y13"): {"X23": -1}, ("Y12", "Y23"): {"X13": -1},
        ("Y13", "Y23"): {"X12": -1},
    }
    for i, j in ((1, 2), (1, 3), (2, 3)):
        Xij, Yij = f"X{i}{j}", f"Y{i}{j}"
        table[(Xij, f"xi{i}")] = {Yij: -1}
        table[(Xij, f"xi{j}")] = {Yij: 1}
        table[(Yij, f"xi{i}")] = {Xij: 1}
        table[(Yij, f"xi{j}")] = {Xij: -1}
    out: dict[tuple[int, int], dict[int, int]] = {}
    for (a, b), val in table.items():
        ia, ib = idx[a], idx[b]
        coeffs = {idx[k]: v for k, v in val.items()}
        if ia > ib:
            ia, ib = ib, ia
            coeffs = {k: -v for k, v in coeffs.items()}
        out[(ia, ib)] = coeffs
    return out


def example_u3() -> MetricFManifold:
    """U(3) with frame (X12, Y12, X13, Y13, X23, Y23, xi1, xi2, xi3), orthonormal."""
    L = LieAlgebra.from_brackets(9, _u3_brackets(), labels=U3_LABELS)
    phi = _complex_structure(9, [(0, 1), (2, 3), (4, 5)])
    return MetricFManifold(L, _diag([1] * 9), phi, [_unit(9, k) for k in (6, 7, 8)], name="u3")


# ---------------------------------------------------------------- Heisenberg and products

def example_heisenberg(n: int = 1) -> MetricFManifold:
    """H_{2n+1}: [X_k, Y_k] = Z, g(X_k, X_k) = g(Y_k, Y_k) = 1/2, g(Z, Z) = 1, phi X_k = Y_k, xi = Z."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    dim = 2 * n + 1
    Z = 2 * n
    L = LieAlgebra.from_brackets(dim, {(k, n + k): {Z: 1} for k in range(n)},
                                 labels=(["X", "Y", "Z"] if n == 1 else
                                         [f"X{k + 1}" for k in range(n)] + [f"Y{k + 1}" for k in range(n)] + ["Z"]))
    G = _diag([mpq(1, 2) if arith.is_exact_mode() else 0.5] * (2 * n) + [1])
    phi = _complex_structure(dim, [(k, n + k) for k in range(n)])
    return MetricFManifold(L, G, phi, [_unit(dim, Z)], name="h3" if n == 1 else f"h{dim}")


HADAMARD_4 = ((1, 1, 1, 1), (1, -1, 1, -1), (1, 1, -1, -1), (1, -1, -1, 1))


def example_h3_t3(hadamard: Sequence[Sequence[int]] = HADAMARD_4) -> MetricFManifold:
    """H3 x T3 with h(Z, Z) = 4 and xi_i = (1/2)(Z/2 + sum_j h_ij zeta_j).

    ``hadamard`` is a 4 x 4 Hadamard matrix whose first column is all ones.
    """
    h = np.array(hadamard)
    if h.shape != (4, 4) or not (h[:, 0] == 1).all() or not (h.dot(h.T) == 4 * np.eye(4)).all():
        raise InvalidStructure("splitting must be a 4x4 Hadamard matrix with first column of ones")
    L = LieAlgebra.from_brackets(6, {(0, 1): {2: 1}}, labels=["X", "Y", "Z", "zeta1", "zeta2", "zeta3"])
    half = mpq(1, 2) if arith.is_exact_mode() else 0.5
    G = _diag([half, half, 4, 1, 1, 1])
    phi = _complex_structure(6, [(0, 1)])
    xi = []
    for i in range(4):
        v = arith.zeros(6)
        v[2] = half * half
        for j in range(3):
            v[3 + j] = half * int(h[i, j + 1])
        xi.append(v)
    return MetricFManifold(L, G, phi, xi, name="h3t3")


def flat_torus(dim: int = 3) -> MetricFManifold:
    """Abelian R^dim with the flat metric, phi e_1 = e_2 and xi the remaining frame vectors."""
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    L = LieAlgebra(arith.zeros((dim, dim, dim)), labels=[f"t{i + 1}" for i in range(dim)])
    return MetricFManifold(L, _diag([1] * dim), _complex_structure(dim, [(0, 1)]),
                           [_unit(dim, k) for k in range(2, dim)], name=f"t{dim}")


def householder_splitting(s: int) -> np.ndarray:
    """Orthogonal s x s matrix whose first column is (1/sqrt s, ..., 1/sqrt s)."""
    r = arith.sqrt(_q(s))
    v = arith.zeros(s)
    for i in range(s):
        v[i] = 1 / r
    e0 = arith.zeros(s)
    e0[0] = _q(1)
    w = e0 - v
    ww = w.dot(w)
    eye = arith.identity(s)
    if arith.is_zero(ww):
        return eye
    return eye - np.outer(w, w) * (2 / ww)


def product_s_manifold(N: MetricFManifold, s: int, splitting: np.ndarray | None = None) -> MetricFManifold:
    """Product of a Sasakian N with an abelian factor of dimension s - 1, as an s-codimensional S-manifold.

    The metric on N is rescaled to ``g + (s - 1) eta (x) eta`` so that ``g(Z, Z) = s``; the
    new ``xi_i = sum_a Q[i, a] u_a`` with ``u_0 = Z / sqrt(s)``, ``u_a = zeta_a``.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    r = classify(N)
    if not (r.valid_metric_f and r.is_S and N.s == 1):
        raise NotSasakian(f"{N.name} is not Sasakian")
    if s == 1:
        return N
    exact = arith.is_exact_mode() and N.exact
    if arith.is_exact_mode() and not N.exact:
        raise ExactModeUnsupported("base structure carries float data")
    with arith.arithmetic(arith.EXACT if exact else arith.FLOAT):
        conv = (lambda a: a) if exact else arith.as_float
        Q = householder_splitting(s) if splitting is None else (splitting if exact else arith.as_float(splitting))
        if Q.shape != (s, s) or not arith.eq(Q.T.dot(Q), arith.identity(s, like=Q)):
            raise InvalidStructure("splitting matrix must be orthogonal")
        root = arith.sqrt(_q(s))
        if not arith.is_zero(Q[:, 0] - 1 / root):
            raise InvalidStructure("splitting matrix must have first column 1/sqrt(s)")
        m = N.dim
        dim = m + s - 1
        c = arith.zeros((dim, dim, dim))
        c[:m, :m, :m] = conv(N.L.c)
        L = LieAlgebra(c, list(N.labels) + [f"zeta{a}" for a in range(1, s)])
        g = arith.zeros((dim, dim))
        eta = conv(N.eta_coeffs[0])
        g[:m, :m] = conv(N.G.g) + np.outer(eta, eta) * (s - 1)
        for a in range(m, dim):
            g[a, a] = _q(1)
        phi = arith.zeros((dim, dim))
        phi[:m, :m] = conv(N.phi)
        Z = conv(N.xi[0])
        xi = []
        for i in range(s):
            v = arith.zeros(dim)
            v[:m] = Z * (Q[i, 0] / root)
            for a in range(1, s):
                v[m + a - 1] = Q[i, a]
            xi.append(v)
        return MetricFManifold(L, Gram(g), phi, xi, name=f"product:{N.name}:{s}")


# ---------------------------------------------------------------- registry

EXAMPLES: dict[str, Callable[[], MetricFManifold]] = {
    "u2": example_u2,
    "u3": example_u3,
    "h3": lambda: example_heisenberg(1),
    "h5": lambda: example_heisenberg(2),
    "h3t3": example_h3_t3,
    "t3": lambda: flat_torus(3),
}


def example(name: str) -> MetricFManifold:
    """Resolve a catalog name, including ``product:<base>:<s>``."""
    if name.startswith("product:"):
        parts = name.split(":")
        if len(parts) != 3 or not parts[2].isdigit():
            raise KeyError(f"malformed product name {name!r}; expected product:<base>:<s>")
        return product_s_manifold(example(parts[1]), int(parts[2]))
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(sorted(EXAMPLES))}, product:<base>:<s>")
    return EXAMPLES[name]()


# ---------------------------------------------------------------- structure files

def _fmt_value(v: Any) -> str:
    return str(mpq(v)) if arith.is_exact(v) else repr(float(v))


def structure_to_dict(M: MetricFManifold) -> dict[str, Any]:
    n = M.dim
    c, g = M.L.c, M.G.g
    brackets = [[i, j, k, _fmt_value(c[i, j, k])]
                for i in range(n) for j in range(i + 1, n) for k in range(n) if c[i, j, k] != 0]
    gram = [[i, j, _fmt_value(g[i, j])] for i in range(n) for j in range(i, n) if g[i, j] != 0]
    return {
        "name": M.name,
        "dim": n,
        "labels": list(M.labels),
        "brackets": brackets,
        "gram": gram,
        "phi": [[_fmt_value(v) for v in row] for row in M.phi],
        "xi": [[_fmt_value(v) for v in x] for x in M.xi],
        "mode": arith.EXACT if M.exact else arith.FLOAT,
    }


def dumps_structure(M: MetricFManifold) -> str:
    d = structure_to_dict(M)
    lines = ["{"]
    lines.append(f'  "name": {json.dumps(d["name"])},')
    lines.append(f'  "dim": {d["dim"]},')
    lines.append(f'  "labels": {json.dumps(d["labels"])},')
    for key in ("brackets", "gram", "phi", "xi"):
        rows = d[key]
        if rows:
            body = ",\n".join(f"    {json.dumps(r)}" for r in rows)
            lines.append(f'  "{key}": [\n{body}\n  ],')
        else:
            lines.append(f'  "{key}": [],')
    lines.append(f'  "mode": {json.dumps(d["mode"])}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_structure(M: MetricFManifold, path: str | Path) -> None:
    Path(path).write_text(dumps_structure(M), encoding="utf-8")


def _parse_value(raw: Any, where: str) -> Any:
    if isinstance(raw, bool) or not isinstance(raw, (str, int, float)):
        raise StructureFileError("expected a number or rational string", field=where)
    if isinstance(raw, str):
        try:
            float(arith.parse_rational(raw))
        except ValueError:
            try:
                float(raw)
            except ValueError:
                raise StructureFileError(f"cannot parse value {raw!r}", field=where) from None
    try:
        return arith.scalar(raw)
    except ExactModeUnsupported as exc:
        raise ExactModeUnsupported(f"{exc} (field {where})") from None
    except (ValueError, TypeError):
        raise StructureFileError(f"cannot parse value {raw!r}", field=where) from None


def _index(raw: Any, dim: int, where: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int) or not 0 <= raw < dim:
        raise StructureFileError(f"index {raw!r} out of range 0..{dim - 1}", field=where)
    return raw


def structure_from_dict(d: dict[str, Any]) -> MetricFManifold:
    for key in ("dim", "brackets", "gram", "phi", "xi"):
        if key not in d:
            raise StructureFileError("missing required field", field=key)
    dim = d["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise StructureFileError("dim must be a positive integer", field="dim")
    labels = d.get("labels") or [f"e{i + 1}" for i in range(dim)]
    if not isinstance(labels, list) or len(labels) != dim or not all(isinstance(x, str) for x in labels):
        raise StructureFileError(f"expected {dim} string labels", field="labels")

    c = arith.zeros((dim, dim, dim))
    seen: set[tuple[int, int, int]] = set()
    for pos, entry in enumerate(d["brackets"]):
        where = f"brackets[{pos}]"
        if not isinstance(entry, list) or len(entry) != 4:
            raise StructureFileError("bracket entries are [i, j, k, value]", field=where)
        i, j, k = (_index(x, dim, where) for x in entry[:3])
        if i >= j:
            raise StructureFileError("bracket entries need i < j; the rest follows by antisymmetry", field=where)
        if (i, j, k) in seen:
            raise StructureFileError("duplicate bracket entry", field=where)
        seen.add((i, j, k))
        v = _parse_value(entry[3], where)
        c[i, j, k] = v
        c[j, i, k] = -v

    g = arith.zeros((dim, dim))
    seen2: set[tuple[int, int]] = set()
    for pos, entry in enumerate(d["gram"]):
        where = f"gram[{pos}]"
        if not isinstance(entry, list) or len(entry) != 3:
            raise StructureFileError("gram entries are [i, j, value]", field=where)
        i, j = (_index(x, dim, where) for x in entry[:2])
        if i > j:
            raise StructureFileError("gram entries need i <= j", field=where)
        if (i, j) in seen2:
            raise StructureFileError("duplicate gram entry", field=where)
        seen2.add((i, j))
        v = _parse_value(entry[2], where)
        g[i, j] = v
        g[j, i] = v

    phi_raw = d["phi"]
    if not isinstance(phi_raw, list) or len(phi_raw) != dim or any(not isinstance(r, list) or len(r) != dim for r in phi_raw):
        raise StructureFileError(f"phi must be a {dim} x {dim} matrix", field="phi")
    phi = arith.zeros((dim, dim))
    for i, row in enumerate(phi_raw):
        for j, v in enumerate(row):
            phi[i, j] = _parse_value(v, f"phi[{i}][{j}]")

    xi = []
    for pos, vec in enumerate(d["xi"]):
        if not isinstance(vec, list) or len(vec) != dim:
            raise StructureFileError(f"xi vectors need {dim} entries", field=f"xi[{pos}]")
        v = arith.zeros(dim)
        for j, x in enumerate(vec):
            v[j] = _parse_value(x, f"xi[{pos}][{j}]")
        xi.append(v)

    L = LieAlgebra(c, labels)
    try:
        G = Gram(g)
    except InvalidStructure as exc:
        raise StructureFileError(str(exc), field="gram") from None
    return MetricFManifold(L, G, phi, xi, name=str(d.get("name", "structure")))


def load_structure(path: str | Path, mode: str | None = None) -> MetricFManifold:
    """Read a structure file.

    Arithmetic precedence: ``mode`` argument, then the file's ``mode`` hint, then the
    active context.  A structure failing validation still loads, with a warning.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureFileError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(d, dict):
        raise StructureFileError("top level must be an object")
    hint = d.get("mode")
    if hint is not None and hint not in (arith.EXACT, arith.FLOAT):
        raise StructureFileError("mode must be 'exact' or 'float'", field="mode")
    chosen = mode or hint
    with (arith.arithmetic(chosen) if chosen else nullcontext()):
        M = structure_from_dict(d)
        report = validate_f_structure(M)
    if not report.ok:
        names = ", ".join(c.name for c in report.failures)
        warnings.warn(f"{path}: structure fails validation: {names}", stacklevel=2)
    return M
