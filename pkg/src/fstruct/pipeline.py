"""Full report: validate, classify, torsion, connection, curvature, holonomy, property suites.

The report is a plain dict of strings, booleans, integers and lists, so the JSON and
text renderings are produced from the same data and agree on every number.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from . import arith
from .algebra import KForm
from .connection import (characteristic_connection, characteristic_torsion, levi_civita,
                         tanaka_webster_report, verify_adapted)
from .curvature import (curvature, curvature_as_f_phi, frame_matrix, ricci, s_tensor, sigma_four_form,
                        torsion_kernel, torsion_norm_sq)
from .errors import ExactModeUnsupported, HolonomyNotStabilized, ObstructionError
from .fstructure import MetricFManifold, classify, validate_f_structure
from .holonomy import ambrose_singer_check, infinitesimal_holonomy
from .report import PropertyReport
from .suites import verify

fmt = arith.fmt


def _vec(v: np.ndarray) -> list[str]:
    return [fmt(x) for x in v]


def _mat(m: np.ndarray) -> list[list[str]]:
    return [_vec(row) for row in m]


def _form_terms(M: MetricFManifold, w: KForm) -> list[dict[str, Any]]:
    labels = M.labels
    return [{"term": "^".join(labels[i] for i in idx), "indices": list(idx), "coefficient": fmt(v)}
            for idx, v in w.items() if not arith.is_zero(v)]


def structure_section(M: MetricFManifold) -> dict[str, Any]:
    return {"name": M.name, "dim": M.dim, "n": M.n, "s": M.s, "labels": list(M.labels),
            "mode": arith.EXACT if M.exact else arith.FLOAT}


def validation_section(M: MetricFManifold) -> dict[str, Any]:
    rep = validate_f_structure(M)
    return {"ok": rep.ok, "failures": [c.name for c in rep.failures]}


def classification_section(M: MetricFManifold) -> dict[str, Any]:
    cls = classify(M)
    return {
        "summary": cls.summary(),
        "flags": cls.flags(),
        "alpha": None if cls.alpha is None else [fmt(a) for a in cls.alpha],
        "defects": {k: fmt(v) for k, v in sorted(cls.defects.items())},
    }


def properties_section(rep: PropertyReport) -> list[dict[str, Any]]:
    out = []
    for c in rep.checks:
        row = {"name": c.name, "status": c.status}
        if c.skipped is not None:
            row["reason"] = c.skipped
        else:
            row["defect"] = fmt(c.defect)
        out.append(row)
    return out


def _frame_matrices(M: MetricFManifold, mats: dict[str, np.ndarray]) -> dict[str, Any] | None:
    try:
        return {k: _mat(frame_matrix(M, v)) for k, v in mats.items()}
    except ExactModeUnsupported:
        return None


def geometry_section(M: MetricFManifold) -> dict[str, Any]:
    """Everything that needs the characteristic connection; raises ObstructionError."""
    T = characteristic_torsion(M)
    conn = characteristic_connection(M)
    lc = levi_civita(M)
    R = curvature(M, conn)
    factor = curvature_as_f_phi(M, conn)
    Rl = R.lowered(M.G)
    n = M.dim
    comps = [{"indices": [i, j, k, l], "value": fmt(Rl[i, j, k, l])}
             for i in range(n) for j in range(i + 1, n) for k in range(n) for l in range(k + 1, n)
             if not arith.is_zero(Rl[i, j, k, l])]
    ric_n, ric_g = ricci(M, conn), ricci(M, lc)
    S = s_tensor(M, T)
    ker = torsion_kernel(M, T)
    sigma = sigma_four_form(M, T)
    try:
        hol = infinitesimal_holonomy(M, conn)
        hol_d = {"dim": hol.dim, "abelian": hol.is_abelian, "stabilized_at": hol.stabilized_at}
    except HolonomyNotStabilized as exc:
        hol_d = {"error": str(exc)}
    amb = ambrose_singer_check(M, conn)
    adapted = verify_adapted(M, conn)
    out = {
        "torsion": {"terms": _form_terms(M, T.three_form), "norm_sq": fmt(torsion_norm_sq(M, T))},
        "adapted": {k: fmt(v) for k, v in adapted.defects().items()},
        "curvature": {
            "f_phi_factor": None if factor is None else fmt(factor),
            "nonzero_count": len(comps),
            "components": comps,
        },
        "ricci": {"ric_nabla": _mat(ric_n.ric), "ric_g": _mat(ric_g.ric), "s_tensor": _mat(S)},
        "ricci_adapted_frame": _frame_matrices(M, {"ric_nabla": ric_n.ric, "ric_g": ric_g.ric,
                                                   "s_tensor": S}),
        "scal_nabla": fmt(ric_n.scal),
        "scal_g": fmt(ric_g.scal),
        "sigma_T": {"zero": sigma.is_zero(), "terms": _form_terms(M, sigma)},
        "kernel": {"rank": ker.rank, "basis": [_vec(v) for v in ker.basis]},
        "holonomy": hol_d,
        "ambrose_singer": {"nabla_T_zero": amb.nabla_T_zero, "nabla_R_zero": amb.nabla_R_zero},
    }
    if classify(M).is_S:
        tw = tanaka_webster_report(M)
        out["tanaka_webster"] = {
            "torsion_type": tw.torsion_type,
            "adapted": tw.adapted.ok,
            "distinct_from_characteristic": tw.distinct_from_characteristic,
            "A_minus_half_T": fmt(tw.a_minus_half_T),
        }
    return out


def build_report(M: MetricFManifold, with_properties: bool = True) -> dict[str, Any]:
    report: dict[str, Any] = {
        "structure": structure_section(M),
        "validation": validation_section(M),
        "classification": classification_section(M),
        "obstruction": None,
    }
    if not report["validation"]["ok"]:
        return report
    try:
        report["geometry"] = geometry_section(M)
    except ObstructionError as exc:
        report["obstruction"] = {"message": "no adapted connection", "reasons": exc.conditions,
                                 "defects": {k: fmt(v) for k, v in sorted(exc.details.items())}}
        report["geometry"] = None
    if with_properties:
        report["properties"] = properties_section(verify(M))
    return report


# ---------------------------------------------------------------- text rendering

def _render_matrix(lines: list[str], title: str, m: list[list[str]]) -> None:
    width = max((len(x) for row in m for x in row), default=1)
    lines.append(f"  {title}:")
    for row in m:
        lines.append("    [" + " ".join(x.rjust(width) for x in row) + "]")


def render_text(report: dict[str, Any]) -> str:
    st = report["structure"]
    lines = [f"structure {st['name']}: dim={st['dim']} n={st['n']} s={st['s']} mode={st['mode']}",
             "labels: " + " ".join(st["labels"])]
    val = report["validation"]
    lines.append("validation: ok" if val["ok"] else "validation: FAILED (" + "; ".join(val["failures"]) + ")")
    cl = report["classification"]
    lines.append(f"classification: {cl['summary']}")
    for k, v in cl["flags"].items():
        lines.append(f"  {k}: {str(v).lower()}")
    if cl["alpha"] is not None:
        lines.append("  alpha: " + ", ".join(cl["alpha"]))
    ob = report.get("obstruction")
    if ob is not None:
        lines.append(f"{ob['message']}; reasons: [{', '.join(ob['reasons'])}]")
        for k, v in ob["defects"].items():
            lines.append(f"  {k} defect: {v}")
    geo = report.get("geometry")
    if geo:
        t = geo["torsion"]
        lines.append("torsion T:")
        for term in t["terms"]:
            lines.append(f"  {term['coefficient']} {term['term']}")
        lines.append(f"|T|^2: {t['norm_sq']}")
        lines.append("adaptedness defects: " + ", ".join(f"{k}={v}" for k, v in geo["adapted"].items()))
        cv = geo["curvature"]
        if cv["f_phi_factor"] is not None:
            lines.append(f"R^nabla = {cv['f_phi_factor']} F (x) phi")
        lines.append(f"R^nabla nonzero components (i<j, k<l): {cv['nonzero_count']}")
        for c in cv["components"]:
            i, j, k, l = c["indices"]
            lab = st["labels"]
            lines.append(f"  R({lab[i]},{lab[j]},{lab[k]},{lab[l]}) = {c['value']}")
        lines.append("Ricci (structure frame):")
        for key in ("ric_nabla", "ric_g", "s_tensor"):
            _render_matrix(lines, key, geo["ricci"][key])
        if geo["ricci_adapted_frame"] is not None:
            lines.append("Ricci (orthonormal adapted frame):")
            for key in ("ric_nabla", "ric_g", "s_tensor"):
                _render_matrix(lines, key, geo["ricci_adapted_frame"][key])
        lines.append(f"scal_nabla: {geo['scal_nabla']}")
        lines.append(f"scal_g: {geo['scal_g']}")
        sg = geo["sigma_T"]
        lines.append("sigma_T: 0" if sg["zero"] else "sigma_T: " + " + ".join(
            f"{x['coefficient']} {x['term']}" for x in sg["terms"]))
        kr = geo["kernel"]
        lines.append(f"Ker(T): rank {kr['rank']}")
        for v in kr["basis"]:
            lines.append("  (" + ", ".join(v) + ")")
        hol = geo["holonomy"]
        if "error" in hol:
            lines.append(f"holonomy: {hol['error']}")
        else:
            lines.append(f"holonomy: dim {hol['dim']}, {'abelian' if hol['abelian'] else 'non-abelian'}")
        am = geo["ambrose_singer"]
        lines.append(f"Ambrose-Singer: nabla T = 0: {str(am['nabla_T_zero']).lower()}, "
                     f"nabla R = 0: {str(am['nabla_R_zero']).lower()}")
        tw = geo.get("tanaka_webster")
        if tw:
            lines.append(f"Tanaka-Webster: torsion {tw['torsion_type']}, adapted: {str(tw['adapted']).lower()}, "
                         f"distinct from characteristic: {str(tw['distinct_from_characteristic']).lower()}, "
                         f"|A - T/2| = {tw['A_minus_half_T']}")
    if "properties" in report:
        lines.append("properties:")
        lines.extend("  " + property_line(p) for p in report["properties"])
    return "\n".join(lines) + "\n"


def property_line(p: dict[str, Any]) -> str:
    if p["status"] == "skip":
        return f"{p['name']}: skip ({p['reason']})"
    suffix = "" if p["status"] == "pass" else "  FAIL"
    return f"{p['name']}: {p['defect']}{suffix}"
