"""End-to-end analysis: from a generator list to a structured report.

The report is one plain dict (JSON-serializable, deterministically ordered);
the text rendering and the machine-readable records are two views of the
same dict, so they always carry identical values.
"""

from .curve import analyze
from .differentials import torsion_submodule
from .errors import (ConductorNotInMSquared, NotAMember, PrecisionExhausted,
                     Unstable)
from .pullback import CertificateWorkshop, theorem_checklist
from .transform import conductor_in_m_squared, verify_transform_properties

SCHEMA_VERSION = 1


def run_analysis(generators, name=None, precision=None, degree_bound=None,
                 skip_implicitize=False, certificates=True):
    """Full pipeline; returns the report dict.

    certificates=False keeps verdicts but skips the constructive torsion
    certificates (used by the reproduction harness, which compares verdicts).
    """
    ring = analyze(generators, precision=precision, name=name)
    ws = CertificateWorkshop(ring)
    report = {
        "schema": SCHEMA_VERSION,
        "name": name or ring.name or "curve",
        "generators": [str(g) for g in ring.generators],
        "exponents": list(ring.exponents),
    }
    profile = ring.profile
    report["profile"] = {
        "conductor": profile.conductor,
        "gaps": list(profile.gaps),
        "reduced_type_exponents": list(profile.reduced_type_exponents),
        "reduced_type": profile.reduced_type,
        "precision": profile.precision,
        "stabilization": [list(h) for h in profile.history],
    }
    cm = ring.cm_type()
    report["invariants"] = {
        "edim": ring.n,
        "multiplicity": ring.multiplicity,
        "reduced_type": profile.reduced_type,
        "cm_type": cm,
        "gorenstein": cm == 1,
        "conductor_in_m2": conductor_in_m_squared(ring),
        "maximal_reduced_type": profile.reduced_type == cm,
    }

    if skip_implicitize:
        report["relations"] = {"skipped": True}
        report["torsion"] = {"skipped": True}
    else:
        if degree_bound is not None:
            from .implicitize import relations_up_to_degree
            rs = relations_up_to_degree(ws.monomial1(), degree_bound)
            ws._cache["relations"] = rs
        rs = ws.relations()
        info = rs.minimal_generator_count()
        names = ws.monomial1().variable_names()
        report["relations"] = {
            "mu": info["mu"],
            "deviation": info["deviation"],
            "lower_bound_only": info["lower_bound_only"],
            "completeness": rs.completeness,
            "degree_bound": rs.degree_bound,
            "new_by_degree": {str(k): v for k, v in
                              sorted(rs.new_by_degree.items())},
            "relations": rs.format_relations(names),
        }
        model = ws.model_R()
        basis = model.basis_vectors()
        report["torsion"] = {
            "length": model.length,
            "annihilator_x1_length": model.annihilator_dim,
            "truncation": model.M,
            "stabilization": [list(h) for h in model.history],
            "basis": [vec.render() for vec in basis],
        }

    report["transform"] = _transform_section(ws, skip_implicitize)
    if not certificates:
        mode = "none"
    elif skip_implicitize:
        mode = "pair-only"
    else:
        mode = "full"
    checklist = theorem_checklist(ring, workshop=ws, certificate_mode=mode)
    report["theorems"] = _theorem_section(checklist)
    report["audit"] = {
        "precision": ring.precision,
        "degree_bound": report["relations"].get("degree_bound"),
        "torsion_truncation": report["torsion"].get("truncation"),
        "skip_implicitize": skip_implicitize,
        "certificates": bool(certificates and not skip_implicitize),
    }
    return report


def _transform_section(ws, skip_implicitize):
    ring = ws.ring
    if not conductor_in_m_squared(ring):
        return {
            "applicable": False,
            "reason": "conductor not inside m^2 "
                      "(max generator valuation %d >= conductor %d)"
                      % (max(ring.exponents), ring.conductor),
        }
    try:
        tr = ws.transform_bare() if skip_implicitize else ws.transform()
    except (PrecisionExhausted, NotAMember) as exc:
        return {"applicable": False, "reason": str(exc)}
    section = {
        "applicable": True,
        "b_exponents": list(tr.b_exponents),
        "s": tr.s,
        "conductor": tr.ring_view.conductor,
        "edim": tr.ring_view.n,
        "generators": [str(g) for g in tr.ring_view.generators],
        "lemma_clauses": verify_transform_properties(tr),
    }
    if not skip_implicitize:
        names = list(tr.variable_names)
        section["product_witnesses"] = {
            "x%d*T%d" % key: wit.format(names[:tr.n])
            for key, wit in sorted(tr.g_witnesses.items())
        }
        section["product_witnesses"].update({
            "T%d*T%d" % key: wit.format(names[:tr.n])
            for key, wit in sorted(tr.h_witnesses.items())
        })
        try:
            model = ws.model_S()
            section["torsion"] = {
                "length": model.length,
                "annihilator_x1_length": model.annihilator_dim,
                "truncation": model.M,
            }
        except Unstable as exc:
            section["torsion"] = {"error": str(exc)}
    verdict, monomial_form = ws.quasi_homogeneous()
    section["quasi_homogeneous"] = {
        "verdict": verdict,
        "monomial_form": list(monomial_form) if monomial_form else None,
    }
    return section


def _theorem_section(checklist):
    entries = []
    for e in checklist.entries:
        entry = {
            "name": e.name,
            "hypotheses": e.hypotheses,
            "verdict": e.verdict,
            "certificate": e.certificate.render()
            if e.certificate is not None else None,
            "checks": _plain(e.checks),
        }
        if e.note:
            entry["note"] = e.note
        entries.append(entry)
    return {
        "entries": entries,
        "maximal_reduced_type": checklist.maximal_reduced_type,
        "torsion_certified": checklist.torsion_certified,
        "invariants": _plain(checklist.invariants),
    }


def _plain(value):
    """Recursively coerce to JSON-friendly plain data."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return value
    return str(value)


# ---------------------------------------------------------------------------
# renderings

def to_records(report):
    """Line-delimited records: one dict per section, identical values."""
    base = {"schema": report["schema"], "name": report["name"]}
    records = []
    records.append(dict(base, record="curve",
                        generators=report["generators"],
                        exponents=report["exponents"]))
    for key in ("profile", "invariants", "relations", "torsion",
                "transform", "audit"):
        records.append(dict(base, record=key, **_plain(report[key])))
    theorems = report["theorems"]
    for entry in theorems["entries"]:
        records.append(dict(base, record="theorem", **_plain(entry)))
    records.append(dict(base, record="summary",
                        maximal_reduced_type=theorems["maximal_reduced_type"],
                        torsion_certified=theorems["torsion_certified"]))
    return records


def to_text(report):
    lines = []
    w = lines.append
    w("curve %s" % report["name"])
    w("  generators: %s" % "; ".join(report["generators"]))
    p = report["profile"]
    w("value profile")
    w("  conductor exponent: %d" % p["conductor"])
    w("  gaps: %s" % (p["gaps"] or "none"))
    w("  reduced type s = %d  (gap exponents %s)"
      % (p["reduced_type"], p["reduced_type_exponents"] or "[]"))
    inv = report["invariants"]
    w("invariants")
    w("  edim = %d, multiplicity = %d, CM type = %d%s"
      % (inv["edim"], inv["multiplicity"], inv["cm_type"],
         " (Gorenstein)" if inv["gorenstein"] else ""))
    w("  conductor in m^2: %s; maximal reduced type: %s"
      % (inv["conductor_in_m2"], inv["maximal_reduced_type"]))
    r = report["relations"]
    if r.get("skipped"):
        w("relations: skipped")
    else:
        w("defining relations (degree bound %d, %s)"
          % (r["degree_bound"], r["completeness"]))
        w("  mu = %d, deviation = %d" % (r["mu"], r["deviation"]))
        for rel in r["relations"]:
            w("    %s" % rel)
    t = report["torsion"]
    if t.get("skipped"):
        w("torsion: skipped")
    else:
        w("torsion of the differential module")
        w("  length = %d, ann(x1) length = %d, truncation M = %d"
          % (t["length"], t["annihilator_x1_length"], t["truncation"]))
        for b in t["basis"]:
            w("    %s" % b)
    tr = report["transform"]
    if not tr["applicable"]:
        w("transform: not applicable (%s)" % tr["reason"])
    else:
        w("transform ring S = R[c/x1]")
        w("  adjoined exponents b = %s, s = %d" % (tr["b_exponents"], tr["s"]))
        w("  conductor %d, edim %d" % (tr["conductor"], tr["edim"]))
        w("  generators: %s" % "; ".join(tr["generators"]))
        w("  lemma clauses: %s" % tr["lemma_clauses"])
        if "torsion" in tr:
            w("  torsion: %s" % tr["torsion"])
        w("  quasi-homogeneous: %s" % tr["quasi_homogeneous"])
    th = report["theorems"]
    w("theorem checklist")
    for e in th["entries"]:
        w("  %-28s %s" % (e["name"], e["verdict"]))
        w("      hypotheses: %s" % e["hypotheses"])
        if e.get("certificate"):
            w("      certificate: %s" % e["certificate"])
        if e.get("checks"):
            w("      checks: %s" % e["checks"])
        if e.get("note"):
            w("      note: %s" % e["note"])
    w("summary: torsion certified = %s, maximal reduced type = %s"
      % (th["torsion_certified"], th["maximal_reduced_type"]))
    a = report["audit"]
    w("audit: precision=%s degree_bound=%s torsion_truncation=%s"
      % (a["precision"], a["degree_bound"], a["torsion_truncation"]))
    return "\n".join(lines) + "\n"
