"""Pulling torsion back from the transform ring, and the theorem checklist.

The transform ring S always carries visible torsion: the elements
gamma_ij = b_i T_i dT_j - b_j T_j dT_i.  Any torsion element of S whose
T-row coefficients are non-units can be rewritten, using the gammas and the
presentation columns of the products T_k T_l, so that its T-rows vanish.
Given enough independent torsion classes, a rational kernel computation
cancels the remaining T-linear parts of the x-rows simultaneously, leaving
a nonzero torsion element with all coefficients in R.

theorem_checklist() evaluates every sufficient condition implemented here
against computed invariants and attaches constructive certificates.
"""

from dataclasses import dataclass, field

from .curve import analyze
from .differentials import (DifferentialVector, certify_nonzero_mod_m2,
                            jacobian_presentation, monomial_pair_torsion,
                            torsion_submodule)
from .errors import (ConductorNotInMSquared, NotACurve, PrecisionExhausted,
                     Unstable, UnitTRow)
from .implicitize import stable_relations
from .linalg import Echelon, kernel_basis
from .rationals import Q
from .series import TruncatedSeries
from .transform import (build_transform, conductor_in_m_squared,
                        transform_presentation, verify_transform_properties)


# ---------------------------------------------------------------------------
# torsion elements of the transform ring

def gamma_vector(tr, i, j, precision=None):
    """gamma_ij = b_i T_i dT_j - b_j T_j dT_i as a raw block vector (i < j)."""
    if not 1 <= i < j <= tr.s:
        raise ValueError("need 1 <= i < j <= s")
    n = tr.n
    P = precision or tr.base.precision
    entries = [TruncatedSeries.zero(P) for _ in range(tr.ambient)]
    b = tr.b_exponents
    entries[n + j - 1] = tr.t_series(i, P) * b[i - 1]
    entries[n + i - 1] = tr.t_series(j, P) * (-b[j - 1])
    return DifferentialVector(tuple(entries), tr.block_names)


def gamma_elements(tr, certify=True):
    """All s-choose-2 gamma torsion elements, syzygy-verified and (when
    requested) certified nonzero modulo the square of the maximal ideal."""
    out = []
    derivs = [g.derivative() for g in tr.block_generators()]
    for i in range(1, tr.s + 1):
        for j in range(i + 1, tr.s + 1):
            vec = gamma_vector(tr, i, j)
            if not vec.is_syzygy(derivs):
                raise AssertionError("gamma_%d%d is not a syzygy" % (i, j))
            if certify:
                sorted_vec = DifferentialVector(
                    tr.to_sorted_order(vec.entries),
                    tuple("d%d" % k for k in range(tr.ambient)))
                if certify_nonzero_mod_m2(sorted_vec, tr.ring_view):
                    vec.tag = "certified-nonzero"
            vec.meta["pair"] = (i, j)
            out.append(vec)
    return out


def _axpy_vector(entries, coeff, column):
    return [e - column[k] * coeff for k, e in enumerate(entries)]


def eliminate_T_rows(vec, tr):
    """Rewrite a torsion element so its dT rows vanish.

    The T-row coefficients must be non-units (UnitTRow otherwise).  Each
    coefficient is split as (element of R) + (k-linear form in the T's); the
    R part is cleared with the X_i T_j presentation columns, the T-linear
    part with combinations  gamma +/- b * theta  built so that exactly one
    T-row entry changes per step.  The result differs from the input by
    torsion elements and presentation columns, so it represents
    input - sum c_ij gamma_ij  in the differential module.
    """
    if tr.presentation is None:
        raise ValueError("transform_presentation() has not been run")
    n, s = tr.n, tr.s
    entries = list(vec.entries)
    for j in range(1, s + 1):
        if entries[n + j - 1].order() == 0:
            raise UnitTRow("dT%d coefficient is a unit" % j)
    columns = tr.presentation.columns
    base_gens = tr.base.generators
    used_gammas = {}
    # clear the R-component of every T row
    for j in range(1, s + 1):
        r_part, _ = tr.decompose(entries[n + j - 1])
        if r_part.is_zero():
            continue
        witness = tr.base.membership_witness(r_part)
        for i0, qpoly in witness.split_by_leading_variable().items():
            qval = qpoly.evaluate(base_gens)
            col = columns[tr.column_index[("xt", i0 + 1, j)]]
            entries = _axpy_vector(entries, qval, col)
    # clear the T-linear component of every T row
    b = tr.b_exponents
    for j in range(1, s + 1):
        _, tcoeffs = tr.decompose(entries[n + j - 1])
        for l, coeff in sorted(tcoeffs.items()):
            if not coeff:
                continue
            if l == j:
                theta = columns[tr.column_index[("tt", j, j)]]
                entries = _axpy_vector(entries, coeff / 2, theta)
                used_gammas[(j, j)] = coeff / 2
            elif l < j:
                gamma = gamma_vector(tr, l, j)
                theta = columns[tr.column_index[("tt", l, j)]]
                scale = coeff / (b[l - 1] + b[j - 1])
                combo = [gamma.entries[k] + theta[k] * b[j - 1]
                         for k in range(tr.ambient)]
                entries = _axpy_vector(entries, scale, combo)
                used_gammas[(l, j)] = scale
            else:
                gamma = gamma_vector(tr, j, l)
                theta = columns[tr.column_index[("tt", j, l)]]
                scale = -coeff / (b[j - 1] + b[l - 1])
                combo = [gamma.entries[k] - theta[k] * b[j - 1]
                         for k in range(tr.ambient)]
                entries = _axpy_vector(entries, scale, combo)
                used_gammas[(j, l)] = scale
    for j in range(1, s + 1):
        if not entries[n + j - 1].is_zero():
            raise AssertionError("dT%d row did not cancel" % j)
    out = DifferentialVector(tuple(entries), vec.names, vec.tag)
    out.meta["gamma_combination"] = used_gammas
    return out


@dataclass
class PullbackResult:
    outcome: str                       # "pulled-back" | "insufficient"
    vector: object = None              # DifferentialVector over R
    counts: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)


def pullback_to_R(torsion_vectors, tr, model_S, relations_R=None):
    """Combine torsion elements of S into a nonzero torsion element of R.

    Every input with non-unit T-rows is T-eliminated; a class-independent
    subset is selected in the model of the S module; the kernel of their
    T-coefficient forms yields a combination whose entries all lie in R.
    Nonzeroness follows from class independence in S (a vector of R-entries
    that dies in the R module would die in the S module too, since the
    presentation of S contains every column of the presentation of R).
    """
    n, s = tr.n, tr.s
    threshold = n * s + s * (s - 1) // 2 + 1
    eliminated = []
    skipped = 0
    for vec in torsion_vectors:
        try:
            eliminated.append(eliminate_T_rows(vec, tr))
        except UnitTRow:
            skipped += 1
    counts = {
        "supplied": len(torsion_vectors),
        "unit_row_skipped": skipped,
        "threshold": threshold,
    }
    selected = []
    ech = Echelon()
    for vec in eliminated:
        coords = model_S.vector_coords(vec.entries)
        residue, _ = model_S.image.reduce(coords)
        if not residue:
            continue
        pivot, _ = ech.insert(residue)
        if pivot is not None:
            selected.append(vec)
    counts["independent_after_elimination"] = len(selected)
    columns = []
    for vec in selected:
        col = {}
        for i in range(n):
            _, tcoeffs = tr.decompose(vec.entries[i])
            for l, c in tcoeffs.items():
                col[i * s + (l - 1)] = c
        columns.append(col)
    kern = kernel_basis(columns)
    if not kern:
        return PullbackResult(outcome="insufficient", counts=counts)
    mu = kern[0]
    combined = [TruncatedSeries.zero(model_S.M) for _ in range(tr.ambient)]
    for k, c in sorted(mu.items()):
        combined = [e + selected[k].entries[idx] * c
                    for idx, e in enumerate(combined)]
    r_entries = []
    for i in range(n):
        r_part, tcoeffs = tr.decompose(combined[i])
        if any(tcoeffs.values()):
            raise AssertionError("T-linear parts did not cancel exactly")
        r_entries.append(r_part)
    for j in range(s):
        if not combined[n + j].is_zero():
            raise AssertionError("a dT row re-appeared in the combination")
    checks = {}
    # still a nonzero class in the module of S
    checks["nonzero_in_transform_module"] = not model_S.is_zero_class(
        tuple(combined))
    # an honest syzygy over R
    derivs = [g.derivative() for g in tr.base.generators]
    residual = TruncatedSeries.zero(None)
    for e, d in zip(r_entries, derivs):
        residual = residual + e * d
    checks["syzygy_over_R"] = residual.is_zero()
    vec_R = DifferentialVector(
        tuple(r_entries),
        tuple("dx%d" % (i + 1) for i in range(n)))
    checks["nonzero_mod_m2"] = certify_nonzero_mod_m2(
        vec_R, tr.base, relations_R)
    if checks["nonzero_in_transform_module"] and checks["syzygy_over_R"]:
        vec_R.tag = "certified-nonzero"
    vec_R.meta["combination"] = {k: str(c) for k, c in sorted(mu.items())}
    return PullbackResult(outcome="pulled-back", vector=vec_R,
                          counts=counts, checks=checks)


# ---------------------------------------------------------------------------
# quasi-homogeneity (sufficient check only)

def quasi_homogeneous_check(tr):
    """Try to rewrite the transform ring as a monomial curve.

    Returns ("yes", exponents) when every generator reduces to a pure
    monomial through conductor-tail stripping and absorption of tails that
    lie in the subring generated by the other generators - verified at the
    end by re-analysis and membership of the original generators.  Returns
    ("inconclusive", None) otherwise; never "no".
    """
    view = tr.ring_view
    c = view.conductor
    gens = list(view.generators)

    def is_monomial(g):
        return len(g.items()) == 1 and g.leading_coefficient() == 1

    for _ in range(2 * len(gens) + 2):
        changed = False
        for idx, g in enumerate(gens):
            if is_monomial(g):
                continue
            a = g.order()
            stripped = g.with_exact_tail_dropped(max(c, a + 1))
            if not stripped == g:
                if len(stripped.items()) == 1:
                    stripped = TruncatedSeries.monomial(a, 1, None)
                gens[idx] = stripped
                g = stripped
                changed = True
                if is_monomial(g):
                    continue
            lead = TruncatedSeries.monomial(a, g.leading_coefficient(),
                                            g.precision)
            tail = g - lead
            if tail.is_zero():
                gens[idx] = TruncatedSeries.monomial(a, 1, None)
                changed = True
                continue
            others = gens[:idx] + gens[idx + 1:]
            try:
                sub = analyze(others, check_minimal=False)
            except (NotACurve, PrecisionExhausted):
                continue
            if sub.contains_series(tail):
                gens[idx] = TruncatedSeries.monomial(a, 1, None)
                changed = True
        if not changed:
            break
    if not all(is_monomial(g) for g in gens):
        return "inconclusive", None
    exponents = tuple(g.order() for g in gens)
    # verify: the monomial model really presents the same ring
    try:
        final = analyze([TruncatedSeries.monomial(a) for a in exponents],
                        check_minimal=False)
    except (NotACurve, PrecisionExhausted):
        return "inconclusive", None
    window = min(final.precision, view.precision)
    same_profile = (final.conductor == view.conductor and
                    tuple(v for v in final.profile.occupied if v < window) ==
                    tuple(v for v in view.profile.occupied if v < window))
    if not same_profile:
        return "inconclusive", None
    for g in view.generators:
        if not final.contains_series(g.truncated(final.precision)):
            return "inconclusive", None
    return "yes", tuple(sorted(exponents))


# ---------------------------------------------------------------------------
# theorem checklist

@dataclass
class TheoremEntry:
    name: str
    hypotheses: dict
    verdict: str                   # "applies" | "fails" | "inconclusive"
    certificate: object = None     # DifferentialVector
    checks: dict = field(default_factory=dict)
    note: str = ""


@dataclass
class TheoremReport:
    entries: list
    maximal_reduced_type: bool
    invariants: dict
    torsion_certified: bool

    def entry(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


class CertificateWorkshop:
    """Shared lazily-computed artifacts for the checklist and reports."""

    def __init__(self, ring):
        self.ring = ring
        self._cache = {}

    def get(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    # -- base ring artifacts --

    def monomial1(self):
        def build():
            g1 = self.ring.generators[0]
            if len(g1.items()) == 1 and g1.leading_coefficient() == 1:
                return self.ring
            return self.ring.monomialized(1)
        return self.get("monomial1", build)

    def stripped(self):
        """Monomialized at 1, with the top generator stripped to t^{a_n}.

        Only the top generator is stripped: after monomialization the first
        generator's tail is gone, and cancellations that fill semigroup
        values may live in the remaining tails, so a blanket strip can
        change the ring.  One monomial at the top is all the pair
        certificate needs.
        """
        def build():
            ring = self.monomial1()
            if max(ring.exponents) >= ring.conductor:
                return ring.strip_conductor_tails(indices=[ring.n])
            return ring.strip_conductor_tails()
        return self.get("stripped", build)

    def relations(self):
        return self.get("relations",
                        lambda: stable_relations(self.monomial1()))

    def presentation_R(self):
        return self.get("presentation_R", lambda: jacobian_presentation(
            self.relations(), self.monomial1()))

    def model_R(self):
        return self.get("model_R",
                        lambda: torsion_submodule(self.presentation_R()))

    # -- transform artifacts (require conductor inside m^2) --

    def transform_bare(self):
        """The transform ring without its relation presentation (cheap)."""
        if "transform" in self._cache:
            return self._cache["transform"]
        return self.get("transform_bare",
                        lambda: build_transform(self.monomial1()))

    def transform(self):
        def build():
            tr = self._cache.get("transform_bare") or build_transform(
                self.monomial1())
            return transform_presentation(tr, self.relations())
        return self.get("transform", build)

    def model_S(self):
        return self.get("model_S", lambda: torsion_submodule(
            self.transform().presentation))

    def gammas(self):
        return self.get("gammas", lambda: gamma_elements(self.transform()))

    def pullback(self):
        def build():
            tr = self.transform()
            model = self.model_S()
            return pullback_to_R(model.basis_vectors(), tr, model,
                                 relations_R=self.relations().relations)
        return self.get("pullback", build)

    def quasi_homogeneous(self):
        return self.get("qh", lambda: quasi_homogeneous_check(
            self.transform_bare()))


def theorem_checklist(ring, workshop=None, certificate_mode="full"):
    """Evaluate every implemented sufficient condition for nonzero torsion.

    Hypotheses are computed from the analyzed invariants; an "applies"
    verdict carries a constructive certificate: the monomial-pair element
    when the conductor escapes m^2, a pulled-back combination from the
    transform ring otherwise.  certificate_mode: "full" computes both
    kinds, "pair-only" skips the (relation-hungry) pullbacks, "none" skips
    all certificates and reports verdicts alone.
    """
    ws = workshop or CertificateWorkshop(ring)
    n = ring.n
    c = ring.conductor
    s = ring.reduced_type()
    cm = ring.cm_type()
    in_m2 = conductor_in_m_squared(ring)
    entries = []

    def pullback_certificate(entry):
        if certificate_mode != "full":
            entry.note = "certificate computation skipped"
            return
        try:
            result = ws.pullback()
        except (Unstable, PrecisionExhausted) as exc:
            entry.note = "certificate attempt failed: %s" % exc
            return
        entry.checks.update(result.checks)
        entry.checks["pullback_counts"] = result.counts
        if result.outcome == "pulled-back":
            entry.certificate = result.vector
        else:
            entry.note = ("pullback found no combination (measured torsion "
                          "below threshold)")

    # 1. conductor not inside m^2
    hyp = {"max_generator_valuation": max(ring.exponents), "conductor": c,
           "conductor_outside_m2": not in_m2}
    entry = TheoremEntry("conductor-not-in-m2", hyp,
                         "applies" if not in_m2 else "fails")
    if entry.verdict == "applies" and n >= 2 and certificate_mode != "none":
        stripped = ws.stripped()
        vec = monomial_pair_torsion(stripped, 1, stripped.n)
        entry.certificate = vec
        entry.checks["nonzero_mod_m2"] = vec.tag == "certified-nonzero"
        entry.checks["presented_on"] = "stripped"
    entries.append(entry)

    # 2. quasi-homogeneous transform
    if in_m2:
        verdict_qh, monomial_form = ws.quasi_homogeneous()
        hyp = {"conductor_in_m2": True,
               "transform_monomial_form": list(monomial_form)
               if monomial_form else None}
        verdict = "applies" if verdict_qh == "yes" else "inconclusive"
        entry = TheoremEntry("quasi-homogeneous-transform", hyp, verdict)
        if verdict == "applies":
            pullback_certificate(entry)
        entries.append(entry)
    else:
        entries.append(TheoremEntry(
            "quasi-homogeneous-transform",
            {"conductor_in_m2": False}, "fails",
            note="transform construction needs the conductor inside m^2"))

    # 3. m^4 in (conductor, x1) with n(n-3) >= 2s
    pc4 = ring.power_containment(4)
    hyp = {"conductor_in_m2": in_m2,
           "m4_in_x1_conductor": pc4["in_x1_conductor"],
           "n(n-3)": n * (n - 3), "2s": 2 * s}
    ok = in_m2 and pc4["in_x1_conductor"] and n * (n - 3) >= 2 * s
    entry = TheoremEntry("m4-in-conductor-plus-x1", hyp,
                         "applies" if ok else "fails")
    if ok:
        pullback_certificate(entry)
    entries.append(entry)

    # 4. m^5 in (conductor, x1) with the type bound
    pc5 = ring.power_containment(5)
    bound = Q(n * n - 3 * n - 2 * n * s, 2)
    hyp = {"conductor_in_m2": in_m2,
           "m5_in_x1_conductor": pc5["in_x1_conductor"],
           "type": cm, "type_bound": str(bound)}
    ok = in_m2 and pc5["in_x1_conductor"] and cm <= bound
    entry = TheoremEntry("m5-with-type-bound", hyp,
                         "applies" if ok else "fails")
    if ok:
        pullback_certificate(entry)
    entries.append(entry)

    # 5. Gorenstein with m^6 in (x1), edim >= 6
    pc6 = ring.power_containment(6)
    hyp = {"gorenstein": cm == 1, "edim": n, "m6_in_x1": pc6["in_x1"]}
    ok = cm == 1 and n >= 6 and pc6["in_x1"]
    entry = TheoremEntry("gorenstein-m6-in-x1", hyp,
                         "applies" if ok else "fails")
    if ok:
        if in_m2:
            pullback_certificate(entry)
        else:
            entry.note = "covered by the conductor-not-in-m2 certificate"
            entry.certificate = entries[0].certificate
    entries.append(entry)

    maximal = (s == cm)
    certified = any(
        e.certificate is not None and
        (e.checks.get("nonzero_mod_m2") or
         e.checks.get("nonzero_in_transform_module"))
        for e in entries)
    invariants = {
        "edim": n, "conductor": c, "reduced_type": s, "cm_type": cm,
        "conductor_in_m2": in_m2,
        "power_containments": {
            "m4_in_x1_conductor": pc4["in_x1_conductor"],
            "m5_in_x1_conductor": pc5["in_x1_conductor"],
            "m6_in_x1": pc6["in_x1"],
        },
    }
    return TheoremReport(entries=entries, maximal_reduced_type=maximal,
                         invariants=invariants, torsion_certified=certified)
