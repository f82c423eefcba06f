"""The transform ring S = R[c/x1]: conductor divided by a minimal reduction.

When the conductor sits inside m^2, dividing it by the smallest-order
generator drops the conductor exponent by a_1 and adjoins s new monomial
generators t^{b_1}, ..., t^{b_s}: the gap exponents in [c - a_1, c - 1].
S is materialized both as a plain curve ring (so every staircase-based
invariant applies unchanged) and through a block presentation (x's first,
T's last) whose relations  X_i T_j - g_ij  and  T_k T_l - h_kl  carry
witnesses with no constant or linear part evaluating into the conductor.
"""

from dataclasses import dataclass, field

from .curve import analyze
from .differentials import JacobianPresentation
from .errors import ConductorNotInMSquared, WitnessNotInConductor
from .polys import Poly
from .series import TruncatedSeries


def conductor_in_m_squared(ring):
    """The conductor lies in m^2 iff no generator valuation reaches it."""
    return max(ring.exponents) < ring.conductor


@dataclass
class TransformRing:
    base: object                    # CurveRing, monomialized in position 1
    ring_view: object               # CurveRing of S (sorted generators)
    b_exponents: tuple
    block_names: tuple              # ("dx1", ..., "dxn", "dT1", ..., "dTs")
    variable_names: tuple           # ("X1", ..., "Xn", "T1", ..., "Ts")
    relations: list = None          # block relations once presented
    g_witnesses: dict = None        # (i, j) -> Poly in X1..Xn   (1-based)
    h_witnesses: dict = None        # (k, l) -> Poly, k <= l
    column_index: dict = None       # relation kind -> column position
    presentation: object = None     # JacobianPresentation of the S module

    @property
    def n(self):
        return self.base.n

    @property
    def s(self):
        return len(self.b_exponents)

    @property
    def ambient(self):
        return self.n + self.s

    def block_generators(self, precision=None):
        P = precision or self.base.precision
        gens = self.base.generator_series(P)
        gens += [TruncatedSeries.monomial(b, 1, P) for b in self.b_exponents]
        return gens

    def t_series(self, j, precision=None):
        P = precision or self.base.precision
        return TruncatedSeries.monomial(self.b_exponents[j - 1], 1, P)

    def decompose(self, series):
        """Split an element of S as (element of R, k-linear part in the T's).

        Returns (r_series, {l: coefficient}) with l 1-based; exact modulo
        the working precision.  The splitting is unique because the b's are
        gaps of R.
        """
        R = self.base
        P = min(R.precision,
                series.precision if series.precision is not None
                else R.precision)
        b_pos = {b: l + 1 for l, b in enumerate(self.b_exponents)}
        work = {e: v for e, v in series.items() if e < P}
        tcoeffs = {}
        while work:
            v = min(work)
            el = R.staircase.get(v)
            if el is not None:
                c = work[v]
                for e, cc in el.coeffs.items():
                    w = work.get(e)
                    nv = (w if w is not None else 0) - c * cc
                    if nv:
                        work[e] = nv
                    else:
                        work.pop(e, None)
            elif v in b_pos:
                tcoeffs[b_pos[v]] = work.pop(v)
            else:
                raise ValueError(
                    "series has a component of valuation %d outside S" % v)
        r_part = series
        for l, c in tcoeffs.items():
            r_part = r_part - self.t_series(l, P) * c
        return r_part.truncated(P), tcoeffs

    def to_sorted_order(self, entries):
        """Permute a block-ordered vector into the sorted-generator order
        of the ring view (needed by ring-level certificates)."""
        return tuple(entries[i] for i in self._block_of_sorted)

    def __repr__(self):
        return "TransformRing(b=%s over %r)" % (list(self.b_exponents),
                                                self.base)


def build_transform(ring):
    """Construct S = R[c/x1]; requires the conductor inside m^2.

    The input is monomialized in position 1 first when necessary.  The
    returned TransformRing has its ring view analyzed (so edim S = n + s is
    verified by the minimality check) and the block bookkeeping prepared;
    call transform_presentation() for the relations and the presentation
    of the differential module.
    """
    if not conductor_in_m_squared(ring):
        raise ConductorNotInMSquared(
            "a generator valuation (%d) reaches the conductor %d; the "
            "torsion is already nonzero by the monomial-pair argument"
            % (max(ring.exponents), ring.conductor))
    base = ring
    g1 = base.generators[0]
    if len(g1.items()) != 1 or g1.leading_coefficient() != 1:
        base = base.monomialized(1)
    profile = base.profile
    b_list = profile.reduced_type_exponents
    assert b_list, "conductor in m^2 forces at least one gap in the window"

    base_source = base._source

    def view_source(P):
        gens = list(base_source(P))
        gens += [TruncatedSeries.monomial(b, 1, P) for b in b_list]
        return gens

    view = analyze(view_source, name=(base.name or "R") + "[c/x1]")
    n, s = base.n, len(b_list)
    if view.n != n + s:
        raise AssertionError("transform embedding dimension %d != %d"
                             % (view.n, n + s))
    # the value semigroup only grows by the adjoined gaps, and the
    # conductor drops by exactly a1
    if view.conductor != base.conductor - base.multiplicity:
        raise AssertionError(
            "conductor of S is %d, expected %d - %d"
            % (view.conductor, base.conductor, base.multiplicity))

    names = tuple(["dx%d" % (i + 1) for i in range(n)] +
                  ["dT%d" % (j + 1) for j in range(s)])
    varnames = tuple(["X%d" % (i + 1) for i in range(n)] +
                     ["T%d" % (j + 1) for j in range(s)])
    tr = TransformRing(base=base, ring_view=view, b_exponents=tuple(b_list),
                       block_names=names, variable_names=varnames)
    # permutation between block order and the view's sorted order (analyze
    # sorts stably by (order, position), mirrored here)
    block_orders = [g.order() for g in tr.block_generators()]
    tr._block_of_sorted = sorted(range(n + s),
                                 key=lambda i: (block_orders[i], i))
    return tr


def transform_presentation(tr, relation_set):
    """Relations of S in the block variables, with conductor witnesses.

    relation_set: the defining relations of the base ring R.  Every product
    x_i T_j and T_k T_l is expressed by a witness with no constant or linear
    part; its evaluation must reach the conductor of R (checked).
    """
    R = tr.base
    n, s = tr.n, tr.s
    nv = n + s
    relations = [f.lifted(nv) for f in relation_set.relations]
    column_index = {("base", k): k for k in range(len(relations))}
    g_wit = {}
    h_wit = {}
    c = R.conductor
    for i in range(1, n + 1):
        for j in range(1, s + 1):
            prod = R.generators[i - 1] * tr.t_series(j)
            w = R.membership_witness(prod, constrain_m2=True)
            value = w.evaluate(R.generators)
            if value.order() is not None and value.order() < c:
                raise WitnessNotInConductor(
                    "witness for x%d*T%d evaluates at order %d < %d"
                    % (i, j, value.order(), c))
            g_wit[(i, j)] = w
            mono = [0] * nv
            mono[i - 1] += 1
            mono[n + j - 1] += 1
            column_index[("xt", i, j)] = len(relations)
            relations.append(Poly.monomial(tuple(mono)) - w.lifted(nv))
    for k in range(1, s + 1):
        for l in range(k, s + 1):
            prod = tr.t_series(k) * tr.t_series(l)
            w = R.membership_witness(prod, constrain_m2=True)
            value = w.evaluate(R.generators)
            if value.order() is not None and value.order() < c:
                raise WitnessNotInConductor(
                    "witness for T%d*T%d evaluates at order %d < %d"
                    % (k, l, value.order(), c))
            h_wit[(k, l)] = w
            mono = [0] * nv
            mono[n + k - 1] += 1
            mono[n + l - 1] += 1
            column_index[("tt", k, l)] = len(relations)
            relations.append(Poly.monomial(tuple(mono)) - w.lifted(nv))

    tr.relations = relations
    tr.g_witnesses = g_wit
    tr.h_witnesses = h_wit
    tr.column_index = column_index
    tr.presentation = JacobianPresentation(
        relations, tr.block_generators, tr.ring_view, names=tr.block_names)
    return tr


def verify_transform_properties(tr):
    """Check the structural facts about S = R[c/x1], clause by clause."""
    R = tr.base
    c = R.conductor
    a1 = R.multiplicity
    window = range(c - a1, c)
    report = {}
    # (1) c/x1 lands inside the normalization (no negative valuations)
    report["fractions_integral"] = c - a1 >= 0
    # (2) m_R * (c/x1) is inside the conductor
    ok = True
    for g in R.generators:
        for w in window:
            prod = g * TruncatedSeries.monomial(w, 1, R.precision)
            o = prod.order()
            if o is not None and o < c:
                ok = False
    report["m_times_fractions_in_conductor"] = ok
    # (3) products of two fractions are inside the conductor
    ok = True
    for w1 in window:
        for w2 in window:
            if w1 + w2 < c:
                ok = False
    report["fraction_products_in_conductor"] = ok
    # (4) the conductor exponent drops by exactly a1
    report["conductor_drop"] = tr.ring_view.conductor == c - a1
    # (5) dim_k S/R equals the reduced type
    P = min(R.precision, tr.ring_view.precision)
    occ_R = {v for v in R.profile.occupied if v < P}
    occ_S = {v for v in tr.ring_view.profile.occupied if v < P}
    report["quotient_dimension"] = (
        occ_R <= occ_S and len(occ_S - occ_R) == tr.s and
        occ_S - occ_R == set(tr.b_exponents))
    # embedding dimension of S
    report["embedding_dimension"] = tr.ring_view.n == tr.n + tr.s
    return report
