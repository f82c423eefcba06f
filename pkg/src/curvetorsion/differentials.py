"""The differential module of a curve ring: presentation, torsion, certificates.

The module of differentials is presented by the Jacobian matrix of the
defining relations, with entries evaluated along the parametrization.  Its
torsion is the kernel of the evaluation map sending dx_i to dg_i/dt, taken
modulo the column module of the presentation.

Torsion lengths are computed in a finite-dimensional truncation model:
coefficients run over the staircase basis below a cutoff M, while the
syzygy condition is imposed through exponent M + a_1 - 1.  That asymmetry
matters: requiring the syzygy only up to M - 1 lets boundary artifacts
(near-syzygies whose defect hides just beyond the window) inflate the count.
With the deeper condition every model syzygy is the truncation of a true
one once M clears the conductor, and the computed length stabilizes to the
honest value; stabilization under doubling of M is still enforced.
"""

from dataclasses import dataclass, field

from .errors import NotMonomial, RankDeficient, Unstable
from .linalg import Echelon, kernel_basis, primitive_integer
from .rationals import Q, ZERO
from .series import TruncatedSeries


# ---------------------------------------------------------------------------

@dataclass
class DifferentialVector:
    """An element of the free module over the basis dx_1..dx_n (dT_1..dT_s)."""
    entries: tuple
    names: tuple               # basis labels, e.g. ("dx1", "dx2", "dT1")
    tag: str = "torsion-candidate"
    meta: dict = field(default_factory=dict)

    def syzygy_residual(self, derivatives):
        total = TruncatedSeries.zero(None)
        for e, d in zip(self.entries, derivatives):
            total = total + e * d
        return total

    def is_syzygy(self, derivatives):
        return self.syzygy_residual(derivatives).is_zero()

    def is_zero_vector(self):
        return all(e.is_zero() for e in self.entries)

    def render(self, coefficient_texts=None):
        parts = []
        texts = coefficient_texts or [str(e) for e in self.entries]
        for text, name in zip(texts, self.names):
            if text == "0":
                continue
            parts.append("(%s)*%s" % (text, name))
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return "DifferentialVector(%s, %s)" % (self.render(), self.tag)


# ---------------------------------------------------------------------------
# Jacobian presentation

class JacobianPresentation:
    """Columns of the Jacobian of the relations, evaluated along the curve.

    `gens_source(P)` re-materializes the presentation generators at any
    precision (for R these are the ring generators; for the transform ring
    the adjoined monomials are appended), so the torsion model can deepen
    its truncation without losing exactness.
    """

    def __init__(self, relations, gens_source, coeff_ring, names=None,
                 validate=True):
        self.relations = list(relations)
        self.gens_source = gens_source
        self.coeff_ring = coeff_ring
        gens = gens_source(coeff_ring.precision)
        self.generators = gens
        self.ambient = len(gens)
        self.names = tuple(names) if names else tuple(
            "dx%d" % (i + 1) for i in range(self.ambient))
        self.columns = self._evaluate_columns(gens)
        if validate:
            self._validate(gens)

    def _evaluate_columns(self, gens):
        cols = []
        for f in self.relations:
            cols.append([f.partial(i).evaluate(gens)
                         for i in range(self.ambient)])
        return cols

    def materialize(self, precision):
        gens = self.gens_source(precision)
        return gens, self._evaluate_columns(gens)

    def _validate(self, gens):
        derivs = [g.derivative() for g in gens]
        for f, col in zip(self.relations, self.columns):
            total = TruncatedSeries.zero(None)
            for entry, d in zip(col, derivs):
                total = total + entry * d
            if not total.is_zero():
                raise AssertionError(
                    "chain rule failed for %s: residual %s"
                    % (f.format(), total))
        if self.relations:
            rank = series_matrix_rank(self.columns, self.ambient)
            if rank != self.ambient - 1:
                raise RankDeficient(
                    "Jacobian rank %d != %d; the relation set or the "
                    "precision is too small" % (rank, self.ambient - 1))
        elif self.ambient > 1:
            raise RankDeficient("no relations for a non-regular curve")


def jacobian_presentation(relation_set, ring, validate=True):
    """Presentation of the differential module of R from its relation set."""
    return JacobianPresentation(relation_set.relations,
                                ring.generator_series, ring,
                                validate=validate)


def series_matrix_rank(columns, nrows):
    """Rank over the Laurent field of a matrix of truncated series,
    by valuation-pivot fraction-free elimination."""
    work = [list(col) for col in columns]
    live_rows = list(range(nrows))
    rank = 0
    while work and live_rows:
        best = None
        for ci, col in enumerate(work):
            for r in live_rows:
                o = col[r].order()
                if o is not None and (best is None or o < best[0]):
                    best = (o, ci, r)
        if best is None:
            break
        _, ci, r = best
        pivot_col = work.pop(ci)
        pivot = pivot_col[r]
        new_work = []
        for col in work:
            c = col[r]
            if c.order() is None:
                new_work.append(col)
            else:
                new_work.append([col[k] * pivot - pivot_col[k] * c
                                 for k in range(nrows)])
        work = new_work
        live_rows.remove(r)
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# the truncation model

class TorsionModel:
    """Exact linear algebra model of the torsion at one truncation level M.

    Unknown coefficients range over the staircase elements of valuation < M;
    the syzygy condition is imposed on t-exponents < M + a_1 - 1; the image
    of the presentation columns is spanned by staircase multiples truncated
    at M.  Coordinates of a module vector are indexed e * ambient + i for
    row i, t-exponent e (exponent-major, so reduction pivots by valuation).
    """

    def __init__(self, presentation, M):
        ring = presentation.coeff_ring
        a1 = ring.multiplicity
        self.M = M
        self.condition_bound = M + a1 - 1
        precision = self.condition_bound + 2
        self.ring = ring.at_precision(max(ring.precision, precision))
        self.presentation = presentation
        gens, cols = presentation.materialize(self.ring.precision)
        self.generators = gens
        self.columns = cols
        self.ambient = presentation.ambient
        self.names = presentation.names
        self.derivatives = [g.derivative() for g in gens]
        self._deriv_dicts = [
            {e: v for e, v in d.items() if e < self.condition_bound}
            for d in self.derivatives]
        self.values = [v for v in self.ring.profile.occupied if v < M]
        self._build()

    # -- assembly --

    def _build(self):
        nv = self.ambient
        M = self.M
        stair = self.ring.staircase
        # syzygy kernel over staircase coefficients
        unknown_cols = []
        labels = []
        for v in self.values:
            bc = stair[v].coeffs
            for i, dd in enumerate(self._deriv_dicts):
                col = {}
                for e1, c1 in bc.items():
                    for e2, c2 in dd.items():
                        e = e1 + e2
                        if e >= self.condition_bound:
                            continue
                        w = col.get(e, ZERO) + c1 * c2
                        if w:
                            col[e] = w
                        else:
                            del col[e]
                unknown_cols.append(col)
                labels.append((v, i))
        kernel = kernel_basis(unknown_cols, labels=labels)

        # image of the presentation columns
        self.image = Echelon()
        col_dicts = [[{e: v for e, v in entry.items() if e < M}
                      for entry in col] for col in self.columns]
        for v in self.values:
            bc = stair[v].coeffs
            for col in col_dicts:
                vec = {}
                for i, entry in enumerate(col):
                    for e1, c1 in bc.items():
                        for e2, c2 in entry.items():
                            e = e1 + e2
                            if e >= M:
                                continue
                            key = e * nv + i
                            w = vec.get(key, ZERO) + c1 * c2
                            if w:
                                vec[key] = w
                            else:
                                del vec[key]
                if vec:
                    self.image.insert(vec)
        self.image_dim = self.image.rank

        # quotient: torsion classes
        self.quotient = Echelon(track=True)
        self.basis_coords = []
        for kv in kernel:
            coords = self._kernel_to_coords(kv)
            residue, _ = self.image.reduce(coords)
            if not residue:
                continue
            pivot, _ = self.quotient.insert(residue,
                                            label=len(self.basis_coords))
            if pivot is not None:
                self.basis_coords.append(residue)
        self.kernel_dim = len(kernel)
        self.length = self.kernel_dim - self.image_dim
        if len(self.basis_coords) != self.length:
            raise Unstable(
                "quotient dimension %d disagrees with kernel/image count %d"
                % (len(self.basis_coords), self.length))
        self._compute_annihilator()

    def _kernel_to_coords(self, kernel_vec):
        nv = self.ambient
        stair = self.ring.staircase
        coords = {}
        for (v, i), c in kernel_vec.items():
            for e, cc in stair[v].coeffs.items():
                if e >= self.M:
                    continue
                key = e * nv + i
                w = coords.get(key, ZERO) + c * cc
                if w:
                    coords[key] = w
                else:
                    del coords[key]
        return coords

    def _compute_annihilator(self):
        """dim of (0 : x1) inside the torsion classes."""
        x1 = {e: v for e, v in self.generators[0].items() if e < self.M}
        nv = self.ambient
        cols = []
        for b in self.basis_coords:
            prod = {}
            for key, c in b.items():
                e1, i = divmod(key, nv)
                for e2, c2 in x1.items():
                    e = e1 + e2
                    if e >= self.M:
                        continue
                    k = e * nv + i
                    w = prod.get(k, ZERO) + c * c2
                    if w:
                        prod[k] = w
                    else:
                        del prod[k]
            residue, _ = self.image.reduce(prod)
            residue, comb = self.quotient.reduce(residue)
            if residue:
                raise Unstable("x1-multiple left the model span; deepen M")
            cols.append(comb)
        self.annihilator_dim = len(kernel_basis(cols))
        self._ann_cols = cols

    # -- views --

    def vector_coords(self, entries):
        nv = self.ambient
        coords = {}
        for i, s in enumerate(entries):
            for e, c in s.items():
                if e < self.M:
                    coords[e * nv + i] = c
        return coords

    def coords_vector(self, coords, tag="torsion-candidate"):
        nv = self.ambient
        rows = [dict() for _ in range(nv)]
        for key, c in coords.items():
            e, i = divmod(key, nv)
            rows[i][e] = c
        entries = tuple(TruncatedSeries(r, self.M) for r in rows)
        return DifferentialVector(entries, self.names, tag)

    def is_zero_class(self, entries):
        residue, _ = self.image.reduce(self.vector_coords(entries))
        return not residue

    def class_coordinates(self, entries):
        """Coordinates against the torsion basis; None if outside the model."""
        residue, _ = self.image.reduce(self.vector_coords(entries))
        residue, comb = self.quotient.reduce(residue)
        if residue:
            return None
        return comb

    def basis_vectors(self):
        out = []
        for k, coords in enumerate(self.basis_coords):
            vec = self.coords_vector(primitive_integer(coords))
            vec.meta["index"] = k
            out.append(vec)
        return out

    def annihilator_basis_vectors(self):
        """Lifted representatives of a basis of (0 : x1) in the torsion."""
        kv = kernel_basis(self._ann_cols)
        out = []
        for combo in kv:
            coords = {}
            for k, c in combo.items():
                for key, cc in self.basis_coords[k].items():
                    w = coords.get(key, ZERO) + c * cc
                    if w:
                        coords[key] = w
                    else:
                        del coords[key]
            out.append(self.coords_vector(primitive_integer(coords)))
        return out


def torsion_submodule(presentation, start_M=None, max_doublings=4):
    """Torsion length, annihilator length and a lifted basis, stabilized.

    Runs the truncation model at M and 2M (doubling further if needed) until
    the reported lengths agree twice in a row; raises Unstable at the cap.
    """
    ring = presentation.coeff_ring
    a_top = max(g.order() for g in presentation.generators)
    if start_M is None:
        start_M = max(2 * ring.conductor + a_top, a_top + 4, 8)
    M = start_M
    history = []
    prev = TorsionModel(presentation, M)
    history.append((M, prev.length, prev.annihilator_dim))
    for _ in range(max_doublings):
        M *= 2
        cur = TorsionModel(presentation, M)
        history.append((M, cur.length, cur.annihilator_dim))
        if (prev.length, prev.annihilator_dim) == \
                (cur.length, cur.annihilator_dim):
            cur.history = tuple(history)
            return cur
        prev = cur
    raise Unstable("torsion length kept changing: %r" % (history,))


# ---------------------------------------------------------------------------
# nonzeroness certificates modulo m^2

class ResidueCoordinatizer:
    """Coordinates of ring elements in R/m^2 = k + <generators mod m^2>."""

    def __init__(self, ring):
        self.ring = ring
        self.n = ring.n
        self._ech = Echelon(track=True)
        m2 = ring._m2_staircase()
        for v in sorted(m2):
            self._ech.insert(dict(m2[v].coeffs), label=("m2", v))
        self._ech.insert({0: Q(1)}, label=("u", 0))
        for j, g in enumerate(ring.generators):
            self._ech.insert({e: c for e, c in g.items()
                              if e < ring.precision}, label=("u", j + 1))

    def coords(self, series):
        P = self.ring.precision
        if series.precision is not None:
            P = min(P, series.precision)
        vec = {e: c for e, c in series.items() if e < P}
        residue, comb = self._ech.reduce(vec)
        if residue:
            raise ValueError("series is not in the ring (order %d residue)"
                             % min(residue))
        return {lab[1]: c for lab, c in comb.items() if lab[0] == "u"}


def certify_nonzero_mod_m2(vector, ring, relations=None):
    """True when the vector provably survives in the differential module of
    R/m^2 (hence is nonzero upstairs); False is inconclusive, never "zero".

    The presentation of the module over R/m^2 is spanned by the symmetrized
    columns  x_a dx_b + x_b dx_a  (differentials of the m^2 generators)
    together with the Jacobian columns reduced mod m^2 (redundant but kept
    when relations are supplied).
    """
    n = ring.n
    if len(vector.entries) != n:
        raise ValueError("vector does not match the ring")
    coord = ResidueCoordinatizer(ring)
    width = n + 1

    def flatten(entry_coords):
        out = {}
        for i, cs in enumerate(entry_coords):
            for j, c in cs.items():
                if c:
                    out[i * width + j] = c
        return out

    span = Echelon()
    zero = [dict() for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            col = [dict(z) for z in zero]
            ga = coord.coords(ring.generators[a])
            gb = coord.coords(ring.generators[b])
            for j, c in gb.items():
                col[a][j] = col[a].get(j, ZERO) + c
            for j, c in ga.items():
                col[b][j] = col[b].get(j, ZERO) + c
            span.insert(flatten(col))
    if relations is not None:
        for f in relations:
            col = []
            for i in range(n):
                col.append(coord.coords(f.partial(i).evaluate(ring.generators)))
            span.insert(flatten(col))
    try:
        target = flatten([coord.coords(e) for e in vector.entries])
    except ValueError:
        return False
    if not target:
        return False
    residue, _ = span.reduce(target)
    return bool(residue)


def monomial_pair_torsion(ring, i, j, relations=None):
    """The torsion element  a_j x_j dx_i - a_i x_i dx_j  for a pair of pure
    monomial generators (1-based indices)."""
    if i == j:
        raise ValueError("indices must differ (the pair element would be 0)")
    i0, j0 = i - 1, j - 1
    gens = ring.generators
    for k in (i0, j0):
        if not 0 <= k < ring.n:
            raise ValueError("generator index out of range")
        g = gens[k]
        if len(g.items()) != 1 or g.leading_coefficient() != 1:
            raise NotMonomial("generator %d is %s, not a pure monomial"
                              % (k + 1, g))
    a = ring.exponents
    entries = [TruncatedSeries.zero(ring.precision) for _ in range(ring.n)]
    entries[i0] = gens[j0] * a[j0]
    entries[j0] = gens[i0] * (-a[i0])
    vec = DifferentialVector(tuple(entries),
                             tuple("dx%d" % (k + 1) for k in range(ring.n)))
    derivs = [g.derivative() for g in gens]
    if not vec.is_syzygy(derivs):
        raise AssertionError("monomial pair element is not a syzygy")
    if certify_nonzero_mod_m2(vec, ring, relations):
        vec.tag = "certified-nonzero"
    return vec
