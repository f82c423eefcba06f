"""Defining relations of a curve ring, by linear algebra on truncations.

The kernel of  k[[X_1..X_n]] -> R,  X_i -> g_i  is recovered degree by
degree: monomial evaluations  g^mu  are fed into a growing echelon of
t-coefficient vectors; every linear dependence is a relation.  Minimal
generators are extracted by quotienting out multiples of the relations
already found (an echelon over monomial coefficient space).

Counts are degree-bounded: a relation set carries a completeness flag,
"stable" when the top two degrees contributed nothing new, else "at-bound".
Every found relation is re-checked against the parametrization at doubled
precision; a visible residue raises PrecisionExhausted.
"""

from dataclasses import dataclass, field

from .errors import PrecisionExhausted
from .linalg import Echelon, primitive_integer
from .polys import Poly, monomials_of_degree
from .rationals import Q, ZERO
from .series import TruncatedSeries


@dataclass
class RelationSet:
    nvars: int
    relations: list            # Poly, in discovery order
    degree_bound: int
    completeness: str          # "stable" | "at-bound"
    new_by_degree: dict = field(default_factory=dict)

    @property
    def count(self):
        return len(self.relations)

    def minimal_generator_count(self):
        """(mu(I) up to the bound, deviation mu - n + 1, is_lower_bound)."""
        mu = len(self.relations)
        return {
            "mu": mu,
            "deviation": mu - self.nvars + 1,
            "lower_bound_only": self.completeness != "stable",
        }

    def format_relations(self, names=None):
        return [p.format(names) for p in self.relations]


class _RelationEngine:
    """Incremental degree-by-degree relation finder over one ring."""

    def __init__(self, ring):
        self.ring = ring
        self.n = ring.n
        self.N = ring.precision
        self.eval_ech = Echelon(track=True)   # t-coefficient space
        self.span_ech = Echelon(track=False)  # monomial space: found + m*I
        self.found = []                       # (degree, Poly)
        self.new_by_degree = {}
        self.degree = 1
        self._mono_ids = {}
        self._id_monos = []
        self._eval_cache = {(0,) * self.n: {0: Q(1)}}
        for i, g in enumerate(ring.generators):
            mono = tuple(1 if j == i else 0 for j in range(self.n))
            self._eval_cache[mono] = {e: v for e, v in g.items()
                                      if e < self.N}

    def _mono_id(self, mono):
        mid = self._mono_ids.get(mono)
        if mid is None:
            mid = len(self._id_monos)
            self._mono_ids[mono] = mid
            self._id_monos.append(mono)
        return mid

    def _evaluate(self, mono):
        cached = self._eval_cache.get(mono)
        if cached is not None:
            return cached
        i = next(k for k, e in enumerate(mono) if e > 0)
        parent = tuple(e - 1 if k == i else e for k, e in enumerate(mono))
        base = self._evaluate(parent)
        gen = self._eval_cache[tuple(1 if j == i else 0
                                     for j in range(self.n))]
        prod = {}
        for e1, c1 in base.items():
            for e2, c2 in gen.items():
                e = e1 + e2
                if e >= self.N:
                    continue
                w = prod.get(e, ZERO) + c1 * c2
                if w:
                    prod[e] = w
                else:
                    del prod[e]
        self._eval_cache[mono] = prod
        return prod

    def _poly_to_vec(self, poly):
        return {self._mono_id(m): c for m, c in poly.items()}

    def _vec_to_poly(self, vec):
        return Poly(self.n, {self._id_monos[i]: c for i, c in vec.items()})

    def advance(self):
        """Process the next total degree; returns the number of new minimal
        generators found there."""
        d = self.degree + 1
        self.degree = d
        # multiples of known relations reaching total degree d
        for deg_f, f in self.found:
            k = d - deg_f
            if k < 1:
                continue
            for nu in monomials_of_degree(self.n, k):
                self.span_ech.insert(self._poly_to_vec(f.times_monomial(nu)))
        new = 0
        for mono in monomials_of_degree(self.n, d):
            mid = self._mono_id(mono)
            col = self._evaluate(mono)
            residue, comb = self.eval_ech.reduce(col)
            if residue:
                self.eval_ech.insert(col, label=mid)
                continue
            vec = dict(comb)
            vec[mid] = Q(-1)
            rem, _ = self.span_ech.reduce(vec)
            if not rem:
                continue
            rem = primitive_integer(rem)
            poly = self._vec_to_poly(rem)
            self._recheck(poly)
            self.found.append((poly.total_degree(), poly))
            self.span_ech.insert(rem)
            new += 1
        self.new_by_degree[d] = new
        return new

    def _recheck(self, poly):
        """Confirm the relation at doubled precision; a candidate that only
        vanished by truncation is a precision failure, never accepted."""
        P2 = 2 * self.N
        gens = self.ring.generator_series(P2)
        value = poly.evaluate(gens)
        if not value.truncated(P2).is_zero():
            raise PrecisionExhausted(
                "candidate relation %s has order %s; working precision %d "
                "is too coarse" % (poly.format(), value.order(), self.N))

    def result(self):
        d = self.degree
        quiet = (d >= 3 and self.new_by_degree.get(d, 0) == 0
                 and self.new_by_degree.get(d - 1, 0) == 0)
        return RelationSet(
            nvars=self.n,
            relations=[f for _, f in self.found],
            degree_bound=d,
            completeness="stable" if quiet else "at-bound",
            new_by_degree=dict(self.new_by_degree),
        )


def _precision_for_degree(ring, degree):
    """Degree-d monomials evaluate at order up to d * a_n; the working
    precision must see all of them (plus conductor-sized headroom) or empty
    evaluation columns would masquerade as relations."""
    return degree * max(ring.exponents) + ring.conductor + 8


def relations_up_to_degree(ring, degree_bound):
    """Minimal generators of the defining ideal found up to a total degree."""
    if degree_bound < 2:
        raise ValueError("degree bound must be >= 2")
    precision = max(ring.precision, _precision_for_degree(ring, degree_bound))
    for _ in range(3):
        engine = _RelationEngine(ring.at_precision(precision))
        try:
            while engine.degree < degree_bound:
                engine.advance()
            return engine.result()
        except PrecisionExhausted:
            precision *= 2
    raise PrecisionExhausted(
        "relations did not separate below precision %d" % precision)


def stable_relations(ring, degree_cap=None):
    """Iterate the degree until two consecutive degrees add no minimal
    generator; capped (relations presenting the differential module are
    detected once products fall into the conductor, so the cap scales with
    the conductor exponent)."""
    if degree_cap is None:
        degree_cap = max(ring.conductor, 8)
    target = min(degree_cap, 5)
    precision_bump = 1
    while True:
        precision = precision_bump * max(
            ring.precision, _precision_for_degree(ring, target))
        engine = _RelationEngine(ring.at_precision(precision))
        quiet = 0
        try:
            while engine.degree < target:
                new = engine.advance()
                quiet = quiet + 1 if new == 0 else 0
                # a height n-1 ideal needs at least n-1 generators, so the
                # quiet rule only counts once that many have been seen
                if quiet >= 2 and engine.degree >= 3 and \
                        len(engine.found) >= ring.n - 1:
                    return engine.result()
        except PrecisionExhausted:
            if precision_bump >= 4:
                raise
            precision_bump *= 2
            continue
        if target >= degree_cap:
            return engine.result()
        target = min(degree_cap, target + 2)


def extend_relations(ring, relation_set, extra_degrees=1):
    """Recompute with a higher degree bound (relations are never removed)."""
    return relations_up_to_degree(ring,
                                  relation_set.degree_bound + extra_degrees)
