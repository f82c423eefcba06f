import itertools
import random

import pytest

from curvetorsion.curve import analyze
from curvetorsion.implicitize import (relations_up_to_degree, stable_relations)
from curvetorsion.polys import Poly, monomials_of_degree
from curvetorsion.rationals import Q
from curvetorsion.series import TruncatedSeries, parse_series


def curve(*texts):
    return analyze([parse_series(t) for t in texts])


def evaluate_is_zero(poly, ring, precision=None):
    P = precision or ring.precision
    val = poly.evaluate(ring.generator_series(P))
    return val.truncated(P).is_zero()


# --- independent oracle: binomial relations of a monomial curve -----------
# every relation of k[[t^a1,...,t^an]] is spanned by binomials X^u - X^v
# with a.u == a.v; enumerate them degree by degree from the exponent lattice.

def toric_binomials_up_to(exponents, degree):
    n = len(exponents)
    by_value = {}
    for d in range(2, degree + 1):
        for mono in monomials_of_degree(n, d):
            val = sum(e * a for e, a in zip(mono, exponents))
            by_value.setdefault(val, []).append(mono)
    binomials = []
    for val, monos in sorted(by_value.items()):
        base = monos[0]
        for other in monos[1:]:
            binomials.append(Poly(n, {base: 1, other: -1}))
    return binomials


def span_dimension(polys, degree):
    """Rank of the coefficient matrix of the polynomials of degree <= d."""
    from curvetorsion.linalg import Echelon
    ech = Echelon()
    ids = {}

    def vec(p):
        out = {}
        for m, c in p.items():
            out[ids.setdefault(m, len(ids))] = c
        return out

    for p in polys:
        if p.total_degree() <= degree:
            ech.insert(vec(p))
    return ech.rank


def with_multiples(polys, degree):
    """The polynomials together with all monomial multiples up to degree."""
    out = []
    for p in polys:
        d0 = p.total_degree()
        for k in range(degree - d0 + 1):
            for nu in monomials_of_degree(p.nvars, k):
                out.append(p.times_monomial(nu))
    return out


class TestPaperCurves:
    def test_345_has_three_generators(self):
        R = curve("t^3", "t^4", "t^5")
        rs = stable_relations(R)
        assert rs.count == 3
        assert rs.completeness == "stable"
        info = rs.minimal_generator_count()
        assert info["mu"] == 3 and info["deviation"] == 1

    def test_345_matches_known_ideal(self):
        R = curve("t^3", "t^4", "t^5")
        rs = stable_relations(R)
        # Y^2 - XZ, Z^2 - X^2 Y, X^3 - YZ up to sign and combination
        known = [
            Poly(3, {(0, 2, 0): 1, (1, 0, 1): -1}),
            Poly(3, {(0, 0, 2): 1, (2, 1, 0): -1}),
            Poly(3, {(3, 0, 0): 1, (0, 1, 1): -1}),
        ]
        for p in known:
            assert evaluate_is_zero(p, R)
        # spans agree degree by degree
        for d in (2, 3):
            assert span_dimension(with_multiples(rs.relations, d), d) == \
                span_dimension(with_multiples(known, d), d)

    def test_cusp(self):
        R = curve("t^2", "t^3")
        rs = stable_relations(R)
        assert rs.count == 1
        assert rs.completeness == "stable"
        info = rs.minimal_generator_count()
        assert info["mu"] == 1 and info["deviation"] == 0
        p = rs.relations[0]
        # X1^3 - X2^2 up to sign
        assert {m for m, _ in p.items()} == {(3, 0), (0, 2)}

    def test_quasihomogeneous_example(self):
        R = curve("t^5", "t^8+t^11", "t^9+t^11", "t^12+t^11")
        rs = stable_relations(R)
        assert rs.count == 8
        assert rs.completeness == "stable"
        info = rs.minimal_generator_count()
        assert info["mu"] == 8 and info["deviation"] == 5

    def test_every_relation_evaluates_to_zero_at_double_precision(self):
        R = curve("t^5", "t^8+t^11", "t^9+t^11", "t^12+t^11")
        rs = stable_relations(R)
        for p in rs.relations:
            assert p.min_degree() >= 2
            assert evaluate_is_zero(p, R, 2 * R.precision)


class TestAgainstToricOracle:
    @pytest.mark.parametrize("exponents", [
        (3, 4, 5), (2, 3), (4, 5, 6), (3, 5, 7), (4, 6, 7), (5, 6, 9),
        (4, 7, 9), (6, 7, 8, 9),
    ])
    def test_span_matches(self, exponents):
        R = analyze([TruncatedSeries.monomial(a) for a in exponents])
        D = max(4, R.conductor // min(exponents) + 2)
        rs = relations_up_to_degree(R, D)
        oracle = toric_binomials_up_to(exponents, D)
        for d in range(2, D + 1):
            assert span_dimension(with_multiples(rs.relations, d), d) == \
                span_dimension(oracle, d), "degree %d differs" % d

    def test_monotone_in_degree(self):
        R = curve("t^3", "t^4", "t^5")
        prev = []
        for D in range(2, 7):
            rs = relations_up_to_degree(R, D)
            got = {tuple(sorted(p.items())) for p in rs.relations}
            assert got >= set(prev)
            prev = got


class TestRandomRoundTrip:
    def test_relations_vanish(self):
        rng = random.Random(43)
        pools = [(3, 4, 5), (5, 7, 9), (4, 5, 11), (5, 6, 7, 8)]
        for pool in pools:
            R = analyze([TruncatedSeries.monomial(a) for a in pool])
            rs = stable_relations(R)
            for p in rs.relations:
                assert evaluate_is_zero(p, R)
                assert p.min_degree() >= 2
