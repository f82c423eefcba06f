import pytest

from curvetorsion.curve import analyze
from curvetorsion.errors import ConductorNotInMSquared
from curvetorsion.implicitize import stable_relations
from curvetorsion.series import TruncatedSeries, parse_series
from curvetorsion.transform import (build_transform, conductor_in_m_squared,
                                    transform_presentation,
                                    verify_transform_properties)

S = TruncatedSeries


def curve(*texts):
    return analyze([parse_series(t) for t in texts])


class TestBuild:
    def test_4_11_17(self):
        R = curve("t^4", "t^11", "t^17")
        tr = build_transform(R)
        assert tr.b_exponents == (18,)
        assert tr.s == 1
        assert [g.order() for g in tr.ring_view.generators] == [4, 11, 17, 18]
        assert tr.ring_view.n == 4

    def test_quasihomogeneous_example(self):
        R = curve("t^5", "t^8+t^11", "t^9+t^11", "t^12+t^11")
        tr = build_transform(R)
        assert tr.b_exponents == (12,)
        assert tr.ring_view.n == 5
        assert [g.order() for g in tr.ring_view.generators] == [5, 8, 9, 11, 12]
        assert tr.ring_view.conductor == 13 - 5

    def test_789(self):
        R = curve("t^7", "t^8", "t^9")
        tr = build_transform(R)
        assert tr.b_exponents == (19, 20)
        assert tr.s == 2

    def test_rejects_conductor_outside_m2(self):
        R = curve("t^3", "t^4", "t^5")
        assert not conductor_in_m_squared(R)
        with pytest.raises(ConductorNotInMSquared):
            build_transform(R)

    def test_monomializes_base_if_needed(self):
        R = curve("t^10+t^11", "t^11+t^16", "t^12+t^16", "t^13+t^16")
        tr = build_transform(R)
        g1 = tr.base.generators[0]
        assert len(g1.items()) == 1 and g1.order() == 10

    def test_decompose(self):
        R = curve("t^7", "t^8", "t^9")
        tr = build_transform(R)
        f = tr.t_series(1) * 5 + R.generators[0] * 2 \
            - tr.t_series(2) * 3
        r_part, tc = tr.decompose(f)
        assert tc == {1: 5, 2: -3}
        assert r_part == R.generators[0].truncated(r_part.precision) * 2


class TestPresentation:
    def test_4_11_17_witnesses(self):
        R = curve("t^4", "t^11", "t^17")
        tr = transform_presentation(build_transform(R),
                                    stable_relations(R))
        # X1*T1 = t^22 = (t^11)^2
        w = tr.g_witnesses[(1, 1)]
        assert {m for m, _ in w.items()} == {(0, 2, 0)}
        for (i, j), wit in tr.g_witnesses.items():
            assert wit.min_degree() >= 2
            val = wit.evaluate(R.generators)
            assert val.order() is None or val.order() >= R.conductor
        for _, wit in tr.h_witnesses.items():
            assert wit.min_degree() >= 2
            val = wit.evaluate(R.generators)
            assert val.order() is None or val.order() >= R.conductor

    def test_789_h11_witness(self):
        R = curve("t^7", "t^8", "t^9")
        tr = transform_presentation(build_transform(R), stable_relations(R))
        w = tr.h_witnesses[(1, 1)]  # T1^2 = t^38
        assert w.evaluate(R.generators) == \
            S.monomial(38, 1, R.precision)
        assert w.total_degree() >= 2

    def test_extended_matrix_structure(self):
        R = curve("t^7", "t^8", "t^9")
        tr = transform_presentation(build_transform(R), stable_relations(R))
        jp = tr.presentation
        n, s = tr.n, tr.s
        assert jp.ambient == n + s
        # a column for X_i*T_j - g_ij has x_i in the T_j row
        col = jp.columns[tr.column_index[("xt", 2, 1)]]
        assert col[n + 1 - 1] == R.generators[2 - 1].truncated(
            col[n].precision)
        # the diagonal T_k^2 - h_kk column has 2*T_k in the T_k row
        col = jp.columns[tr.column_index[("tt", 2, 2)]]
        assert col[n + 2 - 1] == tr.t_series(2) * 2
        # base relations contribute nothing to the T rows
        for k in range(len(stable_relations(R).relations)):
            col = jp.columns[tr.column_index[("base", k)]]
            for row in range(n, n + s):
                assert col[row].is_zero()

    def test_no_linear_terms(self):
        R = curve("t^4", "t^11", "t^17")
        tr = transform_presentation(build_transform(R), stable_relations(R))
        for rel in tr.relations:
            assert rel.min_degree() >= 2


class TestProperties:
    @pytest.mark.parametrize("texts,c_s", [
        (("t^4", "t^11", "t^17"), 15),
        (("t^5", "t^8+t^11", "t^9+t^11", "t^12+t^11"), 8),
        (("t^7", "t^8", "t^9"), 14),
    ])
    def test_lemma_clauses(self, texts, c_s):
        R = curve(*texts)
        tr = build_transform(R)
        report = verify_transform_properties(tr)
        assert all(report.values()), report
        assert tr.ring_view.conductor == c_s

    def test_s_equals_quotient_dimension(self):
        R = curve("t^7", "t^8", "t^9")
        tr = build_transform(R)
        rep = verify_transform_properties(tr)
        assert rep["quotient_dimension"]
        assert tr.s == 2
