import random

import pytest

from curvetorsion.errors import BadConstantTerm, NotAUnit, OrderZeroInner
from curvetorsion.rationals import rat
from curvetorsion.series import TruncatedSeries, parse_series

S = TruncatedSeries


def t(e, c=1, N=None):
    return S.monomial(e, c, N)


def rand_series(rng, N, unit=False, max_terms=6):
    coeffs = {}
    if unit:
        coeffs[0] = rat(rng.randint(1, 5))
    for _ in range(rng.randint(1, max_terms)):
        coeffs[rng.randint(0 if not unit else 1, N - 1)] = rat(
            rng.randint(-8, 8), rng.randint(1, 4))
    return S(coeffs, N)


class TestOrder:
    def test_basic(self):
        f = t(3, N=10) + t(5, N=10)
        assert f.order() == 3

    def test_zero_is_indeterminate(self):
        assert S.zero(10).order() is None

    def test_generator_with_tail(self):
        assert (t(4) + t(5)).order() == 4

    def test_additive_when_visible(self):
        rng = random.Random(7)
        for _ in range(200):
            f = rand_series(rng, 14)
            g = rand_series(rng, 14)
            fo, go = f.order(), g.order()
            if fo is None or go is None or fo + go >= 14:
                continue
            assert (f * g).order() == fo + go


class TestInvertUnit:
    def test_identity(self):
        one = S.one(8)
        assert one.invert_unit() == one

    def test_geometric(self):
        f = S({0: 1, 1: 1}, 4)
        assert f.invert_unit() == S({0: 1, 1: -1, 2: 1, 3: -1}, 4)
        assert (f * f.invert_unit()) == S.one(4)

    def test_two_plus_t(self):
        f = S({0: 2, 1: 1}, 2)
        g = f.invert_unit()
        assert g == S({0: rat(1, 2), 1: rat(-1, 4)}, 2)
        assert f * g == S.one(2)

    def test_not_a_unit(self):
        with pytest.raises(NotAUnit):
            t(1, N=5).invert_unit()
        with pytest.raises(NotAUnit):
            S.zero(5).invert_unit()

    def test_random_round_trip(self):
        rng = random.Random(11)
        for _ in range(120):
            f = rand_series(rng, 12, unit=True)
            assert f * f.invert_unit() == S.one(12)


class TestNthRoot:
    def test_root_of_one(self):
        assert S.one(9).nth_root_unit(5) == S.one(9)

    def test_sqrt_one_plus_t(self):
        r = S({0: 1, 1: 1}, 3).nth_root_unit(2)
        assert r == S({0: 1, 1: rat(1, 2), 2: rat(-1, 8)}, 3)
        assert r * r == S({0: 1, 1: 1}, 3)

    def test_fourth_root(self):
        r = S({0: 1, 1: 1}, 2).nth_root_unit(4)
        assert r == S({0: 1, 1: rat(1, 4)}, 2)
        assert r ** 4 == S({0: 1, 1: 1}, 2)

    def test_bad_constant(self):
        with pytest.raises(BadConstantTerm):
            S({0: 2}, 5).nth_root_unit(3)

    def test_random_round_trip(self):
        rng = random.Random(13)
        for _ in range(120):
            f = rand_series(rng, 10, unit=True)
            f = f * f.coefficient(0) ** -1  # rescale constant term to 1
            n = rng.randint(1, 7)
            assert f.nth_root_unit(n) ** n == f


class TestSubstitute:
    def test_square_into_shift(self):
        f = t(2, N=4)
        g = S({1: 1, 2: 1}, 4)
        assert f.substitute(g) == S({2: 1, 3: 2}, 4)

    def test_identity(self):
        f = t(1, N=6)
        assert f.substitute(t(1, N=6)) == f

    def test_constant(self):
        one = S.one(5)
        assert one.substitute(t(3, N=5)) == one

    def test_rejects_unit_inner(self):
        with pytest.raises(OrderZeroInner):
            t(1, N=5).substitute(S.one(5))


class TestDerivative:
    def test_power_rule(self):
        assert t(3, N=9).derivative() == t(2, 3, N=8)

    def test_generator(self):
        f = t(4) + t(5)
        assert f.derivative() == S({3: 4, 4: 5})

    def test_constant(self):
        assert S.one(5).derivative().is_zero()

    def test_linear_and_leibniz(self):
        rng = random.Random(17)
        for _ in range(120):
            f = rand_series(rng, 12)
            g = rand_series(rng, 12)
            assert (f + g).derivative() == f.derivative() + g.derivative()
            lhs = (f * g).derivative()
            rhs = f.derivative() * g + f * g.derivative()
            assert lhs == rhs


class TestReversion:
    def test_round_trip(self):
        rng = random.Random(19)
        ident = t(1, N=12)
        for _ in range(40):
            coeffs = {1: rat(rng.randint(1, 4))}
            for e in range(2, 8):
                if rng.random() < 0.5:
                    coeffs[e] = rat(rng.randint(-3, 3))
            sigma = S(coeffs, 12)
            tau = sigma.reversion()
            assert sigma.substitute(tau) == ident
            assert tau.substitute(sigma) == ident


class TestPrecisionTracking:
    def test_add_takes_min(self):
        assert (t(1, N=5) + t(1, N=9)).precision == 5

    def test_shift_extends(self):
        f = S({0: 1, 1: 1}, 5)
        assert (f * t(3)).precision == 8

    def test_truncation_equality(self):
        assert S({2: 1, 7: 5}, 9) == S({2: 1}, 4)

    def test_exact_inputs(self):
        f = parse_series("t^4 + t^5")
        assert f.precision is None
        assert f.truncated(5) == S({4: 1}, 5)


class TestParseFormat:
    @pytest.mark.parametrize("text,coeffs", [
        ("t^4 + t^5", {4: rat(1), 5: rat(1)}),
        ("1 - 1/2*t^2", {0: rat(1), 2: rat(-1, 2)}),
        ("3/2*t", {1: rat(3, 2)}),
        ("-t + 2", {1: rat(-1), 0: rat(2)}),
        ("7", {0: rat(7)}),
        ("t", {1: rat(1)}),
        ("2 t^3", {3: rat(2)}),
    ])
    def test_parse(self, text, coeffs):
        assert parse_series(text) == S(coeffs)

    def test_round_trip(self):
        rng = random.Random(23)
        for _ in range(60):
            f = rand_series(rng, 15)
            assert parse_series(str(f), 15) == f

    @pytest.mark.parametrize("bad", ["", "t^", "1 +", "+ - t", "x^2", "t**3"])
    def test_rejects_garbage(self, bad):
        with pytest.raises(ValueError):
            parse_series(bad)
