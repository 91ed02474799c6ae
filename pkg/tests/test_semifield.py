"""Scalars, germs, polynomials, and the generator identities."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropcurve.errors import TropError
from tropcurve.semifield import (NEG_INF, UNIT, Germ, TropPoly, TropValue,
                                 germ_generator_report, rat)

rationals = st.fractions(max_denominator=40)
trop_values = st.one_of(st.just(NEG_INF), rationals.map(TropValue))


def germs(n: int):
    finite = st.tuples(rationals, st.tuples(*[st.integers(-9, 9)] * n)).map(
        lambda t: Germ(n, t[0], t[1]))
    return st.one_of(st.just(Germ.zero(n)), finite)


class TestTropValue:
    def test_sum_product_inverse(self):
        a, b = TropValue.of(3), TropValue.of(5)
        assert a.add(b) == TropValue.of(5)
        assert a.mul(b) == TropValue.of(8)
        assert a.inv() == TropValue.of(-3)

    def test_neg_inf_laws(self):
        b = TropValue.of(2)
        assert NEG_INF.add(b) == b
        assert b.add(NEG_INF) == b
        assert NEG_INF.mul(b).is_neg_inf

    def test_fractions(self):
        a, b = TropValue.of("1/2"), TropValue.of("1/3")
        assert a.add(b) == a
        assert a.mul(b) == TropValue.of("5/6")

    def test_zero_has_no_inverse(self):
        with pytest.raises(TropError):
            NEG_INF.inv()

    def test_rat_rejects_floats(self):
        with pytest.raises(TropError):
            rat(0.5)

    @given(trop_values, trop_values, trop_values)
    def test_semifield_axioms(self, a, b, c):
        assert a.add(b) == b.add(a)
        assert a.mul(b) == b.mul(a)
        assert a.add(b).add(c) == a.add(b.add(c))
        assert a.mul(b).mul(c) == a.mul(b.mul(c))
        assert a.mul(b.add(c)) == a.mul(b).add(a.mul(c))
        assert a.add(a) == a
        assert a.mul(UNIT) == a
        if not a.is_neg_inf:
            assert a.mul(a.inv()) == UNIT


class TestGerm:
    def test_equal_coefficient_sum_takes_slope_max(self):
        assert Germ.of(0, (1, 0)).add(Germ.of(0, (0, 1))) == Germ.of(0, (1, 1))

    def test_larger_coefficient_wins(self):
        assert Germ.of(3, (1, 2)).add(Germ.of(1, (5, 5))) == Germ.of(3, (1, 2))

    def test_product_and_inverse(self):
        assert Germ.of(1, (1, 0)).mul(Germ.of(2, (0, 1))) == Germ.of(3, (1, 1))
        assert Germ.of(1, (1, 0)).inv() == Germ.of(-1, (-1, 0))

    def test_rank_mismatch(self):
        with pytest.raises(TropError):
            Germ.of(0, (1,)).add(Germ.of(0, (1, 2)))

    def test_zero_inverse(self):
        with pytest.raises(TropError):
            Germ.zero(2).inv()

    def test_forget(self):
        assert Germ.of(5, (1, 2, 3)).forget(2) == Germ.of(5, (1, 3))
        assert Germ.of(5, (7,)).forget(1).to_trop() == TropValue.of(5)
        assert Germ.zero(1).forget(1) == Germ.zero(0)
        with pytest.raises(TropError):
            Germ.of(5, (7,)).forget(2)

    def test_slope_sum(self):
        assert Germ.of(0, (-1, -1, -1)).slope_sum() == -3
        assert Germ.of(7, (1, 1, -2)).slope_sum() == 0
        assert Germ.of("5/3", ()).slope_sum() == 0
        with pytest.raises(TropError):
            Germ.zero(2).slope_sum()

    @pytest.mark.parametrize("n", range(6))
    def test_semifield_axioms_sampled(self, n):
        import random

        rng = random.Random(n)
        for _ in range(200):
            def draw():
                if rng.random() < 0.1:
                    return Germ.zero(n)
                return Germ(n, Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
                            tuple(rng.randint(-6, 6) for _ in range(n)))
            a, b, c = draw(), draw(), draw()
            assert a.add(b) == b.add(a)
            assert a.mul(b) == b.mul(a)
            assert a.add(b).add(c) == a.add(b.add(c))
            assert a.mul(b).mul(c) == a.mul(b.mul(c))
            assert a.mul(b.add(c)) == a.mul(b).add(a.mul(c))
            assert a.add(a) == a
            assert a.mul(Germ.unit(n)) == a
            if not a.is_neg_inf:
                assert a.mul(a.inv()) == Germ.unit(n)

    @given(germs(3), germs(3), st.integers(1, 3))
    def test_forget_is_homomorphism(self, g, h, k):
        assert g.add(h).forget(k) == g.forget(k).add(h.forget(k))
        assert g.mul(h).forget(k) == g.forget(k).mul(h.forget(k))

    @given(germs(4), st.integers(1, 4), st.integers(1, 4))
    def test_forget_orders_commute(self, g, j, k):
        a, b = sorted((j, k))
        if a == b:
            return
        assert g.forget(b).forget(a) == g.forget(a).forget(b - 1)


class TestTropPoly:
    def test_eval_argmax(self):
        F = TropPoly.of(2, {(0, 0): 0, (1, 0): 0, (0, 1): 0})
        v, arg = F.eval((0, 0))
        assert v == TropValue.of(0) and arg == {(0, 0), (1, 0), (0, 1)}
        v, arg = F.eval((-1, -2))
        assert v == TropValue.of(0) and arg == {(0, 0)}

    def test_eval_monomial(self):
        F = TropPoly.monomial(5, (1,))
        v, arg = F.eval((2,))
        assert v == TropValue.of(7) and arg == {(1,)}

    def test_degree(self):
        assert TropPoly.of(2, {(0, 0): 0, (1, 0): 0, (0, 1): 0}).degree() == 1
        assert TropPoly.zero(2).degree() is None
        assert TropPoly.of(2, {(0, 0): 0, (1, 1): 0, (2, 0): 0}).degree() == 2
        with pytest.raises(TropError):
            TropPoly.of(1, {(-1,): 0}).degree()

    def test_to_germ(self):
        assert TropPoly.of(2, {(0, 0): 0, (1, 0): 0}).to_germ() == Germ.of(0, (1, 0))
        assert TropPoly.of(2, {(1, 1): 3}).to_germ() == Germ.of(3, (1, 1))
        assert TropPoly.zero(2).to_germ() == Germ.zero(2)

    def test_parse_round_trip(self):
        F = TropPoly.of(2, {(0, 0): Fraction(-1, 3), (2, -1): Fraction(7, 2)})
        assert TropPoly.parse(F.format()) == F
        assert TropPoly.parse("-inf", nvars=2) == TropPoly.zero(2)
        assert TropPoly.zero(3).format() == "-inf\n"

    @given(st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
                           rationals, min_size=1, max_size=5),
           st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
                           rationals, min_size=1, max_size=5))
    def test_to_germ_is_homomorphism(self, t1, t2):
        F, G = TropPoly.of(2, t1), TropPoly.of(2, t2)
        assert F.add(G).to_germ() == F.to_germ().add(G.to_germ())
        assert F.mul(G).to_germ() == F.to_germ().mul(G.to_germ())

    @given(st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
                           rationals, min_size=1, max_size=5))
    def test_format_round_trip(self, terms):
        F = TropPoly.of(2, terms)
        assert TropPoly.parse(F.format()) == F


class TestGeneratorIdentities:
    def test_rank_two_identity_from_the_source(self):
        v = Germ.of(0, (1, -1))
        assert v.add(Germ.unit(2)) == Germ.of(0, (1, 0))
        assert v.inv().add(Germ.unit(2)) == Germ.of(0, (0, 1))

    @pytest.mark.parametrize("n", range(1, 9))
    def test_reports_pass(self, n):
        report = germ_generator_report(n)
        assert report.ok
        assert all(c.holds for c in report.identities)

    def test_rank_three_generators(self):
        report = germ_generator_report(3)
        assert "1, 0, 1" in str(Germ.of(0, (1, 0, 1))) or report.ok

    def test_bound(self):
        with pytest.raises(TropError):
            germ_generator_report(9)
        with pytest.raises(TropError):
            germ_generator_report(0)
        assert germ_generator_report(12, bound=16).ok
