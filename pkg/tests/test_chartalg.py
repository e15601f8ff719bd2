from fractions import Fraction
from math import comb

import pytest

from swancycle.chartalg import Chart, FactoredFunction
from swancycle.exactcore import FqPoly, FqRationalFunction
from swancycle.localfield import KElement, LocalField


def cyclotomic_field(p, precision=None):
    return LocalField(p, eisenstein=[comb(p, i + 1) for i in range(p)], precision=precision)


@pytest.fixture(scope="module")
def K5():
    return cyclotomic_field(5)


def root_chart(K):
    """The affine chart (pi, y) of the projective line."""
    return Chart(K.field if hasattr(K, "field") else K, names=("pi", "y"), exps=(1, 0), label="X0y")


class TestValuations:
    def test_pi_along_closed_fiber(self, K5):
        c = root_chart(K5)
        v = c.pi_fn.weighted_val(0)
        assert v.certified and v.value == 1

    def test_y_after_one_blowup(self, K5):
        c = root_chart(K5)
        y = c.var(1)
        ca = c.chart_a()  # y = pi * y1
        y1chart = ca.transport(y)
        v = y1chart.weighted_val(0)
        assert v.certified and v.value == 1

    def test_iterated_blowups_give_monomial(self, K5):
        c = root_chart(K5)
        f = c.var(1)
        cur = c
        for _ in range(3):
            cur = cur.chart_a()
            f = cur.transport(f)
        assert set(f.terms) == {(3, 1)}

    def test_coefficient_pi_counts(self, K5):
        c = root_chart(K5)
        f = c.const(5) * c.var(1) + c.pi_fn  # 5y + pi
        v = f.weighted_val(0)
        assert v.certified and v.value == 1

    def test_case2_double_chart(self, K5):
        # (pi, y) --blow_b--> (w, y) with pi = w*y --blow_b--> (w', y) with pi = w'*y^2
        c0 = root_chart(K5)
        cb = c0.chart_b()
        assert cb.exps == (1, 1)
        cbb = cb.chart_b()
        assert cbb.exps == (1, 2)
        v = cbb.pi_fn.weighted_val(1)
        assert v.certified and v.value == 2


class TestValuationProperties:
    def test_additivity_on_products(self, K5):
        import random
        rng = random.Random(7)
        c = root_chart(K5).chart_b()  # crossing chart, both axes weighted
        for _ in range(20):
            def rand_fn():
                terms = {}
                for _ in range(rng.randint(1, 3)):
                    key = (rng.randint(0, 2), rng.randint(0, 2))
                    terms[key] = c.const(rng.choice([1, 2, 3, 5, 25])).terms[(0, 0)]
                from swancycle.chartalg import ChartFunction
                return ChartFunction(c, terms)
            f, g = rand_fn(), rand_fn()
            if f.is_zero_to_precision() or g.is_zero_to_precision():
                continue
            for axis in (0, 1):
                vf = f.weighted_val(axis)
                vg = g.weighted_val(axis)
                vfg = (f * g).weighted_val(axis)
                if vf.certified and vg.certified:
                    assert vfg.certified and vfg.value == vf.value + vg.value


class TestTransport:
    def test_identity_roundtrip(self, K5):
        c = root_chart(K5)
        f = c.var(1) ** 2 + c.const(3) * c.var(1) + c.const(Fraction(1, 2))
        g = c.transport_chain(f, c)
        assert set(g.terms) == set(f.terms)

    def test_blowup_substitution_explicit(self, K5):
        c = root_chart(K5)
        f = c.var(1) ** 2 + c.const(2)
        ca = c.chart_a()
        g = ca.transport(f)
        # y^2 -> pi^2 y1^2
        assert set(g.terms) == {(2, 2), (0, 0)}

    def test_shift(self, K5):
        c = root_chart(K5)
        f = c.var(1) ** 2
        s = c.shifted(K5.from_rational(3))
        g = s.transport(f)  # (y + 3)^2 = y^2 + 6y + 9
        assert set(g.terms) == {(0, 2), (0, 1), (0, 0)}
        assert g.terms[(0, 1)].unit_residue() == K5.fq(6)

    def test_pth_power_chart(self, K5):
        c = root_chart(K5)
        f = c.var(1) + c.const(1)
        z = c.pth_power_chart()
        g = z.transport(f)
        assert set(g.terms) == {(0, 5), (0, 0)}


class TestResidues:
    def test_residue_of_unit_function(self, K5):
        c = root_chart(K5)
        f = c.var(1) ** 2 + c.const(2) + c.pi_fn.scale(7)
        r = f.residue_along(0, 0)
        F = K5.fq
        t = FqPoly.gen(F)
        assert r == FqRationalFunction(t ** 2 + 2)

    def test_residue_sees_coefficient_pi(self, K5):
        c = root_chart(K5)
        f = c.monomial(0, 1, Fraction(5)) + c.monomial(1, 0)  # 5y + pi
        r = f.residue_along(0, 1)
        F = K5.fq
        # 5 = u pi^4 contributes nothing at level 1; pi contributes constant 1
        assert r == FqRationalFunction.from_const(F, 1)

    def test_kummer_residue_not_pth_power(self, K5):
        from swancycle.exactcore import fq_rational_pth_power_test
        c = root_chart(K5)
        y = c.var(1)
        f = FactoredFunction(c, [(y, 1), (c.const(1) - y, 1)])
        r = f.residue_along(0)
        assert fq_rational_pth_power_test(r) is None

    def test_factored_with_negative_exponent(self, K5):
        c = root_chart(K5)
        y = c.var(1)
        f = FactoredFunction(c, [(y, 2), (y, -1)])
        r = f.residue_along(0)
        F = K5.fq
        assert r == FqRationalFunction(FqPoly.gen(F))


class TestDlog:
    def test_dlog_of_kummer_function(self, K5):
        # f = y(1-y): dlog f = (1-2y)/(y(1-y)) dy; in dlog-basis the
        # dlog(y)-direction coefficient is y*(that), restricted to D
        c = root_chart(K5)
        y = c.var(1)
        f = FactoredFunction(c, [(y, 1), (c.const(1) - y, 1)])
        a1, a2, b = f.dlog_num_den()
        vb = b.weighted_val(0).require()
        rb = b.residue_along(0, vb)
        F = K5.fq
        t = FqPoly.gen(F)
        # A1/B restricts to zero along D (type II shape)
        va1 = a1.weighted_val(0)
        assert (not va1.certified) or va1.value > vb
        ra2 = a2.residue_along(0, vb)
        got = ra2 / rb
        want = FqRationalFunction(t * (1 - 2 * t), t * (1 - t))
        assert got == want

    def test_dlog_additive_in_factors(self, K5):
        c = root_chart(K5)
        y = c.var(1)
        g1 = y + c.const(2)
        g2 = y ** 2 + c.const(1)
        f12 = FactoredFunction(c, [(g1, 1), (g2, 1)])
        a1, a2, b = f12.dlog_num_den()
        vb = b.weighted_val(0).require()
        r12 = a2.residue_along(0, vb) / b.residue_along(0, vb)
        total = FqRationalFunction.from_const(K5.fq, 0)
        for g in (g1, g2):
            fa = FactoredFunction(c, [(g, 1)])
            x1, x2, bb = fa.dlog_num_den()
            v = bb.weighted_val(0).require()
            total = total + x2.residue_along(0, v) / bb.residue_along(0, v)
        assert r12 == total

    def test_dlog_constant_is_zero(self, K5):
        c = root_chart(K5)
        f = FactoredFunction(c, [(c.const(Fraction(7, 3)), 1)])
        a1, a2, b = f.dlog_num_den()
        assert a1.is_zero_to_precision() or not a1.weighted_val(0).certified
        assert a2.is_zero_to_precision() or not a2.weighted_val(0).certified

    def test_dlog_pi_residue_in_blown_chart(self, K5):
        # along the exceptional of y = y1*pi, dlog(y) = dlog(pi) + dlog(y1);
        # the function y has residue coefficient 1 on the dlog(x1)-direction
        c = root_chart(K5)
        ca = c.chart_a()
        y_up = ca.transport(c.var(1))
        f = FactoredFunction(ca, [(y_up, 1)])
        a1, a2, b = f.dlog_num_den()
        vb = b.weighted_val(0).require()
        r1 = a1.residue_along(0, vb) / b.residue_along(0, vb)
        r2 = a2.residue_along(0, vb) / b.residue_along(0, vb)
        one = FqRationalFunction.from_const(K5.fq, 1)
        assert r1 == one and r2 == one

    def test_dlog_in_unit_folded_chart(self, K5):
        # after blow_b and a shift, pi = U * x1 with a genuine unit U
        c = root_chart(K5)
        cb = c.chart_b()
        s = cb.shifted(K5.from_rational(1))  # recenter x2 at 1
        assert s.exps == (1, 0)
        u = s.unit
        r = u.residue_along(0, 0)
        F = K5.fq
        t = FqPoly.gen(F)
        assert r == FqRationalFunction(t + 1)
        # d(pi)-consistency: dlog of the function pi must have residue 1 on
        # dlog(x1) and t/(t+1) on dlog(x2): pi = x1*(x2+1) exactly here
        f = FactoredFunction(s, [(s.pi_fn, 1)])
        a1, a2, b = f.dlog_num_den()
        vb = b.weighted_val(0).require()
        r1 = a1.residue_along(0, vb) / b.residue_along(0, vb)
        r2 = a2.residue_along(0, vb) / b.residue_along(0, vb)
        assert r1 == FqRationalFunction.from_const(F, 1)
        assert r2 == FqRationalFunction(t, t + 1)
