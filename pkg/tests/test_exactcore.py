import math
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from swancycle.exactcore import (
    INF,
    Fq,
    FqPoly,
    FqRationalFunction,
    fq_pth_root,
    fq_rational_pth_power_test,
    vp,
)


class TestVp:
    def test_known_values(self):
        assert vp(5, Fraction(255, 256)) == 1
        assert vp(5, 0) == INF
        assert vp(5, Fraction(1, 5)) == -1
        assert vp(3, 18) == 2
        assert vp(7, Fraction(-49, 3)) == 2

    @given(st.fractions(), st.fractions(), st.sampled_from([2, 3, 5, 7]))
    def test_multiplicative(self, x, y, p):
        assert vp(p, x * y) == vp(p, x) + vp(p, y)

    @given(st.fractions(), st.fractions(), st.sampled_from([2, 3, 5, 7]))
    def test_ultrametric(self, x, y, p):
        vx, vy = vp(p, x), vp(p, y)
        v = vp(p, x + y)
        assert v >= min(vx, vy)
        if vx != vy:
            assert v == min(vx, vy)


class TestFq:
    def test_prime_field_arithmetic(self):
        F = Fq(5)
        assert F(2) + F(4) == F(1)
        assert F(2) * F(4) == F(3)
        assert F(2) / F(3) == F(4)
        assert F(2) ** 4 == F(1)

    def test_extension_field(self):
        F9 = Fq(3, 2)
        g = F9.gen()
        # the modulus is irreducible, so g^2 is a linear combination of 1, g
        assert g * g == F9.from_coeffs([(-F9.modulus[0]) % 3, (-F9.modulus[1]) % 3])
        assert (g ** 8) == F9.one()

    def test_pth_root_exhaustive_prime_field(self):
        F = Fq(5)
        for a in range(5):
            r = fq_pth_root(F(a))
            assert r ** 5 == F(a)
        assert fq_pth_root(F(1)) == F(1)
        assert fq_pth_root(F(2)) == F(2)  # x -> x^5 is the identity on GF(5)

    def test_pth_root_extension(self):
        F9 = Fq(3, 2)
        for a in F9.elements():
            r = fq_pth_root(a)
            assert r ** 3 == a
            assert r == a ** 3  # inverse Frobenius is a -> a^3 in GF(9)


class TestFqPoly:
    def test_divmod(self):
        F = Fq(5)
        t = FqPoly.gen(F)
        f = t ** 3 + 2 * t + 1
        g = t + 3
        q, r = f.divmod(g)
        assert q * g + r == f
        assert r.degree() < 1

    def test_gcd(self):
        F = Fq(5)
        t = FqPoly.gen(F)
        a = (t + 1) ** 2 * (t + 2)
        b = (t + 1) * (t + 3)
        assert a.gcd(b) == t + 1

    def test_factor_roundtrip(self):
        F = Fq(5)
        t = FqPoly.gen(F)
        f = (t + 1) ** 3 * (t ** 2 + 2) * t
        fac = f.factor()
        prod = FqPoly.const(F, f.leading())
        for g, m in fac:
            prod = prod * g ** m
        assert prod == f
        assert all(g.degree() in (1, 2) for g, _ in fac)

    def test_squarefree_char_p_multiplicity(self):
        F = Fq(3)
        t = FqPoly.gen(F)
        f = (t + 1) ** 3
        dec = f.squarefree_decomposition()
        assert dec == [(t + 1, 3)]

    def test_shift_and_reverse(self):
        F = Fq(7)
        t = FqPoly.gen(F)
        f = t ** 2 + 3 * t + 1
        assert f.shift(2).evaluate(F(0)) == f.evaluate(F(2))
        assert f.reverse().evaluate(F(2)) == f.evaluate(F(2).inverse()) * F(2) ** 2


class TestPthPowerTest:
    def test_monomial(self):
        F = Fq(5)
        t = FqPoly.gen(F)
        g = FqRationalFunction(t ** 5)
        h = fq_rational_pth_power_test(g)
        assert h == FqRationalFunction(t)

    @pytest.mark.parametrize("a", [1, 2, 3, 4])
    def test_small_exponent_fails(self, a):
        F = Fq(5)
        t = FqPoly.gen(F)
        g = FqRationalFunction(t ** a)
        assert fq_rational_pth_power_test(g) is None

    def test_rational_example(self):
        F = Fq(5)
        t = FqPoly.gen(F)
        g = FqRationalFunction((t + 1) ** 10, t ** 5)
        h = fq_rational_pth_power_test(g)
        assert h is not None
        assert h ** 5 == g
        assert h == FqRationalFunction((t + 1) ** 2, t)

    def test_constant_always_power(self):
        F = Fq(5)
        for c in range(1, 5):
            g = FqRationalFunction.from_const(F, c)
            h = fq_rational_pth_power_test(g)
            assert h is not None and h ** 5 == g

    def test_negative_certificate_brute_force(self):
        # small-instance oracle: no h of low degree satisfies h^p = g
        F = Fq(3)
        t = FqPoly.gen(F)
        g = FqRationalFunction(t ** 2 + 1)
        assert fq_rational_pth_power_test(g) is None
        for cs in product(range(3), repeat=3):
            h = FqRationalFunction(FqPoly(F, list(cs)) + t ** 0 * 0)
            if h.is_zero():
                continue
            assert h ** 3 != g

    def test_extension_field_leading_coeff(self):
        F9 = Fq(3, 2)
        t = FqPoly.gen(F9)
        g = FqRationalFunction(FqPoly.const(F9, F9.gen()) * t ** 3)
        h = fq_rational_pth_power_test(g)
        assert h is not None and h ** 3 == g

    @given(st.integers(0, 3 ** 4 - 1), st.integers(1, 3 ** 2 - 1))
    def test_pth_power_roundtrip_random(self, a, b):
        F = Fq(3)
        num = FqPoly(F, [(a >> (2 * i)) % 3 if False else (a // 3 ** i) % 3 for i in range(4)])
        den = FqPoly(F, [(b // 3 ** i) % 3 for i in range(2)])
        if num.is_zero() or den.is_zero():
            return
        g = FqRationalFunction(num, den) ** 3
        h = fq_rational_pth_power_test(g)
        assert h is not None
        assert h ** 3 == g


class TestRationalFunction:
    def test_order_at_points(self):
        F = Fq(5)
        t = FqPoly.gen(F)
        f = FqRationalFunction(t ** 2 * (t + 1), (t + 2) ** 3)
        assert f.order_at_point(("fin", t)) == 2
        assert f.order_at_point(("fin", t + 1)) == 1
        assert f.order_at_point(("fin", t + 2)) == -3
        assert f.order_at_point(("inf",)) == 0  # deg den - deg num = 3 - 3

    def test_mobius_inversion(self):
        F = Fq(5)
        t = FqPoly.gen(F)
        f = FqRationalFunction(t ** 2 + 1, t + 2)
        g = f.compose_mobius(0, 1, 1, 0)  # t -> 1/t
        for c in range(1, 5):
            assert g.evaluate(F(c)) == f.evaluate(F(c).inverse())

    def test_substitute_tp(self):
        F = Fq(3)
        t = FqPoly.gen(F)
        f = FqRationalFunction(t + 1, t ** 2 + t + 2)
        g = f.substitute_tp()
        for c in range(3):
            assert g.evaluate(F(c)) == f.evaluate(F(c) ** 3)

    def test_frobenius_descend(self):
        F = Fq(3)
        t = FqPoly.gen(F)
        f = FqRationalFunction(t ** 2 + 2 * t, t + 1)
        h = f.frobenius_pth_power_descend()
        assert h.substitute_tp() == f ** 3
