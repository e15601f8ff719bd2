"""Exact arithmetic kernels: p-adic valuations of rationals, finite fields,
and univariate rational functions over a finite field.

Everything is immutable and pure; no floating point anywhere.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

INF = math.inf


def vp(p, r):
    """p-adic valuation of a rational number; +inf for zero.

    vp(xy) = vp(x) + vp(y) and vp(x+y) >= min(vp(x), vp(y)).
    """
    if p < 2:
        raise ValueError("p must be a prime >= 2")
    r = Fraction(r)
    if r == 0:
        return INF
    v = 0
    n = abs(r.numerator)
    while n % p == 0:
        n //= p
        v += 1
    d = r.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def is_prime(n):
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        if n % q == 0:
            return n == q
        if q * q > n:
            return True
    i = 37
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


# ---------------------------------------------------------------------------
# Finite fields GF(p^k)
# ---------------------------------------------------------------------------

class Fq:
    """The finite field GF(p^k) with a fixed monic irreducible modulus.

    Elements are coefficient tuples of length k over GF(p).  For k = 1 the
    modulus is x - 0 conventionally and elements are single residues.
    """

    def __init__(self, p, k=1, modulus=None):
        if not is_prime(p):
            raise ValueError("p must be prime")
        if k < 1:
            raise ValueError("k must be >= 1")
        self.p = p
        self.k = k
        self.q = p ** k
        if k == 1:
            self.modulus = (0, 1)
        elif modulus is not None:
            mod = tuple(c % p for c in modulus)
            if len(mod) != k + 1 or mod[-1] != 1:
                raise ValueError("modulus must be monic of degree k")
            if not _is_irreducible_mod_p(mod, p):
                raise ValueError("modulus is reducible")
            self.modulus = mod
        else:
            self.modulus = _default_modulus(p, k)

    def __call__(self, value):
        if isinstance(value, FqElement):
            if value.field is not self and value.field.q != self.q:
                raise ValueError("element from a different field")
            return value
        if isinstance(value, Fraction):
            num = self(value.numerator)
            den = self(value.denominator)
            return num / den
        value = int(value) % self.p
        return FqElement(self, (value,) + (0,) * (self.k - 1))

    def from_coeffs(self, coeffs):
        coeffs = tuple(int(c) % self.p for c in coeffs)
        if len(coeffs) > self.k:
            coeffs = _polymod(coeffs, self.modulus, self.p)
        coeffs = coeffs + (0,) * (self.k - len(coeffs))
        return FqElement(self, coeffs)

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def gen(self):
        if self.k == 1:
            return self(1)
        return self.from_coeffs((0, 1))

    def elements(self):
        """Iterate over all q elements (small fields only)."""
        def rec(i):
            if i == self.k:
                yield ()
                return
            for c in range(self.p):
                for rest in rec(i + 1):
                    yield (c,) + rest
        for coeffs in rec(0):
            yield FqElement(self, coeffs)

    def __eq__(self, other):
        return (isinstance(other, Fq) and self.p == other.p
                and self.k == other.k and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"


class FqElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = coeffs

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        other = self.field(other)
        p = self.field.p
        return FqElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FqElement(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self.field(other))

    def __rsub__(self, other):
        return self.field(other) + (-self)

    def __mul__(self, other):
        other = self.field(other)
        p = self.field.p
        if self.field.k == 1:
            return FqElement(self.field, ((self.coeffs[0] * other.coeffs[0]) % p,))
        prod = [0] * (2 * self.field.k - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] = (prod[i + j] + a * b) % p
        red = _polymod(tuple(prod), self.field.modulus, p)
        red = red + (0,) * (self.field.k - len(red))
        return FqElement(self.field, red)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in GF(q)")
        # a^(q-2) = a^(-1)
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        return self * self.field(other).inverse()

    def __rtruediv__(self, other):
        return self.field(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def pth_root(self):
        """Unique p-th root; the inverse of Frobenius, a^(p^(k-1))."""
        return self ** (self.field.p ** (self.field.k - 1))

    def __eq__(self, other):
        if isinstance(other, FqElement):
            return self.coeffs == other.coeffs and self.field == other.field
        if isinstance(other, (int, Fraction)):
            return self == self.field(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.coeffs))

    def __repr__(self):
        if self.field.k == 1:
            return str(self.coeffs[0])
        return "(" + "+".join(f"{c}*g^{i}" if i else str(c)
                              for i, c in enumerate(self.coeffs) if c) + ")" if self else "0"


def _polymod(coeffs, modulus, p):
    """Reduce an integer-coefficient tuple modulo (modulus, p)."""
    c = [x % p for x in coeffs]
    d = len(modulus) - 1
    for i in range(len(c) - 1, d - 1, -1):
        top = c[i]
        if top:
            for j in range(d):
                c[i - d + j] = (c[i - d + j] - top * modulus[j]) % p
        c[i] = 0
    while len(c) > d:
        c.pop()
    return tuple(c)


def _poly_gcd_mod_p(a, b, p):
    a = list(a)
    b = list(b)
    def trim(x):
        while x and x[-1] % p == 0:
            x.pop()
        return x
    a, b = trim(a), trim(b)
    while b:
        inv = pow(b[-1], p - 2, p)
        r = a[:]
        for i in range(len(r) - 1, len(b) - 2, -1):
            if len(r) < len(b):
                break
            top = (r[-1] * inv) % p
            shift = len(r) - len(b)
            for j in range(len(b)):
                r[shift + j] = (r[shift + j] - top * b[j]) % p
            r = trim(r)
        a, b = b, r
    return a


def _powmod_x(p, e, modulus):
    """x^(p^e) mod modulus over GF(p), as an int tuple."""
    result = (0, 1)
    for _ in range(e):
        cur = result
        acc = (1,)
        # compute cur(x)^p mod modulus by repeated squaring on the exponent p
        base = cur
        n = p
        while n:
            if n & 1:
                prod = [0] * (len(acc) + len(base) - 1)
                for i, a in enumerate(acc):
                    for j, b in enumerate(base):
                        prod[i + j] = (prod[i + j] + a * b) % p
                acc = _polymod(tuple(prod), modulus, p)
                if not acc:
                    acc = (0,)
            prod = [0] * (2 * len(base) - 1)
            for i, a in enumerate(base):
                for j, b in enumerate(base):
                    prod[i + j] = (prod[i + j] + a * b) % p
            base = _polymod(tuple(prod), modulus, p)
            if not base:
                base = (0,)
            n >>= 1
        result = acc
    return result


def _is_irreducible_mod_p(mod, p):
    k = len(mod) - 1
    if k == 1:
        return True
    # x^(p^k) == x mod f, and gcd(x^(p^(k/l)) - x, f) = 1 for prime l | k
    xq = list(_powmod_x(p, k, mod))
    while xq and xq[-1] % p == 0:
        xq.pop()
    if xq != [0, 1]:
        return False
    ls = set()
    kk = k
    d = 2
    while d * d <= kk:
        if kk % d == 0:
            ls.add(d)
            while kk % d == 0:
                kk //= d
        d += 1
    if kk > 1:
        ls.add(kk)
    for l in ls:
        xe = list(_powmod_x(p, k // l, mod))
        # xe - x
        while len(xe) < 2:
            xe.append(0)
        xe[1] = (xe[1] - 1) % p
        g = _poly_gcd_mod_p(xe, mod, p)
        if len(g) > 1:
            return False
    return True


def _default_modulus(p, k):
    """Lexicographically smallest monic irreducible of degree k over GF(p)."""
    def candidates():
        def rec(i):
            if i == k:
                yield ()
                return
            for c in range(p):
                for rest in rec(i + 1):
                    yield rest + (c,)
        for low in rec(0):
            yield low + (1,)
    for mod in candidates():
        if _is_irreducible_mod_p(mod, p):
            return mod
    raise RuntimeError("no irreducible polynomial found")


# ---------------------------------------------------------------------------
# Univariate polynomials over GF(q)
# ---------------------------------------------------------------------------

class FqPoly:
    """Dense univariate polynomial over an Fq field, in a variable t."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        cs = [field(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, field, c):
        return cls(field, [c])

    @classmethod
    def gen(cls, field):
        return cls(field, [0, 1])

    def degree(self):
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def leading(self):
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        f0 = self.field.zero()
        cs = [(self.coeffs[i] if i < len(self.coeffs) else f0)
              + (other.coeffs[i] if i < len(other.coeffs) else f0) for i in range(n)]
        return FqPoly(self.field, cs)

    __radd__ = __add__

    def __neg__(self):
        return FqPoly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return FqPoly(self.field, [])
        out = [self.field.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
        return FqPoly(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = FqPoly.const(self.field, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _coerce(self, other):
        if isinstance(other, FqPoly):
            return other
        return FqPoly.const(self.field, other)

    def divmod(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = FqPoly(self.field, [])
        r = self
        dinv = other.leading().inverse()
        while not r.is_zero() and r.degree() >= other.degree():
            shift = r.degree() - other.degree()
            c = r.leading() * dinv
            mono = FqPoly(self.field, [0] * shift + [c])
            q = q + mono
            r = r - mono * other
        return q, r

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def monic(self):
        if self.is_zero():
            return self
        inv = self.leading().inverse()
        return FqPoly(self.field, [c * inv for c in self.coeffs])

    def gcd(self, other):
        a, b = self, self._coerce(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def derivative(self):
        return FqPoly(self.field, [self.coeffs[i] * i for i in range(1, len(self.coeffs))])

    def evaluate(self, x):
        acc = self.field.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, a):
        """Return self(t + a)."""
        a = self.field(a)
        result = FqPoly(self.field, [])
        for c in reversed(self.coeffs):
            result = result * FqPoly(self.field, [a, 1]) + FqPoly.const(self.field, c)
        return result

    def reverse(self):
        """Coefficient reversal t^deg * self(1/t)."""
        return FqPoly(self.field, list(reversed(self.coeffs)))

    def pth_content_root(self):
        """For f with only t^(p*i) monomials, the g with g(t)^p = f(t), else None."""
        p = self.field.p
        if self.is_zero():
            return self
        for i, c in enumerate(self.coeffs):
            if c and i % p != 0:
                return None
        cs = [self.coeffs[i].pth_root() for i in range(0, len(self.coeffs), p)]
        return FqPoly(self.field, cs)

    def frobenius_pth_power_descend(self):
        """Return h with h(t^p) = self(t)^p, i.e. coefficients raised to p."""
        return FqPoly(self.field, [c ** self.field.p for c in self.coeffs])

    def compose(self, other):
        """self(other(t))."""
        acc = FqPoly(self.field, [])
        for c in reversed(self.coeffs):
            acc = acc * other + FqPoly.const(self.field, c)
        return acc

    def squarefree_decomposition(self):
        """Yun-style decomposition in characteristic p.

        Returns a list of (g, m) with g monic squarefree pairwise coprime and
        self = lc * prod g^m.
        """
        if self.is_zero():
            raise ValueError("zero polynomial")
        p = self.field.p
        f = self.monic()
        out = {}

        def accumulate(g, mult):
            if g.degree() >= 1:
                out[g] = out.get(g, 0) + mult

        def sqf(f, mult):
            if f.degree() < 1:
                return
            df = f.derivative()
            if df.is_zero():
                root = f.pth_content_root()
                sqf(root, mult * p)
                return
            c = f.gcd(df)
            w = (f // c).monic()
            i = 1
            while w.degree() >= 1:
                y = w.gcd(c)
                z = (w // y).monic()
                accumulate(z, mult * i)
                w = y
                c = (c // y).monic()
                i += 1
            if c.degree() >= 1:
                sqf(c, mult * p)

        sqf(f, 1)
        return sorted(out.items(), key=lambda gm: (gm[0].degree(), tuple(tuple(c.coeffs) for c in gm[0].coeffs)))

    def factor(self):
        """Full factorization into monic irreducibles, list of (g, mult).

        Cantor-Zassenhaus with a deterministic per-polynomial seed.
        """
        if self.is_zero():
            raise ValueError("cannot factor zero")
        result = {}
        for g, m in self.squarefree_decomposition():
            for h in _factor_squarefree(g):
                result[h] = result.get(h, 0) + m
        return sorted(result.items(), key=lambda gm: (gm[0].degree(), tuple(tuple(c.coeffs) for c in gm[0].coeffs)))

    def roots(self):
        """Roots in the base field, as a list of (element, multiplicity)."""
        out = []
        for g, m in self.factor():
            if g.degree() == 1:
                out.append((-g.coeffs[0], m))
        return out

    def __eq__(self, other):
        if not isinstance(other, FqPoly):
            if isinstance(other, (int, Fraction, FqElement)):
                other = self._coerce(other)
            else:
                return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.q, self.coeffs))

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(repr(c))
            elif i == 1:
                parts.append(f"{c}*t" if c != self.field.one() else "t")
            else:
                parts.append(f"{c}*t^{i}" if c != self.field.one() else f"t^{i}")
        return " + ".join(parts)


def _factor_squarefree(f):
    """Factor a monic squarefree polynomial; distinct-degree then Cantor-Zassenhaus."""
    field = f.field
    q = field.q
    if f.degree() <= 1:
        return [f] if f.degree() == 1 else []
    # distinct-degree splitting
    pieces = []
    x = FqPoly.gen(field)
    h = x
    v = f
    d = 0
    while v.degree() > 0:
        d += 1
        if 2 * d > v.degree():
            pieces.append((v, v.degree()))
            break
        h = _polypow_mod(h, q, v)
        g = v.gcd(h - x)
        if g.degree() > 0:
            pieces.append((g, d))
            v = (v // g).monic()
            h = h % v
    out = []
    for g, d in pieces:
        out.extend(_equal_degree_split(g, d))
    return out


def _polypow_mod(base, n, modpoly):
    result = FqPoly.const(base.field, 1)
    base = base % modpoly
    while n:
        if n & 1:
            result = (result * base) % modpoly
        base = (base * base) % modpoly
        n >>= 1
    return result


def _equal_degree_split(f, d):
    """Split monic squarefree f that is a product of degree-d irreducibles."""
    field = f.field
    if f.degree() == d:
        return [f]
    q = field.q
    seed = hash((q, tuple(tuple(c.coeffs) for c in f.coeffs), d)) & 0xFFFFFFFF
    rng = random.Random(seed)
    while True:
        a = FqPoly(field, [field.from_coeffs([rng.randrange(field.p) for _ in range(field.k)])
                           for _ in range(f.degree())])
        if a.degree() < 1:
            continue
        g = f.gcd(a)
        if 0 < g.degree() < f.degree():
            pass
        else:
            # a^((q^d - 1)/2) mod f  (q odd here; p > 2 throughout the engine)
            e = (q ** d - 1) // 2
            b = _polypow_mod(a, e, f) - 1
            g = f.gcd(b)
            if not (0 < g.degree() < f.degree()):
                continue
        return _equal_degree_split(g, d) + _equal_degree_split((f // g).monic(), d)


# ---------------------------------------------------------------------------
# Rational functions over GF(q)
# ---------------------------------------------------------------------------

class FqRationalFunction:
    """Reduced fraction of FqPoly with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = FqPoly.const(num.field, 1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = num.gcd(den)
        if g.degree() > 0:
            num = num // g
            den = den // g
        lc = den.leading()
        if lc != den.field.one():
            inv = lc.inverse()
            num = num * inv
            den = den * inv
        self.num = num
        self.den = den

    @classmethod
    def from_const(cls, field, c):
        return cls(FqPoly.const(field, c))

    @property
    def field(self):
        return self.num.field

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def _coerce(self, other):
        if isinstance(other, FqRationalFunction):
            return other
        if isinstance(other, FqPoly):
            return FqRationalFunction(other)
        return FqRationalFunction(FqPoly.const(self.field, other))

    def __add__(self, other):
        other = self._coerce(other)
        return FqRationalFunction(self.num * other.den + other.num * self.den,
                                  self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return FqRationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        return FqRationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return FqRationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n):
        if n < 0:
            return (FqRationalFunction.from_const(self.field, 1) / self) ** (-n)
        return FqRationalFunction(self.num ** n, self.den ** n)

    def derivative(self):
        return FqRationalFunction(self.num.derivative() * self.den - self.num * self.den.derivative(),
                                  self.den * self.den)

    def evaluate(self, x):
        d = self.den.evaluate(x)
        if d.is_zero():
            raise ZeroDivisionError("pole at evaluation point")
        return self.num.evaluate(x) / d

    def order_at_zero_of(self, g):
        """Order of vanishing along the monic irreducible g; negative for poles."""
        if self.is_zero():
            return INF
        def ordp(f):
            n = 0
            while True:
                q, r = f.divmod(g)
                if not r.is_zero():
                    return n
                f = q
                n += 1
        return ordp(self.num) - ordp(self.den)

    def order_at_point(self, point):
        """Order at a closed point ('fin', monic irreducible) or ('inf',)."""
        if self.is_zero():
            return INF
        if point[0] == "inf":
            return self.den.degree() - self.num.degree()
        return self.order_at_zero_of(point[1])

    def compose_mobius(self, a, b, c, d):
        """Precompose with t -> (a t + b)/(c t + d), coefficients in the field."""
        field = self.field
        num_l = FqPoly(field, [field(b), field(a)])
        den_l = FqPoly(field, [field(d), field(c)])
        deg = max(self.num.degree(), self.den.degree(), 0)

        def plug(f):
            acc = FqPoly(field, [])
            for i, cf in enumerate(f.coeffs):
                acc = acc + FqPoly.const(field, cf) * (num_l ** i) * (den_l ** (deg - i))
            return acc
        if self.is_zero():
            return self
        return FqRationalFunction(plug(self.num), plug(self.den))

    def substitute_tp(self):
        """Return self(t^p)."""
        p = self.field.p

        def stretch(f):
            cs = []
            for c in f.coeffs:
                cs.append(c)
                cs.extend([self.field.zero()] * (p - 1))
            return FqPoly(self.field, cs[:len(f.coeffs) * p - (p - 1)] if f.coeffs else [])
        return FqRationalFunction(stretch(self.num), stretch(self.den))

    def frobenius_pth_power_descend(self):
        """Return h with h(t^p) = self(t)^p."""
        return FqRationalFunction(self.num.frobenius_pth_power_descend(),
                                  self.den.frobenius_pth_power_descend())

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, FqElement, FqPoly)):
            other = self._coerce(other)
        if not isinstance(other, FqRationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.den.degree() == 0:
            return repr(self.num)
        return f"({self.num})/({self.den})"


def fq_pth_root(a):
    """p-th root in GF(q), inverse of the Frobenius."""
    return a.pth_root()


def fq_rational_pth_power_test(g):
    """Return h with h^p = g when g is a p-th power in GF(q)(t), else None.

    Uses squarefree decompositions of numerator and denominator: g is a p-th
    power iff every squarefree multiplicity is divisible by p (the leading
    coefficient always has a root since GF(q) is perfect).
    """
    if g.is_zero():
        raise ValueError("g must be nonzero")
    p = g.field.p
    field = g.field

    def side_root(f):
        lc = f.leading()
        root = FqPoly.const(field, lc.pth_root())
        for piece, m in f.squarefree_decomposition():
            if m % p != 0:
                return None
            root = root * piece ** (m // p)
        return root

    rn = side_root(g.num)
    if rn is None:
        return None
    rd = side_root(g.den)
    if rd is None:
        return None
    h = FqRationalFunction(rn, rd)
    return h
