"""Capped-precision arithmetic in a complete discrete valuation ring of mixed
characteristic (0, p), presented as an Eisenstein extension of the unramified
ring W(F_q).

Elements are polynomials in the uniformizer pi of degree < e with W(F_q)
coefficients carried modulo p^M; every element also records an absolute
pi-adic precision.  Valuations read off the canonical representation are
exact: distinct pi-powers with unit W-parts can never cancel.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactcore import Fq, FqElement, INF, is_prime, vp


class PrecisionExhausted(Exception):
    """A required digit lies beyond the working precision."""


class NoConvergence(Exception):
    """A Hensel/Newton hypothesis fails for certified reasons."""


class NonEisenstein(ValueError):
    """The defining polynomial violates the Eisenstein criteria."""


class NoZetaP(Exception):
    """The field does not contain a primitive p-th root of unity."""


@dataclass(frozen=True)
class PiValuation:
    value: int
    certified: bool

    def require(self):
        if not self.certified:
            raise PrecisionExhausted(f"valuation >= {self.value} but not certified")
        return self.value


class LocalField:
    """Handle for O_K = W(F_q)[pi]/(E(pi)) with working precision N."""

    def __init__(self, p, residue_degree=1, eisenstein=None, precision=None,
                 modulus=None, need_zeta=True):
        if not is_prime(p) or p == 2:
            raise ValueError("p must be an odd prime (p = 2 is out of scope)")
        self.p = p
        self.k = residue_degree
        self.fq = Fq(p, residue_degree, modulus)
        if eisenstein is None:
            eisenstein = [Fraction(p), Fraction(1)]
        eis = [Fraction(c) for c in eisenstein]
        if len(eis) < 2 or eis[-1] != 1:
            raise NonEisenstein("defining polynomial must be monic of degree >= 1")
        self.e = len(eis) - 1
        if vp(p, eis[0]) != 1:
            raise NonEisenstein("constant term must have p-valuation exactly 1")
        for c in eis[1:-1]:
            if vp(p, c) < 1:
                raise NonEisenstein("lower coefficients must have positive p-valuation")
        self.eis = eis

        if (p - 1) % 1 != 0:
            pass
        self.has_zeta_index = (self.e % (p - 1) == 0)
        self.e_prime = p * self.e // (p - 1) if self.has_zeta_index else None

        if precision is None:
            base = self.e_prime if self.e_prime is not None else self.e
            precision = 4 * p * base
        self.N = int(precision)
        if self.N < 2 * self.e + 2:
            self.N = 2 * self.e + 2
        self.M = self.N // self.e + 3
        self.pM = p ** self.M
        self._int_modulus = tuple(int(c) for c in self.fq.modulus)

        # E-coefficients in Zq and the pi^e reduction row
        self._eis_zq = [self._zq_from_fraction(c) for c in eis[:-1]]
        # pi^(e+j) in the basis, j = 0..e-2
        base = tuple(self._zq_neg(c) for c in self._eis_zq)  # pi^e
        rows = [base]
        row = base
        for _ in range(self.e - 2):
            row = self._pi_shift_row(row, base)
            rows.append(tuple(row))
        self._red_rows = rows

        # p/pi = -gamma^{-1} (pi^(e-1) + c_{e-1} pi^(e-2) + ... + c_1), c_0 = p*gamma
        gamma = self._zq_from_fraction(eis[0] / p)
        ginv = self._zq_inv(gamma)
        coeffs = [self._zq_zero()] * self.e
        for i in range(1, self.e):
            coeffs[i - 1] = self._zq_neg(self._zq_mul(ginv, self._eis_zq[i]))
        coeffs[self.e - 1] = self._zq_neg(ginv)
        self.p_over_pi = OKElement(self, tuple(coeffs), self.N)

        self._zeta = None
        self._zeta_factor = None
        if need_zeta:
            self._compute_zeta()

    # -- W(F_q)/p^M arithmetic on int tuples --------------------------------

    def _zq_zero(self):
        return (0,) * self.k

    def _zq_one(self):
        return (1,) + (0,) * (self.k - 1)

    def _zq_from_int(self, n):
        return (n % self.pM,) + (0,) * (self.k - 1)

    def _zq_from_fraction(self, r):
        r = Fraction(r)
        v = vp(self.p, r)
        if v is INF:
            return self._zq_zero()
        if v < 0:
            raise ValueError("fraction is not p-integral")
        num, den = r.numerator, r.denominator
        dinv = pow(den, -1, self.pM)
        return self._zq_from_int(num * dinv)

    def _zq_add(self, a, b):
        return tuple((x + y) % self.pM for x, y in zip(a, b))

    def _zq_sub(self, a, b):
        return tuple((x - y) % self.pM for x, y in zip(a, b))

    def _zq_neg(self, a):
        return tuple((-x) % self.pM for x in a)

    def _zq_mul(self, a, b):
        if self.k == 1:
            return ((a[0] * b[0]) % self.pM,)
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] = (prod[i + j] + x * y) % self.pM
        m = self._int_modulus
        for i in range(len(prod) - 1, self.k - 1, -1):
            top = prod[i]
            if top:
                for j in range(self.k):
                    prod[i - self.k + j] = (prod[i - self.k + j] - top * m[j]) % self.pM
            prod[i] = 0
        return tuple(prod[: self.k])

    def _zq_vp(self, a):
        """p-valuation, capped at M."""
        v = self.M
        for x in a:
            if x:
                w = 0
                while x % self.p == 0:
                    x //= self.p
                    w += 1
                v = min(v, w)
        return v

    def _zq_div_p(self, a, j=1):
        q = self.p ** j
        return tuple(x // q for x in a)

    def _zq_residue(self, a):
        return self.fq.from_coeffs([x % self.p for x in a])

    def _zq_lift(self, x: FqElement):
        return tuple(int(c) for c in x.coeffs)

    def _zq_inv(self, a):
        if self._zq_vp(a) > 0:
            raise ZeroDivisionError("not a unit in W(F_q)")
        r = self._zq_residue(a).inverse()
        x = self._zq_lift(r)
        # Newton: x <- x(2 - a x), doubling p-adic accuracy
        steps = max(1, self.M.bit_length() + 1)
        two = self._zq_from_int(2)
        for _ in range(steps):
            x = self._zq_mul(x, self._zq_sub(two, self._zq_mul(a, x)))
        return x

    def _pi_shift_row(self, row, base):
        """Given pi^m in the basis, return pi^(m+1) in the basis."""
        out = [self._zq_zero()] * self.e
        for i in range(self.e - 1):
            out[i + 1] = row[i]
        top = row[self.e - 1]
        if any(top):
            for i in range(self.e):
                out[i] = self._zq_add(out[i], self._zq_mul(top, base[i]))
        return out

    # -- element constructors ------------------------------------------------

    def zero(self, prec=None):
        return OKElement(self, (self._zq_zero(),) * self.e, self.N if prec is None else prec)

    def one(self):
        cs = [self._zq_one()] + [self._zq_zero()] * (self.e - 1)
        return OKElement(self, tuple(cs), self.N)

    def pi(self):
        cs = [self._zq_zero()] * self.e
        if self.e == 1:
            # pi = -c_0 when E = x - c_0; Eisenstein forces e >= 1 with c_0 = -pi
            cs[0] = self._zq_neg(self._eis_zq[0])
        else:
            cs[1] = self._zq_one()
        return OKElement(self, tuple(cs), self.N)

    def from_rational(self, r):
        r = Fraction(r)
        if r != 0 and vp(self.p, r) < 0:
            raise ValueError("use KElement for non-integral rationals")
        cs = [self._zq_from_fraction(r)] + [self._zq_zero()] * (self.e - 1)
        return OKElement(self, tuple(cs), self.N)

    def from_fq(self, x: FqElement):
        cs = [self._zq_lift(x)] + [self._zq_zero()] * (self.e - 1)
        return OKElement(self, tuple(cs), self.N)

    def p_element(self):
        return self.from_rational(self.p)

    # -- zeta_p ---------------------------------------------------------------

    def _cyclotomic_value(self, a):
        acc = self.one()
        total = self.one()
        for _ in range(self.p - 1):
            acc = acc * a
            total = total + acc
        return total

    def _compute_zeta(self):
        if not self.has_zeta_index:
            raise NoZetaP(f"(p-1) = {self.p - 1} does not divide e = {self.e}")
        # fast path: 1 + pi is a root when E(x) = ((1+x)^p - 1)/x
        cand = self.one() + self.pi()
        if self._cyclotomic_value(cand).val().value >= self.N - self.e:
            self._set_zeta(cand)
            return
        # general: roots of sum_{i<p} (1+z)^i with v(z) >= 1
        coeffs = self._cyclotomic_shift_coeffs()
        roots = self.roots_of(coeffs, min_val=1)
        if not roots:
            raise NoZetaP("the cyclotomic polynomial has no root in O_K")
        self._set_zeta(self.one() + roots[0])

    def _cyclotomic_shift_coeffs(self):
        """Coefficients of sum_{i=0}^{p-1} (1+z)^i as a polynomial in z."""
        from math import comb
        cs = [0] * self.p
        for i in range(self.p):
            for j in range(i + 1):
                cs[j] += comb(i, j)
        return [self.from_rational(c) for c in cs]

    def _set_zeta(self, z):
        self._zeta = z
        delta = self.one() - z
        f = delta
        for _ in range(self.p - 1):
            f = f * delta
        self._zeta_factor = f
        v = f.val()
        if not (v.certified and v.value == self.e_prime):
            raise PrecisionExhausted("(1 - zeta_p)^p does not certify valuation e'")

    @property
    def zeta_p(self):
        if self._zeta is None:
            self._compute_zeta()
        return self._zeta

    @property
    def zeta_factor(self):
        """(1 - zeta_p)^p, of valuation e' = pe/(p-1)."""
        if self._zeta_factor is None:
            self._compute_zeta()
        return self._zeta_factor

    # -- polynomial utilities ------------------------------------------------

    def poly_eval(self, coeffs, a):
        acc = self.zero()
        for c in reversed(coeffs):
            acc = acc * a + c
        return acc

    def poly_derivative(self, coeffs):
        return [coeffs[i] * self.from_rational(i) for i in range(1, len(coeffs))]

    def roots_of(self, coeffs, min_val=0, target=None, max_nodes=200_000):
        """All roots in O_K of the polynomial with OKElement coefficients.

        Digit-by-digit search with branching; each branch is closed by Newton
        iteration once v(f(a)) > 2 v(f'(a)) is certified.  Valuations read on
        canonical representations are exact, so pruning is sound.
        """
        dcoeffs = self.poly_derivative(coeffs)
        target = self.N - self.e if target is None else target
        roots = []
        nodes = 0
        fq_elements = list(self.fq.elements())
        piN = [self.one()]
        for _ in range(self.N):
            piN.append(piN[-1] * self.pi())

        def newton_close(a):
            for _ in range(self.N.bit_length() + 2):
                fa = self.poly_eval(coeffs, a)
                if fa.val().value >= target:
                    return a
                fpa = self.poly_eval(dcoeffs, a)
                a = a - fa.divide_by(fpa)
            return a

        def explore(a, m):
            nonlocal nodes
            nodes += 1
            if nodes > max_nodes:
                raise PrecisionExhausted("root search exceeded the node budget")
            fa = self.poly_eval(coeffs, a)
            va = fa.val()
            if va.value >= target:
                roots.append(a)
                return
            fpa = self.poly_eval(dcoeffs, a)
            vpa = fpa.val()
            if vpa.certified and va.certified and va.value > 2 * vpa.value:
                roots.append(newton_close(a))
                return
            if m >= target:
                return
            for d in fq_elements:
                cand = a + self.from_fq(d) * piN[m]
                if self.poly_eval(coeffs, cand).val().value >= m + 1:
                    explore(cand, m + 1)

        explore(self.zero(), max(0, min_val))
        # deduplicate branches that converged to the same root
        unique = []
        for r in roots:
            if not any((r - s).val().value >= target for s in unique):
                unique.append(r)
        return unique

    def hensel_lift(self, coeffs, a0):
        """Newton lifting of a root from a0 with the standard hypothesis."""
        dcoeffs = self.poly_derivative(coeffs)
        f0 = self.poly_eval(coeffs, a0)
        fp0 = self.poly_eval(dcoeffs, a0)
        v0, vp0 = f0.val(), fp0.val()
        # vp0.value is a valid lower bound for v(f'(a0)) in either case, so
        # v0 <= 2*vp0.value with v0 certified refutes the hypothesis outright.
        if v0.certified and v0.value <= 2 * vp0.value:
            raise NoConvergence("v(f(a0)) <= 2 v(f'(a0))")
        if not vp0.certified and v0.certified:
            raise PrecisionExhausted("derivative valuation not certified")
        if not v0.certified and vp0.certified and v0.value <= 2 * vp0.value:
            raise PrecisionExhausted("cannot certify the Newton hypothesis")
        a = a0
        target = self.N - self.e
        for _ in range(self.N.bit_length() + 3):
            fa = self.poly_eval(coeffs, a)
            if fa.val().value >= target:
                return a
            fpa = self.poly_eval(dcoeffs, a)
            a = a - fa.divide_by(fpa)
        return a

    def is_pth_power_unit(self, u):
        """Return t with t^p = u when the unit u is a p-th power in O_K."""
        v = u.val()
        if not v.certified or v.value != 0:
            raise ValueError("argument must be a certified unit")
        coeffs = [-u] + [self.zero()] * (self.p - 1) + [self.one()]
        roots = self.roots_of(coeffs)
        return roots[0] if roots else None

    def __repr__(self):
        return f"LocalField(p={self.p}, q={self.p}^{self.k}, e={self.e}, N={self.N})"


class OKElement:
    """Element of O_K to absolute pi-adic precision `prec`."""

    __slots__ = ("field", "coeffs", "prec")

    def __init__(self, field, coeffs, prec):
        self.field = field
        self.coeffs = coeffs
        self.prec = min(prec, field.N)

    # -- valuation ------------------------------------------------------------

    def val(self) -> PiValuation:
        f = self.field
        best = None
        for i, w in enumerate(self.coeffs):
            v = f._zq_vp(w)
            if v < f.M:
                cand = i + f.e * v
                if best is None or cand < best:
                    best = cand
        if best is None or best >= self.prec:
            return PiValuation(self.prec, False)
        return PiValuation(best, True)

    def is_zero_to_precision(self):
        return not self.val().certified

    # -- ring operations -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        f = self.field
        cs = tuple(f._zq_add(a, b) for a, b in zip(self.coeffs, other.coeffs))
        return OKElement(f, cs, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        f = self.field
        return OKElement(f, tuple(f._zq_neg(a) for a in self.coeffs), self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        f = self.field
        e = f.e
        prod = [f._zq_zero()] * (2 * e - 1)
        for i, a in enumerate(self.coeffs):
            if any(a):
                for j, b in enumerate(other.coeffs):
                    if any(b):
                        prod[i + j] = f._zq_add(prod[i + j], f._zq_mul(a, b))
        out = list(prod[:e])
        for j in range(e, 2 * e - 1):
            top = prod[j]
            if any(top):
                row = f._red_rows[j - e]
                for i in range(e):
                    out[i] = f._zq_add(out[i], f._zq_mul(top, row[i]))
        va = self.val()
        vb = other.val()
        lo_a = va.value  # exact valuation or the precision floor
        lo_b = vb.value
        prec = min(self.prec + lo_b, other.prec + lo_a, f.N)
        return OKElement(f, tuple(out), prec)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers: use inverse() explicitly")
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _coerce(self, other):
        if isinstance(other, OKElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        raise TypeError(f"cannot coerce {other!r}")

    # -- division ---------------------------------------------------------------

    def residue(self) -> FqElement:
        if self.prec < 1:
            raise PrecisionExhausted("no certified digits")
        return self.field._zq_residue(self.coeffs[0])

    def inverse(self):
        v = self.val()
        if not v.certified or v.value != 0:
            raise ZeroDivisionError("inverse requires a certified unit")
        f = self.field
        x = f.from_fq(self.residue().inverse())
        for _ in range(f.N.bit_length() + 2):
            x = x * (f.from_rational(2) - self * x)
        return OKElement(f, x.coeffs, self.prec)

    def shift_down(self, ktimes=1):
        """Exact division by pi^ktimes; the valuation must certify >= ktimes."""
        x = self
        f = self.field
        for _ in range(ktimes):
            v = x.val()
            if not v.certified and v.value < 1:
                raise PrecisionExhausted("cannot certify divisibility by pi")
            if v.certified and v.value < 1:
                raise ValueError("element is not divisible by pi")
            w0 = x.coeffs[0]
            rest = list(x.coeffs[1:]) + [f._zq_zero()]
            if any(w0):
                if f._zq_vp(w0) < 1:
                    raise ValueError("element is not divisible by pi")
                w0p = f._zq_div_p(w0)
                corr = OKElement(f, tuple(f._zq_mul(w0p, c) for c in f.p_over_pi.coeffs), f.N)
                x = OKElement(f, tuple(rest), max(x.prec - 1, 0)) + corr
            else:
                x = OKElement(f, tuple(rest), max(x.prec - 1, 0))
        return x

    def shift_up(self, ktimes=1):
        x = self
        for _ in range(ktimes):
            x = x * self.field.pi()
        return x

    def divide_by(self, other):
        """self / other when v(self) >= v(other); exact unit-and-shift division."""
        vo = other.val()
        if not vo.certified:
            raise PrecisionExhausted("divisor valuation not certified")
        unit = other.shift_down(vo.value) if vo.value else other
        num = self.shift_down(vo.value) if vo.value else self
        return num * unit.inverse()

    def unit_residue(self) -> FqElement:
        """Residue of self / pi^v(self)."""
        v = self.val().require()
        return self.shift_down(v).residue() if v else self.residue()

    def log_pi_derivative(self):
        """Coefficient of dlog(pi) in d(self), in the log-symbol calculus.

        Each W-digit w_i pi^i is a constant times the monomial p^(vp(w_i)) pi^i
        up to 1-units with vanishing dlog, and dlog(p) restricts to e*dlog(pi)
        on the closed fiber; so the digit contributes (i + e*vp(w_i)) times
        itself.  Exact at the leading pi-adic level, with junk strictly above.
        """
        f = self.field
        cs = []
        for i, w in enumerate(self.coeffs):
            m = i + f.e * min(f._zq_vp(w), f.M)
            cs.append(f._zq_mul(f._zq_from_int(m), w))
        return OKElement(f, tuple(cs), self.prec)

    def __eq__(self, other):
        if not isinstance(other, (OKElement, int, Fraction)):
            return NotImplemented
        diff = self - self._coerce(other)
        return not diff.val().certified

    def __hash__(self):
        raise TypeError("OKElement is precision-capped; not hashable")

    def __repr__(self):
        f = self.field
        parts = []
        for i, w in enumerate(self.coeffs):
            if any(w):
                parts.append(f"({w if f.k > 1 else w[0]})*pi^{i}" if i else f"{w if f.k > 1 else w[0]}")
        body = " + ".join(parts) if parts else "0"
        return f"<{body} + O(pi^{self.prec})>"


class KElement:
    """pi^shift * u with u in O_K: an element of K, shift possibly negative."""

    __slots__ = ("ok", "shift")

    def __init__(self, ok: OKElement, shift=0):
        v = ok.val()
        if v.certified and v.value > 0:
            ok = ok.shift_down(v.value)
            shift += v.value
        self.ok = ok
        self.shift = shift

    @classmethod
    def from_rational(cls, field, r):
        r = Fraction(r)
        if r == 0:
            return cls(field.zero(), 0)
        v = vp(field.p, r)
        return cls(field.from_rational(r / Fraction(field.p) ** v), field.e * v)

    @classmethod
    def from_ok(cls, ok):
        return cls(ok, 0)

    @property
    def field(self):
        return self.ok.field

    def val(self) -> PiValuation:
        v = self.ok.val()
        return PiValuation(v.value + self.shift, v.certified)

    def is_zero_to_precision(self):
        return not self.ok.val().certified

    def _coerce(self, other):
        if isinstance(other, KElement):
            return other
        if isinstance(other, OKElement):
            return KElement(other, 0)
        if isinstance(other, (int, Fraction)):
            return KElement.from_rational(self.field, other)
        raise TypeError(f"cannot coerce {other!r}")

    def __add__(self, other):
        other = self._coerce(other)
        m = min(self.shift, other.shift)
        a = self.ok.shift_up(self.shift - m)
        b = other.ok.shift_up(other.shift - m)
        return KElement(a + b, m)

    __radd__ = __add__

    def __neg__(self):
        return KElement(-self.ok, self.shift)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        return KElement(self.ok * other.ok, self.shift + other.shift)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = KElement.from_rational(self.field, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        v = self.ok.val()
        if not v.certified:
            raise ZeroDivisionError("inverse of zero-to-precision element")
        unit = self.ok.shift_down(v.value) if v.value else self.ok
        return KElement(unit.inverse(), -(self.shift + v.value))

    def unit_residue(self) -> FqElement:
        """Residue of self / pi^val(self)."""
        v = self.ok.val().require()
        u = self.ok.shift_down(v) if v else self.ok
        return u.residue()

    def residue_at(self, level) -> FqElement:
        """Residue of self / pi^level; zero when val > level, error if val < level."""
        v = self.val()
        if v.value > level or not v.certified:
            if v.value <= level:
                raise PrecisionExhausted("digit below the requested level is uncertified")
            return self.field.fq.zero()
        if v.value < level:
            raise ValueError("element has valuation below the requested level")
        return self.unit_residue()

    def log_pi_derivative(self):
        """dlog(pi)-coefficient of d(pi^shift * u): pi^shift (shift*u + u^[lp])."""
        f = self.field
        inner = f.from_rational(self.shift) * self.ok + self.ok.log_pi_derivative()
        return KElement(inner, self.shift)

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).is_zero_to_precision()

    def __repr__(self):
        return f"pi^{self.shift}*{self.ok!r}" if self.shift else repr(self.ok)
