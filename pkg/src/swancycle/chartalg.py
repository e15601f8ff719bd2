"""Polynomial algebra on 2-variable charts of blowup models over O_K.

A chart has coordinates (x1, x2) and a relation pi = U * x1^a1 * x2^a2 with U
a unit at the origin.  The initial chart of the projective line is (pi, y)
with a = (1, 0) and U = 1; point blowups and coordinate shifts produce new
charts whose functions are transported by exact monomial substitutions.

Divisor valuations along a coordinate axis are monomial and read off exactly;
reductions to the residue field of an axis component land in GF(q)(t).
"""

from __future__ import annotations

from fractions import Fraction

from .exactcore import FqPoly, FqRationalFunction
from .localfield import KElement, PiValuation, PrecisionExhausted


class Chart:
    """A coordinate chart with relation pi = U * x1^a1 * x2^a2."""

    _counter = 0

    def __init__(self, field, names, exps, unit=None, parent=None, transform=None,
                 tau=None, label=None):
        self.field = field
        self.names = tuple(names)
        self.exps = tuple(exps)
        self.parent = parent
        self.transform = transform  # None | "shift" | "blow_a" | "blow_b" | "pth"
        self.tau = tau
        if label is None:
            Chart._counter += 1
            label = f"chart{Chart._counter}"
        self.label = label
        if unit is None:
            unit = ChartFunction(self, {(0, 0): KElement.from_rational(field, 1)})
        elif unit.chart is not self:
            unit = ChartFunction(self, dict(unit.terms))
        self.unit = unit
        self._pi_fn = None
        self._w_fn = None
        self._unit_res = {}

    # -- derived objects -----------------------------------------------------

    def zero(self):
        return ChartFunction(self, {})

    def const(self, c):
        if isinstance(c, (int, Fraction)):
            c = KElement.from_rational(self.field, c)
        return ChartFunction(self, {(0, 0): c})

    def monomial(self, i, j, coeff=1):
        if isinstance(coeff, (int, Fraction)):
            coeff = KElement.from_rational(self.field, coeff)
        return ChartFunction(self, {(i, j): coeff})

    def var(self, axis):
        return self.monomial(1, 0) if axis == 0 else self.monomial(0, 1)

    @property
    def pi_fn(self):
        if self._pi_fn is None:
            a1, a2 = self.exps
            self._pi_fn = self.unit * self.monomial(a1, a2)
        return self._pi_fn

    @property
    def w_fn(self):
        """W = U - U^[lp], the unit denominator of the dlog calculus, where
        U^[lp] is the dlog(pi)-coefficient part of dU."""
        if self._w_fn is None:
            self._w_fn = self.unit - self.unit.log_pi_deriv()
        return self._w_fn

    def unit_residue_along(self, axis):
        """Residue of U along the axis component, an FqPoly in the coordinate."""
        if axis not in self._unit_res:
            self._unit_res[axis] = self.unit.residue_along(axis, 0).num
        return self._unit_res[axis]

    # -- chart constructors ----------------------------------------------------

    def shifted(self, tau):
        """Recenter x2 at tau: new chart with x2_new = x2 - tau.

        The old x2^a2 factor of pi folds into the unit; tau must be a unit of
        O_K when a2 > 0.
        """
        if isinstance(tau, (int, Fraction)):
            tau = self.field.from_rational(tau)
        a1, a2 = self.exps
        new = Chart(self.field, self.names, (a1, 0), parent=self, transform="shift",
                    tau=tau, label=self.label + "s")
        u = new.transport(self.unit)
        if a2:
            shifted_x2 = new.var(1) + new.const(KElement.from_ok(tau))
            u = u * shifted_x2 ** a2
        new.unit = u
        new._pi_fn = None
        return new

    def chart_a(self):
        """Blowup chart with x2 = x1 * x2_new; exceptional is the x1-axis."""
        a1, a2 = self.exps
        new = Chart(self.field, self.names, (a1 + a2, a2), parent=self,
                    transform="blow_a", label=self.label + "a")
        new.unit = new.transport(self.unit)
        return new

    def chart_b(self):
        """Blowup chart with x1 = x1_new * x2; exceptional is the x2-axis."""
        a1, a2 = self.exps
        new = Chart(self.field, self.names, (a1, a1 + a2), parent=self,
                    transform="blow_b", label=self.label + "b")
        new.unit = new.transport(self.unit)
        return new

    def pth_power_chart(self):
        """Base-change chart with x2 = z^p (p-th root of the along-coordinate)."""
        a1, a2 = self.exps
        p = self.field.p
        new = Chart(self.field, self.names, (a1, p * a2), parent=self,
                    transform="pth", label=self.label + "z")
        new.unit = new.transport(self.unit)
        return new

    def pth_power_chart_x1(self):
        """Base-change chart with x1 = z^p."""
        a1, a2 = self.exps
        p = self.field.p
        new = Chart(self.field, self.names, (p * a1, a2), parent=self,
                    transform="pth_x1", label=self.label + "z1")
        new.unit = new.transport(self.unit)
        return new

    def transport(self, f):
        """Transport a function of the parent chart into this chart."""
        if f.chart is not self.parent:
            raise ValueError("function does not live on the parent chart")
        if self.transform == "shift":
            return ChartFunction(self, _shift_terms(f, self.tau))
        out = {}
        p = self.field.p
        for (i, j), c in f.terms.items():
            if self.transform == "blow_a":
                key = (i + j, j)
            elif self.transform == "blow_b":
                key = (i, i + j)
            elif self.transform == "pth":
                key = (i, p * j)
            elif self.transform == "pth_x1":
                key = (p * i, j)
            else:
                raise ValueError("root chart has no transport")
            out[key] = out[key] + c if key in out else c
        return ChartFunction(self, out)

    def transport_chain(self, f, src_chart):
        """Transport f from an ancestor chart src_chart into this chart."""
        chain = []
        c = self
        while c is not src_chart:
            if c.parent is None:
                raise ValueError("src_chart is not an ancestor")
            chain.append(c)
            c = c.parent
        for c in reversed(chain):
            f = c.transport(f)
        return f

    def __repr__(self):
        a1, a2 = self.exps
        return f"Chart({self.label}: pi = U*{self.names[0]}^{a1}*{self.names[1]}^{a2})"


def _shift_terms(f, tau):
    """Terms of f(x1, x2 + tau)."""
    field = f.chart.field
    out = {}
    tau_k = KElement.from_ok(tau)
    maxj = max((j for (_, j) in f.terms), default=0)
    # binomial table of tau powers
    powers = [KElement.from_rational(field, 1)]
    for _ in range(maxj):
        powers.append(powers[-1] * tau_k)
    from math import comb
    for (i, j), c in f.terms.items():
        for m in range(j + 1):
            key = (i, m)
            add = c * powers[j - m] * KElement.from_rational(field, comb(j, m))
            out[key] = out[key] + add if key in out else add
    return out


class ChartFunction:
    """Finite sum of monomials x1^i x2^j with K-coefficients on a chart."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart, terms):
        self.chart = chart
        self.terms = {k: v for k, v in terms.items() if not v.is_zero_to_precision()}

    def is_zero_to_precision(self):
        return not self.terms

    def _coerce(self, other):
        if isinstance(other, ChartFunction):
            if other.chart is not self.chart:
                raise ValueError("chart mismatch")
            return other
        if isinstance(other, (int, Fraction, KElement)):
            return self.chart.const(other)
        raise TypeError(f"cannot coerce {other!r}")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return ChartFunction(self.chart, out)

    __radd__ = __add__

    def __neg__(self):
        return ChartFunction(self.chart, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                k = (i1 + i2, j1 + j2)
                v = a * b
                out[k] = out[k] + v if k in out else v
        return ChartFunction(self.chart, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a chart function")
        result = self.chart.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c):
        if isinstance(c, (int, Fraction)):
            c = KElement.from_rational(self.chart.field, c)
        return ChartFunction(self.chart, {k: v * c for k, v in self.terms.items()})

    def dx(self, axis):
        """Euler operator x_axis * d/dx_axis."""
        out = {}
        for (i, j), c in self.terms.items():
            m = i if axis == 0 else j
            if m:
                out[(i, j)] = c * Fraction(m)
        return ChartFunction(self.chart, out)

    def log_pi_deriv(self):
        """Coefficient-wise dlog(pi)-part of the coefficient differentials."""
        out = {}
        for k, c in self.terms.items():
            d = c.log_pi_derivative()
            if not d.is_zero_to_precision():
                out[k] = d
        return ChartFunction(self.chart, out)

    # -- valuations and residues -------------------------------------------------

    def weighted_val(self, axis) -> PiValuation:
        """Order of vanishing along the axis component (a monomial valuation).

        The weight of kappa * x1^i x2^j along {x1 = 0} is i + a1 * v_pi(kappa).
        """
        a = self.chart.exps[axis]
        best = None
        floor = None
        for (i, j), c in self.terms.items():
            m = i if axis == 0 else j
            v = c.val()
            w = m + a * v.value
            if v.certified:
                if best is None or w < best:
                    best = w
            else:
                if floor is None or w < floor:
                    floor = w
        if best is None:
            return PiValuation(floor if floor is not None else 10 ** 9, False)
        if floor is not None and floor <= best:
            return PiValuation(floor, False)
        return PiValuation(best, True)

    def residue_along(self, axis, level):
        """The level-graded piece along the axis component, in GF(q)[t].

        For {x1 = 0}: each term kappa x1^i x2^j with w = v_pi(kappa) and
        i + a1 w = level contributes res(kappa/pi^w) * Ubar^w * t^(j + a2 w),
        where Ubar is the residue of the chart unit along the axis.
        """
        chart = self.chart
        a_self = chart.exps[axis]
        a_other = chart.exps[1 - axis]
        if a_self < 1:
            raise ValueError("residue only along a component with positive pi-exponent")
        fq = chart.field.fq
        acc = FqPoly(fq, [])
        for (i, j), c in self.terms.items():
            m, n = (i, j) if axis == 0 else (j, i)
            v = c.val()
            if not v.certified:
                if m + a_self * v.value <= level:
                    raise PrecisionExhausted("residue digit not certified")
                continue
            if m + a_self * v.value == level:
                contrib = FqPoly.const(fq, c.unit_residue())
                tpow = n + a_other * v.value
                if v.value:
                    contrib = contrib * chart.unit_residue_along(axis) ** v.value
                contrib = contrib * FqPoly(fq, [0] * tpow + [1])
                acc = acc + contrib
        return FqRationalFunction(acc)

    def truncate_weight(self, axis, maxlevel):
        """Drop terms of weight > maxlevel along the axis (valid in products
        of nonnegative-weight factors when only levels <= maxlevel are read)."""
        a = self.chart.exps[axis]
        out = {}
        for (i, j), c in self.terms.items():
            m = i if axis == 0 else j
            if m + a * c.val().value <= maxlevel or not c.val().certified:
                out[(i, j)] = c
        return ChartFunction(self.chart, out)

    def __repr__(self):
        if not self.terms:
            return "0"
        n1, n2 = self.chart.names
        parts = []
        for (i, j), c in sorted(self.terms):
            mono = "*".join(s for s in (f"{n1}^{i}" if i else "", f"{n2}^{j}" if j else "") if s)
            parts.append(f"({c!r})" + ("*" + mono if mono else ""))
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Factored functions and the dlog calculus
# ---------------------------------------------------------------------------

class FactoredFunction:
    """A formal product prod_i g_i^{n_i} of chart functions, n_i in Z.

    Characters are carried in this shape: dlog and per-component orders read
    off factorwise without expansion, and reduction steps multiply in exact
    p-th powers.
    """

    def __init__(self, chart, factors):
        self.chart = chart
        self.factors = [(g, int(n)) for g, n in factors if n != 0]

    def times(self, g, n=1):
        return FactoredFunction(self.chart, self.factors + [(g, n)])

    def weighted_val(self, axis):
        total = 0
        certified = True
        for g, n in self.factors:
            v = g.weighted_val(axis)
            if not v.certified:
                raise PrecisionExhausted("factor valuation not certified")
            total += n * v.value
        return PiValuation(total, certified)

    def transport_into(self, chart):
        return FactoredFunction(chart, [(chart.transport_chain(g, self.chart), n)
                                        for g, n in self.factors])

    def num_den(self, axis=None, maxlevel=None):
        """Expanded numerator and denominator; optionally weight-truncated."""
        num = self.chart.const(1)
        den = self.chart.const(1)
        for g, n in self.factors:
            for _ in range(abs(n)):
                if n > 0:
                    num = num * g
                else:
                    den = den * g
                if axis is not None and maxlevel is not None:
                    num = num.truncate_weight(axis, maxlevel)
                    den = den.truncate_weight(axis, maxlevel)
        return num, den

    def residue_along(self, axis):
        """Image in kappa(C) = GF(q)(t) of a product of valuation-0 factors,
        as a reduced rational function; factors may have nonzero valuation,
        in which case the unit-part residue is taken factorwise."""
        fq = self.chart.field.fq
        out = FqRationalFunction(FqPoly.const(fq, 1))
        for g, n in self.factors:
            v = g.weighted_val(axis).require()
            r = g.residue_along(axis, v)
            if r.is_zero():
                raise PrecisionExhausted("vanishing leading residue")
            out = out * r ** n
        return out

    def dlog_num_den(self):
        """dlog(prod g^n) = (A1 dlog x1 + A2 dlog x2) / B, as chart functions.

        Uses the log-symbol calculus: for a term kappa x1^i x2^j of g, the
        differential is the term times (i dlog x1 + j dlog x2 + v dlog pi)
        with v = v_pi(kappa), and dlog pi expands through the chart relation
        dlog pi = dlog U + a1 dlog x1 + a2 dlog x2.
        """
        chart = self.chart
        W = chart.w_fn
        lam = [chart.unit.dx(axis) + chart.unit.scale(chart.exps[axis])
               for axis in (0, 1)]
        nums = [chart.zero(), chart.zero()]
        den = W
        gs = [g for g, _ in self.factors]
        for idx, (g, n) in enumerate(self.factors):
            glp = g.log_pi_deriv()
            rest = chart.const(Fraction(n))
            for k, h in enumerate(gs):
                if k != idx:
                    rest = rest * h
            for axis in (0, 1):
                ng = g.dx(axis) * W + glp * lam[axis]
                nums[axis] = nums[axis] + ng * rest
        for g in gs:
            den = den * g
        return nums[0], nums[1], den


class NotAUnit(ValueError):
    """The function does not have valuation zero along the component."""


def reduce_to_component(f, axis):
    """Image of a valuation-0 factored function in the residue field of an
    axis component, as an exact rational function over GF(q)."""
    v = f.weighted_val(axis).require()
    if v != 0:
        raise NotAUnit(f"valuation along the component is {v}, not 0")
    return f.residue_along(axis)
