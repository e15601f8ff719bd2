"""Ramification invariants of a degree-p Kummer character t^p = f along a
vertical component of a chart: the reduction loop maximizing v(f_red - 1),
Swan conductor and type, the refined-Swan germ (a twisted log 1-form), and
the characteristic form germ (Frobenius-twisted, coefficients exact p-th
powers) including the w(pi)-coefficient computed by a p-th-root base change
of the along-coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

from .chartalg import Chart, ChartFunction, FactoredFunction
from .exactcore import FqPoly, FqRationalFunction, fq_rational_pth_power_test
from .localfield import KElement, PrecisionExhausted


class TypeMismatch(Exception):
    """Base-changed classification contradicts the expected case table."""


TAME = "tame"
TYPE_I = "I"
TYPE_II = "II"


@dataclass
class RamificationProfile:
    component: str
    sw: int
    dt: int
    rtype: str
    v: object  # attained valuation of f_red - 1; None when v_C(f) is prime to p

    @property
    def wild(self):
        return self.rtype != TAME


@dataclass
class ComponentGerms:
    """Everything the cycle layer needs along one wild vertical component.

    rho, q: coefficients of dlog(x_axis), dlog(x_other) of the refined Swan
    germ, restricted to the component (rational functions of the coordinate,
    poles only at special points).  a, b: the w(x_axis), w(x_other)
    coefficients of the characteristic form germ; both are exact p-th powers,
    a_root and b_root are the stored roots.
    """
    profile: RamificationProfile
    chart: Chart
    axis: int
    f_red: object
    rho: object = None
    q: object = None
    a: object = None
    b: object = None
    a_root: object = None
    b_root: object = None
    base_change: dict = dfield(default_factory=dict)


def lift_fq_poly(chart, axis, poly: FqPoly) -> ChartFunction:
    """Coefficient-wise lift of GF(q)[t] into the chart, t = the coordinate
    along the axis component (x2 for axis 0, x1 for axis 1)."""
    field = chart.field
    terms = {}
    for j, c in enumerate(poly.coeffs):
        if c:
            key = (0, j) if axis == 0 else (j, 0)
            terms[key] = KElement.from_ok(field.from_fq(c))
    return ChartFunction(chart, terms)


@dataclass
class Reduction:
    """Result of the Kummer reduction along one component.

    v is the attained valuation of f_red - 1 (None when v_C(f) is prime to p
    and no unit normalization exists; equal to the cap for tame characters).
    residue is the leading residue function: of f_red - 1 at level v when
    0 < v < cap, of f_red itself when v = 0, and of the unit part of f when
    v is None (with vshift recording v_C(f) in that case).
    """
    f_red: FactoredFunction
    v: object
    residue: object = None
    vshift: int = 0


def kummer_reduce(f: FactoredFunction, axis, cap, max_steps=None):
    """Reduce the Kummer representative along the axis component.

    Multiplies f by explicit p-th powers to maximize v = v_C(f_red - 1),
    capped at cap = v_C((1 - zeta_p)^p).
    """
    chart = f.chart
    p = chart.field.p
    vC = f.weighted_val(axis).require()
    if vC % p != 0:
        unit_part = f.times(chart.var(axis), -vC) if vC else f
        return Reduction(f, None, unit_part.residue_along(axis), vC)
    if vC != 0:
        f = f.times(chart.var(axis), -vC)
    if max_steps is None:
        max_steps = cap + 2

    for _ in range(max_steps):
        den_val = sum(abs(n) * g.weighted_val(axis).require()
                      for g, n in f.factors if n < 0)
        trunc = den_val + cap + 1
        num, den = f.num_den(axis, maxlevel=trunc)
        diff = num - den
        vd = den.weighted_val(axis).require()
        vdiff = diff.weighted_val(axis)
        v = vdiff.value - vd
        if not vdiff.certified:
            if v >= cap:
                return Reduction(f, cap)
            raise PrecisionExhausted("cannot certify v(f_red - 1)")
        if v >= cap:
            return Reduction(f, cap)
        if v == 0:
            r = f.residue_along(axis)
            h = fq_rational_pth_power_test(r)
            if h is None:
                return Reduction(f, 0, r)
            f = f.times(lift_fq_poly(chart, axis, h.num), -p)
            f = f.times(lift_fq_poly(chart, axis, h.den), p)
            continue
        r = diff.residue_along(axis, vd + v) / den.residue_along(axis, vd)
        if v % p != 0:
            return Reduction(f, v, r)
        h = fq_rational_pth_power_test(r)
        if h is None:
            return Reduction(f, v, r)
        w = v // p
        hn = lift_fq_poly(chart, axis, h.num)
        hd = lift_fq_poly(chart, axis, h.den)
        mono = chart.var(axis) ** w
        # multiply by ((hd - hn * x^w)/hd)^p, cancelling the level-v residue
        f = f.times(hd - hn * mono, p).times(hd, -p)
    raise PrecisionExhausted("reduction loop did not terminate within the cap")


def zeta_normalizer(chart, axis):
    """Residue function of (1-zeta_p)^p along the axis component at its level
    e' * m_C: the twist normalizer of every germ on this chart."""
    field = chart.field
    level = field.e_prime * chart.exps[axis]
    z = chart.const(KElement.from_ok(field.zeta_factor))
    res = z.residue_along(axis, level)
    if res.is_zero():
        raise PrecisionExhausted("zeta normalizer residue vanished")
    return res


def log_germ(reduction: Reduction, chart, axis):
    """The refined-Swan germ from the graded data (v, leading residue).

    The graded piece of f_red - 1 at level v is R * x^v with R the residue
    function, and its dlog is (v R dlog x_axis + t R'(t) dlog x_other) / R^eps
    with eps = 1 exactly when v = 0 (the unit case f_red itself).  Dividing by
    (1 - zeta_p)^p twists by the normalizer residue.  This depends only on
    the class data (v, R), never on coefficient lifts.

    Returns (rho, q): the dlog(x_axis)- and dlog(x_other)-coefficients as
    rational functions on the component.
    """
    field = chart.field
    fq = field.fq
    t = FqRationalFunction(FqPoly.gen(fq))
    znorm = zeta_normalizer(chart, axis)
    r = reduction.residue
    if reduction.v is None:
        # f = x^V * u with V prime to p: dlog f = V dlog x + dlog(u-residue)
        rho = FqRationalFunction.from_const(fq, reduction.vshift) / znorm
        q = t * r.derivative() / r / znorm
        return rho, q
    v = reduction.v
    rho = v * r / znorm
    q = t * r.derivative() / znorm
    if v == 0:
        q = q / r
    return rho, q


def analyze_component(char_factors: FactoredFunction, axis, mult, component_id="C",
                      with_ch=True):
    """Full per-component analysis: profile, log germ, FW germ.

    with_ch=False skips the characteristic-form layer (used for the
    base-change sub-analysis, which only needs the profile and log germ).
    """
    chart = char_factors.chart
    field = chart.field
    p = field.p
    cap = field.e_prime * mult

    red = kummer_reduce(char_factors, axis, cap)
    f_red, v = red.f_red, red.v
    if v is not None and v >= cap:
        prof = RamificationProfile(component_id, 0, 1, TAME, v)
        return ComponentGerms(prof, chart, axis, f_red)

    sw = cap - v if v is not None else cap
    rho, q = log_germ(red, chart, axis)
    if rho.is_zero() and q.is_zero():
        raise PrecisionExhausted("refined Swan germ vanished at its pole order")
    rtype = TYPE_II if rho.is_zero() else TYPE_I
    dt = sw + 1 if rtype == TYPE_I else sw
    prof = RamificationProfile(component_id, sw, dt, rtype, v)
    germs = ComponentGerms(prof, chart, axis, f_red, rho=rho, q=q)
    if not with_ch:
        return germs

    # coordinate function t along the component, as a rational function
    fq = field.fq
    t = FqRationalFunction(FqPoly.gen(fq))
    zero = FqRationalFunction(FqPoly(fq, []))

    if rtype == TYPE_I:
        # the characteristic form is the residue projection: w(pi)-term only
        germs.a_root = rho
        germs.a = rho ** p
        germs.b_root = zero
        germs.b = zero
    else:
        # transverse coefficients are p-th powers of the rsw d-coefficients
        germs.b_root = q / t
        germs.b = germs.b_root ** p
        germs.a_root, germs.a, germs.base_change = _wpi_coefficient(
            char_factors, axis, mult, dt, component_id)
    return germs


def _wpi_coefficient(char_factors: FactoredFunction, axis, mult, dt, component_id):
    """w(pi)-coefficient of the characteristic form along a type II component.

    Adjoin a p-th root of the along-coordinate (substitute it by z^p), re-run
    the reduction: if the total dimension drops the coefficient is zero;
    otherwise the pulled-back character is of type I and the coefficient is
    the p-th power of its dlog(pi)-residue, descended to the original
    coordinate.
    """
    chart = char_factors.chart
    field = chart.field
    zero = FqRationalFunction(FqPoly(field.fq, []))
    # the along-coordinate of the component is x2 for an x1-axis component
    # and x1 for an x2-axis one; substitute it by z^p
    zchart = chart.pth_power_chart() if axis == 0 else chart.pth_power_chart_x1()
    zfac = FactoredFunction(zchart, [(zchart.transport(g), n)
                                     for g, n in char_factors.factors])
    sub = analyze_component(zfac, axis, mult, component_id + "'", with_ch=False)
    info = {"dt_prime": sub.profile.dt, "sw_prime": sub.profile.sw,
            "type_prime": sub.profile.rtype}
    if sub.profile.dt > dt:
        raise TypeMismatch("total dimension increased under the base change")
    if sub.profile.dt < dt:
        return zero, zero, info
    if sub.profile.rtype != TYPE_I:
        raise TypeMismatch("base-changed character of full total dimension must be of type I")
    a_root_z = sub.rho  # a function of z on the base-changed component
    a = a_root_z.frobenius_pth_power_descend()
    return a_root_z, a, info
