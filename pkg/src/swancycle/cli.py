"""Command-line front end: declarative TOML job files, the staged pipeline
(analyze | resolve | cycles | conductor | verify), and exact text/JSON
reports.

Exit codes: 0 success, 1 validation error, 2 precision ceiling reached,
3 conductor cross-check failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from math import comb

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .localfield import (LocalField, NonEisenstein, NoZetaP, PrecisionExhausted)
from .surface import (Coefficient, CrossCheckFailure, DepthExceeded,
                      KummerCharacter, ModelAnalysis, ModelError,
                      NonRationalCenter, SurfaceModel, clean_resolve, conductor,
                      describe_point, point_degree, verify_character)


class JobError(ValueError):
    pass


def _fraction(value, what="value"):
    try:
        if isinstance(value, bool):
            raise TypeError
        if isinstance(value, (int, str)):
            return Fraction(str(value))
        if isinstance(value, float) and value == int(value):
            return Fraction(int(value))
    except (ValueError, TypeError, ZeroDivisionError):
        pass
    raise JobError(f"cannot parse {what}: {value!r} (use integers or 'a/b' strings)")


def _coefficient(value, what="coefficient"):
    """Rational coefficients with an optional zeta term: 'a/b', 'c/d*zeta',
    'a/b+c/d*zeta', 'a/b-zeta', or a {rat=..., zeta=...} table."""
    if isinstance(value, dict):
        return Coefficient(_fraction(value.get("rat", 0), what),
                           _fraction(value.get("zeta", 0), what))
    if isinstance(value, str) and "zeta" in value:
        text = value.replace(" ", "")
        if not text.endswith("zeta"):
            raise JobError(f"cannot parse {what}: {value!r}")
        body = text[:-4]
        if body.endswith("*"):
            body = body[:-1]
        split = None
        for i in range(len(body) - 1, 0, -1):
            if body[i] in "+-" and body[i - 1] not in "/+-*":
                split = i
                break
        try:
            if split is None:
                rat = Fraction(0)
                ztext = body if body not in ("", "+", "-") else body + "1"
            else:
                rat = Fraction(body[:split])
                ztext = body[split:]
                if ztext in ("+", "-"):
                    ztext += "1"
            return Coefficient(rat, Fraction(ztext))
        except ValueError:
            raise JobError(f"cannot parse {what}: {value!r}")
    return Coefficient(_fraction(value, what))


class JobSpec:
    """Validated contents of a job file."""

    def __init__(self, data):
        field = data.get("field")
        if not isinstance(field, dict) or "p" not in field:
            raise JobError("missing [field] block with a prime p")
        self.p = int(field["p"])
        if self.p <= 2:
            raise JobError("p must be an odd prime > 2 (p = 2 is out of scope)")
        self.residue_degree = int(field.get("residue_degree", 1))
        eis = field.get("eisenstein", "cyclotomic")
        if eis == "cyclotomic":
            self.eisenstein = [Fraction(comb(self.p, i + 1)) for i in range(self.p)]
        else:
            if not isinstance(eis, list) or len(eis) < 2:
                raise JobError("eisenstein must be a coefficient list "
                               "(constant term first, monic)")
            self.eisenstein = [_fraction(c, "eisenstein coefficient") for c in eis]
        self.precision = field.get("precision")
        if self.precision is not None:
            self.precision = int(self.precision)

        char = data.get("character")
        if not isinstance(char, dict) or "factors" not in char:
            raise JobError("missing [character] block with factors")
        self.factors = []
        for item in char["factors"]:
            if not (isinstance(item, list) and len(item) == 2
                    and isinstance(item[0], list)):
                raise JobError("each factor must be [[coefficients...], exponent]")
            coeffs = [_coefficient(c, "factor coefficient") for c in item[0]]
            self.factors.append((coeffs, int(item[1])))
        if not self.factors:
            raise JobError("the character needs at least one factor")
        self.unit = _coefficient(char.get("unit", 1), "unit factor")

        surface = data.get("surface", {})
        self.include_infinity = surface.get("include_infinity")

        flags = data.get("flags", {})
        self.assert_proper = bool(flags.get("assert_proper", True))
        self.assert_trivial_swan_zero = bool(flags.get("assert_trivial_swan_zero", True))
        self.max_blowup_depth = int(flags.get("max_blowup_depth", 40))
        self.precision_ceiling = int(flags.get("precision_ceiling", 4096))

    @classmethod
    def load(cls, path):
        with open(path, "rb") as handle:
            return cls(tomllib.load(handle))

    def make_field(self, precision=None):
        return LocalField(self.p, residue_degree=self.residue_degree,
                          eisenstein=self.eisenstein,
                          precision=precision or self.precision)

    def make_character(self, field):
        return KummerCharacter(field, self.factors, unit=self.unit)


def with_precision_retries(job, runner, precision_override=None):
    """Run the pipeline, doubling the working precision on exhaustion."""
    field = job.make_field(precision_override)
    n = field.N
    while True:
        try:
            return runner(field), field
        except PrecisionExhausted:
            n *= 2
            if n > job.precision_ceiling:
                raise
            field = job.make_field(n)


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------

def _frac_str(x):
    return str(x) if x is not None else None


def _gid_str(gid):
    cid, pk = gid
    if pk[0] == "fin":
        return f"{cid}:t={','.join(str(c) for c in pk[1])}" if len(pk[1]) > 1 \
            else f"{cid}:t={pk[1][0]}"
    if pk[0] == "irr":
        return f"{cid}:irr{pk[1]}"
    return f"{cid}:t=inf"


def analysis_report(field, character, include_infinity=None):
    model = SurfaceModel.projective_line(field, character,
                                         include_infinity=include_infinity)
    analysis = ModelAnalysis(model, character)
    u_res = field.p_element().shift_down(field.e).residue()
    doc = {"field": {"p": field.p, "residue_degree": field.k, "e": field.e,
                     "e_prime": field.e_prime, "precision": field.N,
                     "p_unit_residue": str(u_res)},
           "components": {}, "profiles": {}, "ord_tables": {}, "rsw": {}, "ch": {}}
    for comp in model.vertical_components():
        doc["components"][comp.cid] = {"vertical": True, "multiplicity": comp.mult,
                                       "self_intersection": model.deg(comp.cid, comp.cid),
                                       "canonical_degree": model.kdeg[comp.cid]}
    for comp in model.components.values():
        if not comp.vertical:
            doc["components"][comp.cid] = {
                "vertical": False,
                "section": "inf" if comp.section == "inf" else comp.section_label}
    clean = True
    nondeg = True
    for cid, prof in analysis.profiles.items():
        doc["profiles"][cid] = {"sw": prof.sw, "dt": prof.dt, "type": prof.rtype}
        if prof.rtype == "tame":
            continue
        g = analysis.germs(cid, 0)
        doc["rsw"][cid] = {"dlog_pi_coefficient": repr(g.rho),
                           "dlog_t_coefficient": repr(g.q),
                           "pole_order": prof.sw}
        doc["ch"][cid] = {"wpi_coefficient": repr(g.a),
                          "wt_coefficient": repr(g.b),
                          "pole_order": field.p * prof.dt,
                          "base_change": dict(g.base_change)}
        table = []
        for pt, n, npr in analysis.ord_table(cid).values():
            table.append({"point": describe_point(pt), "degree": point_degree(pt),
                          "ord": n, "p_ord_prime": npr,
                          "ord_prime": _frac_str(Fraction(npr, field.p))})
            clean = clean and n == 0
            nondeg = nondeg and npr == 0
        doc["ord_tables"][cid] = table
    doc["clean"] = clean
    doc["non_degenerate"] = nondeg
    return doc


def resolve_report(field, character, max_depth):
    model = SurfaceModel.projective_line(field, character)
    records, s_x = clean_resolve(model, character, max_depth=max_depth)
    return {"blowups": [{"center_component": r.center_component,
                         "center_point": describe_point(r.center_point),
                         "exceptional": r.exceptional,
                         "origin": _gid_str(r.origin),
                         "sigma_delta": r.sigma_delta} for r in records],
            "s_x": {_gid_str(k): v for k, v in s_x.items()}}


def conductor_report(field, character, job):
    rep = conductor(field, character,
                    assert_proper=job.assert_proper,
                    assert_trivial_swan_zero=job.assert_trivial_swan_zero,
                    max_depth=job.max_blowup_depth)
    doc = {
        "profiles": {cid: {"sw": p.sw, "dt": p.dt, "type": p.rtype}
                     for cid, p in rep.profiles.items()},
        "clean": rep.clean,
        "non_degenerate": rep.non_degenerate,
        "blowups": [{"center_component": r.center_component,
                     "center_point": describe_point(r.center_point),
                     "exceptional": r.exceptional,
                     "origin": _gid_str(r.origin),
                     "sigma_delta": r.sigma_delta} for r in rep.blowups],
        "s_x": {_gid_str(k): v for k, v in rep.s_x.items()},
        "t_x": {_gid_str(k): _frac_str(v) for k, v in rep.t_x.items()},
        "cclog": {
            "bundles": [{"component": cid, "coefficient": c, "pairing_degree": d}
                        for cid, c, d in rep.cclog.bundle_terms],
            "fibers": {_gid_str(k): {"coefficient": _frac_str(c), "degree": d}
                       for k, (c, d) in rep.cclog.fiber_terms.items()}},
        "fcc": {
            "bundles": [{"component": cid, "coefficient": _frac_str(c),
                         "pairing_degree": d}
                        for cid, c, d in rep.fcc.bundle_terms],
            "fibers": {_gid_str(k): {"coefficient": _frac_str(c), "degree": d}
                       for k, (c, d) in rep.fcc.fiber_terms.items()}},
        "cclog_pairing": _frac_str(rep.cclog_pairing),
        "fcc_pairing": _frac_str(rep.fcc_pairing),
        "delta_swan": _frac_str(rep.delta_sw),
        "swan_h1": _frac_str(rep.swan_h1),
    }
    return doc


def verify_report(field, character, job, suites):
    failures, witnesses = verify_character(field, character,
                                           max_depth=job.max_blowup_depth)
    if suites != "all":
        failures = {k: v for k, v in failures.items() if k == suites}
    doc = {"suites": {k: {"passed": not v, "failures": v}
                      for k, v in failures.items()},
           "all_passed": all(not v for v in failures.values())}
    if "base" in witnesses:
        doc["conductor"] = {"delta_swan": _frac_str(witnesses["base"].delta_sw),
                            "swan_h1": _frac_str(witnesses["base"].swan_h1)}
        doc["resolution_stages_checked"] = witnesses.get("stages")
    return doc


def render_text(doc, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(doc, dict):
        for key, value in doc.items():
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.append(render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {render_text_scalar(value)}")
    elif isinstance(doc, list):
        for item in doc:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(render_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {render_text_scalar(item)}")
    else:
        lines.append(f"{pad}{render_text_scalar(doc)}")
    return "\n".join(lines)


def render_text_scalar(value):
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (dict, list)) and not value:
        return "(none)"
    return str(value)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="swancycle",
        description="Exact ramification invariants and characteristic-cycle "
                    "conductors of degree-p Kummer covers of arithmetic surfaces.")
    parser.add_argument("command",
                        choices=["analyze", "resolve", "cycles", "conductor", "verify"])
    parser.add_argument("--input", required=True, help="TOML job file")
    parser.add_argument("--precision", type=int, default=None,
                        help="override the working pi-adic precision")
    parser.add_argument("--max-depth", type=int, default=None,
                        help="override the blowup depth bound")
    parser.add_argument("--format", choices=["text", "json"], default="text")
    parser.add_argument("--suite", default="all",
                        choices=["all", "integrality", "rationality", "comparison",
                                 "degrees", "invariance", "conductor"])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        job = JobSpec.load(args.input)
    except (OSError, tomllib.TOMLDecodeError, JobError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.max_depth is not None:
        job.max_blowup_depth = args.max_depth

    def runner(field):
        character = job.make_character(field)
        doc = {"command": args.command,
               "field": {"p": field.p, "residue_degree": field.k, "e": field.e,
                         "e_prime": field.e_prime, "precision": field.N},
               "character": {"unit": str(job.unit),
                             "factors": [{"coefficients": [str(c) for c in cs],
                                          "exponent": n}
                                         for cs, n in job.factors]}}
        if character.is_globally_trivial():
            doc["trivial"] = True
            if args.command in ("conductor", "cycles"):
                doc["delta_swan"] = "0"
                doc["swan_h1"] = "0"
            return doc
        if args.command == "analyze":
            doc.update(analysis_report(field, character, job.include_infinity))
        elif args.command == "resolve":
            doc.update(analysis_report(field, character, job.include_infinity))
            doc.update(resolve_report(field, character, job.max_blowup_depth))
        elif args.command in ("cycles", "conductor"):
            doc.update(analysis_report(field, character, job.include_infinity))
            doc.update(conductor_report(field, character, job))
        elif args.command == "verify":
            doc.update(verify_report(field, character, job, args.suite))
        return doc

    try:
        doc, field = with_precision_retries(job, runner, args.precision)
    except (NonEisenstein, NoZetaP, ModelError, NonRationalCenter,
            DepthExceeded, JobError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except PrecisionExhausted as exc:
        print(f"error: precision ceiling reached: {exc}", file=sys.stderr)
        return 2
    except CrossCheckFailure as exc:
        print(f"error: conductor cross-check failed: {exc}", file=sys.stderr)
        return 3

    if args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(render_text(doc))
    if args.command == "verify" and not doc.get("all_passed", True):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
