"""Instance files: parsing, validation and evaluation.

An instance is a JSON object with a ``format`` tag, a ``kind``, a
kind-specific ``payload`` and an optional ``expected`` block.  The field
reference lives in docs/instance-schema.md.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import lattice
from .graded import (
    INTEGRAL_CAVEAT,
    BinomialPresentation,
    GradedExtension,
    GradedTower,
    finiteness_test,
    integrality_test,
    p_power_inclusion,
    qf_degree,
    substitution_check,
)
from .monoid import AffineMonoid, Finite, member, par_points, saturation_member
from .series import (
    BeyondTruncation,
    Polynomial,
    SeriesError,
    TruncatedSeries,
    default_seed,
    random_unit_series,
    series_order,
    sqrt_branch,
)
from .values import OrderedGroup, ValueGroupError
from .verifier import MonomialExtension, VerifierError, analyze, kummer_symmetric_certificate

FORMAT = "gradval-instance/1"
KINDS = ("monomial_extension", "graded_extension", "presentation_pair", "monoid", "series_valuation")


class InstanceError(ValueError):
    """Invalid instance; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class Instance:
    kind: str
    payload: dict
    expected: dict = field(default_factory=dict)
    source: str = "<memory>"


# -- field readers ---------------------------------------------------------

def _get(obj: dict, key: str, path: str, default: Any = ..., kind: type | tuple | None = None):
    if not isinstance(obj, dict):
        raise InstanceError(path, "expected an object")
    if key not in obj:
        if default is ...:
            raise InstanceError(f"{path}.{key}", "missing required field")
        return default
    val = obj[key]
    if kind is not None and (not isinstance(val, kind) or (isinstance(val, bool) and kind is int)):
        raise InstanceError(f"{path}.{key}", f"expected {_kind_name(kind)}, got {type(val).__name__}")
    return val


def _kind_name(kind) -> str:
    names = {int: "an integer", str: "a string", list: "an array", dict: "an object", bool: "a boolean"}
    if isinstance(kind, tuple):
        return " or ".join(names.get(k, k.__name__) for k in kind)
    return names.get(kind, kind.__name__)


def _rational(x, path: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise InstanceError(path, "use an integer or a string like \"3/4\" (floats are inexact)")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise InstanceError(path, f"{x!r} is not a rational number") from None
    raise InstanceError(path, f"expected a rational, got {type(x).__name__}")


def _int(x, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise InstanceError(path, f"expected an integer, got {x!r}")
    return x


def _vector(x, path: str, length: int | None = None, integral: bool = False) -> tuple:
    if not isinstance(x, list):
        raise InstanceError(path, "expected an array")
    if length is not None and len(x) != length:
        raise InstanceError(path, f"expected {length} entries, got {len(x)}")
    read = _int if integral else _rational
    return tuple(read(c, f"{path}[{i}]") for i, c in enumerate(x))


def _matrix(x, path: str, integral: bool = True) -> list[tuple]:
    if not isinstance(x, list) or not x:
        raise InstanceError(path, "expected a nonempty array of rows")
    rows = [_vector(r, f"{path}[{i}]", integral=integral) for i, r in enumerate(x)]
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InstanceError(path, f"ragged rows (lengths {[len(r) for r in rows]})")
    return rows


def _group(payload: dict, path: str, rank: int | None = None) -> OrderedGroup:
    basis = _get(payload, "basis", path, ["rat"], list)
    lex = _get(payload, "lex_prefix", path, 0, int)
    try:
        g = OrderedGroup.of(*basis, lex_prefix=lex)
    except (ValueGroupError, ValueError, TypeError) as exc:
        raise InstanceError(f"{path}.basis", str(exc)) from None
    if rank is not None and g.rank != rank:
        raise InstanceError(f"{path}.basis", f"group has rank {g.rank}, vectors have length {rank}")
    return g


def _elements(payload: dict, key: str, path: str, group: OrderedGroup | None):
    rows = _matrix(_get(payload, key, path, kind=list), f"{path}.{key}", integral=False)
    if group is None:
        return rows
    if len(rows[0]) != group.rank:
        raise InstanceError(f"{path}.{key}", f"vectors have length {len(rows[0])}, group rank is {group.rank}")
    return [group(*r) for r in rows]


# -- loading ---------------------------------------------------------------

def loads(text: str, source: str = "<string>") -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return from_dict(data, source)


def load(path: str | Path) -> Instance:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InstanceError(str(p), exc.strerror or str(exc)) from None
    return loads(text, str(p))


def from_dict(data: Any, source: str = "<memory>") -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("$", "top level must be an object")
    fmt = _get(data, "format", "$", kind=str)
    if fmt != FORMAT:
        raise InstanceError("$.format", f"unsupported format {fmt!r}, expected {FORMAT!r}")
    kind = _get(data, "kind", "$", kind=str)
    if kind not in KINDS:
        raise InstanceError("$.kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    payload = _get(data, "payload", "$", kind=dict)
    expected = _get(data, "expected", "$", {}, dict)
    inst = Instance(kind, payload, expected, source)
    build(inst)  # validate before any computation
    return inst


# -- building domain objects -----------------------------------------------

def _build_monomial(pl: dict, path: str = "$.payload"):
    s = _get(pl, "s", path, kind=int)
    n = _get(pl, "n", path, kind=int)
    a = _matrix(_get(pl, "A", path, kind=list), f"{path}.A")
    g = _group(pl, path)
    ys = _elements(pl, "y_values", path, g)
    flags = _get(pl, "unit_flags", path, [], list)
    names = _get(pl, "names", path, [], list)
    try:
        ext = MonomialExtension(s, n, a, ys, tuple(bool(f) for f in flags), tuple(names))
    except (VerifierError, lattice.LatticeError) as exc:
        raise InstanceError(path, str(exc)) from None
    kummer = _get(pl, "kummer", path, None, dict)
    z = None
    if kummer is not None:
        text = _get(kummer, "z", f"{path}.kummer", kind=str)
        try:
            z = Polynomial.parse(text, ext.names)
        except SeriesError as exc:
            raise InstanceError(f"{path}.kummer.z", str(exc)) from None
        if not z.terms:
            raise InstanceError(f"{path}.kummer.z", "z is zero")
        z = (dict(z.terms), bool(_get(kummer, "strict", f"{path}.kummer", False, bool)))
    return ext, z


def _build_graded_level(pl: dict, path: str) -> GradedExtension:
    g = _group(pl, path)
    s1 = _elements(pl, "s1", path, g)
    s2 = _elements(pl, "s2", path, g)
    f = _get(pl, "f", path, 1, int)
    try:
        return GradedExtension(AffineMonoid(s1, g, label="S1"), AffineMonoid(s2, g, label="S2"), f)
    except (ValueError, AssertionError) as exc:
        raise InstanceError(path, str(exc)) from None


def _build_graded(pl: dict, path: str = "$.payload"):
    levels = _get(pl, "levels", path, None, list)
    if levels is None:
        return _build_graded_level(pl, path)
    exts = []
    for i, lv in enumerate(levels):
        lp = f"{path}.levels[{i}]"
        merged = {"basis": pl.get("basis", ["rat"]), "lex_prefix": pl.get("lex_prefix", 0), **lv}
        exts.append((_get(lv, "level", lp, i + 1, int), _build_graded_level(merged, lp)))
    return GradedTower(exts, _get(pl, "label", path, "", str), bool(_get(pl, "surrogate", path, False, bool)))


def _build_presentation(pl: dict, path: str) -> BinomialPresentation:
    vars_ = _get(pl, "vars", path, kind=list)
    if not all(isinstance(v, str) for v in vars_):
        raise InstanceError(f"{path}.vars", "variable names must be strings")
    rels = []
    for i, r in enumerate(_get(pl, "relations", path, kind=list)):
        rp = f"{path}.relations[{i}]"
        if not (isinstance(r, list) and len(r) == 2 and all(isinstance(side, dict) for side in r)):
            raise InstanceError(rp, "a relation is a pair [lhs, rhs] of {variable: exponent} objects")
        rels.append(tuple({k: _int(e, f"{rp}.{k}") for k, e in side.items()} for side in r))
    try:
        if "values" in pl:
            vals = {k: _rational(v, f"{path}.values.{k}") for k, v in _get(pl, "values", path, kind=dict).items()}
            return BinomialPresentation(vars_, rels, vals)
        anchor = _get(pl, "anchor", path, kind=list)
        if len(anchor) != 2 or not isinstance(anchor[0], str):
            raise InstanceError(f"{path}.anchor", "expected [variable, value]")
        return BinomialPresentation.from_relations(vars_, rels, anchor[0], _rational(anchor[1], f"{path}.anchor[1]"))
    except (ValueError, KeyError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError(path, str(exc)) from None


def _build_pair(pl: dict, path: str = "$.payload"):
    src = _build_presentation(_get(pl, "src", path, kind=dict), f"{path}.src")
    dst = _build_presentation(_get(pl, "dst", path, kind=dict), f"{path}.dst")
    mapping = _get(pl, "map", path, kind=dict)
    for k, v in mapping.items():
        if not isinstance(v, dict):
            raise InstanceError(f"{path}.map.{k}", "image must be a {variable: exponent} object")
        for w, e in v.items():
            _int(e, f"{path}.map.{k}.{w}")
    return src, dst, mapping


def _build_monoid(pl: dict, path: str = "$.payload"):
    g = _group(pl, path) if "basis" in pl else None
    gens = _elements(pl, "generators", path, g)
    try:
        mon = AffineMonoid(gens, g)
    except ValueError as exc:
        raise InstanceError(f"{path}.generators", str(exc)) from None
    queries = _get(pl, "queries", path, [], list)
    qs = [_vector(q, f"{path}.queries[{i}]", mon.dim) for i, q in enumerate(queries)]
    return mon, qs


def _series_source(spec: dict, path: str, truncation: int, seed: int, built: dict) -> TruncatedSeries:
    if "coeffs" in spec:
        return TruncatedSeries.from_coeffs(list(_vector(spec["coeffs"], f"{path}.coeffs")), truncation)
    if "random_unit" in spec:
        return random_unit_series(truncation, _get(spec, "seed", path, seed, int))
    if "sqrt_branch_of" in spec:
        ref = spec["sqrt_branch_of"]
        if ref not in built:
            raise InstanceError(f"{path}.sqrt_branch_of", f"{ref!r} must be defined earlier")
        try:
            return sqrt_branch(built[ref])
        except SeriesError as exc:
            raise InstanceError(path, str(exc)) from None
    raise InstanceError(path, "expected one of coeffs, random_unit, sqrt_branch_of")


def _build_series(pl: dict, path: str = "$.payload", truncation: int | None = None):
    variables = _get(pl, "variables", path, kind=list)
    n = truncation if truncation is not None else _get(pl, "truncation", path, 64, int)
    if n < 1:
        raise InstanceError(f"{path}.truncation", "must be positive")
    seed = _get(pl, "seed", path, default_seed(), int)
    try:
        f = Polynomial.parse(_get(pl, "f", path, kind=str), variables)
    except SeriesError as exc:
        raise InstanceError(f"{path}.f", str(exc)) from None
    subs_spec = _get(pl, "substitutions", path, kind=dict)
    built: dict = {}
    for v, spec in subs_spec.items():
        if not isinstance(spec, dict):
            raise InstanceError(f"{path}.substitutions.{v}", "expected an object")
        built[v] = _series_source(spec, f"{path}.substitutions.{v}", n, seed, built)
    missing = [v for v in variables if v not in built]
    if missing:
        raise InstanceError(f"{path}.substitutions", f"no substitution for {missing}")
    return f, built


def build(inst: Instance, **opts):
    kind, pl = inst.kind, inst.payload
    if kind == "monomial_extension":
        return _build_monomial(pl)
    if kind == "graded_extension":
        return _build_graded(pl)
    if kind == "presentation_pair":
        return _build_pair(pl)
    if kind == "monoid":
        return _build_monoid(pl)
    return _build_series(pl, truncation=opts.get("truncation"))


# -- evaluation ------------------------------------------------------------

def _str(x):
    if isinstance(x, (list, tuple)):
        return [_str(y) for y in x]
    return str(x)


def evaluate(inst: Instance, bound: int | None = None, truncation: int | None = None) -> dict:
    """Compute the report for ``inst`` and compare it with ``expected``."""
    kind, pl = inst.kind, inst.payload
    report: dict = {"kind": kind, "source": inst.source}
    if kind == "monomial_extension":
        ext, z = build(inst)
        rep = analyze(ext, bound)
        report.update(rep.to_dict())
        ok = rep.ok
        if z is not None:
            cert = kummer_symmetric_certificate(z[0], ext, strict=z[1])
            report["kummer"] = {
                "S_values": [None if v is None else str(v) for v in cert.S_values],
                "inequalities_ok": cert.inequalities_ok,
                "equation": cert.equation_text(),
                "equation_value": str(cert.equation_value),
            }
            ok = ok and cert.inequalities_ok and cert.equation_value == 0
        report["verdict"] = "ok" if ok else "failed"
        report["witnesses"] = [] if ok else list(rep.notes)
    elif kind == "graded_extension":
        obj = build(inst)
        if isinstance(obj, GradedTower):
            per = [integrality_test(e) for _, e in obj.levels]
            bad = next((r for r in per if not r.integral), None)
            report["verdict"] = "NotIntegral" if bad else "Integral"
            report["witnesses"] = [str(bad.witness)] if bad else []
            if not bad:
                fin = finiteness_test(obj)
                report["finiteness"] = fin.verdict
                report["levels"] = {str(k): v for k, v in getattr(fin, "counts", {}).items()}
            report["surrogate"] = obj.surrogate
        else:
            res = integrality_test(obj)
            report["verdict"] = res.verdict
            report["witnesses"] = [str(res.witness)] if res.witness is not None else []
            report["certificates"] = {k: c.multiple for k, c in res.certificates.items()}
            if res.integral:
                fin = finiteness_test(obj)
                report["finiteness"] = fin.verdict
                if isinstance(fin, Finite):
                    report["module_generators"] = _str(fin.generators)
            try:
                report["qf_degree"] = qf_degree(obj)
            except ValueError:
                report["qf_degree"] = None
            pp = pl.get("p_power")
            if isinstance(pp, dict):
                inc = p_power_inclusion(obj, _int(pp.get("p"), "$.payload.p_power.p"),
                                        _int(pp.get("n", 1), "$.payload.p_power.n"))
                report["p_power_inclusion"] = inc.holds
                report["p_power_witnesses"] = _str(inc.witnesses)
        report["caveat"] = INTEGRAL_CAVEAT
    elif kind == "presentation_pair":
        src, dst, mapping = build(inst)
        j = truncation if truncation is not None else pl.get("truncation")
        if j is not None:
            src, dst = src.truncated(j), dst.truncated(j)
            mapping = {k: v for k, v in mapping.items() if k in src.vars}
        try:
            res = substitution_check(src, dst, mapping)
        except ValueError as exc:
            raise InstanceError("$.payload.map", str(exc)) from None
        report["verdict"] = res.verdict
        report["witnesses"] = [str(res.failing)] if res.failing else []
        report["normal_forms"] = res.normal_forms
    elif kind == "monoid":
        mon, qs = build(inst)
        rows = []
        for q in qs:
            coeffs = member(q, mon)
            sat = saturation_member(q, mon)
            rows.append({"query": _str(q), "member": coeffs,
                         "saturation_multiple": sat.multiple if sat else None})
        report["queries"] = rows
        report["verdict"] = "all_members" if all(r["member"] is not None for r in rows) else "some_nonmembers"
        report["witnesses"] = [r["query"] for r in rows if r["member"] is None]
        if mon.group is None and len(mon.vectors) == mon.dim and all(
                c.denominator == 1 for v in mon.vectors for c in v):
            ints = [[int(c) for c in v] for v in mon.vectors]
            if lattice.det(ints):
                box = par_points(ints)
                report["par_points"] = [list(p) for p in box.points]
                report["e"] = abs(box.determinant)
    else:
        f, subs = build(inst, truncation=truncation)
        o = series_order(f, subs)
        report["order"] = o.bound if isinstance(o, BeyondTruncation) else o
        report["verdict"] = "BeyondTruncation" if isinstance(o, BeyondTruncation) else "order"
        report["witnesses"] = []
        report["truncation"] = min(s.truncation for s in subs.values())

    report["mismatches"] = [
        {"field": k, "expected": v, "actual": report.get(k)}
        for k, v in inst.expected.items() if report.get(k) != v
    ]
    return report

