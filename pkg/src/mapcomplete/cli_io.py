"""Instance documents, point specs, and machine-readable reports.

Instance files are JSON with four fields: base, carrier, fiber_map and
distance. Every number is an exact rational written as "p/q" or integer
text; decimals are rejected so documents round-trip bit-exactly. Reports
are plain text, one `PROP <name> PASS|FAIL <detail>` line per checked
property plus a trailing `SUMMARY <pass>/<total>`, deterministic for fixed
inputs and seeds.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .base_topology import BasePoint, EnumeratedBase, FiniteBase
from .completion import CompletionPoint
from .errors import InputError
from .metric_mapping import (
    CarrierPoint,
    FiniteCarrier,
    MetricMapping,
    RationalGridCarrier,
    RationalIntervalCarrier,
    abs_diff_mapping,
    max_metric_mapping,
    table_mapping,
)
from .rationals import format_rational, parse_rational
from .tied_cauchy import const_seq, newton_sqrt_seq, table_seq


@dataclass
class Report:
    """Accumulates PROP lines; renders them plus the summary."""

    entries: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.entries.append((name, ok, detail))

    @property
    def passed(self) -> int:
        return sum(1 for _, ok, _ in self.entries if ok)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed == len(self.entries) else 1

    def render(self) -> str:
        lines = []
        for name, ok, detail in self.entries:
            status = "PASS" if ok else "FAIL"
            lines.append(f"PROP {name} {status} {detail}".rstrip())
        lines.append(f"SUMMARY {self.passed}/{len(self.entries)}")
        return "\n".join(lines)


def _require_keys(obj: dict, required: set[str], optional: set[str], path: str) -> None:
    if not isinstance(obj, dict):
        raise InputError("expected a JSON object", path=path)
    for key in obj:
        if key not in required | optional:
            raise InputError(f"unknown field {key!r}", path=f"{path}.{key}")
    for key in required:
        if key not in obj:
            raise InputError(f"missing field {key!r}", path=path)


def _parse_base(obj, path: str):
    _require_keys(obj, {"kind"}, {"points", "basis", "point"}, path)
    kind = obj["kind"]
    if kind == "finite":
        _require_keys(obj, {"kind", "points", "basis"}, set(), path)
        points = obj["points"]
        if not isinstance(points, list) or not points or not all(isinstance(p, str) for p in points):
            raise InputError("points must be a nonempty list of strings", path=f"{path}.points")
        basis = obj["basis"]
        if not isinstance(basis, list):
            raise InputError("basis must be a list of lists", path=f"{path}.basis")
        for i, b in enumerate(basis):
            if not isinstance(b, list) or not all(isinstance(p, str) for p in b):
                raise InputError("basis set must be a list of point ids", path=f"{path}.basis[{i}]")
            for p in b:
                if p not in points:
                    raise InputError(f"unknown base point {p!r}", path=f"{path}.basis[{i}]")
        try:
            return FiniteBase.of(points, basis)
        except InputError as e:
            raise InputError(str(e), path=path) from None
    if kind == "one_point":
        _require_keys(obj, {"kind", "point"}, set(), path)
        if not isinstance(obj["point"], str):
            raise InputError("point must be a string", path=f"{path}.point")
        return EnumeratedBase.one_point(obj["point"])
    if kind == "rational_order":
        _require_keys(obj, {"kind"}, set(), path)
        return EnumeratedBase.rational_order()
    raise InputError(f"unknown base kind {kind!r}", path=f"{path}.kind")


def _parse_carrier(obj, path: str):
    _require_keys(obj, {"kind"}, {"points", "lo", "hi", "step"}, path)
    kind = obj["kind"]
    if kind == "finite":
        _require_keys(obj, {"kind", "points"}, set(), path)
        points = obj["points"]
        if not isinstance(points, list) or not points or not all(isinstance(p, str) for p in points):
            raise InputError("points must be a nonempty list of strings", path=f"{path}.points")
        try:
            return FiniteCarrier.of(points)
        except InputError as e:
            raise InputError(str(e), path=path) from None
    if kind == "rational_interval":
        _require_keys(obj, {"kind", "lo", "hi"}, set(), path)
        lo = parse_rational(obj["lo"], path=f"{path}.lo")
        hi = parse_rational(obj["hi"], path=f"{path}.hi")
        if not lo < hi:
            raise InputError("needs lo < hi", path=path)
        return RationalIntervalCarrier(lo, hi)
    if kind == "rational_grid":
        _require_keys(obj, {"kind", "step", "lo", "hi"}, set(), path)
        step = parse_rational(obj["step"], path=f"{path}.step")
        lo = parse_rational(obj["lo"], path=f"{path}.lo")
        hi = parse_rational(obj["hi"], path=f"{path}.hi")
        if step <= 0:
            raise InputError("needs step > 0", path=f"{path}.step")
        if lo > hi:
            raise InputError("needs lo <= hi", path=path)
        return RationalGridCarrier(step, lo, hi)
    raise InputError(f"unknown carrier kind {kind!r}", path=f"{path}.kind")


def parse_instance(text: str) -> MetricMapping:
    """Parse an instance document into a validated-shape metric mapping.

    Shape errors (unknown fields, malformed rationals, dangling targets,
    asymmetric tables) raise InputError with the path of the offending
    field; the metric axioms themselves are left to the validators.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e.msg}", path="$") from None
    _require_keys(doc, {"base", "carrier", "fiber_map", "distance"}, set(), "$")
    base = _parse_base(doc["base"], "$.base")
    carrier = _parse_carrier(doc["carrier"], "$.carrier")

    fiber_obj = doc["fiber_map"]
    _require_keys(fiber_obj, {"kind"}, {"entries", "to"}, "$.fiber_map")
    fiber_kind = fiber_obj["kind"]

    dist_obj = doc["distance"]
    _require_keys(dist_obj, {"kind"}, {"entries"}, "$.distance")
    dist_kind = dist_obj["kind"]

    if dist_kind == "table":
        if carrier.kind != "finite":
            raise InputError("table distance needs a finite carrier", path="$.distance.kind")
        if fiber_kind == "table":
            fiber_table = _parse_fiber_table(fiber_obj, base, carrier)
        elif fiber_kind == "constant":
            target = _parse_constant_target(fiber_obj, base)
            fiber_table = {p.code: target for p in carrier.points}
        else:
            raise InputError(
                f"fiber kind {fiber_kind!r} does not apply to a finite carrier",
                path="$.fiber_map.kind",
            )
        distance_table = _parse_distance_table(dist_obj, carrier)
        try:
            return table_mapping(base, fiber_table, distance_table)
        except InputError as e:
            raise InputError(str(e), path="$") from None

    if dist_kind == "abs_diff":
        if carrier.kind != "rational_interval":
            raise InputError("abs_diff distance needs a rational_interval carrier", path="$.distance.kind")
        fiber = _rational_fiber(fiber_obj, fiber_kind, base, carrier)
        return abs_diff_mapping(carrier, base, fiber)

    if dist_kind == "max_metric":
        if carrier.kind != "rational_grid":
            raise InputError("max_metric distance needs a rational_grid carrier", path="$.distance.kind")
        if fiber_kind != "constant":
            raise InputError("max_metric carrier needs a constant fiber", path="$.fiber_map.kind")
        target = _parse_constant_target(fiber_obj, base)
        point = BasePoint(target)
        return max_metric_mapping(carrier, base, lambda x: point)

    raise InputError(f"unknown distance kind {dist_kind!r}", path="$.distance.kind")


def _parse_fiber_table(obj, base, carrier) -> dict:
    _require_keys(obj, {"kind", "entries"}, set(), "$.fiber_map")
    entries = obj["entries"]
    if not isinstance(entries, dict):
        raise InputError("entries must map carrier codes to base points", path="$.fiber_map.entries")
    codes = {p.code for p in carrier.points}
    if isinstance(base, FiniteBase):
        base_ids = set(base.point_ids())
    elif base.kind == "one_point":
        base_ids = {base.point.id}
    else:
        base_ids = None  # rational_order: any exact rational is a base point
    table = {}
    for code, target in entries.items():
        path = f"$.fiber_map.entries.{code}"
        if code not in codes:
            raise InputError(f"unknown carrier point {code!r}", path=path)
        if base_ids is None:
            target = parse_rational(target, path=path)
        elif target not in base_ids:
            raise InputError(
                f"fiber of {code!r} targets unknown base point {target!r}", path=path
            )
        table[code] = target
    for code in sorted(codes, key=str):
        if code not in table:
            raise InputError(f"missing fiber entry for {code!r}", path="$.fiber_map.entries")
    return {p.code: table[p.code] for p in carrier.points}


def _parse_constant_target(obj, base):
    _require_keys(obj, {"kind", "to"}, set(), "$.fiber_map")
    target = obj["to"]
    if isinstance(base, FiniteBase):
        if target not in base.point_ids():
            raise InputError(f"unknown base point {target!r}", path="$.fiber_map.to")
        return target
    if base.kind == "one_point":
        if target != base.point.id:
            raise InputError(f"unknown base point {target!r}", path="$.fiber_map.to")
        return target
    return parse_rational(target, path="$.fiber_map.to")


def _rational_fiber(obj, kind, base, carrier):
    if kind == "identity":
        _require_keys(obj, {"kind"}, set(), "$.fiber_map")
        if not (isinstance(base, EnumeratedBase) and base.kind == "rational_order"):
            raise InputError("identity fiber needs the rational_order base", path="$.fiber_map.kind")
        return lambda x: BasePoint(x.code)
    if kind == "constant":
        target = _parse_constant_target(obj, base)
        point = BasePoint(target)
        return lambda x: point
    raise InputError(
        f"fiber kind {kind!r} does not apply to a rational carrier",
        path="$.fiber_map.kind",
    )


def _parse_distance_table(obj, carrier) -> dict:
    entries = obj.get("entries")
    if not isinstance(entries, list):
        raise InputError("entries must be a list of [x, y, value] triples", path="$.distance.entries")
    codes = {p.code for p in carrier.points}
    table: dict[tuple[str, str], Fraction] = {}
    seen: dict[tuple[str, str], Fraction] = {}
    for i, entry in enumerate(entries):
        path = f"$.distance.entries[{i}]"
        if not (isinstance(entry, list) and len(entry) == 3):
            raise InputError("expected [x, y, value]", path=path)
        a, b, raw = entry
        for code in (a, b):
            if code not in codes:
                raise InputError(f"unknown carrier point {code!r}", path=path)
        value = parse_rational(raw, path=path)
        if value < 0:
            raise InputError("distances must be nonnegative", path=path)
        if a == b:
            if value != 0:
                raise InputError(f"diagonal distance for {a!r} must be 0", path=path)
            continue
        key = (a, b) if a <= b else (b, a)
        if key in seen and seen[key] != value:
            raise InputError(
                f"non-symmetric distance table at ({a!r}, {b!r}): "
                f"{format_rational(seen[key])} vs {format_rational(value)}",
                path=path,
            )
        seen[key] = value
        table[key] = value
    for a, b in combinations(sorted(codes), 2):
        if (a, b) not in table:
            raise InputError(f"missing distance entry for ({a!r}, {b!r})", path="$.distance.entries")
    return table


def instance_document(m: MetricMapping) -> dict:
    """Serialize a finite instance back into document form. Inverse of
    parse_instance up to entry order; all rationals in lowest terms."""
    if not m.is_finite_instance() or m.carrier.kind != "finite":
        raise InputError("only finite table instances can be serialized")
    base = m.base
    doc_base = {
        "kind": "finite",
        "points": [str(p.id) for p in base.points],
        "basis": [[str(i) for i in o] for o in base.basis],
    }
    points = list(m.points())
    doc = {
        "base": doc_base,
        "carrier": {"kind": "finite", "points": [p.code for p in points]},
        "fiber_map": {
            "kind": "table",
            "entries": {p.code: str(m.fiber_of(p).id) for p in points},
        },
        "distance": {
            "kind": "table",
            "entries": [
                [a.code, b.code, format_rational(m.distance(a, b))]
                for i, a in enumerate(points)
                for b in points[i + 1 :]
            ],
        },
    }
    return doc


_SPEC_RE = re.compile(r"(?P<ctor>[a-z_]+)\((?P<args>.*)\)(?:@(?P<tie>.+))?\Z")


def _resolve_point(token: str, m: MetricMapping, what: str) -> CarrierPoint:
    token = token.strip()
    if m.carrier.kind == "finite":
        for p in m.carrier.points:
            if p.code == token:
                return p
        raise InputError(f"{what}: point {token!r} is not in the carrier")
    if m.carrier.kind == "rational_interval":
        x = CarrierPoint(parse_rational(token))
        if x not in m.carrier:
            raise InputError(f"{what}: point {token} is outside the carrier interval")
        return x
    parts = token.split()
    if len(parts) != 2:
        raise InputError(f"{what}: grid points are written as two rationals, like '1/2 0'")
    x = CarrierPoint((parse_rational(parts[0]), parse_rational(parts[1])))
    if x not in m.carrier:
        raise InputError(f"{what}: point {token!r} is not on the carrier grid")
    return x


def _resolve_base_point(token: str, m: MetricMapping) -> BasePoint:
    base = m.base
    if isinstance(base, FiniteBase):
        if token not in base.point_ids():
            raise InputError(f"tie target {token!r} is not a base point")
        return BasePoint(token)
    if base.kind == "one_point":
        if token != base.point.id:
            raise InputError(f"tie target {token!r} is not a base point")
        return base.point
    return BasePoint(parse_rational(token))


def parse_point_spec(text: str, m: MetricMapping) -> CompletionPoint:
    """Resolve a completion-point spec against a loaded instance.

    Grammar: `const(<point>)` | `newton_sqrt(<rational>)` |
    `table(<p1>,<p2>,...;tail=<point>)`, each with an optional
    `@<basepoint>` suffix naming the tying target when it is not the
    implied one.
    """
    match = _SPEC_RE.fullmatch(text.strip())
    if not match:
        raise InputError(f"cannot parse point spec {text!r}")
    ctor, args, tie = match.group("ctor"), match.group("args"), match.group("tie")
    y = _resolve_base_point(tie.strip(), m) if tie else None

    if ctor == "const":
        x = _resolve_point(args, m, "const")
        return CompletionPoint(const_seq(m, x, y))
    if ctor == "newton_sqrt":
        a = parse_rational(args.strip())
        return CompletionPoint(newton_sqrt_seq(m, a, y))
    if ctor == "table":
        if ";" not in args:
            raise InputError("table spec needs ';tail=<point>'")
        head, tail_part = args.split(";", 1)
        tail_part = tail_part.strip()
        if not tail_part.startswith("tail="):
            raise InputError("table spec needs ';tail=<point>'")
        tail = _resolve_point(tail_part[len("tail="):], m, "table tail")
        prefix = [
            _resolve_point(tok, m, "table term")
            for tok in head.split(",")
            if tok.strip()
        ]
        return CompletionPoint(table_seq(m, prefix, tail, y))
    raise InputError(f"unknown point constructor {ctor!r}")
