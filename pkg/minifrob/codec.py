"""Instance files and canonical encodings.

Everything exact is written as text: fractions as ``"p/q"``, series
coefficients as lists of ``N`` such strings, polynomials as lists of
``{"coeff": ..., "exp": [...]}`` terms in lexicographic exponent order. The
layout of instance files is documented in ``docs/instance-format.md``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .checks import CheckResult, Witness
from .coefficients import CoefficientError, CoeffElem, CoeffKind, decode_coeff
from .degrees import DegreeVector, DegreeVectorError, Mode
from .graded_poly import GradedPoly, RingConfig, RingMismatchError
from .instances import SUPPORTED, invariant_degrees
from .operators import fraction, fraction_str
from .pencil import DEFAULT_LAMBDAS, DEFAULT_POINTS, ConstMetric, IntersectionForm, MetricError

TOP_LEVEL = {"name", "description", "mode", "degrees", "charge", "eta", "unit_scale", "coefficients", "metric", "coxeter", "options"}
OPTION_FIELDS = {"lambdas", "points", "seed", "symbolic_curvature"}
COXETER_FIELDS = {"type", "rank"}
COEFFICIENT_FIELDS = {"kind", "truncation"}


class SchemaError(ValueError):
    """An instance file violates the schema; `path` locates the field."""

    def __init__(self, message: str, path: str = "", line: Optional[int] = None):
        self.path = path
        self.line = line
        where = path or "<root>"
        if line is not None:
            where = f"line {line}"
        super().__init__(f"{where}: {message}")


# Encoding


def encode_poly(p: GradedPoly) -> List[Dict[str, Any]]:
    """Terms ``{"coeff": ..., "exp": [...]}`` in lexicographic exponent order."""
    return [{"coeff": c.encode(), "exp": list(exp)} for exp, c in p.items()]


def _exponent(value: Any, n: int, path: str) -> Tuple[int, ...]:
    if not isinstance(value, list) or len(value) != n or any(isinstance(e, bool) or not isinstance(e, int) or e < 0 for e in value):
        raise SchemaError(f"exponent must be {n} non-negative integers", path)
    return tuple(value)


def _term(value: Any, path: str) -> Tuple[Any, Any]:
    if not isinstance(value, dict) or set(value) != {"coeff", "exp"}:
        raise SchemaError('a term is an object {"coeff": ..., "exp": [...]}', path)
    return value["exp"], value["coeff"]


def decode_poly(data: Any, ring: RingConfig, path: str = "") -> GradedPoly:
    """Inverse of `encode_poly`.

    Raises
    ------
        SchemaError: on a malformed term, exponent or coefficient

    """
    if not isinstance(data, list):
        raise SchemaError("a polynomial is a list of {coeff, exp} terms", path)
    terms: Dict[Tuple[int, ...], CoeffElem] = {}
    for i, term in enumerate(data):
        where = f"{path}[{i}]"
        exp, coeff = _term(term, where)
        key = _exponent(exp, ring.n, f"{where}.exp")
        if key in terms:
            raise SchemaError(f"repeated exponent {exp}", f"{where}.exp")
        try:
            terms[key] = decode_coeff(coeff, ring.kind, ring.truncation)
        except (CoefficientError, TypeError, ValueError) as err:
            raise SchemaError(str(err), f"{where}.coeff") from err
    return GradedPoly(ring, terms)


def encode_index(indices: Sequence[Any]) -> List[Any]:
    """1-based indices; non-integer labels are kept as text."""
    return [i + 1 if isinstance(i, int) and not isinstance(i, bool) else str(i) for i in indices]


def encode_value(x: Any) -> Any:
    if isinstance(x, GradedPoly):
        return {"poly": encode_poly(x)}
    if isinstance(x, CoeffElem):
        return x.encode()
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, Fraction)):
        return fraction_str(Fraction(x))
    if isinstance(x, Mapping):
        return {str(k): encode_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode_value(v) for v in x]
    return str(x)


def encode_witness(w: Witness) -> Dict[str, Any]:
    out: Dict[str, Any] = {"indices": encode_index(w.indices), "residual": encode_value(w.residual)}
    if w.context:
        out["context"] = encode_value(w.context)
    return out


def encode_check(result: CheckResult) -> Dict[str, Any]:
    out: Dict[str, Any] = {"status": result.status.value}
    if result.failures:
        out["failures"] = result.failures
        out["witnesses"] = [encode_witness(w) for w in result.witnesses]
    if result.note:
        out["note"] = result.note
    return out


def encode_metric(g: IntersectionForm) -> List[List[Any]]:
    return [[encode_poly(g[a, b]) for b in range(g.n)] for a in range(g.n)]


def encode_coefficients(ring: RingConfig) -> Dict[str, Any]:
    if ring.is_series:
        return {"kind": ring.kind.value, "truncation": ring.truncation}
    return {"kind": ring.kind.value}


def canonical_json(data: Any) -> bytes:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode("utf-8")


def digest(data: Any) -> str:
    return hashlib.sha256(canonical_json(data)).hexdigest()


# Instance files


@dataclass(frozen=True)
class Options:
    lambdas: Tuple[Fraction, ...] = DEFAULT_LAMBDAS
    points: int = DEFAULT_POINTS
    seed: Optional[int] = None
    symbolic_curvature: bool = False

    def encode(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "lambdas": [fraction_str(x) for x in self.lambdas],
            "points": self.points,
            "symbolic_curvature": self.symbolic_curvature,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        return out


@dataclass(frozen=True)
class InstanceSpec:
    """A validated instance: either a metric block or a Coxeter block.

    For a Coxeter block `eta` and `metric` are None until the chart is built;
    `deg` is always known at parse time.
    """

    mode: Mode
    deg: DegreeVector
    ring: RingConfig
    eta: Optional[ConstMetric] = None
    metric: Optional[IntersectionForm] = None
    coxeter: Optional[Tuple[str, int]] = None
    unit_scale: Fraction = Fraction(1)
    options: Options = field(default_factory=Options)
    name: str = ""
    digest: str = ""

    def encode(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "mode": self.mode.value,
            "degrees": [fraction_str(d) for d in self.deg.degrees],
            "charge": fraction_str(self.deg.charge),
            "coefficients": encode_coefficients(self.ring),
            "options": self.options.encode(),
        }
        if self.name:
            out["name"] = self.name
        if self.coxeter is not None:
            out["coxeter"] = {"type": self.coxeter[0], "rank": self.coxeter[1]}
            out["unit_scale"] = fraction_str(self.unit_scale)
        if self.eta is not None:
            out["eta"] = [[fraction_str(x) for x in row] for row in self.eta.eta_upper]
            out["unit_scale"] = fraction_str(self.eta.unit_scale)
        if self.metric is not None:
            out["metric"] = encode_metric(self.metric)
        return out


def _frac(value: Any, path: str) -> Fraction:
    try:
        return fraction(value)
    except (TypeError, ValueError) as err:
        raise SchemaError(str(err), path) from err


def _int(value: Any, path: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise SchemaError(f"expected an integer >= {minimum}", path)
    return value


def _unknown(data: Mapping[str, Any], allowed: set, path: str) -> None:
    for key in sorted(data):
        if key not in allowed:
            raise SchemaError(f"unknown field {key!r}", f"{path}.{key}" if path else key)


def _object(value: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(value, dict):
        raise SchemaError("expected an object", path)
    return value


def _matrix(value: Any, n: int, path: str) -> List[List[Any]]:
    if not isinstance(value, list) or len(value) != n or any(not isinstance(r, list) or len(r) != n for r in value):
        raise SchemaError(f"expected a {n} x {n} matrix", path)
    return value


def _options(data: Any) -> Options:
    data = _object(data, "options")
    _unknown(data, OPTION_FIELDS, "options")
    lambdas = DEFAULT_LAMBDAS
    if "lambdas" in data:
        if not isinstance(data["lambdas"], list) or not data["lambdas"]:
            raise SchemaError("expected a non-empty list of fractions", "options.lambdas")
        lambdas = tuple(_frac(x, f"options.lambdas[{i}]") for i, x in enumerate(data["lambdas"]))
    points = _int(data.get("points", DEFAULT_POINTS), "options.points", 1)
    seed = data.get("seed")
    if seed is not None:
        seed = _int(seed, "options.seed", 0)
    flag = data.get("symbolic_curvature", False)
    if not isinstance(flag, bool):
        raise SchemaError("expected true or false", "options.symbolic_curvature")
    return Options(lambdas, points, seed, flag)


def parse_instance(data: Any) -> InstanceSpec:
    """Validate decoded JSON.

    Raises
    ------
        SchemaError: naming the field path of the first violation, including
            degree-vector, metric and coefficient invariants

    """
    data = _object(data, "")
    _unknown(data, TOP_LEVEL, "")
    if "mode" not in data:
        raise SchemaError("missing field", "mode")
    try:
        mode = Mode(data["mode"])
    except ValueError as err:
        raise SchemaError(f"mode must be one of {[m.value for m in Mode]}", "mode") from err
    name = data.get("name", "")
    if not isinstance(name, str):
        raise SchemaError("expected a string", "name")
    options = _options(data.get("options", {}))

    coeffs = _object(data.get("coefficients", {"kind": "rational"}), "coefficients")
    _unknown(coeffs, COEFFICIENT_FIELDS, "coefficients")
    try:
        kind = CoeffKind(coeffs.get("kind", "rational"))
    except ValueError as err:
        raise SchemaError("kind must be 'rational' or 'series'", "coefficients.kind") from err
    if kind == CoeffKind.SERIES:
        if mode != Mode.ELLIPTIC:
            raise SchemaError("series coefficients are only used in elliptic mode", "coefficients.kind")
        truncation = _int(coeffs.get("truncation"), "coefficients.truncation", 1)
    else:
        if "truncation" in coeffs:
            raise SchemaError("rational coefficients take no truncation", "coefficients.truncation")
        truncation = 1

    has_metric, has_coxeter = "metric" in data, "coxeter" in data
    if has_metric == has_coxeter:
        raise SchemaError("exactly one of 'metric' and 'coxeter' is required", "")
    unit_scale = _frac(data.get("unit_scale", 1), "unit_scale")
    if unit_scale == 0:
        raise SchemaError("the unit scale must be nonzero", "unit_scale")

    if has_coxeter:
        return _parse_coxeter(data, mode, unit_scale, options, name)

    if "degrees" not in data:
        raise SchemaError("missing field", "degrees")
    if not isinstance(data["degrees"], list) or not data["degrees"]:
        raise SchemaError("expected a non-empty list of fractions", "degrees")
    degrees = [_frac(d, f"degrees[{i}]") for i, d in enumerate(data["degrees"])]
    n = len(degrees)
    if mode == Mode.GENERIC and "charge" not in data:
        raise SchemaError("generic mode needs the charge D", "charge")
    charge = _frac(data.get("charge", 1), "charge")
    try:
        deg = DegreeVector(tuple(degrees), charge, mode)
    except DegreeVectorError as err:
        raise SchemaError(str(err), "degrees") from err

    if "eta" not in data:
        raise SchemaError("missing field", "eta")
    rows = _matrix(data["eta"], n, "eta")
    upper = [[_frac(x, f"eta[{a}][{b}]") for b, x in enumerate(row)] for a, row in enumerate(rows)]
    try:
        eta = ConstMetric.from_upper(upper, unit_scale)
        eta.validate_for(deg)
    except MetricError as err:
        raise SchemaError(str(err), "eta") from err
    for a in range(n):
        for b in range(n):
            if upper[a][b] and not deg.pairs(a, b):
                raise SchemaError(f"eta^{{{a + 1}{b + 1}}} must vanish unless d^a + d^b = D", f"eta[{a}][{b}]")

    ring = RingConfig.for_degrees(deg, kind, truncation)
    entries = _matrix(data["metric"], n, "metric")
    polys = [[decode_poly(p, ring, f"metric[{a}][{b}]") for b, p in enumerate(row)] for a, row in enumerate(entries)]
    try:
        metric = IntersectionForm.from_rows(deg, polys)
    except (MetricError, RingMismatchError) as err:
        raise SchemaError(str(err), "metric") from err
    return InstanceSpec(mode, deg, ring, eta, metric, None, unit_scale, options, name, digest(data))


def _parse_coxeter(data: Mapping[str, Any], mode: Mode, unit_scale: Fraction, options: Options, name: str) -> InstanceSpec:
    if mode != Mode.COXETER:
        raise SchemaError("a coxeter block needs mode 'coxeter'", "mode")
    if "eta" in data:
        raise SchemaError("eta is computed from the Coxeter chart", "eta")
    block = _object(data["coxeter"], "coxeter")
    _unknown(block, COXETER_FIELDS, "coxeter")
    group = block.get("type")
    if group not in ("A", "B"):
        raise SchemaError("type must be 'A' or 'B'", "coxeter.type")
    rank = _int(block.get("rank"), "coxeter.rank", 1)
    if rank not in SUPPORTED[group]:
        raise SchemaError(f"unsupported group {group}{rank}", "coxeter.rank")
    deg = DegreeVector.coxeter(invariant_degrees(group, rank))
    if "degrees" in data:
        given = [_frac(d, f"degrees[{i}]") for i, d in enumerate(data["degrees"] or [])]
        if tuple(given) != deg.degrees:
            raise SchemaError(f"degrees of {group}{rank} are {[fraction_str(d) for d in deg.degrees]}", "degrees")
    if "charge" in data and _frac(data["charge"], "charge") != deg.charge:
        raise SchemaError(f"the charge of {group}{rank} is {fraction_str(deg.charge)}", "charge")
    ring = RingConfig.for_degrees(deg)
    return InstanceSpec(mode, deg, ring, None, None, (group, rank), unit_scale, options, name, digest(data))


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"invalid JSON: {err.msg} (column {err.colno})", line=err.lineno) from err


def parse_instance_text(text: str) -> InstanceSpec:
    return parse_instance(_loads(text))


def parse_instance_file(path: Union[str, Path]) -> InstanceSpec:
    """Read and validate an instance file.

    Raises
    ------
        OSError: if the file cannot be read
        SchemaError: on any schema or invariant violation

    """
    return parse_instance_text(Path(path).read_text(encoding="utf-8"))


def metric_instance(
    deg: DegreeVector,
    eta: ConstMetric,
    g: IntersectionForm,
    name: str = "",
    options: Optional[Options] = None,
) -> Dict[str, Any]:
    """Instance file contents with an explicit metric block."""
    spec = InstanceSpec(deg.mode, deg, g.ring, eta, g, None, eta.unit_scale, options or Options(), name)
    return spec.encode()


def dump_instance(data: Mapping[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def with_truncation(spec: InstanceSpec, truncation: int) -> InstanceSpec:
    """Lower the series truncation of a metric-block instance.

    Raises
    ------
        SchemaError: if the instance is not a series instance or `truncation`
            exceeds the stored precision

    """
    if not spec.ring.is_series or spec.metric is None:
        raise SchemaError("--truncation applies to series instances only", "coefficients")
    if not 1 <= truncation <= spec.ring.truncation:
        raise SchemaError(f"truncation must lie in 1..{spec.ring.truncation}", "coefficients.truncation")
    ring = spec.ring.with_truncation(truncation)
    g = spec.metric
    rows = [[g[a, b].truncate(truncation) for b in range(g.n)] for a in range(g.n)]
    return replace(spec, ring=ring, metric=IntersectionForm.from_rows(spec.deg, rows))


# Series oracle requests

SERIES_FIELDS = {"name", "description", "degrees", "eta", "unit_scale", "truncation", "seed_layers", "options"}


@dataclass(frozen=True)
class SeriesRequest:
    """Input of the WDVV series oracle: an elliptic grading, ``eta`` and seed layers."""

    deg: DegreeVector
    eta: ConstMetric
    truncation: int
    seed_layers: Mapping[int, Mapping[Tuple[int, ...], Fraction]]
    options: Options = field(default_factory=Options)
    name: str = ""


def parse_series_request(data: Any) -> SeriesRequest:
    """Validate a series oracle request.

    Raises
    ------
        SchemaError: naming the offending field

    """
    data = _object(data, "")
    _unknown(data, SERIES_FIELDS, "")
    for key in ("degrees", "eta", "truncation", "seed_layers"):
        if key not in data:
            raise SchemaError("missing field", key)
    if not isinstance(data["degrees"], list) or not data["degrees"]:
        raise SchemaError("expected a non-empty list of fractions", "degrees")
    degrees = [_frac(d, f"degrees[{i}]") for i, d in enumerate(data["degrees"])]
    try:
        deg = DegreeVector.elliptic(degrees)
    except DegreeVectorError as err:
        raise SchemaError(str(err), "degrees") from err
    n = deg.n
    rows = _matrix(data["eta"], n, "eta")
    try:
        eta = ConstMetric.from_upper(
            [[_frac(x, f"eta[{a}][{b}]") for b, x in enumerate(row)] for a, row in enumerate(rows)],
            _frac(data.get("unit_scale", 1), "unit_scale"),
        )
        eta.validate_for(deg)
    except MetricError as err:
        raise SchemaError(str(err), "eta") from err
    truncation = _int(data["truncation"], "truncation", 1)
    layers = _object(data["seed_layers"], "seed_layers")
    seed_layers: Dict[int, Dict[Tuple[int, ...], Fraction]] = {}
    for key, terms in layers.items():
        path = f"seed_layers.{key}"
        if not key.isdigit():
            raise SchemaError("layer keys are q-powers such as \"0\"", path)
        if not isinstance(terms, list):
            raise SchemaError("expected a list of {coeff, exp} terms", path)
        layer: Dict[Tuple[int, ...], Fraction] = {}
        for i, term in enumerate(terms):
            exp, value = _term(term, f"{path}[{i}]")
            layer[_exponent(exp, n, f"{path}[{i}].exp")] = _frac(value, f"{path}[{i}].coeff")
        seed_layers[int(key)] = layer
    name = data.get("name", "")
    if not isinstance(name, str):
        raise SchemaError("expected a string", "name")
    return SeriesRequest(deg, eta, truncation, seed_layers, _options(data.get("options", {})), name)


def load_json(path: Union[str, Path]) -> Any:
    """Read a JSON file, reporting syntax errors with their line.

    Raises
    ------
        OSError: if the file cannot be read
        SchemaError: on invalid JSON

    """
    return _loads(Path(path).read_text(encoding="utf-8"))
