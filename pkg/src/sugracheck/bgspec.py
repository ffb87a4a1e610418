"""Background description files: expression parser, schema validation, loading.

A background file is a JSON document. Coefficients are strings (or numbers)
in a small grammar: rational/decimal numbers, chart coordinate names, the
dilaton slot ``phi``, ``+ - * /``, integer powers (``^`` or ``**``) and
``exp(...)``. Expressions without ``exp``/``phi`` become exact polynomials.
"""

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import jsonschema
import numpy as np

from .eom11 import anomaly_constant, background11
from .eomiia import background_iia
from .eomiib import background_iib
from .fields import AnalyticGeometry, BackgroundError, Block, freund_rubin_flux, freund_rubin_geometry
from .multivec import Form
from .patchcalc import DEFAULT_STEP, FramePatch, d_poly
from .poly import Poly

THEORIES = ("m11", "iia-string", "iia-einstein", "iib-string", "iib-einstein", "iib-symmetric")
THEORY_DIM = {t: (11 if t == "m11" else 10) for t in THEORIES}

FORM_DEGREES = {
    "m11": {"G": 4},
    "iia": {"H3": 3, "G2": 2, "G4": 4},
    "iib": {"H3": 3, "G1": 1, "G3": 3, "G5": 5},
}
POTENTIAL_DEGREES = {
    "m11": {"C": 3},
    "iia": {"B2": 2, "C1": 1, "C3": 3},
    "iib": {"B2": 2, "C0": 0, "C2": 2, "C4": 4},
}
SCALARS = {"m11": (), "iia": ("phi",), "iib": ("phi", "C0")}


class SpecError(ValueError):
    """Input error with a location (line/column or field path)."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(message if where is None else f"{where}: {message}")


def family(theory):
    return "m11" if theory == "m11" else theory[:3]


# ---------------------------------------------------------------------------
# expressions
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)"
                    r"|(\*\*|[-+*/^()]))")


class ExprError(ValueError):
    pass


class Expr:
    """Parsed expression node: ``op`` with ``args``."""
    __slots__ = ("op", "args")

    def __init__(self, op, *args):
        self.op = op
        self.args = args

    @property
    def polynomial(self):
        """True when no exp/phi node occurs (then :meth:`poly` succeeds)."""
        if self.op in ("exp", "phi"):
            return False
        return all(a.polynomial for a in self.args if isinstance(a, Expr))

    @property
    def uses_phi(self):
        if self.op == "phi":
            return True
        return any(a.uses_phi for a in self.args if isinstance(a, Expr))

    def poly(self, nvars):
        op, a = self.op, self.args
        if op == "num":
            return Poly.const(nvars, a[0])
        if op == "var":
            return Poly.var(nvars, a[0])
        if op == "neg":
            return -a[0].poly(nvars)
        if op in ("+", "-", "*"):
            p, q = a[0].poly(nvars), a[1].poly(nvars)
            return p + q if op == "+" else p - q if op == "-" else p * q
        if op == "/":
            q = a[1].poly(nvars)
            if any(any(e) for e in q.terms) or not q.terms:
                raise ExprError("division by a non-constant (or zero) polynomial")
            return a[0].poly(nvars) / q.terms[(0,) * nvars]
        if op == "pow":
            base, k = a[0].poly(nvars), a[1]
            out = Poly.const(nvars, 1)
            for _ in range(k):
                out = out * base
            return out
        raise ExprError(f"{op} is not polynomial")

    def value(self, x, phi=None):
        """Float value at coordinates ``x``; ``phi`` is a callable or None."""
        op, a = self.op, self.args
        if op == "num":
            return float(a[0])
        if op == "var":
            return float(x[a[0]])
        if op == "phi":
            if phi is None:
                raise ExprError("phi is not defined here")
            return float(phi(x))
        if op == "neg":
            return -a[0].value(x, phi)
        if op == "exp":
            return math.exp(a[0].value(x, phi))
        if op == "pow":
            return a[0].value(x, phi) ** a[1]
        l, r = a[0].value(x, phi), a[1].value(x, phi)
        if op == "+":
            return l + r
        if op == "-":
            return l - r
        if op == "*":
            return l * r
        if r == 0:
            raise ExprError("division by zero")
        return l / r


class _Parser:
    def __init__(self, text, names):
        self.text = text
        self.names = names
        self.toks = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ExprError(f"unexpected character {text[pos:].strip()[:1]!r} at column {pos + 1}")
            kind = "num" if m.group(1) else "name" if m.group(2) else "op"
            self.toks.append((kind, m.group(m.lastindex), m.start(m.lastindex) + 1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text) + 1)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            want = f"{value!r}" if value else "a token"
            raise ExprError(f"expected {want} at column {tok[2]}")
        self.i += 1
        return tok

    def parse(self):
        if not self.toks:
            raise ExprError("empty expression")
        e = self.expr()
        if self.i != len(self.toks):
            raise ExprError(f"unexpected {self.peek()[1]!r} at column {self.peek()[2]}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            e = Expr(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            e = Expr(op, e, self.unary())
        return e

    def unary(self):
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            e = self.unary()
            return Expr("neg", e) if op == "-" else e
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            kind, val, col = self.take()
            if kind != "num" or not re.fullmatch(r"\d+", val):
                raise ExprError(f"exponent must be a non-negative integer (column {col})")
            return Expr("pow", base, int(val))
        return base

    def atom(self):
        kind, val, col = self.take()
        if kind == "num":
            return Expr("num", Fraction(val))
        if kind == "name":
            if val == "exp":
                self.take("(")
                e = self.expr()
                self.take(")")
                return Expr("exp", e)
            if val == "phi":
                if "phi" not in self.names:
                    raise ExprError(f"phi is not available here (column {col})")
                return Expr("phi")
            if val not in self.names:
                raise ExprError(f"unknown name {val!r} at column {col}")
            return Expr("var", self.names[val])
        if val == "(":
            e = self.expr()
            self.take(")")
            return e
        raise ExprError(f"unexpected {val!r} at column {col}")


def parse_expression(text, coordinates=(), allow_phi=False):
    """Parse ``text`` (str, int or float) into an :class:`Expr`."""
    if isinstance(text, bool):
        raise ExprError("booleans are not expressions")
    if isinstance(text, (int, float)):
        if not math.isfinite(text):
            raise ExprError("non-finite number")
        return Expr("num", Fraction(text))
    names = {c: i for i, c in enumerate(coordinates)}
    if allow_phi:
        names["phi"] = None
    return _Parser(str(text), names).parse()


# ---------------------------------------------------------------------------
# schema
# ---------------------------------------------------------------------------

_COEFF = {"type": ["string", "number"]}
_TABLE = {"type": "object", "additionalProperties": _COEFF}

SCHEMA = {
    "type": "object",
    "required": ["theory", "metric"],
    "additionalProperties": False,
    "properties": {
        "theory": {"enum": list(THEORIES)},
        "description": {"type": "string"},
        "chart": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dim": {"type": "integer", "minimum": 1},
                "coordinates": {"type": "array", "items": {"type": "string",
                                                           "pattern": r"^[A-Za-z_]\w*$"},
                                "uniqueItems": True},
                "domain": {"type": "array",
                           "items": {"type": "array", "items": {"type": "number"},
                                     "minItems": 2, "maxItems": 2}},
            },
        },
        "metric": {
            "oneOf": [
                {"type": "string"},
                {"type": "object", "required": ["family"], "additionalProperties": False,
                 "properties": {"family": {"enum": ["minkowski", "freund-rubin", "product"]},
                                "f": {"type": "number"},
                                "blocks": {"type": "array", "minItems": 1,
                                           "items": {"type": "array", "minItems": 2,
                                                     "maxItems": 2,
                                                     "items": {"type": "number"}}}}},
                {"type": "object", "required": ["components"], "additionalProperties": False,
                 "properties": {"components": _TABLE}},
            ]
        },
        "scalars": _TABLE,
        "forms": {"type": "object", "additionalProperties": {"oneOf": [_TABLE, _COEFF]}},
        "potentials": {"type": "object", "additionalProperties": {"oneOf": [_TABLE, _COEFF]}},
        "probe_points": {"type": "array",
                         "items": {"type": "array", "items": {"type": "number"}}},
        "tolerances": {"type": "object",
                       "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "anomaly": {"type": "boolean"},
                "sign_convention": {"enum": ["paper", "bbs"]},
                "beta": {"type": "number"},
                "kappa": {"type": "number", "exclusiveMinimum": 0},
                "orientation": {"enum": [1, -1]},
                "step": {"type": "number", "exclusiveMinimum": 0},
                "reduction": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {"fiber_length": {"type": "number", "exclusiveMinimum": 0},
                                   "kappa11": {"type": "number", "exclusiveMinimum": 0},
                                   "bbs": {"type": "boolean"}},
                },
            },
        },
    },
}


def _path(parts):
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _line_of(text, parts):
    """Best-effort line number of the last key in a JSON field path."""
    keys = [p for p in parts if isinstance(p, str)]
    if not keys:
        return None
    pos = 0
    for k in keys:
        j = text.find(json.dumps(k), pos)
        if j < 0:
            return None
        pos = j
    return text.count("\n", 0, pos) + 1


def validate_document(doc, text=""):
    """Raise :class:`SpecError` for the first schema violation (deterministic order)."""
    errors = sorted(jsonschema.Draft7Validator(SCHEMA).iter_errors(doc),
                    key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        e = errors[0]
        parts = list(e.absolute_path)
        line = _line_of(text, parts)
        where = f"field {_path(parts)}" + (f" (line {line})" if line else "")
        raise SpecError(e.message, where)


# ---------------------------------------------------------------------------
# BackgroundSpec
# ---------------------------------------------------------------------------

_FAMILY_RE = re.compile(r"^\s*([a-z-]+)\s*(?:\((.*)\))?\s*$")


def _family_from_string(s):
    m = _FAMILY_RE.match(s)
    if not m:
        raise SpecError(f"cannot read metric family {s!r}", "field metric")
    name, args = m.group(1), m.group(2)
    out = {"family": name}
    if args:
        for part in args.split(","):
            k, _, v = part.partition("=")
            try:
                out[k.strip()] = float(v)
            except ValueError:
                raise SpecError(f"bad family argument {part!r}", "field metric") from None
    if name not in ("minkowski", "freund-rubin", "product"):
        raise SpecError(f"unknown metric family {name!r}", "field metric")
    return out


@dataclass
class BackgroundSpec:
    theory: str
    dim: int
    coordinates: tuple
    metric: dict
    scalars: dict = field(default_factory=dict)
    forms: dict = field(default_factory=dict)
    potentials: dict = field(default_factory=dict)
    probe_points: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    domain: tuple = None
    source: str = "<input>"

    @property
    def analytic(self):
        return "family" in self.metric

    @property
    def family(self):
        return family(self.theory)

    @property
    def points(self):
        """Probe points handed to the residual suites (one dummy point if analytic)."""
        if self.analytic:
            return [None] * max(1, len(self.probe_points))
        return [np.asarray(p, dtype=float) for p in self.probe_points]


def load_document(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read file ({exc.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return doc, text


def locate(exc, text):
    """Copy of a field-path SpecError with the line number of the field added."""
    where = exc.where or ""
    if text and where.startswith("field ") and "(line" not in where:
        parts = [p for p in re.split(r"[.\[\]]", where[6:]) if p and not p.isdigit()]
        line = _line_of(text, parts)
        if line:
            return SpecError(str(exc)[len(where) + 2:], f"{where} (line {line})")
    return exc


def parse_spec(doc, text="", source="<input>"):
    """Schema-validate a document and check the semantic invariants."""
    try:
        return _parse_spec(doc, text, source)
    except SpecError as exc:
        raise locate(exc, text) from None


def _parse_spec(doc, text, source):
    validate_document(doc, text)
    theory = doc["theory"]
    dim = THEORY_DIM[theory]
    fam = family(theory)
    chart = doc.get("chart", {})
    if "dim" in chart and chart["dim"] != dim:
        raise SpecError(f"theory {theory} needs dim {dim}, chart has dim {chart['dim']}",
                        "field chart.dim")
    coords = chart.get("coordinates")
    if coords is None:
        coords = [f"x{i}" for i in range(dim)]
    if len(coords) != dim:
        raise SpecError(f"theory {theory} needs {dim} coordinates, got {len(coords)}",
                        "field chart.coordinates")
    if "phi" in coords or "exp" in coords:
        raise SpecError("'phi' and 'exp' are reserved names", "field chart.coordinates")
    domain = None
    if "domain" in chart:
        dom = chart["domain"]
        if len(dom) != dim or any(lo >= hi for lo, hi in dom):
            raise SpecError(f"domain needs {dim} intervals [lo, hi] with lo < hi",
                            "field chart.domain")
        domain = (np.array([lo for lo, _ in dom], float), np.array([hi for _, hi in dom], float))
    metric = doc["metric"]
    if isinstance(metric, str):
        metric = _family_from_string(metric)
    spec = BackgroundSpec(theory, dim, tuple(coords), dict(metric),
                          scalars=dict(doc.get("scalars", {})),
                          forms=dict(doc.get("forms", {})),
                          potentials=dict(doc.get("potentials", {})),
                          probe_points=[list(p) for p in doc.get("probe_points", [])],
                          tolerances=dict(doc.get("tolerances", {})),
                          options=dict(doc.get("options", {})), domain=domain, source=source)
    _check_metric(spec)
    _check_fields(spec, fam)
    _check_points(spec)
    return spec


def _check_metric(spec):
    m = spec.metric
    fam = m.get("family")
    if fam is None:
        return
    if fam == "freund-rubin":
        if spec.theory != "m11":
            raise SpecError("freund-rubin is an eleven-dimensional family", "field metric")
        if "f" not in m:
            raise SpecError("freund-rubin needs the flux parameter f", "field metric.f")
    if fam == "product":
        blocks = m.get("blocks")
        if not blocks:
            raise SpecError("product family needs blocks [[size, K], ...]", "field metric.blocks")
        for i, (size, _) in enumerate(blocks):
            if size != int(size) or size < 1:
                raise SpecError("block sizes must be positive integers",
                                f"field metric.blocks[{i}]")
        total = sum(int(s) for s, _ in blocks)
        if total != spec.dim:
            raise SpecError(f"blocks sum to dim {total}, theory needs {spec.dim}",
                            "field metric.blocks")
    extra = set(m) - {"family", {"freund-rubin": "f", "product": "blocks"}.get(fam, "")}
    if extra:
        raise SpecError(f"unexpected keys {sorted(extra)} for family {fam}", "field metric")


def _index_key(key, spec, degree, where):
    parts = [p.strip() for p in str(key).split(",")] if str(key).strip() else []
    if len(parts) != degree:
        raise SpecError(f"component key {key!r} needs {degree} indices", where)
    idx = []
    for p in parts:
        if re.fullmatch(r"\d+", p):
            i = int(p)
        elif p in spec.coordinates:
            i = spec.coordinates.index(p)
        else:
            raise SpecError(f"unknown index {p!r} in key {key!r}", where)
        if not 0 <= i < spec.dim:
            raise SpecError(f"index {i} out of range in key {key!r}", where)
        idx.append(i)
    if len(set(idx)) != len(idx):
        raise SpecError(f"repeated index in key {key!r}", where)
    return tuple(idx)


def _check_fields(spec, fam):
    allowed = SCALARS[fam]
    for k in spec.scalars:
        if k not in allowed:
            raise SpecError(f"theory {spec.theory} has no scalar {k!r}", f"field scalars.{k}")
    for section, table in (("forms", FORM_DEGREES[fam]), ("potentials", POTENTIAL_DEGREES[fam])):
        for k in getattr(spec, section):
            if k not in table:
                raise SpecError(f"theory {spec.theory} has no {section[:-1]} {k!r} "
                                f"(expected one of {sorted(table)})", f"field {section}.{k}")
    if spec.forms and spec.potentials:
        raise SpecError("give either field strengths or potentials, not both", "field potentials")
    if spec.analytic:
        if spec.potentials:
            raise SpecError("potentials need a coordinate metric", "field potentials")
        for k, v in spec.scalars.items():
            e = _parse(v, spec, f"field scalars.{k}", allow_phi=False)
            if not e.polynomial or any(any(t) for t in e.poly(spec.dim).terms):
                raise SpecError("analytic families need constant scalars", f"field scalars.{k}")
    if "components" in spec.metric:
        for key in spec.metric["components"]:
            _metric_index(key, spec)


def _metric_index(key, spec):
    """(i, j) with i <= j for a metric component key such as "0,0" or "t,x"."""
    where = f"field metric.components.{key}"
    parts = [p.strip() for p in str(key).split(",")]
    if len(parts) != 2:
        raise SpecError(f"metric component key {key!r} needs two indices", where)
    idx = []
    for p in parts:
        if re.fullmatch(r"\d+", p):
            idx.append(int(p))
        elif p in spec.coordinates:
            idx.append(spec.coordinates.index(p))
        else:
            raise SpecError(f"unknown index {p!r}", where)
    if not all(0 <= i < spec.dim for i in idx):
        raise SpecError(f"index out of range in key {key!r}", where)
    return tuple(sorted(idx))


def _check_points(spec):
    for i, p in enumerate(spec.probe_points):
        if len(p) != spec.dim:
            raise SpecError(f"probe point has {len(p)} coordinates, chart has {spec.dim}",
                            f"field probe_points[{i}]")
        if spec.domain is not None:
            lo, hi = spec.domain
            if any(not (l < x < h) for x, l, h in zip(p, lo, hi)):
                raise SpecError("probe point lies outside the chart domain",
                                f"field probe_points[{i}]")
    if not spec.analytic and not spec.probe_points:
        raise SpecError("coordinate metrics need at least one probe point", "field probe_points")


def _parse(v, spec, where, allow_phi):
    try:
        return parse_expression(v, spec.coordinates, allow_phi)
    except ExprError as exc:
        raise SpecError(str(exc), where) from None


# ---------------------------------------------------------------------------
# building backgrounds
# ---------------------------------------------------------------------------

def _scalar_field(spec, name):
    """Poly, float callable or None for a scalar entry."""
    if name not in spec.scalars:
        return None
    e = _parse(spec.scalars[name], spec, f"field scalars.{name}", allow_phi=name != "phi")
    if e.polynomial:
        p = e.poly(spec.dim)
        if spec.analytic:
            return float(p.terms.get((0,) * spec.dim, 0))
        return p
    phi = _scalar_field(spec, "phi") if name != "phi" else None
    phi_fn = phi if callable(phi) else (None if phi is None else (lambda x, c=phi: c))
    return lambda x, e=e: e.value(x, phi_fn)


def _form_table(spec, section, name, degree):
    """Exact polynomial form, or a callable returning float forms when exp/phi occur."""
    where = f"field {section}.{name}"
    raw = getattr(spec, section)[name]
    if degree == 0:
        raw = {"": raw} if not isinstance(raw, dict) else raw
    elif not isinstance(raw, dict):
        raise SpecError("expected a table of components", where)
    n = spec.dim
    entries = {}
    for key, v in raw.items():
        I = _index_key(key, spec, degree, where)
        order = sorted(range(degree), key=lambda j: I[j])
        sign = _perm_parity(order)
        if tuple(sorted(I)) in entries:
            raise SpecError(f"component {key!r} given twice", where)
        entries[tuple(sorted(I))] = (sign, _parse(v, spec, f"{where}.{key}", allow_phi=True))
    if all(e.polynomial for _, e in entries.values()):
        coeffs = {}
        for I, (s, e) in entries.items():
            p = e.poly(n) * s
            if spec.analytic:
                if any(any(t) for t in p.terms):
                    raise SpecError("analytic families need constant (frame) components", where)
                coeffs[I] = float(p.terms.get((0,) * n, 0))
            elif p.terms:
                coeffs[I] = p
        return Form(n, degree, coeffs)
    if spec.analytic:
        raise SpecError("analytic families need constant (frame) components", where)
    if section == "potentials":
        raise SpecError("potentials must be polynomial (no exp/phi)", where)
    phi = _scalar_field(spec, "phi")
    phi_fn = phi if callable(phi) else (None if phi is None else (lambda x, c=phi: c))

    def evaluate(x, entries=entries):
        return Form(n, degree, {I: s * e.value(x, phi_fn) for I, (s, e) in entries.items()})
    return evaluate


def _perm_parity(order):
    sign = 1
    seen = list(order)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def _metric_callable(spec):
    n = spec.dim
    eta = np.diag([-1.0] + [1.0] * (n - 1))
    comps = []
    phi = _scalar_field(spec, "phi")
    phi_fn = phi if callable(phi) else (None if phi is None else (lambda x, c=phi: c))
    seen = set()
    for key, v in spec.metric["components"].items():
        where = f"field metric.components.{key}"
        i, j = _metric_index(key, spec)
        if (i, j) in seen:
            raise SpecError(f"component ({i},{j}) given twice", where)
        seen.add((i, j))
        comps.append((i, j, _parse(v, spec, where, allow_phi=True)))

    def g(x):
        M = eta.copy()
        for i, j, e in comps:
            M[i, j] = M[j, i] = e.value(x, phi_fn)
        return M
    return g


def _check_metric_at_points(spec, g):
    for k, p in enumerate(spec.probe_points):
        M = g(np.asarray(p, dtype=float))
        if not np.all(np.isfinite(M)):
            raise SpecError("metric is not finite here", f"field probe_points[{k}]")
        ev = np.linalg.eigvalsh(M)
        scale = max(1.0, float(np.max(np.abs(ev))))
        if np.min(np.abs(ev)) < 1e-12 * scale or int(np.sum(ev < 0)) != 1:
            raise SpecError("metric is degenerate or not Lorentzian here",
                            f"field probe_points[{k}]")


def _geometry(spec):
    m = spec.metric
    fam = m["family"]
    if fam == "minkowski":
        return AnalyticGeometry([Block(spec.dim, 0.0)])
    if fam == "freund-rubin":
        return freund_rubin_geometry(float(m["f"]))
    return AnalyticGeometry([Block(int(s), float(K)) for s, K in m["blocks"]])


def build_background(spec):
    """Background object for a validated spec (raises :class:`SpecError`)."""
    fam = spec.family
    opts = spec.options
    geometry = patch = None
    if spec.analytic:
        geometry = _geometry(spec)
    else:
        g = _metric_callable(spec)
        _check_metric_at_points(spec, g)
        patch = FramePatch(g, spec.dim, orientation=opts.get("orientation", 1),
                           step=opts.get("step", DEFAULT_STEP), domain=spec.domain)
    forms = {k: _form_table(spec, "forms", k, FORM_DEGREES[fam][k]) for k in spec.forms}
    pots = {k: _form_table(spec, "potentials", k, POTENTIAL_DEGREES[fam][k])
            for k in spec.potentials}
    phi = _scalar_field(spec, "phi")
    try:
        if fam == "m11":
            if "beta" in opts:
                beta = float(opts["beta"])
            elif "kappa" in opts:
                beta = anomaly_constant(float(opts["kappa"]))
            else:
                beta = 0.0
            G = forms.get("G")
            if "C" in pots:
                G = d_poly(pots["C"])
            if G is None and spec.metric.get("family") == "freund-rubin":
                G = freund_rubin_flux(float(spec.metric["f"]))
            return background11(patch=patch, geometry=geometry, G=G, C=pots.get("C"),
                                kappa=opts.get("kappa"), beta=beta)
        tag = "string" if spec.theory.endswith("string") else "einstein"
        if fam == "iia":
            return background_iia(patch=patch, geometry=geometry, phi=phi, frame_tag=tag,
                                  potentials=pots or None, kappa=opts.get("kappa"), **forms)
        C0 = _scalar_field(spec, "C0")
        return background_iib(patch=patch, geometry=geometry, phi=phi, C0=C0, frame_tag=tag,
                              potentials=pots or None, kappa=opts.get("kappa"), **forms)
    except BackgroundError as exc:
        raise SpecError(str(exc), "background") from None


def load_spec(path):
    doc, text = load_document(path)
    return parse_spec(doc, text, source=str(path))
