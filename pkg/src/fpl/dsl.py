"""Text formats: the formula language, the JSON atom catalog and trajectory CSV.

Formula grammar, lowest to highest precedence::

    formula := until ('|' until)*                 # left-associative
    until   := concat (('U' | 'U_(' num ',' num ')') until)?   # right-associative
    concat  := unary ('.' concat)?                # right-associative
    unary   := 'F' '[' num ']' unary | primary
    primary := IDENT | 'TOP' '[' num ']' | '(' formula ')'

``F[t] phi`` is sugar for ``TOP[t] U phi``. ``U``, ``F`` and ``TOP`` are
reserved words.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .core.atom import Atom, AtomError, DiagonalCov, DiagonalStdCov, FullCov, TopAtom, format_number
from .core.formula import AtomRef, Concat, Or, Top, Until, is_atomic
from .core.plf import PiecewiseLinearFn
from .core.trajectory import Trajectory

RESERVED = {"U", "F", "TOP"}


class DslError(ValueError):
    pass


class FormulaSyntaxError(DslError):
    def __init__(self, message, line, col):
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col


class UnknownAtom(DslError):
    pass


class SchemaError(DslError):
    pass


@dataclass
class AtomCatalog:
    dim: int
    atoms: dict = field(default_factory=dict)

    def add(self, atom):
        if atom.name in self.atoms:
            raise SchemaError(f"duplicate atom name {atom.name!r}")
        if atom.dim != self.dim:
            raise SchemaError(f"atom {atom.name!r} has dim {atom.dim}, catalog has {self.dim}")
        self.atoms[atom.name] = atom

    def __getitem__(self, name):
        return self.atoms[name]

    def __contains__(self, name):
        return name in self.atoms

    def __iter__(self):
        return iter(self.atoms.values())


@dataclass(frozen=True)
class NamedTop:
    """A catalog entry naming a true atom, e.g. ``{"name": "free", "kind": "top"}``."""

    name: str
    horizon: float
    dim: int


# --------------------------------------------------------------------------- formulas

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<num>[0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?)"
    r"|(?P<until>U_\()|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[|.()\[\],])"
)


def _tokenize(text):
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        pos = m.end()
        if kind == "nl":
            line += 1
            line_start = pos
            continue
        if kind == "ws":
            continue
        if kind == "ident" and value in RESERVED:
            kind = value
        elif kind == "op":
            kind = value
        tokens.append((kind, value, line, col))
    tokens.append(("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text, catalog):
        self.toks = _tokenize(text)
        self.i = 0
        self.catalog = catalog

    def peek(self):
        return self.toks[self.i][0]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            shown = tok[1] or "end of input"
            raise FormulaSyntaxError(f"expected {kind!r}, found {shown!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def number(self):
        return float(self.take("num")[1])

    def parse(self):
        f = self.or_expr()
        self.take("eof")
        return f

    def or_expr(self):
        f = self.until_expr()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.until_expr())
        return f

    def until_expr(self):
        left = self.concat_expr()
        if self.peek() == "U":
            self.take()
            return Until(left, self.until_expr())
        if self.peek() == "until":
            self.take()
            a = self.number()
            self.take(",")
            b = self.number()
            tok = self.take(")")
            if b < a:
                raise FormulaSyntaxError("until interval upper bound below lower bound", tok[2], tok[3])
            return Until(left, self.until_expr(), (a, b))
        return left

    def concat_expr(self):
        left = self.unary()
        if self.peek() == ".":
            self.take()
            return Concat(left, self.concat_expr())
        return left

    def bracket_number(self):
        self.take("[")
        tok = self.toks[self.i]
        x = self.number()
        self.take("]")
        if not x > 0:
            raise FormulaSyntaxError("horizon must be positive", tok[2], tok[3])
        return x

    def unary(self):
        if self.peek() == "F":
            self.take()
            horizon = self.bracket_number()
            return Until(Top(horizon, self.catalog.dim), self.unary())
        return self.primary()

    def primary(self):
        kind, value, line, col = self.toks[self.i]
        if kind == "TOP":
            self.take()
            return Top(self.bracket_number(), self.catalog.dim)
        if kind == "ident":
            self.take()
            if value not in self.catalog:
                raise UnknownAtom(f"unknown atom {value!r} at line {line}, column {col}")
            entry = self.catalog[value]
            if isinstance(entry, NamedTop):
                return Top(entry.horizon, entry.dim)
            return AtomRef(entry)
        if kind == "(":
            self.take()
            f = self.or_expr()
            self.take(")")
            return f
        raise FormulaSyntaxError(f"unexpected {value or 'end of input'!r}", line, col)


def parse_formula(text: str, catalog: AtomCatalog):
    return _Parser(text, catalog).parse()


def _wrap(f):
    s = emit_formula(f)
    return s if is_atomic(f) else f"({s})"


def emit_formula(f) -> str:
    if isinstance(f, AtomRef):
        return f.atom.name
    if isinstance(f, Top):
        return f"TOP[{format_number(f.horizon)}]"
    if isinstance(f, Or):
        return f"{_wrap(f.left)} | {_wrap(f.right)}"
    if isinstance(f, Concat):
        return f"{_wrap(f.left)} . {_wrap(f.right)}"
    if isinstance(f, Until):
        if f.interval is None:
            op = "U"
        else:
            a, b = f.interval
            op = f"U_({format_number(a)},{format_number(b)})"
        return f"{_wrap(f.left)} {op} {_wrap(f.right)}"
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------- atoms JSON

def _plf_from_json(obj, where):
    if not isinstance(obj, list) or not obj:
        raise SchemaError(f"{where}: expected a non-empty list of [t, v] pairs")
    pts = []
    for p in obj:
        if not (isinstance(p, list) and len(p) == 2):
            raise SchemaError(f"{where}: breakpoint {p!r} is not a [t, v] pair")
        t, v = p
        if v == "inf":
            v = math.inf
        if isinstance(t, bool) or not isinstance(t, (int, float)):
            raise SchemaError(f"{where}: time {t!r} is not a number")
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError(f"{where}: value {v!r} is not a number or \"inf\"")
        pts.append((t, v))
    try:
        return PiecewiseLinearFn(pts)
    except ValueError as e:
        raise SchemaError(f"{where}: {e}") from None


def _plf_to_json(f):
    return [[t, "inf" if math.isinf(v) else v] for t, v in f.breakpoints]


def _atom_from_json(obj, dim):
    if not isinstance(obj, dict):
        raise SchemaError("atom entries must be objects")
    for key in ("name", "horizon"):
        if key not in obj:
            raise SchemaError(f"atom entry missing {key!r}")
    name = obj["name"]
    if not isinstance(name, str) or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in RESERVED:
        raise SchemaError(f"invalid atom name {name!r}")
    horizon = obj["horizon"]
    if isinstance(horizon, bool) or not isinstance(horizon, (int, float)) or not horizon > 0:
        raise SchemaError(f"atom {name!r}: horizon must be a positive number")
    if obj.get("kind") == "top":
        return NamedTop(name, float(horizon), dim)
    mean = obj.get("mean")
    if not isinstance(mean, list) or len(mean) != dim:
        raise SchemaError(f"atom {name!r}: mean must list {dim} functions")
    cov = obj.get("cov")
    if not isinstance(cov, dict) or "kind" not in cov or "entries" not in cov:
        raise SchemaError(f"atom {name!r}: cov must be an object with kind and entries")
    kind, entries = cov["kind"], cov["entries"]
    mean_fns = tuple(_plf_from_json(m, f"{name}.mean[{i}]") for i, m in enumerate(mean))
    try:
        if kind in ("diagonal", "diagonal-std"):
            if not isinstance(entries, list) or len(entries) != dim:
                raise SchemaError(f"atom {name!r}: diagonal cov must list {dim} functions")
            fns = tuple(_plf_from_json(e, f"{name}.cov[{i}]") for i, e in enumerate(entries))
            cov_obj = DiagonalCov(fns) if kind == "diagonal" else DiagonalStdCov(fns)
        elif kind == "full":
            if not isinstance(entries, list) or len(entries) != dim or any(
                not isinstance(r, list) or len(r) != dim for r in entries
            ):
                raise SchemaError(f"atom {name!r}: full cov must be a {dim}x{dim} array")
            cov_obj = FullCov(tuple(
                tuple(_plf_from_json(e, f"{name}.cov[{i}][{j}]") for j, e in enumerate(row))
                for i, row in enumerate(entries)
            ))
        else:
            raise SchemaError(f"atom {name!r}: unknown covariance kind {kind!r}")
        return Atom(name, float(horizon), mean_fns, cov_obj)
    except AtomError as e:
        raise SchemaError(str(e)) from None


def parse_atoms(data) -> AtomCatalog:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from None
    if not isinstance(obj, dict) or "dim" not in obj or "atoms" not in obj:
        raise SchemaError('atom catalog must be an object with "dim" and "atoms"')
    dim = obj["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise SchemaError('"dim" must be a positive integer')
    if not isinstance(obj["atoms"], list):
        raise SchemaError('"atoms" must be a list')
    catalog = AtomCatalog(dim)
    for entry in obj["atoms"]:
        catalog.add(_atom_from_json(entry, dim))
    return catalog


def atom_to_json(atom) -> dict:
    if isinstance(atom, NamedTop):
        return {"name": atom.name, "kind": "top", "horizon": atom.horizon}
    cov = atom.cov
    if isinstance(cov, FullCov):
        entries = [[_plf_to_json(f) for f in row] for row in cov.entries]
    else:
        entries = [_plf_to_json(f) for f in cov.functions]
    return {
        "name": atom.name,
        "horizon": atom.horizon,
        "mean": [_plf_to_json(f) for f in atom.mean],
        "cov": {"kind": cov.kind, "entries": entries},
    }


def emit_atoms(catalog: AtomCatalog) -> str:
    body = {"dim": catalog.dim, "atoms": [atom_to_json(a) for a in catalog]}
    return json.dumps(body, indent=2) + "\n"


def catalog_of(atom_list) -> AtomCatalog:
    atom_list = list(atom_list)
    catalog = AtomCatalog(atom_list[0].dim)
    for a in atom_list:
        if not isinstance(a, TopAtom) and a.name not in catalog:
            catalog.add(a)
    return catalog


# --------------------------------------------------------------------------- trajectory CSV

def parse_trajectory(data) -> Trajectory:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    rows = [r for r in csv.reader(io.StringIO(data)) if r and any(c.strip() for c in r)]
    if not rows:
        raise SchemaError("empty trajectory file")
    header = [c.strip() for c in rows[0]]
    if len(header) < 2 or header[0] != "t":
        raise SchemaError('trajectory header must be "t,s1,...,sn"')
    times, points = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise SchemaError(f"line {lineno}: expected {len(header)} columns, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise SchemaError(f"line {lineno}: non-numeric value") from None
        if not all(math.isfinite(v) for v in vals):
            raise SchemaError(f"line {lineno}: values must be finite")
        if times and vals[0] <= times[-1]:
            raise SchemaError(f"line {lineno}: time {vals[0]:g} does not increase")
        times.append(vals[0])
        points.append(vals[1:])
    if not times:
        raise SchemaError("trajectory has no samples")
    if times[0] != 0:
        raise SchemaError(f"first time must be 0, got {times[0]:g}")
    return Trajectory(times, np.array(points))


def emit_trajectory(z: Trajectory, names=None) -> str:
    names = names or [f"s{i + 1}" for i in range(z.dim)]
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", *names])
    for t, p in zip(z.times.tolist(), z.points.tolist()):
        w.writerow([repr(t), *(repr(v) for v in p)])
    return out.getvalue()


def placeholder_catalog(text: str, dim: int = 1) -> AtomCatalog:
    """Catalog with a unit atom for every identifier in ``text``, for purely syntactic work."""
    from .core.atom import linear_atom

    catalog = AtomCatalog(dim)
    for kind, value, _, _ in _tokenize(text):
        if kind == "ident" and value not in catalog:
            catalog.add(linear_atom(value, [0.0] * dim, [0.0] * dim, [1.0] * dim, 1.0))
    return catalog
