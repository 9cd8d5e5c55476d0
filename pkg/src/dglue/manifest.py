"""Manifold description files and class expressions.

A description is a JSON object::

    {
      "name": "K3 blown up twice",
      "rank": 4,
      "basis": ["S", "D", "E1", "E2"],
      "form": [[2, 1, 0, 0], [1, 0, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]],
      "classes": {"sigma": [1, 0, -1, -1], "w": [0, 0, 1, 0],
                  "dbar": [0, 1, 0, 0], "probes": {"P": [0, 0, 1, -1]}},
      "genus": 2, "b_plus": 3, "b1": 0, "euler": 26, "signature": -18,
      "simple_type": true,
      "basic_classes": [{"vector": [0, 0, 1, 1], "coeff": "1/4"}, ...]
    }

``basis``, ``b1``, ``dbar`` and ``probes`` are optional.  Coefficients are
strings (``"p/q"`` or ``"p/q+r/s i"``) so no float ever enters.  The
canonical serialization is ``json.dumps(..., indent=2, sort_keys=True)``.

Class expressions are integer linear combinations of named classes with
formal variables, e.g. ``"s*sigma + t*dbar"`` or ``"2*u*(E1 - E2)"``.
"""

from __future__ import annotations

import ast
import json
from importlib import resources
from pathlib import Path
from typing import Callable

from .errors import ParseError, ValidationError
from .exppoly import GaussRat
from .kmseries import Lattice, ManifoldDescriptor, StructureSeries, validate

REQUIRED = ("name", "rank", "form", "classes", "genus", "b_plus", "euler", "signature",
            "simple_type", "basic_classes")


def _int_vector(v, what: str) -> tuple:
    if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise ParseError(f"{what} must be a list of integers")
    return tuple(v)


def _int(doc: dict, key: str) -> int:
    v = doc[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ParseError(f"{key} must be an integer")
    return v


def from_dict(doc: dict, check: bool = True) -> tuple[ManifoldDescriptor, StructureSeries]:
    """Build descriptor and series; ParseError on shape, ValidationError on invariants."""
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    missing = [k for k in REQUIRED if k not in doc]
    if missing:
        raise ParseError("missing keys: " + ", ".join(missing))
    rank = _int(doc, "rank")
    form = doc["form"]
    if not isinstance(form, list):
        raise ParseError("form must be a list of rows")
    form = tuple(_int_vector(r, "form row") for r in form)
    classes = doc["classes"]
    if not isinstance(classes, dict) or "sigma" not in classes or "w" not in classes:
        raise ParseError("classes must contain sigma and w")
    basis = doc.get("basis")
    if basis is not None and (not isinstance(basis, list) or not all(isinstance(b, str) for b in basis)):
        raise ParseError("basis must be a list of names")
    named = {}
    if basis:
        for i, b in enumerate(basis):
            named[b] = tuple(int(i == j) for j in range(rank))
    probes = classes.get("probes", {})
    if not isinstance(probes, dict):
        raise ParseError("probes must be an object")
    for k, v in probes.items():
        named[k] = _int_vector(v, f"probe {k}")
    if not isinstance(doc["simple_type"], bool):
        raise ParseError("simple_type must be true or false")
    bcs = doc["basic_classes"]
    if not isinstance(bcs, list):
        raise ParseError("basic_classes must be a list")
    pairs = []
    for i, bc in enumerate(bcs):
        if not isinstance(bc, dict) or "vector" not in bc or "coeff" not in bc:
            raise ParseError(f"basic class {i} needs vector and coeff")
        if not isinstance(bc["coeff"], str):
            raise ParseError(f"basic class {i}: coeff must be a string")
        try:
            c = GaussRat.parse(bc["coeff"])
        except ParseError as exc:
            raise ParseError(f"basic class {i}: bad coefficient {bc['coeff']!r}") from exc
        pairs.append((_int_vector(bc["vector"], f"basic class {i}"), c))
    m = ManifoldDescriptor(
        lattice=Lattice(form),
        sigma=_int_vector(classes["sigma"], "sigma"),
        w=_int_vector(classes["w"], "w"),
        dbar=_int_vector(classes["dbar"], "dbar") if classes.get("dbar") is not None else None,
        b_plus=_int(doc, "b_plus"),
        b1=_int(doc, "b1") if "b1" in doc else 0,
        euler=_int(doc, "euler"),
        signature=_int(doc, "signature"),
        genus=_int(doc, "genus"),
        name=str(doc["name"]),
        simple_type=doc["simple_type"],
        classes=named,
    )
    problems = []
    if len(form) != rank:
        problems.append(f"vector length: form has {len(form)} rows but rank is {rank}")
    if check:
        if not problems:
            series = StructureSeries(m, pairs) if all(len(k) == rank for k, _ in pairs) else None
            problems = validate(m, series)
            if series is None and not problems:
                problems = ["vector length: basic class length differs from rank"]
        if problems:
            raise ValidationError(problems)
    return m, StructureSeries(m, pairs)


def to_dict(m: ManifoldDescriptor, s: StructureSeries, basis: list[str] | None = None) -> dict:
    classes = {"sigma": list(m.sigma), "w": list(m.w)}
    if m.dbar is not None:
        classes["dbar"] = list(m.dbar)
    unit = {tuple(int(i == j) for j in range(m.lattice.rank)) for i in range(m.lattice.rank)}
    probes = {k: list(v) for k, v in m.classes.items() if not (basis and k in basis and v in unit)}
    if probes:
        classes["probes"] = probes
    doc = {
        "name": m.name, "rank": m.lattice.rank, "form": [list(r) for r in m.lattice.form],
        "classes": classes, "genus": m.genus, "b_plus": m.b_plus, "b1": m.b1,
        "euler": m.euler, "signature": m.signature, "simple_type": m.simple_type,
        "basic_classes": [{"vector": list(k), "coeff": str(a)} for k, a in s.classes],
    }
    if basis:
        doc["basis"] = list(basis)
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def canonical(text: str) -> str:
    """Parse then re-serialize a description."""
    doc = loads_doc(text)
    m, s = from_dict(doc, check=False)
    return dumps(to_dict(m, s, doc.get("basis")))


def loads_doc(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def load(path: str | Path) -> tuple[ManifoldDescriptor, StructureSeries]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return from_dict(loads_doc(text))


def load_builtin(name: str) -> tuple[ManifoldDescriptor, StructureSeries]:
    """Load one of the bundled descriptions (``k3_blowup2``, ``k3_torus_handle``, ...)."""
    text = resources.files("dglue").joinpath("data").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return from_dict(loads_doc(text))


def builtin_names() -> list[str]:
    folder = resources.files("dglue").joinpath("data")
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


# -- class expressions ----------------------------------------------------------
#
# A parsed expression is a dict {variable: {side: vector}}; single-manifold
# expressions use the side "".

Resolver = Callable[[ast.AST], "tuple[str, tuple] | None"]


def _add_vec(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for side, v in b.items():
        if side in out:
            out[side] = tuple(x + sign * y for x, y in zip(out[side], v))
        else:
            out[side] = tuple(sign * y for y in v)
    return out


def _scale_vec(a: dict, c: int) -> dict:
    return {side: tuple(c * x for x in v) for side, v in a.items()}


class _Value:
    """Either an integer, a formal variable, a class, or a combination."""

    def __init__(self, kind: str, data):
        self.kind = kind  # "int", "var" (name, multiplier), "vec", "combo"
        self.data = data


def _combine(op, x: _Value, y: _Value) -> _Value:
    if isinstance(op, (ast.Add, ast.Sub)):
        sign = 1 if isinstance(op, ast.Add) else -1
        if x.kind == y.kind == "int":
            return _Value("int", x.data + sign * y.data)
        if x.kind == y.kind == "vec":
            return _Value("vec", _add_vec(x.data, y.data, sign))
        if x.kind == y.kind == "combo":
            out = dict(x.data)
            for v, vec in y.data.items():
                out[v] = _add_vec(out.get(v, {}), vec, sign)
            return _Value("combo", out)
        raise ParseError("cannot add a class to a formal term; write e.g. s*(A + B)")
    if isinstance(op, ast.Mult):
        kinds = {x.kind, y.kind}
        if x.kind == y.kind == "int":
            return _Value("int", x.data * y.data)
        if kinds == {"int", "vec"}:
            n, v = (x, y) if x.kind == "int" else (y, x)
            return _Value("vec", _scale_vec(v.data, n.data))
        if kinds == {"int", "combo"}:
            n, c = (x, y) if x.kind == "int" else (y, x)
            return _Value("combo", {k: _scale_vec(v, n.data) for k, v in c.data.items()})
        if kinds == {"var", "vec"}:
            (name, c), v = (x.data, y) if x.kind == "var" else (y.data, x)
            return _Value("combo", {name: _scale_vec(v.data, c)})
        if kinds == {"var", "int"}:
            (name, c), n = (x.data, y) if x.kind == "var" else (y.data, x)
            return _Value("var", (name, c * n.data))
        raise ParseError("expression is not linear in the classes")
    raise ParseError(f"unsupported operator {type(op).__name__}")


def _walk(node: ast.AST, resolve: Resolver) -> _Value:
    if isinstance(node, ast.Expression):
        return _walk(node.body, resolve)
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return _Value("int", node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _walk(node.operand, resolve)
        c = -1 if isinstance(node.op, ast.USub) else 1
        return _combine(ast.Mult(), _Value("int", c), inner)
    if isinstance(node, ast.BinOp):
        return _combine(node.op, _walk(node.left, resolve), _walk(node.right, resolve))
    if isinstance(node, (ast.Name, ast.Attribute)):
        hit = resolve(node)
        if hit is not None:
            side, vec = hit
            return _Value("vec", {side: tuple(vec)})
        if isinstance(node, ast.Name):
            if node.id in ("i", "exp", "cosh", "sinh"):
                raise ParseError(f"{node.id!r} cannot be a formal variable")
            return _Value("var", (node.id, 1))
        raise ParseError(f"unknown class {ast.unparse(node)!r}")
    raise ParseError(f"unsupported syntax in class expression: {ast.unparse(node)!r}")


def _parse(text: str, resolve: Resolver) -> dict:
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}") from exc
    val = _walk(tree, resolve)
    if val.kind != "combo":
        raise ParseError("expression must be a formal combination such as s*sigma")
    return {v: vec for v, vec in val.data.items() if any(any(x) for x in vec.values())}


def parse_class_expr(text: str, m: ManifoldDescriptor) -> dict:
    """``{variable: vector}`` for an expression on one manifold."""
    named = m.named()

    def resolve(node):
        if isinstance(node, ast.Name) and node.id in named:
            return "", named[node.id]
        return None

    out = _parse(text, resolve)
    for v, vec in out.items():
        if len(vec[""]) != m.lattice.rank:
            raise ParseError(f"class for {v} has the wrong length")
    return {v: vec[""] for v, vec in out.items()}


def parse_glue_expr(text: str, m1: ManifoldDescriptor, m2: ManifoldDescriptor) -> dict:
    """Split a probe like ``"u*m1.P + v*m2.P + t*D + s*Sigma"``.

    Returns ``{"alpha": {...}, "beta": {...}, "t": name|None, "s": name|None}``.
    """
    sides = {"m1": m1.named(), "m2": m2.named()}

    def resolve(node):
        if isinstance(node, ast.Attribute) and isinstance(node.value, ast.Name):
            table = sides.get(node.value.id)
            if table is None or node.attr not in table:
                raise ParseError(f"unknown class {ast.unparse(node)!r}")
            return node.value.id, table[node.attr]
        if isinstance(node, ast.Name) and node.id in ("D", "Sigma"):
            return node.id, (1,)
        return None

    out = {"alpha": {}, "beta": {}, "t": None, "s": None}
    for v, vec in _parse(text, resolve).items():
        for side, comp in vec.items():
            if not any(comp):
                continue
            if side == "m1":
                out["alpha"][v] = comp
            elif side == "m2":
                out["beta"][v] = comp
            else:
                key = "t" if side == "D" else "s"
                if comp != (1,) or out[key] not in (None, v):
                    raise ParseError(f"{side} must appear once with coefficient 1")
                out[key] = v
    return out


__all__ = [
    "from_dict", "to_dict", "dumps", "canonical", "loads_doc", "load", "load_builtin",
    "builtin_names", "parse_class_expr", "parse_glue_expr",
]
