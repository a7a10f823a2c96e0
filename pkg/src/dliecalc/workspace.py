"""Workspace files: a single JSON document naming algebras, Lie-Rinehart
algebras, cocycles, modules and connections.

Rationals are written as strings "p/q" (or integers); floats are rejected.
Parsing is strict: unknown fields and dangling references raise
WorkspaceError with the JSON path of the offending entry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .conncat import Connection, Diff1Space, compute_diff1
from .dliealg import DLieAlgebra, build_d1, functor_F
from .finalg import AModule, FiniteAlgebra
from .lierinehart import Cochain, LieRinehartAlgebra, derivations_lr, \
    trivial_coefficients
from .ratlin import Mat, Vec


class WorkspaceError(Exception):
    """Input error: malformed document or dangling reference."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def _rational(x: Any, path: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise WorkspaceError(f"expected an integer or a 'p/q' string, got {x!r}", path)
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise WorkspaceError(f"malformed rational {x!r}", path)
    raise WorkspaceError(f"expected an integer or a 'p/q' string, got {x!r}", path)


def _rat_list(x: Any, length: int, path: str) -> Vec:
    if not isinstance(x, list):
        raise WorkspaceError("expected a list of rationals", path)
    if len(x) != length:
        raise WorkspaceError(f"expected {length} entries, got {len(x)}", path)
    return tuple(_rational(v, f"{path}[{i}]") for i, v in enumerate(x))


def _matrix(x: Any, rows: int, cols: int, path: str) -> Mat:
    if not isinstance(x, list) or len(x) != rows:
        raise WorkspaceError(f"expected a {rows}x{cols} matrix", path)
    return Mat([_rat_list(r, cols, f"{path}[{i}]") for i, r in enumerate(x)])


def _require_keys(obj: Any, required: set[str], optional: set[str], path: str) -> None:
    if not isinstance(obj, dict):
        raise WorkspaceError("expected an object", path)
    for k in obj:
        if k not in required and k not in optional:
            raise WorkspaceError(f"unknown field {k!r}", f"{path}.{k}")
    for k in required:
        if k not in obj:
            raise WorkspaceError(f"missing field {k!r}", path)


def _int_field(obj: dict, key: str, path: str) -> int:
    v = obj[key]
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise WorkspaceError(f"field {key!r} must be a non-negative integer", path)
    return v


@dataclass
class ConnectionEntry:
    name: str
    dlie: DLieAlgebra
    module: AModule
    connection: Connection


@dataclass
class Workspace:
    algebras: dict[str, FiniteAlgebra] = field(default_factory=dict)
    lie_rinehart: dict[str, LieRinehartAlgebra] = field(default_factory=dict)
    cocycles: dict[str, Cochain] = field(default_factory=dict)
    cocycle_hosts: dict[str, str] = field(default_factory=dict)
    modules: dict[str, AModule] = field(default_factory=dict)
    connections: dict[str, ConnectionEntry] = field(default_factory=dict)
    _derlr: dict[str, LieRinehartAlgebra] = field(default_factory=dict)
    _diff1: dict[str, Diff1Space] = field(default_factory=dict)

    def derivations_of(self, alg_name: str) -> LieRinehartAlgebra:
        if alg_name not in self._derlr:
            self._derlr[alg_name] = derivations_lr(self.algebras[alg_name])
        return self._derlr[alg_name]

    def diff1_of(self, mod_name: str) -> Diff1Space:
        if mod_name not in self._diff1:
            self._diff1[mod_name] = compute_diff1(self.modules[mod_name])
        return self._diff1[mod_name]

    def algebra_name(self, A: FiniteAlgebra) -> str:
        for name, cand in self.algebras.items():
            if cand is A:
                return name
        raise WorkspaceError("algebra is not part of this workspace")

    def build_dlie(self, spec: str, path: str = "dlie-spec") -> DLieAlgebra:
        """Build a D-Lie algebra from 'd1:ALG[,COCYCLE]' or 'F:LR[,COCYCLE]'."""
        if ":" not in spec:
            raise WorkspaceError(
                f"malformed D-Lie spec {spec!r}; use 'd1:ALGEBRA[,COCYCLE]'"
                " or 'F:LIE_RINEHART[,COCYCLE]'", path)
        kind, _, rest = spec.partition(":")
        target, _, cname = rest.partition(",")
        f: Optional[Cochain] = None
        if cname:
            if cname not in self.cocycles:
                raise WorkspaceError(f"undefined cocycle {cname!r}", path)
            f = self.cocycles[cname]
        if kind == "d1":
            if target not in self.algebras:
                raise WorkspaceError(f"undefined algebra {target!r}", path)
            A = self.algebras[target]
            if f is not None and f.lr is not self.derivations_of(target):
                raise WorkspaceError(
                    f"cocycle {cname!r} does not live on the derivations"
                    f" of {target!r}", path)
            return build_d1(A, f)
        if kind == "F":
            if target not in self.lie_rinehart:
                raise WorkspaceError(f"undefined lie_rinehart {target!r}", path)
            L = self.lie_rinehart[target]
            alg_name = self.algebra_name(L.algebra)
            if f is not None and f.lr is not self.derivations_of(alg_name):
                raise WorkspaceError(
                    f"cocycle {cname!r} must live on the derivations of"
                    f" {alg_name!r} to twist a Lie-Rinehart extension", path)
            return functor_F(L, f)
        raise WorkspaceError(f"unknown D-Lie spec kind {kind!r}", path)


def _parse_algebra(name: str, obj: Any, path: str) -> FiniteAlgebra:
    _require_keys(obj, {"dim", "basis", "unit", "mul"}, set(), path)
    dim = _int_field(obj, "dim", path)
    basis = obj["basis"]
    if not isinstance(basis, list) or len(basis) != dim \
            or not all(isinstance(b, str) for b in basis):
        raise WorkspaceError(f"field 'basis' must list {dim} labels", f"{path}.basis")
    unit = _rat_list(obj["unit"], dim, f"{path}.unit")
    mul = obj["mul"]
    if not isinstance(mul, list) or len(mul) != dim:
        raise WorkspaceError(f"field 'mul' must hold {dim}x{dim} products",
                             f"{path}.mul")
    table = []
    for i, row in enumerate(mul):
        if not isinstance(row, list) or len(row) != dim:
            raise WorkspaceError(f"expected {dim} products", f"{path}.mul[{i}]")
        table.append([_rat_list(p, dim, f"{path}.mul[{i}][{j}]")
                      for j, p in enumerate(row)])
    return FiniteAlgebra(basis, table, unit, name=name)


def _parse_lr(name: str, obj: Any, ws: Workspace, path: str) -> LieRinehartAlgebra:
    _require_keys(obj, {"algebra", "dim", "bracket", "anchor", "a_action"},
                  set(), path)
    aname = obj["algebra"]
    if aname not in ws.algebras:
        raise WorkspaceError(f"undefined algebra {aname!r}", f"{path}.algebra")
    A = ws.algebras[aname]
    dim = _int_field(obj, "dim", path)
    br = obj["bracket"]
    if not isinstance(br, list) or len(br) != dim:
        raise WorkspaceError(f"field 'bracket' must hold {dim}x{dim} vectors",
                             f"{path}.bracket")
    bracket = []
    for i, row in enumerate(br):
        if not isinstance(row, list) or len(row) != dim:
            raise WorkspaceError(f"expected {dim} vectors", f"{path}.bracket[{i}]")
        bracket.append([_rat_list(v, dim, f"{path}.bracket[{i}][{j}]")
                        for j, v in enumerate(row)])
    anc = obj["anchor"]
    if not isinstance(anc, list) or len(anc) != dim:
        raise WorkspaceError(f"field 'anchor' must hold {dim} matrices",
                             f"{path}.anchor")
    anchor = [_matrix(m, A.dim, A.dim, f"{path}.anchor[{i}]")
              for i, m in enumerate(anc)]
    act = obj["a_action"]
    if not isinstance(act, list) or len(act) != A.dim:
        raise WorkspaceError(f"field 'a_action' must hold {A.dim} matrices",
                             f"{path}.a_action")
    action = [_matrix(m, dim, dim, f"{path}.a_action[{a}]")
              for a, m in enumerate(act)]
    carrier = AModule(A, dim, action, name=name)
    return LieRinehartAlgebra(carrier, bracket, anchor, name=name)


def _parse_cocycle(name: str, obj: Any, ws: Workspace, path: str) -> tuple[Cochain, str]:
    _require_keys(obj, {"on", "values"}, set(), path)
    on = obj["on"]
    if not isinstance(on, str):
        raise WorkspaceError("field 'on' must be a string", f"{path}.on")
    if on == "derivations":
        if len(ws.algebras) != 1:
            raise WorkspaceError(
                "'derivations' is ambiguous with several algebras; use"
                " 'derivations:NAME'", f"{path}.on")
        host = next(iter(ws.algebras))
        L = ws.derivations_of(host)
        host = f"derivations:{host}"
    elif on.startswith("derivations:"):
        aname = on.split(":", 1)[1]
        if aname not in ws.algebras:
            raise WorkspaceError(f"undefined algebra {aname!r}", f"{path}.on")
        L = ws.derivations_of(aname)
        host = on
    elif on in ws.lie_rinehart:
        L = ws.lie_rinehart[on]
        host = on
    else:
        raise WorkspaceError(f"undefined cocycle host {on!r}", f"{path}.on")
    vals_obj = obj["values"]
    if not isinstance(vals_obj, dict):
        raise WorkspaceError("field 'values' must map 'i,j' to vectors",
                             f"{path}.values")
    n = L.algebra.dim
    values: dict[tuple[int, ...], Vec] = {}
    for key, vec in vals_obj.items():
        parts = key.split(",")
        try:
            i, j = (int(p) for p in parts)
        except ValueError:
            raise WorkspaceError(f"malformed key {key!r}; expected 'i,j'",
                                 f"{path}.values.{key}")
        if not (0 <= i < j < L.dim):
            raise WorkspaceError(
                f"key {key!r} out of range for a strictly increasing pair"
                f" below {L.dim}", f"{path}.values.{key}")
        values[(i, j)] = _rat_list(vec, n, f"{path}.values.{key}")
    c = Cochain(L, trivial_coefficients(L), 2, values)
    return c, host


def _parse_module(name: str, obj: Any, ws: Workspace, path: str) -> AModule:
    _require_keys(obj, {"algebra", "dim", "action"}, {"right_action"}, path)
    aname = obj["algebra"]
    if aname not in ws.algebras:
        raise WorkspaceError(f"undefined algebra {aname!r}", f"{path}.algebra")
    A = ws.algebras[aname]
    dim = _int_field(obj, "dim", path)
    act = obj["action"]
    if not isinstance(act, list) or len(act) != A.dim:
        raise WorkspaceError(f"field 'action' must hold {A.dim} matrices",
                             f"{path}.action")
    action = [_matrix(m, dim, dim, f"{path}.action[{a}]") for a, m in enumerate(act)]
    right = None
    if "right_action" in obj:
        ract = obj["right_action"]
        if not isinstance(ract, list) or len(ract) != A.dim:
            raise WorkspaceError(f"field 'right_action' must hold {A.dim} matrices",
                                 f"{path}.right_action")
        right = [_matrix(m, dim, dim, f"{path}.right_action[{a}]")
                 for a, m in enumerate(ract)]
    return AModule(A, dim, action, right, name=name)


def _parse_connection(name: str, obj: Any, ws: Workspace, path: str) -> ConnectionEntry:
    _require_keys(obj, {"dlie", "module", "rho"}, set(), path)
    spec = obj["dlie"]
    if not isinstance(spec, str):
        raise WorkspaceError("field 'dlie' must be a spec string", f"{path}.dlie")
    T = ws.build_dlie(spec, f"{path}.dlie")
    mname = obj["module"]
    if mname not in ws.modules:
        raise WorkspaceError(f"undefined module {mname!r}", f"{path}.module")
    E = ws.modules[mname]
    if E.algebra is not T.algebra:
        raise WorkspaceError(
            f"module {mname!r} and D-Lie algebra {spec!r} live over"
            " different algebras", f"{path}.module")
    rr = obj["rho"]
    if not isinstance(rr, list) or len(rr) != T.dim:
        raise WorkspaceError(f"field 'rho' must hold {T.dim} matrices", f"{path}.rho")
    rho = [_matrix(m, E.dim, E.dim, f"{path}.rho[{j}]") for j, m in enumerate(rr)]
    conn = Connection(T, ws.diff1_of(mname), rho)
    return ConnectionEntry(name, T, E, conn)


_SECTIONS = ("algebras", "lie_rinehart", "cocycles", "modules", "connections")


def parse_workspace(text: str) -> Workspace:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise WorkspaceError(f"invalid JSON at line {e.lineno}, column {e.colno}:"
                             f" {e.msg}")
    if not isinstance(doc, dict):
        raise WorkspaceError("workspace must be a JSON object")
    for key in doc:
        if key not in _SECTIONS:
            raise WorkspaceError(f"unknown section {key!r}", key)
        if not isinstance(doc[key], dict):
            raise WorkspaceError("section must be an object of named entries",
                                 key)
    ws = Workspace()
    for name in sorted(doc.get("algebras", {})):
        ws.algebras[name] = _parse_algebra(name, doc["algebras"][name],
                                           f"algebras.{name}")
    for name in sorted(doc.get("lie_rinehart", {})):
        ws.lie_rinehart[name] = _parse_lr(name, doc["lie_rinehart"][name], ws,
                                          f"lie_rinehart.{name}")
    for name in sorted(doc.get("cocycles", {})):
        c, host = _parse_cocycle(name, doc["cocycles"][name], ws,
                                 f"cocycles.{name}")
        ws.cocycles[name] = c
        ws.cocycle_hosts[name] = host
    for name in sorted(doc.get("modules", {})):
        ws.modules[name] = _parse_module(name, doc["modules"][name], ws,
                                         f"modules.{name}")
    for name in sorted(doc.get("connections", {})):
        ws.connections[name] = _parse_connection(name, doc["connections"][name],
                                                 ws, f"connections.{name}")
    return ws


def load_workspace(filename: str) -> Workspace:
    try:
        with open(filename, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise WorkspaceError(f"cannot read workspace file: {e}")
    return parse_workspace(text)


def _json_vec(v: Vec) -> list[str]:
    return [str(x) for x in v]


def _json_mat(m: Mat) -> list[list[str]]:
    return [_json_vec(row) for row in m.data]


def algebra_json(A: FiniteAlgebra) -> dict:
    return {"dim": A.dim,
            "basis": list(A.labels),
            "unit": _json_vec(A.unit),
            "mul": [[_json_vec(A.mul[i][j]) for j in range(A.dim)]
                    for i in range(A.dim)]}


def lr_json(L: LieRinehartAlgebra, algebra_name: str) -> dict:
    return {"algebra": algebra_name,
            "dim": L.dim,
            "bracket": [[_json_vec(L.bracket[i][j]) for j in range(L.dim)]
                        for i in range(L.dim)],
            "anchor": [_json_mat(m) for m in L.anchor],
            "a_action": [_json_mat(m) for m in L.carrier.action]}


def cocycle_json(c: Cochain, host: str) -> dict:
    values = {f"{i},{j}": _json_vec(v) for (i, j), v in sorted(c.values.items())
              if any(x != 0 for x in v)}
    return {"on": host, "values": values}


def module_json(M: AModule, algebra_name: str) -> dict:
    out = {"algebra": algebra_name,
           "dim": M.dim,
           "action": [_json_mat(m) for m in M.action]}
    if M.right_action is not None:
        out["right_action"] = [_json_mat(m) for m in M.right_action]
    return out


def connection_json(dlie_spec: str, module_name: str, rho: list[Mat]) -> dict:
    return {"dlie": dlie_spec, "module": module_name,
            "rho": [_json_mat(m) for m in rho]}


def format_rational(x: Fraction) -> str:
    return str(x)


def format_vec(v: Vec) -> str:
    return "[" + ", ".join(format_rational(x) for x in v) + "]"


def format_mat(m: Mat) -> str:
    return "[" + "; ".join(" ".join(format_rational(x) for x in row)
                           for row in m.data) + "]"
