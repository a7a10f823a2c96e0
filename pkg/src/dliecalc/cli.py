"""Command line driver.

Every subcommand loads a workspace file, runs one exact computation or
check, and prints a flat list of facts (``key = value`` lines, or the same
facts as a JSON object with --json).  Exit codes: 0 when every check
passed, 1 when a mathematical check failed (a witness is printed), 2 on
malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import combinations
from typing import Any, Optional

from .conncat import (annihilator_ideal, build_end_extension, c_functor,
                      curvature, curvature_identity_check, is_flat, r_functor,
                      split_extension, validate_connection, validate_diff1,
                      validate_lpsi)
from .dliealg import (canonical_quotient, class_equal, classify_maps_d1,
                      reconstruct, validate_dlie)
from .finalg import (Report, build_principal_parts, check_amodule,
                     check_pmodule, check_principal_parts,
                     kahler_differentials_dim, validate_algebra)
from .lierinehart import check_amultilinear, is_cocycle, lr_differential, \
    validate_lr
from .ratlin import unit_vec
from .workspace import Workspace, WorkspaceError, format_mat, format_vec, \
    load_workspace

Facts = dict[str, Any]

_COMMANDS = {}


def _command(name):
    def register(fn):
        _COMMANDS[name] = fn
        return fn
    return register


class MathFailure(Exception):
    """A check failed; carries the facts gathered so far."""

    def __init__(self, facts: Facts):
        self.facts = facts
        super().__init__(facts.get("status", "fail"))


def _fail(facts: Facts, report: Report, prefix: str) -> None:
    facts["status"] = "fail"
    for i, v in enumerate(report[:10]):
        facts[f"{prefix}.witness[{i}]"] = v.describe()
    raise MathFailure(facts)


def _named(args, facts: Facts, count: int = 1) -> list[str]:
    if args.name is None:
        raise WorkspaceError("this subcommand needs --name")
    parts = args.name.split(",")
    if len(parts) != count:
        raise WorkspaceError(f"--name must list {count} object(s), "
                             f"got {args.name!r}")
    facts["name"] = args.name
    return parts


def _lookup(ws: Workspace, section: str, name: str):
    table = getattr(ws, section)
    if name not in table:
        raise WorkspaceError(f"undefined {section.rstrip('s')} {name!r}")
    return table[name]


@_command("validate")
def _cmd_validate(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    bad = 0

    def record(kind: str, name: str, report: Report) -> None:
        nonlocal bad
        facts[f"{kind}.{name}"] = "ok" if not report else report[0].describe()
        bad += bool(report)

    for name in sorted(ws.algebras):
        record("algebra", name, validate_algebra(ws.algebras[name]))
    for name in sorted(ws.lie_rinehart):
        record("lie_rinehart", name, validate_lr(ws.lie_rinehart[name]))
    for name in sorted(ws.cocycles):
        record("cocycle", name, check_amultilinear(ws.cocycles[name]))
    for name in sorted(ws.modules):
        M = ws.modules[name]
        rep = check_amodule(M)
        if not rep and M.right_action is not None:
            rep = check_pmodule(M)
        record("module", name, rep)
    for name in sorted(ws.connections):
        record("connection", name,
               validate_connection(ws.connections[name].connection))
    facts["checked"] = (len(ws.algebras) + len(ws.lie_rinehart)
                        + len(ws.cocycles) + len(ws.modules)
                        + len(ws.connections))
    if bad:
        facts["status"] = "fail"
        raise MathFailure(facts)
    facts["status"] = "ok"
    return facts


@_command("derivations")
def _cmd_derivations(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    (name,) = _named(args, facts)
    _lookup(ws, "algebras", name)
    der = ws.derivations_of(name)
    facts["dim"] = der.dim
    for i in range(der.dim):
        facts[f"derivation[{i}]"] = format_mat(der.anchor[i])
    facts["status"] = "ok"
    return facts


@_command("principal-parts")
def _cmd_principal_parts(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    (name,) = _named(args, facts)
    A = _lookup(ws, "algebras", name)
    pp = build_principal_parts(A)
    facts["dim"] = pp.dim
    facts["algebra_dim"] = A.dim
    facts["kahler_dim"] = kahler_differentials_dim(A)
    rep = check_principal_parts(pp)
    if rep:
        _fail(facts, rep, "principal-parts")
    facts["status"] = "ok"
    return facts


@_command("cocycle-check")
def _cmd_cocycle_check(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    (name,) = _named(args, facts)
    c = _lookup(ws, "cocycles", name)
    facts["host"] = ws.cocycle_hosts[name]
    rep = check_amultilinear(c)
    if rep:
        _fail(facts, rep, "multilinearity")
    ok, witness = is_cocycle(c)
    if not ok:
        facts["status"] = "fail"
        facts["witness.indices"] = str(witness)
        facts["witness.lhs"] = format_vec(lr_differential(c).values[witness])
        facts["witness.rhs"] = format_vec(
            tuple([0] * c.coeffs.carrier.dim))
        raise MathFailure(facts)
    facts["status"] = "ok"
    return facts


@_command("class-equal")
def _cmd_class_equal(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    n1, n2 = _named(args, facts, 2)
    f = _lookup(ws, "cocycles", n1)
    g = _lookup(ws, "cocycles", n2)
    if ws.cocycle_hosts[n1] != ws.cocycle_hosts[n2]:
        raise WorkspaceError("cocycles live on different hosts:"
                             f" {ws.cocycle_hosts[n1]} vs {ws.cocycle_hosts[n2]}")
    facts["mode"] = "wide" if args.widen_class_test else "restricted"
    equal, alpha = class_equal(f, g, widen=args.widen_class_test)
    facts["equal"] = equal
    if alpha is not None:
        facts["primitive"] = format_vec(alpha.flatten())
    if not equal:
        facts["status"] = "fail"
        raise MathFailure(facts)
    facts["status"] = "ok"
    return facts


def _dlie_facts(T, facts: Facts) -> Facts:
    facts["dim"] = T.dim
    facts["algebra_dim"] = T.algebra.dim
    facts["central"] = format_vec(T.central_D)
    rep = validate_dlie(T)
    if rep:
        _fail(facts, rep, "dlie")
    facts["status"] = "ok"
    return facts


def _spec_name(args, facts: Facts) -> str:
    if args.name is None:
        raise WorkspaceError("this subcommand needs --name")
    facts["name"] = args.name
    return args.name


@_command("build-d1")
def _cmd_build_d1(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    return _dlie_facts(ws.build_dlie(f"d1:{_spec_name(args, facts)}",
                                     "--name"), facts)


@_command("build-dlie")
def _cmd_build_dlie(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    return _dlie_facts(ws.build_dlie(f"F:{_spec_name(args, facts)}",
                                     "--name"), facts)


@_command("quotient")
def _cmd_quotient(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    spec = _spec_name(args, facts)
    T = ws.build_dlie(spec, "--name")
    q = canonical_quotient(T)
    facts["dim"] = q.lr.dim
    facts["ideal_dim"] = T.dim - q.lr.dim
    for i, v in enumerate(q.j_basis):
        facts[f"ideal_basis[{i}]"] = format_vec(v)
    if q.report:
        _fail(facts, q.report, "quotient")
    facts["status"] = "ok"
    return facts


@_command("reconstruct")
def _cmd_reconstruct(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    spec = _spec_name(args, facts)
    if args.section not in (None, "canonical"):
        raise WorkspaceError(f"unknown section {args.section!r};"
                             " only 'canonical' is available")
    T = ws.build_dlie(spec, "--name")
    r = reconstruct(T)
    facts["quotient_dim"] = r.quotient.lr.dim
    facts["model_dim"] = r.model.dim
    facts["iso"] = format_mat(r.iso.matrix)
    for key in sorted(r.g.values):
        facts[f"cocycle[{key[0]},{key[1]}]"] = format_vec(r.g.values[key])
    facts["status"] = "ok"
    return facts


@_command("classify-map")
def _cmd_classify_map(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    n1, n2 = _named(args, facts, 2)
    g = _lookup(ws, "cocycles", n1)
    f = _lookup(ws, "cocycles", n2)
    for nm in (n1, n2):
        if not ws.cocycle_hosts[nm].startswith("derivations"):
            raise WorkspaceError(f"cocycle {nm!r} must live on derivations")
    cls = classify_maps_d1(g, f)
    facts["exists"] = cls.exists
    if cls.exists:
        facts["forward"] = format_mat(cls.forward.matrix)
        facts["inverse"] = format_mat(cls.inverse.matrix)
        facts["z1_dim"] = len(cls.z1_basis)
    if not cls.exists:
        facts["status"] = "fail"
        raise MathFailure(facts)
    facts["status"] = "ok"
    return facts


@_command("diff1")
def _cmd_diff1(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    (name,) = _named(args, facts)
    _lookup(ws, "modules", name)
    d1s = ws.diff1_of(name)
    facts["dim"] = d1s.dim
    for i, op in enumerate(d1s.basis):
        facts[f"operator[{i}]"] = format_mat(op)
    rep = validate_diff1(d1s)
    if rep:
        _fail(facts, rep, "diff1")
    facts["status"] = "ok"
    return facts


def _connection(ws: Workspace, args, facts: Facts):
    (name,) = _named(args, facts)
    return _lookup(ws, "connections", name)


@_command("check-connection")
def _cmd_check_connection(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    entry = _connection(ws, args, facts)
    facts["dlie_dim"] = entry.dlie.dim
    facts["module_dim"] = entry.module.dim
    facts["rho_d_is_identity"] = entry.connection.is_conn_id()
    rep = validate_connection(entry.connection)
    if rep:
        _fail(facts, rep, "connection")
    facts["status"] = "ok"
    return facts


@_command("curvature")
def _cmd_curvature(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    entry = _connection(ws, args, facts)
    c = entry.connection
    N = entry.dlie.dim
    for i, j in combinations(range(N), 2):
        R = curvature(c, unit_vec(N, i), unit_vec(N, j))
        if not R.is_zero():
            facts[f"curvature[{i},{j}]"] = format_mat(R)
    facts["flat"] = is_flat(c)
    facts["status"] = "ok"
    return facts


@_command("r-functor")
def _cmd_r_functor(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    entry = _connection(ws, args, facts)
    if entry.dlie.kind != "functor_F":
        raise WorkspaceError("r-functor needs a connection over an"
                             " 'F:' D-Lie spec")
    pair = r_functor(entry.connection)
    facts["psi"] = format_mat(pair.psi)
    for i, nb in enumerate(pair.nabla):
        facts[f"nabla[{i}]"] = format_mat(nb)
    rep = validate_lpsi(pair)
    if rep:
        _fail(facts, rep, "pair")
    facts["status"] = "ok"
    return facts


@_command("c-functor")
def _cmd_c_functor(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    entry = _connection(ws, args, facts)
    if entry.dlie.kind != "functor_F":
        raise WorkspaceError("c-functor needs a connection over an"
                             " 'F:' D-Lie spec")
    T = entry.dlie
    pair = r_functor(entry.connection)
    back = c_functor(pair, T=T, diff1=entry.connection.diff1)
    facts["round_trip"] = back.rho == entry.connection.rho
    rep = validate_connection(back)
    if rep:
        _fail(facts, rep, "connection")
    if not facts["round_trip"]:
        facts["status"] = "fail"
        raise MathFailure(facts)
    facts["status"] = "ok"
    return facts


@_command("curvature-identity")
def _cmd_curvature_identity(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    entry = _connection(ws, args, facts)
    if entry.dlie.kind != "functor_F":
        raise WorkspaceError("curvature-identity needs a connection over an"
                             " 'F:' D-Lie spec")
    pair = r_functor(entry.connection)
    rep = curvature_identity_check(pair, T=entry.dlie,
                                   diff1=entry.connection.diff1)
    if rep:
        _fail(facts, rep, "identity")
    facts["status"] = "ok"
    return facts


@_command("end-extension")
def _cmd_end_extension(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    entry = _connection(ws, args, facts)
    X = build_end_extension(entry.dlie, entry.connection)
    facts["dim"] = X.dlie.dim
    facts["end_dim"] = len(X.end_basis)
    facts["canonical_connection_flat"] = is_flat(X.rho_bang)
    facts["status"] = "ok"
    return facts


@_command("split")
def _cmd_split(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    entry = _connection(ws, args, facts)
    X = build_end_extension(entry.dlie, entry.connection)
    res = split_extension(X)
    facts["split"] = res.status
    if res.correction is not None:
        for j, P in enumerate(res.correction):
            if not P.is_zero():
                facts[f"correction[{j}]"] = format_mat(P)
    if res.status != "split":
        facts["status"] = "fail"
        raise MathFailure(facts)
    facts["status"] = "ok"
    return facts


@_command("annihilator")
def _cmd_annihilator(ws: Workspace, args) -> Facts:
    facts: Facts = {}
    entry = _connection(ws, args, facts)
    res = annihilator_ideal(entry.connection)
    facts["principal_parts_dim"] = res.pp.dim
    facts["dim"] = res.dim
    facts["action_rank"] = res.action_rank
    for i, v in enumerate(res.basis):
        facts[f"basis[{i}]"] = format_vec(v)
    facts["status"] = "ok"
    return facts


def _emit(facts: Facts, as_json: bool) -> None:
    if as_json:
        print(json.dumps(facts, indent=2, sort_keys=True))
    else:
        for key, value in facts.items():
            if isinstance(value, bool):
                value = "true" if value else "false"
            print(f"{key} = {value}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlie",
        description="Exact checks on D-Lie algebras and connections.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in sorted(_COMMANDS):
        p = sub.add_parser(name)
        p.add_argument("--workspace", required=True,
                       help="path to a workspace JSON file")
        p.add_argument("--name", default=None,
                       help="object name(s); binary subcommands take"
                            " a comma-separated pair")
        p.add_argument("--json", action="store_true",
                       help="emit the facts as a JSON object")
        p.add_argument("--section", default=None,
                       help="section policy for reconstruct (only"
                            " 'canonical')")
        p.add_argument("--widen-class-test", action="store_true",
                       help="allow arbitrary A-linear 1-cochain corrections"
                            " in class-equal")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ws = load_workspace(args.workspace)
        facts = _COMMANDS[args.command](ws, args)
    except WorkspaceError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except MathFailure as e:
        _emit(e.facts, args.json)
        return 1
    except ValueError as e:
        _emit({"status": "fail", "reason": str(e)}, args.json)
        return 1
    _emit(facts, args.json)
    return 0


if __name__ == "__main__":
    sys.exit(main())
