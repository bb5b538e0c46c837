"""Command-line entry point.

Operations, relations and clones are given either as JSON (inline or as
@path) or in a compact form:

  operation   k:arity:table        e.g. 3:2:012120201 (values in index order)
  relation    k:arity:t1,t2,...    e.g. 3:2:00,11,22,01,10
  chain       k:levels             levels separated by '/', blocks by ';',
                                   elements by ',', e.g. 3:0,1;2 ; 2: is empty
  clone       full:k  proj:k  disc:k  taminus:k  slupecki:k:i  slupecki-taminus:k:i
              chain:<chain>  sigma:k:c (Pol sigma_c)  sigma-c:k:c (Pol(sigma_c, {c}))
              iota:k (Pol iota_k), or a JSON clone description

Experiment commands exit with 0 when every check passes, 2 when some check
fails, and 3 when checks were skipped for budget or scope but none failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from .core import OpTable, all_operations
from .errors import BudgetExceeded, CloneMinorsError, UndecidedError
from .experiments import ExperimentReport, cmd_crosscheck, cmd_intersections, cmd_table1
from .relations import (
    ChainE, CloneSpec, Relation, Relational, chain_clone, clone_membership, discriminator_clone,
    full_clone, make_central_sigma, make_iota, preserves, projection_clone, slupecki_chain,
    slupecki_chain_m, spec_from_json, ta_minus, ta_minus_monoid,
)
from .search import (
    Session, growth_report, is_minor, partition_classes, restrict_clone,
)
from .trees import build_tree, core_with_trace, minor_via_trees, trees_isomorphic
from .witnesses import FAMILY_TAGS, FamilySpec, family_sanity, relabel, witness_family


class InputError(CloneMinorsError, ValueError):
    """A command-line argument could not be parsed."""


def _load(text: str) -> Any | None:
    """JSON from an inline string or @path; None if the text is in compact form."""
    if text.startswith("@"):
        return json.loads(Path(text[1:]).read_text())
    if text.lstrip().startswith(("{", "[")):
        return json.loads(text)
    return None


def _ints(text: str, sep: str = ",") -> list[int]:
    return [int(x) for x in text.split(sep) if x.strip()]


def parse_op(text: str) -> OpTable:
    data = _load(text)
    if data is not None:
        return OpTable.from_json(data)
    try:
        k, arity, table = text.split(":")
        values = _ints(table) if "," in table else [int(c) for c in table]
        return OpTable(int(k), int(arity), tuple(values))
    except ValueError as exc:
        raise InputError(f"cannot read operation {text!r}: {exc}") from None


def parse_relation(text: str) -> Relation:
    data = _load(text)
    if data is not None:
        return Relation.from_json(data)
    try:
        k, arity, body = text.split(":")
        tuples = [tuple(int(c) for c in t.strip()) for t in body.split(",") if t.strip()]
        return Relation.from_tuples(int(k), int(arity), tuples)
    except ValueError as exc:
        raise InputError(f"cannot read relation {text!r}: {exc}") from None


def parse_chain(text: str) -> ChainE:
    data = _load(text)
    if data is not None:
        return ChainE.from_json(data)
    try:
        k, body = text.split(":", 1)
        levels = [[_ints(b) for b in level.split(";")] for level in body.split("/") if level]
        return ChainE.from_partitions(int(k), levels)
    except ValueError as exc:
        raise InputError(f"cannot read chain {text!r}: {exc}") from None


def parse_clone(text: str) -> CloneSpec:
    data = _load(text)
    if data is not None:
        return spec_from_json(data)
    name, _, rest = text.partition(":")
    try:
        if name == "chain":
            return chain_clone(parse_chain(rest))
        args = _ints(rest, ":")
        k = args[0]
        simple = {"full": full_clone, "proj": projection_clone, "disc": discriminator_clone,
                  "taminus": ta_minus}
        if name in simple:
            return simple[name](k)
        if name == "slupecki":
            return slupecki_chain(k, args[1])
        if name == "slupecki-taminus":
            return slupecki_chain_m(k, args[1], ta_minus_monoid(k))
        if name == "sigma":
            return Relational(k, (make_central_sigma(k, args[1]),))
        if name == "sigma-c":
            return Relational(k, (make_central_sigma(k, args[1]),), subsets=(frozenset({args[1]}),))
        if name == "iota":
            return Relational(k, (make_iota(k),))
    except (ValueError, IndexError) as exc:
        raise InputError(f"cannot read clone {text!r}: {exc}") from None
    raise InputError(f"unknown clone form {text!r}")


def _blocks(text: str | None):
    return None if text is None else tuple(tuple(_ints(b)) for b in text.split(";"))


def _tuple(text: str | None):
    return None if text is None else tuple(_ints(text))


def _session(args) -> Session:
    session = Session()
    if args.budget_tables is not None:
        session.budget_tables = args.budget_tables
    if args.budget_assignments is not None:
        session.budget_assignments = args.budget_assignments
    return session


def _emit(args, data: Any, text: str) -> None:
    if args.format == "json":
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


# Subcommands.  Each returns an exit code.

def _cmd_preserves(args) -> int:
    f, rel = parse_op(args.op), parse_relation(args.relation)
    result = preserves(f, rel)
    _emit(args, {"preserves": result}, "yes" if result else "no")
    return 0


def _cmd_member(args) -> int:
    f, spec = parse_op(args.op), parse_clone(args.clone)
    result = clone_membership(f, spec, _session(args))
    _emit(args, {"member": result}, "yes" if result else "no")
    return 0


def _cmd_minor(args) -> int:
    f, g, spec = parse_op(args.f), parse_op(args.g), parse_clone(args.clone)
    w = is_minor(f, g, spec, _session(args))
    data = {"minor": w is not None, "witness": None if w is None else w.to_json()}
    text = "no" if w is None else "yes: h = " + json.dumps(w.to_json())
    _emit(args, data, text)
    return 0


def _cmd_equiv(args) -> int:
    f, g, spec = parse_op(args.f), parse_op(args.g), parse_clone(args.clone)
    session = _session(args)
    fg, gf = is_minor(f, g, spec, session), is_minor(g, f, spec, session)
    data = {"equivalent": fg is not None and gf is not None,
            "f_below_g": fg is not None, "g_below_f": gf is not None}
    _emit(args, data, "yes" if data["equivalent"] else
          f"no (f below g: {data['f_below_g']}, g below f: {data['g_below_f']})")
    return 0


def _cmd_classes(args) -> int:
    spec = parse_clone(args.clone)
    ops = [f for n in _ints(args.arities) for f in all_operations(spec.k, n)]
    part = partition_classes(ops, spec, _session(args), method=args.method)
    classes = part.classes()
    data = {"count": part.count, "ops": len(ops),
            "classes": [[f.to_json() for f in cls] for cls in classes]}
    lines = [f"{part.count} classes among {len(ops)} operations"]
    for i, cls in enumerate(classes):
        lines.append(f"  class {i}: {len(cls)} ops, e.g. {cls[0]!r}")
    _emit(args, data, "\n".join(lines))
    return 0


def _cmd_tree(args) -> int:
    tree = build_tree(parse_op(args.op), parse_chain(args.chain))
    _emit(args, tree.to_json(), tree.render() + f"\nlevel sizes {tree.level_sizes()}")
    return 0


def _cmd_core(args) -> int:
    tree = build_tree(parse_op(args.op), parse_chain(args.chain))
    result = core_with_trace(tree, seed=args.seed)
    data = {"core": result.tree.to_json(), "trace": result.trace}
    _emit(args, data, result.tree.render() + f"\nlevel sizes {result.tree.level_sizes()}")
    return 0


def _cmd_iso(args) -> int:
    chain = parse_chain(args.chain)
    f, g = parse_op(args.f), parse_op(args.g)
    P = core_with_trace(build_tree(f, chain), seed=args.seed).tree
    Q = core_with_trace(build_tree(g, chain), seed=args.seed).tree
    iso = trees_isomorphic(P, Q)
    data = {"cores_isomorphic": iso, "f_below_g": minor_via_trees(f, g, chain),
            "g_below_f": minor_via_trees(g, f, chain)}
    _emit(args, data, "cores isomorphic" if iso else "cores not isomorphic")
    return 0


def _cmd_witness(args) -> int:
    spec = FamilySpec(args.family, args.k, args.n, r=args.r, h=args.h,
                      blocks=_blocks(args.blocks), subset=_tuple(args.subset),
                      perm=_tuple(args.perm))
    if args.sanity:
        report = family_sanity(spec)
        lines = [f"{c.name}: {'ok' if c.passed else 'FAILED'}" + (f" ({c.detail})" if c.detail else "")
                 for c in report.claims] + [f"note: {n}" for n in report.notes]
        _emit(args, report.to_json(), "\n".join(lines))
        return 0 if report.ok else 2
    f = witness_family(spec)
    if args.relabel is not None:
        f = relabel(f, _tuple(args.relabel))
    _emit(args, f.to_json(), f.dumps())
    return 0


def _cmd_growth(args) -> int:
    rows = growth_report(parse_clone(args.clone), args.n_max, _session(args))
    lines = ["n  |C^(n)|"] + [f"{r.n}  {r.count}" for r in rows]
    _emit(args, [r.to_json() for r in rows], "\n".join(lines))
    return 0


def _cmd_restrict(args) -> int:
    rc = restrict_clone(parse_clone(args.clone), _ints(args.subset), _session(args))
    members = rc.members(args.arity)
    data = {"subset": list(rc.subset), "arity": args.arity, "count": len(members),
            "members": [f.to_json() for f in members]}
    _emit(args, data, f"{len(members)} members of arity {args.arity} on B = {list(rc.subset)}")
    return 0


def _report(args, report: ExperimentReport) -> int:
    _emit(args, report.to_json(), report.render_text())
    return report.exit_code


def _cmd_crosscheck(args) -> int:
    return _report(args, cmd_crosscheck(parse_chain(args.chain), args.max_arity, seed=args.seed,
                                        session=_session(args), max_pairs=args.max_pairs,
                                        oracle=args.oracle, timed=args.timings))


def _cmd_table1(args) -> int:
    return _report(args, cmd_table1(args.k, seed=args.seed, session=_session(args),
                                    sample=args.sample, timed=args.timings))


def _cmd_intersections(args) -> int:
    return _report(args, cmd_intersections(args.k, seed=args.seed, session=_session(args),
                                           timed=args.timings))


def _add_globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(0), help="seed for all sampling (default 0)")
    parser.add_argument("--budget-tables", type=int, default=d(None),
                        help="cap on candidate tables per enumeration")
    parser.add_argument("--budget-assignments", type=int, default=d(None),
                        help="cap on search steps per minor search")
    parser.add_argument("--format", choices=("json", "text"), default=d("text"))
    parser.add_argument("--timings", action="store_true", default=d(False),
                        help="add wall-clock timings to experiment reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cloneminors", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _add_globals(p, suppress=True)
        p.set_defaults(func=func)
        return p

    p = add("preserves", _cmd_preserves, "does an operation preserve a relation")
    p.add_argument("--op", required=True)
    p.add_argument("--relation", required=True)

    p = add("member", _cmd_member, "is an operation in a clone")
    p.add_argument("--op", required=True)
    p.add_argument("--clone", required=True)

    for name, func, text in (("minor", _cmd_minor, "is f a C-minor of g, with a witness"),
                             ("equiv", _cmd_equiv, "are f and g C-equivalent")):
        p = add(name, func, text)
        p.add_argument("--f", required=True)
        p.add_argument("--g", required=True)
        p.add_argument("--clone", required=True)

    p = add("classes", _cmd_classes, "partition all operations of given arities into C-classes")
    p.add_argument("--clone", required=True)
    p.add_argument("--arities", default="1", help="comma-separated arities (default 1)")
    p.add_argument("--method", choices=("representatives", "digraph"), default="representatives")

    for name, func, text in (("tree", _cmd_tree, "the labeled tree of an operation"),
                             ("core", _cmd_core, "the core of that tree")):
        p = add(name, func, text)
        p.add_argument("--op", required=True)
        p.add_argument("--chain", required=True)

    p = add("iso", _cmd_iso, "compare the cores of two operations")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--chain", required=True)

    p = add("witness", _cmd_witness, "tabulate or sanity-check a witness family member")
    p.add_argument("--family", required=True, choices=FAMILY_TAGS)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--blocks", help="equivalence blocks, e.g. 0,1;2")
    p.add_argument("--subset", help="subset B, e.g. 0,1")
    p.add_argument("--perm", help="permutation as its value list, e.g. 0,2,1")
    p.add_argument("--sanity", action="store_true", help="run the tuple-level checks instead")
    p.add_argument("--relabel", help="transport the table along a permutation of the domain")

    p = add("growth", _cmd_growth, "exact sizes of the n-ary parts against growth bounds")
    p.add_argument("--clone", required=True)
    p.add_argument("--n-max", type=int, default=3)

    p = add("restrict", _cmd_restrict, "members of the restriction clone C_B")
    p.add_argument("--clone", required=True)
    p.add_argument("--subset", required=True)
    p.add_argument("--arity", type=int, default=1)

    p = add("crosscheck", _cmd_crosscheck, "tree criterion against the brute-force oracle")
    p.add_argument("--chain", required=True)
    p.add_argument("--max-arity", type=int, default=1)
    p.add_argument("--max-pairs", type=int, default=2000)
    p.add_argument("--oracle", choices=("chain", "discriminator"), default="chain")

    p = add("table1", _cmd_table1, "evidence for every row of the maximal-clone table")
    p.add_argument("--k", type=int, choices=(3, 4), default=3)
    p.add_argument("--sample", type=int, default=40, help="binary operations sampled per row")

    p = add("intersections", _cmd_intersections, "evidence for intersections of maximal clones")
    p.add_argument("--k", type=int, choices=(3,), default=3)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except UndecidedError as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return 3
    except (CloneMinorsError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
