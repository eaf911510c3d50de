"""Command-line entry point: ``weylnichols <command> --group X [options]``.

Outputs are sorted JSON (or CSV with a metadata comment line) that embed the
tool version, seed, budgets and Dixon primes, and carry no timestamps, so
identical invocations produce identical bytes.  Exit codes: 0 success,
1 verification mismatch, 2 budget or scope failure (reason as JSON on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .braided import (
    QLSEntry, ScopeError, SymmetrizerBudgetExceeded, braiding_matrix, build_yd_module, central_qls_dimension,
    nichols_graded_dims, pbw_dimension, pbw_graded_dims, quantum_symmetry_predicates,
)
from .cache import CacheError, read_rows, rows_cache_path, write_rows
from .chartab import character_table
from .classes import ENUMERATION_LIMIT, ClassBudgetExceeded, is_real_class, storable
from .criteria import (
    TableRow, assign_theorem3, central_qls_classification, minus_one_table, pair_commutativity,
    square_commutativity, table_row,
)
from .exact import INFINITE_ORDER
from .expected import load_expected
from .pipeline import WeylContext, get_context, get_group_order
from .verify import FAIL, SUITES, SKIPPED, Verifier


class Failure(Exception):
    """A budget or scope failure: exit code 2."""

    def __init__(self, kind: str, reason: str):
        super().__init__(reason)
        self.kind = kind
        self.reason = reason


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", required=True, type=str.upper, choices=["G2", "F4", "E6", "E7", "E8"])
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--output", type=Path, help="write here instead of stdout")
    common.add_argument("--cache", type=Path, help="directory for class data and finished table rows")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--extended", action="store_true",
                        help="allow the long computations on the non-enumerated group")
    common.add_argument("--limit", type=_positive, default=ENUMERATION_LIMIT,
                        help="largest centralizer that gets a character table")
    common.add_argument("--mode", choices=["auto", "exhaustive", "reduced", "witness"], default="auto")
    common.add_argument("--witness-budget", type=_positive, default=100_000)
    common.add_argument("--max-degree", type=_positive, default=6)
    common.add_argument("--symmetrizer-budget", type=_positive, default=2_000_000)
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--verbose", action="store_true", help="progress messages on stderr")

    parser = argparse.ArgumentParser(prog="weylnichols", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"weylnichols {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("group-info", parents=[common], help="order, roots and class count")
    sub.add_parser("classes", parents=[common], help="conjugacy classes with power maps")
    p = sub.add_parser("chartab", parents=[common], help="character table of a class centralizer")
    p.add_argument("--class", dest="cls", default="identity", help="class id, ordN, central or identity")
    p = sub.add_parser("minus-one", parents=[common], help="nu statistics and -1-type characters per class")
    p.add_argument("--route", choices=["table", "cycles", "table-only"], default="table")
    sub.add_parser("center", parents=[common], help="singleton classes")
    sub.add_parser("qls", parents=[common], help="-1-type characters at central classes")
    for name, text in (("square-comm", "commutativity and square-commutativity per class pair"),
                       ("theorem3", "infinite-dimensionality deductions per class pair")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--pair", nargs=2, type=int, action="append", metavar=("I", "J"),
                       help="restrict to these class ids (repeatable)")
    p = sub.add_parser("nichols-dim", parents=[common], help="graded Nichols algebra dimensions")
    p.add_argument("--class", dest="cls", required=True, help="class id, ordN, central or identity")
    p.add_argument("--char", default="minus-one", help="character index, or minus-one for all -1-type ones")
    p.add_argument("--combine", action="store_true", help="one braided space from all selected modules")
    p = sub.add_parser("verify", parents=[common], help="compare with the bundled reference data")
    p.add_argument("--suite", action="append", choices=("all",) + SUITES,
                   help="suite to run (repeatable; default all)")
    p.add_argument("--expected", type=Path, help="directory holding replacement reference CSVs")
    return parser


# ------------------------------------------------------------------ helpers

def _config(args) -> dict:
    cfg = {"seed": args.seed, "extended": args.extended, "limit": args.limit, "mode": args.mode,
           "witness_budget": args.witness_budget, "max_degree": args.max_degree,
           "symmetrizer_budget": args.symmetrizer_budget, "workers": args.workers}
    for extra in ("route", "cls", "char", "combine", "pair", "suite"):
        if hasattr(args, extra):
            value = getattr(args, extra)
            cfg["class" if extra == "cls" else extra] = value
    if getattr(args, "expected", None) is not None:
        cfg["expected"] = str(args.expected)
    return cfg


def _envelope(args, ctx: Optional[WeylContext], result) -> dict:
    return {
        "tool": "weylnichols",
        "version": __version__,
        "command": args.command,
        "group": args.group,
        "config": _config(args),
        "primes": {} if ctx is None else {str(c): p for c, p in sorted(ctx.primes.items())},
        "result": result,
    }


def _csv_text(doc: dict, header: list[str], rows: list[list]) -> str:
    meta = {k: doc[k] for k in ("tool", "version", "command", "group", "config", "primes")}
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True, separators=(",", ":")) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if x is None else x for x in r])
    return buf.getvalue()


def _emit(args, doc: dict, header: list[str], rows: list[list]) -> None:
    if args.format == "csv":
        text = _csv_text(doc, header, rows)
    else:
        text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    if args.output:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_text(text)
    else:
        sys.stdout.write(text)


def _log(args):
    if not args.verbose:
        return None
    return lambda msg: print(msg, file=sys.stderr, flush=True)


def _context(args) -> WeylContext:
    if args.cache is not None:
        try:
            args.cache.mkdir(parents=True, exist_ok=True)
            probe = args.cache / ".write-test"
            probe.write_text("")
            probe.unlink()
        except OSError as exc:
            raise Failure("cache", f"cache directory {args.cache} is not writable: {exc}") from None
    try:
        return get_context(args.group, seed=args.seed, log=_log(args), cache_dir=args.cache)
    except ClassBudgetExceeded as exc:
        raise Failure("budget", str(exc)) from None
    except CacheError as exc:
        raise Failure("cache", str(exc)) from None


def _select_class(ctx: WeylContext, text: str) -> int:
    classes = ctx.cd.classes
    if text == "identity":
        return ctx.cd.identity_class
    if text == "central":
        found = ctx.central_classes()
    elif text.startswith("ord"):
        n = int(text[3:])
        found = [c.id for c in classes if c.order == n and c.size > 1]
        if not found:
            found = [c.id for c in classes if c.order == n]
    else:
        c = int(text)
        if not 0 <= c < len(classes):
            raise Failure("scope", f"no class {c}; ids run 0..{len(classes) - 1}")
        return c
    if len(found) != 1:
        raise Failure("scope", f"class selector {text!r} matches {len(found)} classes: {found}")
    return found[0]


def _row_store(args, ctx: WeylContext):
    """Known rows from the cache and a callback that persists new ones."""
    if args.cache is None:
        return {}, None
    path = rows_cache_path(args.cache, ctx.label, args.seed)
    try:
        raw = read_rows(path, ctx.label)
    except CacheError as exc:
        raise Failure("cache", str(exc)) from None
    known = {int(k): TableRow.from_json(v) for k, v in raw.items()}

    def save(row: TableRow) -> None:
        known[row.class_id] = row
        write_rows(path, ctx.label, {str(k): v.to_json() for k, v in sorted(known.items())})

    return known, save


def _pair_list(args, ctx: WeylContext):
    if not args.pair:
        return None
    n = len(ctx.cd)
    for i, j in args.pair:
        if not (0 <= i < n and 0 <= j < n):
            raise Failure("scope", f"pair ({i}, {j}) outside class ids 0..{n - 1}")
    return [tuple(p) for p in args.pair]


def _order_text(n) -> object:
    return "inf" if n == INFINITE_ORDER else n


# ----------------------------------------------------------------- commands

def cmd_group_info(args):
    ctx = _context(args)
    result = {"order": str(ctx.order), "rank": ctx.rs.rank, "roots": ctx.rs.nroots, "classes": len(ctx.cd),
              "exponent": ctx.cd.exponent, "center_size": sum(1 for c in ctx.cd.classes if c.size == 1),
              "enumerated": ctx.enumerated}
    header = list(result)
    return ctx, result, header, [[result[k] for k in header]], 0


def cmd_classes(args):
    ctx = _context(args)
    data = ctx.cd.to_json()
    for entry, cls in zip(data["classes"], ctx.cd.classes):
        entry["real"] = is_real_class(ctx.cd, cls.id)
        entry["representative"] = list(cls.representative.images[: ctx.rs.rank])
    header = ["id", "order", "size", "centralizer_order", "real", "fingerprint_hash", "power_map"]
    rows = [[e["id"], e["order"], e["size"], e["centralizer_order"], e["real"], e["fingerprint_hash"],
             " ".join(map(str, pm))] for e, pm in zip(data["classes"], data["power_maps"])]
    return ctx, data, header, rows, 0


def cmd_chartab(args):
    if args.cls in ("identity", "central"):
        order = get_group_order(args.group)
        if order > args.limit:
            raise Failure("scope", f"the whole group has order {order}, above the table limit {args.limit}")
    ctx = _context(args)
    c = _select_class(ctx, args.cls)
    cls = ctx.cd.classes[c]
    if not ctx.enumerated and not storable(cls.centralizer_order, ctx.rs.nroots, args.limit):
        raise Failure("scope", f"centralizer of class {c} has order {cls.centralizer_order}, too large to "
                               f"enumerate (limit {args.limit} elements)")
    if not ctx.enumerated and not args.extended:
        raise Failure("scope", "centralizer tables of the non-enumerated group need --extended")
    cz = ctx.centralizer(c, with_table=False, limit=args.limit, log=_log(args))
    ct = character_table(cz.cd)
    ctx.primes[c] = ct.prime
    data = {"class": c, "centralizer_order": str(cz.order), "s_class": cz.s_class, "table": ct.to_json()}
    header = ["character", "degree"] + [f"c{k}" for k in range(ct.nclasses)]
    rows = [[x, ct.degrees[x]] + [str(v) for v in ct.values[x]] for x in range(len(ct))]
    return ctx, data, header, rows, 0


def cmd_minus_one(args):
    ctx = _context(args)
    known, save = _row_store(args, ctx)
    rows = minus_one_table(ctx, extended=args.extended, limit=args.limit, route=args.route, log=_log(args),
                           known=known, on_row=save)
    data = {"rows": [r.to_json() for r in rows],
            "skipped": sum(1 for r in rows if r.status != "OK")}
    header = ["class", "order", "size", "centralizer_order", "nu1", "nu2", "minus_one_count", "status", "route",
              "reason"]
    table = [[r.class_id, r.order, r.size, r.centralizer_order, r.nu1, r.nu2, r.minus_one_count, r.status,
              r.route, r.reason] for r in rows]
    return ctx, data, header, table, 0


def cmd_center(args):
    ctx = _context(args)
    out = []
    for cls in ctx.cd.classes:
        if cls.size != 1:
            continue
        entry = {"class": cls.id, "order": cls.order, "nu1": None, "nu2": None, "status": "SKIPPED"}
        if ctx.enumerated or args.extended:
            row = table_row(ctx, cls.id, route="table" if ctx.enumerated else "cycles", log=_log(args))
            entry.update(nu1=row.nu1, nu2=row.nu2, status="OK")
        out.append(entry)
    header = ["class", "order", "nu1", "nu2", "status"]
    return ctx, {"center": out}, header, [[e[k] for k in header] for e in out], 0


def cmd_qls(args):
    ctx = _context(args)
    report = central_qls_classification(ctx, extended=args.extended, log=_log(args))
    data = {"central_classes": [r.to_json() for r in report]}
    header = ["class", "order", "count", "characters", "route", "status"]
    rows = [[r.class_id, r.order, r.count, "" if r.characters is None else " ".join(map(str, r.characters)),
             r.route, r.status] for r in report]
    return ctx, data, header, rows, 0


def _verdicts(args, ctx: WeylContext):
    pairs = _pair_list(args, ctx)
    mode = args.mode
    if not ctx.enumerated and mode in ("exhaustive", "reduced"):
        raise Failure("scope", f"{mode} mode needs an enumerated group; use witness")
    if not ctx.enumerated and mode == "auto":
        mode = "witness"
    if pairs is None:
        verdicts = square_commutativity(ctx, mode=mode, budget=args.witness_budget, seed=args.seed,
                                        workers=args.workers)
    else:
        verdicts = [pair_commutativity(ctx, i, j, mode=mode, budget=args.witness_budget, seed=args.seed)
                    for i, j in pairs]
    return [assign_theorem3(ctx, v) for v in verdicts]


def _verdict_output(ctx, verdicts, with_theorem3: bool):
    data = {"pairs": [v.to_json() for v in verdicts],
            "unknown": sum(1 for v in verdicts if v.square_commute is None)}
    header = ["i", "j", "commute", "square_commute", "proof", "draws"]
    if with_theorem3:
        header.append("theorem3")
    rows = []
    for v in verdicts:
        j = v.to_json()
        rows.append([j[k] for k in header])
    if not with_theorem3:
        for p in data["pairs"]:
            p.pop("theorem3")
    return data, header, rows


def cmd_square_comm(args):
    ctx = _context(args)
    data, header, rows = _verdict_output(ctx, _verdicts(args, ctx), False)
    return ctx, data, header, rows, 0


def cmd_theorem3(args):
    ctx = _context(args)
    verdicts = _verdicts(args, ctx)
    data, header, rows = _verdict_output(ctx, verdicts, True)
    data["undetermined"] = sorted([v.i, v.j] for v in verdicts if v.theorem3 and v.theorem3.value == "UNDETERMINED")
    return ctx, data, header, rows, 0


def cmd_nichols_dim(args):
    ctx = _context(args)
    if not ctx.enumerated and not args.extended:
        raise Failure("scope", "modules over the non-enumerated group need --extended")
    c = _select_class(ctx, args.cls)
    cls = ctx.cd.classes[c]
    row = table_row(ctx, c, limit=args.limit, log=_log(args))
    ct = ctx.centralizer(c).ct
    if args.char == "minus-one":
        chars = list(row.minus_one_characters)
        if not chars:
            raise Failure("scope", f"class {c} has no -1-type character")
    else:
        chars = [int(args.char)]
        if not 0 <= chars[0] < len(ct):
            raise Failure("scope", f"no character {chars[0]}; the centralizer has {len(ct)}")
    try:
        modules = [build_yd_module(ctx, c, x) for x in chars]
    except ScopeError as exc:
        raise Failure("scope", str(exc)) from None
    groups = [modules] if args.combine else [[m] for m in modules]
    results = []
    for mods in groups:
        space = braiding_matrix(mods)
        try:
            dims = nichols_graded_dims(space.braiding, max_degree=args.max_degree, budget=args.symmetrizer_budget)
        except SymmetrizerBudgetExceeded as exc:
            raise Failure("budget", str(exc)) from None
        sym = quantum_symmetry_predicates(mods)
        entry = {
            "class": c, "class_size": cls.size, "characters": [m.character for m in mods],
            "degrees": [m.degree for m in mods], "dim": space.dim,
            "braid_relation": space.braiding.braid_relation(),
            "graded_dims": dims.dims, "complete": dims.complete, "total": dims.total,
            "symmetry": {k: v for k, v in sym.to_json().items() if k != "q"},
        }
        pbw = pbw_dimension(space)
        entry["pbw_total"] = _order_text(pbw)
        if pbw != INFINITE_ORDER:
            entry["pbw_graded_dims"] = pbw_graded_dims(space, args.max_degree)
        if cls.size == 1:
            entries = [QLSEntry(1, m.degree, ct.values[m.character][ctx.centralizer(c).s_class])
                       for m in mods]
            try:
                entry["central_qls_total"] = central_qls_dimension(entries)
            except ValueError as exc:
                entry["central_qls_total"] = None
                entry["central_qls_reason"] = str(exc)
        results.append(entry)
    header = ["class", "characters", "dim", "graded_dims", "total", "pbw_total"]
    rows = [[e["class"], " ".join(map(str, e["characters"])), e["dim"], " ".join(map(str, e["graded_dims"])),
             e["total"], e["pbw_total"]] for e in results]
    return ctx, {"modules": results}, header, rows, 0


def cmd_verify(args):
    try:
        expected = load_expected(args.group, args.expected)
    except (OSError, KeyError, ValueError) as exc:
        raise Failure("expected", f"reference data unreadable: {exc}") from None
    ctx = _context(args)
    suites = args.suite or ["all"]
    names = list(SUITES) if "all" in suites else list(dict.fromkeys(suites))
    known, save = _row_store(args, ctx)
    v = Verifier(ctx, expected, extended=args.extended, mode=args.mode, budget=args.witness_budget,
                 seed=args.seed, workers=args.workers, limit=args.limit, log=_log(args), known_rows=known,
                 on_row=save)
    results = v.run_all(names)
    status = [r.status for r in results]
    data = {"suites": [r.to_json() for r in results],
            "failed": status.count(FAIL), "skipped": status.count(SKIPPED),
            "passed": status.count("PASS")}
    header = ["suite", "status", "mismatches"]
    rows = [[r.suite, r.status, len(r.mismatches)] for r in results]
    return ctx, data, header, rows, 1 if FAIL in status else 0


HANDLERS = {
    "group-info": cmd_group_info, "classes": cmd_classes, "chartab": cmd_chartab, "minus-one": cmd_minus_one,
    "center": cmd_center, "qls": cmd_qls, "square-comm": cmd_square_comm, "theorem3": cmd_theorem3,
    "nichols-dim": cmd_nichols_dim, "verify": cmd_verify,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ctx, result, header, rows, code = HANDLERS[args.command](args)
    except Failure as exc:
        print(json.dumps({"error": exc.kind, "reason": exc.reason, "command": args.command,
                          "group": args.group}, sort_keys=True), file=sys.stderr)
        return 2
    _emit(args, _envelope(args, ctx, result), header, rows)
    return code


if __name__ == "__main__":
    sys.exit(main())
