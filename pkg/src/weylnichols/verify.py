"""Computed results against the bundled reference data.

Every comparison goes through class invariants, never through labels: rows
are matched as multisets of (order, nu1, nu2, minus_one_count) and pair sets
through a relabeling that preserves (order, nu1, nu2).  A suite ends PASS,
FAIL or SKIPPED; SKIPPED means part of the check was out of scope and is
never reported as PASS.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional

from .classes import ENUMERATION_LIMIT, iso_conjugacy_orbits
from .criteria import (
    PairVerdict, TableRow, Theorem3, assign_theorem3, central_qls_classification, class_keys, compare_rows,
    match_pair_families, minus_one_table, square_commutativity, table_row,
)
from .expected import ExpectedTable
from .pipeline import WeylContext

PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"
SUITES = ("group", "minus-one", "center", "qls", "square-comm", "theorem3", "iso")


@dataclass
class SuiteResult:
    suite: str
    status: str
    summary: dict = field(default_factory=dict)
    mismatches: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"suite": self.suite, "status": self.status, "summary": self.summary,
                "mismatches": self.mismatches}


@dataclass
class Verifier:
    """Runs suites for one group, sharing table rows and pair verdicts between them."""

    ctx: WeylContext
    expected: ExpectedTable
    extended: bool = False
    mode: str = "auto"
    budget: int = 100_000
    seed: int = 0
    workers: int = 1
    limit: int = ENUMERATION_LIMIT
    log: Optional[Callable[[str], None]] = None
    known_rows: dict[int, TableRow] = field(default_factory=dict)
    on_row: Optional[Callable[[TableRow], None]] = None
    _rows: Optional[list[TableRow]] = None
    _verdicts: Optional[list[PairVerdict]] = None

    # ----------------------------------------------------------- shared data

    def rows(self) -> list[TableRow]:
        if self._rows is None:
            self._rows = minus_one_table(self.ctx, extended=self.extended, limit=self.limit, log=self.log,
                                         known=self.known_rows, on_row=self.on_row)
        return self._rows

    def keys(self, classes) -> Optional[dict[int, tuple]]:
        """(order, nu1, nu2) for the given classes, or None when out of scope."""
        classes = set(classes)
        if self.ctx.enumerated:
            return {c: k for c, k in class_keys(self.rows()).items() if c in classes}
        if self._rows is not None:
            ready = class_keys(self._rows)
            if classes <= set(ready):
                return {c: ready[c] for c in classes}
        if not self.extended:
            return None
        out = {}
        for c in sorted(classes):
            row = self.known_rows.get(c)
            if row is None or row.status != "OK":
                row = table_row(self.ctx, c, route="cycles", limit=self.limit, log=self.log)
                self.ctx.release_centralizer(c)
                self.known_rows[c] = row
                if self.on_row:
                    self.on_row(row)
            out[c] = (row.order, row.nu1, row.nu2)
        return out

    def verdicts(self) -> list[PairVerdict]:
        if self._verdicts is None:
            mode = self.mode if self.ctx.enumerated else "witness"
            self._verdicts = [assign_theorem3(self.ctx, v) for v in square_commutativity(
                self.ctx, mode=mode, budget=self.budget, seed=self.seed, workers=self.workers)]
        return self._verdicts

    # ---------------------------------------------------------------- suites

    def run(self, suite: str) -> SuiteResult:
        fn = {
            "group": self.suite_group, "minus-one": self.suite_minus_one, "center": self.suite_center,
            "qls": self.suite_qls, "square-comm": self.suite_square_comm, "theorem3": self.suite_theorem3,
            "iso": self.suite_iso,
        }[suite]
        return fn()

    def run_all(self, suites=SUITES) -> list[SuiteResult]:
        return [self.run(s) for s in suites]

    def suite_group(self) -> SuiteResult:
        ctx, exp = self.ctx, self.expected
        found = {"order": ctx.order, "nroots": ctx.rs.nroots, "classes": len(ctx.cd)}
        want = {"order": exp.order, "nroots": exp.nroots, "classes": exp.nclasses}
        bad = [{"field": k, "computed": found[k], "expected": want[k]} for k in found if found[k] != want[k]]
        ours = Counter(ctx.cd.orders)
        theirs = Counter(r.order for r in exp.rows)
        if ours != theirs:
            bad.append({"field": "element orders", "computed": _counter(ours), "expected": _counter(theirs)})
        return SuiteResult("group", FAIL if bad else PASS, found, bad)

    def suite_minus_one(self) -> SuiteResult:
        rows = self.rows()
        cmp = compare_rows(rows, self.expected.keys)
        summary = {"rows": len(rows), "matched": cmp.matched, "skipped": cmp.skipped}
        bad = [{"side": "expected", "key": list(k)} for k in cmp.missing]
        bad += [{"side": "computed", "key": list(k)} for k in cmp.unexpected]
        status = FAIL if bad else (SKIPPED if cmp.skipped else PASS)
        return SuiteResult("minus-one", status, summary, bad)

    def suite_center(self) -> SuiteResult:
        ctx, exp = self.ctx, self.expected
        central = [c.id for c in ctx.cd.classes if c.size == 1]
        theirs_full = exp.label_keys()
        keys = self.keys(central)
        summary = {"center_size": len(central), "classes": central}
        if keys is None:
            ours = Counter(ctx.cd.orders[c] for c in central)
            theirs = Counter(theirs_full[a][0] for a in exp.center)
            bad = [] if ours == theirs else [{"computed": _counter(ours), "expected": _counter(theirs)}]
            summary["compared"] = "orders only; invariants need --extended"
            return SuiteResult("center", FAIL if bad else SKIPPED, summary, bad)
        ours = Counter(keys[c] for c in central)
        theirs = Counter(theirs_full[a] for a in exp.center)
        bad = [] if ours == theirs else [{"computed": _counter(ours), "expected": _counter(theirs)}]
        return SuiteResult("center", FAIL if bad else PASS, summary, bad)

    def suite_qls(self) -> SuiteResult:
        report = central_qls_classification(self.ctx, extended=self.extended, log=self.log)
        want = self.expected.central_qls_count
        summary = {"central_classes": [r.to_json() for r in report], "expected_count": want}
        if any(r.status != "OK" for r in report):
            return SuiteResult("qls", SKIPPED, summary)
        got = sum(r.count for r in report)
        bad = []
        if len(report) > 1:
            bad.append({"computed": f"{len(report)} non-identity central classes", "expected": "at most one"})
        if got != want:
            bad.append({"computed": got, "expected": want})
        return SuiteResult("qls", FAIL if bad else PASS, summary, bad)

    def suite_square_comm(self) -> SuiteResult:
        exp = self.expected
        verdicts = self.verdicts()
        summary = {"pairs": len(verdicts), "mode": self.mode if self.ctx.enumerated else "witness",
                   "budget": self.budget}
        if exp.commuting_pairs == "none":
            bad = [{"side": "computed", "pair": list(v.pair), "commute": _tri(v.commute)}
                   for v in verdicts if v.commute is not False]
            return SuiteResult("square-comm", FAIL if bad else PASS, summary, bad)
        if "square_comm" not in exp.pairs:
            return SuiteResult("square-comm", SKIPPED, {**summary, "reason": "no reference pair set"})
        positive = _positive_pairs(verdicts)
        summary["square_commuting"] = [list(p) for p in sorted(positive)]
        if not self.ctx.enumerated:
            summary["positives"] = "not refuted by witness search; not proven"
        return self._match("square-comm", summary, [(positive, exp.pairs["square_comm"])])

    def suite_theorem3(self) -> SuiteResult:
        exp = self.expected
        verdicts = self.verdicts()
        if "undetermined" not in exp.pairs:
            if exp.commuting_pairs == "none":
                # the reference calls every pair infinite; the two deductions
                # may leave some undecided, which confirms nothing either way
                left = sorted(v.pair for v in verdicts if v.theorem3 is Theorem3.UNDETERMINED)
                summary = {"undetermined": [list(p) for p in left]}
                if not left:
                    return SuiteResult("theorem3", PASS, summary)
                summary["reason"] = "reference claims these pairs infinite by means beyond the two deductions"
                return SuiteResult("theorem3", SKIPPED, summary)
            return SuiteResult("theorem3", SKIPPED, {"reason": "no reference pair set"})
        positive = _positive_pairs(verdicts)
        und = {v.pair for v in verdicts if v.theorem3 is Theorem3.UNDETERMINED}
        summary = {"undetermined": [list(p) for p in sorted(und)],
                   "odd_order": sorted(list(v.pair) for v in verdicts if v.theorem3 is Theorem3.INFINITE_ODD_ORDER)}
        families = [(positive, exp.pairs["square_comm"]), (und, exp.pairs["undetermined"])]
        return self._match("theorem3", summary, families)

    def suite_iso(self) -> SuiteResult:
        exp = self.expected
        if exp.iso_orbits is None:
            return SuiteResult("iso", SKIPPED, {"reason": "no reference orbit count"})
        orbits = iso_conjugacy_orbits(self.ctx.cd)
        summary = {"orbits": len(orbits), "expected": exp.iso_orbits}
        bad = []
        if len(orbits) != exp.iso_orbits:
            bad.append({"computed": len(orbits), "expected": exp.iso_orbits})
        keys = self.keys(range(len(self.ctx.cd)))
        if keys is not None and exp.iso_reps is not None:
            ours = Counter(keys[o[0]] for o in orbits)
            theirs_full = exp.label_keys()
            theirs = Counter(theirs_full[a] for a in exp.iso_reps)
            if ours != theirs:
                bad.append({"computed": _counter(ours), "expected": _counter(theirs)})
        return SuiteResult("iso", FAIL if bad else PASS, summary, bad)

    def _match(self, name: str, summary: dict, families) -> SuiteResult:
        exp = self.expected
        support = {a for comp, _ in families for p in comp for a in p}
        keys = self.keys(support)
        if keys is None:
            summary["reason"] = "class invariants need --extended"
            return SuiteResult(name, SKIPPED, summary)
        theirs = exp.label_keys()
        assign = match_pair_families(families, keys, theirs)
        if assign is not None:
            summary["relabeling"] = {f"s{a}": c for a, c in sorted(assign.items())}
            return SuiteResult(name, PASS, summary)
        bad = []
        for comp, want in families:
            bad.append({
                "computed": [[list(p), [list(keys[p[0]]), list(keys[p[1]])]] for p in sorted(comp)],
                "expected": [[[f"s{p[0]}", f"s{p[1]}"], [list(theirs[p[0]]), list(theirs[p[1]])]]
                             for p in sorted(want)],
            })
        return SuiteResult(name, FAIL, summary, bad)


def _positive_pairs(verdicts) -> set[tuple[int, int]]:
    """Pairs not shown to fail square-commutativity."""
    return {v.pair for v in verdicts if v.square_commute is not False}


def _tri(v: Optional[bool]) -> str:
    return "UNKNOWN" if v is None else str(v).upper()


def _counter(c: Counter) -> list:
    return [[list(k) if isinstance(k, tuple) else k, n] for k, n in sorted(c.items())]
