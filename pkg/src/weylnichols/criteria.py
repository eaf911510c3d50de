"""Verdicts: -1-type characters, nu statistics, central quantum linear spaces,
square-commutativity of class pairs and the resulting dimension deductions."""

from __future__ import annotations

import enum
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .chartab import CharacterTable
from .classes import ENUMERATION_LIMIT, ClassData, is_real_class, storable
from .exact import Cyclotomic, is_real_negative_of_degree
from .perm import Permutation
from .pipeline import CentralizerData, WeylContext


class Verdict(enum.Enum):
    INFINITE_ODD_ORDER = "INFINITE_ODD_ORDER"
    INFINITE_CHI_NOT_MINUS_DEG = "INFINITE_CHI_NOT_MINUS_DEG"
    INFINITE_NOT_REAL = "INFINITE_NOT_REAL"
    MINUS_ONE_TYPE = "MINUS_ONE_TYPE"


@dataclass(frozen=True)
class BiOneVerdict:
    class_id: int
    character: int
    verdict: Verdict
    value: Cyclotomic
    degree: int


def bi_one_verdict(cd: ClassData, ct: CharacterTable, c: int, chi: int, s_class: int) -> BiOneVerdict:
    """Verdict for the pair (class c, character chi of the centralizer of its representative).

    ``s_class`` is the class of the representative inside its centralizer.
    """
    if ct.class_sizes[s_class] != 1:
        raise ValueError("representative is not a singleton class of its centralizer")
    val = ct.evaluate(chi, s_class)
    deg = ct.degree(chi)
    if cd.classes[c].order % 2 == 1:
        v = Verdict.INFINITE_ODD_ORDER
    elif not is_real_class(cd, c):
        v = Verdict.INFINITE_NOT_REAL
    elif is_real_negative_of_degree(val, deg):
        v = Verdict.MINUS_ONE_TYPE
    else:
        v = Verdict.INFINITE_CHI_NOT_MINUS_DEG
    return BiOneVerdict(c, chi, v, val, deg)


def even_cycle_count(perm: Sequence[int]) -> int:
    """Number of even-length cycles of a permutation of range(n)."""
    seen = [False] * len(perm)
    count = 0
    for a in range(len(perm)):
        if seen[a]:
            continue
        length = 0
        b = a
        while not seen[b]:
            seen[b] = True
            b = perm[b]
            length += 1
        count += length % 2 == 0
    return count


def minus_one_count_by_cycles(cz: CentralizerData) -> int:
    """Characters of H = C(s) with chi(s) = -chi(1), counted without a character table.

    Multiplication by the central s permutes the classes of H; in the basis of
    irreducible characters it acts diagonally by the central characters
    omega_chi(s), so -1 occurs once per even cycle of the class permutation.
    """
    if cz.cd.classes[cz.s_class].order % 2:
        return 0
    return even_cycle_count(cz.shift_permutation())


# ------------------------------------------------------------------ tables

@dataclass
class TableRow:
    class_id: int
    order: int
    size: int
    centralizer_order: int
    nu1: Optional[int] = None
    nu2: Optional[int] = None
    minus_one_characters: tuple[int, ...] = ()
    status: str = "OK"
    route: str = "table"
    reason: str = ""

    @property
    def minus_one_count(self) -> Optional[int]:
        return None if self.nu1 is None else self.nu1 - self.nu2

    @property
    def key(self) -> tuple:
        return (self.order, self.nu1, self.nu2, self.minus_one_count)

    def to_json(self) -> dict:
        return {
            "class": self.class_id, "order": self.order, "size": self.size,
            "centralizer_order": self.centralizer_order, "nu1": self.nu1, "nu2": self.nu2,
            "minus_one_count": self.minus_one_count, "minus_one_characters": list(self.minus_one_characters),
            "status": self.status, "route": self.route, "reason": self.reason,
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "TableRow":
        return cls(d["class"], d["order"], d["size"], d["centralizer_order"], d["nu1"], d["nu2"],
                   tuple(d["minus_one_characters"]), d["status"], d["route"], d["reason"])


def table_row(ctx: WeylContext, c: int, route: str = "table", limit: int = ENUMERATION_LIMIT,
              log=None) -> TableRow:
    cls = ctx.cd.classes[c]
    row = TableRow(c, cls.order, cls.size, cls.centralizer_order)
    if route == "table":
        cz = ctx.centralizer(c, with_table=True, limit=limit, log=log)
        ct = cz.ct
        verdicts = [bi_one_verdict(ctx.cd, ct, c, x, cz.s_class) for x in range(len(ct))]
        row.minus_one_characters = tuple(v.character for v in verdicts if v.verdict is Verdict.MINUS_ONE_TYPE)
        row.nu1 = len(ct)
        row.nu2 = row.nu1 - len(row.minus_one_characters)
    elif route == "cycles":
        cz = ctx.centralizer(c, with_table=False, limit=limit, log=log)
        row.nu1 = len(cz.cd)
        row.nu2 = row.nu1 - minus_one_count_by_cycles(cz)
    else:
        raise ValueError(f"unknown route {route!r}")
    row.route = route
    return row


def minus_one_table(ctx: WeylContext, extended: bool = False, limit: int = ENUMERATION_LIMIT,
                    classes: Optional[Iterable[int]] = None, route: str = "table", log=None,
                    known: Optional[Mapping[int, TableRow]] = None,
                    on_row: Optional[Callable[[TableRow], None]] = None) -> list[TableRow]:
    """One row per class, in canonical class order.

    Enumerated groups use centralizer character tables throughout.  For the
    non-enumerated group every row is SKIPPED unless ``extended``.  Then
    central rows, and rows whose centralizer is too large to enumerate, are
    counted through the class permutation of s (``route="table-only"`` marks
    the large ones SKIPPED instead); the rest use character tables, or the
    class permutation too with ``route="cycles"``.

    Finished rows found in ``known`` are reused; ``on_row`` sees every newly
    computed OK row, which lets callers persist progress.
    """
    rows: list[TableRow] = []
    wanted = set(range(len(ctx.cd))) if classes is None else set(classes)
    known = known or {}
    for cls in ctx.cd.classes:
        if cls.id not in wanted:
            continue
        c = cls.id
        if c in known and known[c].status == "OK" and (extended or ctx.enumerated):
            rows.append(known[c])
            continue
        before = len(rows)
        skipped = TableRow(c, cls.order, cls.size, cls.centralizer_order, status="SKIPPED")
        if ctx.enumerated:
            rows.append(table_row(ctx, c, log=log))
            ctx.release_centralizer(c)
        elif not extended:
            skipped.reason = "needs --extended"
            rows.append(skipped)
        elif cls.size == 1:
            rows.append(table_row(ctx, c, route="cycles", log=log))
        elif storable(cls.centralizer_order, ctx.rs.nroots, limit) and route in ("table", "table-only"):
            rows.append(table_row(ctx, c, limit=limit, log=log))
            ctx.release_centralizer(c)
        elif route in ("table", "cycles"):
            rows.append(table_row(ctx, c, route="cycles", limit=limit, log=log))
            ctx.release_centralizer(c)
        else:
            skipped.reason = f"centralizer of order {cls.centralizer_order} is too large to enumerate"
            rows.append(skipped)
        if on_row and len(rows) > before and rows[-1].status == "OK":
            on_row(rows[-1])
    return rows


@dataclass
class TableComparison:
    matched: int
    missing: list[tuple]
    unexpected: list[tuple]
    skipped: int

    @property
    def ok(self) -> bool:
        return not self.missing and not self.unexpected


def compare_rows(rows: Sequence[TableRow], expected: Sequence[tuple]) -> TableComparison:
    """Multiset comparison on (order, nu1, nu2, minus_one_count); SKIPPED rows are set aside.

    With skipped rows present, expected keys left over are only reported when
    no skipped row of the same element order could account for them.
    """
    done = Counter(r.key for r in rows if r.status == "OK")
    skipped = [r for r in rows if r.status != "OK"]
    want = Counter(tuple(e) for e in expected)
    missing = want - done
    unexpected = done - want
    if skipped:
        budget = Counter(r.order for r in skipped)
        left = Counter()
        for key, n in sorted(missing.items()):
            take = min(n, budget[key[0]])
            budget[key[0]] -= take
            if n > take:
                left[key] = n - take
        missing = left
    matched = sum((done & want).values())
    return TableComparison(matched, sorted(missing.elements()), sorted(unexpected.elements()), len(skipped))


# ------------------------------------------------------ central QLS report

@dataclass
class CentralQLS:
    class_id: int
    order: int
    characters: Optional[tuple[int, ...]]
    count: Optional[int]
    route: str
    status: str = "OK"

    def to_json(self) -> dict:
        return {"class": self.class_id, "order": self.order,
                "characters": None if self.characters is None else list(self.characters),
                "count": self.count, "route": self.route, "status": self.status}


def central_qls_classification(ctx: WeylContext, extended: bool = False, log=None) -> list[CentralQLS]:
    """-1-type characters at every non-identity central class.

    These are the characters a central quantum linear space can be built
    from.  The non-enumerated group only gets counts, and only with
    ``extended``.
    """
    out = []
    for c in ctx.central_classes():
        order = ctx.cd.classes[c].order
        if ctx.enumerated:
            row = table_row(ctx, c, log=log)
            out.append(CentralQLS(c, order, row.minus_one_characters, row.minus_one_count, "table"))
        elif extended:
            row = table_row(ctx, c, route="cycles", log=log)
            out.append(CentralQLS(c, order, None, row.minus_one_count, "cycles"))
        else:
            out.append(CentralQLS(c, order, None, None, "cycles", status="SKIPPED"))
    return out


# ------------------------------------------------- square-commutativity

class Proof(enum.Enum):
    EXHAUSTIVE = "EXHAUSTIVE"
    WITNESS = "WITNESS"
    REDUCED_ORBIT = "REDUCED_ORBIT"


class Theorem3(enum.Enum):
    INFINITE_NOT_SQ_COMM = "INFINITE_NOT_SQ_COMM"
    INFINITE_ODD_ORDER = "INFINITE_ODD_ORDER"
    EXCLUDED_CENTRAL_OR_IDENTITY = "EXCLUDED_CENTRAL_OR_IDENTITY"
    UNDETERMINED = "UNDETERMINED"


def _tri(v: Optional[bool]) -> str:
    return "UNKNOWN" if v is None else ("TRUE" if v else "FALSE")


@dataclass
class PairVerdict:
    i: int
    j: int
    commute: Optional[bool] = None
    square_commute: Optional[bool] = None
    proof: Optional[Proof] = None
    witness: Optional[tuple[Permutation, Permutation]] = field(default=None, repr=False)
    commute_witness: Optional[tuple[Permutation, Permutation]] = field(default=None, repr=False)
    draws: int = 0
    theorem3: Optional[Theorem3] = None

    @property
    def pair(self) -> tuple[int, int]:
        return (min(self.i, self.j), max(self.i, self.j))

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "commute": _tri(self.commute),
                "square_commute": _tri(self.square_commute),
                "proof": self.proof.value if self.proof else None, "draws": self.draws,
                "witness": None if self.witness is None else [list(p.images) for p in self.witness],
                "theorem3": self.theorem3.value if self.theorem3 else None}


def squares_commute(s: Permutation, t: Permutation) -> bool:
    st = s * t
    ts = t * s
    return st * st == ts * ts


def _batch_relations(s_rows: np.ndarray, t_rows: np.ndarray, rank: int) -> tuple[np.ndarray, np.ndarray]:
    """For row-aligned batches: (s t == t s, (st)^2 == (ts)^2) tested on simple roots."""
    n = np.arange(len(s_rows))[:, None]
    simple = np.arange(rank)[None, :]

    def apply(p, x):
        return p[n, x]

    t1 = apply(t_rows, np.broadcast_to(simple, (len(s_rows), rank)))
    st = apply(s_rows, t1)
    s1 = apply(s_rows, np.broadcast_to(simple, (len(s_rows), rank)))
    ts = apply(t_rows, s1)
    stst = apply(s_rows, apply(t_rows, st))
    tsts = apply(t_rows, apply(s_rows, ts))
    return np.all(st == ts, axis=1), np.all(stst == tsts, axis=1)


def _settle(v: PairVerdict, comm: np.ndarray, sq: np.ndarray, s_rows, t_rows) -> None:
    if v.commute is None and not comm.all():
        k = int(np.argmin(comm))
        v.commute = False
        v.commute_witness = (Permutation._trusted(s_rows[k].tolist()), Permutation._trusted(t_rows[k].tolist()))
    if v.square_commute is None and not sq.all():
        k = int(np.argmin(sq))
        v.square_commute = False
        v.witness = (Permutation._trusted(s_rows[k].tolist()), Permutation._trusted(t_rows[k].tolist()))


def _class_rows(ctx: WeylContext, c: int) -> np.ndarray:
    return ctx.cd.store.perms[ctx.cd.class_elements(c)].astype(np.int64)


def _exhaustive(ctx: WeylContext, i: int, j: int, block: int = 1 << 16) -> PairVerdict:
    v = PairVerdict(i, j, proof=Proof.EXHAUSTIVE)
    S = _class_rows(ctx, i)
    T = _class_rows(ctx, j)
    rank = ctx.rs.rank
    step = max(1, block // max(1, len(T)))
    for a in range(0, len(S), step):
        s_rows = np.repeat(S[a:a + step], len(T), axis=0)
        t_rows = np.tile(T, (min(step, len(S) - a), 1))
        comm, sq = _batch_relations(s_rows, t_rows, rank)
        v.draws += len(s_rows)
        _settle(v, comm, sq, s_rows, t_rows)
        if v.commute is False and v.square_commute is False:
            return v
    if v.commute is None:
        v.commute = True
    if v.square_commute is None:
        v.square_commute = True
    return v


def centralizer_orbit_representatives(ctx: WeylContext, i: int, j: int) -> np.ndarray:
    """Store rows of one element per C(s_i)-orbit on the class O_j."""
    cd = ctx.cd
    cz = ctx.centralizer(i, with_table=False)
    elems = cd.class_elements(j)
    gens = [g for g in cz.group.generators if not g.is_identity()]
    if not gens:
        return elems
    rows, cols = [], []
    for g in gens:
        img = cd.store.index_of(cd.store.conj_by_keys(np.array(g.images, dtype=np.int64), elems))
        rows.append(np.arange(len(elems)))
        cols.append(np.searchsorted(elems, img))
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(len(elems), len(elems)))
    _, labels = connected_components(graph, directed=True, connection="weak")
    _, first = np.unique(labels, return_index=True)
    return elems[np.sort(first)]


def _reduced(ctx: WeylContext, i: int, j: int) -> PairVerdict:
    v = PairVerdict(i, j, proof=Proof.REDUCED_ORBIT)
    reps = centralizer_orbit_representatives(ctx, i, j)
    T = ctx.cd.store.perms[reps].astype(np.int64)
    s = np.array(ctx.cd.classes[i].representative.images, dtype=np.int64)
    S = np.broadcast_to(s, T.shape)
    comm, sq = _batch_relations(S, T, ctx.rs.rank)
    v.draws = len(T)
    _settle(v, comm, sq, S, T)
    v.commute = False if v.commute is False else True
    v.square_commute = False if v.square_commute is False else True
    return v


def _witness(ctx: WeylContext, i: int, j: int, budget: int, seed: int, batch: int = 2048) -> PairVerdict:
    """Random t = g s_j g^-1 against s = s_i; proves negatives only."""
    v = PairVerdict(i, j, proof=Proof.WITNESS)
    rng = np.random.default_rng([seed, i, j])
    s = np.array(ctx.cd.classes[i].representative.images, dtype=np.int64)
    x = np.array(ctx.cd.classes[j].representative.images, dtype=np.int64)
    while v.draws < budget and (v.square_commute is None or v.commute is None):
        n = min(batch, budget - v.draws)
        g = ctx.group.uniform_batch(rng, n)
        ginv = np.argsort(g, axis=1)
        T = np.take_along_axis(g, x[ginv], axis=1)
        S = np.broadcast_to(s, T.shape)
        comm, sq = _batch_relations(S, T, ctx.rs.rank)
        v.draws += n
        _settle(v, comm, sq, S, T)
    if v.square_commute is None and v.commute is None:
        v.proof = None
    return v


def pair_commutativity(ctx: WeylContext, i: int, j: int, mode: str = "auto", budget: int = 100_000,
                       seed: int = 0) -> PairVerdict:
    """Commutativity and square-commutativity of the classes O_i, O_j.

    ``exhaustive`` tests every (s, t); ``reduced`` fixes s = s_i and tests one t
    per C(s_i)-orbit on O_j, which suffices since both relations are
    conjugation invariant; ``witness`` draws random t and can only refute.
    ``auto`` tries witnesses first and falls back to ``reduced`` when the
    group is enumerated.  Unresolved relations stay None (UNKNOWN).
    """
    if mode == "exhaustive":
        if not ctx.enumerated:
            raise ValueError("exhaustive mode needs an enumerated group")
        return _exhaustive(ctx, i, j)
    if mode == "reduced":
        if not ctx.enumerated:
            return PairVerdict(i, j)
        return _reduced(ctx, i, j)
    if mode == "witness":
        return _witness(ctx, i, j, budget, seed)
    if mode == "auto":
        v = _witness(ctx, i, j, budget, seed)
        if v.square_commute is None and ctx.enumerated:
            r = _reduced(ctx, i, j)
            r.draws += v.draws
            return r
        return v
    raise ValueError(f"unknown mode {mode!r}")


def excluded_classes(ctx: WeylContext) -> set[int]:
    return {c.id for c in ctx.cd.classes if c.size == 1}


def assign_theorem3(ctx: WeylContext, v: PairVerdict) -> PairVerdict:
    excluded = excluded_classes(ctx)
    orders = ctx.cd.orders
    if v.i in excluded or v.j in excluded:
        v.theorem3 = Theorem3.EXCLUDED_CENTRAL_OR_IDENTITY
    elif v.square_commute is False:
        v.theorem3 = Theorem3.INFINITE_NOT_SQ_COMM
    elif orders[v.i] % 2 or orders[v.j] % 2:
        v.theorem3 = Theorem3.INFINITE_ODD_ORDER
    else:
        v.theorem3 = Theorem3.UNDETERMINED
    return v


def all_pairs(ctx: WeylContext, include_excluded: bool = False) -> list[tuple[int, int]]:
    n = len(ctx.cd)
    skip = set() if include_excluded else excluded_classes(ctx)
    return [(i, j) for i in range(n) for j in range(i, n) if i not in skip and j not in skip]


def square_commutativity(ctx: WeylContext, mode: str = "auto", budget: int = 100_000, seed: int = 0,
                         pairs: Optional[Iterable[tuple[int, int]]] = None, workers: int = 1) -> list[PairVerdict]:
    """Verdicts for the given pairs (default: all pairs of non-singleton classes).

    Every pair draws from its own stream seeded by (seed, i, j), so the
    output does not depend on ``workers``.
    """
    pairs = all_pairs(ctx) if pairs is None else list(pairs)

    def run(p: tuple[int, int]) -> PairVerdict:
        return pair_commutativity(ctx, p[0], p[1], mode=mode, budget=budget, seed=seed)

    if workers <= 1:
        return [run(p) for p in pairs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, pairs))


def theorem3_verdicts(ctx: WeylContext, mode: str = "auto", budget: int = 100_000, seed: int = 0,
                      verdicts: Optional[Sequence[PairVerdict]] = None) -> list[PairVerdict]:
    """Every unordered pair of classes with its dimension deduction."""
    n = len(ctx.cd)
    excluded = excluded_classes(ctx)
    if verdicts is None:
        verdicts = square_commutativity(ctx, mode=mode, budget=budget, seed=seed)
    known = {v.pair: v for v in verdicts}
    out = []
    for i in range(n):
        for j in range(i, n):
            v = known.get((i, j))
            if v is None:
                v = PairVerdict(i, j)
                if i not in excluded and j not in excluded:
                    v = pair_commutativity(ctx, i, j, mode=mode, budget=budget, seed=seed)
            out.append(assign_theorem3(ctx, v))
    return out


# --------------------------------------------------- label-free matching

def _norm(pairs: Iterable[tuple[int, int]]) -> set[tuple[int, int]]:
    return {tuple(sorted(p)) for p in pairs}


def match_pair_families(families: Sequence[tuple[Iterable[tuple[int, int]], Iterable[tuple[int, int]]]],
                        our_keys: Mapping[int, tuple], their_keys: Mapping[int, tuple]) -> Optional[dict[int, int]]:
    """One key-preserving injection f from expected labels to our class ids
    with f(expected) == computed for every (computed, expected) family.

    Pairs are unordered.  Returns the assignment on the labels that occur in
    some expected set, or None when no relabeling works.
    """
    fams = [(_norm(c), _norm(e)) for c, e in families]
    if any(len(c) != len(e) for c, e in fams):
        return None
    count = Counter(a for _, e in fams for p in e for a in p)
    labels = sorted(count, key=lambda a: (-count[a], a))
    support = {a for c, _ in fams for p in c for a in p}
    by_key: dict[tuple, list[int]] = defaultdict(list)
    for c, k in our_keys.items():
        by_key[k].append(c)
    assign: dict[int, int] = {}
    used: set[int] = set()

    def consistent(a: int) -> bool:
        for comp, exp in fams:
            for p in exp:
                if a in p and all(b in assign for b in p):
                    if tuple(sorted(assign[b] for b in p)) not in comp:
                        return False
        return True

    def extend(k: int) -> bool:
        if k == len(labels):
            return all({tuple(sorted(assign[b] for b in p)) for p in e} == c for c, e in fams)
        a = labels[k]
        for c in sorted(by_key.get(their_keys[a], [])):
            if c in used or c not in support:
                continue
            assign[a] = c
            used.add(c)
            if consistent(a) and extend(k + 1):
                return True
            del assign[a]
            used.discard(c)
        return False

    return dict(assign) if extend(0) else None


def match_pair_sets(computed: Iterable[tuple[int, int]], expected: Iterable[tuple[int, int]],
                    our_keys: Mapping[int, tuple], their_keys: Mapping[int, tuple]) -> Optional[dict[int, int]]:
    return match_pair_families([(computed, expected)], our_keys, their_keys)


def class_keys(rows: Sequence[TableRow]) -> dict[int, tuple]:
    return {r.class_id: (r.order, r.nu1, r.nu2) for r in rows if r.status == "OK"}
