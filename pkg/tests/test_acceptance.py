"""Acceptance gate: one line per criterion, printed by the last test.

Parts for G2, F4, E6 and E7 run first; contexts are then dropped so the E8
parts have the machine's memory to themselves.  The full E8 -1-type table
runs only with WEYLNICHOLS_EXTENDED=1 (it takes hours).
"""

import itertools
import math
import os
import random
import time
from collections import Counter, defaultdict
from contextlib import contextmanager

import numpy as np
import pytest

from weylnichols.braided import (
    QLSEntry, braiding_matrix, build_yd_module, central_qls_dimension, nichols_graded_dims, pbw_dimension,
)
from weylnichols.chartab import column_orthogonality, row_orthogonality
from weylnichols.classes import fingerprint, is_real_class, iso_conjugacy_orbits
from weylnichols.criteria import (
    Proof, Theorem3, all_pairs, class_keys, compare_rows, match_pair_families, minus_one_table,
    pair_commutativity, square_commutativity, table_row, theorem3_verdicts,
)
from weylnichols.exact import INFINITE_ORDER, cyclo_root, q_binomial
from weylnichols.expected import load_expected
from weylnichols.pipeline import clear_contexts, get_context, get_group_order
from weylnichols.perm import Permutation
from weylnichols.rootsys import ExcType, build_root_system
from weylnichols.store import inverse_rows, pack_keys

GROUPS = ["G2", "F4", "E6", "E7", "E8"]
ORDERS = {"G2": 12, "F4": 1152, "E6": 51840, "E7": 2903040, "E8": 696729600}
ROOTS = {"G2": 12, "F4": 48, "E6": 72, "E7": 126, "E8": 240}
CLASSES = {"G2": 6, "F4": 25, "E6": 25, "E7": 60, "E8": 112}
# degrees of the basic invariants: |W| is their product
DEGREES = {"G2": (2, 6), "F4": (2, 6, 8, 12), "E6": (2, 5, 6, 8, 9, 12), "E7": (2, 6, 8, 10, 12, 14, 18),
           "E8": (2, 8, 12, 14, 18, 20, 24, 30)}
CENTER = {"G2": 2, "F4": 2, "E6": 1, "E7": 2, "E8": 2}
QLS = {"G2": 3, "F4": 9, "E6": 0, "E7": 30, "E8": 45}
ISO = {"G2": 5, "F4": 15, "E6": 25}
EXTENDED = os.environ.get("WEYLNICHOLS_EXTENDED") == "1"

RESULTS: dict[int, list[tuple[str, str, str]]] = defaultdict(list)
TITLES = {
    1: "group construction", 2: "class counts", 3: "table reproduction", 4: "centers",
    5: "central QLS counts", 6: "square-commutativity sets", 7: "undetermined pair sets",
    8: "Nichols dimensions", 9: "property suites", 10: "iso-conjugacy orbits",
}


@contextmanager
def part(n: int, label: str):
    """Record PASS/FAIL with wall time for one part of criterion n."""
    t = time.time()
    try:
        yield
    except BaseException as exc:
        if isinstance(exc, pytest.skip.Exception):
            RESULTS[n].append((label, "SKIPPED", str(exc)))
        else:
            RESULTS[n].append((label, "FAIL", f"{type(exc).__name__}: {exc}"[:200]))
        raise
    RESULTS[n].append((label, "PASS", f"{time.time() - t:.1f}s"))


def skipped(n: int, label: str, reason: str) -> None:
    RESULTS[n].append((label, "SKIPPED", reason))


def ctx_of(label):
    return get_context(label)


def relabeling(ctx, computed_families, exp, keys):
    families = [(c, exp.pairs[kind]) for c, kind in computed_families]
    return match_pair_families(families, keys, exp.label_keys())


# ------------------------------------------------------------- criterion 1

def test_c1_group_construction():
    with part(1, "orders and roots, all types"):
        t = time.time()
        for label in GROUPS:
            rs = build_root_system(ExcType.parse(label))
            order = get_group_order(label)
            assert rs.nroots == ROOTS[label]
            assert order == ORDERS[label] == math.prod(DEGREES[label])
            # |Phi| = rank * Coxeter number, and the Coxeter number is the largest degree
            assert rs.nroots == rs.rank * max(DEGREES[label])
        assert time.time() - t < 5


# ------------------------------------------------------- small-group parts

def test_c2_class_counts_small():
    with part(2, "G2-E7"):
        t = time.time()
        for label in ["G2", "F4", "E6", "E7"]:
            ctx = ctx_of(label)
            assert len(ctx.cd) == CLASSES[label] == load_expected(label).nclasses
            assert sum(ctx.cd.sizes) == ctx.order
        assert time.time() - t < 300


TABLE_LIMITS = {"G2": 5, "F4": 60, "E6": 1800, "E7": 8 * 3600}
TABLES_CHECKED: dict[str, int] = {}


@pytest.mark.parametrize("label", ["G2", "F4", "E6", "E7"])
def test_c3_tables_small(label):
    """Rows from centralizer tables, with the even-cycle count as a second route
    and both orthogonality relations on every table produced."""
    with part(3, label):
        ctx = ctx_of(label)
        exp = load_expected(label)
        t = time.time()
        rows = []
        tables = 0
        for c in range(len(ctx.cd)):
            row = table_row(ctx, c)
            cz = ctx.centralizer(c)
            assert sum(d * d for d in cz.ct.degrees) == cz.order
            assert row_orthogonality(cz.ct) and column_orthogonality(cz.ct)
            tables += 1
            other = table_row(ctx, c, route="cycles")
            assert (other.nu1, other.nu2) == (row.nu1, row.nu2)
            rows.append(row)
            ctx.release_centralizer(c)
        elapsed = time.time() - t
        cmp = compare_rows(rows, exp.keys)
        assert cmp.ok and cmp.matched == CLASSES[label], (cmp.missing, cmp.unexpected)
        assert elapsed < TABLE_LIMITS[label]
        TABLES_CHECKED[label] = tables


def test_c4_centers_small():
    with part(4, "G2-E7"):
        for label in ["G2", "F4", "E6", "E7"]:
            ctx = ctx_of(label)
            exp = load_expected(label)
            central = [c.id for c in ctx.cd.classes if c.size == 1]
            assert len(central) == CENTER[label] == len(exp.center)
            keys = {c: (k.order, k.nu1, k.nu2) for c in central for k in [table_row(ctx, c, route="cycles")]}
            theirs = exp.label_keys()
            assert Counter(keys.values()) == Counter(theirs[a] for a in exp.center)


def test_c5_central_qls_small():
    with part(5, "G2, F4, E6, E7"):
        for label in ["G2", "F4", "E6", "E7"]:
            ctx = ctx_of(label)
            central = ctx.central_classes()
            assert len(central) <= 1
            count = sum(len(table_row(ctx, c).minus_one_characters) for c in central)
            assert count == QLS[label] == load_expected(label).central_qls_count
            for c in central:
                ctx.release_centralizer(c)


def test_c6_square_commutativity_g2_f4():
    for label, limit in (("G2", 5), ("F4", 1800)):
        with part(6, f"{label} exhaustive"):
            ctx = ctx_of(label)
            exp = load_expected(label)
            t = time.time()
            verdicts = square_commutativity(ctx, mode="exhaustive")
            assert time.time() - t < limit
            assert all(v.proof is Proof.EXHAUSTIVE and v.square_commute is not None for v in verdicts)
            positive = {v.pair for v in verdicts if v.square_commute}
            keys = class_keys(minus_one_table(ctx))
            assert len(positive) == len(exp.pairs["square_comm"]) == {"G2": 7, "F4": 27}[label]
            assert relabeling(ctx, [(positive, "square_comm")], exp, keys) is not None


def test_c6_commutativity_e6():
    with part(6, "E6 witness"):
        ctx = ctx_of("E6")
        t = time.time()
        verdicts = square_commutativity(ctx, mode="witness", budget=100_000)
        assert time.time() - t < 600
        assert len(verdicts) == 24 * 25 // 2
        assert all(v.commute is False for v in verdicts)
        # every negative carries a replayable witness
        for v in verdicts:
            s, t2 = v.commute_witness
            assert s * t2 != t2 * s


def test_c6_square_commutativity_e7():
    with part(6, "E7 reduced-orbit positives, witness negatives"):
        ctx = ctx_of("E7")
        exp = load_expected("E7")
        verdicts = square_commutativity(ctx, mode="auto", budget=100_000)
        assert all(v.square_commute is not None for v in verdicts)
        positive = {v.pair for v in verdicts if v.square_commute}
        assert all(v.proof is Proof.REDUCED_ORBIT for v in verdicts if v.square_commute)
        assert all(v.proof is Proof.WITNESS for v in verdicts if v.square_commute is False)
        support = {a for p in positive for a in p}
        keys = {c: (r.order, r.nu1, r.nu2) for c in support for r in [table_row(ctx, c, route="cycles")]}
        for c in support:
            ctx.release_centralizer(c)
        assert len(positive) == 4
        assert relabeling(ctx, [(positive, "square_comm")], exp, keys) is not None


def test_c7_undetermined_sets():
    for label in ("G2", "F4"):
        with part(7, label):
            ctx = ctx_of(label)
            exp = load_expected(label)
            verdicts = theorem3_verdicts(ctx, mode="exhaustive")
            positive = {v.pair for v in verdicts if v.square_commute}
            und = {v.pair for v in verdicts if v.theorem3 is Theorem3.UNDETERMINED}
            odd = {v.pair for v in verdicts if v.theorem3 is Theorem3.INFINITE_ODD_ORDER}
            keys = class_keys(minus_one_table(ctx))
            assert len(und) == len(exp.pairs["undetermined"])
            # the shrinkage from the square-commuting set is exactly the odd-order pairs
            assert positive - und == odd
            assert relabeling(ctx, [(positive, "square_comm"), (und, "undetermined")], exp, keys) is not None


BRAIDINGS: list = []


def check_braid_relation(b) -> bool:
    """Every basis triple when small; otherwise the scalar-flip structure (which
    implies the relation) plus 20000 random triples."""
    if b.d ** 3 <= 200_000:
        return b.braid_relation()
    flip = all(b.target[a * b.d + c] == c * b.d + a for a in range(b.d) for c in range(b.d))
    scalar = all(q == b.scal[0] for q in b.scal)
    rng = random.Random(0)
    one = cyclo_root(1, 0)
    for _ in range(20_000):
        w = tuple(rng.randrange(b.d) for _ in range(3))
        res = []
        for seq in ((0, 1, 0), (1, 0, 1)):
            q, word = one, w
            for i in seq:
                s, word = b._on_word(word, i)
                q = q * s
            res.append((q, word))
        if res[0] != res[1]:
            return False
    return flip and scalar


def test_c8_nichols_g2():
    with part(8, "G2 order-6 class"):
        ctx = ctx_of("G2")
        t = time.time()
        c = next(k.id for k in ctx.cd.classes if k.order == 6 and k.size > 1)
        cz = ctx.centralizer(c)
        (chi,) = [x for x in table_row(ctx, c).minus_one_characters if cz.ct.degree(x) == 1]
        space = braiding_matrix(build_yd_module(ctx, c, chi))
        BRAIDINGS.append(space.braiding)
        dims = nichols_graded_dims(space.braiding, max_degree=6)
        assert dims.complete and dims.total == 4
        assert dims.dims[:3] == [1, 2, 1] and all(d == 0 for d in dims.dims[3:])
        assert pbw_dimension(space) == 4
        assert time.time() - t < 60


def central_case(ctx, c, chars, symmetrizer=True):
    """Formula, PBW product and (when small) symmetrizer ranks for one subset."""
    cz = ctx.centralizer(c)
    mods = [build_yd_module(ctx, c, x) for x in chars]
    space = braiding_matrix(mods)
    if space.dim <= 60:
        BRAIDINGS.append(space.braiding)
    entries = [QLSEntry(1, cz.ct.degree(x), cz.ct.values[x][cz.s_class]) for x in chars]
    formula = central_qls_dimension(entries)
    assert formula == 2 ** sum(cz.ct.degree(x) for x in chars)
    assert pbw_dimension(space) == formula
    if symmetrizer and space.dim <= 4:
        assert nichols_graded_dims(space.braiding, max_degree=space.dim + 1).total == formula
    return space


def test_c8_central_g2_f4():
    with part(8, "G2/F4 central characters"):
        t = time.time()
        for label in ("G2", "F4"):
            ctx = ctx_of(label)
            (c,) = ctx.central_classes()
            cz = ctx.centralizer(c)
            minus = table_row(ctx, c).minus_one_characters
            for k in (1, 2, 3):
                for subset in itertools.combinations(minus, k):
                    central_case(ctx, c, subset)
            # the remaining central characters are not of -1-type: both routes say infinite
            for x in set(range(len(cz.ct))) - set(minus):
                space = braiding_matrix(build_yd_module(ctx, c, x))
                assert pbw_dimension(space) == INFINITE_ORDER
                with pytest.raises(ValueError):
                    central_qls_dimension([QLSEntry(1, cz.ct.degree(x), cz.ct.values[x][cz.s_class])])
        assert time.time() - t < 600


def test_c8_central_e7_subsets():
    with part(8, "E7 3-subsets at the central class"):
        ctx = ctx_of("E7")
        t = time.time()
        (c,) = ctx.central_classes()
        minus = table_row(ctx, c).minus_one_characters
        assert len(minus) == 30
        rng = random.Random(2024)
        subsets = rng.sample(list(itertools.combinations(minus, 3)), 30)
        for subset in subsets:
            central_case(ctx, c, subset, symmetrizer=False)
        ctx.release_centralizer(c)
        assert time.time() - t < 600


def test_c9_property_suites():
    with part(9, "G2-E6 and tables above"):
        for label in ("G2", "F4", "E6"):
            ctx = ctx_of(label)
            for cls in ctx.cd.classes:
                assert ctx.order % cls.size == 0
                assert is_real_class(ctx.cd, cls.id)
        # fingerprints and labels on 1000 random conjugates per class
        e6 = ctx_of("E6")
        rng = np.random.default_rng(9)
        for cls in e6.cd.classes:
            x = np.array(cls.representative.images, dtype=np.int64)
            g = e6.group.uniform_batch(rng, 1000)
            conj = np.take_along_axis(g, x[inverse_rows(g)], axis=1)
            assert (e6.cd.class_of_keys(pack_keys(conj[:, : e6.rs.rank])) == cls.id).all()
            assert {fingerprint(e6.rs, Permutation(tuple(int(v) for v in row))) for row in conj} == {cls.fingerprint}
        # every braiding assembled for criterion 8
        assert BRAIDINGS and all(check_braid_relation(b) for b in BRAIDINGS)
        # q-binomial recurrence at roots of unity
        for n in range(1, 8):
            for i in range(0, n + 1):
                for order, k in ((1, 0), (2, 1), (3, 1), (4, 1), (6, 1), (5, 2)):
                    q = cyclo_root(order, k)
                    assert q_binomial(n, i, q) == q_binomial(n - 1, i - 1, q) + q ** i * q_binomial(n - 1, i, q)
        # tables: orthogonality and sum of squares were asserted per table in criterion 3
        assert set(TABLES_CHECKED) >= {"G2", "F4", "E6", "E7"}
        # seed independence of the class data and rows
        f4b = get_context("F4", seed=1)
        f4 = ctx_of("F4")
        assert [(c.order, c.size, c.fingerprint) for c in f4b.cd.classes] == \
            [(c.order, c.size, c.fingerprint) for c in f4.cd.classes]
        assert [r.key for r in minus_one_table(f4b)] == [r.key for r in minus_one_table(f4)]


def test_c10_iso_orbits():
    with part(10, "G2, F4, E6"):
        t = time.time()
        for label in ("G2", "F4", "E6"):
            ctx = ctx_of(label)
            exp = load_expected(label)
            orbits = iso_conjugacy_orbits(ctx.cd)
            assert len(orbits) == ISO[label] == exp.iso_orbits
            keys = class_keys(minus_one_table(ctx))
            theirs = exp.label_keys()
            # with no listed representatives every class is its own orbit
            reps = exp.iso_reps if exp.iso_reps is not None else list(theirs)
            assert Counter(keys[o[0]] for o in orbits) == Counter(theirs[a] for a in reps)
        assert time.time() - t < 600


# ------------------------------------------------------------------- E8

def test_release_small_groups():
    clear_contexts()


@pytest.fixture(scope="module")
def e8():
    t = time.time()
    ctx = get_context("E8")
    ctx.build_seconds = time.time() - t
    yield ctx
    clear_contexts()


def test_c2_class_count_e8(e8):
    with part(2, f"E8 discovery in {e8.build_seconds:.1f}s"):
        assert len(e8.cd) == CLASSES["E8"] == load_expected("E8").nclasses
        assert sum(c.size for c in e8.cd.classes) == e8.order
        assert e8.build_seconds < 3600


def test_c4_center_e8(e8):
    with part(4, "E8"):
        exp = load_expected("E8")
        central = [c.id for c in e8.cd.classes if c.size == 1]
        assert len(central) == CENTER["E8"]
        keys = [(r.order, r.nu1, r.nu2) for c in central for r in [table_row(e8, c, route="cycles")]]
        theirs = exp.label_keys()
        assert Counter(keys) == Counter(theirs[a] for a in exp.center)


def test_c5_central_qls_e8(e8):
    with part(5, "E8 (class permutation route)"):
        (c,) = e8.central_classes()
        assert table_row(e8, c, route="cycles").minus_one_count == QLS["E8"] == \
            load_expected("E8").central_qls_count


def test_c6_witness_e8(e8):
    with part(6, "E8 witness over every pair, 50-pair spot check"):
        exp = load_expected("E8")
        verdicts = square_commutativity(e8, mode="witness", budget=100_000)
        assert len(verdicts) == 110 * 111 // 2
        unrefuted = {v.pair for v in verdicts if v.square_commute is None}
        assert not any(v.square_commute for v in verdicts)
        support = {a for p in unrefuted for a in p}
        keys = {}
        for c in sorted(support):
            r = table_row(e8, c, route="cycles")
            keys[c] = (r.order, r.nu1, r.nu2)
            e8.release_centralizer(c)
        f = match_pair_families([(unrefuted, exp.pairs["square_comm"])], keys, exp.label_keys())
        assert f is not None
        image = {tuple(sorted((f[a], f[b]))) for a, b in exp.pairs["square_comm"]}
        # independent draws on 50 random pairs agree with membership in the image of B
        rng = random.Random(50)
        for i, j in rng.sample(all_pairs(e8), 50):
            v = pair_commutativity(e8, i, j, mode="witness", budget=100_000, seed=1)
            assert (v.square_commute is False) == ((i, j) not in image)


def test_c3_table_e8(e8):
    if not EXTENDED:
        skipped(3, "E8", "full E8 table runs with WEYLNICHOLS_EXTENDED=1")
        pytest.skip("full E8 table runs with WEYLNICHOLS_EXTENDED=1")
    with part(3, "E8 (extended)"):
        rows = minus_one_table(e8, extended=True)
        cmp = compare_rows(rows, load_expected("E8").keys)
        assert cmp.ok and cmp.skipped == 0, (cmp.missing, cmp.unexpected)


# ---------------------------------------------------------------- summary

def test_zz_summary(capsys):
    lines = []
    for n in range(1, 11):
        parts = RESULTS.get(n, [])
        states = {s for _, s, _ in parts}
        status = "FAIL" if "FAIL" in states else "PASS" if parts else "NOT RUN"
        detail = "; ".join(f"{label} {s} ({info})" for label, s, info in parts)
        lines.append(f"criterion {n:2d} {TITLES[n]}: {status} - {detail}")
    with capsys.disabled():
        print()
        for line in lines:
            print(line)
