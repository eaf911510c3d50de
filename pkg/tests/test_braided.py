import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weylnichols.braided import (
    BraidedSpace, BraidingMatrix, QLSEntry, ScopeError, SymmetrizerBudgetExceeded, braiding_matrix, build_yd_module,
    central_qls_dimension, exact_rank, nichols_graded_dims, pbw_dimension, pbw_graded_dims,
    quantum_symmetry_predicates, root_exponent, scalar_module,
)
from weylnichols.criteria import table_row
from weylnichols.exact import Cyclotomic, cyclo_root


def numeric(x: Cyclotomic) -> complex:
    z = np.exp(2j * np.pi / x.conductor)
    return complex(sum(float(c) * z ** k for k, c in enumerate(x.coeffs)))


# dense oracle: S_k = (S_{k-1} (x) 1)(1 + T_{k-1} + T_{k-1} T_{k-2} + ... + T_{k-1} ... T_1)

def dense_braiding(b: BraidingMatrix) -> np.ndarray:
    n = b.d * b.d
    m = np.zeros((n, n), dtype=complex)
    for k in range(n):
        m[b.target[k], k] = numeric(b.scal[k])
    return m


def dense_symmetrizer_ranks(b: BraidingMatrix, max_degree: int) -> list[int]:
    d = b.d
    c = dense_braiding(b)
    ranks = [1, d]
    sym = np.eye(d, dtype=complex)
    for k in range(2, max_degree + 1):
        # T_i acts on positions i, i+1 (1-based) of V^(x)k
        ts = [np.kron(np.kron(np.eye(d ** (i - 1)), c), np.eye(d ** (k - i - 1))) for i in range(1, k)]
        tail = np.eye(d ** k, dtype=complex)
        acc = np.eye(d ** k, dtype=complex)
        for i in range(k - 1, 0, -1):
            tail = tail @ ts[i - 1]
            acc = acc + tail
        sym = np.kron(sym, np.eye(d)) @ acc
        ranks.append(int(np.linalg.matrix_rank(sym, tol=1e-7)))
    return ranks


def diagonal_braiding(q: list[list]) -> BraidingMatrix:
    d = len(q)
    target = [b * d + a for a in range(d) for b in range(d)]
    scal = [q[a][b] for a in range(d) for b in range(d)]
    return BraidingMatrix(d, target, scal)


@st.composite
def quantum_linear(draw):
    """Diagonal braidings with q_xy q_yx = 1 off the diagonal and q_xx of finite order > 1."""
    d = draw(st.integers(1, 3))
    # keep the top degree (sum of ord(q_xx) - 1) at most 3 so the symmetrizer stays cheap
    diag = {1: [(2, 1), (3, 1), (4, 1), (4, 3)], 2: [(2, 1), (3, 1), (3, 2)], 3: [(2, 1)]}[d]
    q = [[None] * d for _ in range(d)]
    for a in range(d):
        q[a][a] = cyclo_root(*draw(st.sampled_from(diag)))
        for b in range(a + 1, d):
            z = cyclo_root(12, draw(st.integers(0, 11)))
            q[a][b], q[b][a] = z, z.inverse()
    return q


@given(quantum_linear())
@settings(max_examples=40, deadline=None)
def test_symmetrizer_matches_pbw_on_quantum_linear_spaces(q):
    b = diagonal_braiding(q)
    assert b.braid_relation()
    top = sum(root_exponent(q[a][a])[0] - 1 for a in range(len(q)))
    dims = nichols_graded_dims(b, max_degree=top + 1, budget=10 ** 7)
    assert dims.complete
    space = BraidedSpace([], b, [])
    assert dims.dims == pbw_graded_dims(space, len(dims.dims) - 1)
    assert dims.total == math.prod(root_exponent(q[a][a])[0] for a in range(len(q)))


@pytest.mark.parametrize("q,dim", [((2, 1), 2), ((2, 1), 3), ((3, 1), 1), ((3, 1), 2), ((4, 1), 2)])
def test_symmetrizer_against_dense_oracle(q, dim):
    b = braiding_matrix(scalar_module(cyclo_root(*q), dim)).braiding
    top = 4
    dims = nichols_graded_dims(b, max_degree=top, budget=10 ** 7)
    want = dense_symmetrizer_ranks(b, len(dims.dims) - 1)
    assert dims.dims == want


def test_exterior_algebra():
    b = braiding_matrix(scalar_module(-1, 3)).braiding
    dims = nichols_graded_dims(b, max_degree=5)
    assert dims.dims == [1, 3, 3, 1, 0] and dims.total == 8


def test_budget_is_enforced():
    b = braiding_matrix(scalar_module(-1, 3)).braiding
    with pytest.raises(SymmetrizerBudgetExceeded):
        nichols_graded_dims(b, max_degree=5, budget=100)


# modules of the Weyl groups

def linear_modules(ctx):
    for c in ctx.cd.classes:
        if c.size == 1:
            continue
        ct = ctx.centralizer(c.id).ct
        for x in range(len(ct)):
            if ct.degree(x) == 1:
                yield build_yd_module(ctx, c.id, x)


def test_g2_braidings_satisfy_the_braid_relation(g2):
    for m in linear_modules(g2):
        space = braiding_matrix(m)
        assert space.braiding.is_invertible()
        assert space.braiding.braid_relation()
        assert quantum_symmetry_predicates([m]).braiding_agrees


def test_g2_sum_of_two_modules_braids(g2):
    mods = list(linear_modules(g2))[:2]
    space = braiding_matrix(mods)
    assert space.dim == sum(m.dim for m in mods)
    assert space.braiding.braid_relation()


def test_g2_order_six_class(g2):
    """The rotation class {r, r^-1} with the character taking -1 at r."""
    c = next(k.id for k in g2.cd.classes if k.order == 6 and k.size == 2)
    row = table_row(g2, c)
    assert len(row.minus_one_characters) == 1
    m = build_yd_module(g2, c, row.minus_one_characters[0])
    space = braiding_matrix(m)
    assert space.dim == 2
    dims = nichols_graded_dims(space.braiding, max_degree=6)
    assert dims.dims == [1, 2, 1, 0] and dims.total == 4
    assert pbw_dimension(space) == 4
    assert dims.dims == dense_symmetrizer_ranks(space.braiding, 3)


@pytest.mark.parametrize("name", ["g2", "f4"])
def test_central_modules_three_routes(name, request):
    ctx = request.getfixturevalue(name)
    for c in ctx.central_classes():
        cz = ctx.centralizer(c)
        ct = cz.ct
        for x in table_row(ctx, c).minus_one_characters:
            m = build_yd_module(ctx, c, x)
            space = braiding_matrix(m)
            formula = central_qls_dimension([QLSEntry(1, ct.degree(x), ct.values[x][cz.s_class])])
            assert formula == 2 ** ct.degree(x)
            assert pbw_dimension(space) == formula
            report = quantum_symmetry_predicates([m])
            assert report.central_qls and report.symmetric and report.braiding_agrees
            if space.dim <= 4:
                assert nichols_graded_dims(space.braiding, max_degree=space.dim + 1).total == formula


def test_central_character_not_minus_one_is_refused(f4):
    c = f4.central_classes()[0]
    cz = f4.centralizer(c)
    x = next(x for x in range(len(cz.ct)) if cz.ct.values[x][cz.s_class] == cz.ct.degree(x))
    with pytest.raises(ValueError):
        central_qls_dimension([QLSEntry(1, cz.ct.degree(x), cz.ct.values[x][cz.s_class])])
    with pytest.raises(ValueError):
        central_qls_dimension([QLSEntry(2, 1, cyclo_root(2, 1))])


def test_non_linear_character_on_non_central_class_is_out_of_scope(f4):
    c = next(k for k in f4.cd.classes if k.size > 1 and max(f4.centralizer(k.id).ct.degrees) > 1)
    ct = f4.centralizer(c.id).ct
    x = next(x for x in range(len(ct)) if ct.degree(x) > 1)
    with pytest.raises(ScopeError):
        build_yd_module(f4, c.id, x)


def test_root_exponent():
    for n in (1, 2, 3, 4, 6, 12):
        for k in range(n):
            m, j = root_exponent(cyclo_root(n, k))
            assert cyclo_root(m, j) == cyclo_root(n, k) and m == n // math.gcd(n, k)
    with pytest.raises(ValueError):
        root_exponent(2)


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=5))
@settings(max_examples=80, deadline=None)
def test_exact_rank_against_numpy(cols):
    sparse = [{r: Fraction(v) for r, v in enumerate(col) if v} for col in cols]
    assert exact_rank(sparse) == np.linalg.matrix_rank(np.array(cols, dtype=float).T)


def test_exact_rank_over_cyclotomics():
    w = cyclo_root(3, 1)
    cols = [{0: w, 1: 1}, {0: w * w, 1: w}, {0: 1, 1: 1}]
    assert exact_rank(cols) == 2
    assert exact_rank(itertools.islice(cols, 2)) == 1
