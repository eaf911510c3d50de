"""Yetter-Drinfeld modules M(O_s, rho), their braidings and Nichols algebra dimensions.

Supported modules are those whose braiding is monomial in the natural basis:
any class with a linear character of its centralizer, and central classes
with any irreducible character (the class element acts by a scalar there).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Optional, Sequence, Union

from .exact import (
    INFINITE_ORDER, Cyclotomic, _power_table, as_cyclotomic, cyclo_root, is_real_negative_of_degree,
    multiplicative_order,
)
from .perm import Permutation
from .pipeline import WeylContext


class ScopeError(ValueError):
    """The requested module needs representation matrices of degree > 1."""


class SymmetrizerBudgetExceeded(RuntimeError):
    pass


def root_exponent(q) -> tuple[int, int]:
    """(n, k) with q = zeta_n**k and n the order of q."""
    q = as_cyclotomic(q)
    n = multiplicative_order(q)
    if n == INFINITE_ORDER:
        raise ValueError(f"{q!r} is not a root of unity")
    for k in range(n):
        if cyclo_root(n, k) == q:
            return n, k
    raise AssertionError("root of unity not located")


# ----------------------------------------------------------------- modules

@dataclass
class YDModule:
    """M(O_s, rho) with basis g_i (x) v_j, i over the class, j over rho."""

    class_id: int
    representative: Permutation
    cosets: list[Permutation]
    labels: list[Permutation]
    degree: int
    character: int
    central: bool
    value: Callable[[Permutation], Cyclotomic] = field(repr=False)
    central_set: frozenset = field(default=frozenset(), repr=False)
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {t.images: i for i, t in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise ValueError("coset representatives give repeated class elements")

    @property
    def dim(self) -> int:
        return len(self.cosets) * self.degree

    def label_of(self, a: int) -> Permutation:
        return self.labels[a // self.degree]

    def act(self, h: Permutation) -> tuple[list[int], list[Cyclotomic]]:
        """h on the basis: h . e_a = scalars[a] e_{targets[a]}."""
        if self.central:
            if self.degree > 1 and h.images not in self.central_set:
                raise ScopeError("a degree > 1 module is only scalar under central elements")
            q = self.value(h)
            return list(range(self.degree)), [q] * self.degree
        targets, scalars = [], []
        hinv = h.inverse()
        for i, g in enumerate(self.cosets):
            j = self._index[(h * self.labels[i] * hinv).images]
            gamma = self.cosets[j].inverse() * h * g
            targets.append(j)
            scalars.append(self.value(gamma))
        return targets, scalars


def coset_representatives(ctx: WeylContext, s: Permutation) -> tuple[list[Permutation], list[Permutation]]:
    """Breadth-first traversal of the class of s under simple-reflection conjugation.

    Returns conjugators g_i (g_1 = 1) and the class elements t_i = g_i s g_i^-1.
    """
    gens = [ctx.group.generators[k] for k in range(len(ctx.group.generators))]
    seen = {s.images: 0}
    cosets = [Permutation.identity(s.degree)]
    labels = [s]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for r in gens:
            t = r * labels[i] * r.inverse()
            if t.images not in seen:
                seen[t.images] = len(labels)
                labels.append(t)
                cosets.append(r * cosets[i])
                queue.append(len(labels) - 1)
    return cosets, labels


def build_yd_module(ctx: WeylContext, c: int, chi: int) -> YDModule:
    """M(O_s, chi) for s the representative of class c and chi a row of the centralizer table."""
    cls = ctx.cd.classes[c]
    cz = ctx.centralizer(c)
    ct = cz.ct
    deg = ct.degrees[chi]
    central = cls.size == 1
    if deg > 1 and not central:
        raise ScopeError(f"character of degree {deg} on the non-central class {c}")
    hcd = cz.cd

    def value(h: Permutation) -> Cyclotomic:
        k = hcd.class_of(h)
        return ct.values[chi][k] / deg

    if central:
        centre = frozenset(k.representative.images for k in hcd.classes if k.size == 1)
        return YDModule(c, cls.representative, [Permutation.identity(cls.representative.degree)],
                        [cls.representative], deg, chi, True, value, centre)
    cosets, labels = coset_representatives(ctx, cls.representative)
    if len(labels) != cls.size:
        raise RuntimeError("class traversal did not reach every class element")
    return YDModule(c, cls.representative, cosets, labels, 1, chi, False, value)


def scalar_module(q, dim: int = 1, label: Optional[Permutation] = None) -> YDModule:
    """A dim-dimensional space with braiding q * flip (a central class acting by q)."""
    q = as_cyclotomic(q)
    label = label or Permutation.identity(1)
    return YDModule(-1, label, [Permutation.identity(label.degree)], [label], dim, -1, True, lambda h: q,
                    frozenset([label.images]))


# ---------------------------------------------------------------- braidings

@dataclass
class BraidingMatrix:
    """Monomial braiding: c(e_a (x) e_b) = scal[a*d+b] * e_x (x) e_y with (x, y) = divmod(target, d)."""

    d: int
    target: list[int]
    scal: list[Cyclotomic]

    def apply(self, a: int, b: int) -> tuple[Cyclotomic, int, int]:
        k = a * self.d + b
        x, y = divmod(self.target[k], self.d)
        return self.scal[k], x, y

    def dense(self) -> list[list[Cyclotomic]]:
        """d^2 x d^2 matrix with column a*d+b holding c(e_a (x) e_b)."""
        n = self.d * self.d
        zero = Cyclotomic.rational(0)
        m = [[zero] * n for _ in range(n)]
        for k in range(n):
            m[self.target[k]][k] = self.scal[k]
        return m

    def is_invertible(self) -> bool:
        return sorted(self.target) == list(range(self.d * self.d)) and not any(q.is_zero() for q in self.scal)

    def _on_word(self, word: tuple, i: int) -> tuple[Cyclotomic, tuple]:
        q, x, y = self.apply(word[i], word[i + 1])
        return q, word[:i] + (x, y) + word[i + 2:]

    def braid_relation(self) -> bool:
        """(c (x) 1)(1 (x) c)(c (x) 1) == (1 (x) c)(c (x) 1)(1 (x) c) on every basis triple."""
        one = Cyclotomic.rational(1)
        for w in product(range(self.d), repeat=3):
            results = []
            for seq in ((0, 1, 0), (1, 0, 1)):
                q, word = one, w
                for i in seq:
                    s, word = self._on_word(word, i)
                    q = q * s
                results.append((q, word))
            if results[0] != results[1]:
                return False
        return True

    def square_is_identity(self, a: int, b: int) -> bool:
        q1, x, y = self.apply(a, b)
        q2, u, v = self.apply(x, y)
        return (u, v) == (a, b) and q1 * q2 == 1

    def diagonal_scalar(self, a: int) -> Optional[Cyclotomic]:
        """q with c(e_a (x) e_a) = q e_a (x) e_a, or None when not diagonal there."""
        q, x, y = self.apply(a, a)
        return q if (x, y) == (a, a) else None


@dataclass
class BraidedSpace:
    """Direct sum of modules with its braiding."""

    modules: list[YDModule]
    braiding: BraidingMatrix
    owner: list[tuple[int, int]]

    @property
    def dim(self) -> int:
        return self.braiding.d


def braiding_matrix(modules: Union[YDModule, Sequence[YDModule]]) -> BraidedSpace:
    """c(x (x) y) = (t_x . y) (x) x over the direct sum of the given modules."""
    if isinstance(modules, YDModule):
        modules = [modules]
    modules = list(modules)
    offsets = []
    owner = []
    total = 0
    for m_i, m in enumerate(modules):
        offsets.append(total)
        owner.extend((m_i, a) for a in range(m.dim))
        total += m.dim
    d = total
    target = [0] * (d * d)
    scal: list[Cyclotomic] = [None] * (d * d)
    actions: dict[tuple, tuple] = {}
    for a in range(d):
        ma, ia = owner[a]
        t = modules[ma].label_of(ia)
        for mb, m in enumerate(modules):
            key = (t.images, mb)
            if key not in actions:
                actions[key] = m.act(t)
            targets, scalars = actions[key]
            for ib in range(m.dim):
                b = offsets[mb] + ib
                target[a * d + b] = (offsets[mb] + targets[ib]) * d + a
                scal[a * d + b] = scalars[ib]
    return BraidedSpace(modules, BraidingMatrix(d, target, scal), owner)


# -------------------------------------------------------------- symmetrizer

@lru_cache(maxsize=None)
def _sym_schedule(k: int) -> tuple[tuple[int, int], ...]:
    """Sym(k) in breadth-first order from the identity under left multiplication
    by s_i, each element recorded as (parent position, i) along a reduced word."""
    start = tuple(range(k))
    order = [start]
    where = {start: 0}
    steps: list[tuple[int, int]] = [(-1, -1)]
    pos = 0
    while pos < len(order):
        w = order[pos]
        inv = {v: p for p, v in enumerate(w)}
        for i in range(k - 1):
            if inv[i] < inv[i + 1]:
                nw = tuple(i + 1 if v == i else i if v == i + 1 else v for v in w)
                if nw not in where:
                    where[nw] = len(order)
                    order.append(nw)
                    steps.append((pos, i))
        pos += 1
    return tuple(steps)


class _Ring:
    """Exponent arithmetic for roots of unity: values live in Z[x]/(x^L - 1)."""

    def __init__(self, scalars: Iterable[Cyclotomic]):
        exps = {}
        L = 1
        for q in scalars:
            key = (q.conductor, q.coeffs)
            if key not in exps:
                exps[key] = root_exponent(q)
                L = math.lcm(L, exps[key][0])
        self.L = L
        self._exp = {key: k * (L // n) for key, (n, k) in exps.items()}

    def exponent(self, q: Cyclotomic) -> int:
        return self._exp[(q.conductor, q.coeffs)]

    def to_field(self, vec: dict[int, int]):
        """Group-ring element {exponent: count} as an exact field element."""
        if self.L <= 2:
            return Fraction(sum(c if e == 0 else -c for e, c in vec.items()))
        table = _power_table(self.L)
        acc = [0] * len(table[0])
        for e, c in vec.items():
            row = table[e]
            for j, r in enumerate(row):
                acc[j] += c * r
        return Cyclotomic(self.L, acc, reduced=True)


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, Cyclotomic) else x == 0


def exact_rank(columns: Iterable[dict]) -> int:
    """Rank of sparse columns {row: field element} by incremental elimination.

    Each new pivot row is reduced against all earlier ones, so reducing in
    insertion order never reintroduces an eliminated coordinate.
    """
    pivots: dict = {}
    order: list = []
    for col in columns:
        v = {r: x for r, x in col.items() if not _is_zero(x)}
        for p in order:
            if p in v:
                f = v[p]
                for r, x in pivots[p].items():
                    nv = v.get(r, 0) - f * x
                    if _is_zero(nv):
                        v.pop(r, None)
                    else:
                        v[r] = nv
        if v:
            p = min(v)
            inv = 1 / v[p]
            pivots[p] = {r: x * inv for r, x in v.items()}
            order.append(p)
    return len(order)


@dataclass
class NicholsDims:
    dims: list[int]
    complete: bool
    budget: int
    work: int

    @property
    def total(self) -> Optional[int]:
        return sum(self.dims) if self.complete else None

    def to_json(self) -> dict:
        return {"graded_dims": self.dims, "total_or_open": self.total if self.complete else "open",
                "budget": self.budget}


def _word_blocks(b: BraidingMatrix, k: int) -> list[list[tuple]]:
    """Orbits of length-k words under the basis moves of c at every position."""
    seen: set = set()
    blocks = []
    for w in product(range(b.d), repeat=k):
        if w in seen:
            continue
        block = [w]
        seen.add(w)
        pos = 0
        while pos < len(block):
            u = block[pos]
            pos += 1
            for i in range(k - 1):
                _, x, y = b.apply(u[i], u[i + 1])
                v = u[:i] + (x, y) + u[i + 2:]
                if v not in seen:
                    seen.add(v)
                    block.append(v)
        blocks.append(block)
    return blocks


def symmetrizer_column(b: BraidingMatrix, ring: _Ring, u: tuple) -> dict[tuple, dict[int, int]]:
    """S_k(u) = sum over w in Sym(k) of T_w(u), T_w from a reduced word of w."""
    k = len(u)
    sched = _sym_schedule(k)
    vals: list[tuple[int, tuple]] = [(0, u)]
    out: dict[tuple, dict[int, int]] = {u: {0: 1}}
    L = ring.L
    for parent, i in sched[1:]:
        e, word = vals[parent]
        q, x, y = b.apply(word[i], word[i + 1])
        e = (e + ring.exponent(q)) % L
        word = word[:i] + (x, y) + word[i + 2:]
        vals.append((e, word))
        acc = out.setdefault(word, {})
        acc[e] = acc.get(e, 0) + 1
    return out


def nichols_graded_dims(b: BraidingMatrix, max_degree: int = 6, budget: int = 2_000_000) -> NicholsDims:
    """dim B^k = rank of the quantum symmetrizer on V^(x)k for k <= max_degree.

    Stops early at the first vanishing degree (then every higher degree
    vanishes too).  ``budget`` bounds the number of T_w evaluations.
    """
    ring = _Ring(b.scal)
    dims = [1]
    work = 0
    for k in range(1, max_degree + 1):
        if k == 1:
            dims.append(b.d)
            if b.d == 0:
                return NicholsDims(dims, True, budget, work)
            continue
        need = b.d ** k * math.factorial(k)
        if work + need > budget:
            raise SymmetrizerBudgetExceeded(f"degree {k} needs {need} evaluations; budget {budget} (used {work})")
        work += need
        rank = 0
        for block in _word_blocks(b, k):
            cols = []
            for u in block:
                col = symmetrizer_column(b, ring, u)
                cols.append({w: ring.to_field(v) for w, v in col.items()})
            rank += exact_rank(cols)
        dims.append(rank)
        if rank == 0:
            return NicholsDims(dims, True, budget, work)
    return NicholsDims(dims, False, budget, work)


# ---------------------------------------------------------------- predicates

@dataclass
class SymmetryReport:
    q: list[list[Cyclotomic]]
    orders: list[Union[int, float]]
    symmetric: bool
    weakly_symmetric: bool
    central_qls: bool
    braiding_agrees: bool

    def to_json(self) -> dict:
        return {"q": [[str(x) for x in row] for row in self.q],
                "orders": [o if o != INFINITE_ORDER else "inf" for o in self.orders],
                "symmetric": self.symmetric, "weakly_symmetric": self.weakly_symmetric,
                "central_qls": self.central_qls, "braiding_agrees": self.braiding_agrees}


def quantum_symmetry_predicates(modules: Sequence[YDModule]) -> SymmetryReport:
    """q_{C,D} = scalar of the C-module at g_D; tests q_{C,D} q_{D,C} = 1 and 1 < ord(q_{C,C}) < inf.

    For non-central linear modules the pairwise condition is commutation of
    the class elements together with the cocycle product being 1, evaluated
    basis vector by basis vector.  ``braiding_agrees`` confirms that the
    predicate matches c^2 = id on the assembled braiding.
    """
    space = braiding_matrix(modules)
    br = space.braiding
    n = len(modules)
    if all(m.central for m in modules):
        q = [[modules[a].value(modules[b].representative) for b in range(n)] for a in range(n)]
        orders = [multiplicative_order(q[a][a]) for a in range(n)]
        pair_ok = [[q[a][b] * q[b][a] == 1 for b in range(n)] for a in range(n)]
        symmetric = all(all(row) for row in pair_ok)
        weakly = all(pair_ok[a][b] for a in range(n) for b in range(n) if a != b)
        qls = symmetric and all(1 < o < INFINITE_ORDER for o in orders)
        agrees = True
        for x in range(br.d):
            for y in range(br.d):
                a, b = space.owner[x][0], space.owner[y][0]
                if br.square_is_identity(x, y) != pair_ok[a][b]:
                    agrees = False
        return SymmetryReport(q, orders, symmetric, weakly, qls, agrees)
    if any(m.central and m.degree > 1 for m in modules):
        raise ScopeError("mixed central modules of degree > 1 with non-central classes")
    # linear modules: the scalar at (x, y) is the cocycle value of t_x acting on y
    one = Cyclotomic.rational(1)
    q = [[one] * n for _ in range(n)]
    orders = []
    for a, m in enumerate(modules):
        diag = br.diagonal_scalar(_offset(space, a))
        orders.append(multiplicative_order(diag) if diag is not None else INFINITE_ORDER)
    symmetric = True
    weakly = True
    agrees = True
    for x in range(br.d):
        for y in range(br.d):
            ma, ia = space.owner[x]
            mb, ib = space.owner[y]
            tx = modules[ma].label_of(ia)
            ty = modules[mb].label_of(ib)
            commute = tx * ty == ty * tx
            ok = False
            if commute:
                tb, sb = modules[mb].act(tx)
                ta, sa = modules[ma].act(ty)
                ok = tb[ib] == ib and ta[ia] == ia and sb[ib] * sa[ia] == 1
            if br.square_is_identity(x, y) != ok:
                agrees = False
            symmetric &= ok
            if ma != mb:
                weakly &= ok
    qls = symmetric and all(1 < o < INFINITE_ORDER for o in orders)
    return SymmetryReport(q, orders, symmetric, weakly, qls, agrees)


def _offset(space: BraidedSpace, m: int) -> int:
    return next(a for a, (mi, _) in enumerate(space.owner) if mi == m)


def pbw_dimension(space: BraidedSpace) -> Union[int, float]:
    """prod over basis vectors of ord(q_xx) for a diagonal braiding with q_xy q_yx = 1 (x != y);
    INFINITE_ORDER when the space is not of generalized quantum linear type."""
    br = space.braiding
    total = 1
    for x in range(br.d):
        qx = br.diagonal_scalar(x)
        if qx is None:
            return INFINITE_ORDER
        for y in range(br.d):
            if x != y and not br.square_is_identity(x, y):
                return INFINITE_ORDER
            q, u, v = br.apply(x, y)
            if (u, v) != (y, x):
                return INFINITE_ORDER
        n = multiplicative_order(qx)
        if not 1 < n < INFINITE_ORDER:
            return INFINITE_ORDER
        total *= n
    return total


def pbw_graded_dims(space: BraidedSpace, max_degree: int) -> list[int]:
    """Graded dimensions of the PBW basis: coefficients of prod_x (1 + t + ... + t^(N_x - 1))."""
    poly = [1]
    br = space.braiding
    for x in range(br.d):
        n = multiplicative_order(br.diagonal_scalar(x))
        new = [0] * (len(poly) + n - 1)
        for i, c in enumerate(poly):
            for j in range(n):
                new[i + j] += c
        poly = new
    poly = poly + [0] * (max_degree + 1 - len(poly))
    return poly[: max_degree + 1]


@dataclass(frozen=True)
class QLSEntry:
    class_size: int
    degree: int
    value: Cyclotomic
    multiplicity: int = 1


def central_qls_dimension(entries: Iterable[QLSEntry]) -> int:
    """2 ** sum(deg * |C| * multiplicity) for central classes with -1-type characters."""
    exponent = 0
    for e in entries:
        if e.class_size != 1:
            raise ValueError("central quantum linear spaces need central classes")
        if not is_real_negative_of_degree(e.value, e.degree):
            raise ValueError(f"character value {e.value!r} is not -{e.degree}: not of -1-type, "
                             "so the Nichols algebra is infinite dimensional")
        exponent += e.degree * e.class_size * e.multiplicity
    return 2 ** exponent
