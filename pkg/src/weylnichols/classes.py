"""Conjugacy classes, centralizers, power maps and class orbits under automorphisms.

Two strategies share one ClassData type:

* enumerated groups (order up to 10**7) are partitioned by connected
  components of the conjugation graph on generators;
* larger groups use a point stabilizer H = G_b that is enumerated instead.
  With transversal elements t_r (t_r(b) = r) and S_x = {h x h^-1 : h in H},
  y is conjugate to x iff t_r^-1 y t_r lies in S_x for some r, and
  |C_G(x)| = #{r : t_r^-1 x t_r in S_x} * |H| / |S_x|.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from collections import OrderedDict, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .perm import Permutation, PermGroup, contains, element_order, group_from_generators
from .rootsys import RootSystem, diagram_automorphism, permutation_matrix, simple_reflection
from .store import ElementStore, enumerate_group, pack_keys, perm_key

ENUMERATION_LIMIT = 10 ** 7
# an enumerated store keeps one byte per root per element; enumeration
# needs a few times that again in temporaries
STORE_BYTES = 640 << 20


def storable(order: int, degree: int, limit: int = ENUMERATION_LIMIT) -> bool:
    """Whether a group of this order and permutation degree may be enumerated."""
    return order <= limit and order * degree <= STORE_BYTES


class ClassBudgetExceeded(RuntimeError):
    pass


class UnresolvedCollision(RuntimeError):
    pass


# ------------------------------------------------------------ fingerprints

@dataclass(frozen=True)
class Fingerprint:
    order: int
    charpoly: tuple[int, ...]
    cycle_type: tuple[int, ...]
    traces: tuple[int, ...]

    def serialize(self) -> bytes:
        return json.dumps([self.order, self.charpoly, self.cycle_type, self.traces], separators=(",", ":")).encode()

    def digest(self) -> str:
        return hashlib.sha256(self.serialize()).hexdigest()[:16]


def charpoly_from_traces(traces: Sequence[int], n: int) -> tuple[int, ...]:
    """det(xI - M) from power traces (Newton identities); highest degree first."""
    e = [1]
    for k in range(1, n + 1):
        s = 0
        for i in range(1, k + 1):
            s += (-1) ** (i - 1) * e[k - i] * traces[i - 1]
        if s % k:
            raise ArithmeticError("non-integral elementary symmetric function")
        e.append(s // k)
    return tuple((-1) ** k * e[k] for k in range(n + 1))


def fingerprint(rs: RootSystem, p: Permutation) -> Fingerprint:
    m = permutation_matrix(rs, p)
    ct = p.cycle_type()
    order = math.lcm(*ct)
    traces = []
    cur = np.eye(rs.rank, dtype=np.int64)
    for _ in range(max(order, rs.rank)):
        cur = cur @ m
        traces.append(int(np.trace(cur)))
    cp = charpoly_from_traces(traces, rs.rank)
    return Fingerprint(order, cp, ct, tuple(traces[:order]))


# -------------------------------------------------------------- class data

@dataclass
class ConjClass:
    id: int
    representative: Permutation
    size: int
    fingerprint: Fingerprint
    centralizer_order: int

    @property
    def order(self) -> int:
        return self.fingerprint.order


@dataclass
class ClassData:
    group: PermGroup
    rs: RootSystem
    classes: list[ConjClass]
    power_maps: list[list[int]]
    inverse_map: list[int]
    group_order: int
    store: Optional[ElementStore] = field(default=None, repr=False)
    labels: Optional[np.ndarray] = field(default=None, repr=False)
    engine: Optional["StabilizerConjugacy"] = field(default=None, repr=False)
    _buckets: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def sizes(self) -> list[int]:
        return [c.size for c in self.classes]

    @property
    def orders(self) -> list[int]:
        return [c.order for c in self.classes]

    @property
    def exponent(self) -> int:
        return math.lcm(*self.orders)

    @property
    def identity_class(self) -> int:
        return next(c.id for c in self.classes if c.order == 1)

    def power(self, c: int, k: int) -> int:
        pm = self.power_maps[c]
        return pm[k % len(pm)]

    def class_of(self, p: Permutation) -> int:
        if self.labels is not None:
            idx = self.store.index_of_perm(p)
            if idx < 0:
                raise KeyError("element not in group")
            return int(self.labels[idx])
        return self.engine.class_of(p, self)

    def class_of_keys(self, keys: np.ndarray) -> np.ndarray:
        if self.labels is None:
            raise ValueError("batch lookup needs an enumerated group")
        return self.labels[self.store.index_of(keys)]

    def class_elements(self, c: int) -> np.ndarray:
        if self.labels is None:
            raise ValueError("class enumeration needs an enumerated group")
        return np.nonzero(self.labels == c)[0]

    def to_json(self) -> dict:
        return {
            "group": self.rs.etype.label,
            "order": str(self.group_order),
            "classes": [
                {"id": c.id, "order": c.order, "size": c.size, "centralizer_order": c.centralizer_order,
                 "fingerprint_hash": c.fingerprint.digest()}
                for c in self.classes
            ],
            "power_maps": self.power_maps,
        }


# ----------------------------------------------------- enumerated classes

def conjugation_components(store: ElementStore, gens: Sequence[np.ndarray]) -> np.ndarray:
    """Component label of each element under conjugation by the generators."""
    n = len(store)
    src = np.arange(n, dtype=np.int64)
    rows, cols = [], []
    for g in gens:
        rows.append(src)
        cols.append(store.index_of(store.conj_by_keys(np.asarray(g))))
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(n, n)).tocsr()
    _, labels = connected_components(graph, directed=True, connection="weak")
    return labels.astype(np.int32)


def classes_from_store(rs: RootSystem, group: PermGroup, store: ElementStore,
                       gens: Optional[Sequence[Permutation]] = None) -> ClassData:
    """Classes of an enumerated group; labels sorted by (order, size, fingerprint)."""
    gens = list(gens if gens is not None else group.generators)
    comp = conjugation_components(store, [np.array(g.images, dtype=np.int64) for g in gens])
    ncomp = int(comp.max()) + 1
    sizes = np.bincount(comp, minlength=ncomp)
    by = np.lexsort((store.keys, comp))
    first = np.searchsorted(comp[by], np.arange(ncomp))
    rep_idx = by[first]
    n = len(store)
    items = []
    for c in range(ncomp):
        rep = store.perm(int(rep_idx[c]))
        fp = fingerprint(rs, rep)
        items.append((fp.order, int(sizes[c]), fp.serialize(), int(store.keys[rep_idx[c]]), c, rep, fp))
    items.sort(key=lambda t: t[:4])
    relabel = np.empty(ncomp, dtype=np.int32)
    classes = []
    for new, (_, size, _, _, old, rep, fp) in enumerate(items):
        relabel[old] = new
        classes.append(ConjClass(new, rep, size, fp, n // size))
    labels = relabel[comp]
    cd = ClassData(group, rs, classes, [], [], n, store=store, labels=labels)
    _fill_power_maps(cd)
    return cd


def _fill_power_maps(cd: ClassData) -> None:
    cd.power_maps = []
    for c in cd.classes:
        row = []
        p = Permutation.identity(c.representative.degree)
        for _ in range(c.order):
            row.append(cd.class_of(p))
            p = p * c.representative
        cd.power_maps.append(row)
    cd.inverse_map = [cd.power(c.id, -1) for c in cd.classes]


# ------------------------------------------------- stabilizer-coset engine

def _chain_tail(group: PermGroup) -> PermGroup:
    return PermGroup(group.degree, list(group.levels[1].gens), group.levels[1:], group.seed)


class StabilizerConjugacy:
    """Exact conjugacy and centralizer orders through an enumerated point stabilizer."""

    def __init__(self, rs: RootSystem, group: PermGroup, cache_bytes: int = 1 << 29):
        if group.levels[0].point != 0:
            raise ValueError("first base point must be root 0")
        self.rs = rs
        self.group = group
        self.stab_group = _chain_tail(group)
        self.stab = enumerate_group(self.stab_group, rs.rank)
        lv = group.levels[0]
        self.orbit = sorted(lv.transversal)
        self.trans = np.array([lv.transversal[r].images for r in self.orbit], dtype=np.int64)
        self.trans_inv = np.argsort(self.trans, axis=1)
        self._cache: OrderedDict[int, tuple[np.ndarray, int]] = OrderedDict()
        self._cache_bytes = cache_bytes

    @property
    def stab_order(self) -> int:
        return len(self.stab)

    def _conjugate_set(self, x: Permutation) -> tuple[np.ndarray, int]:
        key = perm_key(x, self.rs.rank)
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            return hit
        arr = np.array(x.images, dtype=np.int64)
        conj = self.stab.conjugates_of(arr)
        fixed = int(np.count_nonzero(conj == np.uint64(key)))
        uniq = np.unique(conj)
        del conj
        self._cache[key] = (uniq, fixed)
        while sum(v[0].nbytes for v in self._cache.values()) > self._cache_bytes and len(self._cache) > 1:
            self._cache.popitem(last=False)
        return uniq, fixed

    def _coset_conjugates(self, y: Permutation) -> np.ndarray:
        """Keys of t_r^-1 y t_r for every orbit point r."""
        yarr = np.array(y.images, dtype=np.int64)
        inner = yarr[self.trans[:, : self.rs.rank]]
        return pack_keys(np.take_along_axis(self.trans_inv, inner, axis=1))

    def _hits(self, y: Permutation, x: Permutation) -> np.ndarray:
        uniq, _ = self._conjugate_set(x)
        ck = self._coset_conjugates(y)
        pos = np.minimum(np.searchsorted(uniq, ck), len(uniq) - 1)
        return uniq[pos] == ck

    def centralizer_order(self, x: Permutation) -> int:
        uniq, fixed = self._conjugate_set(x)
        return int(np.count_nonzero(self._hits(x, x))) * fixed

    def is_conjugate(self, y: Permutation, x: Permutation) -> bool:
        return bool(np.any(self._hits(y, x)))

    def conjugator(self, y: Permutation, x: Permutation) -> Optional[Permutation]:
        """Some g with g y g^-1 = x, or None."""
        hits = np.nonzero(self._hits(y, x))[0]
        if hits.size == 0:
            return None
        r = int(hits[0])
        t = Permutation._trusted(self.trans[r].tolist())
        target = t.inverse() * y * t
        conj = self.stab.conjugates_of(np.array(x.images, dtype=np.int64))
        h_idx = int(np.nonzero(conj == np.uint64(perm_key(target, self.rs.rank)))[0][0])
        h = self.stab.perm(h_idx)
        # target = h x h^-1, so x = (t h)^-1 y (t h)
        return (t * h).inverse()

    def centralizer_generators(self, x: Permutation, rng: random.Random, extra: int = 12) -> list[Permutation]:
        """Random elements of C_G(x) built from both factors of the coset formula."""
        arr = np.array(x.images, dtype=np.int64)
        conj = self.stab.conjugates_of(arr)
        xkey = np.uint64(perm_key(x, self.rs.rank))
        inside = np.nonzero(conj == xkey)[0]
        gens = [self.stab.perm(int(i)) for i in rng.sample(list(inside), min(extra, len(inside)))]
        hits = np.nonzero(self._hits(x, x))[0]
        for r in rng.sample(list(hits), min(extra, len(hits))):
            t = Permutation._trusted(self.trans[r].tolist())
            target = perm_key(t.inverse() * x * t, self.rs.rank)
            cand = np.nonzero(conj == np.uint64(target))[0]
            h = self.stab.perm(int(cand[rng.randrange(len(cand))]))
            gens.append(t * h)
        return [g for g in gens if not g.is_identity()]

    def class_of(self, p: Permutation, cd: ClassData) -> int:
        fp = fingerprint(self.rs, p)
        for c in cd._buckets.get(fp, ()):
            if self.is_conjugate(p, cd.classes[c].representative):
                return c
        raise UnresolvedCollision(f"no class matches element with fingerprint {fp.digest()}")


def _reflection_perms(rs: RootSystem) -> list[Permutation]:
    pos = [k for k in range(rs.nroots) if (rs.roots[k] >= 0).all()]
    b = rs.form
    out = []
    for k in pos:
        beta = rs.roots[k]
        norm = int(beta @ b @ beta)
        coef = 2 * (rs.roots @ b @ beta) // norm
        imgs = rs.roots - coef[:, None] * beta[None, :]
        out.append(Permutation(tuple(rs.root_index[tuple(v)] for v in imgs.tolist())))
    return out


def reflection_profile(rs: RootSystem, p: Permutation) -> tuple[tuple[int, int], ...]:
    """Multiset of orders of p*t over all reflections t (a class invariant)."""
    orders: dict[int, int] = defaultdict(int)
    for t in _reflection_perms(rs):
        orders[element_order(p * t)] += 1
    return tuple(sorted(orders.items()))


def discover_classes(rs: RootSystem, group: PermGroup, seed: int = 0, draw_budget: int = 400_000,
                     engine: Optional[StabilizerConjugacy] = None,
                     log: Optional[Callable[[str], None]] = None, strict: bool = True) -> ClassData:
    """Random-search class discovery for groups too large to enumerate.

    Seeds: the classes of the enumerated stabilizer, their products with the
    centre, and powers of every new representative; then uniform random
    draws until the class sizes add up to |G|.  With ``strict`` off, classes
    that no invariant separates (possible in proper subgroups, where fused
    classes share a fingerprint) keep their discovery order.
    """
    engine = engine or StabilizerConjugacy(rs, group)
    order = group.order
    degree = group.degree
    reps: list[Permutation] = []
    fps: list[Fingerprint] = []
    cents: list[int] = []
    buckets: dict[Fingerprint, list[int]] = defaultdict(list)
    total = 0
    z = _central_involution(rs, group)

    def consider(p: Permutation) -> None:
        nonlocal total
        fp = fingerprint(rs, p)
        for c in buckets.get(fp, ()):
            if engine.is_conjugate(p, reps[c]):
                return
        cent = engine.centralizer_order(p)
        reps.append(p)
        fps.append(fp)
        cents.append(cent)
        buckets[fp].append(len(reps) - 1)
        total += order // cent
        queue.extend(p ** k for k in range(2, fp.order) if fp.order % k == 0)
        if z is not None:
            queue.append(z * p)

    queue: list[Permutation] = [Permutation.identity(degree)]
    stab_cd = classes_from_store(rs, engine.stab_group, engine.stab)
    queue.extend(c.representative for c in stab_cd.classes)
    del stab_cd
    while queue and total < order:
        consider(queue.pop(0))
    rng = random.Random(seed)
    draws = 0
    while total < order:
        if draws >= draw_budget:
            raise ClassBudgetExceeded(f"{len(reps)} classes covering {total} of {order} elements after {draws} draws")
        draws += 1
        consider(group.uniform_element(rng))
        while queue and total < order:
            consider(queue.pop(0))
    if total != order:
        raise ClassBudgetExceeded(f"class sizes sum to {total}, not {order}")
    if log:
        log(f"{len(reps)} classes after {draws} random draws")
    return assemble_classes(rs, group, engine, reps, fps, cents, strict)


def assemble_classes(rs, group, engine, reps, fps, cents, strict=True,
                     power_maps: Optional[list[list[int]]] = None) -> ClassData:
    order = group.order
    keyed = []
    for i, (p, fp, c) in enumerate(zip(reps, fps, cents)):
        keyed.append([fp.order, order // c, fp.serialize(), None, i])
    # ties on the first three entries are split by the reflection profile
    groups = defaultdict(list)
    for item in keyed:
        groups[tuple(item[:3])].append(item)
    for items in groups.values():
        if len(items) > 1:
            for item in items:
                item[3] = reflection_profile(rs, reps[item[4]])
            if strict and len({tuple(item[3]) for item in items}) < len(items):
                raise UnresolvedCollision("classes share every recorded invariant")
    keyed.sort(key=lambda t: (t[0], t[1], t[2], t[3] or (), t[4]))
    classes = []
    buckets: dict[Fingerprint, list[int]] = defaultdict(list)
    for new, item in enumerate(keyed):
        i = item[4]
        classes.append(ConjClass(new, reps[i], order // cents[i], fps[i], cents[i]))
        buckets[fps[i]].append(new)
    cd = ClassData(group, rs, classes, [], [], order, engine=engine)
    cd._buckets = dict(buckets)
    if power_maps is None:
        _fill_power_maps(cd)
    else:
        cd.power_maps = [list(row) for row in power_maps]
        cd.inverse_map = [cd.power(c.id, -1) for c in cd.classes]
    return cd


def _central_involution(rs: RootSystem, group: PermGroup) -> Optional[Permutation]:
    """-1 as a root permutation when it lies in the group."""
    minus = Permutation(tuple(rs.negative_index(k) for k in range(rs.nroots)))
    return minus if contains(group, minus) else None


def weyl_generators(rs: RootSystem) -> list[Permutation]:
    return [simple_reflection(rs, i) for i in range(rs.rank)]


def conjugacy_classes(g: PermGroup, rs: RootSystem, seed: int = 0, draw_budget: int = 400_000,
                      log: Optional[Callable[[str], None]] = None) -> ClassData:
    """Complete class list, enumerating the group when it is ``storable``."""
    if storable(g.order, g.degree):
        return classes_from_store(rs, g, enumerate_group(g, rs.rank))
    return discover_classes(rs, g, seed=seed, draw_budget=draw_budget, log=log)


# ------------------------------------------------------------ centralizers

def centralizer_elements(cd: ClassData, x: Permutation) -> np.ndarray:
    """Store indices of C_G(x) in an enumerated group."""
    return np.nonzero(cd.store.commuting_mask(np.array(x.images, dtype=np.int64)))[0]


def subgroup_from_elements(store: ElementStore, idx: np.ndarray, seed: int = 0,
                           known_gens: Sequence[Permutation] = ()) -> PermGroup:
    """PermGroup for a subgroup given by its elements; random generators until the order matches."""
    rng = random.Random(seed)
    target = len(idx)
    gens = [g for g in known_gens if not g.is_identity()]
    if target == 1:
        ident = Permutation.identity(store.degree)
        return PermGroup(store.degree, [ident], [], seed)
    while True:
        for _ in range(2 if gens else 3):
            gens.append(store.perm(int(idx[rng.randrange(target)])))
        gens = [g for g in gens if not g.is_identity()]
        if not gens:
            continue
        h = group_from_generators(gens, seed=seed, base_hint=range(store.rank))
        if h.order == target:
            return h
        if h.order > target:
            raise ValueError("generated subgroup exceeds the element list")


def centralizer(g: PermGroup, x: Permutation, cd: Optional[ClassData] = None, seed: int = 0) -> PermGroup:
    """C_G(x) with exact order."""
    if cd is not None and cd.store is not None:
        idx = centralizer_elements(cd, x)
        return subgroup_from_elements(cd.store, idx, seed=seed, known_gens=[x])
    if cd is not None and cd.engine is not None:
        engine = cd.engine
        target = engine.centralizer_order(x)
        rng = random.Random(seed)
        gens = [x]
        while True:
            gens += engine.centralizer_generators(x, rng, extra=4)
            h = group_from_generators([p for p in gens if not p.is_identity()] or [x], seed=seed,
                                      base_hint=range(cd.rs.rank))
            if h.order == target:
                return h
    # brute force over a chain enumeration
    if g.order > 10 ** 5:
        raise ClassBudgetExceeded("brute-force centralizer needs |G| <= 10**5 or class data")
    rank = max(g.base) + 1 if g.base else 1
    store = enumerate_group(g, rank)
    idx = np.nonzero(store.commuting_mask(np.array(x.images, dtype=np.int64)))[0]
    return subgroup_from_elements(store, idx, seed=seed, known_gens=[x])


def subgroup_classes(cd: ClassData, h: PermGroup, idx: np.ndarray) -> ClassData:
    """Classes of a subgroup of an enumerated group (elements given by store rows)."""
    if len(idx) == len(cd.store):
        return cd
    sub = ElementStore(cd.store.rank, cd.store.perms[idx])
    return classes_from_store(cd.rs, h, sub)


# ------------------------------------------------------ class-level queries

def is_real_class(cd: ClassData, c: int) -> bool:
    return cd.inverse_map[c] == c


def center(g: PermGroup, cd: ClassData) -> set[int]:
    del g
    return {c.id for c in cd.classes if c.size == 1}


def automorphism_action_on_classes(cd: ClassData, phi: Permutation) -> list[int]:
    """Class permutation induced by x -> phi x phi^-1 for a root bijection phi."""
    phi_inv = phi.inverse()
    out = []
    for c in cd.classes:
        out.append(cd.class_of(phi * c.representative * phi_inv))
    if sorted(out) != list(range(len(cd))):
        raise ValueError("map does not permute the classes")
    return out


def reduced_word(rs: RootSystem, p: Permutation) -> list[int]:
    """A reduced word (s_{i1} ... s_{ik}) for a Weyl group element, via descents."""
    word = []
    gens = weyl_generators(rs)
    pos = [bool((rs.roots[k] >= 0).all()) for k in range(rs.nroots)]
    while True:
        for i in range(rs.rank):
            if not pos[p.images[i]]:
                p = p * gens[i]
                word.append(i)
                break
        else:
            break
    if not p.is_identity():
        raise ValueError("not an element of the Weyl group")
    return word[::-1]


def linear_characters(rs: RootSystem) -> list[tuple[int, ...]]:
    """Z/2-valued homomorphisms, as the set of simple-reflection indices sent to 1."""
    cartan = rs.cartan
    # simple reflections are conjugate iff joined by a path of odd (simply laced) bonds
    parent = list(range(rs.rank))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for i in range(rs.rank):
        for j in range(rs.rank):
            if i != j and cartan[i][j] * cartan[j][i] == 1:
                parent[find(i)] = find(j)
    blocks = defaultdict(list)
    for i in range(rs.rank):
        blocks[find(i)].append(i)
    blocks = sorted(blocks.values())
    out = []
    for mask in range(1 << len(blocks)):
        out.append(tuple(sorted(i for b, block in enumerate(blocks) if mask >> b & 1 for i in block)))
    return out


def linear_character_value(rs: RootSystem, support: Sequence[int], p: Permutation) -> int:
    word = reduced_word(rs, p)
    return sum(1 for i in word if i in set(support)) % 2


def central_automorphisms(cd: ClassData) -> list[list[int]]:
    """Class permutations of x -> x z^f(x) for Z/2-characters f with f(z) = 0."""
    rs = cd.rs
    z_ids = [c.id for c in cd.classes if c.size == 1 and c.order == 2]
    if not z_ids:
        return []
    z = cd.classes[z_ids[0]].representative
    out = []
    for support in linear_characters(rs):
        if not support or linear_character_value(rs, support, z):
            continue
        perm = []
        for c in cd.classes:
            x = c.representative
            perm.append(cd.class_of(z * x) if linear_character_value(rs, support, x) else c.id)
        out.append(perm)
    return out


def iso_conjugacy_representatives(cd: ClassData, autos: Iterable[Sequence[int]]) -> list[list[int]]:
    """Orbits of class ids under the group generated by the given class permutations."""
    parent = list(range(len(cd)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for perm in autos:
        for c, d in enumerate(perm):
            parent[find(c)] = find(d)
    orbits = defaultdict(list)
    for c in range(len(cd)):
        orbits[find(c)].append(c)
    return sorted(orbits.values())


def iso_conjugacy_orbits(cd: ClassData) -> list[list[int]]:
    """Classes grouped by automorphisms: the diagram symmetry (when there is
    one) together with the central automorphisms."""
    autos = central_automorphisms(cd)
    try:
        phi = diagram_automorphism(cd.rs)
    except ValueError:
        phi = None
    if phi is not None:
        autos.append(automorphism_action_on_classes(cd, phi))
    return iso_conjugacy_representatives(cd, autos)
