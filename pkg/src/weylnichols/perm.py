"""Permutations and a base/strong-generating-set backbone.

Products compose right to left: ``(p * q)(x) = p(q(x))``.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

CACHE_MAGIC = "weylnichols-cache"
CACHE_SCHEMA = 1


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError("images do not form a bijection")

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(degree)))

    @classmethod
    def _trusted(cls, images: Sequence[int]) -> "Permutation":
        p = object.__new__(cls)
        object.__setattr__(p, "images", tuple(images))
        return p

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        a = self.images
        return Permutation._trusted([a[i] for i in other.images])

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation._trusted(inv)

    def __pow__(self, k: int) -> "Permutation":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = Permutation.identity(self.degree)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycle_type(self) -> tuple[int, ...]:
        seen = [False] * self.degree
        lengths = []
        for start in range(self.degree):
            if not seen[start]:
                n = 0
                x = start
                while not seen[x]:
                    seen[x] = True
                    x = self.images[x]
                    n += 1
                lengths.append(n)
        return tuple(sorted(lengths))

    def conjugate(self, h: "Permutation") -> "Permutation":
        """h * self * h^-1."""
        return h * self * h.inverse()

    def array(self) -> np.ndarray:
        return np.array(self.images, dtype=np.int64)


def element_order(p: Permutation) -> int:
    return math.lcm(*p.cycle_type()) if p.degree else 1


# ------------------------------------------------------------------- BSGS

@dataclass
class _Level:
    point: int
    gens: list[Permutation]
    transversal: dict[int, Permutation] = field(default_factory=dict)

    def rebuild(self, degree: int) -> None:
        ident = Permutation.identity(degree)
        trans = {self.point: ident}
        frontier = [self.point]
        while frontier:
            nxt = []
            for x in frontier:
                tx = trans[x]
                for g in self.gens:
                    y = g(x)
                    if y not in trans:
                        trans[y] = g * tx
                        nxt.append(y)
            frontier = nxt
        self.transversal = trans


@dataclass
class PermGroup:
    degree: int
    generators: list[Permutation]
    levels: list[_Level]
    seed: int = 0

    @property
    def base(self) -> list[int]:
        return [lv.point for lv in self.levels]

    @property
    def order(self) -> int:
        return math.prod(len(lv.transversal) for lv in self.levels)

    def sift(self, p: Permutation, start: int = 0) -> tuple[Permutation, int]:
        """Strip p through the chain; returns the residue and the level reached."""
        for k in range(start, len(self.levels)):
            lv = self.levels[k]
            img = p(lv.point)
            t = lv.transversal.get(img)
            if t is None:
                return p, k
            p = t.inverse() * p
        return p, len(self.levels)

    def transversal_product(self, choices: Sequence[int]) -> Permutation:
        """Element t_0(choices[0]) * t_1(choices[1]) * ... using orbit positions."""
        p = Permutation.identity(self.degree)
        for lv, c in zip(self.levels, choices):
            pts = sorted(lv.transversal)
            p = p * lv.transversal[pts[c]]
        return p

    def uniform_element(self, rng: random.Random) -> Permutation:
        """Exactly uniform element: a product of one random coset rep per level."""
        p = Permutation.identity(self.degree)
        for lv in self.levels:
            pts = sorted(lv.transversal)
            p = p * lv.transversal[pts[rng.randrange(len(pts))]]
        return p

    def uniform_batch(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n uniform elements as rows of images, built level by level."""
        cur = np.tile(np.arange(self.degree, dtype=np.int64), (n, 1))
        for lv in reversed(self.levels):
            pts = sorted(lv.transversal)
            table = np.array([lv.transversal[q].images for q in pts], dtype=np.int64)
            pick = table[rng.integers(0, len(pts), size=n)]
            cur = np.take_along_axis(pick, cur, axis=1)
        return cur


def _check_degree(gens: Sequence[Permutation]) -> int:
    if not gens:
        raise ValueError("need at least one generator")
    degree = gens[0].degree
    if any(g.degree != degree for g in gens):
        raise ValueError("generators have different degrees")
    return degree


def _add_residue(group: PermGroup, residue: Permutation, level: int) -> None:
    """Insert a residue fixing the first `level` base points as a strong generator."""
    if level == len(group.levels):
        moved = next(i for i, j in enumerate(residue.images) if i != j)
        group.levels.append(_Level(moved, []))
    for k in range(level + 1):
        group.levels[k].gens.append(residue)
        group.levels[k].rebuild(group.degree)


class ProductReplacer:
    """Product replacement random elements, deterministic for a given seed."""

    def __init__(self, gens: Sequence[Permutation], seed: int, slots: int = 10, warmup: int = 60):
        degree = _check_degree(gens)
        self.rng = random.Random(seed)
        state = list(gens)
        while len(state) < slots:
            state += list(gens)
        self.state = state[:max(slots, len(gens))]
        self.acc = Permutation.identity(degree)
        for _ in range(warmup):
            self.next()

    def next(self) -> Permutation:
        n = len(self.state)
        i = self.rng.randrange(n)
        j = self.rng.randrange(n - 1)
        if j >= i:
            j += 1
        if self.rng.random() < 0.5:
            self.state[i] = self.state[i] * self.state[j]
        else:
            self.state[i] = self.state[j] * self.state[i]
        self.acc = self.acc * self.state[i]
        return self.acc


def group_from_generators(gens: Sequence[Permutation], seed: int = 0, base_hint: Optional[Iterable[int]] = None,
                          quiet_rounds: int = 30) -> PermGroup:
    """Randomized Schreier-Sims, then a deterministic Schreier-generator check."""
    degree = _check_degree(gens)
    gens = [g for g in gens if not g.is_identity()]
    group = PermGroup(degree, list(gens), [], seed)
    for b in base_hint or ():
        group.levels.append(_Level(b, []))
    for g in gens:
        res, k = group.sift(g)
        if not res.is_identity():
            _add_residue(group, res, k)
    for lv in group.levels:
        lv.rebuild(degree)
    if gens:
        pr = ProductReplacer(gens, seed)
        quiet = 0
        while quiet < quiet_rounds:
            res, k = group.sift(pr.next())
            if res.is_identity():
                quiet += 1
            else:
                quiet = 0
                _add_residue(group, res, k)
    _verify(group)
    group.levels = [lv for lv in group.levels if len(lv.transversal) > 1 or lv.gens]
    return group


def _verify(group: PermGroup) -> None:
    changed = True
    while changed:
        changed = False
        for k in range(len(group.levels) - 1, -1, -1):
            lv = group.levels[k]
            for x, tx in list(lv.transversal.items()):
                for s in lv.gens:
                    y = s(x)
                    schreier = lv.transversal[y].inverse() * s * tx
                    res, j = group.sift(schreier, k + 1)
                    if not res.is_identity():
                        _add_residue(group, res, j)
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break


def contains(g: PermGroup, p: Permutation) -> bool:
    if p.degree != g.degree:
        raise ValueError("degree mismatch")
    res, _ = g.sift(p)
    return res.is_identity()


def random_element(g: PermGroup, stream: ProductReplacer) -> Permutation:
    """Next product-replacement element from a caller-owned seed stream."""
    del g
    return stream.next()


# ------------------------------------------------------------------ cache

def write_cache(path: Path, kind: str, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {"magic": CACHE_MAGIC, "schema": CACHE_SCHEMA, "kind": kind}
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        json.dump(payload, fh, sort_keys=True)
    tmp.replace(path)


def read_cache(path: Path, kind: str) -> Optional[dict]:
    path = Path(path)
    if not path.exists():
        return None
    with open(path) as fh:
        try:
            header = json.loads(fh.readline())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not a cache file") from exc
        if header.get("magic") != CACHE_MAGIC:
            raise ValueError(f"{path}: bad magic header")
        if header.get("schema") != CACHE_SCHEMA or header.get("kind") != kind:
            raise ValueError(f"{path}: cache schema {header.get('schema')}/{header.get('kind')} "
                             f"does not match {CACHE_SCHEMA}/{kind}; refusing to load")
        return json.load(fh)


def group_to_record(g: PermGroup) -> dict:
    return {
        "degree": g.degree,
        "seed": g.seed,
        "order": str(g.order),
        "generators": [list(p.images) for p in g.generators],
        "base": g.base,
        "strong_generators": [[list(p.images) for p in lv.gens] for lv in g.levels],
    }


def group_from_record(rec: dict) -> PermGroup:
    degree = rec["degree"]
    levels = []
    for b, sgens in zip(rec["base"], rec["strong_generators"]):
        lv = _Level(b, [Permutation(tuple(x)) for x in sgens])
        lv.rebuild(degree)
        levels.append(lv)
    g = PermGroup(degree, [Permutation(tuple(x)) for x in rec["generators"]], levels, rec["seed"])
    if str(g.order) != rec["order"]:
        raise ValueError("cached chain does not reproduce the recorded order")
    return g
