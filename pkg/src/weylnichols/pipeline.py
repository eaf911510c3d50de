"""Shared per-group state: root system, chain, classes and centralizer data."""

from __future__ import annotations

import gc
import os
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

from .cache import class_cache_path, read_class_cache, write_class_cache
from .chartab import CharacterTable, character_table
from .classes import (
    ENUMERATION_LIMIT, ClassData, centralizer, centralizer_elements, classes_from_store, conjugacy_classes,
    discover_classes, storable, subgroup_classes, subgroup_from_elements, weyl_generators,
)
from .perm import Permutation, PermGroup, group_from_generators
from .rootsys import ExcType, RootSystem, build_root_system
from .store import enumerate_group

Log = Optional[Callable[[str], None]]


@dataclass
class CentralizerData:
    """C_G(s) for a class representative s, with its own class data and table."""

    class_id: int
    rep: Permutation
    group: PermGroup
    cd: ClassData
    s_class: int
    ct: Optional[CharacterTable] = None

    @property
    def order(self) -> int:
        return self.group.order

    def shift_permutation(self) -> list[int]:
        """Class permutation C -> sC of the centralizer (s is central there)."""
        s = self.rep
        return [self.cd.class_of(s * c.representative) for c in self.cd.classes]


@dataclass
class WeylContext:
    etype: ExcType
    rs: RootSystem
    group: PermGroup
    cd: ClassData
    seed: int
    centralizers: dict[int, CentralizerData] = field(default_factory=dict)
    primes: dict[int, int] = field(default_factory=dict)
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def label(self) -> str:
        return self.etype.label

    @property
    def enumerated(self) -> bool:
        return self.cd.store is not None

    def central_classes(self) -> list[int]:
        return [c.id for c in self.cd.classes if c.size == 1 and c.order > 1]

    def centralizer(self, c: int, with_table: bool = True, limit: int = ENUMERATION_LIMIT,
                    log: Log = None) -> CentralizerData:
        with self._lock:
            data = self.centralizers.get(c)
            if data is None:
                data = _build_centralizer(self, c, limit, log)
                self.centralizers[c] = data
            if with_table and data.ct is None:
                data.ct = character_table(data.cd)
                self.primes[c] = data.ct.prime
            return data

    def release_centralizer(self, c: int) -> None:
        with self._lock:
            self.centralizers.pop(c, None)
        gc.collect()


def _build_centralizer(ctx: WeylContext, c: int, limit: int, log: Log) -> CentralizerData:
    cls = ctx.cd.classes[c]
    rep = cls.representative
    if cls.size == 1:
        h, hcd = ctx.group, ctx.cd
    elif ctx.enumerated:
        idx = centralizer_elements(ctx.cd, rep)
        h = subgroup_from_elements(ctx.cd.store, idx, seed=ctx.seed, known_gens=[rep])
        hcd = subgroup_classes(ctx.cd, h, idx)
    else:
        h = centralizer(ctx.group, rep, ctx.cd, seed=ctx.seed)
        if log:
            log(f"centralizer of class {c} has order {h.order}")
        if storable(h.order, h.degree, limit):
            hcd = classes_from_store(ctx.rs, h, enumerate_group(h, ctx.rs.rank))
        else:
            hcd = discover_classes(ctx.rs, h, seed=ctx.seed, log=log, strict=False)
    s_class = hcd.class_of(rep)
    if hcd.classes[s_class].size != 1:
        raise RuntimeError("representative is not central in its centralizer")
    return CentralizerData(c, rep, h, hcd, s_class)


def get_group_order(label: str) -> int:
    """|W| from a stabilizer chain alone, without classes."""
    rs = build_root_system(ExcType.parse(label))
    return group_from_generators(weyl_generators(rs), base_hint=range(rs.rank)).order


_CONTEXTS: dict[tuple[str, int], WeylContext] = {}


def get_context(label: str, seed: int = 0, log: Log = None, draw_budget: int = 400_000,
                cache_dir: Optional[os.PathLike] = None) -> WeylContext:
    """Root system, group and classes for a type, memoized per (type, seed).

    With ``cache_dir``, class data of non-enumerated groups is read from and
    written to a versioned cache file there.
    """
    key = (label.upper(), seed)
    ctx = _CONTEXTS.get(key)
    if ctx is None:
        etype = ExcType.parse(label)
        rs = build_root_system(etype)
        g = group_from_generators(weyl_generators(rs), seed=seed, base_hint=range(rs.rank))
        cd = None
        path = None
        if cache_dir is not None and not storable(g.order, g.degree):
            path = class_cache_path(cache_dir, etype.label, seed)
            cd = read_class_cache(path, rs, g)
            if cd is not None and log:
                log(f"classes of {etype.label} read from {path}")
        if cd is None:
            cd = conjugacy_classes(g, rs, seed=seed, draw_budget=draw_budget, log=log)
            if path is not None:
                write_class_cache(path, cd)
        ctx = WeylContext(etype, rs, g, cd, seed)
        _CONTEXTS[key] = ctx
    return ctx


def clear_contexts(label: Optional[str] = None) -> None:
    for key in list(_CONTEXTS):
        if label is None or key[0] == label.upper():
            del _CONTEXTS[key]
    gc.collect()
