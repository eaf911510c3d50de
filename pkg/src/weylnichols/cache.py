"""Versioned on-disk cache for class data and per-class table rows.

Files use the magic/schema header of ``perm.write_cache``; readers refuse
anything else.  Only data that is expensive to recompute is kept:
class representatives with their centralizer orders and power maps
(restored through the canonical ordering used by discovery, with every
power-map entry checked against fingerprints) and finished table rows.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Optional

from .classes import ClassData, StabilizerConjugacy, assemble_classes, fingerprint
from .perm import Permutation, PermGroup, read_cache, write_cache
from .rootsys import RootSystem


class CacheError(RuntimeError):
    """Unreadable, foreign or mismatched cache file."""


def _write(path: Path, kind: str, label: str, payload: dict) -> None:
    write_cache(path, kind, {"group": label, "data": payload})


def _read(path: Path, kind: str, label: str) -> Optional[dict]:
    try:
        doc = read_cache(path, kind)
    except (OSError, ValueError) as exc:
        raise CacheError(str(exc)) from None
    if doc is None:
        return None
    if doc.get("group") != label:
        raise CacheError(f"{path}: holds {kind} for {doc.get('group')}, not {label}")
    return doc["data"]


def class_cache_path(cache_dir: os.PathLike, label: str, seed: int) -> Path:
    return Path(cache_dir) / f"{label}-classes-seed{seed}.json"


def rows_cache_path(cache_dir: os.PathLike, label: str, seed: int) -> Path:
    return Path(cache_dir) / f"{label}-rows-seed{seed}.json"


def write_class_cache(path: os.PathLike, cd: ClassData) -> None:
    payload = {
        "order": str(cd.group_order),
        "representatives": [list(c.representative.images) for c in cd.classes],
        "centralizer_orders": [str(c.centralizer_order) for c in cd.classes],
        "power_maps": cd.power_maps,
    }
    _write(Path(path), "classes", cd.rs.etype.label, payload)


def read_class_cache(path: os.PathLike, rs: RootSystem, group: PermGroup) -> Optional[ClassData]:
    """Class data rebuilt around a fresh conjugacy engine, or None when absent."""
    payload = _read(Path(path), "classes", rs.etype.label)
    if payload is None:
        return None
    if int(payload["order"]) != group.order:
        raise CacheError(f"{path}: group order {payload['order']} does not match {group.order}")
    reps = [Permutation(tuple(r)) for r in payload["representatives"]]
    cents = [int(c) for c in payload["centralizer_orders"]]
    if sum(group.order // c for c in cents) != group.order:
        raise CacheError(f"{path}: class sizes do not add up to the group order")
    fps = [fingerprint(rs, p) for p in reps]
    cd = assemble_classes(rs, group, StabilizerConjugacy(rs, group), reps, fps, cents,
                          power_maps=payload["power_maps"])
    if [list(c.representative.images) for c in cd.classes] != payload["representatives"]:
        raise CacheError(f"{path}: class order differs from the canonical order")
    for c, row in zip(cd.classes, cd.power_maps):
        if len(row) != c.order:
            raise CacheError(f"{path}: power map of class {c.id} has the wrong length")
        p = Permutation.identity(group.degree)
        for k, target in enumerate(row):
            if fingerprint(rs, p) != cd.classes[target].fingerprint:
                raise CacheError(f"{path}: power map of class {c.id} fails at exponent {k}")
            p = p * c.representative
    return cd


def read_rows(path: os.PathLike, label: str) -> dict[str, dict]:
    return _read(Path(path), "rows", label) or {}


def write_rows(path: os.PathLike, label: str, rows: dict[str, dict]) -> None:
    _write(Path(path), "rows", label, rows)
