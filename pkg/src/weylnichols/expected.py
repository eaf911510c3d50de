"""Bundled reference data: -1-type rows, group facts and class-pair sets.

Each CSV row carries a provenance column so a transcription slip can be
traced to its source row.  Class labels ``sN`` are source labels; they are
only ever compared to computed classes through invariants.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional


@dataclass(frozen=True)
class ExpectedRow:
    label: int
    order: int
    nu1: int
    nu2: int
    minus_one_count: int
    provenance: str

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.order, self.nu1, self.nu2, self.minus_one_count)


@dataclass
class ExpectedTable:
    group: str
    rows: list[ExpectedRow]
    order: int
    nroots: int
    nclasses: int
    center: list[int]
    central_qls_count: int
    commuting_pairs: Optional[str] = None
    iso_orbits: Optional[int] = None
    iso_reps: Optional[list[int]] = None
    pairs: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    provenance: str = ""

    @property
    def keys(self) -> list[tuple[int, int, int, int]]:
        return [r.key for r in self.rows]

    def label_keys(self) -> dict[int, tuple[int, int, int]]:
        """Source label -> (order, nu1, nu2)."""
        return {r.label: (r.order, r.nu1, r.nu2) for r in self.rows}


def _label(text: str) -> int:
    text = text.strip()
    if not text.startswith("s"):
        raise ValueError(f"bad class label {text!r}")
    return int(text[1:])


def _open(data_dir: Optional[os.PathLike], name: str):
    if data_dir is None:
        return resources.files("weylnichols").joinpath("data", name).open("r", newline="")
    return open(Path(data_dir) / name, "r", newline="")


def load_expected(group: str, data_dir: Optional[os.PathLike] = None) -> ExpectedTable:
    group = group.upper()
    with _open(data_dir, "groups.csv") as f:
        facts = {r["group"]: r for r in csv.DictReader(f)}
    if group not in facts:
        raise KeyError(f"no reference data for {group}")
    g = facts[group]
    with _open(data_dir, f"{group}_minus_one.csv") as f:
        rows = [ExpectedRow(_label(r["label"]), int(r["order"]), int(r["nu1"]), int(r["nu2"]),
                            int(r["minus_one_count"]), r["provenance"]) for r in csv.DictReader(f)]
    pairs: dict[str, list[tuple[int, int]]] = {}
    with _open(data_dir, "pairs.csv") as f:
        for r in csv.DictReader(f):
            if r["group"] == group:
                pairs.setdefault(r["kind"], []).append((int(r["i"]), int(r["j"])))
    return ExpectedTable(
        group=group,
        rows=rows,
        order=int(g["order"]),
        nroots=int(g["nroots"]),
        nclasses=int(g["classes"]),
        center=[_label(x) for x in g["center"].split()],
        central_qls_count=int(g["central_qls_count"]),
        commuting_pairs=g["commuting_pairs"] or None,
        iso_orbits=int(g["iso_orbits"]) if g["iso_orbits"] else None,
        iso_reps=[_label(x) for x in g["iso_reps"].split()] if g["iso_reps"] else None,
        pairs=pairs,
        provenance=g["provenance"],
    )
