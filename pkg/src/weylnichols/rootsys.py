"""Root systems of exceptional type in simple-root coordinates."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .perm import Permutation


class ExcType(enum.Enum):
    G2 = ("G2", 2)
    F4 = ("F4", 4)
    E6 = ("E6", 6)
    E7 = ("E7", 7)
    E8 = ("E8", 8)

    def __init__(self, label: str, rank: int):
        self.label = label
        self.rank = rank

    @classmethod
    def parse(cls, name: str) -> "ExcType":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown type {name!r}; expected one of G2, F4, E6, E7, E8") from None


# A[i][j] = <alpha_i^vee, alpha_j>, Bourbaki numbering (0-based here).
def _simply_laced(rank: int, edges: list[tuple[int, int]]) -> tuple[tuple[int, ...], ...]:
    a = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]
    for i, j in edges:
        a[i][j] = a[j][i] = -1
    return tuple(tuple(r) for r in a)


CARTAN: dict[ExcType, tuple[tuple[int, ...], ...]] = {
    ExcType.G2: ((2, -3), (-1, 2)),
    ExcType.F4: ((2, -1, 0, 0), (-1, 2, -1, 0), (0, -2, 2, -1), (0, 0, -1, 2)),
    ExcType.E6: _simply_laced(6, [(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)]),
    ExcType.E7: _simply_laced(7, [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 3)]),
    ExcType.E8: _simply_laced(8, [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]),
}

# squared lengths (alpha_i, alpha_i)/2 making D*A symmetric
SYMMETRIZER: dict[ExcType, tuple[int, ...]] = {
    ExcType.G2: (1, 3),
    ExcType.F4: (2, 2, 1, 1),
    ExcType.E6: (1,) * 6,
    ExcType.E7: (1,) * 7,
    ExcType.E8: (1,) * 8,
}

# node permutations of the Dynkin diagram automorphisms used for class orbits
DIAGRAM_SYMMETRY: dict[ExcType, tuple[int, ...]] = {
    ExcType.G2: (1, 0),
    ExcType.F4: (3, 2, 1, 0),
    ExcType.E6: (5, 1, 4, 3, 2, 0),
}


@dataclass(frozen=True)
class RootSystem:
    etype: ExcType
    cartan: np.ndarray
    roots: np.ndarray
    root_index: dict[tuple[int, ...], int] = field(repr=False)

    @property
    def rank(self) -> int:
        return self.etype.rank

    @property
    def nroots(self) -> int:
        return len(self.roots)

    @property
    def form(self) -> np.ndarray:
        """Symmetrized bilinear form B = D * Cartan on simple-root coordinates."""
        return np.diag(SYMMETRIZER[self.etype]) @ self.cartan

    def pairing(self, beta: np.ndarray, i: int) -> int:
        """<beta, alpha_i^vee>."""
        return int(self.cartan[i] @ beta)

    def reflect(self, beta: np.ndarray, i: int) -> np.ndarray:
        out = np.array(beta, dtype=np.int64)
        out[i] -= self.pairing(beta, i)
        return out

    def negative_index(self, k: int) -> int:
        return self.root_index[tuple(-self.roots[k])]


@lru_cache(maxsize=None)
def build_root_system(etype: ExcType) -> RootSystem:
    """Reflection closure of the simple roots, ordered breadth-first.

    Level 0 is the simple roots in index order; every later level holds the
    roots first reached from the previous one, sorted lexicographically.
    """
    rank = etype.rank
    cartan = np.array(CARTAN[etype], dtype=np.int64)
    simple = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    seen = set(simple)
    order = list(simple)
    frontier = simple
    while frontier:
        nxt = set()
        for beta in frontier:
            b = np.array(beta)
            for i in range(rank):
                img = list(beta)
                img[i] -= int(cartan[i] @ b)
                t = tuple(img)
                if t not in seen:
                    nxt.add(t)
        frontier = sorted(nxt)
        seen.update(frontier)
        order.extend(frontier)
    roots = np.array(order, dtype=np.int64)
    roots.setflags(write=False)
    cartan.setflags(write=False)
    return RootSystem(etype, cartan, roots, {r: k for k, r in enumerate(order)})


def simple_reflection(rs: RootSystem, i: int) -> Permutation:
    if not 0 <= i < rs.rank:
        raise IndexError(f"simple reflection index {i} out of range for rank {rs.rank}")
    images = rs.roots.copy()
    images[:, i] -= rs.roots @ rs.cartan[i]
    return Permutation(tuple(rs.root_index[tuple(v)] for v in images.tolist()))


def reflection_matrix(rs: RootSystem, i: int) -> np.ndarray:
    """Matrix of s_i acting on column vectors of simple-root coordinates."""
    if not 0 <= i < rs.rank:
        raise IndexError(f"simple reflection index {i} out of range for rank {rs.rank}")
    m = np.eye(rs.rank, dtype=np.int64)
    m[i] -= rs.cartan[i]
    return m


def matrix_of(rs: RootSystem, word: list[int]) -> np.ndarray:
    """Product s_{w0} s_{w1} ... as an integer matrix (rightmost acts first)."""
    m = np.eye(rs.rank, dtype=np.int64)
    for i in word:
        m = m @ reflection_matrix(rs, i)
    return m


def word_permutation(rs: RootSystem, word: list[int]) -> Permutation:
    p = Permutation.identity(rs.nroots)
    for i in word:
        p = p * simple_reflection(rs, i)
    return p


def permutation_matrix(rs: RootSystem, p: Permutation) -> np.ndarray:
    """Integer matrix whose columns are the images of the simple roots."""
    return rs.roots[list(p.images[: rs.rank])].T.copy()


def matrix_permutation(rs: RootSystem, m: np.ndarray) -> Permutation:
    images = (rs.roots @ np.asarray(m).T).tolist()
    try:
        return Permutation(tuple(rs.root_index[tuple(v)] for v in images))
    except KeyError:
        raise ValueError("matrix does not permute the roots") from None


def diagram_automorphism(rs: RootSystem) -> Permutation:
    """Root permutation induced by the nontrivial Dynkin diagram symmetry.

    For F4 and G2 the node swap exchanges long and short roots, so the map is
    beta -> beta^vee written in the coroot basis and then relabelled, which is
    a bijection of the root list but not a linear map.
    """
    sigma = DIAGRAM_SYMMETRY.get(rs.etype)
    if sigma is None:
        raise ValueError(f"{rs.etype.label} has no nontrivial diagram symmetry")
    d = np.array(SYMMETRIZER[rs.etype], dtype=np.int64)
    images = []
    for beta in rs.roots:
        norm = int(beta @ rs.form @ beta) // 2  # (beta, beta)/2 in units of D
        coroot = beta * d  # coordinates of beta^vee scaled by (beta, beta)/2
        if np.any(coroot % norm):
            raise ValueError("non-integral coroot")
        img = np.zeros(rs.rank, dtype=np.int64)
        for i in range(rs.rank):
            img[sigma[i]] = coroot[i] // norm
        images.append(rs.root_index[tuple(img.tolist())])
    return Permutation(tuple(images))
