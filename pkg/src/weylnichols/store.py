"""Enumerated element stores: whole groups held as arrays of root permutations.

An element is identified by its images of the simple roots (the first
``rank`` root indices), packed into a uint64 key.  Stores keep every element
as a full uint8 row of root images so that products and conjugates are plain
gathers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .perm import Permutation, PermGroup

CHUNK = 1 << 19


def pack_keys(images: np.ndarray) -> np.ndarray:
    """uint64 keys from an (N, rank) array of simple-root images."""
    images = np.asarray(images, dtype=np.uint64)
    key = np.zeros(images.shape[0], dtype=np.uint64)
    for j in range(images.shape[1]):
        key |= images[:, j] << np.uint64(8 * j)
    return key


def unpack_keys(keys: np.ndarray, rank: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.uint64)
    return np.stack([(keys >> np.uint64(8 * j)) & np.uint64(255) for j in range(rank)], axis=1).astype(np.uint8)


def perm_key(p: Permutation, rank: int) -> int:
    return int(sum(int(p.images[j]) << (8 * j) for j in range(rank)))


def inverse_rows(perms: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perms)
    rows = np.arange(perms.shape[0])[:, None]
    inv[rows, perms] = np.arange(perms.shape[1], dtype=perms.dtype)[None, :]
    return inv


@dataclass
class ElementStore:
    """All elements of a group given as rows of root images."""

    rank: int
    perms: np.ndarray
    keys: np.ndarray = field(init=False)
    sorter: np.ndarray = field(init=False)
    sorted_keys: np.ndarray = field(init=False)
    _invimg: Optional[np.ndarray] = field(default=None, init=False, repr=False)
    _inv_index: Optional[np.ndarray] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.keys = pack_keys(self.perms[:, : self.rank])
        self.sorter = np.argsort(self.keys, kind="stable")
        self.sorted_keys = self.keys[self.sorter]
        if np.any(self.sorted_keys[1:] == self.sorted_keys[:-1]):
            raise ValueError("duplicate elements in store")

    def __len__(self) -> int:
        return self.perms.shape[0]

    @property
    def degree(self) -> int:
        return self.perms.shape[1]

    def index_of(self, keys: np.ndarray, missing_ok: bool = False) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.uint64)
        if len(keys) > 4096:
            # sorted queries keep the binary searches cache friendly
            order = np.argsort(keys)
            pos = np.empty(len(keys), dtype=np.int64)
            pos[order] = np.searchsorted(self.sorted_keys, keys[order])
        else:
            pos = np.searchsorted(self.sorted_keys, keys)
        pos = np.minimum(pos, len(self) - 1)
        found = self.sorted_keys[pos] == keys
        idx = self.sorter[pos].astype(np.int64)
        if not missing_ok and not np.all(found):
            raise KeyError("element not in store")
        return np.where(found, idx, -1)

    def index_of_perm(self, p: Permutation) -> int:
        return int(self.index_of(np.array([perm_key(p, self.rank)], dtype=np.uint64))[0])

    def perm(self, i: int) -> Permutation:
        return Permutation._trusted(self.perms[i].tolist())

    @property
    def invimg(self) -> np.ndarray:
        """(N, rank) images of the simple roots under each inverse."""
        if self._invimg is None:
            out = np.empty((len(self), self.rank), dtype=np.uint8)
            for a in range(0, len(self), CHUNK):
                out[a:a + CHUNK] = inverse_rows(self.perms[a:a + CHUNK])[:, : self.rank]
            self._invimg = out
        return self._invimg

    @property
    def inv_index(self) -> np.ndarray:
        if self._inv_index is None:
            self._inv_index = self.index_of(pack_keys(self.invimg))
        return self._inv_index

    # batch products; every result is returned as keys

    def left_mul_keys(self, p: np.ndarray, idx: Optional[np.ndarray] = None) -> np.ndarray:
        """Keys of p * h for h in the store (or the rows idx)."""
        rows = self.perms[:, : self.rank] if idx is None else self.perms[idx, : self.rank]
        return pack_keys(p[rows])

    def right_mul_keys(self, p: np.ndarray, idx: Optional[np.ndarray] = None) -> np.ndarray:
        """Keys of h * p."""
        cols = p[: self.rank]
        rows = self.perms[:, cols] if idx is None else self.perms[np.asarray(idx)[:, None], cols[None, :]]
        return pack_keys(rows)

    def conj_by_keys(self, k: np.ndarray, idx: Optional[np.ndarray] = None) -> np.ndarray:
        """Keys of k * h * k^-1 for a fixed root permutation k."""
        kinv = np.argsort(k)
        cols = kinv[: self.rank]
        out = []
        if idx is None:
            for a in range(0, len(self), CHUNK):
                out.append(pack_keys(k[self.perms[a:a + CHUNK][:, cols]]))
            return np.concatenate(out)
        idx = np.asarray(idx)
        for a in range(0, len(idx), CHUNK):
            sub = idx[a:a + CHUNK]
            out.append(pack_keys(k[self.perms[sub[:, None], cols[None, :]]]))
        return np.concatenate(out) if out else np.zeros(0, dtype=np.uint64)

    def conjugates_of(self, x: np.ndarray, idx: Optional[np.ndarray] = None) -> np.ndarray:
        """Keys of h * x * h^-1 for h in the store (or rows idx)."""
        idx = np.arange(len(self)) if idx is None else np.asarray(idx)
        out = []
        for a in range(0, len(idx), CHUNK):
            sub = idx[a:a + CHUNK]
            inner = x[self.invimg[sub].astype(np.int64)]
            out.append(pack_keys(np.take_along_axis(self.perms[sub], inner, axis=1)))
        return np.concatenate(out) if out else np.zeros(0, dtype=np.uint64)

    def commuting_mask(self, x: np.ndarray) -> np.ndarray:
        xkey = pack_keys(x[None, : self.rank])[0]
        return self.conjugates_of(x) == xkey


def enumerate_group(group: PermGroup, rank: int) -> ElementStore:
    """All elements as products t_0 t_1 ... t_{L-1} of chain transversal elements.

    Points 0..rank-1 must contain a base (true for simple roots).
    """
    deg = group.degree
    if deg > 256:
        raise ValueError("stores hold uint8 root images")
    if not set(group.base) <= set(range(rank)):
        raise ValueError("store keys need the base inside the leading points")
    dtype = np.uint8
    cur = np.arange(deg, dtype=dtype)[None, :]
    for lv in reversed(group.levels):
        reps = [lv.transversal[pt] for pt in sorted(lv.transversal)]
        blocks = [np.asarray(t.images, dtype=dtype)[cur] for t in reps]
        cur = np.concatenate(blocks, axis=0)
        del blocks
    return ElementStore(rank, cur)


def store_from_perms(perms: Sequence[Permutation], rank: int) -> ElementStore:
    arr = np.array([p.images for p in perms], dtype=np.uint8)
    return ElementStore(rank, arr)
