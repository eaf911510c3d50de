"""Character tables by the Dixon-Schneider method.

Class matrices M_j[i][k] = a_ijk act on the column vector of central
character values w_k = |C_k| chi(g_k) / chi(1) by the eigenvalue w_j, so
the common eigenvectors over F_p recover every irreducible character.
Values are lifted to cyclotomic integers through eigenvalue multiplicities
computed from the power maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .classes import ClassData
from .exact import (
    Cyclotomic, _power_table, dixon_prime, modp_charpoly, modp_nullspace, modp_poly_roots, modp_rref,
    primitive_root,
)
from .store import pack_keys


class SplittingError(RuntimeError):
    pass


@dataclass
class CharacterTable:
    order: int
    exponent: int
    prime: int
    class_sizes: list[int]
    class_orders: list[int]
    inverse_map: list[int]
    power_maps: list[list[int]]
    degrees: list[int]
    counts: list[list[np.ndarray]] = field(repr=False)
    values: list[list[Cyclotomic]] = field(repr=False)
    modp: np.ndarray = field(repr=False)
    root: int = 0

    def __len__(self) -> int:
        return len(self.degrees)

    @property
    def nclasses(self) -> int:
        return len(self.class_sizes)

    def evaluate(self, chi: int, c: int) -> Cyclotomic:
        return self.values[chi][c]

    def degree(self, chi: int) -> int:
        return self.degrees[chi]

    def is_rational_column(self, c: int) -> bool:
        return all(self.values[x][c].is_rational() for x in range(len(self)))

    def to_json(self) -> dict:
        return {
            "order": str(self.order),
            "exponent": self.exponent,
            "prime": self.prime,
            "classes": [{"size": s, "order": o} for s, o in zip(self.class_sizes, self.class_orders)],
            "characters": [
                {"degree": d, "values": [v.to_json() for v in row]} for d, row in zip(self.degrees, self.values)
            ],
        }


# ------------------------------------------------------- class structure

def class_mult_coefficients(cd: ClassData, j: int) -> np.ndarray:
    """M with M[i][k] = #{(x, y) : x in C_i, y in C_j, x y = z_k}."""
    store = cd.store
    if store is None:
        raise ValueError("class multiplication needs an enumerated group")
    n = len(cd)
    elems = cd.class_elements(j)
    inv = store.inv_index[elems]
    m = np.zeros((n, n), dtype=np.int64)
    for k, c in enumerate(cd.classes):
        z = np.array(c.representative.images, dtype=np.int64)
        labels = cd.labels[store.index_of(pack_keys(z[store.perms[inv, : store.rank]]))]
        m[:, k] = np.bincount(labels, minlength=n)
    return m


def brute_class_algebra(cd: ClassData) -> np.ndarray:
    """a[i, j, k] from the full multiplication table (small groups only)."""
    store = cd.store
    n = len(cd)
    a = np.zeros((n, n, n), dtype=np.int64)
    reps = {store.index_of_perm(c.representative): c.id for c in cd.classes}
    for xi in range(len(store)):
        x = store.perms[xi]
        prods = store.index_of(pack_keys(x[store.perms[:, : store.rank]]))
        for yi, zi in enumerate(prods):
            k = reps.get(int(zi))
            if k is not None:
                a[cd.labels[xi], cd.labels[yi], k] += 1
    return a


# ------------------------------------------------------- Dixon-Schneider

def _echelon_basis(vectors: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Column basis B of the span with B[pivots] = identity."""
    red, piv = modp_rref(vectors.T, p)
    return red[: len(piv)].T.copy(), piv


def _split(spaces, m: np.ndarray, p: int):
    out = []
    for basis, piv in spaces:
        d = basis.shape[1]
        if d == 1:
            out.append((basis, piv))
            continue
        r = (m @ basis % p)[piv]
        diag = r[0, 0]
        if np.array_equal(r, (np.eye(d, dtype=np.int64) * diag) % p):
            out.append((basis, piv))
            continue
        roots = modp_poly_roots(modp_charpoly(r, p), p)
        total = 0
        for lam in roots:
            ker = modp_nullspace((r - lam * np.eye(d, dtype=np.int64)) % p, p)
            total += ker.shape[1]
            out.append(_echelon_basis(basis @ ker % p, p))
        if total != d:
            raise SplittingError("class matrix is not diagonalizable over F_p")
    return out


def character_table(cd: ClassData, matrix_of: Optional[Callable[[int], np.ndarray]] = None,
                    prime: Optional[int] = None) -> CharacterTable:
    """Exact character table of an enumerated group."""
    matrix_of = matrix_of or (lambda j: class_mult_coefficients(cd, j))
    n = len(cd)
    order = cd.group_order
    sizes = cd.sizes
    e = cd.exponent
    p = prime or dixon_prime(order, e)
    ident = cd.identity_class
    basis = np.eye(n, dtype=np.int64)
    spaces = [(basis, list(range(n)))]
    for j in sorted(range(n), key=lambda c: (sizes[c], c)):
        if all(b.shape[1] == 1 for b, _ in spaces):
            break
        if j == ident:
            continue
        spaces = _split(spaces, matrix_of(j) % p, p)
    if not all(b.shape[1] == 1 for b, _ in spaces):
        raise SplittingError("class matrices did not split the class algebra")

    inv_sizes = np.array([pow(s % p, -1, p) for s in sizes], dtype=np.int64)
    conj = cd.inverse_map
    root = primitive_root(p)
    zeta_e = pow(root, (p - 1) // e, p)
    rows = []
    for b, _ in spaces:
        w = b[:, 0] % p
        w = w * pow(int(w[ident]), -1, p) % p
        norm = int(np.sum(w * w[conj] % p * inv_sizes % p) % p)
        target = order % p * pow(norm, -1, p) % p
        ds = np.arange(1, math.isqrt(order) + 1, dtype=np.int64)
        ok = ds[(ds * ds % p == target) & (order % ds == 0)]
        if len(ok) != 1:
            raise SplittingError(f"degree recovery failed ({len(ok)} candidates)")
        d = int(ok[0])
        rows.append((d, w * d % p * inv_sizes % p))
    modp = np.array([r for _, r in rows], dtype=np.int64)
    degrees = [d for d, _ in rows]

    counts: list[list[np.ndarray]] = [[None] * n for _ in range(n)]
    values: list[list[Cyclotomic]] = [[None] * n for _ in range(n)]
    for k, c in enumerate(cd.classes):
        o = c.order
        zo = pow(zeta_e, e // o, p)
        pm = [cd.power(k, t) for t in range(o)]
        v = modp[:, pm]
        f = np.array([[pow(zo, (-l * t) % o, p) for l in range(o)] for t in range(o)], dtype=np.int64)
        mult = (v @ f) % p * pow(o, -1, p) % p
        for x in range(n):
            if np.any(mult[x] > degrees[x]):
                raise SplittingError("eigenvalue multiplicities out of range")
            counts[x][k] = mult[x].copy()
            back = int(sum(int(mult[x, l]) * pow(zo, l, p) for l in range(o)) % p)
            if back != modp[x, k]:
                raise SplittingError("lifted value does not reduce to the F_p value")
            values[x][k] = Cyclotomic.from_power_counts(o, [int(a) for a in mult[x]])

    order_rows = sorted(range(n), key=lambda x: (degrees[x], [repr(v) for v in values[x]]))
    return CharacterTable(
        order=order, exponent=e, prime=p, class_sizes=list(sizes), class_orders=cd.orders,
        inverse_map=list(conj), power_maps=[list(r) for r in cd.power_maps],
        degrees=[degrees[x] for x in order_rows], counts=[counts[x] for x in order_rows],
        values=[values[x] for x in order_rows], modp=modp[order_rows], root=root,
    )


# ------------------------------------------------------------ exact checks

def _reduce_ring_vector(vec: np.ndarray, n: int) -> np.ndarray:
    """Reduce integer vectors over Z[x]/(x^n - 1) modulo Phi_n (last axis)."""
    table = np.array(_power_table(n), dtype=np.int64)
    return vec @ table


def _embed(counts: np.ndarray, o: int, big: int, sign: int = 1) -> np.ndarray:
    out = np.zeros(counts.shape[:-1] + (big,), dtype=np.int64)
    step = big // o
    for l in range(o):
        out[..., (sign * l * step) % big] += counts[..., l]
    return out


def row_orthogonality(ct: CharacterTable) -> bool:
    """sum_k |C_k| chi(g_k) conj(psi(g_k)) == |G| delta, checked exactly."""
    n = len(ct)
    sizes = np.array(ct.class_sizes, dtype=object)
    rational = [k for k in range(ct.nclasses) if ct.is_rational_column(k)]
    irr = [k for k in range(ct.nclasses) if k not in set(rational)]
    vals = np.array([[int(ct.values[x][k].to_rational()) for k in rational] for x in range(n)], dtype=object)
    gram = (vals * sizes[rational]) @ vals.T if rational else np.zeros((n, n), dtype=object)
    if irr:
        big = math.lcm(*(ct.class_orders[k] for k in irr))
        acc = np.zeros((n, n, big), dtype=np.int64)
        for k in irr:
            a = _embed(np.array([ct.counts[x][k] for x in range(n)]), ct.class_orders[k], big)
            b = _embed(np.array([ct.counts[x][k] for x in range(n)]), ct.class_orders[k], big, sign=-1)
            # cyclic convolution a * b over Z/big
            for s in range(big):
                acc[:, :, s] += ct.class_sizes[k] * _shift_product(a, b, s, big)
        red = _reduce_ring_vector(acc, big)
        if np.any(red[:, :, 1:] != 0):
            return False
        gram = gram + red[:, :, 0].astype(object)
    return all(gram[x, y] == (ct.order if x == y else 0) for x in range(n) for y in range(n))


def _shift_product(a: np.ndarray, b: np.ndarray, s: int, big: int) -> np.ndarray:
    """sum_l a[x, l] b[y, (s - l) mod big] for all x, y."""
    idx = (s - np.arange(big)) % big
    return a @ b[:, idx].T


def column_orthogonality(ct: CharacterTable) -> bool:
    """sum_chi chi(g_k) conj(chi(g_l)) == |C_G(g_k)| delta, checked exactly."""
    n = len(ct)
    m = ct.nclasses
    rational = [ct.is_rational_column(k) for k in range(m)]
    for k in range(m):
        for l in range(k, m):
            expected = ct.order // ct.class_sizes[k] if k == l else 0
            if rational[k] and rational[l]:
                s = sum(ct.values[x][k].to_rational() * ct.values[x][l].to_rational() for x in range(n))
                if s != expected:
                    return False
                continue
            ok, ol = ct.class_orders[k], ct.class_orders[l]
            big = math.lcm(ok, ol)
            a = _embed(np.array([ct.counts[x][k] for x in range(n)]), ok, big)
            b = _embed(np.array([ct.counts[x][l] for x in range(n)]), ol, big, sign=-1)
            vec = np.array([np.sum(a * b[:, (s - np.arange(big)) % big]) for s in range(big)], dtype=np.int64)
            red = _reduce_ring_vector(vec, big)
            if red[0] != expected or np.any(red[1:] != 0):
                return False
    return True
