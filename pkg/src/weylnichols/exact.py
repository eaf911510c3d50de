"""Exact arithmetic: rationals, prime fields and cyclotomic fields.

Cyclotomic numbers are stored canonically as residues modulo the
cyclotomic polynomial of their conductor, with ``Fraction`` coefficients.
Values of different conductors are promoted to the lcm before combining.
The prime-field helpers work on numpy int64 arrays (modulus below 2**31).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

INFINITE_ORDER = math.inf

Scalar = Union[int, Fraction, "Cyclotomic"]


# ---------------------------------------------------------------- integers

def divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def euler_phi(n: int) -> int:
    r = n
    for p in prime_factors(n):
        r = r // p * (p - 1)
    return r


def mobius(n: int) -> int:
    r = 1
    for p in prime_factors(n):
        if (n // p) % p == 0:
            return 0
        r = -r
    return r


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def lcm_all(values: Iterable[int]) -> int:
    r = 1
    for v in values:
        r = r * v // math.gcd(r, v)
    return r


# ------------------------------------------------------------- polynomials

@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in divisors(n)[:-1]:
        num = _exact_divide(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _exact_divide(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] // lead
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    if any(a[: len(b) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return q


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row k holds x**k reduced modulo Phi_n, for k in range(n)."""
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by x, then reduce the overflow coefficient
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(deg):
                cur[j] -= top * phi[j]
    return tuple(rows)


def _reduce(poly: Sequence, n: int) -> list:
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    p = list(poly)
    for i in range(len(p) - 1, deg - 1, -1):
        c = p[i]
        if c:
            shift = i - deg
            for j in range(deg):
                p[shift + j] -= c * phi[j]
            p[i] = 0
    p = p[:deg]
    return p + [0] * (deg - len(p))


def _poly_mul(a: Sequence, b: Sequence) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_trim(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = [Fraction(x) for x in a]
    b = _poly_trim([Fraction(x) for x in b])
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] / b[-1]
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    r = _poly_trim(a[: len(b) - 1] or [Fraction(0)])
    return q, r


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _poly_trim([x - y for x, y in zip(a, b)])


def _poly_inverse_mod(a: list, m: list) -> list:
    """Inverse of a modulo m over Q via the extended Euclidean algorithm."""
    r0, r1 = [Fraction(x) for x in m], _poly_trim([Fraction(x) for x in a])
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while not (len(r1) == 1 and r1[0] == 0):
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible")
    c = r0[0]
    return [x / c for x in s0]


# -------------------------------------------------------------- cyclotomic

class Cyclotomic:
    """An element of Q(zeta_n) in the power basis modulo Phi_n."""

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Sequence, *, reduced: bool = False):
        if conductor < 1:
            raise ValueError("conductor must be positive")
        if not reduced:
            coeffs = _reduce([Fraction(c) for c in coeffs], conductor)
        self.conductor = conductor
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    # construction
    @classmethod
    def rational(cls, value: Union[int, Fraction]) -> "Cyclotomic":
        return cls(1, (Fraction(value),), reduced=True)

    @classmethod
    def from_int_vector(cls, conductor: int, vec: Sequence[int]) -> "Cyclotomic":
        """Build from an already reduced integer coefficient vector."""
        return cls(conductor, [Fraction(int(v)) for v in vec], reduced=True)

    @classmethod
    def from_power_counts(cls, n: int, counts: Sequence[int]) -> "Cyclotomic":
        """sum_k counts[k] * zeta_n**k, reduced; rational results get conductor 1."""
        table = _power_table(n)
        deg = len(table[0])
        acc = [0] * deg
        for k, c in enumerate(counts):
            if c:
                row = table[k % n]
                for j in range(deg):
                    acc[j] += c * row[j]
        val = cls(n, acc, reduced=True)
        return val.simplify()

    # views
    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def simplify(self) -> "Cyclotomic":
        if self.conductor != 1 and self.is_rational():
            return Cyclotomic.rational(self.coeffs[0])
        return self

    def promote(self, n: int) -> "Cyclotomic":
        """Embed into Q(zeta_n); n must be a multiple of the conductor."""
        if n == self.conductor:
            return self
        if n % self.conductor:
            raise ValueError(f"cannot embed conductor {self.conductor} into {n}")
        step = n // self.conductor
        table = _power_table(n)
        deg = len(table[0])
        acc = [Fraction(0)] * deg
        for k, c in enumerate(self.coeffs):
            if c:
                row = table[(k * step) % n]
                for j in range(deg):
                    if row[j]:
                        acc[j] += c * row[j]
        return Cyclotomic(n, acc, reduced=True)

    def _common(self, other: Scalar) -> tuple["Cyclotomic", "Cyclotomic"]:
        other = as_cyclotomic(other)
        n = self.conductor * other.conductor // math.gcd(self.conductor, other.conductor)
        return self.promote(n), other.promote(n)

    # arithmetic
    def __add__(self, other: Scalar) -> "Cyclotomic":
        a, b = self._common(other)
        return Cyclotomic(a.conductor, [x + y for x, y in zip(a.coeffs, b.coeffs)], reduced=True)

    __radd__ = __add__

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.conductor, [-x for x in self.coeffs], reduced=True)

    def __sub__(self, other: Scalar) -> "Cyclotomic":
        return self + (-as_cyclotomic(other))

    def __rsub__(self, other: Scalar) -> "Cyclotomic":
        return as_cyclotomic(other) - self

    def __mul__(self, other: Scalar) -> "Cyclotomic":
        other = as_cyclotomic(other)
        if other.conductor == 1:
            c = other.coeffs[0]
            return Cyclotomic(self.conductor, [x * c for x in self.coeffs], reduced=True)
        if self.conductor == 1:
            return other * self
        a, b = self._common(other)
        return Cyclotomic(a.conductor, _reduce(_poly_mul(a.coeffs, b.coeffs), a.conductor), reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.conductor == 1:
            return Cyclotomic.rational(1 / self.coeffs[0])
        inv = _poly_inverse_mod(list(self.coeffs), list(cyclotomic_poly(self.conductor)))
        return Cyclotomic(self.conductor, inv)

    def __truediv__(self, other: Scalar) -> "Cyclotomic":
        return self * as_cyclotomic(other).inverse()

    def __rtruediv__(self, other: Scalar) -> "Cyclotomic":
        return as_cyclotomic(other) * self.inverse()

    def __pow__(self, k: int) -> "Cyclotomic":
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic.rational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "Cyclotomic":
        return self.galois(-1)

    def galois(self, j: int) -> "Cyclotomic":
        """Apply the automorphism zeta -> zeta**j (j coprime to the conductor)."""
        n = self.conductor
        if math.gcd(j, n) != 1:
            raise ValueError("exponent must be coprime to the conductor")
        table = _power_table(n)
        deg = len(table[0])
        acc = [Fraction(0)] * deg
        for k, c in enumerate(self.coeffs):
            if c:
                row = table[(k * j) % n]
                for t in range(deg):
                    if row[t]:
                        acc[t] += c * row[t]
        return Cyclotomic(n, acc, reduced=True)

    # comparison
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (int, Fraction, Cyclotomic)):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def trace_average(self) -> Fraction:
        """Tr(x)/[Q(x-field):Q]; independent of the ambient conductor."""
        n = self.conductor
        total = Fraction(0)
        phi = euler_phi(n)
        for k, c in enumerate(self.coeffs):
            if c:
                g = math.gcd(k, n)
                m = n // g
                total += c * Fraction(mobius(m) * phi, euler_phi(m))
        return total / phi

    def __hash__(self) -> int:
        return hash(self.trace_average())

    def __repr__(self) -> str:
        if self.is_rational():
            return f"Cyclotomic({self.coeffs[0]})"
        terms = [f"{c}*z{self.conductor}^{k}" for k, c in enumerate(self.coeffs) if c]
        return "Cyclotomic(" + " + ".join(terms) + ")"

    # serialization
    def to_json(self) -> dict:
        return {"conductor": self.conductor, "coefficients": [f"{c.numerator}/{c.denominator}" for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "Cyclotomic":
        return cls(int(data["conductor"]), [Fraction(s) for s in data["coefficients"]], reduced=True)


def as_cyclotomic(x: Scalar) -> Cyclotomic:
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, (int, Fraction)):
        return Cyclotomic.rational(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a cyclotomic number")


def cyclo_root(e: int, k: int) -> Cyclotomic:
    """zeta_e**k reduced modulo Phi_e."""
    if e < 1:
        raise ValueError("conductor must be positive")
    return Cyclotomic(e, _power_table(e)[k % e], reduced=True)


def is_real_negative_of_degree(val: Scalar, degree: int) -> bool:
    if degree < 1:
        raise ValueError("degree must be positive")
    return as_cyclotomic(val) == -degree


def root_of_unity_order(e: int, k: int) -> int:
    return e // math.gcd(e, k % e) if e > 1 else 1


def multiplicative_order(q: Scalar) -> Union[int, float]:
    """Least n with q**n = 1, or INFINITE_ORDER when q is not a root of unity."""
    q = as_cyclotomic(q)
    if q.is_zero():
        raise ZeroDivisionError("zero has no multiplicative order")
    if q.conductor == 1:
        r = q.coeffs[0]
        return 1 if r == 1 else 2 if r == -1 else INFINITE_ORDER
    if q * q.conjugate() != 1:
        return INFINITE_ORDER
    e = q.conductor
    for k in range(e):
        z = cyclo_root(e, k)
        if q == z:
            return root_of_unity_order(e, k)
        if q == -z:
            return root_of_unity_order(2 * e, 2 * k + e)
    return INFINITE_ORDER


def q_integer(n: int, q: Scalar) -> Cyclotomic:
    """(n)_q = 1 + q + ... + q**(n-1); equals n when q = 1."""
    q = as_cyclotomic(q)
    acc = Cyclotomic.rational(0)
    term = Cyclotomic.rational(1)
    for _ in range(n):
        acc = acc + term
        term = term * q
    return acc


def q_factorial(n: int, q: Scalar) -> Cyclotomic:
    acc = Cyclotomic.rational(1)
    for k in range(1, n + 1):
        acc = acc * q_integer(k, q)
    return acc


def gaussian_polynomial(n: int, i: int) -> list[int]:
    """Integer coefficients (lowest first) of the Gaussian binomial [n choose i] in q.

    The quotient of q-factorial polynomials is exact in Z[q], so evaluating
    afterwards also works at roots of unity where the factorials vanish.
    """
    if not 0 <= i <= n:
        return [0]

    def factorial(m: int) -> list[int]:
        acc = [1]
        for k in range(1, m + 1):
            acc = [int(c) for c in _poly_mul(acc, [1] * k)]
        return acc

    return _exact_divide(factorial(n), [int(c) for c in _poly_mul(factorial(i), factorial(n - i))])


def q_binomial(n: int, i: int, q: Scalar) -> Cyclotomic:
    q = as_cyclotomic(q)
    acc = Cyclotomic.rational(0)
    for c in reversed(gaussian_polynomial(n, i)):
        acc = acc * q + c
    return acc


# ------------------------------------------------------------ prime fields

class PrimeFieldElem:
    __slots__ = ("p", "r")

    def __init__(self, p: int, r: int):
        self.p = p
        self.r = r % p

    def _coerce(self, other) -> int:
        if isinstance(other, PrimeFieldElem):
            if other.p != self.p:
                raise ValueError("moduli differ")
            return other.r
        return int(other) % self.p

    def __add__(self, other):
        return PrimeFieldElem(self.p, self.r + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return PrimeFieldElem(self.p, self.r - self._coerce(other))

    def __rsub__(self, other):
        return PrimeFieldElem(self.p, self._coerce(other) - self.r)

    def __mul__(self, other):
        return PrimeFieldElem(self.p, self.r * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldElem(self.p, -self.r)

    def inverse(self) -> "PrimeFieldElem":
        if self.r == 0:
            raise ZeroDivisionError("inverse of zero")
        return PrimeFieldElem(self.p, pow(self.r, -1, self.p))

    def __truediv__(self, other):
        return self * PrimeFieldElem(self.p, self._coerce(other)).inverse()

    def __pow__(self, k: int):
        return PrimeFieldElem(self.p, pow(self.r, k, self.p))

    def __eq__(self, other) -> bool:
        if isinstance(other, PrimeFieldElem):
            return self.p == other.p and self.r == other.r
        if isinstance(other, int):
            return self.r == other % self.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.r))

    def __int__(self) -> int:
        return self.r

    def __repr__(self) -> str:
        return f"{self.r} mod {self.p}"


def primitive_root(p: int) -> int:
    factors = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in factors):
            return g
    return 1


def dixon_prime(order: int, exponent: int) -> int:
    """Smallest prime p = 1 mod exponent with p > 2*ceil(sqrt(order))."""
    bound = 2 * math.isqrt(order - 1) + 2 if order > 1 else 2
    p = (bound // exponent) * exponent + 1
    while p <= bound or not is_prime(p):
        p += exponent
    return p


def modp_rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def modp_nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the right kernel of a over F_p."""
    a = np.asarray(a, dtype=np.int64)
    rows, cols = a.shape
    red, piv = modp_rref(a, p)
    free = [c for c in range(cols) if c not in set(piv)]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for t, f in enumerate(free):
        basis[f, t] = 1
        for i, pc in enumerate(piv):
            basis[pc, t] = (-red[i, f]) % p
    return basis


def modp_rank(a: np.ndarray, p: int) -> int:
    return len(modp_rref(a, p)[1])


def modp_charpoly(a: np.ndarray, p: int) -> list[int]:
    """Characteristic polynomial det(xI - a) over F_p, lowest degree first.

    Hessenberg reduction followed by the standard recurrence.
    """
    h = np.array(a, dtype=np.int64) % p
    n = h.shape[0]
    for m in range(1, n - 1):
        nz = np.nonzero(h[m:, m - 1])[0]
        if nz.size == 0:
            continue
        i = m + int(nz[0])
        if i != m:
            h[[m, i]] = h[[i, m]]
            h[:, [m, i]] = h[:, [i, m]]
        inv = pow(int(h[m, m - 1]), -1, p)
        for j in range(m + 1, n):
            u = int(h[j, m - 1]) * inv % p
            if u:
                h[j] = (h[j] - u * h[m]) % p
                h[:, m] = (h[:, m] + u * h[:, j]) % p
    polys: list[list[int]] = [[1]]
    for k in range(1, n + 1):
        prev = polys[k - 1]
        cur = [0] + prev
        hkk = int(h[k - 1, k - 1])
        for t in range(len(prev)):
            cur[t] = (cur[t] - hkk * prev[t]) % p
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = prod * int(h[i, i - 1]) % p
            if prod == 0:
                break
            coef = prod * int(h[i - 1, k - 1]) % p
            if coef:
                for t, c in enumerate(polys[i - 1]):
                    cur[t] = (cur[t] - coef * c) % p
        polys.append(cur)
    return polys[n]


def modp_poly_roots(poly: Sequence[int], p: int) -> list[int]:
    """All roots in F_p by evaluation at every field element."""
    xs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(poly):
        acc = (acc * xs + int(c)) % p
    return [int(x) for x in np.nonzero(acc == 0)[0]]
