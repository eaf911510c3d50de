import cmath
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weylnichols.exact import (
    INFINITE_ORDER, Cyclotomic, cyclo_root, cyclotomic_poly, dixon_prime, euler_phi, is_prime,
    is_real_negative_of_degree, modp_charpoly, modp_nullspace, modp_poly_roots, modp_rank, modp_rref, mobius,
    multiplicative_order, q_binomial, q_integer,
)

CONDUCTORS = [1, 2, 3, 4, 5, 6, 7, 8, 9, 12]


def numeric(x: Cyclotomic) -> complex:
    z = cmath.exp(2j * math.pi / x.conductor)
    return sum(float(c) * z ** k for k, c in enumerate(x.coeffs))


@st.composite
def cyclotomics(draw, conductor=None):
    n = conductor or draw(st.sampled_from(CONDUCTORS))
    coeffs = draw(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=n, max_size=n))
    return Cyclotomic(n, coeffs)


def test_cyclotomic_polynomials_small():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)
    for n in range(1, 30):
        assert len(cyclotomic_poly(n)) - 1 == euler_phi(n)


def test_number_theory_helpers():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert sum(euler_phi(d) for d in range(1, 37) if 36 % d == 0) == 36


@given(cyclotomics(), cyclotomics())
@settings(max_examples=60, deadline=None)
def test_arithmetic_matches_complex_evaluation(a, b):
    assert abs(numeric(a + b) - (numeric(a) + numeric(b))) < 1e-9
    assert abs(numeric(a * b) - numeric(a) * numeric(b)) < 1e-6
    assert abs(numeric(a - b) - (numeric(a) - numeric(b))) < 1e-9


@given(cyclotomics(), cyclotomics(), cyclotomics())
@settings(max_examples=40, deadline=None)
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@given(cyclotomics())
@settings(max_examples=60, deadline=None)
def test_inverse_and_conjugate(a):
    if not a.is_zero():
        assert a * a.inverse() == 1
    assert abs(numeric(a.conjugate()) - numeric(a).conjugate()) < 1e-9
    assert a.conjugate().conjugate() == a


@given(cyclotomics(conductor=12), cyclotomics(conductor=12), st.sampled_from([1, 5, 7, 11]))
@settings(max_examples=40, deadline=None)
def test_galois_is_a_ring_homomorphism(a, b, j):
    assert (a * b).galois(j) == a.galois(j) * b.galois(j)
    assert (a + b).galois(j) == a.galois(j) + b.galois(j)


@given(cyclotomics())
@settings(max_examples=40, deadline=None)
def test_hash_is_consistent_with_equality_across_conductors(a):
    b = a.promote(a.conductor * 2)
    assert a == b and hash(a) == hash(b)


def test_json_round_trip():
    x = cyclo_root(9, 2) * Fraction(3, 7) + 1
    assert Cyclotomic.from_json(x.to_json()) == x


@pytest.mark.parametrize("e", [1, 2, 3, 4, 5, 6, 8, 12, 24])
def test_root_orders(e):
    for k in range(e):
        assert multiplicative_order(cyclo_root(e, k)) == e // math.gcd(e, k)
        assert multiplicative_order(-cyclo_root(e, k)) == (2 * e) // math.gcd(2 * e, 2 * k + e)


def test_non_roots_have_infinite_order():
    assert multiplicative_order(Cyclotomic.rational(2)) == INFINITE_ORDER
    assert multiplicative_order(cyclo_root(5, 1) + cyclo_root(5, 4)) == INFINITE_ORDER


def test_minus_degree_test():
    assert is_real_negative_of_degree(-3, 3)
    assert not is_real_negative_of_degree(3, 3)
    assert not is_real_negative_of_degree(cyclo_root(3, 1) * 2, 2)


# q-binomials

@given(st.integers(1, 7), st.integers(0, 7), st.sampled_from([(1, 0), (2, 1), (3, 1), (4, 1), (6, 5), (5, 2)]))
@settings(max_examples=60, deadline=None)
def test_q_binomial_pascal_recurrence(n, i, root):
    q = cyclo_root(*root)
    lhs = q_binomial(n, i, q)
    rhs = q_binomial(n - 1, i - 1, q) + q ** i * q_binomial(n - 1, i, q)
    assert lhs == rhs


@pytest.mark.parametrize("n", range(8))
def test_q_binomial_at_one_is_binomial(n):
    for i in range(n + 1):
        assert q_binomial(n, i, 1) == math.comb(n, i)


@pytest.mark.parametrize("order", [2, 3, 4, 6])
def test_q_binomial_vanishes_at_primitive_root(order):
    q = cyclo_root(order, 1)
    assert q_integer(order, q) == 0
    for i in range(1, order):
        assert q_binomial(order, i, q) == 0


# prime fields

def brute_rank(a, p):
    rows = [tuple(r % p) for r in a]
    span = {tuple([0] * a.shape[1])}
    for coeffs in itertools.product(range(p), repeat=len(rows)):
        span.add(tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) % p for j in range(a.shape[1])))
    return round(math.log(len(span), p))


@given(st.lists(st.integers(0, 4), min_size=9, max_size=9))
@settings(max_examples=60, deadline=None)
def test_modp_rank_against_span_size(entries):
    a = np.array(entries, dtype=np.int64).reshape(3, 3)
    assert modp_rank(a, 5) == brute_rank(a, 5)
    null = modp_nullspace(a, 5)
    assert null.shape[1] == 3 - modp_rank(a, 5)
    assert not np.any(a @ null % 5)
    red, piv = modp_rref(a, 5)
    assert all(red[i, c] == 1 for i, c in enumerate(piv))


@given(st.lists(st.integers(0, 12), min_size=16, max_size=16))
@settings(max_examples=60, deadline=None)
def test_charpoly_satisfies_cayley_hamilton(entries):
    p = 13
    a = np.array(entries, dtype=np.int64).reshape(4, 4)
    poly = modp_charpoly(a, p)
    assert len(poly) == 5 and poly[-1] == 1
    acc = np.zeros_like(a)
    power = np.eye(4, dtype=np.int64)
    for c in poly:
        acc = (acc + c * power) % p
        power = power @ a % p
    assert not acc.any()
    assert poly[0] % p == (-1) ** 4 * round(np.linalg.det(a)) % p


def test_poly_roots_by_evaluation():
    p = 11
    poly = [(-2 * -5) % p, (-(2 + 5)) % p, 1]  # (x - 2)(x - 5)
    assert modp_poly_roots(poly, p) == [2, 5]


@pytest.mark.parametrize("order,exponent", [(12, 6), (1152, 12), (51840, 12), (2903040, 30), (155520, 6)])
def test_dixon_prime_conditions(order, exponent):
    p = dixon_prime(order, exponent)
    assert is_prime(p) and p % exponent == 1 and p > 2 * math.sqrt(order)
