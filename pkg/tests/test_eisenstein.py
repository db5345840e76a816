import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmtwist.eisenstein import (
    OMEGA,
    ONE_MINUS_OMEGA,
    UNITS,
    Convention,
    EisensteinInt,
    factor,
    generic_multiplicative_order,
    is_prime,
    mod3_associate,
    multiplicative_order,
    norm,
    primary_associate,
    residue_symbol,
    split_root,
)
from cmtwist.errors import BadModulus, NoPrimaryAssociate, NotCoprime

E = EisensteinInt
ints = st.integers(min_value=-400, max_value=400)
elements = st.builds(E, ints, ints)


def _primes_up_to(bound: int) -> list[EisensteinInt]:
    out = []
    for a in range(-70, 71):
        for b in range(-70, 71):
            z = E(a, b)
            n = z.norm()
            if 3 < n <= bound and n % 3 and is_prime(z):
                pi = mod3_associate(z)
                if pi not in out:
                    out.append(pi)
    return out


PRIMES = _primes_up_to(4000)


def test_norm_examples():
    assert norm(E(0, 0)) == 0
    assert norm(E(13, 12)) == 157
    assert norm(E(28, 27)) == 757


@given(elements, elements)
def test_norm_multiplicative(x, y):
    assert norm(x * y) == norm(x) * norm(y)
    assert norm(x) >= 0 and (norm(x) == 0) == x.is_zero()


def test_units():
    assert {(u.a, u.b) for u in UNITS} == {(1, 0), (-1, 0), (0, 1), (0, -1), (-1, -1), (1, 1)}
    assert all(u.is_unit() for u in UNITS)
    assert OMEGA * OMEGA + OMEGA + 1 == E(0, 0)


def test_factor_seven():
    f = factor(E(7, 0))
    assert sorted(pp.rational_norm for pp, _ in f.factors) == [7, 7]
    assert E(-2, -3) in [pp.value for pp, _ in f.factors]
    assert f.product() == E(7, 0)


def test_factor_two_is_inert():
    f = factor(E(2, 0))
    # the mod-3 primary form of the inert prime 2 is -2, so the unit is -1
    assert [(pp.value, e) for pp, e in f.factors] == [(E(-2, 0), 1)]
    assert f.unit == E(-1, 0) and f.product() == E(2, 0)


def test_factor_minus_three():
    f = factor(E(-3, 0))
    assert [(pp.value, e) for pp, e in f.factors] == [(ONE_MINUS_OMEGA, 2)]
    assert ONE_MINUS_OMEGA ** 2 == E(-3, 0) * OMEGA
    assert f.unit == OMEGA * OMEGA
    assert f.product() == E(-3, 0)


@given(elements.filter(lambda z: not z.is_zero()))
@settings(max_examples=150)
def test_factor_round_trip(z):
    f = factor(z)
    assert f.product() == z
    assert f.unit.is_unit()
    for pp, _ in f.factors:
        assert is_prime(pp.value)
        if pp.convention is Convention.MOD3:
            assert pp.value.congruent(1, 3)


def test_primary_associate_examples():
    assert primary_associate(E(3, 1)).value == E(-2, -3)
    assert primary_associate(E(13, 12)).value == E(13, 12)
    assert primary_associate(E(-157, 0), Convention.MOD4SIGN).value == E(157, 0)
    with pytest.raises(NoPrimaryAssociate):
        primary_associate(ONE_MINUS_OMEGA)


def test_residue_symbol_trivial():
    for pi in PRIMES[:20]:
        for m in (2, 3, 6):
            if (pi.norm() - 1) % m == 0:
                assert residue_symbol(1, pi, m).exponent == 0


def test_supplements():
    # pi = 1 + 3(m + n w): ((1-w)/pi)_3 = w^m and (w/pi)_3 = w^(-m-n)
    checked = 0
    for pi in PRIMES:
        if pi.norm() % 3 != 1 or pi.b == 0:
            continue
        m, n = (pi.a - 1) // 3, pi.b // 3
        assert residue_symbol(ONE_MINUS_OMEGA, pi, 3).exponent == m % 3
        assert residue_symbol(OMEGA, pi, 3).exponent == (-m - n) % 3
        checked += 1
    assert checked > 100


def test_symbol_errors():
    with pytest.raises(NotCoprime):
        residue_symbol(E(13, 12), E(13, 12) * 5, 2)
    with pytest.raises(BadModulus):
        residue_symbol(5, E(2, 0), 6)  # N(2) = 4 is not 1 mod 6
    with pytest.raises(ValueError):
        residue_symbol(5, E(13, 12), 4)


SMALL_SPLIT = [p for p in PRIMES if p.b != 0 and p.norm() % 6 == 1 and p.norm() < 400]


@given(st.sampled_from(SMALL_SPLIT), elements, st.sampled_from([2, 3, 6]))
@settings(max_examples=300)
def test_symbol_trivial_iff_power(pi, a, m):
    """Brute force over the residue field: the symbol is 1 exactly on m-th powers."""
    if pi.divides(a):
        return
    p, w0 = split_root(pi)
    powers = {pow(x, m, p) for x in range(1, p)}
    assert (residue_symbol(a, pi, m).exponent == 0) == ((a.a + a.b * w0) % p in powers)


@given(st.sampled_from(PRIMES), st.sampled_from(PRIMES))
@settings(max_examples=300)
def test_cubic_reciprocity(pi, rho):
    if pi == rho or pi.norm() == rho.norm() and pi.conj() == rho and pi.b == 0:
        return
    if pi.divides(rho) or rho.divides(pi):
        return
    assert residue_symbol(pi, rho, 3) == residue_symbol(rho, pi, 3)


@given(elements, elements, st.sampled_from([2, 3, 6]))
@settings(max_examples=100)
def test_symbol_multiplicative_in_top(a, a2, m):
    b = random.Random(hash((a, a2))).choice([p for p in PRIMES if p.norm() % 6 == 1])
    if b.divides(a) or b.divides(a2):
        return
    assert residue_symbol(a * a2, b, m) == residue_symbol(a, b, m) * residue_symbol(a2, b, m)


def test_symbol_multiplicative_in_bottom():
    rng = random.Random(5)
    pool = [p for p in PRIMES if p.norm() % 6 == 1]
    for _ in range(60):
        b1, b2 = rng.sample(pool, 2)
        a = E(rng.randint(-50, 50), rng.randint(-50, 50))
        if b1.divides(a) or b2.divides(a) or a.is_zero():
            continue
        for m in (2, 3, 6):
            assert residue_symbol(a, b1 * b2, m) == residue_symbol(a, b1, m) * residue_symbol(a, b2, m)


def test_sextic_consistency():
    rng = random.Random(7)
    pool = [p for p in PRIMES if p.norm() % 6 == 1]
    for _ in range(100):
        b = rng.choice(pool)
        a = E(rng.randint(-99, 99), rng.randint(-99, 99))
        if a.is_zero() or b.divides(a):
            continue
        six = residue_symbol(a, b, 6).exponent
        assert (3 * six) % 6 // 3 == residue_symbol(a, b, 2).exponent
        assert (2 * six) % 6 // 2 == residue_symbol(a, b, 3).exponent


def test_multiplicative_order():
    pi = E(28, 27)
    assert multiplicative_order(1, pi) == 1
    assert multiplicative_order(-1, pi) == 2
    assert multiplicative_order(ONE_MINUS_OMEGA, pi) % 9 == 0
    for p in PRIMES[:40]:
        k = multiplicative_order(ONE_MINUS_OMEGA, p)
        assert (p.norm() - 1) % k == 0
        assert k == generic_multiplicative_order(ONE_MINUS_OMEGA, p)
    with pytest.raises(NotCoprime):
        multiplicative_order(E(28, 27) * 2, pi)
