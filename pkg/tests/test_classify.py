import pytest

from cmtwist.classify import (
    cubic_special_witness,
    density_estimate,
    enumerate_classified,
    is_cubic_special,
    is_special_split,
    special_split_witness,
)
from cmtwist.eisenstein import ONE_MINUS_OMEGA, UNITS, EisensteinInt, multiplicative_order, split_prime
from cmtwist.errors import NotPrime

E = EisensteinInt


def test_special_split_examples():
    assert not is_special_split(5)
    assert is_special_split(157)
    assert is_special_split(433)
    w = special_split_witness(157)
    assert w["splits"] and w["pm1_mod4"]


def test_special_split_rejects_composites():
    with pytest.raises(NotPrime):
        is_special_split(91)


def test_cubic_special_examples():
    assert is_cubic_special(E(28, 27))
    assert not is_cubic_special(E(55, 27))  # 1 mod 27, but 9 does not divide the order of 1-w
    w = cubic_special_witness(E(28, 27))
    assert w["one_mod_27"] and w["nine_divides_order"]


def test_composite_is_not_prime():
    # 55 + 33w has norm 11^2 * 19
    assert E(55, 33).norm() == 11**2 * 19
    with pytest.raises(NotPrime):
        is_cubic_special(E(55, 33))


@pytest.mark.xfail(strict=True, reason="1+9w is only 1 mod 9, so it fails the mod-27 congruence")
def test_cubic_special_norm_73_listed_example():
    assert is_cubic_special(E(1, 9))


@pytest.mark.xfail(strict=True, reason="no prime of norm 73 or 109 is 1 mod 27 up to units")
def test_enumerate_listed_norms_below_200():
    norms = [c.norm for c in enumerate_classified(200, "cubic_special")]
    assert 73 in norms and 109 in norms


def test_enumerate_examples():
    assert 157 in [c.p_or_pi for c in enumerate_classified(160, "special_split")]
    first = enumerate_classified(800, "cubic_special")
    assert [c.p_or_pi for c in first] == [E(1, -27), E(28, 27)]  # both primes above 757
    assert enumerate_classified(6, "special_split") == []
    assert enumerate_classified(6, "cubic_special") == []


def test_enumeration_sorted_and_deterministic():
    a = enumerate_classified(5000, "cubic_special")
    assert [c.norm for c in a] == sorted(c.norm for c in a)
    assert a == enumerate_classified(5000, "cubic_special")


def test_cubic_special_invariants():
    for c in enumerate_classified(20000, "cubic_special"):
        pi = c.p_or_pi
        assert (c.norm - 1) % 27 == 0
        assert (pi - 1).congruent(0, 27)
        assert multiplicative_order(ONE_MINUS_OMEGA, pi) % 9 == 0


def test_special_split_congruence_matches_witness():
    for c in enumerate_classified(3000, "special_split"):
        p = c.p_or_pi
        assert p % 3 == 1
        for g in c.witness["generators"]:
            assert g.congruent(1, 4) or g.congruent(-1, 4)


def _units_times(pi: EisensteinInt) -> list[EisensteinInt]:
    return [u * q for q in (pi, pi.conj()) for u in UNITS]


def test_norm_one_mod_27_does_not_give_generator_one_mod_27():
    # 109 = 1 mod 27, yet no associate of either prime above 109 is 1 mod 27
    assert (109 - 1) % 27 == 0
    assert not any((z - 1).congruent(0, 27) for z in _units_times(split_prime(109)))
    assert any((z - 1).congruent(0, 27) for z in _units_times(split_prime(757)))


def test_density_small_bound():
    special, congruent, _ = density_estimate(10_000)
    assert special >= 1 and congruent >= 1
    assert density_estimate(30) == (0, 0, None)


@pytest.mark.slow
def test_density_large_bound():
    _, _, ratio = density_estimate(10**6)
    assert abs(float(ratio) - 2 / 3) <= 0.10
