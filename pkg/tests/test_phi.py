import itertools
import random
from fractions import Fraction

import mpmath
import pytest

from cmtwist.classify import enumerate_classified
from cmtwist.eisenstein import OMEGA, EisensteinInt, residue_symbol
from cmtwist.errors import EmptyTwist, TooLarge
from cmtwist.kfield import KElement, ord_p_K
from cmtwist.lseries import TwistSpec, hecke_l_value, l_value_rational, principal_root
from cmtwist.phi import (
    build_V,
    e1star_sum,
    phi_from_lvalues,
    phi_from_wp,
    phi_paths_agree,
    verify_valuation_bounds,
)

E = EisensteinInt
PI_157 = E(13, 12)
PI_73 = E(1, 9)


def test_quadratic_membership_is_symbol_of_3c():
    V = build_V(PI_157, "quadratic")
    members = set(V.members)
    rng = random.Random(1)
    for _ in range(300):
        c = E(rng.randint(-400, 400), rng.randint(-400, 400))
        if PI_157.divides(c):
            continue
        assert V.contains(c) == (residue_symbol(3 * c, PI_157, 2).exponent == 0)
    assert all(V.contains(c) for c in members)


@pytest.mark.parametrize("kind,D", [("quadratic", PI_157), ("quadratic", 157), ("cubic", PI_73), ("cubic", 757)])
def test_closure(kind, D):
    V = build_V(D, kind)
    rng = random.Random(2)
    sample = rng.sample(V.members, min(100, len(V.members)))
    for c in sample:
        if kind == "quadratic":
            assert V.contains(-c)
        else:
            assert V.contains(OMEGA * c) and V.contains(OMEGA * OMEGA * c)


def test_nine_divides_V_for_cubic_special_primes():
    primes = [c.p_or_pi for c in enumerate_classified(20000, "cubic_special")]
    assert len(primes) >= 10
    for pi in primes:
        V = build_V(pi, "cubic")
        assert len(V) % 9 == 0
        assert V.transversal_size % len(V) == 0


def test_transversal_multiple():
    V = build_V(PI_73, "cubic")
    assert V.transversal_size == PI_73.norm() - 1
    assert V.transversal_size % len(V) == 0


def test_guards():
    with pytest.raises(EmptyTwist):
        build_V(TwistSpec.untwisted())
    with pytest.raises(EmptyTwist):
        phi_from_wp(TwistSpec.untwisted())
    with pytest.raises(TooLarge):
        build_V(10007 * 10009, "cubic")


def test_empty_product_value():
    assert KElement.of(hecke_l_value(TwistSpec.untwisted()).recognized) == KElement(Fraction(1, 3))


def test_quadratic_single_prime_decomposition():
    phi = phi_from_lvalues(PI_157, "quadratic")
    assert set(phi.terms) == {(0,), (1,)}
    prim = phi.terms[(1,)]
    imprimitive = hecke_l_value(TwistSpec.untwisted(), S=(PI_157,))
    with mpmath.workprec(128):
        expected = imprimitive.complex_estimate + prim.complex_estimate / prim.root
        assert abs(phi.complex_estimate - expected) <= phi.error + imprimitive.error + 1e-25


def test_cubic_single_prime_has_three_terms():
    phi = phi_from_lvalues(PI_73, "cubic")
    assert set(phi.terms) == {(0,), (1,), (2,)}


@pytest.mark.parametrize("kind,D", [("quadratic", PI_157), ("cubic", PI_73), ("quadratic", 157), ("cubic", 73)])
def test_paths_agree(kind, D):
    ok, a, b = phi_paths_agree(D, kind)
    assert ok, (a.complex_estimate, b.complex_estimate, a.error, b.error)


@pytest.mark.parametrize("chi", [(0,), (1,), (2,)])
def test_paths_agree_with_characters(chi):
    ok, _, _ = phi_paths_agree(PI_73, "cubic", chi)
    assert ok


def test_recognized_phi_matches_estimate():
    phi = phi_from_lvalues(PI_157, "quadratic")
    with mpmath.workprec(128):
        roots = (principal_root(PI_157, 2),)
        assert abs(phi.recognized.to_mpc(roots) - phi.complex_estimate) < 1e-20


@pytest.mark.parametrize("kind,D,p,floor", [("quadratic", PI_157, 2, 0), ("quadratic", E(13, 24), 2, 0),
                                           ("cubic", PI_73, 3, 1), ("cubic", E(28, 27), 3, 1)])
def test_eisenstein_sum_integrality(kind, D, p, floor):
    """The E1*-sum is 3D/k^n times Phi; its valuation stays above the integrality floor."""
    spec = TwistSpec.make(kind, D)
    k = 2 if kind == "quadratic" else 3
    phi = phi_from_lvalues(spec)
    V = build_V(spec)
    s, err = e1star_sum(V)
    scaled = phi.recognized.scale(KElement.of(3 * V.D3) / k ** len(spec.primes))
    with mpmath.workprec(128):
        roots = (principal_root(D, k),)
        assert abs(scaled.to_mpc(roots) - s) < 1e-18
    assert scaled.min_valuation(p) is None or scaled.min_valuation(p) >= floor


def test_character_orthogonality_on_symbols():
    primes = [E(13, 12), E(13, 24)]
    rng = random.Random(3)
    for _ in range(50):
        b = E(rng.randint(-99, 99), rng.randint(-99, 99))
        if any(p.divides(b) for p in primes) or b.is_zero():
            continue
        eps = [residue_symbol(b, p, 2).exponent for p in primes]
        total = sum((-1) ** sum(a * e for a, e in zip(alpha, eps)) for alpha in itertools.product(range(2), repeat=2))
        assert total == (4 if not any(eps) else 0)


def test_valuation_report_157():
    r = verify_valuation_bounds(157, "quadratic")
    assert r.passed
    assert r.lvalue_valuations[(1, 1)] == 2
    assert r.phi_valuations[(0, 0)] >= 2


def test_valuation_report_757():
    r = verify_valuation_bounds(757, "cubic", all_characters=False)
    assert r.passed
    assert r.lvalue_valuations[(1, 1)] == 2


def test_ord_of_listed_21169_value():
    assert l_value_rational(TwistSpec.quadratic(21169)).recognized == 192
    assert ord_p_K(192, 2) == 6
