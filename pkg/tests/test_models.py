from fractions import Fraction

import sympy

from cmtwist.kfield import KElement, ord_p_K
from cmtwist.models import (
    KUMMER_TEST_PRIMES,
    STATED_BASES,
    STATED_MODEL,
    KummerSolution,
    congruence_bases,
    field_kummer,
    four_division_data,
    four_division_numeric_check,
    frobenius_survivors,
    good_reduction_model_check,
    is_one_mod_torsion_conductor,
    kummer_exponent_search,
    kummer_exponent_search_against,
    kummer_substitution,
    model_discriminant,
)

EXPECTED = {KummerSolution(*t) for t in [(0, 0, 0), (1, 3, 2), (2, 0, 4), (3, 3, 0), (4, 0, 2), (5, 3, 4)]}


def test_four_division_roots():
    data = four_division_data()
    z = sympy.Symbol("z")
    assert {sympy.simplify(r) for r in data.z_roots} == {1 + sympy.sqrt(3), 1 - sympy.sqrt(3)}
    assert sympy.expand(data.z_polynomial - (z**2 - 2 * z - 2) ** 2) == 0
    assert len(data.four_torsion_x) == 6 and len(data.in_L) == 6


def test_two_torsion_x():
    data = four_division_data()
    c = 3 * sympy.cbrt(2) / 2
    w = sympy.Rational(-1, 2) + sympy.sqrt(-3) / 2
    for k, t in enumerate(data.two_torsion_x):
        assert sympy.simplify(t - c * w**k) == 0


def test_four_division_numeric_shadow():
    assert four_division_numeric_check() < 1e-20


def test_kummer_search_exact_set():
    assert set(kummer_exponent_search()) == EXPECTED
    assert KummerSolution(1, 3, 2) in kummer_exponent_search()


def test_stated_bases():
    for pi, p in KUMMER_TEST_PRIMES:
        assert congruence_bases(pi, p).bases == STATED_BASES[p]
        assert is_one_mod_torsion_conductor(pi)


def test_literal_second_prime_is_not_admissible():
    literal = KElement(Fraction(5, 2), Fraction(9, 2))
    assert literal.norm() == 67
    assert not is_one_mod_torsion_conductor(literal)
    # read literally, the second congruence selects a different set
    lit = kummer_exponent_search_against(
        [KummerSolution(a, b, c) for a in range(6) for b in range(6) for c in range(6)],
        [KUMMER_TEST_PRIMES[0], (literal, 67)])
    assert set(lit) != EXPECTED


def test_frobenius_cross_check():
    assert set(frobenius_survivors(sorted(EXPECTED))) == EXPECTED


def test_kummer_field_minpoly():
    F = field_kummer()
    t = sympy.Symbol("t")
    assert F.minpoly.as_expr() - (t**12 - 27 * t**6 + 189) == 0


def test_substitution_relations():
    sub = kummer_substitution()
    F = field_kummer()
    s = sub["s"]
    assert sub["r"] == s * 3
    one_minus = F.element(1) - s**3
    assert one_minus == F.from_K(KElement(Fraction(3, 16), Fraction(-3, 16)))


def test_model_check_report():
    rep = good_reduction_model_check()
    assert rep.identity_holds
    assert rep.coefficients == STATED_MODEL
    assert rep.coefficients[0] == KElement(Fraction(9, 4), Fraction(1, 4))
    assert rep.disc_ord3 == 0
    assert rep.disc_matches_scaling
    assert rep.one_minus_s_cubed == KElement(Fraction(3, 16), Fraction(-3, 16))
    assert rep.ord3_one_minus_s_cubed == 1
    assert rep.ord3_four_s_cubed_minus_one == Fraction(3, 2)
    assert rep.ord3_u == Fraction(3, 4)
    assert rep.numeric_residual < 1e-20
    assert len(rep.context) >= 2


def test_discriminant_against_sympy():
    X = sympy.Symbol("X")
    r3 = sympy.sqrt(-3)

    def to_expr(k: KElement):
        return sympy.Rational(k.x.numerator, k.x.denominator) + sympy.Rational(k.y.numerator, k.y.denominator) * r3

    a2, a4, a6 = (to_expr(k) for k in STATED_MODEL)
    disc = sympy.expand(16 * sympy.discriminant(X**3 + a2 * X**2 + a4 * X + a6, X))
    mine = model_discriminant(*STATED_MODEL)
    assert sympy.simplify(disc - to_expr(mine)) == 0
    assert mine == KElement(Fraction(-13, 2), Fraction(-3, 2))
    assert ord_p_K(mine, 3) == 0
