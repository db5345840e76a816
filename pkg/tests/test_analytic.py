import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cmtwist.analytic import (
    DEFAULT_CTX,
    LatticePoint,
    PrecisionContext,
    eisenstein_e1star,
    fundamental_period,
    omega,
    torsion_point,
    weierstrass_values,
)
from cmtwist.eisenstein import EisensteinInt
from cmtwist.errors import PoleAtLatticePoint

E = EisensteinInt
with mpmath.workprec(256):
    W = mpmath.mpc(-0.5, mpmath.sqrt(3) / 2)
TOL = 1e-20


@pytest.fixture(autouse=True)
def _high_precision():
    with mpmath.workprec(128):
        yield


def close(a, b, tol=TOL) -> bool:
    return abs(mpmath.mpc(a) - mpmath.mpc(b)) < tol


def test_period_value_and_routes():
    om, err = fundamental_period(DEFAULT_CTX)
    assert err < 1e-25
    assert close(om, mpmath.mpf("1.766638750285449957313689499648"), 1e-29)
    with mpmath.workprec(128):
        for method in ("quad", "beta"):
            other, err2 = fundamental_period(DEFAULT_CTX, method)
            assert abs(om - other) < max(err, err2) * 4


def test_period_precision_contract():
    _, e128 = fundamental_period(PrecisionContext(128, 1e-25))
    _, e256 = fundamental_period(PrecisionContext(256, 1e-60))
    assert e256 <= e128 / 2


def test_third_point_values():
    # Omega is the positive real period; with that orientation wp'(Omega/3) = -9
    vals = weierstrass_values(LatticePoint(E(1, 0), 3))
    om = omega()
    with mpmath.workprec(128):
        assert close(vals.wp, 3)
        assert close(vals.wp_prime, -9)
        assert close(vals.zeta, 2 * mpmath.pi / (3 * mpmath.sqrt(3) * om) + 1)
    e1, _ = eisenstein_e1star(LatticePoint(E(1, 0), 3))
    assert close(e1, 1)


def test_third_point_values_with_opposite_orientation():
    """The other sign pattern is exactly the one obtained from the period -Omega."""
    neg = weierstrass_values(LatticePoint(E(-1, 0), 3))
    om = -omega()
    with mpmath.workprec(128):
        assert close(neg.wp, 3)
        assert close(neg.wp_prime, 9)
        assert close(neg.zeta, 2 * mpmath.pi / (3 * mpmath.sqrt(3) * om) - 1)
    e1, _ = eisenstein_e1star(LatticePoint(E(-1, 0), 3))
    assert close(e1, -1)


def test_half_point():
    x, y = torsion_point(1, 2)
    with mpmath.workprec(128):
        assert close(x, 3 * mpmath.cbrt(2) / 2)
    assert close(y, 0)


def test_pole_raises():
    with pytest.raises(PoleAtLatticePoint):
        weierstrass_values(LatticePoint(E(3, 0), 3))
    with pytest.raises(PoleAtLatticePoint):
        torsion_point(E(2, 2), E(2, 0))  # 2+2w is 0 mod 2
    with pytest.raises(PoleAtLatticePoint):
        eisenstein_e1star(LatticePoint(E(0, 0), 5))


def _division_roots(n: int) -> list[mpmath.mpc]:
    """Roots of the n-division polynomial of Y^2 = x^3 - 27/4, the curve with y = 2Y."""
    x = sympy.Symbol("x")
    a, b = 0, sympy.Rational(-27, 4)
    f = x**3 + a * x + b
    # psi_n for even n carries a factor 2Y; track psi_n / (2Y)^(n even) as a polynomial in x
    psi = {0: sympy.Integer(0), 1: sympy.Integer(1), 2: sympy.Integer(1),
           3: 3 * x**4 + 6 * a * x**2 + 12 * b * x - a**2,
           4: 2 * (x**6 + 5 * a * x**4 + 20 * b * x**3 - 5 * a**2 * x**2 - 4 * a * b * x - 8 * b**2 - a**3)}
    # with the 2Y factor removed from even indices, (2Y)^2 = 4f
    four_f = 4 * f

    def get(k: int):
        if k in psi:
            return psi[k]
        m = k // 2
        if k % 2:
            if m % 2:
                val = get(m + 2) * get(m) ** 3 - four_f**2 * get(m - 1) * get(m + 1) ** 3
            else:
                val = four_f**2 * get(m + 2) * get(m) ** 3 - get(m - 1) * get(m + 1) ** 3
        else:
            val = get(m) * (get(m + 2) * get(m - 1) ** 2 - get(m - 2) * get(m + 1) ** 2)
        psi[k] = sympy.expand(val)
        return psi[k]

    poly = sympy.Poly(get(n), x)
    with mpmath.workprec(256):
        return mpmath.polyroots([mpmath.mpf(sympy.Rational(c).p) / sympy.Rational(c).q for c in poly.all_coeffs()],
                                maxsteps=400, extraprec=512)


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_torsion_x_are_division_polynomial_roots(n):
    roots = [] if n == 2 else _division_roots(n)
    if n == 2:
        # 2-torsion: the roots of 4x^3 - 27
        with mpmath.workprec(256):
            roots = mpmath.polyroots([4, 0, 0, -27], extraprec=256)
    count = 0
    for a in range(n):
        for b in range(n):
            c = E(a, b)
            if a == 0 and b == 0:
                continue
            x, _ = torsion_point(c, n)
            assert min(abs(x - r) for r in roots) < TOL, (n, c)
            count += 1
    assert count == n * n - 1


@st.composite
def generic_points(draw):
    re = draw(st.floats(min_value=-3, max_value=3, allow_nan=False))
    im = draw(st.floats(min_value=-3, max_value=3, allow_nan=False))
    z = mpmath.mpc(re, im)
    u = z / omega()
    # stay a safe distance away from lattice points
    m, n = round(float(u.real + u.imag / mpmath.sqrt(3))), round(float(2 * u.imag / mpmath.sqrt(3)))
    near = omega() * (m + n * W)
    if abs(z - near) < 0.05:
        z += 0.2
    return z


@given(generic_points())
@settings(max_examples=50)
def test_curve_relation(z):
    v = weierstrass_values(z)
    assert close(v.wp_prime**2, 4 * v.wp**3 - 27, 1e-18 * (1 + abs(v.wp) ** 3))


@given(generic_points())
@settings(max_examples=20)
def test_second_derivative(z):
    with mpmath.workprec(160):
        h = mpmath.mpf(10) ** -12
        d = (weierstrass_values(z + h).wp_prime - weierstrass_values(z - h).wp_prime) / (2 * h)
        v = weierstrass_values(z)
        assert close(d, 6 * v.wp**2, 1e-12 * (1 + abs(v.wp) ** 3))


@given(generic_points())
@settings(max_examples=20)
def test_zeta_quasi_periodicity(z):
    om = omega()
    with mpmath.workprec(128):
        jump = weierstrass_values(z + om).zeta - weierstrass_values(z).zeta
        assert close(jump, 2 * mpmath.pi / (mpmath.sqrt(3) * om), 1e-18)


@given(generic_points())
@settings(max_examples=20)
def test_parity(z):
    a, b = weierstrass_values(z), weierstrass_values(-z)
    assert close(a.wp, b.wp, 1e-18)
    assert close(a.wp_prime, -b.wp_prime, 1e-18)
    assert close(a.zeta, -b.zeta, 1e-18)


@given(generic_points())
@settings(max_examples=20)
def test_complex_multiplication(z):
    a = weierstrass_values(z)
    b = weierstrass_values(W * z)
    with mpmath.workprec(128):
        assert close(b.wp, W**-2 * a.wp, 1e-18 * (1 + abs(a.wp)))
        assert close(b.wp_prime, a.wp_prime, 1e-18 * (1 + abs(a.wp_prime)))


@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(2, 40))
@settings(max_examples=40)
def test_e1star_periodic_and_conjugate_symmetric(a, b, d):
    c = E(a, b)
    if (c % d).is_zero():
        return
    v, err = eisenstein_e1star(LatticePoint(c, d))
    shifted, err2 = eisenstein_e1star(LatticePoint(c + d, d))
    assert close(v, shifted, 2 * (err + err2) + 1e-22)
    # conj(c/d) in the w-basis: conj(a + b w) = (a - b) - b w
    conj_v, err3 = eisenstein_e1star(LatticePoint(c.conj(), d))
    assert close(mpmath.conj(v), conj_v, 2 * (err + err3) + 1e-22)


def test_e1star_matches_direct_quasi_periodic_formula():
    z = mpmath.mpc(0.3, 0.7)
    om = omega()
    with mpmath.workprec(128):
        kappa = 2 * mpmath.pi / (mpmath.sqrt(3) * om**2)
        e1, _ = eisenstein_e1star(z)
        assert close(e1, weierstrass_values(z).zeta - mpmath.conj(z) * kappa, 1e-20)
        e1b, _ = eisenstein_e1star(z + om * (2 - 3 * W))
        assert close(e1, e1b, 1e-20)
