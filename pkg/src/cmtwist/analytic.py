"""Period, Weierstrass functions and the Kronecker-Eisenstein value E1* on the lattice Omega*Z[w].

The curve is y^2 = 4x^3 - 27, so g2 = 0 and g3 = 27, and its period lattice is
Omega*Z[w] with Omega the least positive real period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .eisenstein import EisensteinInt
from .errors import PoleAtLatticePoint, PrecisionUnachievable

G3 = 27


@dataclass(frozen=True)
class PrecisionContext:
    working_bits: int = 128
    target_abs_error: float = 1e-25

    def __post_init__(self) -> None:
        if self.working_bits < 64:
            raise ValueError("working_bits must be at least 64")
        if not self.target_abs_error >= 2.0 ** (-self.working_bits + 16):
            raise ValueError("target_abs_error is finer than the working precision allows")

    def workprec(self):
        return mpmath.workprec(self.working_bits)


DEFAULT_CTX = PrecisionContext()


# ---------------------------------------------------------------------------
# the period


def _real_root(prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return mpmath.cbrt(mpmath.mpf(27) / 4)


@lru_cache(maxsize=None)
def _period_agm(prec: int) -> mpmath.mpf:
    # one real root e1; for y^2 = 4x^3 + b6 the AGM data are 3*e1 and sqrt(3)*e1
    with mpmath.workprec(prec + 20):
        e1 = _real_root(prec + 20)
        beta, gamma = 3 * e1, mpmath.sqrt(3) * e1
        return 2 * mpmath.pi / mpmath.agm(2 * mpmath.sqrt(gamma), mpmath.sqrt(2 * gamma + beta))


@lru_cache(maxsize=None)
def _period_quad(prec: int) -> mpmath.mpf:
    # x = e1 + t^2 removes the endpoint singularity: dx/sqrt(4x^3-27) = dt/sqrt(x^2 + e1 x + e1^2)
    with mpmath.workprec(prec + 20):
        e1 = _real_root(prec + 20)

        def integrand(t):
            x = e1 + t * t
            return 1 / mpmath.sqrt(x * x + x * e1 + e1 * e1)

        return 2 * mpmath.quad(integrand, [0, 1, 4, mpmath.inf])


@lru_cache(maxsize=None)
def _period_beta(prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec + 20):
        e1 = _real_root(prec + 20)
        return mpmath.beta(mpmath.mpf(1) / 6, mpmath.mpf(1) / 2) / (3 * mpmath.sqrt(e1))


def fundamental_period(ctx: PrecisionContext = DEFAULT_CTX, method: str = "agm") -> tuple[mpmath.mpf, float]:
    """Least positive real period Omega and an error bound.

    ``agm`` is the production route; ``quad`` (numerical integration of the
    differential) and ``beta`` (closed form) exist as independent oracles.
    """
    fn = {"agm": _period_agm, "quad": _period_quad, "beta": _period_beta}[method]
    value = fn(ctx.working_bits)
    err = 2.0 ** (-ctx.working_bits + 4)
    if method == "quad":
        err = max(err, 1e-30)
    if err > ctx.target_abs_error:
        raise PrecisionUnachievable(f"period error {err:.3g} exceeds target")
    with ctx.workprec():
        return +value, err


def omega(ctx: PrecisionContext = DEFAULT_CTX) -> mpmath.mpf:
    return fundamental_period(ctx)[0]


def area_constant(ctx: PrecisionContext = DEFAULT_CTX) -> mpmath.mpf:
    """kappa = 2*pi/(sqrt(3)*Omega^2), the reciprocal of the area term A(L)."""
    om = omega(ctx)
    with ctx.workprec():
        return 2 * mpmath.pi / (mpmath.sqrt(3) * om * om)


# ---------------------------------------------------------------------------
# Laurent coefficients: wp(z) = z^-2 + sum_{k>=2} c_k z^(2k-2)


@lru_cache(maxsize=None)
def _laurent_coeffs(prec: int, count: int) -> tuple[mpmath.mpf, ...]:
    with mpmath.workprec(prec + 20):
        c = [mpmath.mpf(0)] * (count + 1)
        if count >= 3:
            c[3] = mpmath.mpf(G3) / 28
        for k in range(4, count + 1):
            s = mpmath.fsum(c[m] * c[k - m] for m in range(2, k - 1))
            c[k] = 3 * s / ((2 * k + 1) * (k - 3))
        return tuple(c)


def _term_count(prec: int) -> int:
    # reduced |z| <= Omega/sqrt(3), so successive nonzero terms shrink by about 27
    return int(0.7 * prec) + 30


def _tail_bound(r: float, count: int, om: float) -> float:
    """Bound on the omitted terms at |z| = r*Omega (coefficients are <= 7(2k-1)/Omega^(2k))."""
    if r == 0.0:
        return 0.0
    k = count + 1
    r2 = r * r
    return 7.0 * (2 * k + 1) * r2 ** (k - 1) / (1 - r2) ** 2 / (om * om) * max(1.0, 1.0 / (r * om)) * 4


# ---------------------------------------------------------------------------
# lattice points and reduction


@dataclass(frozen=True)
class LatticePoint:
    """The point z = c*Omega/d (+ Omega/3 when ``third_offset``)."""

    c: EisensteinInt
    d: EisensteinInt | int = 1
    third_offset: bool = False

    def coords(self) -> tuple[Fraction, Fraction]:
        """Exact rational (x, y) with z/Omega = x + y*w."""
        d = EisensteinInt.of(self.d)
        n = d.norm()
        if n == 0:
            raise ZeroDivisionError("zero denominator")
        t = EisensteinInt.of(self.c) * d.conj()
        x, y = Fraction(t.a, n), Fraction(t.b, n)
        if self.third_offset:
            x += Fraction(1, 3)
        return x, y


def _enorm(x: Fraction, y: Fraction) -> Fraction:
    return x * x - x * y + y * y


def reduce_coords(x: Fraction, y: Fraction) -> tuple[Fraction, Fraction, int, int]:
    """Return (x0, y0, m, n) with x + y*w = (x0 + y0*w) + (m + n*w) and x0 + y0*w in the hexagonal cell."""
    m0, n0 = round(x), round(y)
    best = None
    for dm in (-1, 0, 1):
        for dn in (-1, 0, 1):
            m, n = m0 + dm, n0 + dn
            x0, y0 = x - m, y - n
            key = (_enorm(x0, y0), m, n)
            if best is None or key < best[0]:
                best = (key, x0, y0, m, n)
    _, x0, y0, m, n = best
    return x0, y0, m, n


def _coords_to_mpc(x, y) -> mpmath.mpc:
    def conv(q):
        return mpmath.mpf(q.numerator) / q.denominator if isinstance(q, Fraction) else mpmath.mpf(q)

    xr, yr = conv(x), conv(y)
    return mpmath.mpc(xr - yr / 2, mpmath.sqrt(3) / 2 * yr)


def _reduce_complex(u: mpmath.mpc) -> tuple[mpmath.mpc, int, int]:
    y = u.imag * 2 / mpmath.sqrt(3)
    x = u.real + y / 2
    m0, n0 = int(mpmath.nint(x)), int(mpmath.nint(y))
    best = None
    for dm in (-1, 0, 1):
        for dn in (-1, 0, 1):
            m, n = m0 + dm, n0 + dn
            u0 = u - _coords_to_mpc(m, n)
            if best is None or abs(u0) < best[0]:
                best = (abs(u0), u0, m, n)
    return best[1], best[2], best[3]


# ---------------------------------------------------------------------------
# Weierstrass values


@dataclass(frozen=True)
class WeierstrassValues:
    wp: mpmath.mpc
    wp_prime: mpmath.mpc
    zeta: mpmath.mpc
    err: float


def series_values(z: mpmath.mpc, ctx: PrecisionContext = DEFAULT_CTX) -> WeierstrassValues:
    """Evaluate the Laurent series at ``z`` with no lattice reduction (|z| < Omega required)."""
    om = omega(ctx)
    r = float(abs(z) / om)
    if r >= 0.99:
        raise PrecisionUnachievable("series argument outside the disc of convergence")
    if z == 0:
        raise PoleAtLatticePoint("z is a lattice point")
    count = _term_count(ctx.working_bits)
    if r > 0.6:
        count = int(count * math.log(3) / (-2 * math.log(r))) + 10
    coeffs = _laurent_coeffs(ctx.working_bits, count)
    with ctx.workprec():
        z2 = z * z
        wp = 1 / z2
        wpp = -2 / (z2 * z)
        zeta = 1 / z
        # only k = 0 mod 3 carries a nonzero coefficient; step by z^6
        z6 = z2 * z2 * z2
        pk = z2 * z2  # z^(2k-2) at k=3
        for k in range(3, count + 1, 3):
            ck = coeffs[k]
            wp += ck * pk
            wpp += (2 * k - 2) * ck * pk / z
            zeta -= ck * pk * z / (2 * k - 1)
            pk *= z6
        rounding = 2.0 ** (-ctx.working_bits + 12) * float(max(1, abs(wp), abs(wpp), abs(zeta)))
    tail = _tail_bound(r, count, float(om))
    return WeierstrassValues(wp, wpp, zeta, tail * 2 + rounding)


def _check(vals: WeierstrassValues, ctx: PrecisionContext) -> WeierstrassValues:
    if vals.err > ctx.target_abs_error:
        raise PrecisionUnachievable(f"error {vals.err:.3g} exceeds target {ctx.target_abs_error:.3g}")
    return vals


def weierstrass_values(z: LatticePoint | complex | mpmath.mpc, ctx: PrecisionContext = DEFAULT_CTX) -> WeierstrassValues:
    """wp, wp', zeta at z for the lattice Omega*Z[w].

    The argument is reduced into the hexagonal cell around 0 (exactly for a
    ``LatticePoint``), then the Laurent series is summed; zeta picks up the
    quasi-period conj(w)*kappa for the lattice vector w removed.
    """
    om = omega(ctx)
    with ctx.workprec():
        if isinstance(z, LatticePoint):
            x0, y0, m, n = reduce_coords(*z.coords())
            if x0 == 0 and y0 == 0:
                raise PoleAtLatticePoint(f"{z} lies on the lattice")
            z0 = om * _coords_to_mpc(x0, y0)
        else:
            u0, m, n = _reduce_complex(mpmath.mpc(z) / om)
            if abs(u0) < mpmath.mpf(2) ** (-ctx.working_bits + 8):
                raise PoleAtLatticePoint(f"{z} lies on the lattice")
            z0 = om * u0
        vals = series_values(z0, ctx)
        shift = om * _coords_to_mpc(m, n)
        zeta = vals.zeta + mpmath.conj(shift) * area_constant(ctx)
    return _check(WeierstrassValues(vals.wp, vals.wp_prime, zeta, vals.err * (1 + abs(m) + abs(n))), ctx)


def eisenstein_e1star(z: LatticePoint | complex | mpmath.mpc, ctx: PrecisionContext = DEFAULT_CTX) -> tuple[mpmath.mpc, float]:
    """E1*(z) = zeta(z) - conj(z)*kappa; lattice periodic, evaluated on the reduced argument."""
    om = omega(ctx)
    with ctx.workprec():
        if isinstance(z, LatticePoint):
            x0, y0, _, _ = reduce_coords(*z.coords())
            if x0 == 0 and y0 == 0:
                raise PoleAtLatticePoint(f"{z} lies on the lattice")
            z0 = om * _coords_to_mpc(x0, y0)
        else:
            u0, _, _ = _reduce_complex(mpmath.mpc(z) / om)
            if abs(u0) < mpmath.mpf(2) ** (-ctx.working_bits + 8):
                raise PoleAtLatticePoint(f"{z} lies on the lattice")
            z0 = om * u0
        vals = series_values(z0, ctx)
        value = vals.zeta - mpmath.conj(z0) * area_constant(ctx)
    if vals.err > ctx.target_abs_error:
        raise PrecisionUnachievable(f"error {vals.err:.3g} exceeds target")
    return value, vals.err


def torsion_point(c: EisensteinInt | int, d: EisensteinInt | int, ctx: PrecisionContext = DEFAULT_CTX) -> tuple[mpmath.mpc, mpmath.mpc]:
    """Coordinates (wp(c*Omega/d), wp'(c*Omega/d)) of a torsion point on y^2 = 4x^3 - 27."""
    vals = weierstrass_values(LatticePoint(EisensteinInt.of(c), d), ctx)
    return vals.wp, vals.wp_prime


# ---------------------------------------------------------------------------
# vectorised double-precision version for bulk sums


@lru_cache(maxsize=None)
def _float_coeffs() -> np.ndarray:
    return np.array([float(c) for c in _laurent_coeffs(64, 120)])


def wp_batch(x0: np.ndarray, y0: np.ndarray, om: float) -> tuple[np.ndarray, np.ndarray]:
    """wp and wp' at already-reduced points Omega*(x0 + y0*w), in float64."""
    z = om * ((x0 - 0.5 * y0) + 1j * (math.sqrt(3) / 2) * y0)
    c = _float_coeffs()
    z2 = z * z
    z6 = z2 * z2 * z2
    wp = 1 / z2
    wpp = -2 / (z2 * z)
    pk = z2 * z2
    for k in range(3, len(c), 3):
        wp = wp + c[k] * pk
        wpp = wpp + (2 * k - 2) * c[k] * pk / z
        pk = pk * z6
    return wp, wpp
