"""Local data for the twist families: Tamagawa numbers, torsion, and the BSD valuation bookkeeping."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .analytic import DEFAULT_CTX, PrecisionContext
from .errors import BadReduction, GoodReduction, InvalidSpec, VanishingLValue
from .lseries import TwistKind, TwistSpec, l_value_rational


class Kodaira(enum.Enum):
    I0 = "I0"
    In = "In"
    II = "II"
    III = "III"
    IV = "IV"
    I0_STAR = "I0*"
    In_STAR = "In*"
    IV_STAR = "IV*"
    III_STAR = "III*"
    II_STAR = "II*"


@dataclass(frozen=True)
class TateResult:
    kodaira: Kodaira
    m: int  # the n of I_n / I_n*
    conductor_exponent: int
    tamagawa: int
    disc_valuation: int


def _v(n: int, p: int) -> int:
    if n == 0:
        return 10**9
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def count_roots_mod_p(coeffs: list[int], p: int) -> int:
    """Number of roots in F_p of sum coeffs[i] T^i (lowest degree first)."""
    t = np.arange(p, dtype=object if p > 3_000_000 else np.int64)
    acc = np.zeros(p, dtype=t.dtype)
    for c in reversed(coeffs):
        acc = (acc * t + (c % p)) % p
    return int(np.count_nonzero(acc == 0))


def _rst(a: list[int], r: int, s: int, t: int) -> list[int]:
    a1, a2, a3, a4, a6 = a
    return [
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s * s,
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
        a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1,
    ]


def _b_invariants(a: list[int]) -> tuple[int, int, int, int, int, int, int]:
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = a1 * a3 + 2 * a4
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    c4 = b2 * b2 - 24 * b4
    c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return b2, b4, b6, b8, c4, c6, disc


def tate(a_invariants: tuple[int, int, int, int, int], p: int) -> TateResult:
    """Tate's algorithm at p for an integral Weierstrass model [a1, a2, a3, a4, a6]."""
    a = [int(x) for x in a_invariants]
    while True:
        b2, b4, b6, b8, c4, c6, disc = _b_invariants(a)
        if disc == 0:
            raise BadReduction("singular curve")
        n = _v(disc, p)
        if n == 0:
            return TateResult(Kodaira.I0, 0, 0, 1, 0)
        # move the singular point of the reduction to (0, 0)
        if p == 2:
            if b2 % 2 == 0:
                r = a[3] % 2
                t = (r * (1 + a[1] + a[3]) + a[4]) % 2
            else:
                r = a[2] % 2
                t = (r + a[3]) % 2
        elif p == 3:
            r = (-b6) % 3 if b2 % 3 == 0 else (-b2 * b4) % 3
            t = (a[0] * r + a[2]) % 3
        else:
            if c4 % p == 0:
                r = (-pow(12, -1, p) * b2) % p
            else:
                r = (-pow(12 * c4, -1, p) * (c6 + b2 * c4)) % p
            t = (-pow(2, -1, p) * (a[0] * r + a[2])) % p
        a = _rst(a, r, 0, t)
        if c4 % p != 0:
            split = count_roots_mod_p([-a[1], a[0], 1], p) > 0
            c = n if split else (2 if n % 2 == 0 else 1)
            return TateResult(Kodaira.In, n, 1, c, n)
        b2, b4, b6, b8, *_ = _b_invariants(a)
        if a[4] % (p * p) != 0:
            return TateResult(Kodaira.II, 0, n, 1, n)
        if b8 % p ** 3 != 0:
            return TateResult(Kodaira.III, 0, n - 1, 2, n)
        if b6 % p ** 3 != 0:
            roots = count_roots_mod_p([-(a[4] // (p * p)), a[2] // p, 1], p)
            return TateResult(Kodaira.IV, 0, n - 2, 3 if roots else 1, n)
        # make p | a1, a2; p^2 | a3, a4; p^3 | a6
        if p == 2:
            s = a[1] % 2
            t = 2 * ((a[4] // 4) % 2)
        else:
            h = pow(2, -1, p)
            s = (-a[0] * h) % p
            t = -a[2] * h
        a = _rst(a, 0, s, t)
        b, c, d = a[1] // p, a[3] // (p * p), a[4] // p ** 3
        w = 27 * d * d - b * b * c * c + 4 * b ** 3 * d - 18 * b * c * d + 4 * c ** 3
        x = 3 * c - b * b
        if w % p != 0:
            roots = count_roots_mod_p([d, c, b, 1], p)
            return TateResult(Kodaira.I0_STAR, 0, n - 4, 1 + roots, n)
        if x % p != 0:
            # double root: move it to 0, then peel off powers of p
            if p == 2:
                r = c
            elif p == 3:
                r = b * c
            else:
                r = (b * c - 9 * d) * pow(2 * x, -1, p)
            a = _rst(a, p * (r % p), 0, 0)
            m, mx, my = 1, p * p, p * p
            cp = 0
            while not cp:
                xa2, xa3 = a[1] // p, a[2] // my
                xa4, xa6 = a[3] // (p * mx), a[4] // (mx * my)
                if (xa3 * xa3 + 4 * xa6) % p != 0:
                    cp = 4 if count_roots_mod_p([-xa6, xa3, 1], p) else 2
                    break
                t = my * (xa6 % 2) if p == 2 else my * ((-xa3 * pow(2, -1, p)) % p)
                a = _rst(a, 0, 0, t)
                my *= p
                m += 1
                xa2, xa3 = a[1] // p, a[2] // my
                xa4, xa6 = a[3] // (p * mx), a[4] // (mx * my)
                if (xa4 * xa4 - 4 * xa2 * xa6) % p != 0:
                    cp = 4 if count_roots_mod_p([xa6, xa4, xa2], p) else 2
                    break
                r = mx * ((xa6 * xa2) % 2) if p == 2 else mx * ((-xa4 * pow(2 * xa2, -1, p)) % p)
                a = _rst(a, r, 0, 0)
                mx *= p
                m += 1
            return TateResult(Kodaira.In_STAR, m, n - m - 4, cp, n)
        # triple root
        if p == 2:
            r = b
        elif p == 3:
            r = -d
        else:
            r = -b * pow(3, -1, p)
        a = _rst(a, p * (r % p), 0, 0)
        x3, x6 = a[2] // (p * p), a[4] // p ** 4
        if (x3 * x3 + 4 * x6) % p != 0:
            roots = count_roots_mod_p([-x6, x3, 1], p)
            return TateResult(Kodaira.IV_STAR, 0, n - 6, 3 if roots else 1, n)
        t = p * p * (x6 % 2) if p == 2 else p * p * ((-x3 * pow(2, -1, p)) % p)
        a = _rst(a, 0, 0, t)
        if a[3] % p ** 4 != 0:
            return TateResult(Kodaira.III_STAR, 0, n - 7, 2, n)
        if a[4] % p ** 6 != 0:
            return TateResult(Kodaira.II_STAR, 0, n - 8, 1, n)
        # not minimal at p: rescale and restart
        a = [a[0] // p, a[1] // p ** 2, a[2] // p ** 3, a[3] // p ** 4, a[4] // p ** 6]


# ---------------------------------------------------------------------------
# the twist families over Q


def _rational_D(spec: TwistSpec) -> int:
    if spec.kind is TwistKind.NONE:
        return 1
    if not spec.D.is_rational():
        raise InvalidSpec("local data over Q needs a rational D")
    return spec.D.a


def model_a6(spec: TwistSpec) -> int:
    """a6 of y^2 = x^3 - 2^4 3^3 lambda, isomorphic over Q to y^2 = 4x^3 - 27 lambda."""
    D = _rational_D(spec)
    return -432 * D ** spec.kind.lambda_power if spec.kind is not TwistKind.NONE else -432


def model(spec: TwistSpec) -> tuple[int, int, int, int, int]:
    return (0, 0, 0, 0, model_a6(spec))


def rational_primes(spec: TwistSpec) -> dict[int, int]:
    """Rational primes of D with multiplicity."""
    D = _rational_D(spec)
    return dict(sympy.factorint(abs(D))) if abs(D) > 1 else {}


def k_of_D(spec: TwistSpec) -> int:
    return len(rational_primes(spec))


@dataclass(frozen=True)
class LocalData:
    q: int
    kodaira: str
    c_q: int
    method: str


def tamagawa(spec: TwistSpec, q: int) -> LocalData:
    """c_q on y^2 = x^3 - 432 D^j by the root tests on the reduction (q | D) or Tate's algorithm (q = 3)."""
    primes = rational_primes(spec)
    a6 = model_a6(spec)
    if q in primes:
        e = primes[q]
        v = _v(a6, q)
        u = a6 // q ** v
        if spec.kind is TwistKind.QUADRATIC:
            # v = 3: P_q(T) = T^3 + a6/q^3 splits into 1 + #roots components
            roots = count_roots_mod_p([u, 0, 0, 1], q)
            return LocalData(q, Kodaira.I0_STAR.value, 1 + roots, f"I0*: 1 + #roots of T^3 + a6/q^3 mod {q}")
        if spec.kind is TwistKind.CUBIC:
            typ = Kodaira.IV if e == 1 else Kodaira.IV_STAR
            square = sympy.legendre_symbol(u % q, q) == 1
            return LocalData(q, typ.value, 3 if square else 1,
                             f"{typ.value}: T^2 - a6/q^{v} has roots mod {q} iff -3 is a square")
    if q == 2 and _rational_D(spec) % 2 != 0:
        raise GoodReduction("q = 2 is a prime of good reduction")
    res = tate(model(spec), q)
    if res.kodaira is Kodaira.I0:
        raise GoodReduction(f"q = {q} is a prime of good reduction")
    return LocalData(q, res.kodaira.value, res.tamagawa, f"Tate's algorithm at {q}")


def _rational_cube_root(n: int) -> int | None:
    r = round(abs(n) ** (1 / 3)) if abs(n) < 2**60 else int(sympy.integer_nthroot(abs(n), 3)[0])
    for c in (r - 1, r, r + 1):
        if c ** 3 == abs(n):
            return c if n >= 0 else -c
    return None


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def torsion_order(spec: TwistSpec) -> int:
    """#E(Q)_tors for y^2 = x^3 + k: 2-torsion from rational roots of x^3 + k, 3-torsion from psi_3 = 3x(x^3 + 4k)."""
    k = model_a6(spec)
    two = 2 if _rational_cube_root(-k) is not None else 1
    three = 1
    if _is_square(k):
        three += 2  # (0, +-sqrt k)
    x3 = _rational_cube_root(-4 * k)
    if x3 is not None and x3 != 0 and _is_square(x3 ** 3 + k):
        three += 2
    order = two * three
    _check_torsion_filter(k, order)
    return order


def _check_torsion_filter(k: int, order: int) -> None:
    """Torsion injects into E(F_p) at good p > 3; the order must divide each #E(F_p)."""
    used = 0
    for p in sympy.primerange(5, 400):
        if k % p == 0:
            continue
        count = _count(k, p)
        if count % order != 0:
            raise AssertionError(f"torsion order {order} does not divide #E(F_{p}) = {count}")
        used += 1
        if used == 4:
            return


def _count(k: int, p: int) -> int:
    """#E(F_p) for y^2 = x^3 + k."""
    x = np.arange(p, dtype=np.int64)
    rhs = (x * x % p * x + k % p) % p
    leg = -np.ones(p, dtype=np.int64)
    leg[0] = 0
    leg[(x[1:] * x[1:]) % p] = 1
    return p + 1 + int(leg[rhs].sum())


def bad_primes(spec: TwistSpec) -> list[int]:
    return sorted({3} | set(rational_primes(spec)))


def local_product_valuation(spec: TwistSpec, p: int) -> tuple[int, list[LocalData]]:
    """ord_p(prod c_q / #tors^2)."""
    data = [tamagawa(spec, q) for q in bad_primes(spec)]
    tors = torsion_order(spec)
    val = sum(_v(d.c_q, p) if d.c_q > 1 else 0 for d in data) - 2 * (_v(tors, p) if tors > 1 else 0)
    return val, data


def theorem_bound(spec: TwistSpec) -> tuple[int, int]:
    """(p, bound): ord_2 >= 2k(D) for quadratic, ord_3 >= k(D) + 1 for cubic."""
    k = k_of_D(spec)
    if spec.kind is TwistKind.QUADRATIC:
        return 2, 2 * k
    if spec.kind is TwistKind.CUBIC:
        return 3, k + 1
    raise InvalidSpec("no valuation bound for the untwisted curve")


@dataclass(frozen=True)
class BsdReport:
    p: int
    l_alg: Fraction
    ord_L: int
    ord_rhs_local: int
    predicted_sha_ord: int
    bound: int
    tight: bool
    local: tuple[LocalData, ...]
    torsion: int


def bsd_report(spec: TwistSpec, p: int, ctx: PrecisionContext = DEFAULT_CTX, lvalue=None) -> BsdReport:
    if p not in (2, 3):
        raise ValueError("p must be 2 or 3")
    lv = lvalue if lvalue is not None else l_value_rational(spec, ctx)
    if lv.vanishes:
        raise VanishingLValue(f"L(E,1) = 0 for {spec.label()}: the rank is positive and no report is defined")
    value = Fraction(lv.recognized)
    ord_L = _v(value.numerator, p) - _v(value.denominator, p)
    rhs, data = local_product_valuation(spec, p)
    predicted = ord_L - rhs
    if predicted < 0:
        warnings.warn(f"negative predicted Sha valuation {predicted} for {spec.label()} at p={p}")
    if spec.kind is TwistKind.NONE:
        bound = 0
    else:
        bp, bound = theorem_bound(spec)
        if bp != p:
            bound = 0
    return BsdReport(p, value, ord_L, rhs, predicted, bound, ord_L == bound, tuple(data), torsion_order(spec))
