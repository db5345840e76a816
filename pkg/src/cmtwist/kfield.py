"""Exact elements of K = Q(sqrt(-3)), p-adic valuations, and recognition from floats."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .eisenstein import EisensteinInt
from .errors import RecognitionFailed, ZeroValuation

Rationalish = Fraction | int


@dataclass(frozen=True, slots=True)
class KElement:
    """The value x + y*sqrt(-3) with rational x, y."""

    x: Fraction
    y: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    @staticmethod
    def of(v: "KElement | EisensteinInt | Rationalish") -> "KElement":
        if isinstance(v, KElement):
            return v
        if isinstance(v, EisensteinInt):
            # a + b*w = (a - b/2) + (b/2) sqrt(-3)
            return KElement(Fraction(2 * v.a - v.b, 2), Fraction(v.b, 2))
        return KElement(Fraction(v))

    def __add__(self, o: "KElement | Rationalish") -> "KElement":
        o = KElement.of(o)
        return KElement(self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __sub__(self, o: "KElement | Rationalish") -> "KElement":
        o = KElement.of(o)
        return KElement(self.x - o.x, self.y - o.y)

    def __rsub__(self, o: "KElement | Rationalish") -> "KElement":
        return KElement.of(o) - self

    def __neg__(self) -> "KElement":
        return KElement(-self.x, -self.y)

    def __mul__(self, o: "KElement | Rationalish") -> "KElement":
        o = KElement.of(o)
        return KElement(self.x * o.x - 3 * self.y * o.y, self.x * o.y + self.y * o.x)

    __rmul__ = __mul__

    def conj(self) -> "KElement":
        return KElement(self.x, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x + 3 * self.y * self.y

    def inverse(self) -> "KElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in K")
        return KElement(self.x / n, -self.y / n)

    def __truediv__(self, o: "KElement | Rationalish") -> "KElement":
        return self * KElement.of(o).inverse()

    def __rtruediv__(self, o: "KElement | Rationalish") -> "KElement":
        return KElement.of(o) * self.inverse()

    def __pow__(self, k: int) -> "KElement":
        base = self if k >= 0 else self.inverse()
        out = KElement(Fraction(1))
        for _ in range(abs(k)):
            out = out * base
        return out

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_rational(self) -> bool:
        return self.y == 0

    def to_mpc(self) -> mpmath.mpc:
        return mpmath.mpc(mpmath.mpf(self.x.numerator) / self.x.denominator,
                          mpmath.sqrt(3) * mpmath.mpf(self.y.numerator) / self.y.denominator)

    def to_complex(self) -> complex:
        return complex(float(self.x), float(self.y) * 3 ** 0.5)

    def __str__(self) -> str:
        if self.y == 0:
            return str(self.x)
        return f"{self.x}{'+' if self.y > 0 else '-'}{abs(self.y)}*sqrt(-3)"


def _ord_rational(q: Fraction, p: int) -> int:
    if q == 0:
        raise ZeroValuation("valuation of zero")
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def ord_p_K(v: "KElement | EisensteinInt | Rationalish", p: int) -> Fraction:
    """Valuation at the unique prime of K above p (p = 2 or 3), normalized by ord_p(p) = 1.

    Both primes are unique above p (2 is inert, 3 ramifies), so the valuation is
    half the rational valuation of the norm.
    """
    if p not in (2, 3):
        raise ValueError("only p in {2, 3} have a single prime above them in K")
    k = KElement.of(v)
    if k.is_zero():
        raise ZeroValuation("valuation of zero")
    return Fraction(_ord_rational(k.norm(), p), 2)


def ord2_integral_basis(v: KElement) -> int:
    """ord_2 via the basis {1, w}: x + y*sqrt(-3) = (x+y) + 2y*w; 2 is inert so take the minimum."""
    coords = [c for c in (v.x + v.y, 2 * v.y) if c != 0]
    if not coords:
        raise ZeroValuation("valuation of zero")
    return min(_ord_rational(c, 2) for c in coords)


def mpf_to_fraction(x: mpmath.mpf) -> Fraction:
    x = mpmath.mpf(x)
    man, exp = x.man_exp  # unsigned mantissa
    if man == 0:
        return Fraction(0)
    out = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -out if x < 0 else out


def recognize_rational(x: mpmath.mpf | float, err: float, denom_bound: int) -> Fraction:
    if not err < 1.0 / (4 * denom_bound * denom_bound):
        raise RecognitionFailed(f"error {err:.3g} too large for denominator bound {denom_bound}")
    cand = mpf_to_fraction(mpmath.mpf(x)).limit_denominator(denom_bound)
    if abs(mpmath.mpf(x) - mpmath.mpf(cand.numerator) / cand.denominator) > err:
        raise RecognitionFailed(f"no rational with denominator <= {denom_bound} within {err:.3g} of {x}")
    return cand


def recognize_K_element(z: mpmath.mpc | complex, err: float, denom_bound: int) -> KElement:
    """Nearest x + y*sqrt(-3) with denominators <= ``denom_bound``.

    Real and imaginary parts are recognized independently by continued fractions.
    """
    z = mpmath.mpc(z)
    x = recognize_rational(z.real, err, denom_bound)
    y = recognize_rational(z.imag / mpmath.sqrt(3), err, denom_bound)
    k = KElement(x, y)
    if abs(z - k.to_mpc()) > 2 * err:
        raise RecognitionFailed(f"residual too large recognizing {z}")
    return k
