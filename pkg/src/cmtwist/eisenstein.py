"""Exact arithmetic in the Eisenstein integers Z[w], w^2 + w + 1 = 0."""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from functools import lru_cache

import sympy

from .errors import BadModulus, NoPrimaryAssociate, NotCoprime, NotPrime

SQRT3_HALF = math.sqrt(3.0) / 2.0


@dataclass(frozen=True, slots=True)
class EisensteinInt:
    """The element a + b*w."""

    a: int
    b: int

    # -- construction -------------------------------------------------
    @staticmethod
    def of(value: "EisensteinInt | int") -> "EisensteinInt":
        if isinstance(value, EisensteinInt):
            return value
        return EisensteinInt(int(value), 0)

    @staticmethod
    def parse(text: str) -> "EisensteinInt":
        """Parse ``a+b*w`` style input (``w`` alone, ``-3w``, ``157`` all accepted)."""
        s = text.replace(" ", "").replace("ω", "w").replace("·", "*").replace("−", "-")
        if not s:
            raise ValueError("empty Eisenstein integer")
        a = b = 0
        for sign, body in re.findall(r"([+-]?)([^+-]+)", s):
            mult = -1 if sign == "-" else 1
            if body.endswith("w"):
                coef = body[:-1].rstrip("*")
                b += mult * (int(coef) if coef else 1)
            else:
                a += mult * int(body)
        return EisensteinInt(a, b)

    # -- ring operations ----------------------------------------------
    def __add__(self, other: "EisensteinInt | int") -> "EisensteinInt":
        o = EisensteinInt.of(other)
        return EisensteinInt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other: "EisensteinInt | int") -> "EisensteinInt":
        o = EisensteinInt.of(other)
        return EisensteinInt(self.a - o.a, self.b - o.b)

    def __rsub__(self, other: "EisensteinInt | int") -> "EisensteinInt":
        return EisensteinInt.of(other) - self

    def __neg__(self) -> "EisensteinInt":
        return EisensteinInt(-self.a, -self.b)

    def __mul__(self, other: "EisensteinInt | int") -> "EisensteinInt":
        o = EisensteinInt.of(other)
        a, b, c, d = self.a, self.b, o.a, o.b
        bd = b * d
        return EisensteinInt(a * c - bd, a * d + b * c - bd)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "EisensteinInt":
        if k < 0:
            raise ValueError("negative exponent")
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "EisensteinInt":
        return EisensteinInt(self.a - self.b, -self.b)

    def norm(self) -> int:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def is_rational(self) -> bool:
        return self.b == 0

    def congruent(self, other: "EisensteinInt | int", n: int) -> bool:
        """Congruence modulo the rational integer ``n``."""
        d = self - other
        return d.a % n == 0 and d.b % n == 0

    def divides(self, other: "EisensteinInt | int") -> bool:
        o = EisensteinInt.of(other)
        n = self.norm()
        if n == 0:
            return o.is_zero()
        t = o * self.conj()
        return t.a % n == 0 and t.b % n == 0

    def exact_div(self, other: "EisensteinInt | int") -> "EisensteinInt":
        o = EisensteinInt.of(other)
        n = o.norm()
        t = self * o.conj()
        if n == 0 or t.a % n or t.b % n:
            raise ArithmeticError(f"{o} does not divide {self}")
        return EisensteinInt(t.a // n, t.b // n)

    def __divmod__(self, other: "EisensteinInt | int") -> tuple["EisensteinInt", "EisensteinInt"]:
        o = EisensteinInt.of(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Z[w]")
        t = self * o.conj()
        q = EisensteinInt(_round_div(t.a, n), _round_div(t.b, n))
        return q, self - q * o

    def __mod__(self, other: "EisensteinInt | int") -> "EisensteinInt":
        return divmod(self, other)[1]

    def to_complex(self) -> complex:
        return complex(self.a - 0.5 * self.b, SQRT3_HALF * self.b)

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        bw = {1: "w", -1: "-w"}.get(self.b, f"{self.b}*w")
        if self.a == 0:
            return bw
        return f"{self.a}{'+' if self.b > 0 else ''}{bw}"

    def __repr__(self) -> str:
        return f"EisensteinInt({self.a}, {self.b})"


def _round_div(x: int, n: int) -> int:
    """Nearest integer to x/n for n > 0 (ties rounded up)."""
    return (2 * x + n) // (2 * n)


ZERO = EisensteinInt(0, 0)
ONE = EisensteinInt(1, 0)
OMEGA = EisensteinInt(0, 1)
ONE_MINUS_OMEGA = EisensteinInt(1, -1)
UNITS: tuple[EisensteinInt, ...] = (
    ONE, EisensteinInt(1, 1), OMEGA, EisensteinInt(-1, 0), EisensteinInt(-1, -1), EisensteinInt(0, -1),
)
"""The sixth roots of unity, listed as powers of the primitive root 1 + w = -w^2."""


def norm(z: EisensteinInt) -> int:
    return z.norm()


def gcd(x: EisensteinInt, y: EisensteinInt) -> EisensteinInt:
    while not y.is_zero():
        x, y = y, x % y
    return x


def unit_power(u: EisensteinInt) -> int:
    """Exponent k with u = (1+w)^k."""
    return UNITS.index(u)


# ---------------------------------------------------------------------------
# primes and primary associates


class Convention(enum.Enum):
    MOD3 = "mod3"
    MOD4SIGN = "mod4sign"
    RAMIFIED = "ramified"  # the fixed generator 1 - w of the prime above 3


@dataclass(frozen=True, slots=True)
class PrimaryPrime:
    value: EisensteinInt
    convention: Convention
    rational_norm: int

    def __str__(self) -> str:
        return str(self.value)


def mod3_associate(z: EisensteinInt) -> EisensteinInt:
    """The unique unit multiple of ``z`` congruent to 1 mod 3."""
    for u in UNITS:
        v = u * z
        if v.congruent(1, 3):
            return v
    raise NoPrimaryAssociate(f"{z} is not coprime to 3")


def primary_associate(z: EisensteinInt, convention: Convention = Convention.MOD3) -> PrimaryPrime:
    """Normalize ``z`` to its primary associate.

    ``MOD3`` picks the unique associate that is 1 mod 3.  ``MOD4SIGN`` takes that
    associate and flips its sign so the result is 1 mod 4, which is only possible
    when the generator is already +-1 mod 4.
    """
    z = EisensteinInt.of(z)
    if z.is_zero():
        raise NoPrimaryAssociate("zero has no primary associate")
    v = mod3_associate(z)
    if convention is Convention.MOD4SIGN:
        if v.congruent(1, 4):
            pass
        elif v.congruent(-1, 4):
            v = -v
        else:
            raise NoPrimaryAssociate(f"{z} is not +-1 mod 4 up to units")
    elif convention is not Convention.MOD3:
        raise ValueError(f"unsupported convention {convention}")
    return PrimaryPrime(v, convention, v.norm())


def is_prime(z: EisensteinInt) -> bool:
    n = z.norm()
    if sympy.isprime(n):
        return True
    if z.is_unit() or n == 0:
        return False
    # associates of a rational prime q = 2 mod 3
    r = math.isqrt(n)
    if r * r != n or not sympy.isprime(r) or r % 3 != 2:
        return False
    return any((u * z) == EisensteinInt(r, 0) for u in UNITS)


@lru_cache(maxsize=None)
def split_prime(p: int) -> EisensteinInt:
    """A primary prime of norm ``p`` for a rational prime p = 1 mod 3 (the other is its conjugate)."""
    if p % 3 != 1 or not sympy.isprime(p):
        raise NotPrime(f"{p} is not a prime congruent to 1 mod 3")
    s = int(sympy.sqrt_mod(-3, p))
    w = (-1 + s) * pow(2, -1, p) % p
    g = gcd(EisensteinInt(p, 0), EisensteinInt(w, 0) - OMEGA)
    assert g.norm() == p
    return mod3_associate(g)


@dataclass(frozen=True)
class Factorization:
    unit: EisensteinInt
    factors: tuple[tuple[PrimaryPrime, int], ...]

    def product(self) -> EisensteinInt:
        out = self.unit
        for pp, e in self.factors:
            out = out * pp.value ** e
        return out


def _rational_factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n and d <= 10**6:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        for p, e in sympy.factorint(n).items():
            out[p] = out.get(p, 0) + e
    return out


def factor(z: EisensteinInt) -> Factorization:
    """Factor ``z`` into primes of Z[w]; primes coprime to 3 come in mod-3 primary form."""
    z = EisensteinInt.of(z)
    if z.is_zero():
        raise ValueError("cannot factor zero")
    rest = z
    found: list[tuple[PrimaryPrime, int]] = []

    def strip(pi: EisensteinInt, conv: Convention) -> None:
        nonlocal rest
        e = 0
        while pi.divides(rest):
            rest = rest.exact_div(pi)
            e += 1
        if e:
            found.append((PrimaryPrime(pi, conv, pi.norm()), e))

    for p in sorted(_rational_factor(z.norm())):
        if p == 3:
            strip(ONE_MINUS_OMEGA, Convention.RAMIFIED)
        elif p % 3 == 2:
            strip(mod3_associate(EisensteinInt(p, 0)), Convention.MOD3)
        else:
            pi = split_prime(p)
            strip(pi, Convention.MOD3)
            strip(mod3_associate(pi.conj()), Convention.MOD3)
    assert rest.is_unit(), rest
    return Factorization(rest, tuple(found))


# ---------------------------------------------------------------------------
# residue symbols


@dataclass(frozen=True, slots=True)
class ResidueSymbolValue:
    """The root of unity zeta_m**exponent, with zeta_2=-1, zeta_3=w, zeta_6=1+w."""

    exponent: int
    m: int

    def root(self) -> EisensteinInt:
        return ROOTS_OF_UNITY[self.m] ** self.exponent

    def to_complex(self) -> complex:
        return complex(math.cos(2 * math.pi * self.exponent / self.m), math.sin(2 * math.pi * self.exponent / self.m))

    def __mul__(self, other: "ResidueSymbolValue") -> "ResidueSymbolValue":
        assert self.m == other.m
        return ResidueSymbolValue((self.exponent + other.exponent) % self.m, self.m)


ROOTS_OF_UNITY = {2: EisensteinInt(-1, 0), 3: OMEGA, 6: EisensteinInt(1, 1)}


def powmod(x: EisensteinInt, k: int, modulus: EisensteinInt) -> EisensteinInt:
    result = ONE % modulus
    base = x % modulus
    while k:
        if k & 1:
            result = (result * base) % modulus
        base = (base * base) % modulus
        k >>= 1
    return result


def _prime_symbol_exponent(a: EisensteinInt, pi: EisensteinInt, m: int) -> int:
    n = pi.norm()
    if (n - 1) % m:
        raise BadModulus(f"N({pi})={n} is not 1 mod {m}")
    if pi.divides(a):
        raise NotCoprime(f"{pi} divides {a}")
    r = powmod(a, (n - 1) // m, pi)
    zeta = ROOTS_OF_UNITY[m]
    t = ONE
    for k in range(m):
        if pi.divides(r - t):
            return k
        t = t * zeta
    raise AssertionError("Euler criterion produced a non-root of unity")


def residue_symbol(a: EisensteinInt | int, b: EisensteinInt | int, m: int) -> ResidueSymbolValue:
    """The m-th power residue symbol (a/b)_m, multiplicative in b."""
    if m not in (2, 3, 6):
        raise ValueError("m must be 2, 3 or 6")
    a, b = EisensteinInt.of(a), EisensteinInt.of(b)
    if not gcd(a, b).is_unit():
        raise NotCoprime(f"{a} and {b} share a factor")
    total = 0
    for pp, e in factor(b).factors:
        total += e * _prime_symbol_exponent(a, pp.value, m)
    return ResidueSymbolValue(total % m, m)


def multiplicative_order(a: EisensteinInt | int, pi: PrimaryPrime | EisensteinInt) -> int:
    """Order of ``a`` in the unit group of Z[w]/(pi) for a prime ``pi``."""
    a = EisensteinInt.of(a)
    p = pi.value if isinstance(pi, PrimaryPrime) else EisensteinInt.of(pi)
    if p.divides(a):
        raise NotCoprime(f"{p} divides {a}")
    n = p.norm()
    if sympy.isprime(n) and n > 3:
        q, w = split_root(p)
        return int(sympy.n_order((a.a + a.b * w) % q, q))
    return generic_multiplicative_order(a, p)


def generic_multiplicative_order(a: EisensteinInt, p: EisensteinInt) -> int:
    """Order computed by exponentiation inside Z[w]/(p); used as an oracle for the fast path."""
    group = p.norm() - 1
    order = group
    for q, e in sympy.factorint(group).items():
        for _ in range(e):
            if powmod(a, order // q, p) == ONE % p:
                order //= q
            else:
                break
    return order


def split_root(pi: EisensteinInt) -> tuple[int, int]:
    """For a prime of prime norm p, return (p, w0) with w = w0 mod pi."""
    p = pi.norm()
    return p, (-pi.a * pow(pi.b, -1, p)) % p
