"""Special split primes (quadratic family) and cubic-special primes (cubic family)."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .eisenstein import ONE_MINUS_OMEGA, EisensteinInt, is_prime, mod3_associate, multiplicative_order, split_prime
from .errors import NotPrime


class PrimeKind(enum.Enum):
    SPECIAL_SPLIT = "special_split"
    CUBIC_SPECIAL = "cubic_special"


@dataclass(frozen=True)
class ClassifiedPrime:
    p_or_pi: int | EisensteinInt
    kind: PrimeKind
    witness: dict = field(default_factory=dict, compare=False)

    @property
    def norm(self) -> int:
        v = self.p_or_pi
        return v if isinstance(v, int) else v.norm()


def _plus_minus_one_mod4(z: EisensteinInt) -> bool:
    return z.congruent(1, 4) or z.congruent(-1, 4)


def special_split_witness(p: int) -> dict:
    if not sympy.isprime(p):
        raise NotPrime(f"{p} is not prime")
    if p in (2, 3):
        raise ValueError("2 and 3 are excluded")
    if p % 3 != 1:
        return {"p": p, "splits": False}
    pi = split_prime(p)
    pibar = mod3_associate(pi.conj())
    return {"p": p, "splits": True, "generators": (pi, pibar),
            "pm1_mod4": (_plus_minus_one_mod4(pi), _plus_minus_one_mod4(pibar))}


def is_special_split(p: int) -> bool:
    """p splits in K and both primary generators above p are +-1 mod 4."""
    w = special_split_witness(p)
    return w["splits"] and all(w["pm1_mod4"])


def cubic_special_witness(pi: EisensteinInt) -> dict:
    pi = EisensteinInt.of(pi)
    if not is_prime(pi):
        raise NotPrime(f"{pi} is not prime in Z[w]")
    if pi.norm() == 3:
        raise ValueError("the prime above 3 is excluded")
    gen = mod3_associate(pi)
    cong = gen.congruent(1, 27)
    order = multiplicative_order(ONE_MINUS_OMEGA, gen)
    return {"generator": gen, "one_mod_27": cong, "order_one_minus_w": order, "nine_divides_order": order % 9 == 0}


def is_cubic_special(pi: EisensteinInt) -> bool:
    """pi = 1 mod 27 (up to units) and 9 divides the order of 1 - w modulo pi."""
    w = cubic_special_witness(pi)
    return w["one_mod_27"] and w["nine_divides_order"]


def _primes_of_K(bound: int):
    """Primary primes of Z[w] coprime to 3 with norm <= bound, ordered by norm then coordinates."""
    out: list[EisensteinInt] = []
    for p in sympy.primerange(5, bound + 1):
        if p % 3 == 1:
            pi = split_prime(p)
            pair = sorted({pi, mod3_associate(pi.conj())}, key=lambda z: (z.a, z.b))
            out.extend(pair)
        elif p * p <= bound:
            out.append(mod3_associate(EisensteinInt(p, 0)))
    out.sort(key=lambda z: (z.norm(), z.a, z.b))
    return out


def enumerate_classified(bound: int, kind: PrimeKind | str) -> list[ClassifiedPrime]:
    kind = PrimeKind(kind) if isinstance(kind, str) else kind
    if bound < 7:
        return []
    if kind is PrimeKind.SPECIAL_SPLIT:
        return [ClassifiedPrime(p, kind, special_split_witness(p))
                for p in sympy.primerange(5, bound + 1) if is_special_split(p)]
    found = []
    for pi in _primes_of_K(bound):
        if not pi.congruent(1, 27):
            continue
        w = cubic_special_witness(pi)
        if w["nine_divides_order"]:
            found.append(ClassifiedPrime(pi, kind, w))
    return found


def density_estimate(bound: int) -> tuple[int, int, Fraction | None]:
    """(cubic-special count, count of primes = 1 mod 27, ratio) over primes of K with norm <= bound."""
    special = congruent = 0
    for pi in _primes_of_K(bound):
        if pi.congruent(1, 27):
            congruent += 1
            if multiplicative_order(ONE_MINUS_OMEGA, pi) % 9 == 0:
                special += 1
    return special, congruent, (Fraction(special, congruent) if congruent else None)
