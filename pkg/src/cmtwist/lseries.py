"""Hecke characters of the twists E(lambda): y^2 = 4x^3 - 27*lambda and their L-values at s = 1.

Two independent routes are implemented:

* ``l_value_rational`` sums the Dirichlet series over Q, with a_p obtained from
  the Euler-criterion form of the Hecke character at each split prime;
* ``hecke_l_value`` sums over the ideals of Z[w] directly (primary generators),
  with the character evaluated by reciprocity through lookup tables modulo D.

Both use the smoothed approximate functional equation.  The root number is
solved for from two smoothing parameters and checked at a third.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import mpmath
import numpy as np
import sympy

from .analytic import DEFAULT_CTX, PrecisionContext, omega
from .eisenstein import (
    ONE,
    UNITS,
    Convention,
    EisensteinInt,
    PrimaryPrime,
    factor,
    mod3_associate,
    primary_associate,
    residue_symbol,
    split_prime,
    split_root,
)
from .errors import BadPrime, BadReduction, InvalidSpec, PrecisionUnachievable, RecognitionFailed
from .kfield import KElement, recognize_K_element, recognize_rational

# Exponent e in psi_lambda(p) = (lambda/pi)_6^e * pi.  Fixed by comparing traces with
# point counts on y^2 = 4x^3 - 27*lambda (see tests/test_lseries.py::test_calibration).
SEXTIC_EXPONENT = -1

T_VALUES = (Fraction(4, 5), Fraction(1), Fraction(5, 4))
T_SLOWEST = 0.8


class TwistKind(enum.Enum):
    NONE = "none"
    QUADRATIC = "quadratic"
    CUBIC = "cubic"

    @property
    def lambda_power(self) -> int:
        return {TwistKind.NONE: 0, TwistKind.QUADRATIC: 3, TwistKind.CUBIC: 2}[self]

    @property
    def symbol_order(self) -> int:
        return {TwistKind.NONE: 1, TwistKind.QUADRATIC: 2, TwistKind.CUBIC: 3}[self]


# ---------------------------------------------------------------------------
# twist specifications


def parse_d(text: str) -> EisensteinInt:
    """Parse D given as ``a+b*w``, or a product such as ``19^2*37`` or ``7*(1+3*w)``.

    Inside a product, a factor involving w must be parenthesized.
    """
    s = text.replace(" ", "").replace("·", "*").replace("ω", "w").replace("−", "-").replace("**", "^")
    if "w" in s and "(" not in s:
        return EisensteinInt.parse(s)
    factors: list[str] = []
    depth, cur = 0, ""
    for ch in s:
        depth += (ch == "(") - (ch == ")")
        if ch == "*" and depth == 0:
            factors.append(cur)
            cur = ""
        else:
            cur += ch
    factors.append(cur)
    out = ONE
    for f in factors:
        base, _, exp = f.rpartition("^") if ")^" in f or ("^" in f and "(" not in f) else (f, "", "")
        base = base.strip()
        if base.startswith("(") and base.endswith(")"):
            base = base[1:-1]
        out = out * EisensteinInt.parse(base) ** (int(exp) if exp else 1)
    return out


@dataclass(frozen=True)
class TwistSpec:
    """The twist lambda = D^3 (quadratic) or D^2 (cubic) of y^2 = 4x^3 - 27."""

    kind: TwistKind
    D: EisensteinInt
    primes: tuple[tuple[PrimaryPrime, int], ...]
    sign: int = 1  # D = sign * prod(primes); only +1 is accepted for cubic
    is_rational: bool = True
    valid: bool = True  # theorem hypotheses (special split / cubic-special) hold

    @staticmethod
    def untwisted() -> "TwistSpec":
        return TwistSpec(TwistKind.NONE, ONE, (), 1, True, True)

    @staticmethod
    def quadratic(D: EisensteinInt | int | str) -> "TwistSpec":
        D = parse_d(D) if isinstance(D, str) else EisensteinInt.of(D)
        fac = factor(D)
        primes = []
        prod = ONE
        for pp, e in fac.factors:
            if e != 1:
                raise InvalidSpec(f"quadratic D must be squarefree, {pp} appears {e} times")
            if pp.convention is Convention.RAMIFIED or pp.rational_norm % 2 == 0:
                raise InvalidSpec("D must be coprime to 6")
            try:
                q = primary_associate(pp.value, Convention.MOD4SIGN)
            except Exception as exc:
                raise InvalidSpec(f"prime {pp} has no generator that is +-1 mod 4") from exc
            primes.append((q, 1))
            prod = prod * q.value
        if not primes:
            raise InvalidSpec("quadratic twist needs a nontrivial D")
        unit = D.exact_div(prod)
        # units that are squares (powers of w) leave lambda = D^3 unchanged
        if unit in (ONE, UNITS[2], UNITS[4]):
            sign = 1
        else:
            raise InvalidSpec(f"D = {D} is not a square-unit multiple of a product of 1 mod 4 primes")
        from .classify import is_special_split
        valid = all(is_special_split(pp.rational_norm) for pp, _ in primes if sympy.isprime(pp.rational_norm))
        valid = valid and all(sympy.isprime(pp.rational_norm) for pp, _ in primes)
        return TwistSpec(TwistKind.QUADRATIC, D, tuple(primes), sign, D.is_rational(), valid)

    @staticmethod
    def cubic(D: EisensteinInt | int | str) -> "TwistSpec":
        D = parse_d(D) if isinstance(D, str) else EisensteinInt.of(D)
        fac = factor(D)
        primes = []
        prod = ONE
        for pp, e in fac.factors:
            if e >= 3:
                raise InvalidSpec(f"cubic D must be cube-free, {pp} appears {e} times")
            if pp.convention is Convention.RAMIFIED:
                raise InvalidSpec("D must be coprime to 3")
            primes.append((pp, e))
            prod = prod * pp.value ** e
        if not primes:
            raise InvalidSpec("cubic twist needs a nontrivial D")
        unit = D.exact_div(prod)
        if unit not in (ONE, UNITS[3]):
            raise InvalidSpec(f"D = {D} must be +-1 mod 3 (a unit w^k would change the twist class)")
        from .classify import is_cubic_special
        valid = all(pp.rational_norm % 3 == 1 and is_cubic_special(pp.value) for pp, _ in primes)
        return TwistSpec(TwistKind.CUBIC, D, tuple(primes), 1, D.is_rational(), valid)

    @staticmethod
    def make(kind: TwistKind | str, D: EisensteinInt | int | str) -> "TwistSpec":
        kind = TwistKind(kind) if isinstance(kind, str) else kind
        if kind is TwistKind.NONE:
            return TwistSpec.untwisted()
        return TwistSpec.quadratic(D) if kind is TwistKind.QUADRATIC else TwistSpec.cubic(D)

    # -- derived data ----------------------------------------------------
    @property
    def lam(self) -> EisensteinInt:
        return self.D ** self.kind.lambda_power

    def lambda_mod(self, p: int, pi: EisensteinInt | None = None) -> int:
        """lambda reduced to F_p, via pi when lambda is not rational."""
        lam = self.lam
        if lam.is_rational():
            return lam.a % p
        _, w = split_root(pi)
        return (lam.a + lam.b * w) % p

    def bad_norms(self) -> set[int]:
        return {3} | {pp.rational_norm for pp, _ in self.primes}

    def rad_norm(self) -> int:
        n = 1
        for pp, _ in self.primes:
            n *= pp.rational_norm
        return n

    def conductor(self) -> int:
        """|d_K| * N(f) for the conductor f of psi_lambda."""
        return 3 * 3 ** self.conductor_exponent_at_3() * self.rad_norm()

    def conductor_exponent_at_3(self) -> int:
        """Exponent of the prime (1-w) in the conductor: 1 when psi_lambda is trivial on w mod 3, else 2.

        chi_3(w) = psi((w))/w / eps(w) = w^-1 / eps(w), and eps(w) is read off the reciprocity
        tables; it can only equal w^-1 for cubic twists with D != 1 mod 9.
        """
        if self.kind is not TwistKind.CUBIC:
            return 2
        s = ReciprocityCharacter(self).unit_exponents(np.array([0]), np.array([1]))[0][0]
        return 1 if int(s) == 4 else 2

    def k_rational(self) -> int:
        """Number of distinct rational primes below the primes of D."""
        return len({_rational_below(pp) for pp, _ in self.primes})

    def divides_conductor(self, pi: EisensteinInt) -> bool:
        return any(pp.value.divides(pi) and pi.divides(pp.value) for pp, _ in self.primes)

    def label(self) -> str:
        return f"{self.kind.value}:{self.D}"


def _rational_below(pp: PrimaryPrime) -> int:
    n = pp.rational_norm
    r = math.isqrt(n)
    return r if r * r == n else n


# ---------------------------------------------------------------------------
# the character: Euler-criterion form (definition) and point counts


def twist_unit_exponent(spec: TwistSpec, pi: EisensteinInt) -> int:
    """s in psi_lambda((pi)) = (1+w)^s * pi for a mod-3 primary prime pi, by Euler's criterion."""
    if spec.kind is TwistKind.NONE:
        return 0
    k = residue_symbol(spec.lam, pi, 6).exponent
    return (SEXTIC_EXPONENT * k) % 6


def psi_twist(spec: TwistSpec, p: PrimaryPrime | EisensteinInt) -> EisensteinInt:
    """psi_lambda at the prime generated by ``p`` (returned as root of unity times the primary generator)."""
    v = p.value if isinstance(p, PrimaryPrime) else EisensteinInt.of(p)
    if v.norm() % 3 == 0 or any(pp.value.divides(v) for pp, _ in spec.primes):
        raise BadPrime(f"{v} divides 3D")
    pi = mod3_associate(v)
    return UNITS[twist_unit_exponent(spec, pi)] * pi


def trace(z: EisensteinInt) -> int:
    return 2 * z.a - z.b


def ap_char(spec: TwistSpec, p: int) -> int:
    """a_p of E(lambda) over Q for a rational twist (0 at inert primes)."""
    if p in spec.bad_norms() or any(pp.rational_norm == p * p for pp, _ in spec.primes):
        raise BadPrime(f"{p} divides 3*N(D)")
    if p == 2 or p % 3 == 2:
        return 0
    if not spec.lam.is_rational():
        raise ValueError("ap_char over Q needs a rational twist; use psi_twist per prime of K")
    return trace(psi_twist(spec, split_prime(p)))


def ap_point_count(lam_mod_p: int, p: int) -> int:
    """p + 1 - #E(F_p) for y^2 = 4x^3 - 27*lambda, by summing the quadratic character over x."""
    if p in (2, 3) or lam_mod_p % p == 0:
        raise BadReduction(f"y^2 = 4x^3 - 27*{lam_mod_p} is singular mod {p}")
    x = np.arange(p, dtype=np.int64)
    rhs = (4 * (x * x % p) % p * x - 27 * lam_mod_p) % p
    leg = _legendre_table(p)
    return -int(leg[rhs].sum())


@lru_cache(maxsize=64)
def _legendre_table(p: int) -> np.ndarray:
    leg = -np.ones(p, dtype=np.int64)
    x = np.arange(1, p, dtype=np.int64)
    leg[(x * x) % p] = 1
    leg[0] = 0
    return leg


# ---------------------------------------------------------------------------
# the character: reciprocity form, vectorised over lattice points


class _SymbolTable:
    """Exponent of (alpha/pi)_m as a function of alpha = x + y*w, for one prime pi."""

    def __init__(self, pi: EisensteinInt, m: int):
        self.m = m
        n = pi.norm()
        if sympy.isprime(n):
            self.kind = "split"
            self.p, self.w = split_root(pi)
            self.table = _split_table(self.p, self.w, m)
        else:
            q = math.isqrt(n)
            self.kind = "inert"
            self.p = q
            self.table = _inert_table(q, m)

    def exponents(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        p = self.p
        if self.kind == "split":
            idx = (x % p + (y % p) * self.w) % p
        else:
            idx = (x % p) * p + (y % p)
        return self.table[idx]


@lru_cache(maxsize=None)
def _split_table(p: int, w: int, m: int) -> np.ndarray:
    g = int(sympy.primitive_root(p))
    zeta = {2: p - 1, 3: w, 6: (1 + w) % p}[m]
    h = pow(g, (p - 1) // m, p)
    t = next(t for t in range(m) if pow(zeta, t, p) == h)
    table = np.full(p, -1, dtype=np.int64)
    # table[g^i] = t*i mod m, filled by running through the powers of g
    powers = _power_sequence(g, p)
    table[powers] = (t * np.arange(p - 1, dtype=np.int64)) % m
    return table


def _power_sequence(g: int, p: int) -> np.ndarray:
    out = np.empty(p - 1, dtype=np.int64)
    v = 1
    # blocked doubling keeps this vectorised: out[k*B + j] = g^(kB) * g^j
    block = min(p - 1, 4096)
    for j in range(block):
        out[j] = v
        v = v * g % p
    gb = v  # g^block
    filled = block
    while filled < p - 1:
        take = min(filled, p - 1 - filled)
        mult = pow(g, filled, p)
        out[filled:filled + take] = out[:take] * mult % p
        filled += take
    del gb
    return out


@lru_cache(maxsize=None)
def _inert_table(q: int, m: int) -> np.ndarray:
    order = q * q - 1
    # F_{q^2} = F_q[w], w^2 = -1 - w; search a generator
    def mul(u, v):
        a, b = u
        c, d = v
        bd = b * d
        return ((a * c - bd) % q, (a * d + b * c - bd) % q)

    def pw(u, k):
        r = (1, 0)
        while k:
            if k & 1:
                r = mul(r, u)
            u = mul(u, u)
            k >>= 1
        return r

    primes = list(sympy.factorint(order))
    gen = None
    for a in range(q):
        for b in range(1, q):
            cand = (a, b)
            if all(pw(cand, order // r) != (1, 0) for r in primes):
                gen = cand
                break
        if gen:
            break
    zeta = {2: (q - 1, 0), 3: (0, 1), 6: (1, 1)}[m]
    h = pw(gen, order // m)
    t = next(t for t in range(m) if pw(zeta, t) == h)
    table = np.full(q * q, -1, dtype=np.int64)
    v = (1, 0)
    for i in range(order):
        table[v[0] * q + v[1]] = (t * i) % m
        v = mul(v, gen)
    return table


class ReciprocityCharacter:
    """alpha -> s with psi_lambda((alpha)) = (1+w)^s * alpha for primary alpha coprime to 3D.

    Built from (alpha/pi_j)_m lookup tables through quadratic / cubic reciprocity,
    so the prime 2 and composite alpha need no special treatment.
    """

    def __init__(self, spec: TwistSpec):
        self.spec = spec
        m = spec.kind.symbol_order
        self.m = m
        self.tables = [(_SymbolTable(pp.value, m), e) for pp, e in spec.primes] if m > 1 else []

    def unit_exponents(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (s, ok) arrays; ok is False where alpha shares a factor with D."""
        total = np.zeros(x.shape, dtype=np.int64)
        ok = np.ones(x.shape, dtype=bool)
        for tab, e in self.tables:
            k = tab.exponents(x, y)
            ok &= k >= 0
            total += e * k
        if self.spec.kind is TwistKind.QUADRATIC:
            # zeta_2^E = (1+w)^(3E); the exponent sign is immaterial for +-1
            s = (3 * total) % 6
        elif self.spec.kind is TwistKind.CUBIC:
            s = (2 * SEXTIC_EXPONENT * total) % 6
        else:
            s = total
        return s, ok

    def unit_exponent(self, alpha: EisensteinInt) -> int:
        s, ok = self.unit_exponents(np.array([alpha.a]), np.array([alpha.b]))
        if not ok[0]:
            raise BadPrime(f"{alpha} is not coprime to D")
        return int(s[0])

    def psi(self, alpha: EisensteinInt) -> EisensteinInt:
        a = mod3_associate(alpha)
        return UNITS[self.unit_exponent(a)] * a


# ---------------------------------------------------------------------------
# lattice points


def primary_points(bound: int, chunk: int = 1 << 21) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """All alpha = x + y*w with alpha = 1 mod 3 and 0 < N(alpha) <= bound, in fixed order, chunked."""
    ymax = math.isqrt(4 * bound // 3) + 1
    ys = [y for y in range(-ymax - (-ymax % 3 if False else 0), ymax + 1) if y % 3 == 0]
    rows_lo, rows_cnt, rows_y = [], [], []
    pending = 0

    def flush():
        lo = np.array(rows_lo, dtype=np.int64)
        cnt = np.array(rows_cnt, dtype=np.int64)
        yy = np.array(rows_y, dtype=np.int64)
        total = int(cnt.sum())
        starts = np.repeat(np.cumsum(cnt) - cnt, cnt)
        x = np.repeat(lo, cnt) + 3 * (np.arange(total, dtype=np.int64) - starts)
        y = np.repeat(yy, cnt)
        n = x * x - x * y + y * y
        keep = (n <= bound) & (n > 0)
        return x[keep], y[keep]

    for y in ys:
        disc = 4 * bound - 3 * y * y
        if disc < 0:
            continue
        s = math.isqrt(disc)
        lo = -((s - y) // 2) - 1
        hi = (y + s) // 2 + 1
        lo += (1 - lo) % 3
        if hi < lo:
            continue
        cnt = (hi - lo) // 3 + 1
        rows_lo.append(lo)
        rows_cnt.append(cnt)
        rows_y.append(y)
        pending += cnt
        if pending >= chunk:
            yield flush()
            rows_lo, rows_cnt, rows_y = [], [], []
            pending = 0
    if rows_lo:
        yield flush()


# ---------------------------------------------------------------------------
# L-values


@dataclass
class AlgebraicLValue:
    complex_estimate: mpmath.mpc
    error: float
    normalization: str  # "over_Q" or "over_K"
    recognized: Fraction | KElement | None
    vanishes: bool
    l_value: mpmath.mpc = field(default=mpmath.mpc(0))  # the raw L(psi-bar, 1)
    l_error: float = 0.0
    root_number: complex = 1.0
    conductor: int = 27
    terms: int = 0
    root: mpmath.mpc = field(default=mpmath.mpc(1))


@dataclass
class _SmoothedSums:
    values: dict  # t -> complex F(t)
    abs_sum: float
    terms: int
    tail: float


def _cutoff(sqrt_m: float, tol: float) -> int:
    return int(math.ceil(sqrt_m / (2 * math.pi * T_SLOWEST) * math.log(1.0 / tol))) + 10


def _tail(bound: int, sqrt_m: float, coef_bound: float) -> float:
    c = 2 * math.pi * T_SLOWEST / sqrt_m
    return coef_bound * 0.81 * bound ** -0.5 * math.exp(-c * bound) / c


def _solve_root_number(F: dict, real_coeffs: bool) -> tuple[complex, mpmath.mpc, float]:
    f08, f1, f125 = F[T_VALUES[0]], F[T_VALUES[1]], F[T_VALUES[2]]
    denom = mpmath.conj(f1) - mpmath.conj(f08)
    W = (f125 - f1) / denom
    if real_coeffs:
        W = mpmath.mpf(1) if W.real > 0 else mpmath.mpf(-1)
    L1 = f1 + W * mpmath.conj(f1)
    L08 = f08 + W * mpmath.conj(f125)
    L125 = f125 + W * mpmath.conj(f08)
    spread = float(max(abs(L1 - L08), abs(L1 - L125)))
    return complex(W), L1, spread


def _sum_float(points: Iterator, weights_fn, sqrt_m: float) -> tuple[dict, float, int]:
    """Accumulate F(t) = sum c/N * exp(-2 pi N t / sqrt M) in float64, chunk partials via fsum."""
    parts = {t: ([], []) for t in T_VALUES}
    abs_parts: list[float] = []
    count = 0
    for n, val in points:
        count += len(n)
        nf = n.astype(np.float64)
        base = val / nf
        abs_parts.append(float(np.abs(base).sum()))
        for t in T_VALUES:
            wgt = np.exp(-2 * math.pi * float(t) / sqrt_m * nf)
            term = base * wgt
            parts[t][0].append(float(term.real.sum()))
            parts[t][1].append(float(term.imag.sum()))
    F = {t: mpmath.mpc(math.fsum(parts[t][0]), math.fsum(parts[t][1])) for t in T_VALUES}
    return F, math.fsum(abs_parts), count


def _sum_mp(n_vals: np.ndarray, a_vals: np.ndarray, b_vals: np.ndarray, M: int, prec: int) -> tuple[dict, float]:
    """Exact integer coefficients (a + b*w) at each n, summed in mpmath."""
    F = {}
    with mpmath.workprec(prec + 20):
        sqrt_m = mpmath.sqrt(M)
        w = mpmath.mpc(-0.5, mpmath.sqrt(3) / 2)
        order = np.argsort(n_vals, kind="stable")
        ns, As, Bs = n_vals[order], a_vals[order], b_vals[order]
        for t in T_VALUES:
            q = mpmath.exp(-2 * mpmath.pi * mpmath.mpf(t.numerator) / t.denominator / sqrt_m)
            acc_re, acc_im = [], []
            prev, qn = 0, mpmath.mpf(1)
            for n, A, B in zip(ns.tolist(), As.tolist(), Bs.tolist()):
                qn *= q ** (n - prev)
                prev = n
                c = (A + B * w) * qn / n
                acc_re.append(c.real)
                acc_im.append(c.imag)
            F[t] = mpmath.mpc(mpmath.fsum(acc_re), mpmath.fsum(acc_im))
        abs_sum = float(sum(abs(A + B * complex(-0.5, math.sqrt(3) / 2)) / n for n, A, B in zip(ns.tolist(), As.tolist(), Bs.tolist())))
    return F, abs_sum


def _hecke_coefficients(spec: TwistSpec, bound: int):
    """Yield (N(alpha), psi-bar(alpha) as complex) chunks over primary alpha coprime to 3D."""
    chi = ReciprocityCharacter(spec)
    for x, y in primary_points(bound):
        s, ok = chi.unit_exponents(x, y)
        x, y, s = x[ok], y[ok], s[ok]
        n = x * x - x * y + y * y
        # psi = (1+w)^s * alpha; psi-bar = conj(psi)
        alpha = (x - 0.5 * y) + 1j * (math.sqrt(3) / 2) * y
        unit = np.exp(1j * np.pi * s / 3)
        yield n, np.conj(unit * alpha)


def _hecke_coefficients_exact(spec: TwistSpec, bound: int):
    chi = ReciprocityCharacter(spec)
    ns, As, Bs = [], [], []
    unit_a = np.array([u.a for u in UNITS], dtype=np.int64)
    unit_b = np.array([u.b for u in UNITS], dtype=np.int64)
    for x, y in primary_points(bound):
        s, ok = chi.unit_exponents(x, y)
        x, y, s = x[ok], y[ok], s[ok]
        ua, ub = unit_a[s], unit_b[s]
        bd = ub * y
        pa = ua * x - bd
        pb = ua * y + ub * x - bd
        # conj(a + b w) = (a - b) - b w
        ns.append(x * x - x * y + y * y)
        As.append(pa - pb)
        Bs.append(-pb)
    n = np.concatenate(ns) if ns else np.zeros(0, dtype=np.int64)
    A = np.concatenate(As) if As else np.zeros(0, dtype=np.int64)
    B = np.concatenate(Bs) if Bs else np.zeros(0, dtype=np.int64)
    # aggregate b_n exactly
    uniq, inv = np.unique(n, return_inverse=True)
    Aagg = np.bincount(inv, weights=A.astype(np.float64)).astype(np.int64)
    Bagg = np.bincount(inv, weights=B.astype(np.float64)).astype(np.int64)
    return uniq, Aagg, Bagg


MP_POINT_LIMIT = 60_000


def _target_tol(ctx: PrecisionContext, scale: float) -> float:
    return max(ctx.target_abs_error / max(scale, 1.0) / 10, 2.0 ** (-ctx.working_bits + 20))


def _primitive_l_value(spec: TwistSpec, ctx: PrecisionContext, force_float: bool = False,
                       route: str = "hecke") -> tuple[mpmath.mpc, float, complex, int]:
    """L(psi-bar_lambda, 1) with an error bound, the root number and the term count."""
    M = spec.conductor()
    sqrt_m = math.sqrt(M)
    float_floor = 1e-16
    tol = _target_tol(ctx, 1.0)
    use_mp = not force_float and tol < 1e-13
    if use_mp:
        bound = _cutoff(sqrt_m, tol)
        if 0.41 * bound > MP_POINT_LIMIT:
            use_mp = False
    if not use_mp:
        tol = float_floor
        bound = _cutoff(sqrt_m, tol)
    coef_bound = 2.0  # divisor-count slack on |b_n| / sqrt(n)
    if route == "rational":
        if use_mp:
            n, A = _rational_coefficients(spec, bound)
            F, abs_sum = _sum_mp(n, A, np.zeros_like(A), M, ctx.working_bits)
            count = len(n)
        else:
            F, abs_sum, count = _sum_float(_rational_chunks(spec, bound), None, sqrt_m)
        real = True
    else:
        if use_mp:
            n, A, B = _hecke_coefficients_exact(spec, bound)
            F, abs_sum = _sum_mp(n, A, B, M, ctx.working_bits)
            count = len(n)
        else:
            F, abs_sum, count = _sum_float(_hecke_coefficients(spec, bound), None, sqrt_m)
        real = spec.lam.is_rational()
    tail = _tail(bound, sqrt_m, coef_bound)
    if use_mp:
        rounding = 2.0 ** (-ctx.working_bits + 16) * max(abs_sum, 1.0)
    else:
        rounding = 4e-15 * max(abs_sum, 1.0) + 1e-16 * math.log2(max(count, 2)) * max(abs_sum, 1.0)
    with mpmath.workprec(ctx.working_bits + 20):
        W, L, spread = _solve_root_number(F, real)
        denom = float(abs(F[T_VALUES[1]] - F[T_VALUES[0]]))
        f1 = float(abs(F[T_VALUES[1]]))
    per_sum = tail + rounding
    err = 2 * per_sum
    if not real:
        # W is solved from the truncated sums; its error is amplified by 1/|F(1) - F(4/5)|
        w_err = 2 * per_sum * (1 + abs(W)) / max(denom, 1e-300)
        err += f1 * w_err
    if abs(abs(W) - 1) > 1e-6 + 100 * err or spread > 100 * err + 1e-30:
        raise PrecisionUnachievable(
            f"functional equation check failed for {spec.label()}: |W|={abs(W):.6g}, spread={spread:.3g}, err={err:.3g}")
    return L, err, W, count


def principal_root(D: EisensteinInt, k: int) -> mpmath.mpc:
    z = mpmath.mpc(D.a - mpmath.mpf(D.b) / 2, mpmath.sqrt(3) / 2 * D.b)
    if D.is_rational() and D.a > 0:
        return mpmath.mpc(mpmath.root(mpmath.mpf(D.a), k))
    if D.is_rational() and k % 2 == 1:
        return mpmath.mpc(-mpmath.root(mpmath.mpf(-D.a), k))
    return mpmath.root(z, k)


def twist_root(spec: TwistSpec, convention: str = "principal") -> mpmath.mpc:
    """lambda^(1/6): the real root for rational D, otherwise a principal branch.

    ``principal`` takes the principal k-th root of D itself; ``factored`` multiplies the
    principal roots of the primary prime factors (the convention used by the sums over
    sub-twists, where consistency across divisors of D matters).
    """
    if spec.kind is TwistKind.NONE:
        return mpmath.mpc(1)
    k = 2 if spec.kind is TwistKind.QUADRATIC else 3
    if convention == "principal" or spec.D.is_rational():
        return principal_root(spec.D, k)
    out = mpmath.mpc(1)
    for pp, e in spec.primes:
        out *= principal_root(pp.value, k) ** e
    return out


def _recognize(value: mpmath.mpc, err: float, rational: bool, denom_bound: int):
    vanishes = abs(value) < max(1e-15, 100 * err)
    if vanishes:
        return (Fraction(0) if rational else KElement(0)), True
    if rational:
        if abs(value.imag) > 100 * err + 1e-12:
            raise RecognitionFailed(f"expected a real value, got {value}")
        return recognize_rational(value.real, max(err, 1e-300), denom_bound), False
    return recognize_K_element(value, max(err, 1e-300), denom_bound), False


def l_value_rational(spec: TwistSpec, ctx: PrecisionContext = DEFAULT_CTX, denom_bound: int = 1000) -> AlgebraicLValue:
    """L(E(lambda), 1)/Omega_lambda for rational lambda, from the Dirichlet series over Q."""
    if not spec.lam.is_rational():
        raise InvalidSpec("l_value_rational needs a rational twist parameter")
    L, err, W, count = _primitive_l_value(spec, ctx, route="rational")
    return _normalize(spec, L, err, W, count, ctx, denom_bound, "over_Q", "principal")


def hecke_l_value(spec: TwistSpec, S: tuple[EisensteinInt, ...] = (), ctx: PrecisionContext = DEFAULT_CTX,
                  denom_bound: int = 1000, root_convention: str = "principal",
                  force_float: bool = False) -> AlgebraicLValue:
    """L_S(psi-bar_lambda, 1) * lambda^(1/6) / Omega from the ideal sum over Z[w].

    Primes in ``S`` not dividing the conductor contribute the factor 1 - psi-bar(p)/N(p).
    """
    L, err, W, count = _primitive_l_value(spec, ctx, force_float=force_float)
    factor_k = euler_factor(spec, S)
    with ctx.workprec():
        Lk = L * factor_k.to_mpc()
        errk = err * float(abs(factor_k.to_mpc())) + 2.0 ** (-ctx.working_bits)
    return _normalize(spec, Lk, errk, W, count, ctx, denom_bound, "over_K", root_convention, raw=(L, err),
                      k_valued=not factor_k.is_rational())


def euler_factor(spec: TwistSpec, S: tuple[EisensteinInt, ...]) -> KElement:
    """prod over p in S, p coprime to 3D, of (1 - psi-bar_lambda(p)/N(p)), exactly."""
    out = KElement(1)
    chi = ReciprocityCharacter(spec)
    seen: set[EisensteinInt] = set()
    for p in S:
        pi = mod3_associate(EisensteinInt.of(p))
        if pi in seen:
            continue
        seen.add(pi)
        if any(pp.value == pi for pp, _ in spec.primes):
            continue
        psi = chi.psi(pi)
        out = out * (1 - KElement.of(psi.conj()) / pi.norm())
    return out


def _normalize(spec, L, err, W, count, ctx, denom_bound, normalization, root_convention, raw=None,
               k_valued: bool = False) -> AlgebraicLValue:
    with ctx.workprec():
        om = omega(ctx)
        root = twist_root(spec, root_convention)
        value = L * root / om
        verr = err * float(abs(root) / om) * 1.01 + 2.0 ** (-ctx.working_bits + 8) * float(abs(value))
        rational = spec.lam.is_rational() and normalization == "over_Q"
        if normalization == "over_K" and spec.D.is_rational() and not k_valued:
            rational = True
        rec, vanishes = _recognize(value, verr, rational, denom_bound)
    raw_l, raw_err = raw if raw else (L, err)
    return AlgebraicLValue(value, verr, normalization, rec, vanishes, raw_l, raw_err, W, spec.conductor(), count, root)


# ---------------------------------------------------------------------------
# Dirichlet coefficients over Q (Euler-criterion route)


def _sieve(n: int) -> np.ndarray:
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if is_p[i]:
            is_p[i * i::i] = False
    return is_p


def _vec_powmod(base: np.ndarray, exp: np.ndarray, mod: np.ndarray) -> np.ndarray:
    result = np.ones_like(base)
    b = base % mod
    e = exp.copy()
    while np.any(e):
        odd = (e & 1).astype(bool)
        result = np.where(odd, result * b % mod, result)
        b = b * b % mod
        e >>= 1
    return result


def _big_mod(z: int, n: np.ndarray) -> np.ndarray:
    """z mod n elementwise for an arbitrary Python int z and moduli n < 2**32."""
    if -(1 << 62) < z < (1 << 62):
        return z % n
    digits = []
    m = abs(z)
    while m:
        digits.append(m & ((1 << 30) - 1))
        m >>= 30
    r = np.zeros(len(n), dtype=np.int64)
    for d in reversed(digits):
        r = ((r << 30) % n + d) % n
    return (-r) % n if z < 0 else r


def split_prime_traces(spec: TwistSpec, bound: int) -> tuple[np.ndarray, np.ndarray]:
    """(p, a_p) for split primes p <= bound not dividing 3N(D), via Euler's criterion at a primary pi over p."""
    if bound >= 3_000_000_000:
        raise PrecisionUnachievable("bound too large for int64 modular arithmetic")
    is_p = _sieve(bound)
    ps, aps = [], []
    lam = spec.lam
    bad = spec.bad_norms()
    for x, y in primary_points(bound):
        sel = y > 0
        x, y = x[sel], y[sel]
        n = x * x - x * y + y * y
        prime = is_p[n]
        x, y, n = x[prime], y[prime], n[prime]
        if bad:
            good = ~np.isin(n, np.array(sorted(bad), dtype=np.int64))
            x, y, n = x[good], y[good], n[good]
        if not len(n):
            continue
        # w = -x / y mod p
        yinv = _vec_powmod(y % n, n - 2, n)
        w = (-(x % n) * yinv) % n
        if spec.kind is TwistKind.NONE:
            s = np.zeros(len(n), dtype=np.int64)
        else:
            if lam.is_rational():
                lam_p = _big_mod(lam.a, n)
            else:
                lam_p = (_big_mod(lam.a, n) + _big_mod(lam.b, n) * w) % n
            r = _vec_powmod(lam_p, (n - 1) // 6, n)
            zeta = (1 + w) % n
            k = np.full(len(n), -1, dtype=np.int64)
            cur = np.ones(len(n), dtype=np.int64)
            for j in range(6):
                k = np.where((cur == r) & (k < 0), j, k)
                cur = cur * zeta % n
            if np.any(k < 0):
                raise AssertionError("Euler criterion failed to produce a sixth root of unity")
            s = (SEXTIC_EXPONENT * k) % 6
        ua = np.array([u.a for u in UNITS], dtype=np.int64)[s]
        ub = np.array([u.b for u in UNITS], dtype=np.int64)[s]
        bd = ub * y
        pa = ua * x - bd
        pb = ua * y + ub * x - bd
        ps.append(n)
        aps.append(2 * pa - pb)
    if not ps:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    p = np.concatenate(ps)
    a = np.concatenate(aps)
    order = np.argsort(p)
    return p[order], a[order]


def dirichlet_coefficients(spec: TwistSpec, bound: int) -> np.ndarray:
    """a_1..a_bound of L(E(lambda)/Q, s) (index 0 unused), built multiplicatively."""
    if not spec.lam.is_rational():
        raise InvalidSpec("Dirichlet coefficients over Q need a rational twist")
    ap = np.zeros(bound + 1, dtype=np.float64)
    ps, aps = split_prime_traces(spec, bound)
    ap[ps] = aps
    is_p = _sieve(bound)
    primes = np.nonzero(is_p)[0]
    bad = spec.bad_norms()
    bad_rational = {_rational_below(pp) for pp, _ in spec.primes} | {3}
    a = np.ones(bound + 1, dtype=np.float64)
    a[0] = 0.0
    root = math.isqrt(bound)
    for p in primes.tolist():
        good = p not in bad_rational
        if p > root:
            a[p::p] *= ap[p] if good else 0.0
            continue
        # prime powers: a_{p^(k+1)} = a_p a_{p^k} - p a_{p^(k-1)} at good primes
        powers = [1.0, ap[p] if good else 0.0]
        pk = p
        while pk * p <= bound:
            pk *= p
            powers.append(powers[-1] * powers[1] - (p * powers[-2] if good else 0.0))
        idx = np.arange(p, bound + 1, p)
        v = np.ones(len(idx), dtype=np.int64)
        t = idx // p
        while True:
            m = t % p == 0
            if not m.any():
                break
            v[m] += 1
            t[m] //= p
        a[idx] *= np.array(powers)[v]
    del bad
    return a


def _rational_coefficients(spec: TwistSpec, bound: int) -> tuple[np.ndarray, np.ndarray]:
    a = dirichlet_coefficients(spec, bound)
    n = np.nonzero(a)[0]
    return n.astype(np.int64), a[n].astype(np.int64)


def _rational_chunks(spec: TwistSpec, bound: int, chunk: int = 1 << 21):
    a = dirichlet_coefficients(spec, bound)
    for start in range(1, bound + 1, chunk):
        stop = min(bound + 1, start + chunk)
        n = np.arange(start, stop, dtype=np.int64)
        vals = a[start:stop]
        nz = vals != 0
        yield n[nz], vals[nz].astype(np.complex128)
