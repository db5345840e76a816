"""Averaged sums of imprimitive L-values over the sub-twists of D, computed two ways.

For D = pi_1 ... pi_n and a character chi of (Z/k)^n (k = 2 quadratic, 3 cubic) the sum

    Phi^(chi) = sum_alpha chi(alpha) L_{S_alpha}(psi-bar_{D_alpha^j}, 1) / Omega

(S_alpha = primes of D not dividing D_alpha) collapses by character orthogonality to

    (k^n / (3 D3)) * sum_{c in V} E1*(c Omega / D3 + Omega / 3),

with D3 the associate of D congruent to 1 mod 3 and V the residues c mod D whose
twist characters at 3c + D3 equal chi. The E1*-sum has a closed form through wp and
wp' at the D-torsion points c Omega / D3, by the addition law for zeta around Omega/3
(wp(Omega/3) = 3, wp'(Omega/3) = -9, E1*(Omega/3) = 1 for the real positive period):

    quadratic: #V - 1/2 sum 9 / (3 - wp)
    cubic:     #V - 1/2 sum (9 + wp') / (3 - wp)

Each L-value lies in K after multiplication by the root D_alpha^(1/k), so Phi is an
exact element of J = K(pi_1^(1/k), ..., pi_n^(1/k)); its valuations are read off the
Newton polygon of its characteristic polynomial over K.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .analytic import DEFAULT_CTX, LatticePoint, PrecisionContext, omega, weierstrass_values, wp_batch
from .eisenstein import EisensteinInt, ONE, mod3_associate, split_root
from .errors import EmptyTwist, InvalidSpec, TooLarge
from .kfield import KElement, ord_p_K
from .lseries import ReciprocityCharacter, TwistKind, TwistSpec, euler_factor, hecke_l_value, principal_root

NORM_GUARD = 10**7

_OMEGA_K = KElement(Fraction(-1, 2), Fraction(1, 2))


def _order(kind: TwistKind) -> int:
    if kind is TwistKind.NONE:
        raise InvalidSpec("Phi needs a quadratic or cubic twist")
    return kind.symbol_order


def _chi_value(kind: TwistKind, exponent: int) -> KElement:
    """chi_j as an element of K: (-1)^e for quadratic, w^e for cubic."""
    if kind is TwistKind.QUADRATIC:
        return KElement(1 if exponent % 2 == 0 else -1)
    return _OMEGA_K ** (exponent % 3)


def _normalize_chi(spec: TwistSpec, chi: tuple[int, ...] | None) -> tuple[int, ...]:
    n, k = len(spec.primes), _order(spec.kind)
    if chi is None:
        return (0,) * n
    if len(chi) != n:
        raise InvalidSpec(f"character needs {n} exponents, got {len(chi)}")
    return tuple(int(c) % k for c in chi)


def _split_primes(spec: TwistSpec) -> list[EisensteinInt]:
    out = []
    for pp, e in spec.primes:
        if e != 1:
            raise InvalidSpec("Phi is defined for squarefree D")
        out.append(pp.value)
    return out


# ---------------------------------------------------------------------------
# the residue set V


def residues_mod(D: EisensteinInt) -> tuple[np.ndarray, np.ndarray]:
    """A complete residue system x + y*w of Z[w]/(D): 0 <= y < g, 0 <= x < N/g with g = gcd(a, b)."""
    g = math.gcd(D.a, D.b)
    n = D.norm()
    xs = np.arange(n // g, dtype=np.int64)
    ys = np.arange(g, dtype=np.int64)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    return X.ravel(), Y.ravel()


@dataclass
class CosetSetV:
    """Residues c mod D (c coprime to D) with eps_j(3c + D3) = chi_j for every prime pi_j of D."""

    D: EisensteinInt
    kind: TwistKind
    chi: tuple[int, ...]
    members: list[EisensteinInt]
    transversal_size: int
    D3: EisensteinInt = field(default=ONE)
    _chars: list = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self.members)

    def contains(self, c: EisensteinInt) -> bool:
        ok, match = _membership(self._chars, self.kind, self.chi, self.D3,
                                np.array([c.a]), np.array([c.b]))
        return bool(ok[0] and match[0])


def _membership(chars, kind: TwistKind, chi: tuple[int, ...], D3: EisensteinInt,
                x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ax, ay = 3 * x + D3.a, 3 * y + D3.b
    ok = np.ones(x.shape, dtype=bool)
    match = np.ones(x.shape, dtype=bool)
    for (character, _), target in zip(chars, chi):
        s, good = character.unit_exponents(ax, ay)
        ok &= good
        want = 3 * target if kind is TwistKind.QUADRATIC else 2 * target
        match &= (s % 6) == want
    return ok, match


def build_V(D: EisensteinInt | TwistSpec, kind: TwistKind | str | None = None,
            chi: tuple[int, ...] | None = None) -> CosetSetV:
    spec = D if isinstance(D, TwistSpec) else TwistSpec.make(kind, D)
    if spec.kind is TwistKind.NONE:
        raise EmptyTwist("V is undefined for the untwisted curve")
    if spec.D.norm() > NORM_GUARD:
        raise TooLarge(f"N(D) = {spec.D.norm()} exceeds {NORM_GUARD}")
    primes = _split_primes(spec)
    chi = _normalize_chi(spec, chi)
    D = spec.D
    D3 = mod3_associate(D)
    chars = [(ReciprocityCharacter(TwistSpec.make(spec.kind, p)), p) for p in primes]
    xs, ys = residues_mod(D)
    ok, match = _membership(chars, spec.kind, chi, D3, xs, ys)
    sel = ok & match
    members = [EisensteinInt(int(a), int(b)) for a, b in zip(xs[sel], ys[sel])]
    return CosetSetV(D, spec.kind, chi, members, int(ok.sum()), D3, chars)


# ---------------------------------------------------------------------------
# exact elements of J = K(pi_j^(1/k))


@dataclass(frozen=True)
class KummerElement:
    """sum over m in [0, k)^n of coeff[m] * prod r_j^m_j with r_j^k = pi_j."""

    k: int
    radicands: tuple[EisensteinInt, ...]
    coeffs: tuple[tuple[tuple[int, ...], KElement], ...]

    @staticmethod
    def make(k: int, radicands: tuple[EisensteinInt, ...], coeffs: dict) -> "KummerElement":
        items = tuple(sorted((m, v) for m, v in coeffs.items() if not v.is_zero()))
        return KummerElement(k, tuple(radicands), items)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "KummerElement") -> "KummerElement":
        out = self.as_dict()
        for m, v in other.coeffs:
            out[m] = out.get(m, KElement(0)) + v
        return KummerElement.make(self.k, self.radicands, out)

    def scale(self, v: KElement) -> "KummerElement":
        return KummerElement.make(self.k, self.radicands, {m: c * v for m, c in self.coeffs})

    def __mul__(self, other: "KummerElement") -> "KummerElement":
        out: dict = {}
        for m1, v1 in self.coeffs:
            for m2, v2 in other.coeffs:
                m, v = [], v1 * v2
                for j, (a, b) in enumerate(zip(m1, m2)):
                    t = a + b
                    if t >= self.k:
                        t -= self.k
                        v = v * KElement.of(self.radicands[j])
                    m.append(t)
                key = tuple(m)
                out[key] = out.get(key, KElement(0)) + v
        return KummerElement.make(self.k, self.radicands, out)

    def to_mpc(self, roots: tuple[mpmath.mpc, ...]) -> mpmath.mpc:
        total = mpmath.mpc(0)
        for m, v in self.coeffs:
            term = v.to_mpc()
            for r, e in zip(roots, m):
                term *= r ** e
            total += term
        return total

    def basis(self) -> list[tuple[int, ...]]:
        return list(itertools.product(range(self.k), repeat=len(self.radicands)))

    def multiplication_matrix(self) -> list[list[KElement]]:
        basis = self.basis()
        index = {m: i for i, m in enumerate(basis)}
        size = len(basis)
        mat = [[KElement(0)] * size for _ in range(size)]
        for col, m in enumerate(basis):
            prod = self * KummerElement.make(self.k, self.radicands, {m: KElement(1)})
            for mm, v in prod.coeffs:
                mat[index[mm]][col] = v
        return mat

    def charpoly(self) -> list[KElement]:
        """Coefficients c_0..c_d (c_d = 1) of det(x - M) by Faddeev-LeVerrier over K."""
        A = self.multiplication_matrix()
        d = len(A)
        coeffs = [KElement(0)] * (d + 1)
        coeffs[d] = KElement(1)
        Mk = [[KElement(0)] * d for _ in range(d)]
        for step in range(1, d + 1):
            prev = Mk
            AM = _matmul(A, prev)
            Mk = [[AM[i][j] + (coeffs[d - step + 1] if i == j else KElement(0)) for j in range(d)] for i in range(d)]
            AMk = _matmul(A, Mk)
            trace = KElement(0)
            for i in range(d):
                trace = trace + AMk[i][i]
            coeffs[d - step] = trace * KElement(Fraction(-1, step))
        return coeffs

    def min_valuation(self, p: int) -> Fraction | None:
        """min over primes of J above p of ord_p (normalized ord_p(p) = 1); None for zero."""
        if self.is_zero():
            return None
        c = self.charpoly()
        d = len(c) - 1
        best = None
        for i in range(1, d + 1):
            e_i = c[d - i]
            if e_i.is_zero():
                continue
            v = ord_p_K(e_i, p) / i
            best = v if best is None or v < best else best
        return best


def _matmul(A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = KElement(0)
            for t in range(n):
                if A[i][t].is_zero() or B[t][j].is_zero():
                    continue
                acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# the two evaluation paths


@dataclass
class PhiValue:
    complex_estimate: mpmath.mpc
    error: float
    path: str  # "from_lvalues" or "from_wp"
    recognized: KummerElement | None = None
    terms: dict = field(default_factory=dict)


def _sub_twists(spec: TwistSpec):
    primes = _split_primes(spec)
    k = _order(spec.kind)
    for alpha in itertools.product(range(k), repeat=len(primes)):
        D_alpha = ONE
        for p, a in zip(primes, alpha):
            D_alpha = D_alpha * p ** a
        S = tuple(p for p, a in zip(primes, alpha) if a == 0)
        yield alpha, D_alpha, S


def phi_from_lvalues(D: EisensteinInt | TwistSpec, kind: TwistKind | str | None = None,
                     chi: tuple[int, ...] | None = None, ctx: PrecisionContext = DEFAULT_CTX,
                     force_float: bool = False, exact: bool = True) -> PhiValue:
    """Phi^(chi) assembled from hecke_l_value over every sub-twist D_alpha of D."""
    spec = D if isinstance(D, TwistSpec) else TwistSpec.make(kind, D)
    primes = _split_primes(spec)
    chi = _normalize_chi(spec, chi)
    k = _order(spec.kind)
    radicands = tuple(primes)
    with ctx.workprec():
        roots = tuple(principal_root(p, k) for p in primes)
    total = mpmath.mpc(0)
    err = 0.0
    exact_sum = KummerElement.make(k, radicands, {})
    terms = {}
    for alpha, D_alpha, S in _sub_twists(spec):
        sub = TwistSpec.untwisted() if all(a == 0 for a in alpha) else TwistSpec.make(spec.kind, D_alpha)
        prim = hecke_l_value(sub, (), ctx, root_convention="factored", force_float=force_float)
        factor_k = euler_factor(sub, S)
        weight = KElement(1)
        for a, c in zip(alpha, chi):
            weight = weight * _chi_value(spec.kind, a * c)
        with ctx.workprec():
            root_alpha = mpmath.mpc(1)
            for r, a in zip(roots, alpha):
                root_alpha *= r ** a
            # prim.complex_estimate = L * root / Omega with the factored root of D_alpha
            value = prim.complex_estimate / prim.root * factor_k.to_mpc() * weight.to_mpc()
            total += value
            err += prim.error / float(abs(prim.root)) * float(abs(factor_k.to_mpc()))
        terms[alpha] = prim
        if exact and exact_sum is not None:
            if prim.recognized is None:
                exact_sum = None
                continue
            ell = KElement.of(prim.recognized) * factor_k * weight
            # 1 / prod r_j^a_j = prod r_j^(k - a_j) / pi_j for a_j > 0
            m = tuple((k - a) % k for a in alpha)
            for p, a in zip(primes, alpha):
                if a:
                    ell = ell / KElement.of(p)
            exact_sum = exact_sum + KummerElement.make(k, radicands, {m: ell})
    return PhiValue(total, err, "from_lvalues", exact_sum if exact else None, terms)


def _torsion_sums_mp(V: CosetSetV, ctx: PrecisionContext) -> tuple[mpmath.mpc, float]:
    total = mpmath.mpc(0)
    err = 0.0
    with ctx.workprec():
        for c in V.members:
            vals = weierstrass_values(LatticePoint(c, V.D3), ctx)
            denom = 3 - vals.wp
            if V.kind is TwistKind.QUADRATIC:
                term = 9 / denom
                err += 9 * vals.err / float(abs(denom)) ** 2
            else:
                term = (9 + vals.wp_prime) / denom
                err += vals.err / float(abs(denom)) + float(abs(term)) * vals.err / float(abs(denom))
            total += term
    return total, err


def _reduced_torsion_coords(V: CosetSetV) -> tuple[np.ndarray, np.ndarray]:
    n = V.D3.norm()
    dc = V.D3.conj()
    xs = np.array([(c * dc).a % n for c in V.members], dtype=np.int64)
    ys = np.array([(c * dc).b % n for c in V.members], dtype=np.int64)
    fx, fy = xs / n, ys / n
    best = None
    for sx in (0, -1):
        for sy in (0, -1):
            x0, y0 = fx + sx, fy + sy
            nrm = x0 * x0 - x0 * y0 + y0 * y0
            if best is None:
                best = (nrm, x0, y0)
            else:
                take = nrm < best[0]
                best = (np.where(take, nrm, best[0]), np.where(take, x0, best[1]), np.where(take, y0, best[2]))
    return best[1], best[2]


def _torsion_sums_float(V: CosetSetV) -> tuple[complex, float]:
    om = float(omega(DEFAULT_CTX))
    x0, y0 = _reduced_torsion_coords(V)
    wp, wpp = wp_batch(x0, y0, om)
    denom = 3 - wp
    eps = 64 * np.finfo(float).eps
    d_wp = eps * (np.abs(wp) + 10)
    if V.kind is TwistKind.QUADRATIC:
        terms = 9 / denom
        errs = 9 * d_wp / np.abs(denom) ** 2
    else:
        terms = (9 + wpp) / denom
        d_wpp = eps * (np.abs(wpp) + 10)
        errs = d_wpp / np.abs(denom) + np.abs(terms) * d_wp / np.abs(denom)
    total = complex(math.fsum(terms.real), math.fsum(terms.imag))
    return total, float(errs.sum()) + eps * float(np.abs(terms).sum())


def e1star_sum(V: CosetSetV, ctx: PrecisionContext = DEFAULT_CTX, force_float: bool = False) -> tuple[mpmath.mpc, float]:
    """sum_{c in V} E1*(c Omega / D3 + Omega / 3) through the wp closed form."""
    if force_float:
        s, err = _torsion_sums_float(V)
        s = mpmath.mpc(s)
    else:
        s, err = _torsion_sums_mp(V, ctx)
    with ctx.workprec():
        return len(V) - s / 2, err / 2


def phi_from_wp(D: EisensteinInt | TwistSpec, kind: TwistKind | str | None = None,
                chi: tuple[int, ...] | None = None, ctx: PrecisionContext = DEFAULT_CTX,
                force_float: bool = False) -> PhiValue:
    spec = D if isinstance(D, TwistSpec) else TwistSpec.make(kind, D)
    if spec.kind is TwistKind.NONE or not spec.primes:
        raise EmptyTwist("the wp closed form needs n >= 1 primes in D")
    V = build_V(spec, chi=chi)
    k = _order(spec.kind)
    n = len(spec.primes)
    s, err = e1star_sum(V, ctx, force_float)
    with ctx.workprec():
        scale = mpmath.mpf(k) ** n / (3 * V.D3.to_complex() if force_float else 3 * KElement.of(V.D3).to_mpc())
        value = s * scale
        err *= float(abs(scale))
    return PhiValue(value, err, "from_wp", None, {"V": V})


def phi_paths_agree(D: EisensteinInt | TwistSpec, kind: TwistKind | str | None = None,
                    chi: tuple[int, ...] | None = None, ctx: PrecisionContext = DEFAULT_CTX,
                    force_float: bool = False) -> tuple[bool, PhiValue, PhiValue]:
    a = phi_from_lvalues(D, kind, chi, ctx, force_float=force_float, exact=False)
    b = phi_from_wp(D, kind, chi, ctx, force_float=force_float)
    return bool(abs(a.complex_estimate - b.complex_estimate) <= a.error + b.error), a, b


# ---------------------------------------------------------------------------
# valuation bounds


@dataclass
class ValuationReport:
    D: EisensteinInt
    kind: TwistKind
    n: int
    p: int
    phi_valuations: dict  # chi -> Fraction or None (Phi = 0)
    phi_bound: Fraction
    quarter_bound: Fraction | None
    lvalue_valuations: dict  # alpha -> Fraction or None (vanishing value)
    phi_ok: bool
    quarter_ok: bool | None

    @property
    def passed(self) -> bool:
        return self.phi_ok and self.quarter_ok is not False


def _characters(spec: TwistSpec, all_characters: bool):
    k = _order(spec.kind)
    n = len(spec.primes)
    if not all_characters:
        return [(0,) * n]
    return list(itertools.product(range(k), repeat=n))


def verify_valuation_bounds(D: EisensteinInt | TwistSpec, kind: TwistKind | str | None = None,
                            ctx: PrecisionContext = DEFAULT_CTX, all_characters: bool | None = None) -> ValuationReport:
    """ord_p(Phi^(chi)) >= n (p = 2 quadratic, 3 cubic), plus the n + 1/4 refinement for cubic n = 1."""
    spec = D if isinstance(D, TwistSpec) else TwistSpec.make(kind, D)
    p = 2 if spec.kind is TwistKind.QUADRATIC else 3
    n = len(_split_primes(spec))
    if all_characters is None:
        all_characters = spec.kind is TwistKind.CUBIC
    vals: dict = {}
    lvals: dict = {}
    for chi in _characters(spec, all_characters):
        phi = phi_from_lvalues(spec, chi=chi, ctx=ctx)
        if phi.recognized is None:
            from .errors import RecognitionFailed
            raise RecognitionFailed(f"Phi for chi={chi} could not be recognized exactly")
        vals[chi] = phi.recognized.min_valuation(p)
        for alpha, prim in phi.terms.items():
            if alpha not in lvals:
                lvals[alpha] = None if prim.vanishes else ord_p_K(KElement.of(prim.recognized), p)
    bound = Fraction(n)
    phi_ok = all(v is None or v >= bound for v in vals.values())
    quarter = None
    quarter_ok = None
    if spec.kind is TwistKind.CUBIC and n == 1:
        quarter = Fraction(n) + Fraction(1, 4)
        quarter_ok = all(v is None or v >= quarter for v in vals.values())
    return ValuationReport(spec.D, spec.kind, n, p, vals, bound, quarter, lvals, phi_ok, quarter_ok)
