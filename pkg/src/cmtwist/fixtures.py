"""The tabulated L-values shipped with the package, and row-by-row reproduction."""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .analytic import DEFAULT_CTX, PrecisionContext
from .eisenstein import EisensteinInt
from .lseries import TwistKind, TwistSpec, hecke_l_value, l_value_rational, parse_d


@dataclass(frozen=True)
class FixtureRow:
    table: str
    pi: str
    D: str
    expected: int
    value_mode: str  # "rational" or "norm"
    excluded: bool

    @property
    def kind(self) -> TwistKind:
        return TwistKind.QUADRATIC if self.table.startswith("quadratic") else TwistKind.CUBIC

    @property
    def d_value(self) -> EisensteinInt:
        return parse_d(self.D)

    def spec(self) -> TwistSpec:
        return TwistSpec.make(self.kind, self.d_value)

    @property
    def size(self) -> int:
        """Conductor of the twist over Q (norm of the Hecke conductor for K-valued rows)."""
        return self.spec().conductor()


def default_path() -> Path:
    return Path(str(resources.files("cmtwist") / "data" / "appendix_b.csv"))


def load_rows(path: str | Path | None = None, include_excluded: bool = False) -> list[FixtureRow]:
    path = Path(path) if path else default_path()
    with open(path, newline="") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        rows = [FixtureRow(r["table"], r["pi"], r["D"], int(r["L_alg"]), r["value_mode"], r["excluded"] == "1")
                for r in reader]
    return rows if include_excluded else [r for r in rows if not r.excluded]


@dataclass(frozen=True)
class RowResult:
    row: FixtureRow
    computed: Fraction | None
    l_value: object  # the recognized value before taking norms
    vanishes: bool
    seconds: float
    error: str | None = None

    @property
    def matches(self) -> bool:
        return self.error is None and self.computed == self.row.expected


def evaluate_row(row: FixtureRow, ctx: PrecisionContext = DEFAULT_CTX) -> RowResult:
    t0 = time.perf_counter()
    try:
        spec = row.spec()
        if row.value_mode == "norm":
            lv = hecke_l_value(spec, ctx=ctx, denom_bound=10_000)
            computed = Fraction(0) if lv.vanishes else lv.recognized.norm()
        else:
            lv = l_value_rational(spec, ctx)
            computed = Fraction(lv.recognized)
        return RowResult(row, computed, lv.recognized, lv.vanishes, time.perf_counter() - t0)
    except Exception as exc:  # reported per row, the campaign goes on
        return RowResult(row, None, None, False, time.perf_counter() - t0, f"{type(exc).__name__}: {exc}")


def _evaluate_packed(args: tuple[FixtureRow, int, float]) -> RowResult:
    row, bits, tol = args
    return evaluate_row(row, PrecisionContext(working_bits=bits, target_abs_error=tol))


def evaluate_rows(rows: list[FixtureRow], ctx: PrecisionContext = DEFAULT_CTX, jobs: int = 1) -> list[RowResult]:
    """Evaluate rows in input order, in a process pool when jobs > 1."""
    if jobs <= 1:
        return [evaluate_row(r, ctx) for r in rows]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate_packed, [(r, ctx.working_bits, ctx.target_abs_error) for r in rows]))
