"""Command-line entry point: single values, table reproduction, and verification campaigns."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

from .analytic import PrecisionContext
from .bsd import bsd_report, theorem_bound
from .classify import cubic_special_witness, enumerate_classified, is_special_split, special_split_witness
from .eisenstein import EisensteinInt
from .errors import CmTwistError, IdentityFailed, RecognitionFailed, VanishingLValue
from .fixtures import RowResult, evaluate_rows, load_rows
from .kfield import KElement, ord_p_K
from .lseries import TwistKind, TwistSpec, hecke_l_value, l_value_rational, parse_d

EXIT_RECOGNITION = 2
EXIT_VANISHING = 3
EXIT_TABLE_MISMATCH = 4
EXIT_PHI_MISMATCH = 5
EXIT_BOUND_VIOLATED = 6
EXIT_MODEL_FAILED = 7

TABLE_COLUMNS = ("pi", "D", "L_alg", "ord_p", "bound", "tight", "predicted_sha")
PRECISION_ENV = "CM_TWIST_PRECISION"


@dataclass
class RunConfig:
    precision: int = 128
    target_error: float = 1e-25
    denom_bound: int = 1000
    format: str = "csv"
    jobs: int = 1
    fixtures: str | None = None

    def validate(self) -> None:
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, not {self.format!r}")
        for name in ("precision", "denom_bound", "jobs"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.target_error <= 0:
            raise ValueError("target_error must be positive")

    def context(self) -> PrecisionContext:
        tol = max(self.target_error, 2.0 ** (-self.precision + 16))
        return PrecisionContext(working_bits=self.precision, target_abs_error=tol)


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat key=value lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line without '=': {raw!r}")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def build_config(args: argparse.Namespace, env: dict[str, str] | None = None) -> RunConfig:
    """Defaults, then the config file, then the environment precision, then explicit flags."""
    env = os.environ if env is None else env
    cfg = RunConfig()
    types = {f.name: f.type for f in fields(RunConfig)}
    if getattr(args, "config", None):
        for key, value in read_config_file(args.config).items():
            if key not in types:
                raise ValueError(f"unknown config key {key!r}")
            setattr(cfg, key, _coerce(key, value))
    if env.get(PRECISION_ENV):
        cfg.precision = int(env[PRECISION_ENV])
    for key in ("precision", "format", "jobs", "fixtures", "denom_bound"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    cfg.validate()
    return cfg


def _coerce(key: str, value: str):
    if key in ("precision", "denom_bound", "jobs"):
        return int(value)
    if key == "target_error":
        return float(value)
    return value


# ---------------------------------------------------------------------------
# output


def _text(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def render(rows: list[dict], fmt: str, columns: tuple[str, ...] = TABLE_COLUMNS) -> str:
    if fmt == "json":
        return json.dumps([{c: _jsonable(r.get(c)) for c in columns} for r in rows], indent=1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_text(r.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (Fraction, KElement, EisensteinInt)):
        return str(v)
    return v


def parse_table(text: str, fmt: str) -> list[dict[str, str]]:
    """Inverse of render, with every field as its CSV text form."""
    if fmt == "json":
        return [{k: _text(v) for k, v in row.items()} for row in json.loads(text)]
    return list(csv.DictReader(io.StringIO(text)))


# ---------------------------------------------------------------------------
# commands


def _spec(kind: str, d: str) -> TwistSpec:
    return TwistSpec.make(kind, parse_d(d))


def _ord(value, p: int) -> Fraction | None:
    if value is None or value == 0:
        return None
    return ord_p_K(KElement.of(value), p)


def cmd_lvalue(args, cfg: RunConfig, out) -> int:
    spec = _spec(args.kind, args.d)
    ctx = cfg.context()
    try:
        if spec.lam.is_rational():
            lv = l_value_rational(spec, ctx, cfg.denom_bound)
        else:
            lv = hecke_l_value(spec, ctx=ctx, denom_bound=cfg.denom_bound)
    except RecognitionFailed as exc:
        print(f"recognition failed: {exc}", file=sys.stderr)
        return EXIT_RECOGNITION
    info = {
        "twist": spec.label(),
        "estimate": str(lv.complex_estimate.real if lv.recognized is not None and isinstance(lv.recognized, Fraction)
                        else lv.complex_estimate),
        "error": lv.error,
        "recognized": str(lv.recognized),
        "vanishes": lv.vanishes,
        "conductor": lv.conductor,
        "root_number": str(lv.root_number),
        "ord_2": _text(_ord(lv.recognized, 2)),
        "ord_3": _text(_ord(lv.recognized, 3)),
    }
    if args.p is not None:
        if lv.vanishes:
            _emit_info(info, cfg, out)
            print(f"L-value vanishes for {spec.label()}: no BSD report at p={args.p}", file=sys.stderr)
            return EXIT_VANISHING
        try:
            rep = bsd_report(spec, args.p, ctx, lvalue=lv)
        except VanishingLValue:
            return EXIT_VANISHING
        info.update({
            "p": rep.p, "ord_p": rep.ord_L, "local_ord": rep.ord_rhs_local, "bound": rep.bound,
            "tight": rep.tight, "predicted_sha": rep.predicted_sha_ord, "torsion": rep.torsion,
            "tamagawa": ";".join(f"{d.q}:{d.kodaira}:{d.c_q}" for d in rep.local),
        })
    _emit_info(info, cfg, out)
    return 0


def _emit_info(info: dict, cfg: RunConfig, out) -> None:
    if cfg.format == "json":
        print(json.dumps(info, indent=1, default=str), file=out)
    else:
        for k, v in info.items():
            print(f"{k}: {_text(v)}", file=out)


def _table_row(spec: TwistSpec, pi: str, recognized, vanishes: bool) -> dict:
    p, bound = theorem_bound(spec) if spec.D.is_rational() else (2 if spec.kind is TwistKind.QUADRATIC else 3, None)
    if bound is None:
        bound = len(spec.primes) + (0 if spec.kind is TwistKind.QUADRATIC else 1)
    row = {"pi": pi, "D": str(spec.D), "L_alg": str(recognized), "bound": bound}
    if vanishes:
        row.update(ord_p=None, tight=None, predicted_sha=None)
        return row
    ord_p = _ord(recognized, p)
    row.update(ord_p=ord_p, tight=ord_p == bound)
    if spec.D.is_rational():
        from .bsd import local_product_valuation
        rhs, _ = local_product_valuation(spec, p)
        row["predicted_sha"] = ord_p - rhs
    return row


def _fixture_table_row(res: RowResult) -> dict:
    row = res.row
    if res.error:
        return {"pi": row.pi, "D": row.D, "L_alg": "error"}
    spec = row.spec()
    value = res.computed if row.value_mode == "rational" else res.l_value
    out = _table_row(spec, row.pi, value, res.vanishes)
    out["D"] = row.D
    return out


def cmd_table(args, cfg: RunConfig, out) -> int:
    ctx = cfg.context()
    if args.source == "fixtures":
        rows = [r for r in load_rows(cfg.fixtures) if r.kind.value == args.kind]
        if args.table:
            rows = [r for r in rows if r.table == args.table]
        results = evaluate_rows(rows, ctx, cfg.jobs)
        print(render([_fixture_table_row(r) for r in results], cfg.format), end="", file=out)
        mismatches = [r for r in results if not r.matches]
        for r in mismatches:
            print(f"mismatch: {r.row.table} D={r.row.D} expected {r.row.expected} computed {r.computed}"
                  + (f" ({r.error})" if r.error else ""), file=sys.stderr)
        print(f"mismatches: {len(mismatches)} of {len(results)}", file=sys.stderr)
        return EXIT_TABLE_MISMATCH if mismatches else 0
    rows, violations = range_rows(args.kind, args.bound, ctx, cfg.jobs)
    print(render(rows, cfg.format), end="", file=out)
    print(f"rows: {len(rows)}, bound violations: {violations}", file=sys.stderr)
    return EXIT_BOUND_VIOLATED if violations else 0


def range_specs(kind: str, bound: int) -> list[TwistSpec]:
    """Rational D = p up to the bound: special split p (quadratic) or norms of cubic-special primes (cubic)."""
    if kind == "quadratic":
        return [TwistSpec.quadratic(c.p_or_pi) for c in enumerate_classified(bound, "special_split")]
    norms = sorted({c.norm for c in enumerate_classified(bound, "cubic_special")})
    return [TwistSpec.cubic(n) for n in norms]


def _range_eval(args: tuple[str, int, int, float]):
    kind, d, bits, tol = args
    spec = TwistSpec.make(kind, d)
    lv = l_value_rational(spec, PrecisionContext(working_bits=bits, target_abs_error=tol))
    return _table_row(spec, "", lv.recognized, lv.vanishes)


def range_rows(kind: str, bound: int, ctx: PrecisionContext, jobs: int = 1) -> tuple[list[dict], int]:
    work = [(kind, s.D.a, ctx.working_bits, ctx.target_abs_error) for s in range_specs(kind, bound)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_range_eval, work))
    else:
        rows = [_range_eval(w) for w in work]
    violations = sum(1 for r in rows if r["ord_p"] is not None and r["ord_p"] < r["bound"])
    return rows, violations


def cmd_verify(args, cfg: RunConfig, out) -> int:
    ctx = cfg.context()
    if args.what == "models":
        from .models import four_division_numeric_check, good_reduction_model_check, kummer_exponent_search
        try:
            sols = kummer_exponent_search()
            rep = good_reduction_model_check(ctx)
            gap = four_division_numeric_check(ctx)
        except IdentityFailed as exc:
            print(f"model identity failed: {exc}", file=out)
            return EXIT_MODEL_FAILED
        print("kummer exponents: " + " ".join(f"({s.a},{s.b},{s.c})" for s in sols), file=out)
        print(f"model identity: exact; discriminant {rep.discriminant}, ord_3 = {rep.disc_ord3}", file=out)
        for line in rep.context:
            print(line, file=out)
        print(f"4-division x-values: numeric gap {gap:.2e}", file=out)
        ok = len(sols) == 6 and rep.disc_ord3 == 0 and gap < 1e-20
        return 0 if ok else EXIT_MODEL_FAILED
    from .phi import phi_paths_agree, verify_valuation_bounds
    spec = _spec(args.kind, args.d)
    if args.what == "phi":
        agree, a, b = phi_paths_agree(spec, ctx=ctx)
        print(f"from L-values: {a.complex_estimate} (err {a.error:.2e})", file=out)
        print(f"from wp:       {b.complex_estimate} (err {b.error:.2e})", file=out)
        print("paths agree" if agree else "paths DISAGREE", file=out)
        return 0 if agree else EXIT_PHI_MISMATCH
    rep = verify_valuation_bounds(spec, ctx=ctx)
    for chi, v in rep.phi_valuations.items():
        print(f"chi={chi}: ord_{rep.p}(Phi) = {_text(v) or 'Phi=0'} (bound {rep.phi_bound})", file=out)
    if rep.quarter_bound is not None:
        print(f"refined bound {rep.quarter_bound}: {'holds' if rep.quarter_ok else 'violated'}", file=out)
    return 0 if rep.passed else EXIT_BOUND_VIOLATED


def cmd_classify(args, cfg: RunConfig, out) -> int:
    rows = []
    if args.kind == "quadratic":
        for p in ([int(args.d)] if args.d else [c.p_or_pi for c in enumerate_classified(args.bound, "special_split")]):
            w = special_split_witness(p)
            rows.append({"prime": p, "special": is_special_split(p), "splits": w["splits"]})
        cols = ("prime", "special", "splits")
    else:
        targets = [parse_d(args.d)] if args.d else [c.p_or_pi for c in enumerate_classified(args.bound, "cubic_special")]
        for pi in targets:
            w = cubic_special_witness(pi)
            rows.append({"prime": str(w["generator"]), "norm": pi.norm(), "one_mod_27": w["one_mod_27"],
                         "order_one_minus_w": w["order_one_minus_w"],
                         "special": w["one_mod_27"] and w["nine_divides_order"]})
        cols = ("prime", "norm", "one_mod_27", "order_one_minus_w", "special")
    print(render(rows, cfg.format, cols), end="", file=out)
    return 0


def cmd_phi(args, cfg: RunConfig, out) -> int:
    from .phi import phi_from_lvalues, phi_from_wp
    spec = _spec(args.kind, args.d)
    chi = tuple(int(c) for c in args.chi.split(",")) if args.chi else None
    fn = phi_from_wp if args.path == "wp" else phi_from_lvalues
    phi = fn(spec, chi=chi, ctx=cfg.context())
    info = {"twist": spec.label(), "path": phi.path, "estimate": str(phi.complex_estimate), "error": phi.error,
            "recognized": str(phi.recognized) if phi.recognized is not None else ""}
    _emit_info(info, cfg, out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, help="working precision in bits")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--jobs", type=int)
    common.add_argument("--fixtures", help="path to the fixture CSV")
    common.add_argument("--denom-bound", dest="denom_bound", type=int)
    common.add_argument("--config", help="key=value config file (flags override it)")

    parser = argparse.ArgumentParser(prog="cmtwist", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lvalue", parents=[common], help="one algebraic L-value, with a BSD report for --p")
    p.add_argument("--kind", choices=("quadratic", "cubic", "none"), required=True)
    p.add_argument("--d", default="1")
    p.add_argument("--p", type=int, choices=(2, 3))
    p.set_defaults(func=cmd_lvalue)

    p = sub.add_parser("table", parents=[common], help="reproduce the stored table or scan a range")
    p.add_argument("--kind", choices=("quadratic", "cubic"), required=True)
    p.add_argument("--source", choices=("fixtures", "range"), default="fixtures")
    p.add_argument("--table", help="restrict fixtures to one table name")
    p.add_argument("--bound", type=int, default=2000)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", parents=[common], help="path equivalence, valuation bounds, or the model checks")
    p.add_argument("--kind", choices=("quadratic", "cubic"))
    p.add_argument("--d")
    p.add_argument("--what", choices=("phi", "bounds", "models"), required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", parents=[common], help="special split / cubic-special tests")
    p.add_argument("--kind", choices=("quadratic", "cubic"), required=True)
    p.add_argument("--d")
    p.add_argument("--bound", type=int, default=2000)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("phi", parents=[common], help="raw Phi values")
    p.add_argument("--kind", choices=("quadratic", "cubic"), required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--chi", help="comma-separated character exponents")
    p.add_argument("--path", choices=("lvalues", "wp"), default="lvalues")
    p.set_defaults(func=cmd_phi)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and args.what != "models" and (args.kind is None or args.d is None):
        parser.error("--kind and --d are required unless --what models")
    try:
        cfg = build_config(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return args.func(args, cfg, out)
    except CmTwistError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
