"""
motzkin.py - command line front end

    python motzkin.py table --p 5 --seq trinomial
    python motzkin.py density --p 5 --seq motzkin
    python motzkin.py scan a113305 --max 10000 --format csv

Exit codes: 0 success, 1 a proved congruence or sweep check failed, 2 usage or
other refusals (budget, degenerate input, out-of-scope requests).
"""

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from tabulate import tabulate

from core_arith import format_ratio, modulus
from density import (
    count_zeros_enum,
    count_zeros_exact,
    density_for_sequence,
    empirical_value_counts,
    value_densities,
)
from digit_eval import EvalMethod, combo_evaluator, motzkin_value, t_eval
from errors import (
    BudgetExceededError, MotzkinError, NonInvertibleError, TheoremViolationError, UnsupportedWidthError, UsageError,
)
from my_utils import load_settings, setup_logging
from scans import (
    HARD_FAILURES,
    A113305Density,
    a113305_sweep,
    conjecture_sweep,
    equality_sweep,
    pm2_sweep,
)
from sequence_tables import SequenceId, combo_for, combo_table, m_table, t_table
from symmetry import (
    check_m_symmetry,
    check_t_symmetry,
    check_t_symmetry_inverted,
    motzkin_pm2_criterion,
    t_pm1_square_check,
)
from trinomial_oracle import (
    MOTZKIN_WEIGHT,
    ONE,
    ONE_PLUS_X_WEIGHT,
    RIORDAN_WEIGHT,
    X_WEIGHT,
    SeqParams,
    oracle_prefix,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FORMATS = ("text", "json", "csv")
SCANS = ("a113305", "conjecture", "equality", "pm2")

# fixed CSV columns per subcommand
CSV_COLUMNS = {
    "table": ["n", "value"],
    "eval": ["n", "value", "method"],
    "symmetry": ["theorem", "p", "checked", "violations", "holds", "note"],
    "density": ["sequence", "p", "a", "b", "d0", "d0_decimal", "plain", "even", "odd",
                "degenerate", "lower_bound", "outside_paper_formulas", "method"],
    "count": ["N", "total", "exact", "enum", "agree", "fraction"],
    "values": ["residue", "density", "count", "fraction"],
    "scan": ["p", "test", "verdict", "payload"],
    "oracle": ["n", "value", "mod_p"],
}

ORACLE_WEIGHTS = {
    SequenceId.TRINOMIAL: ONE,
    SequenceId.MOTZKIN: MOTZKIN_WEIGHT,
    SequenceId.A005717: X_WEIGHT,
    SequenceId.A005043: RIORDAN_WEIGHT,
    SequenceId.A005773: ONE_PLUS_X_WEIGHT,
}


def _schema(row_required: list[str]) -> dict:
    return {
        "type": "object",
        "required": ["schema_version", "command", "params", "rows", "summary"],
        "properties": {
            "schema_version": {"const": SCHEMA_VERSION},
            "command": {"type": "string"},
            "params": {"type": "object"},
            "rows": {"type": "array", "items": {"type": "object", "required": row_required}},
            "summary": {"type": "object"},
        },
    }


JSON_SCHEMAS = {
    "table": _schema(["n", "value"]),
    "eval": _schema(["n", "value", "method"]),
    "symmetry": _schema(["theorem", "p", "holds"]),
    "density": _schema(["sequence", "p", "d0", "degenerate"]),
    "count": _schema(["N", "total", "exact", "enum"]),
    "values": _schema(["residue", "density", "count"]),
    "scan": _schema(["p", "test", "verdict", "payload"]),
    "oracle": _schema(["n", "value"]),
}


@dataclass
class RunConfig:
    command: str
    p: int | None = None
    a: int = 1
    b: int = 1
    sequence: SequenceId = SequenceId.MOTZKIN
    alphas: tuple[int, ...] | None = None
    n: list[int] | None = None
    digits: int | None = None
    max: int | None = None
    scan: str | None = None
    fmt: str = "text"
    jobs: int = 1
    budget: int = 100_000_000
    checkpoint: str | None = None
    checkpoint_every: int = 100
    oracle_cap: int = 2000

    @property
    def params(self) -> SeqParams:
        return SeqParams(self.a, self.b)

    def describe(self) -> dict:
        out = {"p": self.p, "a": self.a, "b": self.b, "sequence": self.sequence.value}
        if self.alphas:
            out["alpha"] = list(self.alphas)
        for key in ("n", "digits", "max", "scan"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        return out


@dataclass
class CommandOutput:
    command: str
    params: dict
    rows: list[dict]
    summary: dict = field(default_factory=dict)
    failures: int = 0


# -----------------------------------------------------------------------------
# Argument parsing
# -----------------------------------------------------------------------------
def _alpha_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"--alpha expects comma-separated integers, got {text!r}") from None


def build_parser(settings) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=int, default=1, help="weight of up/down steps (default 1)")
    common.add_argument("--b", type=int, default=1, help="weight of level steps (default 1)")
    common.add_argument("--seq", default=None, help="motzkin|trinomial|a005717|a005043|a005773|custom")
    common.add_argument("--alpha", type=_alpha_list, help="comma list alpha_0..alpha_h for --seq custom")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default="text")
    common.add_argument("--jobs", type=int, default=settings.jobs)
    common.add_argument("--budget", type=int, default=settings.budget, help="max enumerated terms")
    common.add_argument("--log-level", default=settings.log_level)

    parser = argparse.ArgumentParser(prog="motzkin", description="Motzkin and trinomial numbers mod p")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", parents=[common], help="first p terms mod p")
    p.add_argument("--p", type=int, required=True)

    p = sub.add_parser("eval", parents=[common], help="value mod p at given indices")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, nargs="+", required=True)

    p = sub.add_parser("symmetry", parents=[common], help="check the reflection congruences")
    p.add_argument("--p", type=int, required=True)

    p = sub.add_parser("density", parents=[common], help="exact density of 0 mod p")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--digits", type=int, help="enumeration length where no formula applies (p = 2)")

    p = sub.add_parser("count", parents=[common], help="zeros among the first p^N terms")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--digits", type=int, required=True)

    p = sub.add_parser("values", parents=[common], help="densities of every residue")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--digits", type=int, help="also histogram the first p^N terms")

    p = sub.add_parser("scan", parents=[common], help="sweep over primes")
    p.add_argument("scan", choices=SCANS)
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--checkpoint", help="JSON-lines file for resumable sweeps")
    p.add_argument("--checkpoint-every", type=int, default=settings.checkpoint_every)

    p = sub.add_parser("oracle", parents=[common], help="exact integers by brute-force expansion")
    p.add_argument("--n", dest="max", type=int, required=True, help="largest index")
    p.add_argument("--p", type=int, help="also reduce mod p")
    return parser


DEFAULT_SEQUENCE = {"table": SequenceId.TRINOMIAL, "oracle": SequenceId.TRINOMIAL}


def make_config(args, settings) -> RunConfig:
    command = args.command
    raw_seq = args.seq or DEFAULT_SEQUENCE.get(command, SequenceId.MOTZKIN).value
    try:
        sequence = SequenceId.parse(raw_seq)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if args.alpha and sequence is not SequenceId.CUSTOM:
        raise UsageError("--alpha only applies to --seq custom")
    if sequence is SequenceId.CUSTOM and not args.alpha:
        raise UsageError("--seq custom needs --alpha")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    p = getattr(args, "p", None)
    if p is not None:
        modulus(p)
        if p > settings.prime_cap:
            raise UsageError(f"p = {p} is above the prime cap {settings.prime_cap} (MOTZKIN_PRIME_CAP)")
    cfg = RunConfig(
        command=command, p=p, a=args.a, b=args.b, sequence=sequence, alphas=args.alpha,
        n=getattr(args, "n", None), digits=getattr(args, "digits", None), max=getattr(args, "max", None),
        scan=getattr(args, "scan", None), fmt=args.fmt, jobs=args.jobs, budget=args.budget,
        checkpoint=getattr(args, "checkpoint", None),
        checkpoint_every=getattr(args, "checkpoint_every", settings.checkpoint_every),
        oracle_cap=settings.oracle_cap,
    )
    if cfg.digits is not None and cfg.digits < 0:
        raise UsageError("--digits must be non-negative")
    if cfg.n is not None and min(cfg.n) < 0:
        raise UsageError("--n must be non-negative")
    if command == "oracle" and cfg.max < 0:
        raise UsageError("--n must be non-negative")
    if cfg.max is not None and cfg.max > settings.prime_cap:
        raise UsageError(f"--max {cfg.max} is above the prime cap {settings.prime_cap}")
    if cfg.checkpoint_every < 1:
        raise UsageError("--checkpoint-every must be at least 1")
    return cfg


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------
def cmd_table(cfg: RunConfig) -> CommandOutput:
    params, mod = cfg.params, modulus(cfg.p)
    tt = t_table(params, mod)
    summary = {}
    if cfg.sequence is SequenceId.TRINOMIAL:
        values = list(tt.values[:mod.p])
        summary["forced_tail"] = list(tt.values[mod.p:])
    elif cfg.sequence is SequenceId.MOTZKIN:
        mt = m_table(params, mod, tt)
        values = list(mt.values)
        summary["method"] = mt.method.value
    else:
        values = list(combo_table(combo_for(cfg.sequence, params, cfg.alphas), tt))
    summary["values"] = ",".join(map(str, values))
    rows = [{"n": i, "value": v} for i, v in enumerate(values)]
    return CommandOutput("table", cfg.describe(), rows, summary)


def cmd_eval(cfg: RunConfig) -> CommandOutput:
    params, mod = cfg.params, modulus(cfg.p)
    tt = t_table(params, mod)
    rows = []
    if cfg.sequence is SequenceId.TRINOMIAL:
        rows = [{"n": n, "value": t_eval(n, tt).value, "method": EvalMethod.DIGIT_PRODUCT.value} for n in cfg.n]
    elif cfg.sequence is SequenceId.MOTZKIN:
        mt = m_table(params, mod, tt)
        for n in cfg.n:
            value, method = motzkin_value(n, tt, mt)
            rows.append({"n": n, "value": value.value, "method": method.value})
    else:
        evaluator = combo_evaluator(combo_for(cfg.sequence, params, cfg.alphas), tt)
        rows = [{"n": n, "value": evaluator(n), "method": evaluator.method.value} for n in cfg.n]
    return CommandOutput("eval", cfg.describe(), rows)


def cmd_symmetry(cfg: RunConfig) -> CommandOutput:
    params, mod = cfg.params, modulus(cfg.p)
    q, disc_zero = mod.p, params.discriminant % mod.p == 0
    rows = []

    def add_report(report):
        rows.append({
            "theorem": report.theorem, "p": q,
            "checked": f"{report.checked_range.start}..{report.checked_range.stop - 1}",
            "violations": len(report.violations), "holds": report.holds, "note": "",
        })

    def skip(theorem, why):
        rows.append({"theorem": theorem, "p": q, "checked": "", "violations": 0, "holds": None, "note": why})

    if q > 2:
        add_report(check_t_symmetry(params, mod))
    else:
        skip("t_symmetry", "needs p > 2")
    if q > 2 and not disc_zero:
        add_report(check_t_symmetry_inverted(params, mod))
        holds = t_pm1_square_check(params, mod)
        rows.append({"theorem": "t_pm1_square", "p": q, "checked": str(q - 1),
                     "violations": 0 if holds else 1, "holds": holds, "note": ""})
    else:
        skip("t_symmetry_inverted", "needs p > 2 and p not dividing b^2-4a^2")
        skip("t_pm1_square", "needs p > 2 and p not dividing b^2-4a^2")
    if q > 3:
        add_report(check_m_symmetry(params, mod))
    else:
        skip("m_symmetry", "needs p > 3")
    if (cfg.a, cfg.b) == (1, 1):
        divides, one_mod_3 = motzkin_pm2_criterion(mod)
        rows.append({"theorem": "m_pm2_criterion", "p": q, "checked": str(q - 2),
                     "violations": 0 if divides == one_mod_3 else 1, "holds": divides == one_mod_3,
                     "note": f"p | M_(p-2): {divides}, p = 1 mod 3: {one_mod_3}"})
    failures = sum(1 for r in rows if r["holds"] is False)
    return CommandOutput("symmetry", cfg.describe(), rows, {"failures": failures}, failures)


def cmd_density(cfg: RunConfig) -> CommandOutput:
    kwargs = {"enum_digits": cfg.digits} if cfg.digits is not None else {}
    report = density_for_sequence(cfg.sequence, cfg.params, cfg.p, cfg.alphas, **kwargs)
    summary = {"d0": format_ratio(report.d0)}
    if report.lower_bound is not None:
        summary["lower_bound"] = format_ratio(report.lower_bound)
    return CommandOutput("density", cfg.describe(), [report.to_dict()], summary)


def cmd_count(cfg: RunConfig) -> CommandOutput:
    params, mod = cfg.params, modulus(cfg.p)
    combo = combo_for(cfg.sequence, params, cfg.alphas)
    tt = t_table(params, mod)
    rows, failures = [], 0
    for N in range(cfg.digits + 1):
        total = mod.p ** N
        try:
            exact = count_zeros_exact(combo, params, mod, N, ttable=tt, allow_degenerate=True)
        except (UnsupportedWidthError, NonInvertibleError) as e:
            # too wide for p, or a non-unit scale whose zero set is not the bracket's
            logger.info(f"N={N}: no closed-form count ({e})")
            exact = None
        try:
            enum = count_zeros_enum(combo, params, mod, N, budget=cfg.budget, jobs=cfg.jobs, ttable=tt)
        except BudgetExceededError as e:
            logger.info(f"N={N}: enumeration skipped ({e})")
            enum = None
        agree = None if enum is None or exact is None else exact == enum
        failures += agree is False
        zeros = exact if exact is not None else enum
        rows.append({"N": N, "total": total, "exact": exact, "enum": enum, "agree": agree,
                     "fraction": None if zeros is None else round(zeros / total, 6)})
    summary = {"degenerate": tt.has_zero, "failures": failures}
    if failures:
        logger.error(f"closed-form and enumerated zero counts disagree for {combo.name} mod {mod.p}")
    return CommandOutput("count", cfg.describe(), rows, summary, failures)


def cmd_values(cfg: RunConfig) -> CommandOutput:
    if cfg.sequence is not SequenceId.MOTZKIN:
        raise UsageError("values is defined for --seq motzkin only")
    params, mod = cfg.params, modulus(cfg.p)
    report = value_densities(params, mod)
    counts = empirical_value_counts(params, mod, cfg.digits, budget=cfg.budget, jobs=cfg.jobs) \
        if cfg.digits is not None else None
    rows = []
    for r in range(mod.p):
        density = report.d0 if r == 0 else report.nonzero_density
        row = {"residue": r, "density": None if density is None else str(density)}
        row["count"] = counts[r] if counts is not None else None
        row["fraction"] = round(counts[r] / mod.p ** cfg.digits, 6) if counts is not None else None
        rows.append(row)
    summary = {
        "d0": format_ratio(report.d0),
        "generation": report.generation.value,
        "table_status": report.table_status.value,
        "subgroup_order": report.subgroup_order,
        "degenerate": report.degenerate.value if report.degenerate else None,
    }
    return CommandOutput("values", cfg.describe(), rows, summary)


def cmd_scan(cfg: RunConfig) -> CommandOutput:
    kwargs = {"jobs": cfg.jobs, "checkpoint": cfg.checkpoint, "checkpoint_every": cfg.checkpoint_every}
    if cfg.scan == "a113305":
        results = a113305_sweep(cfg.max, **kwargs)
    elif cfg.scan == "equality":
        results = equality_sweep(cfg.max, **kwargs)
    elif cfg.scan == "pm2":
        results = pm2_sweep(cfg.max, **kwargs)
    else:
        results = conjecture_sweep(cfg.max, cfg.params, **kwargs)
    rows = []
    for res in results:
        for rec in res.to_records():
            rec["payload"] = json.dumps(rec["payload"], sort_keys=True)
            rows.append(rec)
    failures = sum(1 for r in rows if r["verdict"] in HARD_FAILURES)
    summary = {"primes": len(results), "failures": failures}
    if cfg.scan == "a113305" and results:
        members = sum(1 for r in rows if r["verdict"] == "member")
        dens = A113305Density(Fraction(members, len(rows)), members, len(rows))
        summary.update({"fraction": str(dens.ratio), "fraction_decimal": dens.decimal,
                        "heuristic": round(dens.heuristic, 6)})
    elif cfg.scan == "conjecture":
        for verdict in sorted({r["verdict"] for r in rows}):
            summary[verdict] = sum(1 for r in rows if r["verdict"] == verdict)
    return CommandOutput("scan", cfg.describe(), rows, summary, failures)


def cmd_oracle(cfg: RunConfig) -> CommandOutput:
    if cfg.sequence is SequenceId.CUSTOM:
        raise UsageError("oracle needs a sequence with a known weight, not custom")
    weight = ORACLE_WEIGHTS[cfg.sequence]
    values = oracle_prefix(cfg.params, cfg.max + 1, weight, cap=cfg.oracle_cap)
    q = modulus(cfg.p).p if cfg.p is not None else None
    rows = [{"n": i, "value": v, "mod_p": None if q is None else v % q} for i, v in enumerate(values)]
    return CommandOutput("oracle", cfg.describe(), rows, {"weight": str(weight)})


COMMANDS = {
    "table": cmd_table,
    "eval": cmd_eval,
    "symmetry": cmd_symmetry,
    "density": cmd_density,
    "count": cmd_count,
    "values": cmd_values,
    "scan": cmd_scan,
    "oracle": cmd_oracle,
}


# -----------------------------------------------------------------------------
# Output
# -----------------------------------------------------------------------------
def to_json_document(out: CommandOutput) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": out.command,
        "params": out.params,
        "rows": out.rows,
        "summary": out.summary,
    }


def render(out: CommandOutput, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(to_json_document(out), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS[out.command], extrasaction="ignore",
                                lineterminator="\n")
        writer.writeheader()
        for row in out.rows:
            writer.writerow({k: "" if v is None else v for k, v in row.items()})
        return buf.getvalue()
    lines = [f"{k}: {v}" for k, v in out.summary.items()]
    if out.rows:
        lines.append(tabulate(out.rows, headers="keys"))
    return "\n".join(lines) + "\n"


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    settings = load_settings()
    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    setup_logging(args.log_level, settings.log_dir)
    try:
        cfg = make_config(args, settings)
        out = COMMANDS[cfg.command](cfg)
    except TheoremViolationError as e:
        print(f"theorem violation: {e}", file=stderr)
        return 1
    except UsageError as e:
        print(f"usage error: {e}", file=stderr)
        return 2
    except MotzkinError as e:
        print(f"error [{type(e).__name__}]: {e}", file=stderr)
        return 2
    except ValueError as e:
        print(f"usage error: {e}", file=stderr)
        return 2
    stdout.write(render(out, cfg.fmt))
    return 1 if out.failures else 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
