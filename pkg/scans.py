"""
scans.py - sweeps over primes

Each sweep evaluates one test per prime, in chunks. Chunks run on the task
queue, come back in prime order and are appended to an optional checkpoint
file as they finish, so an interrupted sweep resumes where it stopped and the
final output is the same whatever the worker count.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

from sympy import primerange

from core_arith import Modulus, modulus
from density import GenerationStatus, density_zero_named, generation_status, subgroup_order
from errors import OutOfScopeError
from sequence_tables import SequenceId, t_prefix, t_table
from sweep_state import append_checkpoint, load_checkpoint, record_key
from symmetry import motzkin_pm2_criterion, pm2_identity_check
from task_queue import TaskQueue
from trinomial_oracle import SeqParams

logger = logging.getLogger(__name__)

FAIL = "FAIL"
HARD_FAILURES = {FAIL, GenerationStatus.FAILS_TO_GENERATE.value}
DEFAULT_CHECKPOINT_EVERY = 100


@dataclass(frozen=True)
class SweepResult:
    prime: Modulus
    verdicts: dict[str, str]
    payload: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.prime.p

    @property
    def failed(self) -> bool:
        return any(v in HARD_FAILURES for v in self.verdicts.values())

    def to_records(self) -> list[dict]:
        return [
            {"p": self.p, "test": test, "verdict": verdict, "payload": self.payload.get(test, {})}
            for test, verdict in sorted(self.verdicts.items())
        ]

    @classmethod
    def from_record(cls, rec: dict) -> "SweepResult":
        return cls(modulus(rec["p"]), {rec["test"]: rec["verdict"]}, {rec["test"]: rec.get("payload", {})})


# -----------------------------------------------------------------------------
# Single-prime tests
# -----------------------------------------------------------------------------
def a113305_test(p) -> bool:
    """True iff p divides none of T_0..T_{(p-1)/2} (a = b = 1), hence no central trinomial coefficient."""
    mod = modulus(p)
    if mod.p == 2:
        raise OutOfScopeError("the half-table test needs an odd prime")
    if mod.p == 3:
        # 3 divides b^2 - 4a^2 = -3, so the upper half T_2 vanishes
        return False
    return all(t_prefix(SeqParams(1, 1), mod, (mod.p - 1) // 2))


def a113305_full_test(p) -> bool:
    return not t_table(SeqParams(1, 1), p).has_zero


class A113305Density(NamedTuple):
    ratio: Fraction
    passed: int
    total: int
    heuristic: float = math.exp(-0.5)

    @property
    def decimal(self) -> float:
        return round(float(self.ratio), 6)


def a113305_density(X: int) -> A113305Density:
    """Fraction of odd primes p <= X dividing no central trinomial coefficient."""
    if X < 5:
        raise ValueError(f"prime bound must be at least 5, got {X}")
    primes = list(primerange(3, X + 1))
    passed = sum(1 for p in primes if a113305_test(p))
    return A113305Density(Fraction(passed, len(primes)), passed, len(primes))


def mult_conj_check(params: SeqParams, p) -> GenerationStatus:
    tt = t_table(params, p)
    status = generation_status(tt)
    if status is GenerationStatus.FAILS_TO_GENERATE:
        values = sorted(set(tt.values[:tt.p]))
        logger.error(
            f"T values mod {tt.p} for {params} do not generate F_p^x: values={values}, "
            f"subgroup order {subgroup_order(values, tt.p)} of {tt.p - 1}"
        )
    return status


# -----------------------------------------------------------------------------
# Per-prime workers (module level so worker processes can import them)
# -----------------------------------------------------------------------------
def _a113305_worker(p: int) -> dict:
    shortcut, full = a113305_test(p), a113305_full_test(p)
    verdict = FAIL if shortcut != full else ("member" if full else "non_member")
    if verdict == FAIL:
        logger.error(f"half-table test disagrees with the full table at p={p}")
    return {"verdict": verdict, "payload": {"shortcut": shortcut, "full": full}}


def _equality_worker(p: int) -> dict:
    riordan = density_zero_named(SequenceId.A005043, p).d0
    a005773 = density_zero_named(SequenceId.A005773, p).d0
    verdict = "equal" if riordan == a005773 else FAIL
    if verdict == FAIL:
        logger.error(f"A005043 and A005773 densities differ at p={p}: {riordan} vs {a005773}")
    return {"verdict": verdict, "payload": {"a005043": str(riordan), "a005773": str(a005773)}}


def _pm2_worker(p: int) -> dict:
    divides, one_mod_3 = motzkin_pm2_criterion(p)
    payload = {"divides": divides, "one_mod_3": one_mod_3}
    ok = divides == one_mod_3
    if p > 2:
        payload["identity"] = pm2_identity_check(p)
        ok = ok and payload["identity"]
    if not ok:
        logger.error(f"M_(p-2) criterion fails at p={p}: {payload}")
    return {"verdict": "consistent" if ok else FAIL, "payload": payload}


def _conjecture_worker(p: int, a: int, b: int) -> dict:
    params = SeqParams(a, b)
    status = mult_conj_check(params, p)
    payload = {}
    if status is not GenerationStatus.DEGENERATE_ZERO:
        payload["subgroup_order"] = subgroup_order(t_table(params, p).values[:p], p)
    return {"verdict": status.value, "payload": payload}


SWEEP_WORKERS: dict[str, Callable[..., dict]] = {
    "a113305": _a113305_worker,
    "equality": _equality_worker,
    "pm2": _pm2_worker,
    "conjecture": _conjecture_worker,
}


def _run_chunk(test: str, label: str, primes: list[int], extra: tuple) -> list[dict]:
    worker = SWEEP_WORKERS[test]
    out = []
    for p in primes:
        res = worker(p, *extra)
        out.append({"p": p, "test": label, "verdict": res["verdict"], "payload": res["payload"]})
    return out


def run_sweep(test: str, X: int, min_p: int = 2, extra: tuple = (), jobs: int = 1,
              checkpoint: str | None = None, checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY) -> list[SweepResult]:
    if test not in SWEEP_WORKERS:
        raise ValueError(f"unknown sweep {test!r}")
    # parameterised sweeps keep their parameters in the record name so resumes never mix them
    label = test if not extra else f"{test}(" + ",".join(map(str, extra)) + ")"
    primes = list(primerange(min_p, X + 1))
    done = {}
    if checkpoint:
        saved = load_checkpoint(checkpoint)
        done = {p: saved[record_key(p, label)] for p in primes if record_key(p, label) in saved}
        if done:
            logger.info(f"resuming {test} sweep: {len(done)} of {len(primes)} primes already in {checkpoint}")
    todo = [p for p in primes if p not in done]
    chunks = [todo[i:i + checkpoint_every] for i in range(0, len(todo), checkpoint_every)]
    records = list(done.values())
    with TaskQueue(max_workers=jobs) as pool:
        for chunk_records in pool.map_ordered(_run_chunk, [(test, label, c, extra) for c in chunks]):
            records.extend(chunk_records)
            if checkpoint:
                append_checkpoint(checkpoint, chunk_records)
            logger.info(f"{test} sweep: {len(records)}/{len(primes)} primes (p <= {chunk_records[-1]['p']})")
    results = [SweepResult.from_record(r) for r in sorted(records, key=lambda r: r["p"])]
    failures = [r.p for r in results if r.failed]
    if failures:
        logger.error(f"{test} sweep up to {X}: {len(failures)} failure(s), first at p={failures[0]}")
    return results


def equality_sweep(X: int, **kwargs) -> list[SweepResult]:
    if X < 5:
        raise ValueError(f"prime bound must be at least 5, got {X}")
    return run_sweep("equality", X, min_p=3, **kwargs)


def pm2_sweep(X: int, **kwargs) -> list[SweepResult]:
    return run_sweep("pm2", X, **kwargs)


def a113305_sweep(X: int, **kwargs) -> list[SweepResult]:
    return run_sweep("a113305", X, min_p=3, **kwargs)


def conjecture_sweep(X: int, params: SeqParams = SeqParams(1, 1), **kwargs) -> list[SweepResult]:
    return run_sweep("conjecture", X, extra=(params.a, params.b), **kwargs)
