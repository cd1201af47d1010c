"""
density.py - exact densities of 0 (and of nonzero residues) mod p

The digits of a random index are uniform, so the density of zeros of a
shift-combination is a finite sum over the shapes q m (p-1)^k n0 of the
canonical tail form:

    D0 = |plain| / p + |even| / ((p-1)(p+1)) + |odd| / ((p-1) p (p+1))

where "plain" counts last digits that never carry, and "even"/"odd" count the
(n0, m) pairs that vanish when the run of (p-1) digits has even/odd length
(T_{p-1}^2 = 1 makes only the parity matter). A single zero among T_0..T_{p-1}
makes almost every index vanish, so D0 = 1 there.

count_zeros_exact evaluates the same sums truncated at N digits, so its ratio
to p^N converges to D0 and agrees exactly with brute-force enumeration.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from sympy import factorint

from core_arith import Modulus, modulus
from digit_eval import SequenceEvaluator, combo_evaluator, motzkin_evaluator
from errors import BudgetExceededError, DegenerateInputError, OutOfScopeError, TheoremViolationError
from sequence_tables import (
    ShiftCombo,
    SequenceId,
    TTable,
    combo_for,
    m_table,
    named_combo,
    t_table,
)
from task_queue import TaskQueue
from trinomial_oracle import SeqParams

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 100_000_000
P2_ENUM_DIGITS = 12


class Degeneracy(Enum):
    T_ZERO_FOUND = "TZeroFound"
    P_DIVIDES_DISCRIMINANT = "PDividesDiscriminant"
    P_DIVIDES_A = "PDividesA"
    P_EQUALS_2 = "PEquals2"


class GenerationStatus(Enum):
    DEGENERATE_ZERO = "DegenerateZero"
    GENERATES = "Generates"
    FAILS_TO_GENERATE = "FailsToGenerate"


class CaseContributions(NamedTuple):
    plain: Fraction
    even: Fraction
    odd: Fraction

    @property
    def total(self) -> Fraction:
        return self.plain + self.even + self.odd


@dataclass(frozen=True)
class DensityReport:
    modulus: Modulus
    params: SeqParams
    sequence_id: str
    d0: Fraction
    case_contributions: CaseContributions | None = None
    degenerate: Degeneracy | None = None
    lower_bound: Fraction | None = None
    nonzero_density: Fraction | None = None
    generation: GenerationStatus | None = None
    # generation reads only the nonzero T values; table_status is DegenerateZero once T has a zero
    table_status: GenerationStatus | None = None
    subgroup_order: int | None = None
    outside_paper_formulas: bool = False
    method: str = "formula"
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not 0 <= self.d0 <= 1:
            raise TheoremViolationError(f"density {self.d0} outside [0, 1]", self)
        if self.degenerate is Degeneracy.T_ZERO_FOUND and self.d0 != 1:
            raise TheoremViolationError(f"T has a zero mod {self.modulus.p} but D0 = {self.d0}", self)
        if self.case_contributions is not None and self.case_contributions.total != self.d0:
            raise TheoremViolationError(f"case contributions do not add up to D0 = {self.d0}", self)

    @property
    def p(self) -> int:
        return self.modulus.p

    def to_dict(self) -> dict:
        def ratio(r):
            return None if r is None else str(r)

        cc = self.case_contributions
        return {
            "sequence": self.sequence_id,
            "p": self.p,
            "a": self.params.a,
            "b": self.params.b,
            "d0": ratio(self.d0),
            "d0_decimal": round(float(self.d0), 6),
            "plain": ratio(cc.plain) if cc else None,
            "even": ratio(cc.even) if cc else None,
            "odd": ratio(cc.odd) if cc else None,
            "degenerate": self.degenerate.value if self.degenerate else None,
            "lower_bound": ratio(self.lower_bound),
            "nonzero_density": ratio(self.nonzero_density),
            "generation": self.generation.value if self.generation else None,
            "table_status": self.table_status.value if self.table_status else None,
            "subgroup_order": self.subgroup_order,
            "outside_paper_formulas": self.outside_paper_formulas,
            "method": self.method,
        }


# -----------------------------------------------------------------------------
# Zero sets
# -----------------------------------------------------------------------------
class ZeroSets(NamedTuple):
    plain: tuple[int, ...]
    even: tuple[tuple[int, int], ...]  # (n0, m) vanishing for even run length k
    odd: tuple[tuple[int, int], ...]


def _tail_sums(alphas: tuple[int, ...], t: tuple[int, ...], p: int, n0: int) -> tuple[int, int]:
    h = len(alphas) - 1
    head = sum(alphas[i] * t[n0 + i] for i in range(p - n0))
    tail = sum(alphas[i] * t[i - (p - n0)] for i in range(p - n0, h + 1))
    return head % p, tail % p


def combo_zero_sets(combo: ShiftCombo, ttable: TTable) -> ZeroSets:
    p, t = ttable.p, ttable.values
    alphas = combo.residues(p)
    h = combo.h
    plain = tuple(n for n in range(p - h) if sum(al * t[n + i] for i, al in enumerate(alphas)) % p == 0)
    even, odd = [], []
    for n0 in range(p - h, p):
        head, tail = _tail_sums(alphas, t, p, n0)
        for m in range(p - 1):
            if (t[m] * head + t[m + 1] * tail) % p == 0:
                even.append((n0, m))
            if (t[m] * t[p - 1] * head + t[m + 1] * tail) % p == 0:
                odd.append((n0, m))
    return ZeroSets(plain, tuple(even), tuple(odd))


class MotzkinZeroSets(NamedTuple):
    plain: tuple[int, ...]      # n < p-2 with M_n = 0
    reflected: tuple[int, ...]  # m with b T_m = T_{p-1} T_{m+1}
    ratio: tuple[int, ...]      # m with b T_m = T_{m+1}


def motzkin_zero_sets(params: SeqParams, p) -> MotzkinZeroSets:
    mod = modulus(p)
    q = mod.p
    tt = t_table(params, mod)
    mt = m_table(params, mod, tt)
    t, b = tt.values, params.b % q
    plain = tuple(n for n in range(q - 2) if mt[n] == 0)
    reflected = tuple(m for m in range(q - 1) if (b * t[m] - t[q - 1] * t[m + 1]) % q == 0)
    ratio = tuple(m for m in range(q - 1) if (b * t[m] - t[m + 1]) % q == 0)
    return MotzkinZeroSets(plain, reflected, ratio)


# c_m T_m = sign * T_{p-1} T_{m+1} and c_m T_m = sign * T_{m+1}, a = b = 1
_NAMED_SET_RULES = {
    SequenceId.A005717: (1, 1),
    SequenceId.A005043: (3, 1),
    SequenceId.A005773: (1, -1),
}


def named_zero_sets(sequence_id, p) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(reflected set, ratio set) of a named a=b=1 sequence."""
    sid = SequenceId.parse(sequence_id) if isinstance(sequence_id, str) else sequence_id
    c, sign = _NAMED_SET_RULES[sid]
    mod = modulus(p)
    q = mod.p
    t = t_table(SeqParams(1, 1), mod).values
    reflected = tuple(m for m in range(q - 1) if (c * t[m] - sign * t[q - 1] * t[m + 1]) % q == 0)
    ratio = tuple(m for m in range(q - 1) if (c * t[m] - sign * t[m + 1]) % q == 0)
    return reflected, ratio


def riordan_bijection_holds(p) -> bool:
    """m -> p-2-m maps the A005043 sets onto the A005773 sets."""
    q = modulus(p).p
    if q <= 3:
        raise OutOfScopeError("the reflection m -> p-2-m needs p > 3")
    src = named_zero_sets(SequenceId.A005043, q)
    dst = named_zero_sets(SequenceId.A005773, q)
    return all(sorted(q - 2 - m for m in s) == sorted(d) for s, d in zip(src, dst))


# -----------------------------------------------------------------------------
# Densities
# -----------------------------------------------------------------------------
def _three_summands(p: int, plain: int, even: int, odd: int) -> CaseContributions:
    return CaseContributions(
        Fraction(plain, p),
        Fraction(even, (p - 1) * (p + 1)),
        Fraction(odd, (p - 1) * p * (p + 1)),
    )


def _degeneracy(ttable: TTable) -> Degeneracy | None:
    if ttable.has_zero:
        return Degeneracy.T_ZERO_FOUND
    if ttable.params.discriminant % ttable.p == 0:
        return Degeneracy.P_DIVIDES_DISCRIMINANT
    return None


def _require_reflection(ttable: TTable):
    if ttable.t_pm1 ** 2 % ttable.p != 1:
        raise TheoremViolationError(f"T_(p-1)^2 is not 1 mod {ttable.p} for {ttable.params}")


def _degenerate_report(mod, params, sid, flag, lower_bound=None) -> DensityReport:
    logger.warning(f"{sid} mod {mod.p} ({params}) is degenerate: {flag.value}, D0 = 1")
    return DensityReport(mod, params, sid, Fraction(1), degenerate=flag, lower_bound=lower_bound, method="degenerate")


def density_zero_generic(combo: ShiftCombo, params: SeqParams, p,
                         ttable: TTable | None = None, enum_digits: int = P2_ENUM_DIGITS) -> DensityReport:
    mod = modulus(p)
    q = mod.p
    combo.residues(q)
    tt = ttable or t_table(params, mod)
    flag = _degeneracy(tt)
    if flag:
        return _degenerate_report(mod, params, combo.name, flag)
    if q == 2:
        zeros = count_zeros_enum(combo, params, mod, enum_digits, ttable=tt)
        return DensityReport(
            mod, params, combo.name, Fraction(zeros, 2 ** enum_digits),
            degenerate=Degeneracy.P_EQUALS_2, outside_paper_formulas=True,
            method=f"enumeration_{enum_digits}_digits",
        )
    _require_reflection(tt)
    sets = combo_zero_sets(combo, tt)
    cc = _three_summands(q, len(sets.plain), len(sets.even), len(sets.odd))
    logger.debug(f"{combo.name} mod {q}: plain={sets.plain} even={sets.even} odd={sets.odd}")
    return DensityReport(mod, params, combo.name, cc.total, case_contributions=cc)


def motzkin_lower_bound(params: SeqParams, p: int) -> Fraction | None:
    if (params.a, params.b) == (1, 1) and p > 2:
        return Fraction(2, p * (p - 1))
    return None


def density_zero_motzkin(params: SeqParams, p) -> DensityReport:
    mod = modulus(p)
    q = mod.p
    sid = SequenceId.MOTZKIN.value
    if q == 2:
        a, b = params.a % 2, params.b % 2
        if b == 0:
            return DensityReport(mod, params, sid, Fraction(1), degenerate=Degeneracy.T_ZERO_FOUND,
                                 method="p2_case_table")
        d0 = Fraction(1, 3) if a else Fraction(0)
        return DensityReport(mod, params, sid, d0, degenerate=Degeneracy.P_EQUALS_2, method="p2_case_table")
    tt = t_table(params, mod)
    flag = _degeneracy(tt)
    if flag:
        return _degenerate_report(mod, params, sid, flag, motzkin_lower_bound(params, q))
    if params.a % q == 0:
        # M_n = b^n and p does not divide b = T_1
        logger.warning(f"p={q} divides a: M_n = b^n never vanishes")
        return DensityReport(mod, params, sid, Fraction(0), degenerate=Degeneracy.P_DIVIDES_A,
                             method="powers_of_b")
    _require_reflection(tt)
    sets = motzkin_zero_sets(params, mod)
    # n0 = p-2 and n0 = p-1 vanish on the same two sets, hence the factors of 2
    cc = _three_summands(q, len(sets.plain), 2 * len(sets.reflected), 2 * len(sets.ratio))
    report = DensityReport(mod, params, sid, cc.total, case_contributions=cc,
                           lower_bound=motzkin_lower_bound(params, q))
    if report.lower_bound is not None and report.d0 < report.lower_bound:
        raise TheoremViolationError(f"D0 = {report.d0} is below 2/(p(p-1)) at p = {q}", report)
    return report


def density_zero_named(sequence_id, p) -> DensityReport:
    sid = SequenceId.parse(sequence_id) if isinstance(sequence_id, str) else sequence_id
    mod = modulus(p)
    q = mod.p
    if q == 2:
        raise OutOfScopeError(
            f"{sid.value} densities use the T reflection, which needs p > 2",
            suggestion=f"count --seq {sid.value} --p 2 --digits N (enumeration)",
        )
    params = SeqParams(1, 1)
    combo = named_combo(sid)
    generic = density_zero_generic(combo, params, mod)
    if generic.degenerate:
        return replace(generic, sequence_id=sid.value, lower_bound=Fraction(1, q - 1))
    reflected, ratio = named_zero_sets(sid, mod)
    closed = Fraction(len(reflected) + q * len(ratio), (q - 1) * (q + 1))
    if closed != generic.d0:
        raise TheoremViolationError(
            f"{sid.value} mod {q}: two-set formula gives {closed}, shift-combination gives {generic.d0}", generic
        )
    report = DensityReport(mod, params, sid.value, generic.d0, case_contributions=generic.case_contributions,
                           lower_bound=Fraction(1, q - 1))
    if report.d0 < report.lower_bound:
        raise TheoremViolationError(f"{sid.value}: D0 = {report.d0} is below 1/(p-1) at p = {q}", report)
    return report


# -----------------------------------------------------------------------------
# Counting zeros among the first p^N terms
# -----------------------------------------------------------------------------
def count_zeros_exact(combo: ShiftCombo, params: SeqParams, p, N: int,
                      ttable: TTable | None = None, allow_degenerate: bool = False) -> int:
    """|{n < p^N : b_n = 0 mod p}| without enumerating.

    Counts the nonzero terms shape by shape and subtracts: a word q m (p-1)^k n0
    is nonzero iff T_q is nonzero and the bracket for (n0, m, k) is nonzero.
    With no zero in T_0..T_{p-1} every prefix q counts, which is the regular
    case; allow_degenerate extends the count to tables with zeros.
    """
    mod = modulus(p)
    q = mod.p
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    tt = ttable or t_table(params, mod)
    if tt.has_zero and not allow_degenerate:
        raise DegenerateInputError(
            f"T_{tt.zero_indices[0]} = 0 mod {q}: closed-form counting needs a zero-free table; "
            f"use count_zeros_enum (or allow_degenerate=True)"
        )
    alphas = combo.residues(q)
    combo.scale_mod(q)
    t, h = tt.values, combo.h
    if N == 0:
        return int(sum(al * t[i] for i, al in enumerate(alphas)) % q == 0)

    free = q - len(tt.zero_indices)  # digits d with T_d nonzero
    plain_nonzero = sum(1 for n in range(q - h) if sum(al * t[n + i] for i, al in enumerate(alphas)) % q)
    nonzero = plain_nonzero * free ** (N - 1)
    for n0 in range(q - h, q):
        head, tail = _tail_sums(alphas, t, q, n0)
        for k in range(N):
            run = pow(t[q - 1], k, q)
            if k < N - 1:
                hits = sum(1 for m in range(q - 1) if (t[m] * run * head + t[m + 1] * tail) % q)
                nonzero += hits * free ** (N - 2 - k)
            elif (t[0] * run * head + t[1] * tail) % q:
                nonzero += 1  # all-(p-1) word, m = 0 by padding
    return q ** N - nonzero


def _zero_count_range(evaluator: SequenceEvaluator, start: int, stop: int) -> int:
    return sum(1 for n in range(start, stop) if evaluator(n) == 0)


def _histogram_range(evaluator: SequenceEvaluator, start: int, stop: int) -> Counter:
    return Counter(evaluator(n) for n in range(start, stop))


def _chunks(total: int, jobs: int) -> list[tuple[int, int]]:
    step = max(1, math.ceil(total / max(1, jobs * 4)))
    return [(s, min(s + step, total)) for s in range(0, total, step)]


def _enumerate(func, evaluator: SequenceEvaluator, total: int, jobs: int):
    ranges = _chunks(total, jobs)
    with TaskQueue(max_workers=jobs) as pool:
        return list(pool.map_ordered(func, [(evaluator, s, e) for s, e in ranges]))


def _check_budget(p: int, N: int, budget: int | None):
    required = p ** N
    if budget is not None and required > budget:
        raise BudgetExceededError(required=required, budget=budget)
    return required


def count_zeros_enum(combo: ShiftCombo, params: SeqParams, p, N: int,
                     budget: int | None = DEFAULT_BUDGET, jobs: int = 1,
                     ttable: TTable | None = None) -> int:
    mod = modulus(p)
    total = _check_budget(mod.p, N, budget)
    tt = ttable or t_table(params, mod)
    evaluator = combo_evaluator(combo, tt)
    return sum(_enumerate(_zero_count_range, evaluator, total, jobs))


def empirical_value_counts(params: SeqParams, p, N: int, budget: int | None = DEFAULT_BUDGET,
                           jobs: int = 1) -> Counter:
    """Histogram of M_n mod p over n < p^N."""
    mod = modulus(p)
    total = _check_budget(mod.p, N, budget)
    tt = t_table(params, mod)
    evaluator = motzkin_evaluator(tt, m_table(params, mod, tt))
    counts = Counter()
    for part in _enumerate(_histogram_range, evaluator, total, jobs):
        counts.update(part)
    return counts


# -----------------------------------------------------------------------------
# Nonzero residues
# -----------------------------------------------------------------------------
def subgroup_order(values, p: int) -> int:
    """Order of the subgroup of F_p^x generated by the nonzero values."""
    gens = {v % p for v in values} - {0}
    order = 1
    for r, e in factorint(p - 1).items():
        cofactor = (p - 1) // r ** e
        best = 0
        for v in gens:
            w, j = pow(v, cofactor, p), 0
            while w != 1:
                w, j = pow(w, r, p), j + 1
            best = max(best, j)
            if best == e:
                break
        order *= r ** best
    return order


def generates_multiplicative_group(values, p: int) -> bool:
    """True iff the values escape every maximal subgroup of F_p^x."""
    gens = {v % p for v in values} - {0}
    if not gens:
        return p == 2
    return all(any(pow(v, (p - 1) // r, p) != 1 for v in gens) for r in factorint(p - 1))


def generation_status(ttable: TTable) -> GenerationStatus:
    if ttable.has_zero:
        return GenerationStatus.DEGENERATE_ZERO
    if generates_multiplicative_group(ttable.values[:ttable.p], ttable.p):
        return GenerationStatus.GENERATES
    return GenerationStatus.FAILS_TO_GENERATE


def transition_degrees(ttable: TTable) -> tuple[np.ndarray, np.ndarray]:
    """Out- and in-degrees of the states 1..p-1 under i -> i*T_k (one edge per digit k)."""
    p = ttable.p
    states = np.arange(1, p, dtype=np.int64)
    multipliers, counts = np.unique(np.array(ttable.values[:p], dtype=np.int64), return_counts=True)
    out_degree = np.zeros(p - 1, dtype=np.int64)
    in_degree = np.zeros(p, dtype=np.int64)
    # one O(p) pass per distinct T_k, weighted by how many digits share it
    for multiplier, count in zip(multipliers, counts):
        targets = states * multiplier % p
        out_degree += count * (targets != 0)
        in_degree += count * np.bincount(targets, minlength=p)
    return out_degree, in_degree[1:]


def value_densities(params: SeqParams, p) -> DensityReport:
    mod = modulus(p)
    q = mod.p
    tt = t_table(params, mod)
    base = density_zero_motzkin(params, mod)
    values = tt.values[:q]
    order = subgroup_order(values, q)
    generates = generates_multiplicative_group(values, q)
    if generates != (order == q - 1):
        raise TheoremViolationError(f"subgroup tests disagree mod {q}: order {order}, generates={generates}")
    notes = []
    if not tt.has_zero:
        out_degree, in_degree = transition_degrees(tt)
        if not (np.all(out_degree == q) and np.all(in_degree == q)):
            raise TheoremViolationError(f"value transition graph mod {q} is not {q}-regular")
        notes.append(f"transition graph is {q}-regular")
    status = GenerationStatus.GENERATES if generates else GenerationStatus.FAILS_TO_GENERATE
    nonzero = (1 - base.d0) / (q - 1) if generates else None
    if not generates:
        logger.info(f"T values mod {q} ({params}) generate a subgroup of order {order} only")
    return DensityReport(
        mod, params, base.sequence_id, base.d0,
        case_contributions=base.case_contributions, degenerate=base.degenerate,
        lower_bound=base.lower_bound, nonzero_density=nonzero, generation=status, table_status=generation_status(tt),
        subgroup_order=order, method=base.method, notes=tuple(notes),
    )


def density_for_sequence(sequence_id, params: SeqParams, p, alphas=None,
                         enum_digits: int = P2_ENUM_DIGITS) -> DensityReport:
    """Dispatch a density request by sequence id (used by the CLI)."""
    sid = SequenceId.parse(sequence_id) if isinstance(sequence_id, str) else sequence_id
    if sid == SequenceId.MOTZKIN:
        return density_zero_motzkin(params, p)
    if sid in (SequenceId.A005717, SequenceId.A005043, SequenceId.A005773):
        return density_zero_named(sid, p)
    return density_zero_generic(combo_for(sid, params, alphas), params, p, enum_digits=enum_digits)
