"""
digit_eval.py - evaluate T_n, M_n and shift-combinations mod p at any n

Everything here reads n through its base-p digits. T is a digit product. A
shift-combination b_n = sum(alpha_i T_{n+i}) factors through the canonical tail
form (n)_p = q m (p-1)^k n0: when the last digit is small enough no carry
happens (Plain) and otherwise the carry ripples through the run of (p-1) digits
and stops at m (Tail).

Hot loops use the private integer helpers; the public functions wrap their
results in Residue.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from core_arith import DigitWord, Residue, modulus, to_digits
from errors import DegenerateInputError, HypothesisError, NonInvertibleError, UnsupportedWidthError
from sequence_tables import MTable, ShiftCombo, TTable, motzkin_combo
from trinomial_oracle import MOTZKIN_WEIGHT, LaurentPoly, SeqParams

logger = logging.getLogger(__name__)


class TailCase(Enum):
    PLAIN = "plain"
    TAIL = "tail"


@dataclass(frozen=True)
class CanonicalForm:
    q: DigitWord
    m: int | None
    k: int | None
    n0: int
    tail_case: TailCase

    def reassemble(self) -> DigitWord:
        mod = self.q.modulus
        if self.tail_case is TailCase.PLAIN:
            return DigitWord(self.q.digits + (self.n0,), mod)
        run = (mod.p - 1,) * self.k
        return DigitWord(self.q.digits + (self.m,) + run + (self.n0,), mod)


def _check_width(h: int, p: int):
    if not 0 <= h < p:
        raise UnsupportedWidthError(f"shift width h={h} needs 0 <= h < p = {p}")


def parse_tail(n: int, p, h: int) -> CanonicalForm:
    mod = modulus(p)
    _check_width(h, mod.p)
    digits = to_digits(n, mod).digits
    n0, rest = digits[-1], digits[:-1]
    if n0 < mod.p - h:
        return CanonicalForm(DigitWord(rest, mod), None, None, n0, TailCase.PLAIN)
    k = 0
    while k < len(rest) and rest[len(rest) - 1 - k] == mod.p - 1:
        k += 1
    idx = len(rest) - k
    if idx == 0:
        # all-(p-1) word: the digit before the run is a padded 0
        return CanonicalForm(DigitWord((), mod), 0, k, n0, TailCase.TAIL)
    return CanonicalForm(DigitWord(rest[:idx - 1], mod), rest[idx - 1], k, n0, TailCase.TAIL)


# -----------------------------------------------------------------------------
# Integer kernels
# -----------------------------------------------------------------------------
def _t_int(n: int, t: tuple[int, ...], p: int) -> int:
    r = 1
    while n and r:
        n, d = divmod(n, p)
        r = r * t[d] % p
    return r


def _split_tail(n: int, p: int) -> tuple[int, int, int]:
    """For n = (q m (p-1)^k n0)_p with n0 already removed, return (q, m, k)."""
    k = 0
    while n % p == p - 1:
        n //= p
        k += 1
    return n // p, n % p, k


def _combo_int(n: int, alphas: tuple[int, ...], t: tuple[int, ...], p: int) -> int:
    """sum(alpha_i T_{n+i}) mod p; t must hold T_0..T_{p-1} at least."""
    h = len(alphas) - 1
    rest, n0 = divmod(n, p)
    if n0 < p - h:
        inner = sum(al * t[n0 + i] for i, al in enumerate(alphas))
        return _t_int(rest, t, p) * inner % p
    q, m, k = _split_tail(rest, p)
    tq = _t_int(q, t, p)
    if not tq:
        return 0
    head = sum(alphas[i] * t[n0 + i] for i in range(p - n0))
    tail = sum(alphas[i] * t[i - (p - n0)] for i in range(p - n0, h + 1))
    return tq * (t[m] * pow(t[p - 1], k, p) * head + t[m + 1] * tail) % p


def _m_int(n: int, t: tuple[int, ...], mvals: tuple[int, ...], p: int,
           b: int, disc: int, inv2a2: int) -> int:
    rest, n0 = divmod(n, p)
    if n0 < p - 2:
        return _t_int(rest, t, p) * mvals[n0] % p
    q, m, k = _split_tail(rest, p)
    tq = _t_int(q, t, p)
    if n0 == p - 2:
        return inv2a2 * tq * (b * t[m] * pow(t[p - 1], k + 1, p) - t[m + 1]) % p
    ell = p - 2 - m
    lead = pow(disc, m + 1 - (p - 1) // 2, p)
    return inv2a2 * lead * tq * (b * t[ell] - pow(t[p - 1], k + 1, p) * t[ell + 1]) % p


# -----------------------------------------------------------------------------
# Public evaluators
# -----------------------------------------------------------------------------
def _check_index(n: int):
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")


def t_eval(n: int, ttable: TTable) -> Residue:
    _check_index(n)
    return Residue(_t_int(n, ttable.values, ttable.p), ttable.modulus)


def m_eval_hypotheses(ttable: TTable) -> None:
    """Raise HypothesisError naming the first closed-form hypothesis that fails."""
    p, params = ttable.p, ttable.params
    if p <= 2:
        raise HypothesisError("p > 2", f"p = {p}")
    if params.a % p == 0:
        raise HypothesisError("p does not divide a", f"a = {params.a}, p = {p}")
    if params.discriminant % p == 0:
        raise HypothesisError("p does not divide b^2 - 4a^2", f"b^2 - 4a^2 = {params.discriminant}")
    if ttable.has_zero:
        j = ttable.zero_indices[0]
        raise HypothesisError("p divides no T_j for j < p", f"T_{j} = 0 mod {p}")


def m_eval(n: int, ttable: TTable, mtable: MTable) -> Residue:
    _check_index(n)
    m_eval_hypotheses(ttable)
    p, params = ttable.p, ttable.params
    inv2a2 = pow(2 * params.a * params.a, -1, p)
    value = _m_int(n, ttable.values, mtable.values, p, params.b % p, params.discriminant % p, inv2a2)
    return Residue(value, ttable.modulus)


def combo_eval(combo: ShiftCombo, n: int, ttable: TTable) -> Residue:
    _check_index(n)
    p = ttable.p
    alphas = combo.residues(p)
    value = combo.scale_mod(p) * _combo_int(n, alphas, ttable.values, p) % p
    return Residue(value, ttable.modulus)


# -----------------------------------------------------------------------------
# Carry recursion: ct(P^n W) mod p from the digits of n alone
# -----------------------------------------------------------------------------
@lru_cache(maxsize=256)
def _small_powers(a: int, b: int, p: int) -> tuple[dict[int, int], ...]:
    """Coefficients of P^d mod p for d < p, as exponent -> coefficient maps."""
    powers = [{0: 1}]
    for _ in range(1, p):
        prev = powers[-1]
        nxt: dict[int, int] = defaultdict(int)
        for e, c in prev.items():
            nxt[e - 1] += a * c
            nxt[e] += b * c
            nxt[e + 1] += a * c
        powers.append({e: c % p for e, c in nxt.items() if c % p})
    return tuple(powers)


def _coeff_int(n: int, target: int, powers, p: int) -> int:
    # P^n = prod P(x^{p^i})^{d_i}; peel digits from the least significant end,
    # carrying the part of the target exponent not yet produced
    states = {target: 1}
    while n and states:
        n, d = divmod(n, p)
        row = powers[d]
        nxt: dict[int, int] = defaultdict(int)
        for t, c in states.items():
            r = t % p
            for e in (r, r - p):
                ce = row.get(e)
                if ce:
                    nxt[(t - e) // p] += c * ce
        states = {t: c % p for t, c in nxt.items() if c % p}
    return states.get(0, 0) % p


def ct_eval(n: int, weight: LaurentPoly, params: SeqParams, p) -> Residue:
    """ct(P^n W) mod p for any n, valid for every prime including 2 and degenerate (a, b)."""
    _check_index(n)
    mod = modulus(p)
    q = mod.p
    powers = _small_powers(params.a % q, params.b % q, q)
    total = sum(c * _coeff_int(n, -e, powers, q) for e, c in weight.terms)
    return Residue(total % q, mod)


class EvalMethod(Enum):
    DIGIT_PRODUCT = "digit_product"
    CLOSED_FORM = "closed_form"
    POWERS_OF_B = "powers_of_b"
    SHIFT_COMBO = "shift_combo"
    CARRY = "carry"


@dataclass(frozen=True)
class SequenceEvaluator:
    """Picklable n -> value mod p for one sequence and one method (worker processes get a copy)."""

    method: EvalMethod
    p: int
    t: tuple[int, ...] = ()
    mvals: tuple[int, ...] = ()
    alphas: tuple[int, ...] = ()
    scale: int = 1
    b: int = 0
    disc: int = 0
    inv2a2: int = 0
    powers: tuple = ()
    weight_terms: tuple[tuple[int, int], ...] = ()

    def __call__(self, n: int) -> int:
        _check_index(n)
        p = self.p
        match self.method:
            case EvalMethod.DIGIT_PRODUCT:
                return _t_int(n, self.t, p)
            case EvalMethod.CLOSED_FORM:
                return _m_int(n, self.t, self.mvals, p, self.b, self.disc, self.inv2a2)
            case EvalMethod.POWERS_OF_B:
                return pow(self.b, n, p)
            case EvalMethod.SHIFT_COMBO:
                return self.scale * _combo_int(n, self.alphas, self.t, p) % p
            case EvalMethod.CARRY:
                return sum(c * _coeff_int(n, -e, self.powers, p) for e, c in self.weight_terms) % p
        raise ValueError(f"unknown evaluation method {self.method}")


def _carry_evaluator(weight: LaurentPoly, params: SeqParams, p: int) -> SequenceEvaluator:
    powers = _small_powers(params.a % p, params.b % p, p)
    return SequenceEvaluator(EvalMethod.CARRY, p, powers=powers, weight_terms=weight.terms)


def motzkin_method(ttable: TTable) -> EvalMethod:
    p, params = ttable.p, ttable.params
    try:
        m_eval_hypotheses(ttable)
        return EvalMethod.CLOSED_FORM
    except HypothesisError as e:
        logger.debug(f"closed-form M unavailable mod {p}: {e}")
    if params.a % p == 0:
        return EvalMethod.POWERS_OF_B
    if p != 2:
        return EvalMethod.SHIFT_COMBO
    return EvalMethod.CARRY


def motzkin_evaluator(ttable: TTable, mtable: MTable) -> SequenceEvaluator:
    """M_n mod p by the best method the parameters allow."""
    p, params = ttable.p, ttable.params
    method = motzkin_method(ttable)
    if method is EvalMethod.CLOSED_FORM:
        return SequenceEvaluator(
            method, p, t=ttable.values, mvals=mtable.values, b=params.b % p,
            disc=params.discriminant % p, inv2a2=pow(2 * params.a * params.a, -1, p),
        )
    if method is EvalMethod.POWERS_OF_B:
        return SequenceEvaluator(method, p, b=params.b % p)
    if method is EvalMethod.SHIFT_COMBO:
        combo = motzkin_combo(params)
        return SequenceEvaluator(method, p, t=ttable.values, alphas=combo.residues(p), scale=combo.scale_mod(p))
    return _carry_evaluator(MOTZKIN_WEIGHT, params, p)


def combo_evaluator(combo: ShiftCombo, ttable: TTable) -> SequenceEvaluator:
    """b_n mod p; falls back to the carry recursion when the combination is too wide
    for p or its scale is not a unit mod p."""
    p = ttable.p
    try:
        alphas = combo.residues(p)
        scale = combo.scale_mod(p)
    except (UnsupportedWidthError, DegenerateInputError, NonInvertibleError) as e:
        if combo.weight is None:
            raise
        logger.warning(f"{combo.name}: {e}, using the carry recursion mod {p}")
        return _carry_evaluator(combo.weight, ttable.params, p)
    return SequenceEvaluator(EvalMethod.SHIFT_COMBO, p, t=ttable.values, alphas=alphas, scale=scale)


def motzkin_value(n: int, ttable: TTable, mtable: MTable) -> tuple[Residue, EvalMethod]:
    f = motzkin_evaluator(ttable, mtable)
    return Residue(f(n), ttable.modulus), f.method
