"""
sequence_tables.py - the finite data that determines everything mod p

T_0..T_{p-1} come from the three-term recurrence (division by n is fine for
n < p); T_p and T_{p+1} are digit products. M is derived from T through
2a^2 M_n = (4a^2 - b^2) T_n + 2b T_{n+1} - T_{n+2}, never from its own
recurrence, whose leading coefficient n+2 vanishes at n = p-2.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property

from core_arith import Modulus, Residue, inverse_table, modulus
from errors import DegenerateInputError, NonInvertibleError, TheoremViolationError, UnsupportedWidthError
from trinomial_oracle import (
    MOTZKIN_WEIGHT,
    ONE,
    ONE_PLUS_X_WEIGHT,
    RIORDAN_WEIGHT,
    X_WEIGHT,
    LaurentPoly,
    SeqParams,
    oracle_prefix_mod,
)

logger = logging.getLogger(__name__)


class SequenceId(str, Enum):
    TRINOMIAL = "trinomial"
    MOTZKIN = "motzkin"
    A005717 = "a005717"
    A005043 = "a005043"
    A005773 = "a005773"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, text: str) -> "SequenceId":
        try:
            return cls(text.strip().lower())
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown sequence {text!r}; choose from {choices}") from None


NAMED_SEQUENCES = (SequenceId.A005717, SequenceId.A005043, SequenceId.A005773)


# -----------------------------------------------------------------------------
# T table
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class TTable:
    params: SeqParams
    modulus: Modulus
    values: tuple[int, ...]  # T_0 .. T_{p+1} mod p

    @property
    def p(self) -> int:
        return self.modulus.p

    def __getitem__(self, j: int) -> int:
        return self.values[j]

    def residue(self, j: int) -> Residue:
        return Residue(self.values[j], self.modulus)

    @cached_property
    def zero_indices(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.p) if self.values[j] == 0)

    @property
    def has_zero(self) -> bool:
        return bool(self.zero_indices)

    @property
    def t_pm1(self) -> int:
        return self.values[self.p - 1]

    def value_at(self, n: int) -> int:
        """T_n mod p for any n, as the product of T over the base-p digits of n."""
        p, vals = self.p, self.values
        r = 1
        while n and r:
            n, d = divmod(n, p)
            r = r * vals[d] % p
        return r

    def extended(self, upto: int) -> list[int]:
        return [self.values[j] if j < len(self.values) else self.value_at(j) for j in range(upto + 1)]


def t_prefix(params: SeqParams, p, upto: int) -> list[int]:
    """T_0..T_upto mod p (upto < p) by n T_n = b(2n-1) T_{n-1} - (b^2-4a^2)(n-1) T_{n-2}."""
    mod = modulus(p)
    q = mod.p
    if not 0 <= upto < q:
        raise ValueError(f"the recurrence is only valid below p={q}, asked for index {upto}")
    inv = inverse_table(q)
    b, disc = params.b % q, params.discriminant % q
    vals = [1]
    if upto >= 1:
        vals.append(b)
    for n in range(2, upto + 1):
        vals.append(inv[n] * (b * (2 * n - 1) * vals[n - 1] - disc * (n - 1) * vals[n - 2]) % q)
    return vals


def t_table(params: SeqParams, p) -> TTable:
    mod = modulus(p)
    vals = t_prefix(params, mod, mod.p - 1)
    t0, t1 = vals[0], vals[1]
    vals += [t1 * t0 % mod.p, t1 * t1 % mod.p]
    return TTable(params, mod, tuple(vals))


# -----------------------------------------------------------------------------
# M table
# -----------------------------------------------------------------------------
class MTableMethod(Enum):
    FROM_T = "from_t"
    POWERS_OF_B = "powers_of_b"
    ORACLE = "oracle"


@dataclass(frozen=True)
class MTable:
    params: SeqParams
    modulus: Modulus
    values: tuple[int, ...]  # M_0 .. M_{p-1} mod p
    method: MTableMethod

    @property
    def p(self) -> int:
        return self.modulus.p

    def __getitem__(self, j: int) -> int:
        return self.values[j]

    def residue(self, j: int) -> Residue:
        return Residue(self.values[j], self.modulus)


def m_table(params: SeqParams, p, ttable: TTable | None = None) -> MTable:
    mod = modulus(p)
    q = mod.p
    if params.a % q == 0:
        # P reduces to the constant b, so M_n = ct(b^n (1 - x^2)) = b^n
        vals = tuple(pow(params.b, n, q) for n in range(q))
        return MTable(params, mod, vals, MTableMethod.POWERS_OF_B)
    if q == 2:
        vals = tuple(oracle_prefix_mod(params, q, MOTZKIN_WEIGHT, mod))
        return MTable(params, mod, vals, MTableMethod.ORACLE)
    tt = ttable or t_table(params, mod)
    a, b = params.a, params.b
    inv = pow(2 * a * a, -1, q)
    c0 = (4 * a * a - b * b) % q
    t = tt.values
    vals = tuple(inv * (c0 * t[n] + 2 * b * t[n + 1] - t[n + 2]) % q for n in range(q))
    return MTable(params, mod, vals, MTableMethod.FROM_T)


# -----------------------------------------------------------------------------
# Shift-combinations b_n = scale * sum(alpha_i T_{n+i})
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class ShiftCombo:
    alphas: tuple[int, ...]
    scale: Fraction = Fraction(1)
    name: str = SequenceId.CUSTOM.value
    weight: LaurentPoly | None = None  # oracle weight W with b_n = ct(P^n W), when known

    def __post_init__(self):
        alphas = tuple(int(x) for x in self.alphas)
        if not alphas:
            raise ValueError("a shift-combination needs at least one coefficient")
        if alphas[-1] == 0:
            raise ValueError(f"leading coefficient of {alphas} must be nonzero")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "scale", Fraction(self.scale))

    @property
    def h(self) -> int:
        return len(self.alphas) - 1

    def residues(self, p) -> tuple[int, ...]:
        """alphas reduced mod p; the combination must fit Lucas-style reduction (h < p)."""
        q = modulus(p).p
        if self.h >= q:
            raise UnsupportedWidthError(f"{self.name} reaches {self.h} terms ahead; needs h < p = {q}")
        res = tuple(x % q for x in self.alphas)
        if res[-1] == 0:
            raise DegenerateInputError(f"leading coefficient of {self.name} vanishes mod {q}")
        return res

    def scale_mod(self, p) -> int:
        q = modulus(p).p
        if self.scale.denominator % q == 0:
            raise NonInvertibleError(f"scale {self.scale} of {self.name} is not defined mod {q}")
        return self.scale.numerator * pow(self.scale.denominator, -1, q) % q

    def exact_value(self, tseq: list[int], n: int) -> Fraction:
        """b_n over the rationals from an exact T sequence (needs tseq up to n+h)."""
        return self.scale * sum(al * tseq[n + i] for i, al in enumerate(self.alphas))


def trinomial_combo() -> ShiftCombo:
    return ShiftCombo((1,), name=SequenceId.TRINOMIAL.value, weight=ONE)


def motzkin_combo(params: SeqParams) -> ShiftCombo:
    a, b = params.a, params.b
    if a == 0:
        raise DegenerateInputError("the Motzkin combination divides by 2a^2, undefined for a = 0 (M_n = b^n)")
    return ShiftCombo(
        (4 * a * a - b * b, 2 * b, -1),
        Fraction(1, 2 * a * a),
        SequenceId.MOTZKIN.value,
        MOTZKIN_WEIGHT,
    )


# a = b = 1 only: ct(P^n x) = (T_{n+1} - T_n)/2 relies on the unit coefficients
_NAMED = {
    SequenceId.A005717: ((-1, 1), X_WEIGHT),
    SequenceId.A005043: ((3, -1), RIORDAN_WEIGHT),
    SequenceId.A005773: ((1, 1), ONE_PLUS_X_WEIGHT),
}


def named_combo(sequence_id) -> ShiftCombo:
    sid = SequenceId.parse(sequence_id) if isinstance(sequence_id, str) else sequence_id
    if sid not in _NAMED:
        raise ValueError(f"{sid.value} is not one of the named a=b=1 sequences")
    alphas, weight = _NAMED[sid]
    return ShiftCombo(alphas, Fraction(1, 2), sid.value, weight)


def combo_for(sequence_id, params: SeqParams, alphas: tuple[int, ...] | None = None) -> ShiftCombo:
    """Resolve a sequence id (plus custom alphas) to its shift-combination."""
    sid = SequenceId.parse(sequence_id) if isinstance(sequence_id, str) else sequence_id
    if sid == SequenceId.TRINOMIAL:
        return trinomial_combo()
    if sid == SequenceId.MOTZKIN:
        return motzkin_combo(params)
    if sid == SequenceId.CUSTOM:
        if not alphas:
            raise ValueError("a custom sequence needs --alpha")
        return ShiftCombo(tuple(alphas))
    if (params.a, params.b) != (1, 1):
        raise ValueError(f"{sid.value} is defined for a=b=1 only")
    return named_combo(sid)


def combo_table(combo: ShiftCombo, ttable: TTable) -> tuple[int, ...]:
    """b_0..b_{p-1} mod p; T beyond the table comes from digit products."""
    p = ttable.p
    alphas = combo.residues(p)
    s = combo.scale_mod(p)
    t = ttable.extended(p - 1 + combo.h)
    return tuple(
        s * sum(al * t[n + i] for i, al in enumerate(alphas)) % p for n in range(p)
    )


# -----------------------------------------------------------------------------
# Exact integer recurrences (cross-checks against the oracle)
# -----------------------------------------------------------------------------
def _exact_div(num: int, den: int, what: str) -> int:
    quo, rem = divmod(num, den)
    if rem:
        raise TheoremViolationError(f"{what}: {num} is not divisible by {den}")
    return quo


def exact_t_sequence(params: SeqParams, count: int) -> list[int]:
    b, disc = params.b, params.discriminant
    seq = [1, b][:count]
    for n in range(2, count):
        seq.append(_exact_div(b * (2 * n - 1) * seq[n - 1] - disc * (n - 1) * seq[n - 2], n, f"T_{n}"))
    return seq


def exact_m_sequence(params: SeqParams, count: int) -> list[int]:
    """(n+2) M_n = b(2n+1) M_{n-1} - (b^2-4a^2)(n-1) M_{n-2}, over the integers."""
    b, disc = params.b, params.discriminant
    seq = [1, b][:count]
    for n in range(2, count):
        seq.append(_exact_div(b * (2 * n + 1) * seq[n - 1] - disc * (n - 1) * seq[n - 2], n + 2, f"M_{n}"))
    return seq
