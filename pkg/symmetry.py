"""
symmetry.py - exhaustive checks of the reflection congruences for T and M

    T_{p-1-k} = (b^2-4a^2)^{(p-1)/2 - k} T_k     (p > 2)
    M_{p-3-k} = (b^2-4a^2)^{(p-3)/2 - k} M_k     (p > 3)

Reports keep every violation so a failure points straight at the index.
"""

import logging
from dataclasses import dataclass, field

from core_arith import Modulus, Residue, modulus
from errors import OutOfScopeError
from sequence_tables import m_table, t_table
from trinomial_oracle import SeqParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SymmetryReport:
    modulus: Modulus
    params: SeqParams
    theorem: str
    checked_range: range
    violations: tuple[tuple[int, int, int], ...] = field(default_factory=tuple)

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "p": self.modulus.p,
            "a": self.params.a,
            "b": self.params.b,
            "checked": [self.checked_range.start, self.checked_range.stop - 1],
            "violations": [list(v) for v in self.violations],
            "holds": self.holds,
        }


def _report(mod, params, theorem, ks, pairs) -> SymmetryReport:
    violations = tuple((k, lhs, rhs) for k, (lhs, rhs) in zip(ks, pairs) if lhs != rhs)
    report = SymmetryReport(mod, params, theorem, ks, violations)
    if violations:
        logger.error(f"{theorem} fails mod {mod.p} for {params}: first violation {violations[0]}")
    return report


def check_t_symmetry(params: SeqParams, p) -> SymmetryReport:
    mod = modulus(p)
    q = mod.p
    if q == 2:
        raise OutOfScopeError("T reflection needs p > 2")
    t, d = t_table(params, mod).values, params.discriminant % q
    half = (q - 1) // 2
    ks = range(0, half + 1)
    pairs = ((t[q - 1 - k], pow(d, half - k, q) * t[k] % q) for k in ks)
    return _report(mod, params, "t_symmetry", ks, pairs)


def check_t_symmetry_inverted(params: SeqParams, p) -> SymmetryReport:
    """T_k = (b^2-4a^2)^{k-(p-1)/2} T_{p-1-k} for every k < p, needs p not dividing b^2-4a^2."""
    mod = modulus(p)
    q = mod.p
    d = params.discriminant % q
    if q == 2 or d == 0:
        raise OutOfScopeError(f"inverted T reflection needs p > 2 and p not dividing b^2-4a^2 (p={q})")
    t, half = t_table(params, mod).values, (q - 1) // 2
    ks = range(0, q)
    pairs = ((t[k], pow(d, k - half, q) * t[q - 1 - k] % q) for k in ks)
    return _report(mod, params, "t_symmetry_inverted", ks, pairs)


def check_m_symmetry(params: SeqParams, p) -> SymmetryReport:
    mod = modulus(p)
    q = mod.p
    if q <= 3:
        raise OutOfScopeError("M reflection needs p > 3")
    m, d = m_table(params, mod).values, params.discriminant % q
    half = (q - 3) // 2
    ks = range(0, half + 1)
    pairs = ((m[q - 3 - k], pow(d, half - k, q) * m[k] % q) for k in ks)
    return _report(mod, params, "m_symmetry", ks, pairs)


def t_pm1_square_check(params: SeqParams, p) -> bool:
    mod = modulus(p)
    if mod.p == 2 or params.discriminant % mod.p == 0:
        raise OutOfScopeError(f"(T_(p-1))^2 = 1 needs p > 2 and p not dividing b^2-4a^2 (p={mod.p})")
    return t_table(params, mod).t_pm1 ** 2 % mod.p == 1


def euler_minus_three(p) -> Residue:
    """(-3)^((p-1)/2) mod p."""
    mod = modulus(p)
    if mod.p == 2:
        raise OutOfScopeError("(-3)^((p-1)/2) needs an odd prime")
    return Residue(pow(-3, (mod.p - 1) // 2, mod.p), mod)


def motzkin_pm2_criterion(p) -> tuple[bool, bool]:
    """(p divides M_{p-2}, p = 1 mod 3) for the ordinary Motzkin numbers."""
    mod = modulus(p)
    q = mod.p
    if q == 2:
        return False, False  # M_0 = 1
    divides = m_table(SeqParams(1, 1), mod)[q - 2] == 0
    return divides, q % 3 == 1


def pm2_identity_check(p) -> bool:
    """2 M_{p-2} = (-3)^((p-1)/2) - 1 mod p."""
    mod = modulus(p)
    lhs = 2 * m_table(SeqParams(1, 1), mod)[mod.p - 2] % mod.p
    return lhs == (euler_minus_three(mod).value - 1) % mod.p
