"""
core_arith.py - prime-field arithmetic, base-p digit words and exact ratios

Residues and digit words are immutable. Digit words are stored most-significant
digit first, the same direction they are written in.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import isprime

from errors import MalformedWordError, NonInvertibleError, NotPrimeError

logger = logging.getLogger(__name__)

# Densities are carried as Fractions end to end (always normalized, positive
# denominator); floats only appear when the CLI renders them.
ExactRatio = Fraction


@dataclass(frozen=True, slots=True)
class Modulus:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or isinstance(self.p, bool):
            raise NotPrimeError(f"modulus must be an integer, got {self.p!r}")
        if self.p < 2 or not isprime(self.p):
            raise NotPrimeError(f"{self.p} is not prime")

    def __int__(self) -> int:
        return self.p

    def __str__(self) -> str:
        return str(self.p)

    def residue(self, value: int) -> "Residue":
        return Residue(value % self.p, self)


@lru_cache(maxsize=4096)
def modulus(p) -> Modulus:
    """Return the (cached) Modulus for p; accepts an int or a Modulus."""
    if isinstance(p, Modulus):
        return p
    return Modulus(p)


@dataclass(frozen=True, slots=True, eq=False)
class Residue:
    value: int
    modulus: Modulus

    def __post_init__(self):
        if not 0 <= self.value < self.modulus.p:
            object.__setattr__(self, "value", self.value % self.modulus.p)

    @property
    def p(self) -> int:
        return self.modulus.p

    def _coerce(self, other) -> int:
        if isinstance(other, Residue):
            if other.modulus.p != self.modulus.p:
                raise ValueError(f"mixing residues mod {self.p} and mod {other.p}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return Residue((self.value + v) % self.p, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return Residue((self.value - v) % self.p, self.modulus)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return Residue((v - self.value) % self.p, self.modulus)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return Residue((self.value * v) % self.p, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue((-self.value) % self.p, self.modulus)

    def __pow__(self, e: int):
        return mod_pow(self, e)

    def __eq__(self, other):
        if isinstance(other, Residue):
            return self.modulus.p == other.modulus.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __repr__(self):
        return f"Residue({self.value} mod {self.p})"


@dataclass(frozen=True, slots=True, eq=False)
class DigitWord:
    """Base-p digit string, most-significant first. Leading zeros are insignificant."""

    digits: tuple[int, ...]
    modulus: Modulus

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(self.digits))
        p = self.modulus.p
        for i, d in enumerate(self.digits):
            if not isinstance(d, int) or not 0 <= d < p:
                raise MalformedWordError(f"digit {d!r} at position {i} is not in [0, {p})")

    def stripped(self) -> tuple[int, ...]:
        i = 0
        while i < len(self.digits) and self.digits[i] == 0:
            i += 1
        return self.digits[i:]

    def __len__(self):
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __add__(self, other: "DigitWord") -> "DigitWord":
        if not isinstance(other, DigitWord):
            return NotImplemented
        if other.modulus.p != self.modulus.p:
            raise MalformedWordError("cannot concatenate words over different bases")
        return DigitWord(self.digits + other.digits, self.modulus)

    def __eq__(self, other):
        if not isinstance(other, DigitWord):
            return NotImplemented
        return self.modulus.p == other.modulus.p and self.stripped() == other.stripped()

    def __hash__(self):
        return hash((self.modulus.p, self.stripped()))

    def __repr__(self):
        return f"DigitWord({list(self.digits)} base {self.modulus.p})"


def to_digits(n: int, p) -> DigitWord:
    if n < 0:
        raise ValueError(f"index must be non-negative, got {n}")
    mod = modulus(p)
    if n == 0:
        return DigitWord((0,), mod)
    out = []
    while n:
        n, d = divmod(n, mod.p)
        out.append(d)
    out.reverse()
    return DigitWord(tuple(out), mod)


def from_digits(w: DigitWord) -> int:
    p = w.modulus.p
    n = 0
    for d in w.digits:
        if not 0 <= d < p:
            raise MalformedWordError(f"digit {d} is not in [0, {p})")
        n = n * p + d
    return n


def mod_inverse(r: Residue) -> Residue:
    if r.value == 0:
        raise NonInvertibleError(f"0 has no inverse mod {r.p}")
    return Residue(pow(r.value, -1, r.p), r.modulus)


def mod_pow(r: Residue, e: int) -> Residue:
    if e < 0 and r.value == 0:
        raise NonInvertibleError(f"cannot raise 0 to the negative power {e} mod {r.p}")
    return Residue(pow(r.value, e, r.p), r.modulus)


def inverse_table(p: int) -> list[int]:
    """inv[i] = i^{-1} mod p for 1 <= i < p, built in linear time (inv[0] is unused)."""
    inv = [0] * p
    inv[1] = 1
    for i in range(2, p):
        inv[i] = (-(p // i) * inv[p % i]) % p
    return inv


def format_ratio(r: Fraction) -> str:
    """num/den plus a 6-place decimal, the way densities are shown to humans."""
    return f"{r.numerator}/{r.denominator} ({float(r):.6f})"
