"""
trinomial_oracle.py - brute-force ground truth

Every sequence handled by this package is ct(P^n * W) for P = a/x + b + a*x and
a small weight W. This module computes those constant terms directly by
expanding P^n, with no congruences involved. It is slow on purpose and capped;
everything fast lives in digit_eval.
"""

import logging
from dataclasses import dataclass

import numpy as np

from core_arith import Residue, modulus
from errors import BudgetExceededError

logger = logging.getLogger(__name__)

ORACLE_CAP = 2000


@dataclass(frozen=True)
class LaurentPoly:
    """Finitely supported exponent -> integer coefficient map, zeros never stored."""

    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        merged: dict[int, int] = {}
        for e, c in self.terms:
            merged[e] = merged.get(e, 0) + c
        object.__setattr__(
            self, "terms", tuple(sorted((e, c) for e, c in merged.items() if c != 0))
        )

    @classmethod
    def from_dict(cls, coefficients: dict[int, int]) -> "LaurentPoly":
        return cls(tuple(coefficients.items()))

    @property
    def coefficients(self) -> dict[int, int]:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return max((abs(e) for e, _ in self.terms), default=0)

    def coeff(self, e: int) -> int:
        return self.coefficients.get(e, 0)

    def ct(self) -> int:
        return self.coeff(0)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        return poly_mul(self, other)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*x^{e}" for e, c in self.terms)


ONE = LaurentPoly(((0, 1),))
MOTZKIN_WEIGHT = LaurentPoly(((0, 1), (2, -1)))      # 1 - x^2
X_WEIGHT = LaurentPoly(((1, 1),))                    # x
RIORDAN_WEIGHT = LaurentPoly(((0, 1), (1, -1)))      # 1 - x
ONE_PLUS_X_WEIGHT = LaurentPoly(((0, 1), (1, 1)))    # 1 + x


@dataclass(frozen=True)
class SeqParams:
    a: int = 1
    b: int = 1

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.a

    def trinomial(self) -> LaurentPoly:
        return LaurentPoly(((-1, self.a), (0, self.b), (1, self.a)))

    def __str__(self):
        return f"a={self.a}, b={self.b}"


def poly_mul(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    out: dict[int, int] = {}
    for e1, c1 in f.terms:
        for e2, c2 in g.terms:
            out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return LaurentPoly.from_dict(out)


def _check_cap(n: int, cap: int | None):
    if cap is not None and n > cap:
        raise BudgetExceededError(required=n, budget=cap, what="oracle powers")


def _weighted_ct(coeffs, n: int, weight: LaurentPoly) -> int:
    # coeffs[i] is the coefficient of x^(i - n) in P^n; ct(P^n W) picks x^(-e) for each W term x^e
    total = 0
    for e, c in weight.terms:
        i = n - e
        if 0 <= i <= 2 * n:
            total += c * int(coeffs[i])
    return total


def oracle_prefix(params: SeqParams, count: int, weight: LaurentPoly = ONE,
                  cap: int | None = ORACLE_CAP) -> list[int]:
    """Exact ct(P^n W) for n = 0 .. count-1."""
    if count <= 0:
        return []
    _check_cap(count - 1, cap)
    a, b = params.a, params.b
    coeffs = [1]
    out = [_weighted_ct(coeffs, 0, weight)]
    for n in range(1, count):
        nxt = [0] * (len(coeffs) + 2)
        for i, c in enumerate(coeffs):
            if c:
                nxt[i] += a * c
                nxt[i + 1] += b * c
                nxt[i + 2] += a * c
        coeffs = nxt
        out.append(_weighted_ct(coeffs, n, weight))
    return out


def oracle_ct(params: SeqParams, n: int, weight: LaurentPoly = ONE,
              cap: int | None = ORACLE_CAP) -> int:
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return oracle_prefix(params, n + 1, weight, cap)[-1]


def oracle_prefix_mod(params: SeqParams, count: int, weight: LaurentPoly, p,
                      cap: int | None = ORACLE_CAP) -> list[int]:
    """ct(P^n W) mod p for n < count, expanding P^n with coefficients reduced mod p."""
    mod = modulus(p)
    if count <= 0:
        return []
    _check_cap(count - 1, cap)
    q = mod.p
    a, b = params.a % q, params.b % q
    coeffs = np.ones(1, dtype=np.int64)
    out = [_weighted_ct(coeffs, 0, weight) % q]
    for n in range(1, count):
        nxt = np.zeros(len(coeffs) + 2, dtype=np.int64)
        nxt[:-2] += a * coeffs
        nxt[1:-1] += b * coeffs
        nxt[2:] += a * coeffs
        coeffs = nxt % q
        out.append(_weighted_ct(coeffs, n, weight) % q)
    logger.debug(f"oracle mod {q}: {count} terms for {params}, weight {weight}")
    return out


def oracle_seq_mod(params: SeqParams, n: int, weight: LaurentPoly, p,
                   cap: int | None = ORACLE_CAP) -> Residue:
    mod = modulus(p)
    return Residue(oracle_prefix_mod(params, n + 1, weight, mod, cap)[-1], mod)
