"""Exact arithmetic in Q(w), w a primitive e-th root of unity.

Elements are coefficient tuples in the power basis 1, w, ..., w^(phi(e)-1),
reduced modulo the e-th cyclotomic polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        q, r = divmod(num[i + len(den) - 1], den[-1])
        assert r == 0
        out[i] = q
        for j, d in enumerate(den):
            num[i + j] -= q * d
    assert not any(num[: len(den) - 1])
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(e: int) -> tuple[int, ...]:
    """Coefficients of Phi_e, lowest degree first."""
    if e < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (e - 1) + [1]
    for d in range(1, e):
        if e % d == 0:
            poly = _polydiv_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


class CyclotomicField:
    def __init__(self, e: int):
        self.e = e
        self.phi = cyclotomic_polynomial(e)
        self.degree = len(self.phi) - 1
        self.zero = tuple(Fraction(0) for _ in range(self.degree))
        self.one = self.from_rational(1)
        self._powers = [self._reduce([0] * k + [1]) for k in range(e)]

    def _reduce(self, coeffs) -> tuple[Fraction, ...]:
        c = [Fraction(x) for x in coeffs]
        d = self.degree
        lead = self.phi[-1]
        for i in range(len(c) - 1, d - 1, -1):
            q = c[i] / lead
            if q:
                for j, p in enumerate(self.phi):
                    c[i - d + j] -= q * p
        c = c[:d] + [Fraction(0)] * max(0, d - len(c))
        return tuple(c)

    def from_rational(self, x) -> tuple[Fraction, ...]:
        return (Fraction(x),) + (Fraction(0),) * (self.degree - 1)

    def root_power(self, k: int) -> tuple[Fraction, ...]:
        return self._powers[k % self.e]

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def mul(self, a, b):
        if not any(a) or not any(b):
            return self.zero
        prod = [Fraction(0)] * (2 * self.degree - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return self._reduce(prod)

    def scale(self, a, k):
        k = Fraction(k)
        return tuple(k * x for x in a)

    def is_rational(self, a) -> bool:
        return not any(a[1:])

    def rational(self, a) -> Fraction:
        if not self.is_rational(a):
            raise ValueError(f"{a} is not rational")
        return a[0]
