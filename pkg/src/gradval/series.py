"""Truncated power series in one variable with exact precision tracking.

A series with truncation N knows its coefficients of degree 0..N exactly;
everything above N is unknown.  Arithmetic keeps only what the inputs
determine, so an order reported by :func:`series_order` is never an
artifact of truncation.
"""

from __future__ import annotations

import os
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

DEFAULT_SEED = 7
SEED_ENV = "GRADVAL_SEED"


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw not in (None, "") else DEFAULT_SEED


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class BeyondTruncation:
    """Every known coefficient vanishes: the order is at least ``bound``."""

    bound: int

    def __str__(self):
        return f"BeyondTruncation(order >= {self.bound})"


@dataclass(frozen=True)
class TruncatedSeries:
    coeffs: tuple[Fraction, ...]
    var: str = "x"

    def __post_init__(self):
        if not self.coeffs:
            raise SeriesError("a series needs at least its constant term")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, truncation: int, var: str = "x") -> "TruncatedSeries":
        """Polynomial (or series prefix) known through degree ``truncation``."""
        c = [Fraction(x) for x in coeffs[: truncation + 1]]
        return cls(tuple(c + [Fraction(0)] * (truncation + 1 - len(c))), var)

    @classmethod
    def constant(cls, c, truncation: int, var: str = "x") -> "TruncatedSeries":
        return cls.from_coeffs([c], truncation, var)

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def order(self) -> int | BeyondTruncation:
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return BeyondTruncation(len(self.coeffs))

    def _low(self) -> int:
        """Certain lower bound on the order."""
        o = self.order()
        return o.bound if isinstance(o, BeyondTruncation) else o

    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries.constant(other, self.truncation, self.var)
        if other.var != self.var:
            raise SeriesError(f"series in {self.var} and {other.var} cannot be combined")
        return other

    def __add__(self, other):
        other = self._check(other)
        n = min(self.truncation, other.truncation)
        return TruncatedSeries(tuple(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs)), self.var)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(tuple(-c for c in self.coeffs), self.var)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            k = Fraction(other)
            return TruncatedSeries(tuple(k * c for c in self.coeffs), self.var)
        other = self._check(other)
        n = min(self.truncation + other._low(), other.truncation + self._low())
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a:
                for j, b in enumerate(other.coeffs[: n + 1 - i]):
                    if b:
                        out[i + j] += a * b
        return TruncatedSeries(tuple(out), self.var)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise SeriesError("negative powers are not supported")
        result = TruncatedSeries.constant(1, self.truncation + k * self._low(), self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift_down(self, k: int) -> "TruncatedSeries":
        """Divide by var^k; the first k coefficients must vanish."""
        if any(self.coeffs[:k]):
            raise SeriesError(f"series is not divisible by {self.var}^{k}")
        return TruncatedSeries(self.coeffs[k:], self.var)

    def shift_up(self, k: int) -> "TruncatedSeries":
        return TruncatedSeries((Fraction(0),) * k + self.coeffs, self.var)

    def sqrt_unit(self) -> "TruncatedSeries":
        """Square root with constant term 1 of a series with constant term 1."""
        h = self.coeffs
        if h[0] != 1:
            raise SeriesError("square root needs constant term 1")
        g = [Fraction(1)]
        for k in range(1, len(h)):
            acc = sum((g[i] * g[k - i] for i in range(1, k)), Fraction(0))
            g.append((h[k] - acc) / 2)
        return TruncatedSeries(tuple(g), self.var)

    def __str__(self):
        terms = [f"{c}*{self.var}^{i}" for i, c in enumerate(self.coeffs) if c][:6]
        return " + ".join(terms or ["0"]) + f" + O({self.var}^{self.truncation + 1})"


# -- polynomials -----------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    variables: tuple[str, ...]
    terms: tuple[tuple[tuple[int, ...], Fraction], ...]

    @classmethod
    def from_dict(cls, variables: Sequence[str], terms: Mapping) -> "Polynomial":
        clean = {}
        for k, c in terms.items():
            k = tuple(int(e) for e in k)
            if len(k) != len(variables) or any(e < 0 for e in k):
                raise SeriesError(f"bad exponent vector {k}")
            clean[k] = clean.get(k, Fraction(0)) + Fraction(c)
        return cls(tuple(variables), tuple(sorted((k, c) for k, c in clean.items() if c)))

    @classmethod
    def parse(cls, text: str, variables: Sequence[str]) -> "Polynomial":
        """Parse sums of terms like ``-3/2*x^2*y`` over the given variables."""
        idx = {v: i for i, v in enumerate(variables)}
        src = text.replace(" ", "")
        if not src:
            raise SeriesError("empty polynomial")
        terms: dict = {}
        for sign, body in re.findall(r"([+-]?)([^+-]+)", src):
            if not body:
                raise SeriesError(f"cannot parse {text!r}")
            coeff = Fraction(-1 if sign == "-" else 1)
            exps = [0] * len(variables)
            for factor in body.split("*"):
                m = re.fullmatch(r"([A-Za-z_]\w*)(?:\^(\d+))?", factor)
                if m:
                    if m.group(1) not in idx:
                        raise SeriesError(f"unknown variable {m.group(1)!r} in {text!r}")
                    exps[idx[m.group(1)]] += int(m.group(2) or 1)
                else:
                    try:
                        coeff *= Fraction(factor)
                    except ValueError:
                        raise SeriesError(f"cannot parse factor {factor!r} in {text!r}") from None
            key = tuple(exps)
            terms[key] = terms.get(key, Fraction(0)) + coeff
        return cls.from_dict(variables, terms)


def series_order(f: Polynomial, substitutions: Mapping[str, TruncatedSeries]) -> int | BeyondTruncation:
    """Order of vanishing of f(s_1, ..., s_k), or BeyondTruncation."""
    return compose(f, substitutions).order()


def compose(f: Polynomial, substitutions: Mapping[str, TruncatedSeries]) -> TruncatedSeries:
    missing = [v for v in f.variables if v not in substitutions]
    if missing:
        raise SeriesError(f"no substitution for {missing}")
    subs = [substitutions[v] for v in f.variables]
    powers: dict = {}

    def power(i, k):
        if (i, k) not in powers:
            powers[i, k] = subs[i] ** k
        return powers[i, k]

    n = min(s.truncation for s in subs)
    total = TruncatedSeries.constant(0, n, subs[0].var)
    for exps, c in f.terms:
        term = TruncatedSeries.constant(c, n, subs[0].var)
        for i, k in enumerate(exps):
            if k:
                term = term * power(i, k)
        total = total + term
    return total


# -- the one-variable model used by ex4 ---------------------------------------

def random_unit_series(truncation: int, seed: int | None = None) -> TruncatedSeries:
    """p(x) = x + a_2 x^2 + ... with pseudorandom rational a_k."""
    rng = random.Random(default_seed() if seed is None else seed)
    coeffs = [Fraction(0), Fraction(1)]
    for _ in range(2, truncation + 1):
        num = 0
        while num == 0:
            num = rng.randint(-5, 5)
        coeffs.append(Fraction(num, rng.randint(1, 4)))
    return TruncatedSeries.from_coeffs(coeffs, truncation)


def sqrt_branch(p: TruncatedSeries) -> TruncatedSeries:
    """phi = x * sqrt(p(x)/x), so phi^2 = x p(x) and phi = x + ..."""
    h = p.shift_down(1)
    return h.sqrt_unit().shift_up(1)


@dataclass
class EchelonResult:
    pivots: dict  # order -> monomial exponent achieving it after reduction
    kernel: list  # monomials whose reduced series vanish through the truncation
    reliable_below: int

    def rank(self, degree: int) -> int:
        return int(degree in self.pivots)


def leading_orders(monomials: Sequence[Sequence[int]], substitutions: Sequence[TruncatedSeries],
                   cover: int | None = None) -> EchelonResult:
    """Echelon-reduce the series of the given monomials by order of vanishing.

    The pivot set is the set of orders attained by the linear span, i.e. the
    degrees in which the associated graded space is nonzero.  With ``cover``
    set, monomials are taken in order of total degree and the scan stops
    after the first complete degree whose pivots include 0..cover.
    """
    pivots: dict[int, tuple[list[Fraction], tuple]] = {}
    kernel = []
    reliable = min(s.truncation for s in substitutions) + 1
    if cover is not None:
        monomials = sorted(monomials, key=sum)
    for pos, exps in enumerate(monomials):
        if (cover is not None and pos and sum(exps) > sum(monomials[pos - 1])
                and all(d in pivots for d in range(cover + 1)) and cover < reliable):
            break
        ser = TruncatedSeries.constant(1, reliable - 1)
        for s, k in zip(substitutions, exps):
            if k:
                ser = ser * s ** k
        row = list(ser.coeffs)
        reliable = min(reliable, len(row))
        while True:
            o = next((i for i, c in enumerate(row[:reliable]) if c), None)
            if o is None:
                kernel.append(tuple(exps))
                break
            if o not in pivots:
                lead = row[o]
                pivots[o] = ([c / lead for c in row], tuple(exps))
                break
            prow = pivots[o][0]
            c = row[o]
            row = [a - c * b for a, b in zip(row, prow)]
    return EchelonResult({o: m for o, (_, m) in pivots.items() if o < reliable}, kernel, reliable)


def monomials_up_to(nvars: int, degree: int) -> list[tuple[int, ...]]:
    return [m for d in range(degree + 1) for m in _compositions(nvars, d)]


def _compositions(nvars: int, total: int):
    if nvars == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(nvars - 1, total - first):
            yield (first,) + rest
