"""Exact arithmetic in Z[zeta_p] and Q(zeta_p), the additive character, and
rigorous absolute values under the embedding zeta_p -> exp(2 pi i / p).

Coordinates are taken in the basis ``1, zeta, ..., zeta^(p-2)``; every result
is reduced by ``1 + zeta + ... + zeta^(p-1) = 0``.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import mpmath
from mpmath import iv
from mpmath.libmp import to_rational

from .exactfield import FieldElement

DEFAULT_PRECISION = 64


class MixedConductor(ValueError):
    pass


def _reduce_full(p: int, full: Sequence[int]) -> tuple[int, ...]:
    """Coefficients on 1..zeta^(p-1) -> canonical coordinates of length p-1."""
    top = full[p - 1]
    return tuple(full[i] - top for i in range(p - 1))


@dataclass(frozen=True)
class CyclotomicInteger:
    p: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.p - 1:
            raise ValueError(f"expected {self.p - 1} coordinates, got {len(self.coords)}")

    @classmethod
    def zero(cls, p: int) -> "CyclotomicInteger":
        return cls(p, (0,) * (p - 1))

    @classmethod
    def from_int(cls, p: int, n: int) -> "CyclotomicInteger":
        return cls(p, (n,) + (0,) * (p - 2))

    @classmethod
    def zeta_power(cls, p: int, t: int) -> "CyclotomicInteger":
        full = [0] * p
        full[t % p] = 1
        return cls(p, _reduce_full(p, full))

    @classmethod
    def from_counts(cls, p: int, counts: Sequence[int]) -> "CyclotomicInteger":
        """``sum_t counts[t] * zeta^t``."""
        return cls(p, _reduce_full(p, [int(c) for c in counts]))

    def full(self) -> list[int]:
        return list(self.coords) + [0]

    def _check(self, other: "CyclotomicInteger"):
        if other.p != self.p:
            raise MixedConductor(f"Z[zeta_{self.p}] vs Z[zeta_{other.p}]")

    def __add__(self, other):
        if isinstance(other, int):
            other = CyclotomicInteger.from_int(self.p, other)
        self._check(other)
        return CyclotomicInteger(self.p, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicInteger(self.p, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        p = self.p
        if isinstance(other, int):
            return CyclotomicInteger(p, tuple(a * other for a in self.coords))
        self._check(other)
        full = [0] * p
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        full[(i + j) % p] += a * b
        return CyclotomicInteger(p, _reduce_full(p, full))

    __rmul__ = __mul__

    def galois(self, a: int) -> "CyclotomicInteger":
        """Image under zeta -> zeta^a (a prime to p)."""
        p = self.p
        if a % p == 0:
            raise ValueError("a must be prime to p")
        full = [0] * p
        for i, c in enumerate(self.coords):
            full[(i * a) % p] += c
        return CyclotomicInteger(p, _reduce_full(p, full))

    def norm(self) -> int:
        prod = CyclotomicInteger.from_int(self.p, 1)
        for a in range(1, self.p):
            prod = prod * self.galois(a)
        assert all(c == 0 for c in prod.coords[1:])
        return prod.coords[0]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def rational_value(self) -> int | None:
        """The integer this element equals, if it is one."""
        if any(self.coords[1:]):
            return None
        return self.coords[0]

    def embed(self, prec: int = DEFAULT_PRECISION):
        """Complex interval enclosure of sigma(self)."""
        with ivprec(prec):
            re = iv.mpf(0)
            im = iv.mpf(0)
            two_pi_over_p = 2 * iv.pi / self.p
            for k, c in enumerate(self.coords):
                if c:
                    re += c * iv.cos(two_pi_over_p * k)
                    im += c * iv.sin(two_pi_over_p * k)
            return iv.mpc(re, im)

    def complex_value(self, prec: int = 128) -> complex:
        with mpmath.workprec(prec):
            z = sum(c * mpmath.expjpi(mpmath.mpf(2 * k) / self.p) for k, c in enumerate(self.coords))
            return complex(z)

    def to_json(self) -> dict:
        return {"p": self.p, "coords": list(self.coords)}

    @classmethod
    def from_json(cls, obj: dict) -> "CyclotomicInteger":
        return cls(int(obj["p"]), tuple(int(c) for c in obj["coords"]))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coords):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*z^{i}")
        return f"Cyc{self.p}({' + '.join(terms) or '0'})"


def cyc_arith(a: CyclotomicInteger, b: CyclotomicInteger, op: str) -> CyclotomicInteger:
    if a.p != b.p:
        raise MixedConductor(f"Z[zeta_{a.p}] vs Z[zeta_{b.p}]")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def psi(u: FieldElement, power: int = 1) -> CyclotomicInteger:
    """zeta_p^(power * Tr_{F/F_p}(u))."""
    t = int(u.field.tables.trace[u.code])
    return CyclotomicInteger.zeta_power(u.field.p, power * t)


# -- rationals over Q(zeta_p) ----------------------------------------------------

@dataclass(frozen=True)
class CyclotomicRational:
    numerator: CyclotomicInteger
    denominator: int = 1

    def __post_init__(self):
        if self.denominator == 0:
            raise ZeroDivisionError("zero denominator")
        num, den = self.numerator, self.denominator
        g = den
        for c in num.coords:
            g = gcd(g, c)
        if den < 0:
            g = -abs(g)
        if g not in (0, 1):
            num = CyclotomicInteger(num.p, tuple(c // g for c in num.coords))
            den //= g
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @property
    def p(self) -> int:
        return self.numerator.p

    @classmethod
    def of(cls, x) -> "CyclotomicRational":
        if isinstance(x, CyclotomicRational):
            return x
        return cls(x, 1)

    def __add__(self, other):
        o = CyclotomicRational.of(other)
        return CyclotomicRational(self.numerator * o.denominator + o.numerator * self.denominator,
                                  self.denominator * o.denominator)

    def __neg__(self):
        return CyclotomicRational(-self.numerator, self.denominator)

    def __sub__(self, other):
        return self + (-CyclotomicRational.of(other))

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicRational(self.numerator * other, self.denominator)
        o = CyclotomicRational.of(other)
        return CyclotomicRational(self.numerator * o.numerator, self.denominator * o.denominator)

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicRational":
        x = self.numerator
        if x.is_zero():
            raise ZeroDivisionError("inverse of zero")
        conj = CyclotomicInteger.from_int(x.p, 1)
        for a in range(2, x.p):
            conj = conj * x.galois(a)
        n = x.norm()
        return CyclotomicRational(conj * self.denominator, n)

    def __truediv__(self, other):
        return self * CyclotomicRational.of(other).inverse()

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def __eq__(self, other):
        if isinstance(other, CyclotomicInteger):
            other = CyclotomicRational(other)
        if not isinstance(other, CyclotomicRational):
            return NotImplemented
        return self.numerator == other.numerator and self.denominator == other.denominator

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def embed(self, prec: int = DEFAULT_PRECISION):
        with ivprec(prec):
            return self.numerator.embed(prec) / self.denominator

    def to_json(self) -> dict:
        return {"p": self.p, "coords": list(self.numerator.coords), "den": self.denominator}

    def __repr__(self):
        return f"({self.numerator!r})/{self.denominator}" if self.denominator != 1 else repr(self.numerator)


# -- real intervals ---------------------------------------------------------------

@contextmanager
def ivprec(bits: int):
    """Temporarily set the precision of mpmath's interval context."""
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def _raw_to_fraction(raw) -> Fraction:
    num, den = to_rational(raw)
    return Fraction(int(num), int(den))


@dataclass(frozen=True)
class Interval:
    """Closed real interval with exact rational endpoints."""
    lo: Fraction
    hi: Fraction

    @classmethod
    def from_iv(cls, x) -> "Interval":
        a, b = x._mpi_
        return cls(_raw_to_fraction(a), _raw_to_fraction(b))

    @classmethod
    def point(cls, v) -> "Interval":
        v = Fraction(v)
        return cls(v, v)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        if isinstance(x, float):
            x = Fraction(x)
        return self.lo <= x <= self.hi

    def to_iv(self):
        return iv.mpf([mpmath.mpf(self.lo.numerator) / self.lo.denominator,
                       mpmath.mpf(self.hi.numerator) / self.hi.denominator])

    def to_json(self) -> list[float]:
        """Endpoints rounded outward to doubles."""
        lo, hi = float(self.lo), float(self.hi)
        if Fraction(lo) > self.lo:
            lo = math.nextafter(lo, -math.inf)
        if Fraction(hi) < self.hi:
            hi = math.nextafter(hi, math.inf)
        return [lo, hi]

    def __repr__(self):
        return f"[{float(self.lo):.12g}, {float(self.hi):.12g}]"


def _guard_bits(coords: Iterable[int], p: int) -> int:
    return sum(abs(c) for c in coords).bit_length() + p.bit_length() + 10


def cyc_abs(z: CyclotomicInteger, precision: int = DEFAULT_PRECISION) -> Interval:
    """Enclosure of |sigma(z)| of width at most 2^(4 - precision)."""
    work = precision + _guard_bits(z.coords, z.p)
    with ivprec(work):
        return Interval.from_iv(abs(z.embed(work)))


def interval_sqrt_power(q: int, d: int, scale: Fraction | int = 1,
                        precision: int = DEFAULT_PRECISION) -> Interval:
    """Enclosure of ``scale * q^(d/2)``."""
    scale = Fraction(scale)
    if d % 2 == 0:
        return Interval.point(scale * q ** (d // 2))
    work = precision + q.bit_length() * (d + 1) + abs(scale.numerator).bit_length() + 16
    with ivprec(work):
        return Interval.from_iv(iv.sqrt(iv.mpf(q**d)) * scale.numerator / scale.denominator)
