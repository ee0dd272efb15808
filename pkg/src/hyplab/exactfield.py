"""Finite fields F_{p^k} with integer-coded elements.

An element of ``F_p[x]/(f)`` with coordinates ``(c_0, ..., c_{k-1})``
(coefficient of ``x^i`` first) is encoded as the integer
``c_0 + c_1 p + ... + c_{k-1} p^(k-1)``.  The constants of the prime field
are therefore the codes ``0 .. p-1`` and enumeration order is code order.

Arithmetic on codes goes through log / antilog / Zech tables built once per
field (see :class:`FieldTables`).  :class:`FieldElement` is the immutable
scalar wrapper used by the public API; the vectorised table methods are what
the enumeration kernels run on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

DEFAULT_FIELD_CAP = 10**7


class FieldError(ValueError):
    pass


class NotPrime(FieldError):
    pass


class Reducible(FieldError):
    pass


class NotASubfield(FieldError):
    pass


class FieldTooLarge(FieldError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, e)`` with ``q == p**e``, or None if q is not a prime power."""
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e = 0
    while q % p == 0:
        q //= p
        e += 1
    return (p, e) if q == 1 else None


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over F_p, coefficient lists low -> high ---------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: Sequence[int], f: Sequence[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    df = len(f) - 1
    inv = pow(f[-1], -1, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(a: Sequence[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Ben-Or test: gcd(f, x^(p^i) - x) = 1 for i <= deg/2."""
    f = [c % p for c in poly]
    k = len(f) - 1
    if k <= 1:
        return k == 1
    h = [0, 1]
    for _ in range(1, k // 2 + 1):
        h = _ppowmod(h, p, f, p)
        if len(_pgcd(f, _psub(h, [0, 1], p), p)) > 1:
            return False
    return True


# -- descriptors --------------------------------------------------------------

@dataclass(frozen=True)
class FieldDescriptor:
    p: int
    degree: int
    polynomial: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if len(self.polynomial) != self.degree + 1 or self.polynomial[-1] % self.p != 1:
            raise FieldError("defining polynomial must be monic of the stated degree")
        if not is_irreducible(self.polynomial, self.p):
            raise Reducible(f"{self.polynomial} is reducible over F_{self.p}")

    @property
    def size(self) -> int:
        return self.p**self.degree

    @property
    def tables(self) -> "FieldTables":
        return _tables(self)

    def element(self, value: int | Sequence[int]) -> "FieldElement":
        if isinstance(value, (int, np.integer)):
            code = int(value) % self.p if self.degree == 1 else int(value)
            if not 0 <= code < self.size:
                raise FieldError(f"code {value} out of range")
            return FieldElement(self, code)
        coords = list(value)
        if len(coords) > self.degree:
            raise FieldError("too many coordinates")
        return FieldElement(self, sum((c % self.p) * self.p**i for i, c in enumerate(coords)))

    def constant(self, n: int) -> "FieldElement":
        return FieldElement(self, n % self.p)

    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def generator(self) -> "FieldElement":
        """The primitive element the log tables are built on."""
        return FieldElement(self, self.tables.gen_code)

    def elements(self) -> Iterator["FieldElement"]:
        return field_enumerate(self)

    def __repr__(self):
        return f"F{self.size}"


def field_make(p: int, degree: int = 1, polynomial: Sequence[int] | None = None,
               cap: int = DEFAULT_FIELD_CAP) -> FieldDescriptor:
    """Build F_{p^degree}.

    Without ``polynomial`` the lexicographically least monic irreducible is
    chosen (candidates compared by the code of their lower coefficients), so
    ``field_make(2, 2).polynomial == (1, 1, 1)``.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if degree < 1:
        raise FieldError("degree must be positive")
    if p**degree > cap:
        raise FieldTooLarge(f"F_{p}^{degree} exceeds the field cap {cap}")
    if polynomial is not None:
        poly = tuple(int(c) % p for c in polynomial)
        if len(poly) != degree + 1 or poly[-1] != 1:
            raise FieldError("supplied polynomial must be monic of the stated degree")
        return FieldDescriptor(p, degree, poly)
    return FieldDescriptor(p, degree, _least_irreducible(p, degree))


@lru_cache(maxsize=None)
def _least_irreducible(p: int, degree: int) -> tuple[int, ...]:
    for code in range(p**degree):
        low = [(code // p**i) % p for i in range(degree)]
        cand = low + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def field_enumerate(field: FieldDescriptor) -> Iterator["FieldElement"]:
    for code in range(field.size):
        yield FieldElement(field, code)


# -- tables -------------------------------------------------------------------

class FieldTables:
    """Log/antilog/Zech/trace tables plus vectorised code arithmetic.

    ``log[0] == -1`` and ``zech[n] == -1`` when ``1 + g^n == 0``.
    Built once per descriptor and shared (read-only) by all workers.
    """

    def __init__(self, desc: FieldDescriptor):
        p, k, Q = desc.p, desc.degree, desc.size
        self.p, self.k, self.Q, self.q1 = p, k, Q, Q - 1
        self.pw = np.array([p**i for i in range(k)], dtype=np.int64)
        f = desc.polynomial
        comp = np.zeros((k, k), dtype=np.int64)
        for j in range(k - 1):
            comp[j + 1, j] = 1
        comp[:, k - 1] = [(-c) % p for c in f[:k]]
        cpow = [np.eye(k, dtype=np.int64)]
        for _ in range(1, k):
            cpow.append(comp @ cpow[-1] % p)
        self._cpow = np.array(cpow)

        self.gen_code = self._find_primitive()
        self.exp = self._build_exp()
        log = np.full(Q, -1, dtype=np.int64)
        log[self.exp] = np.arange(self.q1, dtype=np.int64)
        if (log[1:] < 0).any():  # pragma: no cover - primitive element check guards this
            raise AssertionError("generator is not primitive")
        self.log = log
        plus_one = np.where(self.exp % p == p - 1, self.exp - (p - 1), self.exp + 1)
        self.zech = log[plus_one]
        tr_basis = np.array([int(np.trace(c)) % p for c in self._cpow], dtype=np.int64)
        codes = np.arange(Q, dtype=np.int64)
        tr = np.zeros(Q, dtype=np.int64)
        for i in range(k):
            tr += ((codes // self.pw[i]) % p) * tr_basis[i]
        self.trace = tr % p
        self.neg_one = p - 1
        for arr in (self.exp, self.log, self.zech, self.trace):
            arr.flags.writeable = False

    # digit-space helpers (used only while building tables)
    def _digits_of(self, code: int) -> np.ndarray:
        return (code // self.pw) % self.p

    def _mulmat(self, digits: np.ndarray) -> np.ndarray:
        return np.tensordot(digits, self._cpow, axes=(0, 0)) % self.p

    def _pow_digits(self, digits: np.ndarray, e: int) -> np.ndarray:
        result = np.zeros(self.k, dtype=np.int64)
        result[0] = 1
        base = digits.copy()
        while e:
            if e & 1:
                result = self._mulmat(base) @ result % self.p
            base = self._mulmat(base) @ base % self.p
            e >>= 1
        return result

    def _find_primitive(self) -> int:
        if self.Q == 2:
            return 1
        factors = _prime_factors(self.q1)
        one = np.zeros(self.k, dtype=np.int64)
        one[0] = 1
        for code in range(2, self.Q):
            d = self._digits_of(code)
            if all(not np.array_equal(self._pow_digits(d, self.q1 // l), one) for l in factors):
                return code
        raise AssertionError("no primitive element")  # pragma: no cover

    def _build_exp(self) -> np.ndarray:
        p, k, n = self.p, self.k, self.q1
        g = self._mulmat(self._digits_of(self.gen_code))
        b = max(1, math.isqrt(n))
        baby = np.zeros((b, k), dtype=np.int64)
        baby[0, 0] = 1
        for j in range(1, b):
            baby[j] = g @ baby[j - 1] % p
        giant_step = np.eye(k, dtype=np.int64)
        for _ in range(b):
            giant_step = g @ giant_step % p
        blocks = []
        m = np.eye(k, dtype=np.int64)
        for _ in range(-(-n // b)):
            blocks.append(baby @ m.T % p)
            m = giant_step @ m % p
        digits = np.concatenate(blocks)[:n]
        return digits @ self.pw

    # vectorised arithmetic on codes
    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[(self.log[a] + self.log[b]) % self.q1]
        return np.where((a == 0) | (b == 0), 0, out)

    def add(self, a, b):
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        la, lb = self.log[a], self.log[b]
        z = self.zech[(lb - la) % self.q1]
        out = np.where(z < 0, 0, self.exp[(la + z) % self.q1])
        return np.where(a == 0, b, np.where(b == 0, a, out))

    def neg(self, a):
        return self.mul(a, self.neg_one)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if (a == 0).any():
            raise ZeroDivisionError("inverse of zero")
        return self.exp[(-self.log[a]) % self.q1]

    def power(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        if e < 0 and (a == 0).any():
            raise ZeroDivisionError("negative power of zero")
        out = self.exp[(self.log[a] * e) % self.q1]
        return np.where(a == 0, 0, out)

    def sum(self, a, axis: int = -1):
        a = np.moveaxis(np.asarray(a, dtype=np.int64), axis, 0)
        acc = np.zeros(a.shape[1:], dtype=np.int64)
        for sl in a:
            acc = self.add(acc, sl)
        return acc

    def matmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        acc = None
        for i in range(a.shape[-1]):
            term = self.mul(a[..., :, i, None], b[..., None, i, :])
            acc = term if acc is None else self.add(acc, term)
        return acc

    def from_int(self, n):
        return np.asarray(n, dtype=np.int64) % self.p

    def digits(self, a):
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self.pw) % self.p


@lru_cache(maxsize=32)
def _tables(desc: FieldDescriptor) -> FieldTables:
    return FieldTables(desc)


# -- scalar elements -------------------------------------------------------------

@dataclass(frozen=True)
class FieldElement:
    field: FieldDescriptor
    code: int

    @property
    def coords(self) -> tuple[int, ...]:
        p = self.field.p
        return tuple((self.code // p**i) % p for i in range(self.field.degree))

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("elements of different fields")
            return other.code
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.p
        return NotImplemented

    def __add__(self, other):
        c = self._other(other)
        if c is NotImplemented:
            return c
        return FieldElement(self.field, int(self.field.tables.add(self.code, c)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, int(self.field.tables.neg(self.code)))

    def __sub__(self, other):
        c = self._other(other)
        if c is NotImplemented:
            return c
        return FieldElement(self.field, int(self.field.tables.sub(self.code, c)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        c = self._other(other)
        if c is NotImplemented:
            return c
        return FieldElement(self.field, int(self.field.tables.mul(self.code, c)))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, int(self.field.tables.inv(self.code)))

    def __truediv__(self, other):
        c = self._other(other)
        if c is NotImplemented:
            return c
        return self * FieldElement(self.field, c).inverse()

    def __pow__(self, e: int):
        return FieldElement(self.field, int(self.field.tables.power(self.code, e)))

    def is_zero(self) -> bool:
        return self.code == 0

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coords):
            if c:
                terms.append(str(c) if i == 0 else (f"{c if c != 1 else ''}x" + (f"^{i}" if i > 1 else "")))
        return f"{self.field!r}({'+'.join(terms) or '0'})"


@lru_cache(maxsize=64)
def embedding(small: FieldDescriptor, big: FieldDescriptor) -> np.ndarray:
    """Codes in ``big`` of the elements of ``small`` (indexed by small code).

    The generator x of ``small`` is sent to the least root of its defining
    polynomial in ``big``.
    """
    if small.p != big.p or big.degree % small.degree:
        raise NotASubfield(f"{small!r} is not a subfield of {big!r}")
    if small == big:
        return np.arange(big.size, dtype=np.int64)
    t = big.tables
    codes = np.arange(big.size, dtype=np.int64)
    val = np.zeros_like(codes)
    for c in reversed(small.polynomial):
        val = t.add(t.mul(val, codes), t.from_int(c))
    root = int(np.flatnonzero(val == 0)[0])
    out = np.zeros(small.size, dtype=np.int64)
    rp = t.power(root, 0)
    powers = []
    for _ in range(small.degree):
        powers.append(int(rp))
        rp = t.mul(rp, root)
    small_codes = np.arange(small.size, dtype=np.int64)
    for i in range(small.degree):
        digit = (small_codes // small.p**i) % small.p
        out = t.add(out, t.mul(digit, powers[i]))
    out.flags.writeable = False
    return out


def field_trace(x: FieldElement, target: FieldDescriptor) -> FieldElement:
    """Relative trace: sum of x^(|target|^i) over the Galois orbit."""
    big = x.field
    if target.p != big.p or big.degree % target.degree:
        raise NotASubfield(f"{target!r} is not a subfield of {big!r}")
    r = target.size
    acc = big.zero()
    y = x
    for _ in range(big.degree // target.degree):
        acc = acc + y
        y = y**r
    emb = embedding(target, big)
    hits = np.flatnonzero(emb == acc.code)
    if hits.size != 1:  # pragma: no cover - Galois theory guarantees a unique preimage
        raise AssertionError("trace does not lie in the target subfield")
    return FieldElement(target, int(hits[0]))
