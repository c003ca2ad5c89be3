"""Univariate polynomials over a finite field.

Polynomials are tuples of field-element codes in constant-first order,
``(a_0, a_1, ..., a_n)`` with ``a_n != 0``; the zero polynomial is ``()``.
All functions take the owning field as first argument and never mutate
their inputs.  Prime fields take an integer fast path since they dominate
the hot loops (Cantor composition, modulus search).

:class:`Poly` is a thin immutable wrapper with operators for interactive
use and for the public API; the module-level functions are what the
algorithms call.
"""

from __future__ import annotations

import math
import random
from typing import Sequence

Coeffs = tuple


def normalize(a: Sequence[int]) -> Coeffs:
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return tuple(a[:n])


def degree(a: Coeffs) -> int:
    """Degree, with -1 standing in for the zero polynomial."""
    return len(a) - 1


def add(F, a: Coeffs, b: Coeffs) -> Coeffs:
    if len(a) < len(b):
        a, b = b, a
    if F.prime:
        p = F.char
        out = [(x + y) % p for x, y in zip(a, b)]
    else:
        fa = F.add
        out = [fa(x, y) for x, y in zip(a, b)]
    out.extend(a[len(b):])
    return normalize(out)


def neg(F, a: Coeffs) -> Coeffs:
    return tuple(F.neg(x) for x in a)


def sub(F, a: Coeffs, b: Coeffs) -> Coeffs:
    return add(F, a, neg(F, b))


def scale(F, a: Coeffs, c: int) -> Coeffs:
    if c == 0:
        return ()
    if F.prime:
        p = F.char
        return tuple(x * c % p for x in a)
    m = F.mul
    return tuple(m(x, c) for x in a)


def shift(a: Coeffs, k: int) -> Coeffs:
    return (0,) * k + a if a else ()


def mul(F, a: Coeffs, b: Coeffs) -> Coeffs:
    if not a or not b:
        return ()
    if F.prime:
        p = F.char
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return normalize([c % p for c in out])
    fa, fm = F.add, F.mul
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = fa(out[i + j], fm(x, y))
    return normalize(out)


def divmod_(F, a: Coeffs, b: Coeffs) -> tuple[Coeffs, Coeffs]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    db = len(b) - 1
    if len(a) - 1 < db:
        return (), a
    r = list(a)
    q = [0] * (len(a) - db)
    inv_lc = F.inv(b[-1])
    if F.prime:
        p = F.char
        for k in range(len(a) - 1, db - 1, -1):
            c = r[k] % p
            if c:
                c = c * inv_lc % p
                q[k - db] = c
                off = k - db
                for j in range(db):
                    r[off + j] -= c * b[j]
            r[k] = 0
        return normalize(q), normalize([x % p for x in r[:db]])
    fs, fm = F.sub, F.mul
    for k in range(len(a) - 1, db - 1, -1):
        c = r[k]
        if c:
            c = fm(c, inv_lc)
            q[k - db] = c
            off = k - db
            for j in range(db):
                if b[j]:
                    r[off + j] = fs(r[off + j], fm(c, b[j]))
        r[k] = 0
    return normalize(q), normalize(r[:db])


def mod(F, a: Coeffs, b: Coeffs) -> Coeffs:
    return divmod_(F, a, b)[1]


def quo(F, a: Coeffs, b: Coeffs) -> Coeffs:
    return divmod_(F, a, b)[0]


def monic(F, a: Coeffs) -> Coeffs:
    if not a or a[-1] == 1:
        return a
    return scale(F, a, F.inv(a[-1]))


def gcd(F, a: Coeffs, b: Coeffs) -> Coeffs:
    """Monic gcd (``()`` when both inputs are zero)."""
    while b:
        a, b = b, mod(F, a, b)
    return monic(F, a)


def xgcd(F, a: Coeffs, b: Coeffs) -> tuple[Coeffs, Coeffs, Coeffs]:
    """Return ``(d, s, t)`` with ``d = s*a + t*b`` and ``d`` monic."""
    r0, r1 = a, b
    s0, s1 = (1,), ()
    t0, t1 = (), (1,)
    while r1:
        q, r = divmod_(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(F, s0, mul(F, q, s1))
        t0, t1 = t1, sub(F, t0, mul(F, q, t1))
    if not r0:
        return (), (), ()
    c = F.inv(r0[-1])
    return scale(F, r0, c), scale(F, s0, c), scale(F, t0, c)


def derivative(F, a: Coeffs) -> Coeffs:
    out = []
    for i in range(1, len(a)):
        # i * a_i with i reduced into the prime subfield
        k = i % F.char
        out.append(F.mul(a[i], k) if k else 0)
    return normalize(out)


def evaluate(F, a: Coeffs, x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def powmod(F, a: Coeffs, n: int, m: Coeffs) -> Coeffs:
    result: Coeffs = (1,)
    base = mod(F, a, m)
    while n:
        if n & 1:
            result = mod(F, mul(F, result, base), m)
        n >>= 1
        if n:
            base = mod(F, mul(F, base, base), m)
    return mod(F, result, m)


def is_squarefree(F, a: Coeffs) -> bool:
    if not a:
        raise ValueError("zero polynomial has no squarefree decomposition")
    return len(gcd(F, a, derivative(F, a))) == 1


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


def is_irreducible(F, f: Coeffs) -> bool:
    """Rabin's test over the field ``F``."""
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    f = monic(F, f)
    x = (0, 1)
    q = F.order
    if powmod(F, x, q**n, f) != mod(F, x, f):
        return False
    for r in _prime_factors(n):
        h = sub(F, powmod(F, x, q ** (n // r), f), x)
        if len(gcd(F, f, h)) != 1:
            return False
    return True


def random_monic(F, n: int, rng: random.Random) -> Coeffs:
    return tuple(rng.randrange(F.order) for _ in range(n)) + (1,)


class Poly:
    """Immutable polynomial over a :class:`~ffiwasawa.algebra.field.FiniteField`."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs: Sequence[int] = ()):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", normalize([int(c) % field.order for c in coeffs]))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @property
    def degree(self) -> float:
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    @property
    def leading_coefficient(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def _wrap(self, c: Coeffs) -> "Poly":
        return Poly(self.field, c)

    def _other(self, other) -> Coeffs:
        if isinstance(other, Poly):
            if other.field != self.field:
                raise ValueError("polynomials over different fields")
            return other.coeffs
        if isinstance(other, int):
            return normalize([other % self.field.order]) if self.field.prime else normalize([other])
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(add(self.field, self.coeffs, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(sub(self.field, self.coeffs, o))

    def __neg__(self):
        return self._wrap(neg(self.field, self.coeffs))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(mul(self.field, self.coeffs, o))

    __rmul__ = __mul__

    def __divmod__(self, other):
        q, r = divmod_(self.field, self.coeffs, self._other(other))
        return self._wrap(q), self._wrap(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        return isinstance(other, Poly) and other.field == self.field and other.coeffs == self.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __call__(self, x: int) -> int:
        return evaluate(self.field, self.coeffs, x)

    def derivative(self) -> "Poly":
        return self._wrap(derivative(self.field, self.coeffs))

    def gcd(self, other: "Poly") -> "Poly":
        return self._wrap(gcd(self.field, self.coeffs, other.coeffs))

    def is_squarefree(self) -> bool:
        return is_squarefree(self.field, self.coeffs)

    def is_irreducible(self) -> bool:
        return is_irreducible(self.field, self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c:
                cs = self.field.format_element(c)
                terms.append(cs if i == 0 else f"{cs}*T^{i}")
        return "Poly(" + " + ".join(terms) + ")"


def poly_squarefree(f: Poly) -> bool:
    """True iff ``gcd(f, f')`` is constant."""
    return f.is_squarefree()
