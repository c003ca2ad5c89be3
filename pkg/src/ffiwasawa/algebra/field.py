"""Finite fields F_q, q = l^d with l odd, in a fixed polynomial basis.

An element is encoded as the integer ``sum(c_i * l**i)`` of its coordinate
vector ``(c_0, ..., c_{d-1})`` over F_l with respect to the basis
``1, x, ..., x^{d-1}`` of ``F_l[x]/(modulus)``.  Code 0 is zero, code 1 is
one, and for prime fields the code *is* the residue.  Every algorithm in
the package works on these codes; :class:`FieldElement` wraps a code for
the public, operator-based API.
"""

from __future__ import annotations

import random
from functools import cached_property

import numpy as np
from sympy import factorint, isprime

from . import poly as P

# Multiplication switches to log/exp lookups below this order.
_LOG_TABLE_MAX = 3**8 + 1
_ADD_TABLE_MAX = 729


class FieldError(ValueError):
    pass


class FiniteField:
    """The field ``F_l[x]/(modulus)`` of order ``l**d``."""

    def __init__(self, char: int, degree: int = 1, modulus: tuple[int, ...] | None = None):
        if char == 2:
            raise FieldError("even characteristic unsupported")
        if char < 3 or not isprime(char):
            raise FieldError(f"characteristic {char} is not an odd prime")
        if degree < 1:
            raise FieldError("degree must be positive")
        if modulus is None:
            if degree != 1:
                raise FieldError("extension fields need a defining modulus")
            modulus = (0, 1)
        modulus = tuple(int(c) % char for c in modulus)
        if len(modulus) != degree + 1 or modulus[-1] != 1:
            raise FieldError("modulus must be monic of the field degree")
        self.char = char
        self.degree = degree
        self.modulus = modulus
        self.order = char**degree
        self.prime = degree == 1

    # -- identity -------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FiniteField)
            and self.char == other.char
            and self.degree == other.degree
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.char, self.degree, self.modulus))

    def __repr__(self):
        if self.prime:
            return f"GF({self.char})"
        return f"GF({self.char}^{self.degree}, modulus={list(self.modulus)})"

    def __reduce__(self):
        return (FiniteField, (self.char, self.degree, self.modulus))

    # -- coordinates ----------------------------------------------------

    def digits(self, a: int) -> tuple[int, ...]:
        l = self.char
        out = []
        for _ in range(self.degree):
            a, r = divmod(a, l)
            out.append(r)
        return tuple(out)

    def from_digits(self, ds) -> int:
        if len(ds) > self.degree:
            raise FieldError(f"too many digits for {self!r}")
        l, acc = self.char, 0
        for c in reversed(ds):
            c = int(c)
            if not 0 <= c < l:
                raise FieldError(f"digit {c} out of range [0, {l})")
            acc = acc * l + c
        return acc

    def format_element(self, a: int) -> str:
        if self.prime:
            return str(a)
        return ".".join(str(c) for c in self.digits(a))

    def parse_element(self, text: str) -> int:
        """Inverse of :meth:`format_element`; prime fields accept any integer."""
        if self.prime:
            return int(text) % self.char
        return self.from_digits([int(t) for t in text.split(".")])

    def elements(self) -> range:
        return range(self.order)

    # -- arithmetic on codes -------------------------------------------

    def _mul_digits(self, a: int, b: int) -> int:
        l, d, m = self.char, self.degree, self.modulus
        x, y = self.digits(a), self.digits(b)
        prod = [0] * (2 * d - 1)
        for i, u in enumerate(x):
            if u:
                for j, v in enumerate(y):
                    prod[i + j] += u * v
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k] % l
            if c:
                for j in range(d):
                    prod[k - d + j] -= c * m[j]
        return self.from_digits([c % l for c in prod[:d]])

    @cached_property
    def _log_exp(self) -> tuple[list[int], list[int]]:
        g = self.primitive_element
        exp = [1] * (self.order - 1)
        log = [-1] * self.order
        x = 1
        for k in range(self.order - 1):
            exp[k] = x
            log[x] = k
            x = self._mul_digits(x, g)
        return log, exp

    @cached_property
    def _add_table(self) -> list[int] | None:
        if self.prime or self.order > _ADD_TABLE_MAX:
            return None
        q = self.order
        return [self._add_digits(a, b) for a in range(q) for b in range(q)]

    def _add_digits(self, a: int, b: int) -> int:
        l = self.char
        acc, place = 0, 1
        while a or b:
            a, x = divmod(a, l)
            b, y = divmod(b, l)
            acc += ((x + y) % l) * place
            place *= l
        return acc

    def add(self, a: int, b: int) -> int:
        if self.prime:
            return (a + b) % self.char
        t = self._add_table
        if t is not None:
            return t[a * self.order + b]
        return self._add_digits(a, b)

    def neg(self, a: int) -> int:
        if self.prime:
            return -a % self.char
        l = self.char
        acc, place = 0, 1
        while a:
            a, x = divmod(a, l)
            acc += (-x % l) * place
            place *= l
        return acc

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.prime:
            return a * b % self.char
        if a == 0 or b == 0:
            return 0
        if self.order <= _LOG_TABLE_MAX:
            log, exp = self._log_exp
            return exp[(log[a] + log[b]) % (self.order - 1)]
        return self._mul_digits(a, b)

    def pow(self, a: int, n: int) -> int:
        if self.prime:
            return pow(a, n, self.char)
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("zero has no inverse")
            return 1 if n == 0 else 0
        if self.order <= _LOG_TABLE_MAX:
            log, exp = self._log_exp
            return exp[(log[a] * n) % (self.order - 1)]
        if n < 0:
            a, n = self.inv(a), -n
        result = 1
        while n:
            if n & 1:
                result = self._mul_digits(result, a)
            n >>= 1
            if n:
                a = self._mul_digits(a, a)
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        if self.prime:
            return pow(a, -1, self.char)
        return self.pow(a, self.order - 2)

    def chi(self, a: int) -> int:
        """Quadratic character on a code: 0, +1 or -1."""
        if a == 0:
            return 0
        r = self.pow(a, (self.order - 1) // 2)
        return 1 if r == 1 else -1

    def sqrt(self, a: int) -> int | None:
        """A square root of ``a``, or None for non-squares."""
        if a == 0:
            return 0
        if self.chi(a) != 1:
            return None
        q = self.order
        s, t = 0, q - 1
        while t % 2 == 0:
            s, t = s + 1, t // 2
        z = self.nonsquare
        m, c = s, self.pow(z, t)
        x, b = self.pow(a, (t + 1) // 2), self.pow(a, t)
        while b != 1:
            i, b2 = 0, b
            while b2 != 1:
                b2, i = self.mul(b2, b2), i + 1
            w = self.pow(c, 1 << (m - i - 1))
            x, c = self.mul(x, w), self.mul(w, w)
            b, m = self.mul(b, c), i
        return x

    # -- distinguished elements ----------------------------------------

    @cached_property
    def nonsquare(self) -> int:
        """The smallest non-square code; the twist representative epsilon."""
        for a in range(2, self.order):
            if self.chi(a) == -1:
                return a
        raise AssertionError("odd-order field without non-squares")

    @cached_property
    def primitive_element(self) -> int:
        """Smallest code generating the multiplicative group."""
        n = self.order - 1
        primes = list(factorint(n))
        if self.prime:
            pw = lambda a, e: pow(a, e, self.char)  # noqa: E731
        else:
            def pw(a, e):
                r = 1
                while e:
                    if e & 1:
                        r = self._mul_digits(r, a)
                    e >>= 1
                    if e:
                        a = self._mul_digits(a, a)
                return r
        for g in range(1, self.order):
            if all(pw(g, n // r) != 1 for r in primes) or n == 1:
                return g
        raise AssertionError("no primitive element found")

    def mul_matrix(self, a: int) -> np.ndarray:
        """Matrix over F_l of ``x -> a*x`` acting on digit column vectors."""
        d = self.degree
        cols = [self.digits(self.mul(a, self.char**j)) for j in range(d)]
        return np.array(cols, dtype=np.int64).T

    @cached_property
    def np_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """``(exp, log)`` arrays for the primitive element, built blockwise.

        ``exp[k]`` is the code of ``g**k`` for ``0 <= k < q-1`` and ``log[c]``
        its inverse, with ``log[0] = -1``.
        """
        q, l, d = self.order, self.char, self.degree
        n = q - 1
        g = self.primitive_element
        if self.prime:
            exp = np.empty(n, dtype=np.int64)
            x = 1
            for k in range(n):
                exp[k] = x
                x = x * g % l
        else:
            G = self.mul_matrix(g)
            block = max(1, int(np.ceil(np.sqrt(n))))
            base = np.zeros((block, d), dtype=np.int64)
            v = np.zeros(d, dtype=np.int64)
            v[0] = 1
            for j in range(block):
                base[j] = v
                v = (G @ v) % l
            step = _matpow_mod(G, block, l)
            weights = l ** np.arange(d, dtype=np.int64)
            exp = np.empty(n, dtype=np.int64)
            M = np.eye(d, dtype=np.int64)
            for start in range(0, n, block):
                vecs = (base @ M.T) % l
                stop = min(n, start + block)
                exp[start:stop] = (vecs @ weights)[: stop - start]
                M = (step @ M) % l
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)
        return exp, log

    @cached_property
    def chi_table(self) -> np.ndarray:
        """Quadratic character of every code as an int8 array."""
        _, log = self.np_tables
        out = np.where(log % 2 == 0, 1, -1).astype(np.int8)
        out[0] = 0
        return out

    # -- construction helpers ------------------------------------------

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldError("element of a different field")
            return value
        if isinstance(value, (tuple, list)):
            return FieldElement(self, self.from_digits(value))
        value = int(value)
        if self.prime:
            return FieldElement(self, value % self.char)
        if not 0 <= value < self.order:
            raise FieldError("element code out of range")
        return FieldElement(self, value)

    def extension(self, k: int, seed: int = 0) -> tuple["FiniteField", list[int]]:
        """The degree-``k`` extension and the embedding of codes into it."""
        big = field_make(self.char, self.degree * k, seed)
        if k == 1 and big == self:
            return big, list(range(self.order))
        if self.prime:
            return big, list(range(self.order))
        # image of x: a root of our modulus inside the subfield of ``big``
        m = self.modulus
        h = big.pow(big.primitive_element, (big.order - 1) // (self.order - 1))
        z = 1
        for _ in range(self.order - 1):
            if P.evaluate(big, m, z) == 0:
                break
            z = big.mul(z, h)
        else:
            raise AssertionError("modulus has no root in the extension")
        powers = [1]
        for _ in range(1, self.degree):
            powers.append(big.mul(powers[-1], z))
        emb = []
        for a in range(self.order):
            acc = 0
            for c, w in zip(self.digits(a), powers):
                if c:
                    acc = big.add(acc, big.mul(c, w))
            emb.append(acc)
        return big, emb


def _matpow_mod(M: np.ndarray, n: int, l: int) -> np.ndarray:
    R = np.eye(M.shape[0], dtype=np.int64)
    while n:
        if n & 1:
            R = (R @ M) % l
        n >>= 1
        if n:
            M = (M @ M) % l
    return R


class FieldElement:
    """Immutable element of a :class:`FiniteField`."""

    __slots__ = ("field", "code")

    def __init__(self, field: FiniteField, code: int):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "code", code)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _c(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("elements of different fields")
            return other.code
        if isinstance(other, int):
            return self.field(other).code
        return NotImplemented

    def _w(self, code: int) -> "FieldElement":
        return FieldElement(self.field, code)

    def __add__(self, other):
        return self._w(self.field.add(self.code, self._c(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._w(self.field.sub(self.code, self._c(other)))

    def __rsub__(self, other):
        return self._w(self.field.sub(self._c(other), self.code))

    def __neg__(self):
        return self._w(self.field.neg(self.code))

    def __mul__(self, other):
        return self._w(self.field.mul(self.code, self._c(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._w(self.field.mul(self.code, self.field.inv(self._c(other))))

    def __pow__(self, n: int):
        return self._w(self.field.pow(self.code, n))

    def inverse(self) -> "FieldElement":
        return self._w(self.field.inv(self.code))

    def frobenius(self) -> "FieldElement":
        return self ** self.field.char

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == self.field(other).code
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return f"{self.field.format_element(self.code)} in {self.field!r}"


def field_make(char: int, degree: int, seed: int = 0) -> FiniteField:
    """Build F_{char^degree} with a modulus found by a seeded search.

    The same ``(char, degree, seed)`` always yields the same modulus.
    """
    base = FiniteField(char, 1)
    if degree == 1:
        return base
    if degree < 1:
        raise FieldError("degree must be positive")
    rng = random.Random(f"ffiwasawa-modulus:{char}:{degree}:{seed}")
    while True:
        f = P.random_monic(base, degree, rng)
        if f[0] != 0 and P.is_irreducible(base, f):
            return FiniteField(char, degree, f)


def quadratic_character(a: FieldElement) -> int:
    """``a**((Q-1)/2)`` read as -1, 0 or +1."""
    return a.field.chi(a.code)
