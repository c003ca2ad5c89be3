"""Exact integer polynomials: resultants and p-adic valuations.

Integer polynomials are lists or tuples of Python ints in constant-first
order.  Nothing here touches floating point.
"""

from __future__ import annotations

from functools import reduce
from math import gcd, isqrt
from typing import Sequence

from sympy import prevprime

IntPoly = tuple


def inormalize(a: Sequence[int]) -> IntPoly:
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return tuple(a[:n])


def _content(a: IntPoly) -> int:
    return reduce(gcd, a, 0)


def _prem(a: IntPoly, b: IntPoly) -> IntPoly:
    """Pseudo-remainder of ``lc(b)**(deg a - deg b + 1) * a`` by ``b``."""
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    e = len(a) - len(b) + 1
    while len(r) - 1 >= db and r:
        c = r[-1]
        shift = len(r) - 1 - db
        r = [x * lb for x in r]
        for j in range(db + 1):
            r[shift + j] -= c * b[j]
        r = list(inormalize(r))
        e -= 1
    if e > 0:
        r = [x * lb**e for x in r]
    return inormalize(r)


def int_resultant(f: Sequence[int], g: Sequence[int]) -> int:
    """Exact ``Res(f, g)`` by the subresultant PRS."""
    A, B = inormalize(f), inormalize(g)
    if not A or not B:
        raise ValueError("resultant of the zero polynomial")
    da, db = len(A) - 1, len(B) - 1
    if da == 0:
        return A[0] ** db
    if db == 0:
        return B[0] ** da
    s = 1
    if da < db:
        A, B = B, A
        da, db = db, da
        if da * db % 2:
            s = -1
    a, b = _content(A), _content(B)
    A = tuple(x // a for x in A)
    B = tuple(x // b for x in B)
    t = a**db * b**da
    g_, h = 1, 1
    while True:
        da, db = len(A) - 1, len(B) - 1
        delta = da - db
        if da % 2 and db % 2:
            s = -s
        R = _prem(A, B)
        if not R:
            return 0
        A = B
        div = g_ * h**delta
        B = tuple(x // div for x in R)
        g_ = A[-1]
        h = g_**delta // h ** (delta - 1) if delta >= 1 else h
        if len(B) == 1:
            da = len(A) - 1
            h = B[0] ** da // h ** (da - 1)
            return s * t * h


def _mod_resultant(f: IntPoly, g: IntPoly, p: int) -> int:
    a = [x % p for x in f]
    b = [x % p for x in g]
    a, b = list(inormalize(a)), list(inormalize(b))
    m, n = len(f) - 1, len(g) - 1
    if len(a) - 1 < m or len(b) - 1 < n:
        raise ArithmeticError("leading coefficient vanishes mod p")
    res = 1
    while True:
        m, n = len(a) - 1, len(b) - 1
        if n == 0:
            return res * pow(b[0], m, p) % p
        # Res(a, b) = (-1)^{mn} Res(b, a) = (-1)^{mn} lc(b)^{m - deg r} Res(b, r)
        inv = pow(b[-1], -1, p)
        r = a[:]
        for k in range(m, n - 1, -1):
            c = r[k] * inv % p
            if c:
                for j in range(n + 1):
                    r[k - n + j] = (r[k - n + j] - c * b[j]) % p
        r = list(inormalize(r[:n]))
        if not r:
            return 0
        if m * n % 2:
            res = -res
        res = res * pow(b[-1], m - (len(r) - 1), p) % p
        a, b = b, r


def hadamard_bound(f: Sequence[int], g: Sequence[int]) -> int:
    """Upper bound on ``|Res(f, g)|`` from the Sylvester matrix rows."""
    m, n = len(f) - 1, len(g) - 1
    nf = isqrt(sum(x * x for x in f)) + 1
    ng = isqrt(sum(x * x for x in g)) + 1
    return nf**n * ng**m


def int_resultant_modular(f: Sequence[int], g: Sequence[int]) -> int:
    """``Res(f, g)`` by CRT over 61-bit primes, sized by the Hadamard bound.

    An evaluation route independent of :func:`int_resultant`.
    """
    A, B = inormalize(f), inormalize(g)
    if not A or not B:
        raise ValueError("resultant of the zero polynomial")
    bound = 2 * hadamard_bound(A, B) + 1
    residue, modulus, p = 0, 1, 2**61
    while modulus < bound:
        p = prevprime(p)
        try:
            r = _mod_resultant(A, B, p)
        except ArithmeticError:
            continue
        # incremental CRT
        k = (r - residue) * pow(modulus, -1, p) % p
        residue += modulus * k
        modulus *= p
    if residue > modulus // 2:
        residue -= modulus
    return residue


def int_mul(a: IntPoly, b: IntPoly) -> IntPoly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return inormalize(out)


def int_mod_monic(a: IntPoly, m: IntPoly) -> IntPoly:
    """Remainder of ``a`` modulo the monic polynomial ``m``."""
    n = len(m) - 1
    r = list(a)
    for k in range(len(r) - 1, n - 1, -1):
        c = r[k]
        if c:
            for j in range(n):
                r[k - n + j] -= c * m[j]
        r[k] = 0
    return inormalize(r[:n])


def x_pow_mod_monic(e: int, m: IntPoly) -> IntPoly:
    """``x**e mod m`` over Z for monic ``m``."""
    if len(m) == 1:
        return ()
    result: IntPoly = (1,)
    base = int_mod_monic((0, 1), m)
    while e:
        if e & 1:
            result = int_mod_monic(int_mul(result, base), m)
        e >>= 1
        if e:
            base = int_mod_monic(int_mul(base, base), m)
    return result


def p_valuation(n: int, p: int) -> int:
    """Largest ``e`` with ``p**e | n``."""
    if n == 0:
        raise ValueError("valuation of zero is infinite")
    n, e = abs(n), 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def int_eval(a: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def content(a: Sequence[int]) -> int:
    return _content(tuple(a))
