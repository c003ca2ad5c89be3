"""Divisor class groups of ``y^2 = D(T)`` via Cantor's algorithm.

Reduced divisor classes are Mumford pairs ``(u, v)``: ``u`` monic with
``deg u <= g``, ``deg v < deg u`` and ``u | v^2 - D``.  With ``deg D`` odd
the single point at infinity is the base point and every class of degree
zero has exactly one such representative, so ``Cl(F)`` is the set of these
pairs under Cantor composition and reduction.

Internally a divisor is the bare tuple ``(u, v)`` of coefficient tuples;
:class:`MumfordDivisor` wraps one together with its curve for the public
operator API.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np
from sympy import ZZ, Matrix
from sympy.matrices.normalforms import smith_normal_form

from .algebra import poly as P
from .algebra.field import FiniteField
from .algebra.intpoly import p_valuation
from .function_field import QuadraticField

log = logging.getLogger(__name__)

Pair = tuple  # (u, v)
IDENTITY: Pair = ((1,), ())

DEFAULT_MAX_P_PART = 3**8
DEFAULT_RETRIES = 1000


class LargePPart(RuntimeError):
    """The p-part exceeds the configured exhaustive-closure bound."""


class InconsistentClassNumber(ArithmeticError):
    """An element's order does not divide the supplied class number."""


class Jacobian:
    """Group law on the divisor classes of one imaginary hyperelliptic curve."""

    def __init__(self, K: QuadraticField):
        self.K = K
        self.F = K.field
        self.f = K.disc
        self.g = K.genus

    def is_valid(self, a: Pair) -> bool:
        u, v = a
        if not u or u[-1] != 1 or len(u) - 1 > self.g or len(v) >= len(u):
            return False
        F = self.F
        return not P.mod(F, P.sub(F, P.mul(F, v, v), self.f), u)

    def neg(self, a: Pair) -> Pair:
        return a[0], P.neg(self.F, a[1])

    def add(self, a: Pair, b: Pair) -> Pair:
        F, f = self.F, self.f
        (u1, v1), (u2, v2) = a, b
        if len(u1) == 1:
            return b
        if len(u2) == 1:
            return a
        d1, e1, e2 = P.xgcd(F, u1, u2)
        if len(d1) == 1:
            # coprime supports: the common case
            u = P.mul(F, u1, u2)
            v = P.add(F, P.mul(F, P.mul(F, e1, u1), v2), P.mul(F, P.mul(F, e2, u2), v1))
            v = P.mod(F, v, u)
        else:
            d, c1, c2 = P.xgcd(F, d1, P.add(F, v1, v2))
            s1, s2, s3 = P.mul(F, c1, e1), P.mul(F, c1, e2), c2
            u = P.quo(F, P.mul(F, u1, u2), P.mul(F, d, d))
            num = P.add(
                F,
                P.add(F, P.mul(F, P.mul(F, s1, u1), v2), P.mul(F, P.mul(F, s2, u2), v1)),
                P.mul(F, s3, P.add(F, P.mul(F, v1, v2), f)),
            )
            v = P.mod(F, P.quo(F, num, d), u)
        return self.reduce(u, v)

    def reduce(self, u, v) -> Pair:
        F, f, g = self.F, self.f, self.g
        while len(u) - 1 > g:
            u = P.quo(F, P.sub(F, f, P.mul(F, v, v)), u)
            v = P.mod(F, P.neg(F, v), u)
        u = P.monic(F, u)
        return u, P.mod(F, v, u)

    def double(self, a: Pair) -> Pair:
        return self.add(a, a)

    def mul(self, n: int, a: Pair) -> Pair:
        if n < 0:
            n, a = -n, self.neg(a)
        result = IDENTITY
        while n:
            if n & 1:
                result = self.add(result, a)
            n >>= 1
            if n:
                a = self.add(a, a)
        return result

    def order_divides(self, a: Pair, n: int) -> bool:
        return self.mul(n, a) == IDENTITY

    # -- sampling ------------------------------------------------------

    def random_prime_divisor(self, rng: random.Random, retries: int = DEFAULT_RETRIES) -> Pair | None:
        """A random degree-``j`` prime (``1 <= j <= g``) lying on the curve, or None."""
        F, f, g = self.F, self.f, self.g
        for _ in range(retries):
            u = rng.choice(irreducibles(F, rng.randint(1, g)))
            a = P.mod(F, f, u)
            v = _sqrt_mod_irreducible(F, a, u, rng)
            if v is None:
                continue
            if rng.random() < 0.5:
                v = P.mod(F, P.neg(F, v), u)
            return u, v
        return None

    def random_element(self, rng: random.Random, retries: int = DEFAULT_RETRIES) -> Pair:
        if self.g == 0:
            return IDENTITY
        acc = IDENTITY
        for _ in range(self.g):
            pd = self.random_prime_divisor(rng, retries)
            if pd is None:
                log.warning("no prime divisor found after %d retries on %s", retries, self.K.key())
                continue
            acc = self.add(acc, pd)
        return acc

    # -- exhaustive enumeration ---------------------------------------

    def elements(self) -> Iterator[Pair]:
        """Every reduced Mumford pair, by brute force over ``(u, v)``."""
        F, f = self.F, self.f
        for j in range(self.g + 1):
            for lower in itertools.product(range(F.order), repeat=j):
                u = lower + (1,)
                fu = P.mod(F, f, u)
                for vc in itertools.product(range(F.order), repeat=j):
                    v = P.normalize(vc)
                    if P.mod(F, P.mul(F, v, v), u) == fu:
                        yield u, v


@lru_cache(maxsize=64)
def irreducibles(F: FiniteField, j: int) -> tuple:
    """All monic irreducible polynomials of degree ``j`` (for small ``q^j``)."""
    return tuple(
        lower + (1,)
        for lower in itertools.product(range(F.order), repeat=j)
        if P.is_irreducible(F, lower + (1,))
    )


def _sqrt_mod_irreducible(F: FiniteField, a, u, rng: random.Random):
    """Square root of ``a`` in ``F[T]/(u)`` (u irreducible), or None."""
    if not a:
        return ()
    Q = F.order ** (len(u) - 1)
    one = (1,)
    if P.powmod(F, a, (Q - 1) // 2, u) != one:
        return None
    s, t = 0, Q - 1
    while t % 2 == 0:
        s, t = s + 1, t // 2
    while True:
        z = P.normalize([rng.randrange(F.order) for _ in range(len(u) - 1)])
        if z and P.powmod(F, z, (Q - 1) // 2, u) != one:
            break
    mulm = lambda x, y: P.mod(F, P.mul(F, x, y), u)  # noqa: E731
    m, c = s, P.powmod(F, z, t, u)
    x, b = P.powmod(F, a, (t + 1) // 2, u), P.powmod(F, a, t, u)
    while b != one:
        i, b2 = 0, b
        while b2 != one:
            b2, i = mulm(b2, b2), i + 1
        w = P.powmod(F, c, 1 << (m - i - 1), u)
        x, c = mulm(x, w), mulm(w, w)
        b, m = mulm(b, c), i
    return x


@dataclass(frozen=True)
class MumfordDivisor:
    """A reduced divisor class ``(u, v)`` on a given curve."""

    curve: QuadraticField
    u: tuple[int, ...]
    v: tuple[int, ...]

    def __post_init__(self):
        if not Jacobian(self.curve).is_valid((self.u, self.v)):
            raise ValueError(f"({self.u}, {self.v}) is not a reduced Mumford pair")

    @classmethod
    def identity(cls, K: QuadraticField) -> "MumfordDivisor":
        return cls(K, *IDENTITY)

    @property
    def pair(self) -> Pair:
        return self.u, self.v

    def _same(self, other: "MumfordDivisor") -> None:
        if other.curve != self.curve:
            raise ValueError("divisors on different curves")

    def __add__(self, other: "MumfordDivisor") -> "MumfordDivisor":
        return cantor_add(self, other)

    def __neg__(self) -> "MumfordDivisor":
        return MumfordDivisor(self.curve, *Jacobian(self.curve).neg(self.pair))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, n: int) -> "MumfordDivisor":
        return scalar_mul(n, self)

    def is_identity(self) -> bool:
        return self.pair == IDENTITY


def cantor_add(x: MumfordDivisor, y: MumfordDivisor) -> MumfordDivisor:
    x._same(y)
    return MumfordDivisor(x.curve, *Jacobian(x.curve).add(x.pair, y.pair))


def scalar_mul(n: int, x: MumfordDivisor) -> MumfordDivisor:
    return MumfordDivisor(x.curve, *Jacobian(x.curve).mul(n, x.pair))


def random_divisor(K: QuadraticField, rng_seed: int, retries: int = DEFAULT_RETRIES) -> MumfordDivisor:
    rng = random.Random(f"ffiwasawa-divisor:{K.key()}:{rng_seed}")
    return MumfordDivisor(K, *Jacobian(K).random_element(rng, retries))


# -- abelian p-groups ------------------------------------------------------


@dataclass(frozen=True)
class AbelianPGroup:
    """``Z/p^{a_1} + ... + Z/p^{a_r}`` with ``a_1 >= ... >= a_r >= 1``."""

    p: int
    factors: tuple[int, ...] = ()

    def __post_init__(self):
        fs = self.factors
        if any(a < 1 for a in fs) or any(x < y for x, y in zip(fs, fs[1:])):
            raise ValueError(f"invariant factors must be >= 1 and weakly decreasing: {fs}")

    @property
    def order(self) -> int:
        return self.p ** sum(self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    def __str__(self):
        if not self.factors:
            return "1"
        return " x ".join(f"{self.p}^{a}" for a in self.factors)

    @classmethod
    def parse(cls, p: int, text: str) -> "AbelianPGroup":
        text = text.strip()
        if text == "1":
            return cls(p)
        factors = []
        for part in text.split("x"):
            base, exp = part.strip().split("^")
            if int(base) != p:
                raise ValueError(f"factor {part!r} is not a power of {p}")
            factors.append(int(exp))
        return cls(p, tuple(factors))

    @classmethod
    def from_torsion_sizes(cls, p: int, sizes: list[int]) -> "AbelianPGroup":
        """Invariant factors from ``n_k = log_p |A[p^k]|`` for ``k = 0, 1, ...``."""
        # number of factors with a_i >= k is n_k - n_{k-1}
        ge = [sizes[k] - sizes[k - 1] for k in range(1, len(sizes))]
        factors = []
        for k in range(len(ge), 0, -1):
            more = ge[k] if k < len(ge) else 0
            factors += [k] * (ge[k - 1] - more)
        return cls(p, tuple(factors))


def p_rank(A: AbelianPGroup) -> int:
    return A.rank


def _extend(J: Jacobian, H: dict, x: Pair, relations: list) -> dict:
    """Adjoin ``x`` to the subgroup ``H`` (element -> coordinates on generators).

    Records the relation ``k*x = h`` (``k`` minimal, ``h`` in ``H``) as a
    row of the relation matrix.
    """
    if x in H:
        return H
    s = len(relations)
    multiples = [IDENTITY]
    y = x
    while y not in H:
        multiples.append(y)
        y = J.add(y, x)
    k = len(multiples)
    relations.append(tuple(-c for c in H[y]) + (0,) * (s - len(H[y])) + (k,))
    out = {}
    for a, ca in H.items():
        ca = ca + (0,) * (s - len(ca))
        for j, b in enumerate(multiples):
            out[J.add(a, b)] = ca + (j,)
    return out


def _invariant_factors(p: int, relations: list) -> AbelianPGroup:
    s = len(relations)
    if s == 0:
        return AbelianPGroup(p)
    M = Matrix([list(r) + [0] * (s - len(r)) for r in relations])
    D = smith_normal_form(M, domain=ZZ)
    diag = sorted((abs(int(D[i, i])) for i in range(s)), reverse=True)
    return AbelianPGroup(p, tuple(p_valuation(x, p) for x in diag if x > 1))


def group_structure(J: Jacobian, H: Iterable[Pair], p: int) -> AbelianPGroup:
    """Invariant factors of a finite p-group given as the full set of its elements.

    Counts ``|A[p^k]|`` directly, independent of how ``H`` was generated.
    """
    H = set(H)
    pmap = {x: J.mul(p, x) for x in H}
    sizes = [0]
    current = {IDENTITY}
    while len(current) < len(H):
        # A[p^{k+1}] = { x : p x in A[p^k] }
        current = {x for x in H if pmap[x] in current}
        n = p_valuation(len(current), p)
        if p**n != len(current):
            raise ArithmeticError("torsion subgroup size is not a power of p")
        sizes.append(n)
    return AbelianPGroup.from_torsion_sizes(p, sizes)


def sylow_p_structure(
    K: QuadraticField,
    p: int,
    h: int,
    seed: int = 0,
    max_p_part: int = DEFAULT_MAX_P_PART,
    retries: int = DEFAULT_RETRIES,
) -> AbelianPGroup:
    """Invariant factors of the p-Sylow subgroup of ``Cl(F)`` given ``h = #Cl(F)``."""
    e = p_valuation(h, p)
    if e == 0:
        return AbelianPGroup(p)
    target = p**e
    if target > max_p_part:
        raise LargePPart(f"p-part {p}^{e} exceeds bound {max_p_part}")
    m = h // target
    J = Jacobian(K)
    rng = random.Random(f"ffiwasawa-sylow:{K.key()}:{p}:{seed}")
    H = {IDENTITY: ()}
    relations: list = []
    draws = 0
    while len(H) < target:
        draws += 1
        if draws > retries:
            raise InconsistentClassNumber(f"Sylow subgroup stuck at {len(H)} < {target} for {K.key()}")
        # classes of primes of degree <= g generate Cl(F), so their images under
        # multiplication by m generate the p-Sylow subgroup
        prime = J.random_prime_divisor(rng, retries)
        if prime is None:
            raise InconsistentClassNumber(f"no prime divisors found on {K.key()}")
        x = J.mul(m, prime)
        if J.mul(target, x) != IDENTITY:
            raise InconsistentClassNumber(f"element order does not divide h = {h} on {K.key()}")
        H = _extend(J, H, x, relations)
        if len(H) > target:
            raise InconsistentClassNumber(f"p-subgroup larger than p^{e} on {K.key()}")
    return _invariant_factors(p, relations)


# -- exhaustive class counts for whole families ---------------------------


def _poly_index(F: FiniteField, coeffs, j: int) -> int:
    acc = 0
    for c in reversed(tuple(coeffs) + (0,) * (j - len(coeffs))):
        acc = acc * F.order + c
    return acc


def count_divisor_classes_batch(F: FiniteField, g: int, discs: np.ndarray) -> np.ndarray:
    """``#{(u, v)}`` reduced Mumford pairs for each curve, by exhaustive enumeration.

    The ``v`` side is enumerated once per ``u`` (tabulating how many ``v``
    give each residue ``v^2 mod u``); the ``D mod u`` side is an F_l-linear
    map applied to the whole batch.
    """
    discs = np.atleast_2d(np.asarray(discs, dtype=np.int64))
    N, m = discs.shape
    d, l, q = F.degree, F.char, F.order
    ddig = np.empty((N, m, d), dtype=np.int64)
    rest = discs
    for k in range(d):
        rest, ddig[:, :, k] = np.divmod(rest, l)
    ddig = ddig.reshape(N, m * d)
    total = np.zeros(N, dtype=np.int64)
    for j in range(g + 1):
        wts = np.array([q**i * l**k for i in range(j) for k in range(d)], dtype=np.int64)
        for lower in itertools.product(range(q), repeat=j):
            u = lower + (1,)
            hist = np.zeros(q**j, dtype=np.int64)
            for vc in itertools.product(range(q), repeat=j):
                v = P.normalize(vc)
                hist[_poly_index(F, P.mod(F, P.mul(F, v, v), u), j)] += 1
            if j == 0:
                total += hist[0]
                continue
            cols = []
            for i in range(m):
                for k in range(d):
                    unit = [0] * (i + 1)
                    unit[i] = l**k
                    r = P.mod(F, P.normalize(unit), u)
                    r = r + (0,) * (j - len(r))
                    cols.append([dig for c in r for dig in F.digits(c)])
            R = np.array(cols, dtype=np.int64).T
            res = (ddig @ R.T) % l
            total += hist[res @ wts]
    return total
