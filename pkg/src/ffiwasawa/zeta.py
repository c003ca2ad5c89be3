"""Zeta numerators of imaginary hyperelliptic curves by point counting.

For ``y^2 = D(T)`` of genus ``g`` over ``F_q`` the L-polynomial is
``P(T) = prod (1 - alpha_i T)`` over the ``2g`` Frobenius eigenvalues, and
``N_k = q^k + 1 - sum alpha_i^k``.  Counting ``N_1..N_g`` pins down ``P``
through Newton's identities and the functional equation.

Class numbers of the constant extensions come from the Frobenius
characteristic polynomial ``c(x) = x^{2g} P(1/x)`` as
``h_m = |Res(c(x), x^m - 1)|``, all over exact integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Sequence

import numpy as np

from .algebra.field import FiniteField
from .algebra.intpoly import int_resultant, x_pow_mod_monic
from .function_field import QuadraticField

DEFAULT_MAX_COUNT = 10**7

# Elements per intermediate array in the batched counter.
_CHUNK_ELEMS = 1 << 22
# Basis tensors are kept for extension fields up to this order.
_BASIS_CACHE_MAX = 5**5


class CapExceeded(RuntimeError):
    """A computation would exceed a configured resource cap."""


@dataclass(frozen=True)
class LPolynomial:
    """Integer coefficients ``b_0..b_{2g}`` of ``P(T)``, constant first."""

    coeffs: tuple[int, ...]
    genus: int
    q: int

    def __post_init__(self):
        b, g, q = self.coeffs, self.genus, self.q
        if len(b) != 2 * g + 1 or b[0] != 1:
            raise ValueError(f"malformed L-polynomial {b} for genus {g}")
        for i in range(g + 1):
            if b[2 * g - i] != q ** (g - i) * b[i]:
                raise ValueError(f"functional equation fails at i={i}: {b}")
        if sum(b) <= 0:
            raise ValueError(f"P(1) = {sum(b)} is not positive")

    def __call__(self, t: int) -> int:
        return sum(c * t**i for i, c in enumerate(self.coeffs))

    def charpoly(self) -> tuple[int, ...]:
        """``x^{2g} P(1/x)``, monic, constant first."""
        return tuple(reversed(self.coeffs))

    def to_json(self) -> str:
        return json.dumps([str(c) for c in self.coeffs])

    @classmethod
    def from_json(cls, text: str, q: int) -> "LPolynomial":
        b = tuple(int(c) for c in json.loads(text))
        return cls(b, (len(b) - 1) // 2, q)

    def __str__(self):
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if not c:
                continue
            mag = "" if abs(c) == 1 and i else str(abs(c))
            mono = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
            sign = "-" if c < 0 else "+"
            terms.append((sign, mag + mono))
        if not terms:
            return "0"
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return " ".join([head] + [f"{s} {t}" for s, t in terms[1:]])


def weil_bound_ok(n_k: int, q: int, k: int, g: int) -> bool:
    """``|N_k - q^k - 1| <= 2g q^{k/2}``, tested exactly via squares."""
    dev = abs(n_k - q**k - 1)
    # dev <= 2g sqrt(q^k)  <=>  dev^2 <= 4 g^2 q^k
    return dev * dev <= 4 * g * g * q**k


# -- point counting --------------------------------------------------------


@lru_cache(maxsize=32)
def _extension(F: FiniteField, k: int):
    big, emb = F.extension(k)
    return big, np.asarray(emb, dtype=np.int64)


def _value_codes(F: FiniteField, k: int, n: int, s: np.ndarray) -> np.ndarray:
    """Codes of ``w_j * t^i`` for ``t = g^s``; shape ``((n+1)*d, len(s))``."""
    big, emb = _extension(F, k)
    exp, log = big.np_tables
    Qm1 = big.order - 1
    d, l = F.degree, F.char
    rows = []
    for i in range(n + 1):
        for j in range(d):
            lw = log[emb[l**j]]
            rows.append(exp[(lw + i * s) % Qm1])
    return np.stack(rows)


def _digit_tensor(big: FiniteField, codes: np.ndarray) -> np.ndarray:
    """Codes ``(m, T)`` -> digits ``(m, T*dk)`` as float64."""
    m, T = codes.shape
    dk, l = big.degree, big.char
    out = np.empty((m, T, dk), dtype=np.float64)
    rest = codes
    for j in range(dk):
        rest, out[:, :, j] = np.divmod(rest, l)
    return out.reshape(m, T * dk)


@lru_cache(maxsize=16)
def _basis_tensor(F: FiniteField, k: int, n: int) -> np.ndarray:
    big, _ = _extension(F, k)
    s = np.arange(big.order - 1, dtype=np.int64)
    return _digit_tensor(big, _value_codes(F, k, n, s))


def _disc_digits(F: FiniteField, discs: np.ndarray) -> np.ndarray:
    N, m = discs.shape
    d, l = F.degree, F.char
    out = np.empty((N, m, d), dtype=np.float64)
    rest = discs
    for j in range(d):
        rest, out[:, :, j] = np.divmod(rest, l)
    return out.reshape(N, m * d)


def count_points_batch(F: FiniteField, discs: np.ndarray, k: int, cap: int = DEFAULT_MAX_COUNT) -> np.ndarray:
    """``N_k`` for many curves ``y^2 = D(T)`` of one common degree.

    ``discs`` holds coefficient codes, shape ``(N, deg+1)``, constant first.
    Returns an int64 array of projective point counts over ``F_{q^k}``,
    including the single point at infinity.
    """
    discs = np.atleast_2d(np.asarray(discs, dtype=np.int64))
    N, m = discs.shape
    n = m - 1
    Q = F.order**k
    if Q > cap:
        raise CapExceeded(f"q^k = {Q} exceeds max_count_degree {cap}")
    big, emb = _extension(F, k)
    chi = big.chi_table
    dk, l = big.degree, big.char
    weights = (l ** np.arange(dk, dtype=np.int64)).astype(np.float64)
    coef = _disc_digits(F, discs)
    # t = 0 contributes chi(D(0))
    total = chi[emb[discs[:, 0]]].astype(np.int64)
    cached = Q <= _BASIS_CACHE_MAX
    per_t = dk * N
    t_chunk = max(1, min(Q - 1, _CHUNK_ELEMS // max(per_t, 1)))
    n_chunk = max(1, min(N, _CHUNK_ELEMS // (dk * t_chunk)))
    for t0 in range(0, Q - 1, t_chunk):
        t1 = min(Q - 1, t0 + t_chunk)
        if cached:
            V = _basis_tensor(F, k, n)[:, t0 * dk : t1 * dk]
        else:
            s = np.arange(t0, t1, dtype=np.int64)
            V = _digit_tensor(big, _value_codes(F, k, n, s))
        for r0 in range(0, N, n_chunk):
            r1 = min(N, r0 + n_chunk)
            X = coef[r0:r1] @ V
            X = np.fmod(X, l).reshape(r1 - r0, t1 - t0, dk)
            codes = (X @ weights).astype(np.int64)
            total[r0:r1] += chi[codes].sum(axis=1, dtype=np.int64)
    return 1 + Q + total


def count_points(K: QuadraticField, k: int, cap: int = DEFAULT_MAX_COUNT) -> int:
    """Number of ``F_{q^k}``-points on the smooth model of ``y^2 = D(T)``."""
    if k < 1:
        raise ValueError("k must be positive")
    return int(count_points_batch(K.field, np.array([K.disc]), k, cap)[0])


# -- L-polynomials ---------------------------------------------------------


def l_polynomial_from_counts(counts: Sequence[int], q: int, g: int) -> LPolynomial:
    """Newton's identities on ``S_k = q^k + 1 - N_k`` (power sums of the alpha_i)."""
    if len(counts) < g:
        raise ValueError("need N_1..N_g")
    S = [0] + [q**k + 1 - int(counts[k - 1]) for k in range(1, g + 1)]
    e = [1]
    for k in range(1, g + 1):
        acc = sum((-1) ** (j - 1) * e[k - j] * S[j] for j in range(1, k + 1))
        if acc % k:
            raise ArithmeticError("point counts are not those of a curve")
        e.append(acc // k)
    b = [(-1) ** i * e[i] for i in range(g + 1)]
    b += [q ** (g - i) * b[i] for i in range(g - 1, -1, -1)]
    return LPolynomial(tuple(b), g, q)


def l_polynomial(K: QuadraticField, cap: int = DEFAULT_MAX_COUNT) -> LPolynomial:
    g = K.genus
    counts = [count_points(K, k, cap) for k in range(1, g + 1)]
    return l_polynomial_from_counts(counts, K.q, g)


def l_polynomials_batch(
    F: FiniteField, discs: np.ndarray, cap: int = DEFAULT_MAX_COUNT
) -> tuple[list[LPolynomial], np.ndarray]:
    """L-polynomials of many same-degree curves plus their ``N_1..N_g`` counts."""
    discs = np.atleast_2d(np.asarray(discs, dtype=np.int64))
    N, m = discs.shape
    g = (m - 2) // 2
    q = F.order
    counts = np.empty((N, g), dtype=np.int64)
    for k in range(1, g + 1):
        counts[:, k - 1] = count_points_batch(F, discs, k, cap)
    return [l_polynomial_from_counts(row, q, g) for row in counts.tolist()], counts


# -- class numbers ---------------------------------------------------------


def class_number(L: LPolynomial) -> int:
    """``h = P(1)``."""
    return sum(L.coeffs)


def class_number_ext(L: LPolynomial, m: int) -> int:
    """Class number of the constant extension of degree ``m``.

    ``Res(c, x^m - 1)`` depends on ``x^m - 1`` only modulo the monic ``c``,
    so the second argument is reduced first; its degree stays below ``2g``.
    """
    if m < 1:
        raise ValueError("m must be positive")
    c = L.charpoly()
    if len(c) == 1:
        return 1
    r = list(x_pow_mod_monic(m, c)) or [0]
    r[0] -= 1
    while r and r[-1] == 0:
        r.pop()
    if not r:
        return 0
    return abs(int_resultant(c, r))


def frobenius_bound(q: int, g: int, k: int) -> int:
    """Integer ``floor(2g q^{k/2})``."""
    return isqrt(4 * g * g * q**k)
