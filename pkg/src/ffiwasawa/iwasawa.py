"""Growth of p-class groups along the constant Z_p-tower.

``F_n`` is ``F`` with constants extended to ``F_{q^{p^n}}``, so its class
number is ``h_{p^n}`` of the base L-polynomial and ``e_n = v_p(h_{p^n})``.
Because the mu-invariant of a constant tower vanishes, the increments
``e_{n+1} - e_n`` are eventually constant; that constant is lambda and
``nu = e_n - lambda*n`` on the stable range.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .algebra.intpoly import p_valuation
from .function_field import QuadraticField
from .zeta import (
    DEFAULT_MAX_COUNT,
    CapExceeded,
    LPolynomial,
    class_number,
    class_number_ext,
    count_points,
    l_polynomial_from_counts,
)

DEFAULT_N_MAX = 4
DEFAULT_MAX_RESULTANT_DEGREE = 3**8


class UnstableError(ValueError):
    pass


@dataclass(frozen=True)
class ESequence:
    """``(e_0, ..., e_N)``; ``truncated`` marks a stop forced by the degree cap."""

    values: tuple[int, ...]
    truncated: bool = False

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


@lru_cache(maxsize=1 << 16)
def _e_value(coeffs: tuple[int, ...], q: int, p: int, n: int) -> int:
    L = LPolynomial(coeffs, (len(coeffs) - 1) // 2, q)
    return p_valuation(class_number_ext(L, p**n), p)


def e_sequence(
    L: LPolynomial, p: int, n_max: int = DEFAULT_N_MAX, max_resultant_degree: int = DEFAULT_MAX_RESULTANT_DEGREE
) -> ESequence:
    """``e_n = v_p(h_{p^n})`` for ``n = 0..n_max``, exactly."""
    if p % 2 == 0:
        raise ValueError("p must be odd")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    values = []
    for n in range(n_max + 1):
        if p**n > max_resultant_degree:
            return ESequence(tuple(values), truncated=True)
        values.append(_e_value(L.coeffs, L.q, p, n))
    return ESequence(tuple(values))


def extract_lambda_nu(e_seq, g: int) -> tuple[int, int, int] | None:
    """``(lambda, nu, n_0)`` from a stable tail, or None when no tail is stable.

    ``n_0`` is the smallest index from which every increment up to the end
    equals the last one, provided that run holds at least two increments.
    """
    e = tuple(e_seq.values if isinstance(e_seq, ESequence) else e_seq)
    if len(e) < 3:
        raise ValueError("need at least three terms to see two increments")
    inc = [b - a for a, b in zip(e, e[1:])]
    lam = inc[-1]
    n0 = len(inc) - 1
    while n0 > 0 and inc[n0 - 1] == lam:
        n0 -= 1
    if len(inc) - n0 < 2:
        return None
    if lam > 2 * g:
        raise ArithmeticError(f"lambda = {lam} exceeds 2g = {2 * g}: Frobenius has only 2g eigenvalues")
    if lam < 0:
        raise ArithmeticError(f"decreasing e-sequence {e}")
    return lam, e[n0] - lam * n0, n0


def lambda_from_charpoly(L: LPolynomial, p: int) -> int:
    """Multiplicity of ``x = 1`` as a root of ``c(x) mod p``.

    Only Frobenius eigenvalues congruent to 1 modulo a prime above p gain
    valuation along the tower, one unit per layer once stable; this counts
    them without touching any class number.
    """
    c = [x % p for x in L.charpoly()]
    mult = 0
    while len(c) > 1:
        # synthetic division by (x - 1)
        rem, out = 0, []
        for a in reversed(c):
            rem = (rem + a) % p
            out.append(rem)
        if out[-1] != 0:
            break
        c = list(reversed(out[:-1]))
        mult += 1
    return mult


@dataclass(frozen=True)
class IwasawaData:
    p: int
    genus: int
    e_sequence: tuple[int, ...]
    lam: int | None
    nu: int | None
    n0: int | None
    truncated: bool = False
    flags: dict = field(default_factory=dict, compare=False)

    @property
    def stable(self) -> bool:
        return self.lam is not None

    def residuals(self) -> list[int]:
        """``e_n - (lambda*n + nu)`` for ``n >= n_0``."""
        if not self.stable:
            return []
        return [self.e_sequence[n] - (self.lam * n + self.nu) for n in range(self.n0, len(self.e_sequence))]

    def to_record(self) -> dict:
        return {
            "p": self.p,
            "e_sequence": list(self.e_sequence),
            "lambda": self.lam,
            "nu": self.nu,
            "n_0": self.n0,
            "truncated": self.truncated,
            "flags": dict(sorted(self.flags.items())),
        }


def mu_zero_consistent(e: tuple[int, ...], g: int) -> bool:
    """Every increment lies in ``[0, 2g]``: no p^n-scale jumps."""
    return all(0 <= b - a <= 2 * g for a, b in zip(e, e[1:]))


def iwasawa_data(
    L: LPolynomial,
    p: int,
    n_max: int = DEFAULT_N_MAX,
    max_resultant_degree: int = DEFAULT_MAX_RESULTANT_DEGREE,
    p_rank: int | None = None,
) -> IwasawaData:
    """e-sequence and extracted invariants, extending ``n_max`` until stable or capped."""
    g = L.genus
    n = n_max
    while True:
        seq = e_sequence(L, p, n, max_resultant_degree)
        e = seq.values
        res = extract_lambda_nu(e, g) if len(e) >= 3 else None
        if res is not None or seq.truncated:
            break
        n += 1
    flags = {"mu_zero_consistent": mu_zero_consistent(e, g)}
    if res is None:
        lam = nu = n0 = None
    else:
        lam, nu, n0 = res
        if p_rank is not None:
            flags["lambda_ge_prank"] = check_lambda_ge_prank(lam, p_rank)
    return IwasawaData(p, g, e, lam, nu, n0, truncated=res is None, flags=flags)


def check_lambda_ge_prank(iw, r: int, strict: bool = False) -> bool:
    """``lambda >= r``; with ``strict`` a violation raises instead of returning False."""
    lam = iw.lam if isinstance(iw, IwasawaData) else iw
    ok = lam >= r
    if strict and not ok:
        raise AssertionError(f"lambda = {lam} < p-rank = {r}")
    return ok


def control_consistency(
    K: QuadraticField, L: LPolynomial, p: int, cap: int = DEFAULT_MAX_COUNT
) -> bool | None:
    """Compare ``p^{e_1}`` from the resultant with a fresh count over ``F_{q^p}``.

    Returns None when the recount would exceed the point-count cap.
    """
    g = K.genus
    h1 = class_number_ext(L, p)
    if g == 0:
        return h1 == 1
    try:
        counts = [count_points(K, p * k, cap) for k in range(1, g + 1)]
    except CapExceeded:
        return None
    L1 = l_polynomial_from_counts(counts, K.q**p, g)
    h_fresh = class_number(L1)
    return p_valuation(h1, p) == p_valuation(h_fresh, p) and h1 == h_fresh
