"""Discriminant sweeps, p-class group statistics and predicted densities.

A sweep walks every imaginary quadratic field with ``deg D <= max_deg`` in
canonical enumeration order.  Fields related by ``D -> s^2 D(at + b)``
define isomorphic curves, so the expensive work (L-polynomial, p-Sylow
structure, e-sequence) is done once per orbit and shared by its members.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator

import numpy as np

from . import __version__
from .algebra import poly as P
from .algebra.field import FiniteField
from .function_field import (
    QuadraticField,
    _check_max_deg,
    affine_action,
    block_coefficients,
    canonical_keys,
    discriminant_key,
    leading_classes,
)
from .iwasawa import DEFAULT_N_MAX, iwasawa_data
from .jacobian import DEFAULT_MAX_P_PART, AbelianPGroup, LargePPart, sylow_p_structure
from .zeta import DEFAULT_MAX_COUNT, LPolynomial, class_number, l_polynomial_from_counts, l_polynomials_batch, weil_bound_ok

log = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_LARGE = "skipped-large-p-part"
STATUS_TRUNCATED = "truncated"
DEFAULT_RANKS = (1, 2, 3, 4)
DENSITY_TOLERANCE = 1e-12

# rows of lower coefficients handled per numpy pass
_ROW_CHUNK = 1 << 17
# orbit representatives per L-polynomial batch
_REP_CHUNK = 1 << 14


# -- automorphism counts ---------------------------------------------------


def aut_order(A: AbelianPGroup) -> int:
    """``#Aut(A)`` by the closed-form product over the partition of A.

    With exponents ``e_1 <= ... <= e_k``, ``d_j = max{l : e_l = e_j}`` and
    ``c_j = min{l : e_l = e_j}``::

        prod_j (p^{d_j} - p^{j-1}) * p^{e_j (k - d_j)} * p^{(e_j - 1)(k - c_j + 1)}
    """
    p = A.p
    e = sorted(A.factors)
    k = len(e)
    out = 1
    for j in range(1, k + 1):
        ej = e[j - 1]
        d = max(i for i in range(1, k + 1) if e[i - 1] == ej)
        c = min(i for i in range(1, k + 1) if e[i - 1] == ej)
        out *= (p**d - p ** (j - 1)) * p ** (ej * (k - d)) * p ** ((ej - 1) * (k - c + 1))
    return out


def aut_order_bruteforce(A: AbelianPGroup, chunk: int = 1 << 18) -> int:
    """``#Aut(A)`` by enumerating every endomorphism matrix.

    Entry ``m_ji`` (image of generator ``i`` in component ``j``) runs over
    the multiples of ``p^max(0, a_j - a_i)`` modulo ``p^{a_j}``.  An
    endomorphism of a finite p-group is bijective iff it is injective on
    the socle ``A[p]``, whose induced F_p-matrix is tested for a nonzero
    determinant.
    """
    p, a = A.p, list(A.factors)
    r = len(a)
    if r == 0:
        return 1
    # socle entry for each choice of m_ji: t mod p where m_ji = t * step,
    # and zero when a_i > a_j (that image lands in p*A)
    choices = []
    for j in range(r):
        for i in range(r):
            step = p ** max(0, a[j] - a[i])
            n_choice = p ** a[j] // step
            t = np.arange(n_choice, dtype=np.int64)
            choices.append(np.zeros(n_choice, dtype=np.int64) if a[i] > a[j] else t % p)
    sizes = [len(c) for c in choices]
    total = math.prod(sizes)
    count = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        S = np.empty((len(idx), r * r), dtype=np.float64)
        rest = idx
        for pos in range(r * r - 1, -1, -1):
            rest, digit = np.divmod(rest, sizes[pos])
            S[:, pos] = choices[pos][digit]
        det = np.rint(np.linalg.det(S.reshape(-1, r, r))).astype(np.int64)
        count += int(np.count_nonzero(det % p))
    return count


def abelian_p_groups(p: int, max_exponent: int) -> Iterator[AbelianPGroup]:
    """Every abelian p-group of order ``p^k`` with ``k <= max_exponent``."""

    def partitions(n, largest):
        if n == 0:
            yield ()
            return
        for first in range(min(n, largest), 0, -1):
            for rest in partitions(n - first, first):
                yield (first,) + rest

    for k in range(max_exponent + 1):
        for part in partitions(k, k):
            yield AbelianPGroup(p, part)


# -- predicted densities ---------------------------------------------------


@dataclass(frozen=True)
class DensityPrediction:
    """``prod_{i<=terms} (1 - base^{-i}) / #Aut(A)`` with a bound on the dropped tail."""

    value: Fraction
    error: float
    terms: int
    flags: dict = field(default_factory=dict, compare=False)

    def __float__(self):
        return float(self.value)


def _truncated_product(base: int, tol: float) -> tuple[Fraction, float, int]:
    # 1 >= prod_{i>I}(1 - b^-i) >= 1 - b^-I/(b-1), so the tail costs at most b^-I/(b-1)
    terms = 1
    while Fraction(1, base**terms * (base - 1)) >= Fraction(tol):
        terms += 1
    prod = Fraction(1)
    for i in range(1, terms + 1):
        prod *= 1 - Fraction(1, base**i)
    return prod, float(Fraction(1, base**terms * (base - 1))), terms


def predicted_density(q: int, A: AbelianPGroup, tol: float = DENSITY_TOLERANCE) -> DensityPrediction:
    """Large-q limit ``prod_{i>=1}(1 - q^{-i}) / #Aut(A)`` for the p-part ``A``.

    Computed for any ``q >= 2``; ``q = 1 mod p`` lies outside the regime
    where the limit is proven and is flagged rather than refused.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    prod, err, terms = _truncated_product(q, tol)
    aut = aut_order(A)
    flags = {"q_equiv_1_mod_p": q % A.p == 1}
    return DensityPrediction(prod / aut, err / aut, terms, flags)


def cohen_lenstra_density(A: AbelianPGroup, tol: float = DENSITY_TOLERANCE) -> DensityPrediction:
    """Classical imaginary-quadratic heuristic ``prod_{i>=1}(1 - p^{-i}) / #Aut(A)``.

    Reported next to :func:`predicted_density` as a reference column.
    """
    prod, err, terms = _truncated_product(A.p, tol)
    aut = aut_order(A)
    return DensityPrediction(prod / aut, err / aut, terms)


# -- sweep records ---------------------------------------------------------


@dataclass(frozen=True)
class Caps:
    max_count_degree: int = DEFAULT_MAX_COUNT
    max_resultant_degree: int = 3**8
    max_p_part: int = DEFAULT_MAX_P_PART


@dataclass(frozen=True)
class SweepRecord:
    key: str
    genus: int
    h: str | None
    cl_p: str | None
    p_rank: int | None
    lam: int | None
    nu: int | None
    n0: int | None
    e_sequence: tuple[int, ...] | None
    flags: dict
    status: str

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "genus": self.genus,
            "h": self.h,
            "cl_p": self.cl_p,
            "p_rank": self.p_rank,
            "lambda": self.lam,
            "nu": self.nu,
            "n_0": self.n0,
            "e_sequence": None if self.e_sequence is None else list(self.e_sequence),
            "flags": dict(sorted(self.flags.items())),
            "status": self.status,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "SweepRecord":
        e = d.get("e_sequence")
        return cls(
            d["key"], d["genus"], d["h"], d["cl_p"], d["p_rank"], d["lambda"], d["nu"], d["n_0"],
            None if e is None else tuple(e), d.get("flags", {}), d["status"],
        )


@dataclass
class SweepStats:
    """Counters filled in while a sweep runs."""

    records: int = 0
    orbits: int = 0
    lpolys_computed: int = 0
    lpolys_cached: int = 0
    sylow_computed: int = 0
    weil_checks: int = 0
    weil_failures: int = 0
    functional_equation_failures: int = 0


@dataclass(frozen=True)
class _OrbitResult:
    genus: int
    h: str | None
    cl_p: str | None
    p_rank: int | None
    lam: int | None
    nu: int | None
    n0: int | None
    e_sequence: tuple[int, ...] | None
    flags: dict
    status: str


def _analyse_orbit(F: FiniteField, coeffs: tuple, L: LPolynomial, cl_cached: str | None,
                   p: int, caps: Caps, seed: int, n_max: int) -> tuple[_OrbitResult, str | None]:
    """Per-orbit work after the L-polynomial is known."""
    g = L.genus
    h = class_number(L)
    status = STATUS_OK
    if cl_cached is not None:
        A, fresh = AbelianPGroup.parse(p, cl_cached), None
    else:
        try:
            A = sylow_p_structure(QuadraticField(F, coeffs, g), p, h, seed=seed, max_p_part=caps.max_p_part)
            fresh = str(A)
        except LargePPart:
            A, fresh, status = None, None, STATUS_LARGE
    r = None if A is None else A.rank
    iw = iwasawa_data(L, p, n_max, caps.max_resultant_degree, p_rank=r)
    if not iw.stable and status == STATUS_OK:
        status = STATUS_TRUNCATED
    res = _OrbitResult(g, str(h), None if A is None else str(A), r, iw.lam, iw.nu, iw.n0,
                       iw.e_sequence, iw.flags, status)
    return res, fresh


def _analyse_chunk(args):
    F, items, p, caps, seed, n_max = args
    return [_analyse_orbit(F, c, L, cl, p, caps, seed, n_max) for c, L, cl in items]


def _capped_result(g: int) -> _OrbitResult:
    return _OrbitResult(g, None, None, None, None, None, None, None, {"count_cap_exceeded": True}, STATUS_TRUNCATED)


def _format_keys(F: FiniteField, n: int, lc: int, lower: np.ndarray) -> list[str]:
    prefix = f"q:{F.order};D:"
    if F.degree == 1:
        tail = f",{lc}"
        return [prefix + ",".join(map(str, row)) + tail for row in lower.tolist()]
    return [discriminant_key(F, tuple(row) + (lc,)) for row in lower.tolist()]


def iter_sweep(
    F: FiniteField,
    p: int,
    max_deg: int,
    caps: Caps = Caps(),
    seed: int = 0,
    n_max: int = DEFAULT_N_MAX,
    cache=None,
    workers: int = 1,
    stats: SweepStats | None = None,
    progress: Callable[[str], None] | None = None,
) -> Iterator[SweepRecord]:
    """Yield one :class:`SweepRecord` per field, in enumeration order."""
    _check_max_deg(max_deg)
    if p % 2 == 0 or p < 3:
        raise ValueError("p must be an odd prime")
    stats = stats if stats is not None else SweepStats()
    q = F.order
    lcs = leading_classes(F)
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for n in range(1, max_deg + 1, 2):
            g = (n - 1) // 2
            block = q**n
            keys = []
            for lc in lcs:
                action = affine_action(F, n, lc)
                parts = []
                for s in range(0, block, _ROW_CHUNK):
                    idx = np.arange(s, min(block, s + _ROW_CHUNK), dtype=np.int64)
                    parts.append(canonical_keys(F, action, block_coefficients(F, n, idx)))
                keys.append(np.concatenate(parts))
            reps = np.unique(np.concatenate(keys))
            rep_coeffs = []
            for rk in reps.tolist():
                cls, idx = divmod(rk, block)
                lower = block_coefficients(F, n, np.array([idx]))[0].tolist()
                coeffs = tuple(lower) + (lcs[cls],)
                if n == 1 or P.is_squarefree(F, coeffs):
                    rep_coeffs.append((rk, coeffs))
            stats.orbits += len(rep_coeffs)
            if progress:
                progress(f"degree {n}: {len(rep_coeffs)} orbits")
            results = _orbit_results(F, n, g, rep_coeffs, p, caps, seed, n_max, cache, pool, stats, progress)
            for cls, lc in enumerate(lcs):
                for s in range(0, block, _ROW_CHUNK):
                    e = min(block, s + _ROW_CHUNK)
                    rows = keys[cls][s:e].tolist()
                    mask = [rk in results for rk in rows]
                    if not any(mask):
                        continue
                    idx = np.arange(s, e, dtype=np.int64)[np.array(mask)]
                    names = _format_keys(F, n, lc, block_coefficients(F, n, idx))
                    for name, rk in zip(names, (r for r, m in zip(rows, mask) if m)):
                        res = results[rk]
                        stats.records += 1
                        yield SweepRecord(name, res.genus, res.h, res.cl_p, res.p_rank, res.lam, res.nu,
                                          res.n0, res.e_sequence, res.flags, res.status)
            if cache is not None:
                cache.flush()
    finally:
        if pool is not None:
            pool.shutdown()


def _orbit_results(F, n, g, rep_coeffs, p, caps, seed, n_max, cache, pool, stats, progress):
    q = F.order
    results: dict[int, _OrbitResult] = {}
    if g > 0 and q**g > caps.max_count_degree:
        for rk, _ in rep_coeffs:
            results[rk] = _capped_result(g)
        return results
    for start in range(0, len(rep_coeffs), _REP_CHUNK):
        chunk = rep_coeffs[start : start + _REP_CHUNK]
        names = [discriminant_key(F, c) for _, c in chunk]
        lpolys: list[LPolynomial | None] = [None] * len(chunk)
        if cache is not None:
            lpolys = [cache.lpoly(k, q) for k in names]
        todo = [i for i, L in enumerate(lpolys) if L is None]
        stats.lpolys_cached += len(chunk) - len(todo)
        if todo:
            if g == 0:
                fresh = [l_polynomial_from_counts([], q, 0)] * len(todo)
            else:
                discs = np.array([chunk[i][1] for i in todo], dtype=np.int64)
                fresh, counts = l_polynomials_batch(F, discs, caps.max_count_degree)
                for row in counts.tolist():
                    for k, nk in enumerate(row, 1):
                        stats.weil_checks += 1
                        stats.weil_failures += not weil_bound_ok(nk, q, k, g)
            for i, L in zip(todo, fresh):
                lpolys[i] = L
            stats.lpolys_computed += len(todo)
        for L in lpolys:
            b = L.coeffs
            if any(b[2 * g - i] != q ** (g - i) * b[i] for i in range(g + 1)):
                stats.functional_equation_failures += 1
        items = [
            (c, L, None if cache is None else cache.sylow(k, p))
            for (_, c), L, k in zip(chunk, lpolys, names)
        ]
        if pool is None:
            out = _analyse_chunk((F, items, p, caps, seed, n_max))
        else:
            step = max(1, len(items) // (4 * pool._max_workers))
            parts = [(F, items[i : i + step], p, caps, seed, n_max) for i in range(0, len(items), step)]
            out = [r for part in pool.map(_analyse_chunk, parts) for r in part]
        for (rk, c), name, L, (res, fresh_cl) in zip(chunk, names, lpolys, out):
            results[rk] = res
            if fresh_cl is not None:
                stats.sylow_computed += 1
            if cache is not None:
                cache.put(name, L, {p: res.cl_p} if res.cl_p is not None else None)
        if progress:
            progress(f"degree {n}: {min(start + _REP_CHUNK, len(rep_coeffs))}/{len(rep_coeffs)} orbits done")
    return results


def run_sweep(
    q: int | FiniteField,
    p: int,
    max_deg: int,
    caps: Caps = Caps(),
    seed: int = 0,
    **kwargs,
) -> list[SweepRecord]:
    """All records of a sweep as a list; see :func:`iter_sweep`."""
    F = q if isinstance(q, FiniteField) else _field_of_order(q)
    return list(iter_sweep(F, p, max_deg, caps, seed, **kwargs))


def _field_of_order(q: int) -> FiniteField:
    from sympy import factorint

    from .algebra.field import field_make

    fac = factorint(q)
    if len(fac) != 1:
        raise ValueError(f"{q} is not a prime power")
    ((l, d),) = fac.items()
    return field_make(l, d)


# -- density reports -------------------------------------------------------


@dataclass
class DensityReport:
    q: int
    p: int
    max_deg: int | None
    total: int
    ok: int
    skipped: int
    truncated: int
    groups: list[dict]
    ranks: list[dict]
    by_degree: list[dict]
    flags: dict
    config: dict = field(default_factory=dict)
    version: str = __version__

    def density(self, group: str) -> float:
        for row in self.groups:
            if row["group"] == group:
                return row["empirical"]
        return 0.0

    def lambda_density(self, r: int) -> float:
        for row in self.ranks:
            if row["r"] == r:
                return row["lambda_ge_r"]
        raise KeyError(r)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "label", "count", "empirical", "predicted", "predicted_error", "cohen_lenstra"])
        for row in self.groups:
            w.writerow(["group", row["group"], row["count"], _fmt(row["empirical"]), _fmt(row["predicted"]),
                        _fmt(row["predicted_error"]), _fmt(row["cohen_lenstra"])])
        for row in self.ranks:
            w.writerow(["p_rank_ge", row["r"], row["p_rank_ge_r_count"], _fmt(row["p_rank_ge_r"]), "", "", ""])
            w.writerow(["lambda_ge", row["r"], row["lambda_ge_r_count"], _fmt(row["lambda_ge_r"]), "", "", ""])
        w.writerow(["total", "", self.total, "", "", "", ""])
        w.writerow(["skipped", "", self.skipped + self.truncated, "", "", "", ""])
        return buf.getvalue()


def _fmt(x: float) -> str:
    return repr(float(x))


class DensityAccumulator:
    """Streaming reduction of sweep records into a :class:`DensityReport`."""

    def __init__(self, q: int, p: int, max_deg: int | None = None, ranks=DEFAULT_RANKS):
        self.q, self.p, self.max_deg, self.rank_list = q, p, max_deg, tuple(ranks)
        self.total = self.ok = self.skipped = self.truncated = 0
        self.group_counts: dict[str, int] = {}
        self.prank_ge = {r: 0 for r in self.rank_list}
        self.lam_ge = {r: 0 for r in self.rank_list}
        self.degree: dict[int, list[int]] = {}

    def add(self, rec: SweepRecord) -> None:
        self.total += 1
        deg = 2 * rec.genus + 1
        row = self.degree.setdefault(deg, [0, 0])
        row[0] += 1
        if rec.status == STATUS_LARGE:
            self.skipped += 1
        elif rec.status == STATUS_TRUNCATED:
            self.truncated += 1
        if rec.lam is not None:
            for r in self.rank_list:
                self.lam_ge[r] += rec.lam >= r
        if rec.p_rank is not None:
            for r in self.rank_list:
                self.prank_ge[r] += rec.p_rank >= r
        if rec.status != STATUS_OK:
            return
        self.ok += 1
        self.group_counts[rec.cl_p] = self.group_counts.get(rec.cl_p, 0) + 1
        if rec.cl_p == "1":
            row[1] += 1

    def report(self, config: dict | None = None) -> DensityReport:
        if self.total == 0:
            raise ValueError("empty record set")
        N = self.total
        labels = set(self.group_counts) | {"1"}

        def sort_key(label):
            A = AbelianPGroup.parse(self.p, label)
            return (A.order, A.factors)

        groups = []
        for label in sorted(labels, key=sort_key):
            A = AbelianPGroup.parse(self.p, label)
            pred = predicted_density(self.q, A)
            cl = cohen_lenstra_density(A)
            count = self.group_counts.get(label, 0)
            groups.append({
                "group": label,
                "count": count,
                "empirical": count / N,
                "predicted": float(pred.value),
                "predicted_error": pred.error,
                "cohen_lenstra": float(cl.value),
                "aut_order": aut_order(A),
            })
        ranks = [
            {
                "r": r,
                "p_rank_ge_r_count": self.prank_ge[r],
                "p_rank_ge_r": self.prank_ge[r] / N,
                "lambda_ge_r_count": self.lam_ge[r],
                "lambda_ge_r": self.lam_ge[r] / N,
                "lambda_ge_r_positive": self.lam_ge[r] > 0,
            }
            for r in self.rank_list
        ]
        by_degree = [
            {"degree": d, "fields": c[0], "trivial": c[1], "trivial_density": c[1] / c[0]}
            for d, c in sorted(self.degree.items())
        ]
        flags = {"q_equiv_1_mod_p": self.q % self.p == 1, "q_equiv_0_mod_p": self.q % self.p == 0}
        return DensityReport(self.q, self.p, self.max_deg, N, self.ok, self.skipped, self.truncated,
                             groups, ranks, by_degree, flags, dict(config or {}))


def density_report(records: Iterable[SweepRecord], q: int, p: int, max_deg: int | None = None,
                   config: dict | None = None) -> DensityReport:
    acc = DensityAccumulator(q, p, max_deg)
    for rec in records:
        acc.add(rec)
    return acc.report(config)
