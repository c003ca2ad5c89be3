"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test appends a pass/fail line that is printed in the terminal
summary.  The (q=5, p=3) sweeps are run once through the command-line
entry point and shared between criteria.
"""

import contextlib
import io
import json
import time

import numpy as np
import pytest

from ffiwasawa.algebra.field import field_make
from ffiwasawa.cli import main
from ffiwasawa.function_field import enumerate_discriminants, parse_key
from ffiwasawa.iwasawa import control_consistency
from ffiwasawa.jacobian import count_divisor_classes_batch
from ffiwasawa.statistics import abelian_p_groups, aut_order, aut_order_bruteforce
from ffiwasawa.zeta import LPolynomial, l_polynomial, l_polynomials_batch, weil_bound_ok

from conftest import ACCEPTANCE_LINES

PREDICTED_TRIVIAL = 0.760333
DENSITY_TOL = 0.15


def record(n, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


def cli_sweep(out, max_deg, cache=None):
    argv = ["sweep", "--l", "5", "--p", "3", "--max-deg", str(max_deg), "--out", str(out), "--format", "json"]
    argv += ["--cache", str(cache)] if cache else ["--no-cache"]
    buf = io.StringIO()
    t0 = time.perf_counter()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, json.loads(buf.getvalue()), time.perf_counter() - t0


def read_records(path):
    with open(path) as fh:
        for line in fh:
            yield json.loads(line)


@pytest.fixture(scope="module")
def sweep7(tmp_path_factory):
    root = tmp_path_factory.mktemp("sweep7")
    runs = {}
    runs["cold_a"] = cli_sweep(root / "cold_a", 7)
    runs["cold_b"] = cli_sweep(root / "cold_b", 7)
    runs["cached"] = cli_sweep(root / "cached", 7, cache=root / "cache.jsonl")
    runs["warm"] = cli_sweep(root / "warm", 7, cache=root / "cache.jsonl")
    return root, runs


@pytest.fixture(scope="module")
def sweep9(tmp_path_factory):
    root = tmp_path_factory.mktemp("sweep9")
    cold = cli_sweep(root / "cold", 9, cache=root / "cache.jsonl")
    warm = cli_sweep(root / "warm", 9, cache=root / "cache.jsonl")
    return root, cold, warm


def test_criterion_1_class_number_oracle():
    t0 = time.perf_counter()
    checked = mismatches = 0
    for l, d in [(3, 1), (5, 1), (7, 1), (3, 2)]:
        F = field_make(l, d)
        for n in (1, 3, 5):
            discs = np.array([K.disc for K in enumerate_discriminants(F, n) if K.degree == n])
            g = (n - 1) // 2
            enumerated = count_divisor_classes_batch(F, g, discs)
            if g == 0:
                from_zeta = np.ones(len(discs), dtype=np.int64)
            else:
                Ls, _ = l_polynomials_batch(F, discs)
                from_zeta = np.array([sum(L.coeffs) for L in Ls])
            mismatches += int(np.count_nonzero(enumerated != from_zeta))
            checked += len(discs)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 300
    record(1, ok, f"{checked} fields q<=9 g<=2, {mismatches} mismatches, {elapsed:.1f}s (limit 300s)")
    assert mismatches == 0
    assert elapsed < 300


def test_criterion_2_dual_route_tower():
    cases = []
    F5 = field_make(5, 1)
    # q=5, p=3: fields with 3 | h first, since those exercise a nontrivial p-part
    for K in enumerate_discriminants(F5, 5):
        if K.genus == 0:
            continue
        L = l_polynomial(K)
        if sum(L.coeffs) % 3 == 0 and len(cases) < 40:
            cases.append((K, L, 3))
    F3 = field_make(3, 1)
    for K in list(enumerate_discriminants(F3, 5))[6::9][:10]:
        cases.append((K, l_polynomial(K), 5))
    F7 = field_make(7, 1)
    for K in list(enumerate_discriminants(F7, 3))[14::7][:10]:
        cases.append((K, l_polynomial(K), 3))
    results = [control_consistency(K, L, p) for K, L, p in cases]
    eligible = [r for r in results if r is not None]
    failures = sum(1 for r in eligible if not r)
    ok = len(eligible) >= 50 and failures == 0
    record(2, ok, f"{len(eligible)} fields recounted over F_(q^p), {failures} mismatches")
    assert len(eligible) >= 50
    assert failures == 0


def test_criterion_3_growth_law(sweep7):
    root, runs = sweep7
    stabilized = law_violations = increment_violations = 0
    example = None
    for r in read_records(root / "cold_a" / "records.jsonl"):
        e, g = r["e_sequence"], r["genus"]
        if any(not 0 <= b - a <= 2 * g for a, b in zip(e, e[1:])):
            increment_violations += 1
            example = example or f"{r['key']} e={tuple(e)}"
        if r["lambda"] is None:
            continue
        stabilized += 1
        lam, nu, n0 = r["lambda"], r["nu"], r["n_0"]
        if any(e[n] != lam * n + nu for n in range(n0, len(e))):
            law_violations += 1
    ok = law_violations == 0 and increment_violations == 0 and stabilized > 0
    record(3, ok, f"(5,3,7) sweep: {stabilized} stabilized fields, {law_violations} growth-law violations, "
                  f"{increment_violations} fields with an increment outside [0, 2g]"
                  + (f" (e.g. {example})" if example else ""))
    assert stabilized > 0
    assert law_violations == 0
    assert increment_violations == 0


def test_criterion_4_lambda_ge_prank(sweep7, sweep9):
    files = [sweep7[0] / "cold_a" / "records.jsonl", sweep9[0] / "cold" / "records.jsonl"]
    ok_records = violations = 0
    rank_positive_9 = 0
    for path in files:
        for r in read_records(path):
            if r["status"] != "ok":
                continue
            ok_records += 1
            violations += r["lambda"] < r["p_rank"]
            if path == files[1]:
                rank_positive_9 += r["p_rank"] >= 1
    ok = violations == 0 and rank_positive_9 >= 1
    record(4, ok, f"{ok_records} ok records, {violations} violations, "
                  f"{rank_positive_9} fields with p-rank >= 1 at max_deg 9")
    assert violations == 0
    assert rank_positive_9 >= 1


def test_criterion_5_functional_equation_and_weil(sweep7, sweep9):
    stats = [sweep7[1]["cold_a"][1]["stats"], sweep9[1][1]["stats"]]
    lpolys = sum(s["lpolys_computed"] for s in stats)
    fe_fail = sum(s["functional_equation_failures"] for s in stats)
    weil = sum(s["weil_checks"] for s in stats)
    weil_fail = sum(s["weil_failures"] for s in stats)
    # direct check on a sample including extension fields
    extra = 0
    for l, d in [(3, 1), (7, 1), (3, 2)]:
        F = field_make(l, d)
        discs = np.array([K.disc for K in enumerate_discriminants(F, 5) if K.degree == 5][:500])
        Ls, counts = l_polynomials_batch(F, discs)
        for L, row in zip(Ls, counts.tolist()):
            b, g, q = L.coeffs, L.genus, L.q
            fe_fail += any(b[2 * g - i] != q ** (g - i) * b[i] for i in range(g + 1))
            weil_fail += sum(not weil_bound_ok(n, q, k, g) for k, n in enumerate(row, 1))
            weil += len(row)
            extra += 1
    ok = fe_fail == 0 and weil_fail == 0 and lpolys > 0
    record(5, ok, f"{lpolys + extra} L-polynomials, {fe_fail} functional-equation failures, "
                  f"{weil} point counts, {weil_fail} Weil-bound failures")
    assert lpolys > 0
    assert fe_fail == 0 and weil_fail == 0


def test_criterion_6_aut_order():
    groups = list(abelian_p_groups(3, 4)) + list(abelian_p_groups(5, 3))
    bad = [str(A) for A in groups if aut_order(A) != aut_order_bruteforce(A)]
    record(6, not bad, f"{len(groups)} groups of order <= 3^4 or <= 5^3, mismatches: {bad or 'none'}")
    assert not bad


def test_criterion_7_trivial_density(sweep9):
    root, (code, summary, elapsed), _ = sweep9
    report = json.loads((root / "cold" / "report.json").read_text())
    trivial = next(g for g in report["groups"] if g["group"] == "1")
    emp, pred = trivial["empirical"], trivial["predicted"]
    lam_pos = report["ranks"][0]["lambda_ge_r_positive"]
    within = abs(emp - PREDICTED_TRIVIAL) <= DENSITY_TOL
    ok = within and lam_pos and code == 0
    record(7, ok, f"N = {report['total']}, trivial Cl_3 density {emp:.6f} vs predicted {pred:.6f} "
                  f"(|diff| = {abs(emp - pred):.4f}, tol {DENSITY_TOL}); "
                  f"lambda>=1 density {report['ranks'][0]['lambda_ge_r']:.4f} > 0: {lam_pos}; "
                  f"sweep {elapsed:.0f}s (limit 1800s)")
    assert code == 0
    assert elapsed <= 1800
    assert report["ranks"][0]["lambda_ge_r"] > 0
    assert abs(emp - PREDICTED_TRIVIAL) <= DENSITY_TOL


def test_criterion_8_determinism(sweep7, sweep9):
    root7, runs = sweep7
    names = ("records.jsonl", "report.json", "report.csv")

    def same(a, b):
        return all((a / n).read_bytes() == (b / n).read_bytes() for n in names)

    cold_cold = same(root7 / "cold_a", root7 / "cold_b")
    cold_cached = same(root7 / "cold_a", root7 / "cached")
    cold_warm7 = same(root7 / "cold_a", root7 / "warm")
    recomputed7 = runs["warm"][1]["stats"]["lpolys_computed"]
    root9, _, (_, warm_summary, warm_time) = sweep9
    cold_warm9 = same(root9 / "cold", root9 / "warm")
    recomputed9 = warm_summary["stats"]["lpolys_computed"]
    ok = cold_cold and cold_cached and cold_warm7 and cold_warm9 and recomputed7 == recomputed9 == 0
    record(8, ok, f"cold/cold {cold_cold}, cold/warm (max_deg 7) {cold_warm7}, cold/warm (max_deg 9) {cold_warm9}, "
                  f"L-polynomials recomputed on warm runs: {recomputed7 + recomputed9}")
    assert cold_cold and cold_cached and cold_warm7 and cold_warm9
    assert recomputed7 == 0 and recomputed9 == 0
