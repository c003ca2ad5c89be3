import json
from fractions import Fraction

import numpy as np
import pytest

from ffiwasawa.algebra.field import field_make
from ffiwasawa.cache import Cache
from ffiwasawa.jacobian import AbelianPGroup
from ffiwasawa.statistics import (
    Caps,
    SweepRecord,
    SweepStats,
    abelian_p_groups,
    aut_order,
    aut_order_bruteforce,
    cohen_lenstra_density,
    density_report,
    iter_sweep,
    predicted_density,
    run_sweep,
)


def injective_count(A):
    """#Aut(A) by checking every endomorphism on every element (tiny groups only)."""
    import itertools

    p, a = A.p, list(A.factors)
    r = len(a)
    elems = list(itertools.product(*[range(p**e) for e in a]))
    entries = [[range(0, p ** a[j], p ** max(0, a[j] - a[i])) for i in range(r)] for j in range(r)]
    flat = [entries[j][i] for j in range(r) for i in range(r)]
    count = 0
    for m in itertools.product(*flat):
        M = [m[j * r : (j + 1) * r] for j in range(r)]
        image = {tuple(sum(M[j][i] * x[i] for i in range(r)) % p ** a[j] for j in range(r)) for x in elems}
        count += len(image) == len(elems)
    return count


def test_aut_examples():
    assert aut_order(AbelianPGroup(3)) == 1
    assert aut_order(AbelianPGroup(3, (1,))) == 2
    assert aut_order(AbelianPGroup(3, (1, 1))) == 48
    assert aut_order(AbelianPGroup(3, (2,))) == 6


@pytest.mark.parametrize("A", [AbelianPGroup(3, f) for f in [(1,), (2,), (1, 1), (2, 1), (1, 1, 1)]])
def test_aut_bruteforce_against_direct_bijection_check(A):
    assert aut_order_bruteforce(A) == injective_count(A) == aut_order(A)


def test_gl_n_orders():
    for p in (3, 5):
        for n in (1, 2, 3):
            gl = 1
            for i in range(n):
                gl *= p**n - p**i
            assert aut_order(AbelianPGroup(p, (1,) * n)) == gl


def test_partition_counts():
    assert [sum(1 for A in abelian_p_groups(3, k) if sum(A.factors) == k) for k in range(6)] == [1, 1, 2, 3, 5, 7]


def test_predicted_examples():
    triv = predicted_density(5, AbelianPGroup(3))
    assert abs(float(triv) - 0.760333) < 5e-7
    assert triv.error < 1e-12
    full = Fraction(1)
    for i in range(1, 40):
        full *= 1 - Fraction(1, 5**i)
    assert abs(float(triv.value - full)) < 1e-12
    assert predicted_density(5, AbelianPGroup(3, (1,))).value * 2 == triv.value
    for q in (3, 7, 9):
        pure = Fraction(1)
        for i in range(1, predicted_density(q, AbelianPGroup(5)).terms + 1):
            pure *= 1 - Fraction(1, q**i)
        assert predicted_density(q, AbelianPGroup(5)).value == pure


def test_predicted_ratios_follow_aut():
    groups = list(abelian_p_groups(3, 4))
    base = predicted_density(5, groups[0]).value
    for A in groups:
        assert predicted_density(5, A).value * aut_order(A) == base


def test_predicted_flags():
    assert predicted_density(7, AbelianPGroup(3)).flags["q_equiv_1_mod_p"]
    assert not predicted_density(5, AbelianPGroup(3)).flags["q_equiv_1_mod_p"]
    assert abs(float(cohen_lenstra_density(AbelianPGroup(3))) - 0.560126) < 1e-6


def test_sweep_examples():
    recs = run_sweep(5, 3, 1)
    assert len(recs) == 10
    assert all(r.genus == 0 and r.h == "1" and r.lam == 0 for r in recs)
    assert len(run_sweep(5, 3, 3)) == 210
    small = {r.key: r for r in run_sweep(3, 3, 3)}
    r = small["q:3;D:0,2,0,1"]
    assert r.h == "4" and r.cl_p == "1" and r.lam == 0


def test_sweep_records_consistent():
    recs = run_sweep(5, 3, 5)
    assert len(recs) == 10 + 200 + 2 * (5**5 - 5**4)
    for r in recs:
        assert r.status == "ok"
        assert r.lam >= r.p_rank
        h = int(r.h)
        assert (h % 3 == 0) == (r.p_rank > 0)
        assert AbelianPGroup.parse(3, r.cl_p).order == 3 ** _v3(h)


def _v3(n):
    k = 0
    while n % 3 == 0:
        n //= 3
        k += 1
    return k


def test_sweep_orbit_sharing_matches_direct(F5):
    # orbit-shared results agree with per-field computation
    from ffiwasawa.function_field import parse_key
    from ffiwasawa.zeta import class_number, l_polynomial

    recs = run_sweep(5, 3, 5)
    for r in recs[::97]:
        assert int(r.h) == class_number(l_polynomial(parse_key(r.key)))


def test_density_report_trivial():
    rep = density_report(run_sweep(5, 3, 1), 5, 3, 1)
    assert rep.density("1") == 1.0
    assert rep.total == 10
    with pytest.raises(ValueError):
        density_report([], 5, 3)


def test_density_report_partition():
    recs = run_sweep(5, 3, 5)
    rep = density_report(recs, 5, 3, 5)
    assert sum(g["count"] for g in rep.groups) == rep.ok == len(recs)
    assert sum(g["empirical"] for g in rep.groups) <= 1 + 1e-12
    assert rep.lambda_density(1) > 0
    assert rep.to_json() == density_report(recs, 5, 3, 5).to_json()
    assert rep.to_csv().splitlines()[0].startswith("kind,label,count")


def test_skipped_and_truncated_statuses():
    recs = run_sweep(5, 3, 5, caps=Caps(max_p_part=3))
    assert {r.status for r in recs} == {"ok", "skipped-large-p-part"}
    assert all(r.cl_p is None for r in recs if r.status != "ok")
    rep = density_report(recs, 5, 3)
    assert rep.skipped > 0 and sum(g["count"] for g in rep.groups) == rep.ok
    trunc = run_sweep(5, 3, 3, caps=Caps(max_resultant_degree=3))
    assert all(r.status == "truncated" for r in trunc)


def test_record_json_round_trip():
    r = run_sweep(5, 3, 3)[20]
    assert SweepRecord.from_dict(json.loads(r.to_json())) == r


def test_cache_resume(tmp_path):
    F = field_make(5, 1)
    path = tmp_path / "cache.jsonl"
    cold_stats, warm_stats = SweepStats(), SweepStats()
    cold = [r.to_json() for r in iter_sweep(F, 3, 5, cache=Cache(path), stats=cold_stats)]
    warm = [r.to_json() for r in iter_sweep(F, 3, 5, cache=Cache(path), stats=warm_stats)]
    assert cold == warm
    assert cold_stats.lpolys_computed == cold_stats.orbits
    assert warm_stats.lpolys_computed == 0 and warm_stats.sylow_computed == 0
    # a corrupt line is skipped, the rest still loads
    with open(path, "a") as fh:
        fh.write("{not json\n")
    assert len(Cache(path)) == cold_stats.orbits


def test_cache_ignores_other_versions(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(json.dumps({"key": "q:5;D:0,1", "lpoly": ["1"], "version": "0.0.0"}) + "\n")
    assert len(Cache(path)) == 0
