"""Acceptance criteria, one or more tests per criterion.

Each test carries ``@acceptance(n, title)``; the terminal summary prints one
PASS/FAIL line per criterion. Thresholds are the stated ones and are not
relaxed here even where a criterion turns out to be wrong.
"""
import random
import time

import pytest

import test_engine as te
from parityscan import backend
from parityscan.cli import main as cli_main, run_demo
from parityscan.codes import PAIR_CHECKS
from parityscan.conjectures import compare_andrica
from parityscan.engine import ScanConfig, canonical_json, checkpoint_load, run_scan
from parityscan.exact import compare_sqrt_gaps
from parityscan.parity import closed_form_L, largest_multiple, quotient_parity
from parityscan.primes import PrimePair

from oracles import bsearch_largest_multiple, trial_odd_pairs, trial_primes_below

acceptance = pytest.mark.acceptance

# pi(10**8) = 5761455 (published value); dropping p = 2 leaves the odd pairs
ODD_PAIRS_BELOW_1E8 = 5761455 - 1
BIG_CHECKS = {"parity", "identity", "lemma2", "theorem1", "eq14", "andrica"}


@pytest.fixture(scope="module")
def scan_1e8():
    t = time.perf_counter()
    s = run_scan(ScanConfig(3, 10**8, checks=BIG_CHECKS))
    print(f"\n[scan of p_lo < 10^8 on backend {backend.kernels.NAME}: {time.perf_counter() - t:.1f}s]")
    return s


@acceptance(1, "demo-2329 reproduces L(23,26^2)=667 odd and L(23,28^2)=782 even in < 1 s")
def test_c01_demo(capsys):
    t = time.perf_counter()
    code = cli_main(["demo-2329"])
    elapsed = time.perf_counter() - t
    out = capsys.readouterr().out
    rep, _, reproduced = run_demo()
    rows = {r["m_i"]: r for r in rep["rows"]}
    assert code == 0 and reproduced
    assert rows[26]["L"] == 667 and rows[26]["odd"]
    assert all(rows[m]["odd"] for m in (24, 25, 26)) and rep["parity_holds"]
    assert rows[28]["L"] == 782 == 23 * 33 + 23 and not rows[28]["odd"]
    assert "m_i=28 → L=782 (even)" in out
    assert elapsed < 1.0


@acceptance(2, "parity and identity hold for every odd pair with p_lo < 10^8, zero divergence")
def test_c02_parity_identity(scan_1e8):
    s = scan_1e8
    assert s.pairs_checked == ODD_PAIRS_BELOW_1E8
    assert s.counters["parity"] == (ODD_PAIRS_BELOW_1E8, 0)
    assert s.counters["identity"] == (ODD_PAIRS_BELOW_1E8, 0)
    assert s.divergence_count == 0
    assert s.invariant_violations == {}


@acceptance(3, "brute largest_multiple equals the closed form and quotient parity for p_lo < 10^5")
def test_c03_oracle_equivalence():
    mismatches = checked = 0
    for p, q in trial_odd_pairs(3, 10**5):
        for m_i in range(p + 1, (p + q) // 2 + 1):
            brute = bsearch_largest_multiple(p, m_i * m_i)
            odd, ident = quotient_parity(p, m_i)
            checked += 1
            if brute != closed_form_L(p, m_i) or brute != largest_multiple(p, m_i * m_i):
                mismatches += 1
            if odd != (brute % 2 == 1) or ident != (brute == closed_form_L(p, m_i)):
                mismatches += 1
    assert checked > 40000
    assert mismatches == 0


@acceptance(4, "gap^2 < 4 p_lo and m^2 < p_lo(p_hi+1) for p_lo < 10^8; theorem1 implies Andrica pairwise")
def test_c04_theorem1_eq14(scan_1e8):
    s = scan_1e8
    n = ODD_PAIRS_BELOW_1E8
    assert s.counters["theorem1"] == (n, 0)
    assert s.counters["eq14"] == (n, 0)
    assert s.counters["andrica"] == (n, 0)
    assert s.min_theorem1_margin == (8, 3)  # (3, 5): 4*3 - 2**2
    assert "theorem1_implies_andrica" not in s.invariant_violations
    print(f"\n[min theorem1 margin {s.min_theorem1_margin[0]} at pair (3, 5); max gap {s.max_gap}]")


@acceptance(5, "2m-1 < 3 p_lo and p_hi < 2 p_lo for every pair with p_lo < 10^8")
def test_c05_lemma_suite(scan_1e8):
    assert scan_1e8.counters["lemma2"] == (ODD_PAIRS_BELOW_1E8, 0)
    assert not [c for c in scan_1e8.counterexamples if c.check == "lemma2"]


@acceptance(6, "legendre N<=10^4, oppermann 2<=N<=10^4, brocard for p_hi^2<=10^8, all in < 2 min")
def test_c06_downstream():
    t = time.perf_counter()
    squares = run_scan(ScanConfig(3, 4, checks={"legendre", "oppermann"}, n_lo=1, n_hi=10**4 + 1))
    # the last pair with p_hi**2 <= 10**8 is (9967, 9973); 10007**2 is past the bound
    brocard = run_scan(ScanConfig(3, 9973, checks={"brocard"}))
    elapsed = time.perf_counter() - t
    assert squares.counters["legendre"] == (10**4, 0)
    assert squares.counters["oppermann"] == (10**4 - 1, 0)
    pairs = trial_odd_pairs(3, 9973)
    assert pairs[-1] == (9967, 9973)
    assert brocard.counters["brocard"] == (len(pairs), 0)
    assert squares.invariant_violations == {}
    assert elapsed < 120


@acceptance(7, "maximal-Andrica pair for p_lo < 10^6 is (113, 127), confirmed exactly")
def test_c07_andrica_extreme():
    s = run_scan(ScanConfig(3, 10**6, checks={"andrica"}, shard_size=1 << 17))
    best = PrimePair(*s.max_andrica_pair)
    # exhaustive exact re-verification of whatever the scan reported
    for p, q in trial_odd_pairs(3, 10**6):
        assert compare_sqrt_gaps(p, q, best.p_lo, best.p_hi) <= 0
    assert s.max_andrica_pair == (113, 127)


@acceptance(8, "identical bytes for 1, 4 and 16 workers on [3, 10^7) and after interrupt plus resume")
def test_c08_determinism(tmp_path):
    checks = set(PAIR_CHECKS) - {"brocard"} | {"legendre", "oppermann"}
    kw = dict(range_lo=3, range_hi=10**7, checks=checks, shard_size=10**6)
    outputs = {w: canonical_json(run_scan(ScanConfig(worker_count=w, **kw)).to_dict()) for w in (1, 4, 16)}
    assert outputs[1] == outputs[4] == outputs[16]

    path = tmp_path / "ck.json"

    class Stop(Exception):
        pass

    def stop(index, total):
        if index == 3:
            raise Stop

    with pytest.raises(Stop):
        run_scan(ScanConfig(checkpoint_path=str(path), **kw), on_shard=stop)
    assert checkpoint_load(path).completed_shards == {0, 1, 2, 3}
    resumed = run_scan(ScanConfig(checkpoint_path=str(path), worker_count=4, **kw), resume=True)
    assert canonical_json(resumed.to_dict()) == outputs[1]


@acceptance(9, "merge monoid laws hold on random summaries")
def test_c09_merge_laws():
    te.test_merge_identity()
    te.test_merge_commutative()
    te.test_merge_associative()
    te.test_merge_counters_add_and_cap()


@acceptance(9, "sieve equals trial division below 10^6")
def test_c09_sieve_vs_trial():
    oracle = trial_primes_below(10**6)
    for name in backend.available():
        assert backend.load(name).primes_between(0, 10**6) == oracle


@acceptance(9, "sharded and unsharded scans see the same pairs on random partitions")
def test_c09_sharded_vs_unsharded():
    te.test_sharded_equals_unsharded()


@acceptance(9, "largest_multiple contract on 10^6 random inputs")
def test_c09_largest_multiple_contract():
    rng = random.Random(20261016)
    for i in range(10**6):
        p = 2 * rng.randrange(1, 1 << 40) + 1
        x = p + rng.randrange(0, 1 << rng.choice((8, 32, 64, 120)))
        L = largest_multiple(p, x)
        assert L % p == 0 and L <= x < L + p
        if i % 100 == 0:
            assert L == bsearch_largest_multiple(p, x)


@acceptance(10, "parity scan of [3, 10^7) uses at most 0.6 * 10^7 divisions")
def test_c10_division_bound():
    s = run_scan(ScanConfig(3, 10**7, checks={"parity"}))
    assert s.counters["parity"] == (s.pairs_checked, 0)
    print(f"\n[divisions for [3, 10^7): {s.divisions}]")
    assert s.divisions <= 0.6 * 10**7
