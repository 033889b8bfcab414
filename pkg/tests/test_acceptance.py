"""Exit criteria.  Each test records one PASS/FAIL line shown after the run."""

import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import product

import pytest
from click.testing import CliRunner

from facelim import arith, catalog, experiments, fecore
from facelim.cli import cli
from facelim.fecore import Partition, PrimePower

from conftest import ACCEPTANCE_REPORT, brute_is_prime

# expected prime counts per list length: (primes_found, combinations)
TABLE3 = {
    1: (1, 1), 3: (7, 4), 5: (25, 16), 7: (79, 64), 9: (256, 256), 11: (887, 1024),
    13: (2808, 4096), 15: (10405, 16384), 17: (34450, 65536), 19: (120504, 262144),
    21: (418223, 1048576),
}
CORE = [1, 3, 5, 7, 9, 11, 13]
EXTENDED = [15, 17, 19, 21]
# the one reference count that exact primality does not reproduce, and why
PSEUDOPRIME_ROWS = {9: 104653}

# expected bit statistics: L -> (g, h, 1/ln 2^g, 1/ln 2^h, P/C)
TABLE4 = {
    11: (38, 11, 0.038, 0.1312, 0.8662),
    13: (49, 17, 0.0294, 0.0849, 0.6855),
    15: (59, 21, 0.0245, 0.0687, 0.6351),
}
TABLE4_TOL = 5e-4


@contextmanager
def criterion(num, title):
    notes = []
    try:
        yield notes
    except BaseException:
        ACCEPTANCE_REPORT.append((num, title, "FAIL", "; ".join(notes)))
        raise
    ACCEPTANCE_REPORT.append((num, title, "PASS", "; ".join(notes)))


def _table3_tier(levels, budget, notes):
    start = time.perf_counter()
    for L in levels:
        stats = experiments.scan(L, collect_distinct=L in PSEUDOPRIME_ROWS)
        row = experiments.ExperimentRow.from_stats(stats)
        expected_found, expected_c = TABLE3[L]
        assert row.combinations == expected_c
        if L in PSEUDOPRIME_ROWS:
            # exact count is one short; report the distinct count and the culprit
            psp = PSEUDOPRIME_ROWS[L]
            assert row.primes_found == expected_found - 1
            assert psp not in stats.distinct and arith.sprp2(psp)
            assert not brute_is_prime(psp)
            loose = experiments.scan(L, policy="sprp2", collect_distinct=True)
            assert loose.distinct - stats.distinct == {psp}
            notes.append(
                f"L={L}: exact {row.primes_found} (distinct {len(stats.distinct)}) vs reference "
                f"{expected_found}; gap is base-2 strong pseudoprime {psp}=229*457"
            )
        else:
            assert row.primes_found == expected_found, (L, row.primes_found)
        sprp2_row = experiments.run_distribution(L, policy="sprp2")
        assert (sprp2_row.primes_found, sprp2_row.combinations) == TABLE3[L]
    elapsed = time.perf_counter() - start
    notes.append(f"{elapsed:.1f}s")
    assert elapsed < budget


def test_01_table3_core():
    with criterion(1, "prime counts, core tier L=1..13 (<60s)") as notes:
        # golden cases always exact
        assert experiments.run_distribution(1).primes_found == 1
        assert experiments.run_distribution(3).primes_found == 7
        _table3_tier(CORE, 60, notes)


@pytest.mark.slow
def test_01_table3_extended(tmp_path):
    with criterion(1, "prime counts, extended tier L=15..21 (<600s)") as notes:
        _table3_tier(EXTENDED, 600, notes)
        rows = experiments.run_table(3, range(1, 22, 2))
        path = experiments.emit_csv(rows, tmp_path / "table3.csv")
        assert len(path.read_text().splitlines()) == 12


def test_02_table4():
    with criterion(2, "bit ranges, baselines and ratios (+/-5e-4)") as notes:
        for L, (g, h, base_g, base_h, ratio) in TABLE4.items():
            row = experiments.run_bit_stats(L)
            assert (row.max_bit, row.min_bit) == (g, h)
            assert abs(row.baseline_max - base_g) <= TABLE4_TOL
            assert abs(row.baseline_min - base_h) <= TABLE4_TOL
            assert abs(row.observed_ratio - ratio) <= TABLE4_TOL
            notes.append(f"L={L}: g={g} h={h} P/C={row.observed_ratio:.4f}")


def test_03_worked_example():
    with criterion(3, "R=35 worked example end to end (exact rationals)"):
        part = fecore.parse_partition("A=2^2*3^2;B=1")
        res = fecore.evaluate(part)
        assert res.r_minus == 35
        assert arith.is_prime(35).kind is arith.Kind.COMPOSITE
        assert res.c_minus == 5
        est = fecore.probability_estimate(res, "minus")
        assert (est.pi_c, est.pi_p) == (3, 2)
        assert est.p_prime == Fraction(2, 3)
        assert fecore.probability_estimate(res, "minus", {5}).p_prime_residual == Fraction(1, 3)


def _prime_powers(primes):
    return {p: [PrimePower(p, e) for e in (1, 2, 3)] for p in primes}


def test_04_coprimality_exhaustive():
    with criterion(4, "coprimality over all partitions of 8 primes, exponents 1..3 (<120s)") as notes:
        start = time.perf_counter()
        primes = arith.first_n_primes(8)
        powers = _prime_powers(primes)
        cases = 0
        for exps in product(range(3), repeat=8):
            terms = [powers[p][e] for p, e in zip(primes, exps)]
            for sides in product((True, False), repeat=7):
                a = [terms[0]] + [t for t, s in zip(terms[1:], sides) if s]
                b = [t for t, s in zip(terms[1:], sides) if not s]
                part = Partition(a, b)
                pa, pb = part.product_a, part.product_b
                for r in (pa + pb, abs(pa - pb)):
                    assert fecore.coprime_check(part, r), part
                cases += 1
        elapsed = time.perf_counter() - start
        assert cases == 3**8 * 2**7
        notes.append(f"{cases} partitions, 0 violations, {elapsed:.1f}s")
        assert elapsed < 120


def test_05_guarantee_sound():
    with criterion(5, "absolute condition sound on complete prefixes; A={2,7} regression") as notes:
        guaranteed = 0
        for L in range(1, 9):
            primes = arith.first_n_primes(L)
            powers = _prime_powers(primes)
            for exps in product(range(3), repeat=L):
                terms = [powers[p][e] for p, e in zip(primes, exps)]
                for sides in product((True, False), repeat=L - 1):
                    a = [terms[0]] + [t for t, s in zip(terms[1:], sides) if s]
                    b = [t for t, s in zip(terms[1:], sides) if not s]
                    res = fecore.evaluate(Partition(a, b))
                    for sign in fecore.SIGNS:
                        if res.guaranteed(sign):
                            guaranteed += 1
                            r = res.resultant(sign)
                            assert arith.trial_division_oracle(r).is_prime, r
        notes.append(f"{guaranteed} guaranteed resultants, all prime")
        part = Partition([2, 7])
        res = fecore.evaluate(part)
        assert res.r_plus == 15 and res.c_plus <= res.p_max
        assert not res.guaranteed_plus
        assert not fecore.is_guaranteed_prime(res, "plus", part.is_complete_prefix())


def test_06_oracle_agreement():
    with criterion(6, "is_prime == trial division for n < 10^6 (<60s)") as notes:
        start = time.perf_counter()
        bad = [n for n in range(10**6)
               if arith.is_prime(n).is_prime != arith.trial_division_oracle(n).is_prime]
        elapsed = time.perf_counter() - start
        notes.append(f"{len(bad)} disagreements, {elapsed:.1f}s")
        assert not bad
        assert elapsed < 60


def test_07_category_spot_checks():
    with criterion(7, "category spot checks"):
        def values(name, key, rng, sign=None):
            out = []
            for v in rng:
                result = catalog.verify_category(name, {key: v}, sign)
                out.append((result.value, result.verdict.is_prime))
            return out

        mersenne = values("Mersenne", "p", (2, 3, 5, 7, 13))
        assert mersenne == [(v, True) for v in (3, 7, 31, 127, 8191)]
        assert values("Mersenne", "p", (11,)) == [(2047, False)]
        assert values("Euclid", "k", range(1, 6)) == [(v, True) for v in (3, 7, 31, 211, 2311)]
        fermat = values("Fermat", "n", range(5))
        assert fermat == [(v, True) for v in (3, 5, 17, 257, 65537)]
        for value, _ in mersenne + fermat:
            assert brute_is_prime(value)
        hits = catalog.constellation_search(3, catalog.TWIN)
        assert (29, 31) in [h.members for h in hits]


def test_08_cli_determinism(tmp_path):
    with criterion(8, "experiment CSV identical for --workers 1 and 8") as notes:
        runner = CliRunner()
        for table in ("3", "4"):
            outputs = []
            for workers in ("1", "8"):
                out = tmp_path / f"t{table}_w{workers}.csv"
                res = runner.invoke(cli, ["experiment", "--table", table, "--l-min", "1",
                                          "--l-max", "13", "--workers", workers,
                                          "--out", str(out)], catch_exceptions=False)
                assert res.exit_code == 0
                outputs.append(out.read_bytes())
            assert outputs[0] == outputs[1]
            notes.append(f"table {table}: {len(outputs[0])} bytes identical")
