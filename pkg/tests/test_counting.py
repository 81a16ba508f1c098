import math
from fractions import Fraction

import pytest

import primecycles as pc
from primecycles.errors import CacheError, ResourceLimitError

GOLDEN_PRIMES = (1, 0, 1, 2, 3, 44, 55, 1434, 3913, 39752)
GOLDEN_PRIMES1 = (1, 1, 2, 6, 18, 90, 420, 2940, 19740, 137340)


def double_factorial(n):
    result = 1
    while n > 1:
        result *= n
        n -= 2
    return result


# ---------------------------------------------------------------- sets


def test_members_upto_examples():
    assert pc.members_upto(pc.primes_set(), 10) == [2, 3, 5, 7]
    assert pc.members_upto(pc.all_set(), 5) == [1, 2, 3, 4, 5]
    members = pc.members_upto(pc.primes_set(), 100)
    assert len(members) == 25 and members[-1] == 97
    assert pc.members_upto(pc.primes1_set(), 10) == [1, 2, 3, 5, 7]
    assert pc.members_upto(pc.odd_set(), 8) == [1, 3, 5, 7]
    assert pc.members_upto(pc.primes_set(), 0) == []


def test_membership_agrees_with_enumeration():
    for A in (pc.primes_set(), pc.primes1_set(), pc.odd_set(), pc.all_set()):
        members = set(A.members_upto(200))
        for k in range(1, 201):
            assert (k in A) == (k in members)


def test_densities():
    assert pc.primes_set().density == 0.0
    assert pc.primes1_set().density == 0.0
    assert pc.odd_set().density == 0.5
    assert pc.all_set().density == 1.0
    assert pc.explicit_set([2, 3, 5]).density is None


def test_admissible_set_parsing():
    assert pc.admissible_set("odd").id == "odd"
    assert pc.admissible_set("2,3,5").members_upto(6) == [2, 3, 5]
    assert pc.admissible_set([5, 2, 3, 3]).id == "2,3,5"
    with pytest.raises(ValueError):
        pc.admissible_set("no-such-set")
    with pytest.raises(ValueError):
        pc.explicit_set([0, 2])
    with pytest.raises(ValueError):
        pc.explicit_set([2, 10**6 + 1])


def test_pair_density_examples():
    assert pc.pair_density(pc.all_set(), 100, 100) == pytest.approx(0.99)
    assert pc.pair_density(pc.odd_set(), 100, 100) == pytest.approx(0.5)
    assert pc.pair_density(pc.odd_set(), 101, 100) == 0.0
    assert pc.pair_density(pc.odd_set(), 2, 2) == pytest.approx(0.5)


# ---------------------------------------------------------------- counts


def test_golden_sequences():
    primes_table = pc.count_table(pc.primes_set(), 9)
    primes1_table = pc.count_table(pc.primes1_set(), 9)
    assert primes_table.counts == GOLDEN_PRIMES
    assert primes1_table.counts == GOLDEN_PRIMES1


def test_all_set_counts_are_factorials():
    table = pc.count_table(pc.all_set(), 30)
    for n in range(31):
        assert table.counts[n] == math.factorial(n)


def test_three_way_oracle_agreement_small():
    for A in (pc.primes_set(), pc.primes1_set(), pc.odd_set(), pc.all_set()):
        recurrence = pc.count_table(A, 8)
        oracle = pc.cycle_type_counts_upto(A, 8)
        for n in range(9):
            brute = pc.brute_force_count(A, n)
            assert brute == oracle[n] == recurrence.counts[n]


def test_cycle_type_oracle_matches_recurrence_to_budget():
    for A in (pc.primes_set(), pc.primes1_set(), pc.odd_set(), pc.all_set()):
        recurrence = pc.count_table(A, 120)
        oracle = pc.cycle_type_counts_upto(A, 120)
        assert list(recurrence.counts) == oracle


def test_count_by_cycle_types_examples():
    assert pc.count_by_cycle_types(pc.primes_set(), 6) == 55
    assert pc.count_by_cycle_types(pc.primes_set(), 0) == 1
    assert pc.count_by_cycle_types(pc.primes_set(), 1) == 0


def test_brute_force_examples_and_refusal():
    assert pc.brute_force_count(pc.primes_set(), 5) == 44
    assert pc.brute_force_count(pc.primes_set(), 4) == 3
    assert pc.brute_force_count(pc.primes1_set(), 3) == 6
    with pytest.raises(ResourceLimitError):
        pc.brute_force_count(pc.primes_set(), 10)


def test_binomial_convolution_identity(primes_counts, primes1_counts):
    # independent arithmetic identity: P1_n = sum_j C(n,j) P_{n-j}
    for n in (0, 1, 5, 17, 60, 200, 700):
        value = sum(
            math.comb(n, j) * primes_counts.counts[n - j] for j in range(n + 1)
        )
        assert value == primes1_counts.counts[n]


def test_recurrence_weight_identity():
    # the binomial restatement of the recurrence, with independent factors
    for A in (pc.primes_set(), pc.primes1_set(), pc.odd_set()):
        table = pc.count_table(A, 60)
        for m in range(1, 61):
            total = sum(
                math.comb(m - 1, k - 1)
                * math.factorial(k - 1)
                * table.counts[m - k]
                for k in A.members_upto(m)
            )
            assert total == table.counts[m]


def test_set_monotonicity(primes_counts, primes1_counts):
    for n in range(0, 2002, 13):
        assert primes_counts.counts[n] <= primes1_counts.counts[n]
        if n <= 150:
            assert primes1_counts.counts[n] <= math.factorial(n)


def test_odd_double_factorial_identity(odd_counts):
    oracle = pc.cycle_type_counts_upto(pc.odd_set(), 20)
    for m in range(1, 11):
        n = 2 * m
        expected = double_factorial(2 * m - 1) ** 2
        assert odd_counts.counts[n] == expected
        assert oracle[n] == expected


def test_count_budget():
    with pytest.raises(ResourceLimitError):
        pc.count_table(pc.primes_set(), 10, budget=5)
    with pytest.raises(ResourceLimitError):
        pc.cycle_type_counts_upto(pc.primes_set(), 200)


def test_partitions_into():
    types = list(pc.partitions_into(pc.primes_set(), 6))
    parts = sorted(t.parts for t in types)
    assert parts == [((2, 3),), ((3, 2),)]
    by_type = {t.parts: t.permutation_count() for t in types}
    assert by_type[((3, 2),)] == 40
    assert by_type[((2, 3),)] == 15
    assert [t.parts for t in pc.partitions_into(pc.primes_set(), 0)] == [()]
    assert list(pc.partitions_into(pc.primes_set(), 1)) == []


def test_cycle_type_validation():
    ct = pc.CycleType.from_lengths([2, 3, 2])
    assert ct.parts == ((2, 2), (3, 1))
    assert ct.n == 7
    assert ct.multiplicities() == {2: 2, 3: 1}
    with pytest.raises(ValueError):
        pc.CycleType(parts=((0, 1),))
    with pytest.raises(ValueError):
        pc.CycleType(parts=((3, 1), (2, 1)))


# ---------------------------------------------------------------- decimals


def test_fixed_decimal_semantics():
    d = pc.FixedDecimal.from_ratio(44, 24, 6)
    assert str(d) == "1.833333" and d.scale == 6
    assert pc.FixedDecimal.from_ratio(1, 1, 6).digits == "1.000000"
    assert pc.FixedDecimal.from_ratio(7, 2, 0).digits == "3"
    assert pc.FixedDecimal.from_ratio(-1, 3, 4).digits == "-0.3333"
    assert pc.FixedDecimal.from_ratio(0, 5, 2).digits == "0.00"
    assert pc.FixedDecimal.from_ratio(1999, 1000, 2).digits == "1.99"


def test_ratio_fixed_examples(primes_counts, primes1_counts):
    assert str(pc.ratio_fixed(primes_counts, 5, 6)) == "1.833333"
    assert str(pc.ratio_fixed(primes_counts, 2, 6)) == "1.000000"
    assert str(pc.ratio_fixed(primes1_counts, 7, 6)) == "4.083333"
    with pytest.raises(ValueError):
        pc.ratio_fixed(primes_counts, 0, 6)


def test_ratio_fixed_truncation_bracket(primes_counts):
    # truncated value <= true ratio < truncated value + 10^-D
    for n in (5, 7, 50, 123):
        coarse = pc.ratio_fixed(primes_counts, n, 6).as_fraction()
        fine = pc.ratio_fixed(primes_counts, n, 10).as_fraction()
        true = Fraction(primes_counts.counts[n], math.factorial(n - 1))
        assert coarse <= fine <= true < coarse + Fraction(1, 10**6)


def test_ratio_sequence_not_monotone(primes_counts):
    r5 = Fraction(primes_counts.counts[5], math.factorial(4))
    r6 = Fraction(primes_counts.counts[6], math.factorial(5))
    assert r5 == Fraction(44, 24)
    assert r6 == Fraction(55, 120)
    assert r5 > r6


def test_partial_sum_examples(primes_counts):
    assert str(pc.partial_sum_egf(primes_counts, 5, 6)) == "2.325000"
    assert str(pc.partial_sum_egf(primes_counts, 0, 6)) == "1.000000"
    exact = sum(
        Fraction(primes_counts.counts[k], math.factorial(k)) for k in range(6)
    )
    assert exact == Fraction(93, 40)


def test_partial_sum_floats_match_exact(primes_counts):
    floats = pc.counting.partial_sum_floats(primes_counts, 40)
    for n in (0, 1, 7, 40):
        exact = sum(
            Fraction(primes_counts.counts[k], math.factorial(k))
            for k in range(n + 1)
        )
        assert floats[n] == pytest.approx(float(exact), rel=1e-14)


# ---------------------------------------------------------------- scans


def test_tauberian_coefficients_examples(primes1_counts):
    scan = pc.tauberian_coefficients(primes1_counts, 10)
    h = (None,) + scan.coefficients  # 1-based view
    assert h[3] == 0
    assert h[4] == Fraction(3, 4)
    assert h[5] == Fraction(-1, 4)
    assert 5 * h[5] == Fraction(-5, 4)
    # the margin keeps dropping past n=5: -49/12 at n=8 within n <= 10
    assert scan.min_margin == Fraction(-49, 12)
    assert scan.argmin == 8


def test_tauberian_requires_primes1(primes_counts):
    with pytest.raises(ValueError):
        pc.tauberian_coefficients(primes_counts, 5)


def test_inequality_scan_examples(primes_counts, primes1_counts):
    assert pc.inequality_scan(primes1_counts, 4) == []
    violations = pc.inequality_scan(primes1_counts, 10)
    assert 5 in violations and violations[0] == 5
    assert primes1_counts.counts[6] == 420 < 5 * primes1_counts.counts[5] == 450
    rest = pc.inequality_scan(primes1_counts, 10, "primes-rest", primes_counts)
    assert rest == []
    assert primes1_counts.counts[6] >= 5 * primes_counts.counts[5]
    with pytest.raises(ValueError):
        pc.inequality_scan(primes1_counts, 10, "bogus")


# ---------------------------------------------------------------- cache


def test_count_cache_roundtrip(tmp_path):
    table = pc.count_table(pc.primes_set(), 40)
    path = str(tmp_path / "counts.jsonl")
    pc.save_counts(table, path)
    loaded = pc.load_counts(path)
    assert loaded == table
    first = open(path).readline()
    assert '"format": "prime-cycles-counts"' in first


def test_count_cache_detects_tampering(tmp_path):
    import random

    table = pc.count_table(pc.primes_set(), 40)
    path = str(tmp_path / "counts.jsonl")
    pc.save_counts(table, path)
    # tamper an entry the loader's fixed-seed 5% revalidation will sample
    sampled = random.Random(0xC0C0A).sample(range(1, 41), 2)
    target = max(sampled)
    lines = open(path).read().splitlines()
    lines[target + 1] = lines[target + 1].replace(
        f'"count": "{table.counts[target]}"',
        f'"count": "{table.counts[target] + 1}"',
    )
    open(path, "w").write("\n".join(lines) + "\n")
    with pytest.raises(CacheError):
        pc.load_counts(path)


def test_count_cache_requires_contiguity(tmp_path):
    table = pc.count_table(pc.primes_set(), 10)
    path = str(tmp_path / "counts.jsonl")
    pc.save_counts(table, path)
    lines = open(path).read().splitlines()
    del lines[3]  # drop the n=2 record
    open(path, "w").write("\n".join(lines) + "\n")
    with pytest.raises(CacheError):
        pc.load_counts(path)


def test_count_cache_rejects_alien_header(tmp_path):
    path = str(tmp_path / "counts.jsonl")
    open(path, "w").write('{"format": "something-else", "version": 1}\n')
    with pytest.raises(CacheError):
        pc.load_counts(path)


def test_explicit_set_counts():
    # only 3-cycles allowed: counts vanish except on multiples of 3
    A = pc.explicit_set([3])
    table = pc.count_table(A, 9)
    assert table.counts[3] == 2
    assert table.counts[6] == 40
    assert table.counts[4] == table.counts[5] == 0
    assert pc.count_by_cycle_types(A, 9) == table.counts[9]
    assert pc.brute_force_count(A, 6) == 40
