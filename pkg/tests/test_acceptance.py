"""Acceptance gate: every release criterion with its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see the one-line
PASS/FAIL report per criterion.  Criterion 6's ratio bound is expected
red: the exact counts exceed the shipped bound from n = 19 onward (see
the findings section of the README); the test states the bound
faithfully and reports the measured excursion.
"""

import json
import math
import re
import time
from fractions import Fraction

import pytest

import primecycles as pc
from primecycles import cli

GOLDEN_PRIMES = (1, 0, 1, 2, 3, 44, 55, 1434)
GOLDEN_PRIMES1 = (1, 1, 2, 6, 18, 90, 420, 2940, 19740)
# Release pre-run: min over n <= 1000 of n*h_n, attained at n = 890.
MARGIN_GOLDEN = -485.662902758236
MARGIN_ARGMIN = 890


def _report(num, name, ok, detail):
    line = f"[criterion {num:>2}] {'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line)
    assert ok, line


def test_criterion_01_constants(capsys):
    start = time.perf_counter()
    code = cli.run(["constants", "--prime-limit", "1000000"])
    out = capsys.readouterr().out
    elapsed = time.perf_counter() - start
    values = dict(
        re.match(r"(\S+) = ([0-9.]+)", line).groups()
        for line in out.strip().splitlines()
    )
    c = float(values["c"])
    e_c = float(values["e^c"])
    ok = (
        code == 0
        and abs(c - 0.261497) <= 1e-5
        and abs(e_c - 1.298873) <= 1e-5
        and elapsed < 10.0
    )
    _report(
        1,
        "constants",
        ok,
        f"c={c:.10f} (|d|={abs(c - 0.261497):.1e}), e^c={e_c:.10f} "
        f"(|d|={abs(e_c - 1.298873):.1e}), {elapsed:.1f}s",
    )


def test_criterion_02_oracle_equivalence():
    start = time.perf_counter()
    sets = (pc.primes_set(), pc.primes1_set(), pc.odd_set(), pc.all_set())
    ok = True
    for A in sets:
        recurrence = pc.count_table(A, 100)
        oracle = pc.cycle_type_counts_upto(A, 100)
        if list(recurrence.counts) != oracle:
            ok = False
            break
        for n in range(9):
            if pc.brute_force_count(A, n) != recurrence.counts[n]:
                ok = False
                break
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 120.0
    _report(
        2,
        "oracle equivalence",
        ok,
        f"4 sets, brute force to n=8, cycle-type oracle to n=100, {elapsed:.1f}s",
    )


def test_criterion_03_golden_sequences():
    primes_counts = pc.count_table(pc.primes_set(), 7)
    primes1_counts = pc.count_table(pc.primes1_set(), 8)
    ok = (
        primes_counts.counts == GOLDEN_PRIMES
        and primes1_counts.counts == GOLDEN_PRIMES1
    )
    _report(
        3,
        "golden sequences",
        ok,
        f"P_0..7={list(primes_counts.counts)}, P1_0..8={list(primes1_counts.counts)}",
    )


def test_criterion_04_findings_scan(capsys, request):
    start = time.perf_counter()
    code = cli.run(["verify", "--check", "inequality", "--n-max", "200"])
    out = capsys.readouterr().out
    primes1_counts = request.getfixturevalue("primes1_counts")
    primes_counts = request.getfixturevalue("primes_counts")
    violations = pc.inequality_scan(primes1_counts, 200, "primes1")
    rest = pc.inequality_scan(primes1_counts, 200, "primes-rest", primes_counts)
    scan = pc.tauberian_coefficients(primes1_counts, 1000)
    elapsed = time.perf_counter() - start
    margin = float(scan.min_margin)
    ok = (
        code == 0
        and "first at n=5" in out
        and violations[0] == 5
        and primes1_counts.counts[6] == 420
        and 5 * primes1_counts.counts[5] == 450
        and rest == []
        and scan.min_margin <= Fraction(-5, 4)
        and scan.argmin == MARGIN_ARGMIN
        and abs(margin - MARGIN_GOLDEN) <= 1e-6
        and elapsed < 120.0
    )
    _report(
        4,
        "findings scan",
        ok,
        f"first violation n={violations[0]} (420 < 450), primes-rest clean to 200, "
        f"margin {margin:.6f} at n={scan.argmin}, {elapsed:.1f}s",
    )


def test_criterion_05_karamata(request):
    start = time.perf_counter()
    primes_counts = request.getfixturevalue("primes_counts")
    e_c = math.exp(pc.MERTENS_CONSTANT)
    scaled = 1
    factorial = 1
    worst = 0.0
    for n in range(1, 2001):
        scaled = scaled * n + primes_counts.counts[n]
        factorial *= n
        if n >= 10:
            deviation = abs(scaled / factorial - e_c * math.log(n))
            worst = max(worst, deviation)
    elapsed = time.perf_counter() - start
    ok = worst <= 3.0 and elapsed < 120.0
    _report(
        5,
        "partial-sum growth",
        ok,
        f"max |sum - e^c log n| = {worst:.4f} over 10 <= n <= 2000, {elapsed:.1f}s",
    )


def test_criterion_06a_entrywise_domination(request):
    start = time.perf_counter()
    primes_counts = request.getfixturevalue("primes_counts")
    primes1_counts = request.getfixturevalue("primes1_counts")
    ok = all(
        primes_counts.counts[n] <= primes1_counts.counts[n] for n in range(2001)
    )
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 300.0
    _report(6, "entrywise domination", ok, f"P_n <= P1_n for n <= 2000, {elapsed:.1f}s")


def test_criterion_06b_ratio_bound(request):
    start = time.perf_counter()
    primes1_counts = request.getfixturevalue("primes1_counts")
    bound = math.exp(pc.MERTENS_CONSTANT + 1.0) + 0.6
    factorial = 1
    worst = 0.0
    argmax = 0
    first_violation = None
    for n in range(1, 2001):
        ratio = primes1_counts.counts[n] / factorial
        if ratio > worst:
            worst, argmax = ratio, n
        if first_violation is None and ratio > bound:
            first_violation = n
        factorial *= n
    elapsed = time.perf_counter() - start
    ok = worst <= bound and elapsed < 300.0
    _report(
        6,
        "ratio bound",
        ok,
        f"claimed P1_n/(n-1)! <= e^(c+1)+0.6 = {bound:.4f} for n <= 2000; "
        f"measured max {worst:.4f} at n={argmax}"
        + (f", first excess at n={first_violation}" if first_violation else "")
        + f", {elapsed:.1f}s",
    )


def test_criterion_07_series_probes(request):
    start = time.perf_counter()
    table = request.getfixturevalue("table_5e6")
    worst_first = worst_zeroth = 0.0
    for k in (1, 2, 3, 4):
        z = 1.0 - 10.0**-k
        scale = math.log(1.0 / (1.0 - z))
        worst_first = max(
            worst_first, abs(pc.derivative_residual(z, table)) * scale
        )
        worst_zeroth = max(worst_zeroth, abs(pc.egf_residual(z, table)))
    elapsed = time.perf_counter() - start
    ok = worst_first <= 3.0 and worst_zeroth <= 2.0 and elapsed < 180.0
    _report(
        7,
        "series probes",
        ok,
        f"max scaled first-order residual {worst_first:.3f} (<= 3), "
        f"max zeroth-order residual {worst_zeroth:.3f} (<= 2), {elapsed:.1f}s "
        f"incl. the 5e6 sieve",
    )


def test_criterion_08_monte_carlo(request):
    start = time.perf_counter()
    primes_counts = request.getfixturevalue("primes_counts")
    exact = primes_counts.counts[50] / math.factorial(50)
    summary = pc.estimate_prime_fraction(50, 1_000_000, 42)
    deviation = abs(summary.estimate - exact)
    reference = 1.298873 / 50  # report column
    within = deviation <= 4 * summary.std_error

    A = pc.primes_set()
    table6 = pc.count_table(A, 6)
    stream = pc.TrialStream.for_trial(42, 0)
    observed = {((3, 2),): 0, ((2, 3),): 0}
    trials = 100_000
    for _ in range(trials):
        perm = pc.sample_A_permutation(6, A, table6, stream)
        observed[pc.cycle_type_of(perm).parts] += 1
    expected_33 = trials * 40 / 55
    expected_222 = trials * 15 / 55
    x2 = (observed[((3, 2),)] - expected_33) ** 2 / expected_33
    x2 += (observed[((2, 3),)] - expected_222) ** 2 / expected_222
    p_value = math.erfc(math.sqrt(x2 / 2.0))
    elapsed = time.perf_counter() - start
    ok = within and p_value > 1e-3 and elapsed < 120.0
    _report(
        8,
        "Monte Carlo",
        ok,
        f"n=50: |{summary.estimate:.6f} - {exact:.6f}| = {deviation:.2e} "
        f"<= 4se={4 * summary.std_error:.2e} (reference {reference:.6f}); "
        f"exact-sampler chi^2 p={p_value:.4f}, {elapsed:.1f}s",
    )


def test_criterion_09_density_estimator(request):
    start = time.perf_counter()
    value = pc.yakymiv_ratio(pc.all_set(), 1000)
    harmonic = sum(1.0 / k for k in range(1, 1001))
    direct = math.exp(harmonic - math.log(1000.0) - pc.GAMMA)
    odd_counts = request.getfixturevalue("odd_counts")
    errors = []
    for n in (200, 400, 800):
        ratio = pc.yakymiv_ratio(pc.odd_set(), n)
        # ratio * n! / P_n in log space; n! overflows a float here
        log_rel = math.log(ratio) + math.lgamma(n + 1) - math.log(odd_counts.counts[n])
        errors.append(abs(math.expm1(log_rel)))
    elapsed = time.perf_counter() - start
    ok = (
        1.0001 <= value <= 1.0010
        and abs(value - direct) <= 1e-12
        and errors[0] > errors[1] > errors[2]
        and elapsed < 60.0
    )
    _report(
        9,
        "density estimator",
        ok,
        f"all-set ratio {value:.6f} in [1.0001, 1.0010]; odd-set errors "
        f"{errors[0]:.6f} > {errors[1]:.6f} > {errors[2]:.6f}, {elapsed:.1f}s",
    )


def test_criterion_10_determinism(capsys, tmp_path):
    start = time.perf_counter()
    commands = [
        ["sample", "--n", "50", "--trials", "100000", "--seed", "7"],
        ["sample", "--n", "30", "--trials", "50000", "--seed", "7", "--coincidence"],
        ["sample", "--n", "6", "--trials", "20000", "--seed", "7", "--exact"],
    ]
    ok = True
    for argv in commands:
        outputs = []
        for repeat in range(2):
            out_path = str(tmp_path / f"r{repeat}.json")
            code = cli.run(argv + ["--out", out_path])
            capsys.readouterr()
            ok = ok and code == 0
            outputs.append(open(out_path, "rb").read())
        ok = ok and outputs[0] == outputs[1] and json.loads(outputs[0])
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 120.0
    _report(
        10,
        "determinism",
        ok,
        f"3 Monte Carlo command lines, byte-identical reports across runs, "
        f"{elapsed:.1f}s",
    )


@pytest.fixture(scope="session", autouse=True)
def _warn_backend():
    # acceptance runtimes assume the compiled kernels; the pure fallback
    # still passes, just slower
    print(f"\n[acceptance] kernel backend: {pc.backend_name()}")
    yield
