"""Exact enumeration of permutations with restricted cycle lengths.

Everything in this module is exact: counts are Python integers, ratios
are rendered through truncated fixed-point decimals, and the diagnostic
coefficient scans work on ``fractions.Fraction``.  Floating point never
enters a count.

The central recurrence, with A the admissible set of cycle lengths and
P_0 = 1, is

    P_n = sum over k in A, k <= n, of  (n-1)! / (n-k)! * P_{n-k}

(the falling factorial counts the ways to fill the cycle through the
smallest element).  Two independent oracles back it: summation of
n! / prod(k^m_k * m_k!) over cycle types, and brute-force iteration over
all n! permutations for tiny n.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations as _all_permutations
from typing import Callable, Iterable, Iterator, Mapping, Optional

from . import primes as _primes
from .errors import CacheError, ResourceLimitError

DEFAULT_COUNT_BUDGET = 3000
CYCLE_TYPE_BUDGET = 120
BRUTE_FORCE_MAX_N = 9
EXPLICIT_MEMBER_CAP = 1_000_000
CACHE_FORMAT = "prime-cycles-counts"
CACHE_VERSION = 1

BUILTIN_SET_IDS = ("primes", "primes1", "odd", "all")

# Sieve backing the prime membership predicate; grown geometrically.
_membership_table = None


def _prime_table_for(n: int) -> _primes.PrimeTable:
    global _membership_table
    table = _membership_table
    if table is None or table.limit < n:
        limit = max(1024, n)
        if table is not None:
            limit = max(limit, 2 * table.limit)
        _membership_table = table = _primes.build_prime_table(limit)
    return table


def _is_prime(k: int) -> bool:
    if k < 2:
        return False
    return _prime_table_for(k).is_prime(k)


class AdmissibleSet:
    """A set of admissible cycle lengths.

    Membership is a pure predicate; `members_upto` enumerates the set's
    intersection with [1, n] in ascending order.  `density`, when known
    analytically, is the limit of |A(n)|/n.
    """

    def __init__(
        self,
        set_id: str,
        member_fn: Callable[[int], bool],
        members_fn: Callable[[int], list],
        density: Optional[float],
    ):
        self.id = set_id
        self._member_fn = member_fn
        self._members_fn = members_fn
        self.density = density

    def __contains__(self, k: int) -> bool:
        return k >= 1 and self._member_fn(k)

    def members_upto(self, n: int) -> list:
        if n < 1:
            return []
        return self._members_fn(n)

    def __repr__(self) -> str:
        return f"AdmissibleSet({self.id!r}, density={self.density!r})"


def _primes_members(n: int) -> list:
    table = _prime_table_for(n)
    from bisect import bisect_right

    return list(table.primes[: bisect_right(table.primes, n)])


def primes_set() -> AdmissibleSet:
    return AdmissibleSet("primes", _is_prime, _primes_members, 0.0)


def primes1_set() -> AdmissibleSet:
    return AdmissibleSet(
        "primes1",
        lambda k: k == 1 or _is_prime(k),
        lambda n: [1] + _primes_members(n),
        0.0,
    )


def odd_set() -> AdmissibleSet:
    return AdmissibleSet(
        "odd", lambda k: k % 2 == 1, lambda n: list(range(1, n + 1, 2)), 0.5
    )


def all_set() -> AdmissibleSet:
    return AdmissibleSet("all", lambda k: True, lambda n: list(range(1, n + 1)), 1.0)


def explicit_set(members: Iterable[int]) -> AdmissibleSet:
    values = sorted(set(int(k) for k in members))
    if not values or values[0] < 1:
        raise ValueError("explicit sets need positive integer members")
    if values[-1] > EXPLICIT_MEMBER_CAP:
        raise ValueError(
            f"explicit set members are capped at {EXPLICIT_MEMBER_CAP}"
        )
    frozen = frozenset(values)
    set_id = ",".join(str(v) for v in values)
    return AdmissibleSet(
        set_id,
        lambda k: k in frozen,
        lambda n: [v for v in values if v <= n],
        None,
    )


def admissible_set(selector) -> AdmissibleSet:
    """Resolve a set selector: a builtin name, "2,3,5", or an iterable."""
    if isinstance(selector, AdmissibleSet):
        return selector
    if isinstance(selector, str):
        name = selector.strip()
        factories = {
            "primes": primes_set,
            "primes1": primes1_set,
            "odd": odd_set,
            "all": all_set,
        }
        if name in factories:
            return factories[name]()
        if "," in name or name.isdigit():
            return explicit_set(int(tok) for tok in name.split(",") if tok.strip())
        raise ValueError(f"unknown set selector {selector!r}")
    return explicit_set(selector)


def members_upto(A: AdmissibleSet, n: int) -> list:
    """The members of A in [1, n], ascending."""
    return A.members_upto(n)


def pair_density(A: AdmissibleSet, m: int, n: int) -> float:
    """|{k : 1 <= k <= m-1, k in A, m-k in A}| / n."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    hits = sum(1 for k in range(1, m) if k in A and (m - k) in A)
    return hits / n


@dataclass(frozen=True)
class CountTable:
    """Exact counts P_0..P_max_n for one admissible set (immutable)."""

    set_id: str
    max_n: int
    counts: tuple

    def __post_init__(self):
        if len(self.counts) != self.max_n + 1:
            raise ValueError("counts must cover 0..max_n")

    def __getitem__(self, n: int) -> int:
        return self.counts[n]


def count_table(
    A: AdmissibleSet, N: int, budget: int = DEFAULT_COUNT_BUDGET
) -> CountTable:
    """Exact counts for n = 0..N via the falling-factorial recurrence."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if N > budget:
        raise ResourceLimitError(
            f"N={N} exceeds the exact-arithmetic budget {budget}; "
            "use the count cache or a smaller N"
        )
    members = A.members_upto(N)
    counts = [0] * (N + 1)
    counts[0] = 1
    for n in range(1, N + 1):
        total = 0
        ff = 1  # (n-1)!/(n-k)! maintained incrementally over admissible k
        prev = 1
        for k in members:
            if k > n:
                break
            gap = 1
            for j in range(prev, k):
                gap *= n - j
            ff *= gap
            total += ff * counts[n - k]
            prev = k
        counts[n] = total
    return CountTable(set_id=A.id, max_n=N, counts=tuple(counts))


@dataclass(frozen=True)
class CycleType:
    """Multiset of cycle lengths: parts maps length -> multiplicity."""

    parts: tuple

    def __post_init__(self):
        for k, m in self.parts:
            if k < 1 or m < 1:
                raise ValueError("cycle lengths and multiplicities must be >= 1")
        if list(self.parts) != sorted(self.parts):
            raise ValueError("parts must be sorted by cycle length")

    @classmethod
    def from_lengths(cls, lengths: Iterable[int]) -> "CycleType":
        acc: dict = {}
        for k in lengths:
            acc[k] = acc.get(k, 0) + 1
        return cls(parts=tuple(sorted(acc.items())))

    def multiplicities(self) -> Mapping[int, int]:
        return dict(self.parts)

    @property
    def n(self) -> int:
        return sum(k * m for k, m in self.parts)

    def permutation_count(self) -> int:
        """Permutations of [n] with this cycle type: n!/prod(k^m * m!)."""
        denom = 1
        for k, m in self.parts:
            denom *= k**m * math.factorial(m)
        return math.factorial(self.n) // denom


def partitions_into(A: AdmissibleSet, n: int) -> Iterator[CycleType]:
    """All partitions of n into parts from A, as cycle types."""
    members = A.members_upto(n)

    def rec(remaining, max_idx, acc):
        if remaining == 0:
            yield CycleType.from_lengths(acc)
            return
        for idx in range(max_idx, -1, -1):
            k = members[idx]
            if k <= remaining:
                acc.append(k)
                yield from rec(remaining - k, idx, acc)
                acc.pop()

    if n == 0:
        yield CycleType(parts=())
        return
    yield from rec(n, len(members) - 1, [])


def cycle_type_counts_upto(
    A: AdmissibleSet, N: int, budget: int = CYCLE_TYPE_BUDGET
) -> list:
    """Independent oracle: counts for 0..N summed over cycle types.

    Works on the exact rational weight 1/(k^m * m!) per part, descending
    through the part list with the per-part contributions memoized in the
    running coefficient array; never touches the falling-factorial
    recurrence.
    """
    if N > budget:
        raise ResourceLimitError(
            f"N={N} exceeds the cycle-type oracle budget {budget}"
        )
    coeffs = [Fraction(0)] * (N + 1)
    coeffs[0] = Fraction(1)
    for k in reversed(A.members_upto(N)):
        updated = list(coeffs)
        weight = Fraction(1)
        used = 0
        m = 0
        while used + k <= N:
            used += k
            m += 1
            weight /= k * m
            for n in range(used, N + 1):
                updated[n] += weight * coeffs[n - used]
        coeffs = updated
    out = []
    for n, c in enumerate(coeffs):
        value = math.factorial(n) * c
        assert value.denominator == 1
        out.append(value.numerator)
    return out


def count_by_cycle_types(
    A: AdmissibleSet, n: int, budget: int = CYCLE_TYPE_BUDGET
) -> int:
    """Oracle count for a single n (see cycle_type_counts_upto)."""
    return cycle_type_counts_upto(A, n, budget)[n]


def brute_force_count(A: AdmissibleSet, n: int) -> int:
    """Ground truth for tiny n: iterate all n! permutations."""
    if n > BRUTE_FORCE_MAX_N:
        raise ResourceLimitError(
            f"brute force refuses n={n} (> {BRUTE_FORCE_MAX_N}); n! is too large"
        )
    if n == 0:
        return 1
    admissible = [False] * (n + 1)
    for k in A.members_upto(n):
        admissible[k] = True
    count = 0
    for img in _all_permutations(range(n)):
        seen = [False] * n
        ok = True
        for i in range(n):
            if not seen[i]:
                length = 0
                j = i
                while not seen[j]:
                    seen[j] = True
                    j = img[j]
                    length += 1
                if not admissible[length]:
                    ok = False
                    break
        count += ok
    return count


@dataclass(frozen=True)
class FixedDecimal:
    """Decimal string of floor(value * 10^scale) / 10^scale."""

    digits: str
    scale: int

    @classmethod
    def from_ratio(cls, num: int, den: int, scale: int) -> "FixedDecimal":
        if den == 0:
            raise ZeroDivisionError("denominator must be nonzero")
        if scale < 0:
            raise ValueError("scale must be nonnegative")
        negative = (num < 0) != (den < 0)
        q = (abs(num) * 10**scale) // abs(den)  # truncation toward zero
        whole, frac = divmod(q, 10**scale)
        sign = "-" if negative and q else ""
        if scale == 0:
            return cls(digits=f"{sign}{whole}", scale=0)
        return cls(digits=f"{sign}{whole}.{frac:0{scale}d}", scale=scale)

    def as_fraction(self) -> Fraction:
        return Fraction(self.digits)

    def __str__(self) -> str:
        return self.digits


def ratio_fixed(table: CountTable, n: int, digits: int) -> FixedDecimal:
    """P_n / (n-1)! truncated to `digits` fractional digits, exactly."""
    if n == 0:
        raise ValueError("the ratio P_n/(n-1)! is undefined at n=0")
    if n > table.max_n:
        raise ResourceLimitError(f"table stops at {table.max_n}; need n={n}")
    return FixedDecimal.from_ratio(table.counts[n], math.factorial(n - 1), digits)


def partial_sum_egf(table: CountTable, N: int, digits: int) -> FixedDecimal:
    """Exact sum of P_k/k! for k = 0..N, truncated to `digits` digits."""
    if N > table.max_n:
        raise ResourceLimitError(f"table stops at {table.max_n}; need N={N}")
    scaled = 1  # running sum times n!
    for n in range(1, N + 1):
        scaled = scaled * n + table.counts[n]
    return FixedDecimal.from_ratio(scaled, math.factorial(N), digits)


def partial_sum_floats(table: CountTable, N: int) -> list:
    """Float values of the partial sums for n = 0..N (exact until rounding)."""
    if N > table.max_n:
        raise ResourceLimitError(f"table stops at {table.max_n}; need N={N}")
    out = [1.0]
    scaled = 1
    factorial = 1
    for n in range(1, N + 1):
        scaled = scaled * n + table.counts[n]
        factorial *= n
        out.append(scaled / factorial)
    return out


@dataclass(frozen=True)
class TauberianScan:
    """Coefficients h_n of (1-z) f1'(z) and the margin min over n of n*h_n."""

    coefficients: tuple
    min_margin: Fraction
    argmin: int


def tauberian_coefficients(primes1_table: CountTable, N: int) -> TauberianScan:
    """Exact h_n = (P1_{n+1} - n * P1_n)/n! for n = 1..N, plus the margin."""
    if primes1_table.set_id != "primes1":
        raise ValueError("the coefficient scan is defined on the primes1 counts")
    if N + 1 > primes1_table.max_n:
        raise ResourceLimitError(
            f"need counts to {N + 1}, table stops at {primes1_table.max_n}"
        )
    c = primes1_table.counts
    coefficients = []
    factorial = 1
    min_margin = None
    argmin = 0
    for n in range(1, N + 1):
        factorial *= n
        h = Fraction(c[n + 1] - n * c[n], factorial)
        coefficients.append(h)
        margin = n * h
        if min_margin is None or margin < min_margin:
            min_margin = margin
            argmin = n
    return TauberianScan(
        coefficients=tuple(coefficients), min_margin=min_margin, argmin=argmin
    )


def inequality_scan(
    primes1_table: CountTable,
    N: int,
    variant: str = "primes1",
    primes_table: Optional[CountTable] = None,
) -> list:
    """All n <= N violating the coefficient inequality.

    variant "primes1":     P1_{n+1} < n * P1_n
    variant "primes-rest": P1_{n+1} < n * P_n
    """
    if N + 1 > primes1_table.max_n:
        raise ResourceLimitError(
            f"need counts to {N + 1}, table stops at {primes1_table.max_n}"
        )
    c1 = primes1_table.counts
    if variant == "primes1":
        return [n for n in range(1, N + 1) if c1[n + 1] < n * c1[n]]
    if variant == "primes-rest":
        if primes_table is None or primes_table.max_n < N:
            raise ValueError("the primes-rest variant needs the primes counts")
        cp = primes_table.counts
        return [n for n in range(1, N + 1) if c1[n + 1] < n * cp[n]]
    raise ValueError(f"unknown scan variant {variant!r}")


def save_counts(table: CountTable, path: str) -> None:
    """Line-oriented count cache; counts stored as decimal strings."""
    lines = [json.dumps({"format": CACHE_FORMAT, "version": CACHE_VERSION})]
    for n, value in enumerate(table.counts):
        lines.append(
            json.dumps({"set_id": table.set_id, "n": n, "count": str(value)})
        )
    _primes.atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))


def load_counts(path: str, revalidate: bool = True) -> CountTable:
    """Load a count cache, checking contiguity and a random 5% of entries.

    Revalidation re-derives each sampled entry from the loaded lower
    entries via the recurrence; the sample is drawn from a fixed-seed
    generator so failures are reproducible.
    """
    with open(path, "r", encoding="ascii") as handle:
        lines = [line for line in handle.read().splitlines() if line.strip()]
    if not lines:
        raise CacheError(f"{path}: empty cache")
    header = json.loads(lines[0])
    if header.get("format") != CACHE_FORMAT or header.get("version") != CACHE_VERSION:
        raise CacheError(f"{path}: unrecognized cache header {header!r}")
    set_id = None
    counts = []
    for expected_n, line in enumerate(lines[1:]):
        record = json.loads(line)
        if set_id is None:
            set_id = record["set_id"]
        elif record["set_id"] != set_id:
            raise CacheError(f"{path}: mixed set ids in one cache")
        if record["n"] != expected_n:
            raise CacheError(
                f"{path}: records must be contiguous from n=0; "
                f"expected n={expected_n}, found n={record['n']}"
            )
        value = int(record["count"])
        if value < 0:
            raise CacheError(f"{path}: negative count at n={expected_n}")
        counts.append(value)
    if not counts or counts[0] != 1:
        raise CacheError(f"{path}: cache must start with P_0 = 1")
    table = CountTable(set_id=set_id, max_n=len(counts) - 1, counts=tuple(counts))
    if revalidate and table.max_n >= 1:
        _revalidate_sample(table, path)
    return table


def _revalidate_sample(table: CountTable, path: str) -> None:
    try:
        A = admissible_set(table.set_id)
    except ValueError as exc:
        raise CacheError(f"{path}: {exc}") from exc
    members = A.members_upto(table.max_n)
    rng = random.Random(0xC0C0A)
    k = max(1, (table.max_n + 19) // 20)  # ceil of 5%
    sample = rng.sample(range(1, table.max_n + 1), min(k, table.max_n))
    for n in sample:
        total = 0
        ff = 1
        prev = 1
        for member in members:
            if member > n:
                break
            gap = 1
            for j in range(prev, member):
                gap *= n - j
            ff *= gap
            total += ff * table.counts[n - member]
            prev = member
        if total != table.counts[n]:
            raise CacheError(
                f"{path}: revalidation failed at n={n} "
                f"(recurrence gives {total}, cache holds {table.counts[n]})"
            )
