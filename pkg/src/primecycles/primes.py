"""Prime tables and the Mertens-type partial sums, products and constant.

A ``PrimeTable`` is built once by a sieve (plain or segmented; both
strategies produce identical bit-packed tables) and is immutable
afterwards, so any number of readers may query it concurrently.  All
query operations are pure.
"""

from __future__ import annotations

import math
import os
import struct
import tempfile
from array import array
from bisect import bisect_right
from dataclasses import dataclass, field

from ._backend import kernels
from .errors import CacheError, OutOfRangeError, ResourceLimitError

# Euler's constant to 20 digits; enough that the error of the constant-c
# estimate is dominated by the sieve tail, not by gamma itself.
GAMMA = 0.57721566490153286061

MAX_SIEVE_LIMIT = 100_000_000
DEFAULT_SIEVE_LIMIT = 1_000_000
# Plain sieving is fine while the whole bitmap fits comfortably in cache
# hierarchies; past this the segmented strategy wins.
_PLAIN_STRATEGY_CUTOFF = 1 << 24

TABLE_MAGIC = b"PCT1"


@dataclass(frozen=True)
class PrimeTable:
    """Immutable ascending table of all primes up to `limit`."""

    limit: int
    primes: array = field(repr=False)
    count: int
    bitmap: bytes = field(repr=False)

    def is_prime(self, k: int) -> bool:
        """Membership test for 0 <= k <= limit."""
        if k > self.limit:
            raise OutOfRangeError(f"{k} exceeds the table limit {self.limit}")
        if k < 2:
            return False
        if k % 2 == 0:
            return k == 2
        i = k >> 1
        return not (self.bitmap[i >> 3] >> (i & 7)) & 1


def build_prime_table(
    limit: int, strategy: str = "auto", segment_bytes: int = 65536
) -> PrimeTable:
    """Sieve all primes up to `limit`.

    strategy: "plain", "segmented", or "auto" (plain for small limits).
    """
    if limit < 0:
        raise ValueError("limit must be nonnegative")
    if limit > MAX_SIEVE_LIMIT:
        raise ResourceLimitError(
            f"sieve limit {limit} exceeds the maximum supported limit "
            f"{MAX_SIEVE_LIMIT}"
        )
    if strategy == "auto":
        strategy = "plain" if limit <= _PLAIN_STRATEGY_CUTOFF else "segmented"
    if strategy == "plain":
        bitmap = kernels.sieve_bitmap(limit)
    elif strategy == "segmented":
        bitmap = kernels.sieve_bitmap_segmented(limit, segment_bytes)
    else:
        raise ValueError(f"unknown sieve strategy {strategy!r}")
    primes = kernels.bitmap_to_primes(bitmap, limit)
    return PrimeTable(limit=limit, primes=primes, count=len(primes), bitmap=bytes(bitmap))


def prime_count(table: PrimeTable, y: float) -> int:
    """The step function pi(y): number of primes <= y."""
    if y > table.limit:
        raise OutOfRangeError(f"pi({y}) needs a table past {table.limit}")
    if y < 2:
        return 0
    return bisect_right(table.primes, math.floor(y))


def nth_prime(table: PrimeTable, k: int) -> int:
    """The k-th smallest prime (k = 1 gives 2)."""
    if not 1 <= k <= table.count:
        raise OutOfRangeError(
            f"table holds {table.count} primes; index {k} is out of range"
        )
    return table.primes[k - 1]


def _primes_upto(table: PrimeTable, y: float):
    if not 2 <= y <= table.limit:
        raise OutOfRangeError(f"y={y} outside the table range [2, {table.limit}]")
    idx = bisect_right(table.primes, math.floor(y))
    return table.primes[:idx]


def mertens_sum(table: PrimeTable, y: float) -> float:
    """Sum of 1/p over primes p <= y, accumulated in ascending order."""
    s = 0.0
    for p in _primes_upto(table, y):
        s += 1.0 / p
    return s


def mertens_product(table: PrimeTable, y: float) -> float:
    """Product of (1 - 1/p) over primes p <= y, ascending."""
    s = 1.0
    for p in _primes_upto(table, y):
        s *= 1.0 - 1.0 / p
    return s


@dataclass(frozen=True)
class MertensReport:
    limit: int
    sum_reciprocals: float
    product_one_minus: float
    constant_c_estimate: float
    gamma_used: float


def mertens_constant(table: PrimeTable) -> MertensReport:
    """Estimate of c = gamma + sum over primes of (log(1 - 1/p) + 1/p).

    Every summand is negative, so the estimate decreases strictly as the
    sieve limit grows; the neglected tail past N is about -1/(2 N log N).
    No tail correction is applied.
    """
    if table.limit < 2:
        raise OutOfRangeError("constant estimate needs a table with limit >= 2")
    sum_recip = 0.0
    product = 1.0
    acc = 0.0
    for p in table.primes:
        inv = 1.0 / p
        sum_recip += inv
        product *= 1.0 - inv
        acc += math.log1p(-inv) + inv
    return MertensReport(
        limit=table.limit,
        sum_reciprocals=sum_recip,
        product_one_minus=product,
        constant_c_estimate=GAMMA + acc,
        gamma_used=GAMMA,
    )


def atomic_write_bytes(path: str, data: bytes) -> None:
    """Write via a temp file in the target directory plus rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_table(table: PrimeTable, path: str) -> None:
    """Binary table cache: magic "PCT1", LE u64 limit and count, bitmap."""
    header = TABLE_MAGIC + struct.pack("<QQ", table.limit, table.count)
    atomic_write_bytes(path, header + table.bitmap)


def load_table(path: str) -> PrimeTable:
    """Load a table written by dump_table; revalidates the prime count."""
    with open(path, "rb") as handle:
        blob = handle.read()
    if blob[:4] != TABLE_MAGIC:
        raise CacheError(f"{path}: not a prime table cache (bad magic)")
    if len(blob) < 20:
        raise CacheError(f"{path}: truncated header")
    limit, count = struct.unpack("<QQ", blob[4:20])
    bitmap = blob[20:]
    half = (limit + 1) // 2
    if len(bitmap) != (half + 7) // 8:
        raise CacheError(f"{path}: bitmap length does not match the stored limit")
    primes = kernels.bitmap_to_primes(bitmap, limit)
    if len(primes) != count:
        raise CacheError(
            f"{path}: stored count {count} disagrees with bitmap ({len(primes)})"
        )
    return PrimeTable(limit=limit, primes=primes, count=count, bitmap=bitmap)
