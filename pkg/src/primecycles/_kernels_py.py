"""Pure-Python fallback for the compiled kernels.

Every function here has a twin in the Cython module ``_kernels``; inputs
and outputs are bit-identical between the two (enforced by tests), so the
choice of backend never changes a result, only its speed.

Sieve bitmaps cover the odd integers only: bit ``i`` (LSB-first within
each byte) stands for the integer ``2*i + 1`` and is set when that
integer is composite (or equals 1).  The prime 2 is handled separately.
"""

from array import array
from math import gcd, isqrt

from .rng import TrialStream

_CLEAR_BITS = tuple(
    tuple(b for b in range(8) if not (v >> b) & 1) for v in range(256)
)


def _pack_odd_flags(flags: bytearray) -> bytes:
    """Pack 0/1 byte flags into an LSB-first bit array."""
    nb = (len(flags) + 7) // 8
    if nb == 0:
        return b""
    big = int.from_bytes(bytes(flags).ljust(8 * nb, b"\x00"), "little")
    acc = big
    for shift in range(7, 50, 7):
        acc |= big >> shift
    keep = int.from_bytes((b"\xff" + b"\x00" * 7) * nb, "little")
    return (acc & keep).to_bytes(8 * nb, "little")[::8]


def sieve_bitmap(limit: int) -> bytes:
    """Plain Eratosthenes sieve; returns the odd-only composite bitmap."""
    if limit < 1:
        return b""
    half = (limit + 1) // 2
    flags = bytearray(half)
    flags[0] = 1
    i = 1
    while True:
        p = 2 * i + 1
        if p * p > limit:
            break
        if not flags[i]:
            start = (p * p) >> 1
            flags[start::p] = b"\x01" * len(range(start, half, p))
        i += 1
    return _pack_odd_flags(flags)


def sieve_bitmap_segmented(limit: int, segment_bytes: int = 65536) -> bytes:
    """Segmented sieve; output is byte-identical to sieve_bitmap(limit)."""
    if limit < 1:
        return b""
    half = (limit + 1) // 2
    nbytes = (half + 7) // 8
    seg_odds = segment_bytes * 8
    root = isqrt(limit)
    base = []
    if root >= 3:
        base_bitmap = sieve_bitmap(root)
        rhalf = (root + 1) // 2
        base = [
            2 * i + 1
            for i in range(1, rhalf)
            if not (base_bitmap[i >> 3] >> (i & 7)) & 1
        ]
    out = bytearray()
    for lo in range(0, half, seg_odds):
        hi = min(lo + seg_odds, half)
        flags = bytearray(hi - lo)
        if lo == 0:
            flags[0] = 1
        lo_val = 2 * lo + 1
        for p in base:
            start = p * p
            if start > 2 * hi - 1:
                break
            if start < lo_val:
                start = ((lo_val + p - 1) // p) * p
                if start % 2 == 0:
                    start += p
            s = (start >> 1) - lo
            if s < len(flags):
                flags[s::p] = b"\x01" * len(range(s, len(flags), p))
        out += _pack_odd_flags(flags)
    return bytes(out[:nbytes])


def bitmap_to_primes(bitmap: bytes, limit: int) -> array:
    """Materialize the ascending primes encoded by an odd-only bitmap."""
    primes = array("q")
    if limit >= 2:
        primes.append(2)
    half = (limit + 1) // 2
    for j, byte in enumerate(bitmap):
        base = 8 * j
        for b in _CLEAR_BITS[byte]:
            i = base + b
            if 0 < i < half:
                primes.append(2 * i + 1)
    return primes


def trial_permutation(seed: int, index: int, n: int) -> list:
    """0-based image of the Fisher-Yates permutation of trial `index`."""
    return _fill_permutation(TrialStream.for_trial(seed, index), n)


def _fill_permutation(stream: TrialStream, n: int) -> list:
    a = list(range(n))
    for i in range(n - 1, 0, -1):
        j = stream.below(i + 1)
        a[i], a[j] = a[j], a[i]
    return a


def _cycle_lengths(a: list) -> list:
    n = len(a)
    seen = bytearray(n)
    lengths = []
    for i in range(n):
        if not seen[i]:
            length = 0
            j = i
            while not seen[j]:
                seen[j] = 1
                j = a[j]
                length += 1
            lengths.append(length)
    return lengths


def count_trials_all_prime(
    seed: int, n: int, start: int, stop: int, prime_mask: bytes
) -> int:
    """Number of trials in [start, stop) whose cycle lengths are all prime."""
    if len(prime_mask) < n + 1:
        raise ValueError("prime_mask must cover lengths 0..n")
    if n <= 0 or stop <= start:
        return 0
    successes = 0
    for t in range(start, stop):
        a = trial_permutation(seed, t, n)
        if all(prime_mask[length] for length in _cycle_lengths(a)):
            successes += 1
    return successes


def count_trials_pair(
    seed: int, n: int, start: int, stop: int, prime_mask: bytes
) -> tuple:
    """(order == product, all lengths prime) success counts on one stream.

    The order of a permutation is the lcm of its cycle lengths and equals
    their product exactly when the lengths are pairwise coprime.
    """
    if len(prime_mask) < n + 1:
        raise ValueError("prime_mask must cover lengths 0..n")
    if n <= 0 or stop <= start:
        return 0, 0
    eq = allprime = 0
    for t in range(start, stop):
        lengths = _cycle_lengths(trial_permutation(seed, t, n))
        if all(prime_mask[length] for length in lengths):
            allprime += 1
        if _pairwise_coprime(lengths):
            eq += 1
    return eq, allprime


def _pairwise_coprime(lengths: list) -> bool:
    for i in range(len(lengths)):
        li = lengths[i]
        for j in range(i + 1, len(lengths)):
            if gcd(li, lengths[j]) != 1:
                return False
    return True
