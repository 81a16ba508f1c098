# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: sieves and Monte Carlo trial loops.

Twin of ``_kernels_py``; every function returns bit-identical results to
its pure-Python counterpart (enforced by tests/test_backends.py).  The
RNG is the SplitMix64 scheme documented in ``rng.py``.
"""

from cpython cimport array
from libc.stdint cimport uint64_t
from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memset

import array


cdef inline uint64_t _mix64(uint64_t x) noexcept nogil:
    x ^= x >> 30
    x *= <uint64_t>0xBF58476D1CE4E5B9
    x ^= x >> 27
    x *= <uint64_t>0x94D049BB133111EB
    return x ^ (x >> 31)


cdef inline uint64_t _stream_state(uint64_t seed, uint64_t index) noexcept nogil:
    return _mix64(seed ^ _mix64(index * <uint64_t>0xBF58476D1CE4E5B9))


cdef inline uint64_t _next64(uint64_t *state) noexcept nogil:
    state[0] += <uint64_t>0x9E3779B97F4A7C15
    return _mix64(state[0])


cdef inline uint64_t _below(uint64_t *state, uint64_t n) noexcept nogil:
    # Masked rejection; n == 1 consumes nothing (stream contract).
    cdef uint64_t m, mask, v
    if n == 1:
        return 0
    m = n - 1
    mask = 0
    while m:
        mask = (mask << 1) | 1
        m >>= 1
    while True:
        v = _next64(state) & mask
        if v < n:
            return v


def sieve_bitmap(long long limit):
    """Plain Eratosthenes sieve; returns the odd-only composite bitmap."""
    cdef long long half, nbytes, i, p, q
    cdef unsigned char *buf
    if limit < 1:
        return b""
    half = (limit + 1) // 2
    nbytes = (half + 7) // 8
    buf = <unsigned char *>calloc(nbytes, 1)
    if buf == NULL:
        raise MemoryError()
    try:
        buf[0] |= 1  # index 0 is the integer 1
        i = 1
        while True:
            p = 2 * i + 1
            if p * p > limit:
                break
            if not (buf[i >> 3] >> (i & 7)) & 1:
                q = (p * p) >> 1
                while q < half:
                    buf[q >> 3] |= <unsigned char>(1 << (q & 7))
                    q += p
            i += 1
        return buf[:nbytes]
    finally:
        free(buf)


def sieve_bitmap_segmented(long long limit, long long segment_bytes=65536):
    """Segmented sieve; output is byte-identical to sieve_bitmap(limit)."""
    cdef long long half, nbytes, seg_odds, root, rhalf, nbase, i, k
    cdef long long lo, hi, seg_len, lo_val, p, start, s, j, nb_seg, rem, b
    cdef unsigned char *flags
    cdef unsigned char byte
    cdef long long *base = NULL
    cdef bytes base_bitmap
    cdef const unsigned char *bb
    cdef bytearray out
    if limit < 1:
        return b""
    half = (limit + 1) // 2
    nbytes = (half + 7) // 8
    seg_odds = segment_bytes * 8
    root = <long long>_isqrt_ll(limit)
    nbase = 0
    if root >= 3:
        base_bitmap = sieve_bitmap(root)
        bb = base_bitmap
        rhalf = (root + 1) // 2
        base = <long long *>malloc(rhalf * sizeof(long long))
        if base == NULL:
            raise MemoryError()
        for i in range(1, rhalf):
            if not (bb[i >> 3] >> (i & 7)) & 1:
                base[nbase] = 2 * i + 1
                nbase += 1
    flags = <unsigned char *>malloc(seg_odds)
    if flags == NULL:
        free(base)
        raise MemoryError()
    out = bytearray()
    try:
        lo = 0
        while lo < half:
            hi = lo + seg_odds
            if hi > half:
                hi = half
            seg_len = hi - lo
            memset(flags, 0, seg_len)
            if lo == 0:
                flags[0] = 1
            lo_val = 2 * lo + 1
            for k in range(nbase):
                p = base[k]
                start = p * p
                if start > 2 * hi - 1:
                    break
                if start < lo_val:
                    start = ((lo_val + p - 1) // p) * p
                    if start % 2 == 0:
                        start += p
                s = (start >> 1) - lo
                while s < seg_len:
                    flags[s] = 1
                    s += p
            nb_seg = (seg_len + 7) // 8
            for j in range(nb_seg):
                byte = 0
                rem = seg_len - 8 * j
                if rem > 8:
                    rem = 8
                for b in range(rem):
                    if flags[8 * j + b]:
                        byte |= <unsigned char>(1 << b)
                out.append(byte)
            lo += seg_odds
        return bytes(out[:nbytes])
    finally:
        free(flags)
        free(base)


cdef long long _isqrt_ll(long long n) noexcept nogil:
    cdef long long r = <long long>(n ** 0.5)
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


def bitmap_to_primes(const unsigned char[:] bitmap, long long limit):
    """Materialize the ascending primes encoded by an odd-only bitmap."""
    cdef long long half, nb, count, i, j, pos
    cdef array.array out
    cdef long long *dst
    if limit < 1:
        return array.array("q")
    half = (limit + 1) // 2
    nb = bitmap.shape[0]
    count = 1 if limit >= 2 else 0
    for i in range(1, half):
        if not (bitmap[i >> 3] >> (i & 7)) & 1:
            count += 1
    out = array.array("q", bytes(8 * count))
    dst = out.data.as_longlongs
    pos = 0
    if limit >= 2:
        dst[0] = 2
        pos = 1
    for i in range(1, half):
        if not (bitmap[i >> 3] >> (i & 7)) & 1:
            dst[pos] = 2 * i + 1
            pos += 1
    return out


def trial_permutation(unsigned long long seed, unsigned long long index, long long n):
    """0-based image of the Fisher-Yates permutation of trial `index`."""
    cdef uint64_t state = _stream_state(seed, index)
    cdef long long *a
    cdef long long i, j, tmp
    cdef list result
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return []
    a = <long long *>malloc(n * sizeof(long long))
    if a == NULL:
        raise MemoryError()
    try:
        for i in range(n):
            a[i] = i
        for i in range(n - 1, 0, -1):
            j = <long long>_below(&state, <uint64_t>(i + 1))
            tmp = a[i]
            a[i] = a[j]
            a[j] = tmp
        result = [0] * n
        for i in range(n):
            result[i] = a[i]
        return result
    finally:
        free(a)


def count_trials_all_prime(
    unsigned long long seed,
    long long n,
    long long start,
    long long stop,
    const unsigned char[:] prime_mask,
):
    """Number of trials in [start, stop) whose cycle lengths are all prime."""
    cdef long long successes = 0
    cdef long long t, i, j, length, tmp
    cdef int ok
    cdef uint64_t state
    cdef long long *a
    cdef unsigned char *seen
    if prime_mask.shape[0] < n + 1:
        raise ValueError("prime_mask must cover lengths 0..n")
    if n <= 0 or stop <= start:
        return 0
    a = <long long *>malloc(n * sizeof(long long))
    seen = <unsigned char *>malloc(n)
    if a == NULL or seen == NULL:
        free(a)
        free(seen)
        raise MemoryError()
    try:
        with nogil:
            for t in range(start, stop):
                state = _stream_state(seed, <uint64_t>t)
                for i in range(n):
                    a[i] = i
                for i in range(n - 1, 0, -1):
                    j = <long long>_below(&state, <uint64_t>(i + 1))
                    tmp = a[i]
                    a[i] = a[j]
                    a[j] = tmp
                memset(seen, 0, n)
                ok = 1
                for i in range(n):
                    if not seen[i]:
                        length = 0
                        j = i
                        while not seen[j]:
                            seen[j] = 1
                            j = a[j]
                            length += 1
                        if not prime_mask[length]:
                            ok = 0
                            break
                successes += ok
        return successes
    finally:
        free(a)
        free(seen)


cdef inline long long _gcd_ll(long long a, long long b) noexcept nogil:
    cdef long long t
    while b:
        t = a % b
        a = b
        b = t
    return a


def count_trials_pair(
    unsigned long long seed,
    long long n,
    long long start,
    long long stop,
    const unsigned char[:] prime_mask,
):
    """(order == product, all lengths prime) success counts on one stream.

    order == product exactly when the cycle lengths are pairwise coprime.
    """
    cdef long long eq = 0, allprime = 0
    cdef long long t, i, j, length, tmp, ncyc, u, v
    cdef int okp, okc
    cdef uint64_t state
    cdef long long *a
    cdef long long *lengths
    cdef unsigned char *seen
    if prime_mask.shape[0] < n + 1:
        raise ValueError("prime_mask must cover lengths 0..n")
    if n <= 0 or stop <= start:
        return 0, 0
    a = <long long *>malloc(n * sizeof(long long))
    lengths = <long long *>malloc(n * sizeof(long long))
    seen = <unsigned char *>malloc(n)
    if a == NULL or lengths == NULL or seen == NULL:
        free(a)
        free(lengths)
        free(seen)
        raise MemoryError()
    try:
        with nogil:
            for t in range(start, stop):
                state = _stream_state(seed, <uint64_t>t)
                for i in range(n):
                    a[i] = i
                for i in range(n - 1, 0, -1):
                    j = <long long>_below(&state, <uint64_t>(i + 1))
                    tmp = a[i]
                    a[i] = a[j]
                    a[j] = tmp
                memset(seen, 0, n)
                ncyc = 0
                for i in range(n):
                    if not seen[i]:
                        length = 0
                        j = i
                        while not seen[j]:
                            seen[j] = 1
                            j = a[j]
                            length += 1
                        lengths[ncyc] = length
                        ncyc += 1
                okp = 1
                for u in range(ncyc):
                    if not prime_mask[lengths[u]]:
                        okp = 0
                        break
                allprime += okp
                okc = 1
                for u in range(ncyc):
                    if not okc:
                        break
                    for v in range(u + 1, ncyc):
                        if _gcd_ll(lengths[u], lengths[v]) != 1:
                            okc = 0
                            break
                eq += okc
        return eq, allprime
    finally:
        free(a)
        free(lengths)
        free(seen)
