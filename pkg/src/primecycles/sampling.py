"""Monte Carlo estimators over uniform permutations and an exact sampler.

Trial i of a run with seed s draws its entire randomness from the stream
(s, i) (see rng.py), so estimates depend only on (seed, trials): chunking
the trial range or changing worker counts cannot change a result, and
reports are byte-identical across runs.

The exact sampler inverts integer cumulative weights against the exact
count tables; no floating point touches the distribution.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

from ._backend import kernels
from .counting import AdmissibleSet, CountTable, CycleType
from .errors import EmptySupportError
from .primes import build_prime_table
from .rng import TrialStream


@dataclass(frozen=True)
class Permutation:
    """A bijection of [n]; image[i] is where i+1 is sent (values 1..n)."""

    image: tuple

    @property
    def n(self) -> int:
        return len(self.image)


def validate_permutation(perm: Permutation) -> None:
    n = perm.n
    seen = bytearray(n + 1)
    for v in perm.image:
        if not isinstance(v, int) or not 1 <= v <= n or seen[v]:
            raise ValueError(f"image {perm.image!r} is not a bijection of [{n}]")
        seen[v] = 1


def uniform_permutation(n: int, stream: TrialStream) -> Permutation:
    """Fisher-Yates shuffle driven by the given stream."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return Permutation(image=())
    values = list(range(n))
    for i in range(n - 1, 0, -1):
        j = stream.below(i + 1)
        values[i], values[j] = values[j], values[i]
    return Permutation(image=tuple(v + 1 for v in values))


def trial_permutation(seed: int, index: int, n: int) -> Permutation:
    """The permutation of trial `index` under `seed` (backend kernel)."""
    zero_based = kernels.trial_permutation(seed, index, n)
    return Permutation(image=tuple(v + 1 for v in zero_based))


def cycle_type_of(perm: Permutation) -> CycleType:
    """Multiset of cycle lengths of a valid permutation."""
    validate_permutation(perm)
    n = perm.n
    seen = bytearray(n + 1)
    lengths = []
    for start in range(1, n + 1):
        if not seen[start]:
            length = 0
            j = start
            while not seen[j]:
                seen[j] = 1
                j = perm.image[j - 1]
                length += 1
            lengths.append(length)
    return CycleType.from_lengths(lengths)


def order_and_product(perm: Permutation) -> tuple:
    """(lcm of cycle lengths, product of cycle lengths), exactly."""
    ct = cycle_type_of(perm)
    order = 1
    product = 1
    for k, m in ct.parts:
        order = math.lcm(order, k)
        product *= k**m
    return order, product


@dataclass(frozen=True)
class TrialSummary:
    """A Bernoulli estimate with its binomial standard error."""

    n: int
    trials: int
    successes: int
    estimate: float
    std_error: float
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "successes": self.successes,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "seed": self.seed,
        }


def _summary(n: int, trials: int, successes: int, seed: int) -> TrialSummary:
    estimate = successes / trials
    std_error = math.sqrt(estimate * (1.0 - estimate) / trials)
    return TrialSummary(
        n=n,
        trials=trials,
        successes=successes,
        estimate=estimate,
        std_error=std_error,
        seed=seed,
    )


def _prime_mask(n: int) -> bytes:
    table = build_prime_table(max(n, 2))
    mask = bytearray(n + 1)
    for p in table.primes:
        if p > n:
            break
        mask[p] = 1
    return bytes(mask)


def estimate_prime_fraction(n: int, trials: int, seed: int) -> TrialSummary:
    """Fraction of uniform permutations of [n] with all cycle lengths prime."""
    if n < 1:
        raise ValueError("n must be positive")
    if trials < 1:
        raise ValueError("trials must be positive")
    successes = kernels.count_trials_all_prime(seed, n, 0, trials, _prime_mask(n))
    return _summary(n, trials, successes, seed)


@dataclass(frozen=True)
class CoincidenceSummary:
    """Paired estimates on one sample stream, plus their difference."""

    order_equals_product: TrialSummary
    all_lengths_prime: TrialSummary
    difference: float

    def to_json_dict(self) -> dict:
        return {
            "order_equals_product": self.order_equals_product.to_json_dict(),
            "all_lengths_prime": self.all_lengths_prime.to_json_dict(),
            "difference": self.difference,
        }


def coincidence_estimate(n: int, trials: int, seed: int) -> CoincidenceSummary:
    """P(order = product of cycle lengths) and P(all lengths prime).

    Both events are evaluated on the same permutations, so the difference
    column is free of between-run noise.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if trials < 1:
        raise ValueError("trials must be positive")
    eq, allprime = kernels.count_trials_pair(seed, n, 0, trials, _prime_mask(n))
    s_eq = _summary(n, trials, eq, seed)
    s_pr = _summary(n, trials, allprime, seed)
    return CoincidenceSummary(
        order_equals_product=s_eq,
        all_lengths_prime=s_pr,
        difference=s_eq.estimate - s_pr.estimate,
    )


def sample_A_permutation(
    n: int, A: AdmissibleSet, counts: CountTable, stream: TrialStream
) -> Permutation:
    """Exactly uniform sample from the permutations of [n] with cycle
    lengths in A.

    The cycle through the smallest unplaced element gets length k with
    probability (m-1)!/(m-k)! * P_{m-k} / P_m (m elements remaining),
    chosen by drawing a uniform integer below P_m and walking the exact
    cumulative weights; the remaining cycle members are then drawn
    without replacement, which realizes both the choice of members and
    the cycle's internal order.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > counts.max_n:
        raise ValueError(f"counts table stops at {counts.max_n}; need {n}")
    if counts.counts[n] == 0:
        raise EmptySupportError(
            f"no permutations of [{n}] have all cycle lengths in {A.id!r}"
        )
    image = [0] * (n + 1)
    pool = list(range(1, n + 1))
    while pool:
        m = len(pool)
        anchor = pool[0]
        target = stream.big_below(counts.counts[m])
        rest = pool[1:]
        chosen = None
        cumulative = 0
        ff = 1
        prev = 1
        for k in A.members_upto(m):
            gap = 1
            for j in range(prev, k):
                gap *= m - j
            ff *= gap
            cumulative += ff * counts.counts[m - k]
            prev = k
            if target < cumulative:
                chosen = k
                break
        if chosen is None:
            raise AssertionError(
                "cumulative weights fell short of the count table "
                "(corrupted counts?)"
            )
        cycle = [anchor]
        for _ in range(chosen - 1):
            cycle.append(rest.pop(stream.below(len(rest))))
        for src, dst in zip(cycle, cycle[1:] + [anchor]):
            image[src] = dst
        pool = rest
    return Permutation(image=tuple(image[1:]))


def summary_to_json(summary) -> str:
    """Deterministic one-line JSON for a summary object."""
    return json.dumps(summary.to_json_dict())


CSV_HEADER = "n,trials,successes,estimate,std_error,seed"


def summaries_to_csv(summaries: Iterable[TrialSummary]) -> str:
    lines = [CSV_HEADER]
    for s in summaries:
        lines.append(
            f"{s.n},{s.trials},{s.successes},{s.estimate!r},{s.std_error!r},{s.seed}"
        )
    return "\n".join(lines) + "\n"
