"""Toolkit for permutations with restricted cycle lengths.

Exact enumeration (arbitrary-precision counts and their ratios),
floating-point probes of the generating functions near z = 1, a
density-based asymptotic estimator, seeded Monte Carlo, and an exactly
uniform sampler.  The hot kernels (sieving, Monte Carlo trial loops) run
through a compiled extension when available, with a bit-identical
pure-Python fallback selected at import time.
"""

from ._backend import USING_COMPILED, backend_name
from .asymptotics import (
    MERTENS_CONSTANT,
    Constants,
    ProbePoint,
    RatioRow,
    constants,
    derivative_residual,
    egf,
    egf_residual,
    gamma_fn,
    limit_ratios,
    log_egf,
    log_egf_derivative,
    ratio_table_csv,
    yakymiv_ratio,
)
from .counting import (
    AdmissibleSet,
    CountTable,
    CycleType,
    FixedDecimal,
    TauberianScan,
    admissible_set,
    all_set,
    brute_force_count,
    count_by_cycle_types,
    count_table,
    cycle_type_counts_upto,
    explicit_set,
    inequality_scan,
    load_counts,
    members_upto,
    odd_set,
    pair_density,
    partial_sum_egf,
    partitions_into,
    primes1_set,
    primes_set,
    ratio_fixed,
    save_counts,
    tauberian_coefficients,
)
from .errors import (
    CacheError,
    EmptySupportError,
    NotApplicableError,
    OutOfRangeError,
    PrimeCyclesError,
    ResourceLimitError,
)
from .primes import (
    GAMMA,
    MertensReport,
    PrimeTable,
    build_prime_table,
    dump_table,
    load_table,
    mertens_constant,
    mertens_product,
    mertens_sum,
    nth_prime,
    prime_count,
)
from .rng import TrialStream
from .sampling import (
    CoincidenceSummary,
    Permutation,
    TrialSummary,
    coincidence_estimate,
    cycle_type_of,
    estimate_prime_fraction,
    order_and_product,
    sample_A_permutation,
    uniform_permutation,
    validate_permutation,
)

__version__ = "0.1.0"
