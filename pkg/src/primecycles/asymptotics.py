"""Floating-point probes of the generating functions near z = 1.

The exponential generating function of prime-cycle permutations is
f(z) = exp(sum over primes p of z^p / p); its logarithm and derivative
are probed on the real segment (0, 1) with certified truncation tails.
The natural boundary of f sits on |z| = 1, so nothing here leaves the
real interval.

All operations are pure given immutable PrimeTable/CountTable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .counting import AdmissibleSet, CountTable, FixedDecimal
from .errors import NotApplicableError, OutOfRangeError, ResourceLimitError
from .primes import GAMMA, PrimeTable, mertens_constant

# Limit of the sieve estimate gamma + sum(log(1-1/p) + 1/p): the constant
# in  sum_{p<=y} 1/p = log log y + c + O(1/log y), to 20 digits.
MERTENS_CONSTANT = 0.26149721284764278375

PROBE_GRID_LO = 0.9
PROBE_GRID_HI = 1.0 - 1e-4


@dataclass(frozen=True)
class Constants:
    """The package's quantitative anchors, with provenance notes."""

    gamma: float
    c: float
    e_c: float
    e_c1: float
    provenance: tuple


def constants(table: PrimeTable) -> Constants:
    """Constants derived from a prime table (c via the sieve estimate)."""
    report = mertens_constant(table)
    c = report.constant_c_estimate
    return Constants(
        gamma=GAMMA,
        c=c,
        e_c=math.exp(c),
        e_c1=math.exp(c + 1.0),
        provenance=(
            ("gamma", "compiled-in 20-digit literal"),
            ("c", f"gamma + sum over primes <= {table.limit} of log(1-1/p) + 1/p"),
            ("e_c", "exp(c)"),
            ("e_c1", "exp(c+1)"),
        ),
    )


@dataclass(frozen=True)
class ProbePoint:
    """A truncated series value at z with a certified tail majorant."""

    z: float
    cutoff: int
    value: float
    tail_bound: float


def _series_cutoff(z: float, tol: float, reciprocal_weights: bool) -> int:
    """Smallest N whose tail majorant is <= tol.

    Majorants of the omitted mass past N: z^(N+1)/((N+1)(1-z)) for the
    series sum z^p/p, and z^N/(1-z) for the series sum z^(p-1).
    """
    log_z = math.log(z)
    log_gap = math.log(1.0 - z)
    log_tol = math.log(tol)

    def log_majorant(N: int) -> float:
        if reciprocal_weights:
            return (N + 1) * log_z - math.log(N + 1) - log_gap
        return N * log_z - log_gap

    lo, hi = 1, 2
    while log_majorant(hi) > log_tol:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if log_majorant(mid) <= log_tol:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _check_z(z: float) -> None:
    if not 0.0 <= z < 1.0:
        raise ValueError(f"z={z} must lie in [0, 1)")


def _require_primes(table: PrimeTable, cutoff: int, z: float, tol: float) -> None:
    if cutoff > table.limit:
        raise ResourceLimitError(
            f"probe at z={z} with tol={tol} needs primes up to {cutoff}; "
            f"the table stops at {table.limit}"
        )


def log_egf(z: float, table: PrimeTable, tol: float = 1e-12) -> ProbePoint:
    """Truncation of sum over primes of z^p / p (the log of the EGF)."""
    _check_z(z)
    if z == 0.0:
        return ProbePoint(z=0.0, cutoff=0, value=0.0, tail_bound=0.0)
    cutoff = _series_cutoff(z, tol, reciprocal_weights=True)
    _require_primes(table, cutoff, z, tol)
    value = 0.0
    for p in table.primes:
        if p > cutoff:
            break
        value += z**p / p
    tail = z ** (cutoff + 1) / ((cutoff + 1) * (1.0 - z))
    return ProbePoint(z=z, cutoff=cutoff, value=value, tail_bound=tail)


def log_egf_derivative(z: float, table: PrimeTable, tol: float = 1e-12) -> ProbePoint:
    """Truncation of sum over primes of z^(p-1)."""
    _check_z(z)
    if z == 0.0:
        return ProbePoint(z=0.0, cutoff=0, value=0.0, tail_bound=0.0)
    cutoff = _series_cutoff(z, tol, reciprocal_weights=False)
    _require_primes(table, cutoff, z, tol)
    value = 0.0
    for p in table.primes:
        if p > cutoff:
            break
        value += z ** (p - 1)
    tail = z**cutoff / (1.0 - z)
    return ProbePoint(z=z, cutoff=cutoff, value=value, tail_bound=tail)


def egf(z: float, table: PrimeTable, tol: float = 1e-12) -> ProbePoint:
    """exp of the log-EGF probe, tail propagated multiplicatively.

    The inner tolerance is tightened until the propagated bound
    exp(value) * expm1(inner tail) drops below tol.
    """
    _check_z(z)
    if z == 0.0:
        return ProbePoint(z=0.0, cutoff=0, value=1.0, tail_bound=0.0)
    inner = tol
    for _ in range(5):
        pp = log_egf(z, table, inner)
        value = math.exp(pp.value)
        tail = value * math.expm1(pp.tail_bound)
        if tail <= tol:
            return ProbePoint(z=z, cutoff=pp.cutoff, value=value, tail_bound=tail)
        inner = tol / (2.0 * value)
    raise ArithmeticError("propagated tail bound failed to converge")


def _check_grid(z: float) -> None:
    if not PROBE_GRID_LO <= z <= PROBE_GRID_HI:
        raise OutOfRangeError(
            f"residual probes support z in [{PROBE_GRID_LO}, {PROBE_GRID_HI}]; got {z}"
        )


def derivative_residual(z: float, table: PrimeTable, tol: float = 1e-12) -> float:
    """phi'(z) * (1-z) * log(1/(1-z)) - 1, the first-order probe at z."""
    _check_grid(z)
    pp = log_egf_derivative(z, table, tol)
    return pp.value * (1.0 - z) * math.log(1.0 / (1.0 - z)) - 1.0


def egf_residual(z: float, table: PrimeTable, tol: float = 1e-12) -> float:
    """f(z) - e^c * log(1/(1-z)), the order-zero probe at z."""
    _check_grid(z)
    pp = egf(z, table, tol)
    return pp.value - math.exp(MERTENS_CONSTANT) * math.log(1.0 / (1.0 - z))


# Lanczos approximation, g = 7 with 9 coefficients: comfortably beyond 10
# significant digits on the positive real axis.
_LANCZOS_G = 7
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma function for x > 0 (Lanczos; reflection below 1/2)."""
    if x <= 0:
        raise ValueError(f"gamma_fn needs x > 0, got {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    series = _LANCZOS_COEFFS[0]
    for i, coeff in enumerate(_LANCZOS_COEFFS[1:], start=1):
        series += coeff / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * series


def yakymiv_ratio(
    A: AdmissibleSet, n: int, table: Optional[PrimeTable] = None
) -> float:
    """Density-based estimate of P_n divided by n!.

    For a set of density rho > 0 this is n^(rho-1) * exp(L(n) - gamma*rho)
    / Gamma(rho) with L(n) = sum of 1/k over members k <= n minus
    rho*log(n).  Sets of density zero (or unknown density) are rejected:
    the estimate does not apply to them.  `table` is accepted for
    interface symmetry; builtin sets enumerate their own members.
    """
    del table
    if n < 1:
        raise ValueError("n must be positive")
    rho = A.density
    if not rho:
        raise NotApplicableError(
            f"the density estimate needs density > 0; set {A.id!r} has {rho!r}"
        )
    reciprocal_sum = 0.0
    for k in A.members_upto(n):
        reciprocal_sum += 1.0 / k
    big_l = reciprocal_sum - rho * math.log(n)
    return n ** (rho - 1.0) * math.exp(big_l - GAMMA * rho) / gamma_fn(rho)


@dataclass(frozen=True)
class RatioRow:
    """One row of the convergence table at index n."""

    n: int
    r_primes: FixedDecimal
    r_primes1: FixedDecimal
    transfer: float
    rg: float
    conjecture_diag: float


def _big_ratio(num: int, den: int) -> float:
    if den == 0:
        return math.inf if num > 0 else math.nan
    return num / den


def limit_ratios(
    primes_table: CountTable,
    primes1_table: CountTable,
    N: int,
    digits: int = 10,
) -> list:
    """Rows (n, P_n/(n-1)!, P1_n/(n-1)!, P1_n/(e P_n), n P1_n/P1_{n+1}, diag).

    The diagnostic column is (P_n/(n-1)! - e^c) * log log n; it has no
    assertion attached (the convergence rate is too slow for a desk-scale
    threshold) and is nan for n = 1.
    """
    if N > primes_table.max_n or N + 1 > primes1_table.max_n:
        raise ResourceLimitError(
            f"need primes counts to {N} and primes1 counts to {N + 1}"
        )
    e_c = math.exp(MERTENS_CONSTANT)
    rows = []
    factorial = 1  # (n-1)!
    for n in range(1, N + 1):
        p_n = primes_table.counts[n]
        p1_n = primes1_table.counts[n]
        r_primes = FixedDecimal.from_ratio(p_n, factorial, digits)
        r_primes1 = FixedDecimal.from_ratio(p1_n, factorial, digits)
        transfer = _big_ratio(p1_n, p_n) / math.e if p_n else math.inf
        rg = _big_ratio(n * p1_n, primes1_table.counts[n + 1])
        if n >= 2:
            diag = (_big_ratio(p_n, factorial) - e_c) * math.log(math.log(n))
        else:
            diag = math.nan
        rows.append(
            RatioRow(
                n=n,
                r_primes=r_primes,
                r_primes1=r_primes1,
                transfer=transfer,
                rg=rg,
                conjecture_diag=diag,
            )
        )
        factorial *= n
    return rows


RATIO_CSV_HEADER = "n,r_primes,r_primes1,transfer,rg,conjecture_diag"


def ratio_table_csv(rows) -> str:
    """CSV rendering; floats carry 10 fractional digits, '.' separator."""
    lines = [RATIO_CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.n},{row.r_primes},{row.r_primes1},"
            f"{row.transfer:.10f},{row.rg:.10f},{row.conjecture_diag:.10f}"
        )
    return "\n".join(lines) + "\n"
