import pytest

import primecycles as pc


@pytest.fixture(scope="session")
def table_1e6():
    return pc.build_prime_table(10**6)


@pytest.fixture(scope="session")
def table_5e6():
    return pc.build_prime_table(5 * 10**6)


@pytest.fixture(scope="session")
def primes_counts():
    """Exact prime-cycle counts P_0..P_2001."""
    return pc.count_table(pc.primes_set(), 2001)


@pytest.fixture(scope="session")
def primes1_counts():
    """Exact counts with fixed points allowed, P1_0..P1_2001."""
    return pc.count_table(pc.primes1_set(), 2001)


@pytest.fixture(scope="session")
def odd_counts():
    return pc.count_table(pc.odd_set(), 801)
