import pytest

from modelsets import Region, generate_visible, kfree_family, visible_points_family

# Number of family members whose primes cover 10^4 (the default product
# truncation used throughout the tests).
N_PRIMES_1E4 = 1229


@pytest.fixture(scope="session")
def visible():
    return visible_points_family()


@pytest.fixture(scope="session")
def kfree2():
    return kfree_family(2)


@pytest.fixture(scope="session")
def visible_r1000():
    return generate_visible(Region("box", 1000, 2))


@pytest.fixture(scope="session")
def visible_r2000():
    return generate_visible(Region("box", 2000, 2))
