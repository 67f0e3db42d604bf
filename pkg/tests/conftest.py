import pytest

from porosity import Q, SetSpec, doubled_gap_set, example_ratio_vanishing, make_set

SUPER_N2 = SetSpec("super-geometric", {"exponent_coeffs": [0, 0, 1]})
FACTORIAL = SetSpec("factorial-decay", {})
GEO_HALF = SetSpec("geometric", {"ratio": "1/2"})


@pytest.fixture
def geo_half():
    return make_set(GEO_HALF)


@pytest.fixture
def w_n2():
    return example_ratio_vanishing(SUPER_N2)


@pytest.fixture
def w_factorial():
    return example_ratio_vanishing(FACTORIAL)


@pytest.fixture
def doubled2():
    return doubled_gap_set(SUPER_N2, Q(2))


@pytest.fixture
def doubled3():
    return doubled_gap_set(SUPER_N2, Q(3))
