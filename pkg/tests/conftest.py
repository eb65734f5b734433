import pytest

from arcsched.instance import Instance, make_instance, parse_instance

DEMO_TEXT = "4 2\n2 4\n5 7\n1 1\n4 3\n"


@pytest.fixture
def demo() -> Instance:
    """Four jobs, two machines: (p, w) = (2,4), (5,7), (1,1), (4,3)."""
    return parse_instance(DEMO_TEXT)


@pytest.fixture
def single_machine_triple() -> Instance:
    """Three identical jobs (p=2, w=5) on one machine."""
    return make_instance(1, [(2, 5), (2, 5), (2, 5)])
