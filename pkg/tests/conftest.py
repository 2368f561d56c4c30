import pytest

from rigging.encoding import NULL, HashRef, Twist
from rigging.graph import TwistStore
from rigging.scenarios import build_scenario


def grow(store, start=NULL, n=1, tether=NULL, tag=b""):
    """Append ``n`` twists after ``start``; returns their refs."""
    out = []
    prev = start
    for i in range(n):
        rigging = HashRef.of(tag + i.to_bytes(2, "big")) if tag else NULL
        prev = store.put(Twist(prev, tether, rigging))
        out.append(prev)
    return out


@pytest.fixture
def store():
    return TwistStore()


@pytest.fixture
def minimal():
    return build_scenario("half-hitch")


@pytest.fixture
def chain3():
    return build_scenario("spliced-chain(3)")


@pytest.fixture
def tower():
    return build_scenario("lashed(2)")
