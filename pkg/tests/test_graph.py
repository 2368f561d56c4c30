import pytest

from conftest import grow
from rigging.encoding import NULL, HashRef, Twist, encode_twist
from rigging.errors import EncodingError, LengthUndefined, NoFastPredecessor, NotAligned, UnknownReference
from rigging.graph import (
    TwistStore,
    aligned,
    enveloping_line,
    fast_line_length,
    fast_previous,
    fast_tether,
    is_line,
    line_between,
    precedes,
    precedes_or_equal,
)

ANCHOR = HashRef.of(b"elsewhere")


def test_put_is_content_addressed(store):
    t = Twist(NULL, ANCHOR, NULL)
    a = store.put(t)
    assert store.put(Twist(NULL, ANCHOR, NULL)) == a
    assert len(store) == 1 and store[a] == t


def test_unknown_lookup(store):
    with pytest.raises(UnknownReference):
        store[ANCHOR]


def test_precedes_along_line(store):
    line = grow(store, n=5)
    assert precedes(store, line[0], line[4])
    assert not precedes(store, line[4], line[0])
    assert not precedes(store, line[2], line[2])
    assert precedes_or_equal(store, line[2], line[2])


def test_precedes_unknown_is_not_false(store):
    line = grow(store, n=3)
    with pytest.raises(UnknownReference):
        precedes(store, line[0], ANCHOR)
    # walking back from a twist whose history is missing
    orphan = store.put(Twist(ANCHOR, NULL, NULL))
    with pytest.raises(UnknownReference):
        precedes(store, line[0], orphan)


def test_forks_resolve_locally(store):
    base = grow(store, n=2)
    left = grow(store, base[-1], 2, tag=b"L")
    right = grow(store, base[-1], 2, tag=b"R")
    assert not aligned(store, left[-1], right[-1])
    assert aligned(store, base[0], right[-1])
    assert line_between(store, base[0], right[1]) == (base[0], base[1], right[0], right[1])
    with pytest.raises(NotAligned):
        line_between(store, left[0], right[0])
    assert enveloping_line(store, [base, left]) == tuple(base + left)
    assert enveloping_line(store, [left, right]) is None


def test_enveloping_line_fills_gaps(store):
    line = grow(store, n=6)
    assert enveloping_line(store, [line[:2], line[4:]]) == tuple(line)
    assert enveloping_line(store, [line[2:3]]) == (line[2],)


def test_is_line(store):
    line = grow(store, n=4)
    assert is_line(store, line)
    assert not is_line(store, [line[0], line[2]])


def test_fast_previous_and_tether(store):
    f = store.put(Twist(NULL, ANCHOR, NULL))
    loose = grow(store, f, 2)
    x = store.put(Twist(loose[-1], loose[-1], NULL))
    assert fast_previous(store, x) == f
    assert fast_tether(store, x) == f
    y = store.put(Twist(x, f, NULL))
    assert fast_tether(store, y) == f
    with pytest.raises(ValueError):
        fast_tether(store, loose[0])
    with pytest.raises(NoFastPredecessor):
        fast_previous(store, f)


def test_fast_line_length(store):
    f = store.put(Twist(NULL, ANCHOR, NULL))
    mid = grow(store, f, 3)
    g = store.put(Twist(mid[-1], ANCHOR, NULL))
    h = store.put(Twist(g, ANCHOR, NULL))
    line = line_between(store, f, h)
    assert fast_line_length(store, line) == 2
    assert fast_line_length(store, (f,)) == 0
    with pytest.raises(LengthUndefined):
        fast_line_length(store, line[:-2])


def test_save_and_load(store, tmp_path):
    line = grow(store, n=3, tether=ANCHOR)
    store.save(tmp_path)
    loaded = TwistStore.load(tmp_path)
    assert set(loaded) == set(line)
    name = line[0].hex() + ".twist"
    (tmp_path / name).write_bytes(encode_twist(Twist()))
    with pytest.raises(EncodingError):
        TwistStore.load(tmp_path)


def test_overlay_reads_through(store):
    base = grow(store, n=2)
    view = store.overlay([Twist(base[-1], NULL, HashRef.of(b"x"))])
    assert len(view) == 3 and len(store) == 2
    root = view.put_trie({base[0]: base[1]})
    assert view.trie(root).get(base[0]) == base[1]
    with pytest.raises(UnknownReference):
        store.trie(root)
