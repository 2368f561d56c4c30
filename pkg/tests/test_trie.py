import random

import pytest
from hypothesis import given, settings, strategies as st

from rigging.encoding import NULL, HashRef
from rigging.errors import EncodingError, TrieError
from rigging.trie import (
    Absent,
    Branch,
    Bound,
    Invalid,
    Leaf,
    RiggingTrie,
    Step,
    TrieProof,
    decode_proof,
    trie_build,
    trie_verify,
)

V = HashRef(1, b"\xff" * 32)
K1 = HashRef(1, bytes(32))
K2 = HashRef(1, b"\x80" + bytes(31))
K4 = HashRef(1, b"\x00\x40" + bytes(30))

# roots computed with openssl from the node layout written out by hand
ROOT_BIT0 = "975c151c1ebf4ba55222c5e5ab344298c0c73f5ac54dff6d5c763bff0ea3f4dd"
ROOT_BIT9 = "5f0ebe488c890c71a1451fcba9a87ff7c02438b108738569afe9cb5d6f1157f0"
LEAF_K1 = "584f5a0d4cc4975811e1260050fbb715704c6fc35c150ad97905155241f77238"


def h(n):
    return HashRef.of(n.to_bytes(8, "big"))


def test_empty_trie_is_null():
    assert trie_build({}) == NULL
    assert trie_verify(NULL, K1, TrieProof()) == Absent()
    assert isinstance(trie_verify(NULL, K1, TrieProof((), Leaf(K1, V))), Invalid)


def test_fixed_roots():
    assert trie_build({K1: V}).hex() == LEAF_K1
    assert trie_build({K1: V, K2: V}).hex() == ROOT_BIT0
    assert trie_build({K1: V, K4: V}).hex() == ROOT_BIT9


def test_insertion_order_irrelevant():
    pairs = [(h(i), h(i + 100)) for i in range(20)]
    a = trie_build(pairs)
    random.Random(3).shuffle(pairs)
    assert trie_build(pairs) == a


def test_inclusion_and_absence():
    trie = RiggingTrie({h(i): h(-i % 97) for i in range(1, 30)})
    for i in range(1, 30):
        assert trie_verify(trie.root, h(i), trie.prove(h(i))) == Bound(h(-i % 97))
    for i in range(30, 60):
        assert trie_verify(trie.root, h(i), trie.prove(h(i))) == Absent()


def test_divergence_terminal_used():
    trie = RiggingTrie({K1: V, K4: V})
    # shares no prefix with the 9-bit branch
    probe = HashRef(1, b"\x80" + bytes(31))
    proof = trie.prove(probe)
    assert isinstance(proof.terminal, Branch) and proof.steps == ()
    assert trie_verify(trie.root, probe, proof) == Absent()


def test_proof_for_other_key_is_not_inclusion():
    trie = RiggingTrie({K1: V, K2: V})
    assert isinstance(trie_verify(trie.root, K2, trie.prove(K1)), Invalid)


def test_value_swap_invalid():
    trie = RiggingTrie({K1: V, K2: V})
    p = trie.prove(K1)
    forged = TrieProof(p.steps, Leaf(K1, K2))
    assert isinstance(trie_verify(trie.root, K1, forged), Invalid)


def test_truncated_path_invalid():
    trie = RiggingTrie({h(i): V for i in range(8)})
    p = trie.prove(h(3))
    assert p.steps
    assert isinstance(trie_verify(trie.root, h(3), TrieProof(p.steps[1:], p.terminal)), Invalid)


def test_conflicting_pairs_rejected():
    with pytest.raises(TrieError):
        RiggingTrie([(K1, V), (K1, K2)])
    with pytest.raises(TrieError):
        RiggingTrie({NULL: V})


def test_proof_encoding_round_trip():
    trie = RiggingTrie({h(i): h(i) for i in range(12)})
    for i in range(20):
        p = trie.prove(h(i))
        assert decode_proof(p.encode()) == p


@pytest.mark.parametrize("raw", [b"", b"\x00", b"\x00\x00\x07", b"\x00\x01\x03\xe0", b"\x00\x00\x00\x00"])
def test_decode_proof_strict(raw):
    with pytest.raises(EncodingError):
        decode_proof(raw)


def test_nonzero_padding_rejected():
    bad = TrieProof((Step(3, b"\x10", V),), Leaf(K1, V)).encode()
    with pytest.raises(EncodingError):
        decode_proof(bad)


def test_toy_width_collisions_and_bound():
    keys = [h(i) for i in range(200)]
    seen = {}
    distinct = []
    for k in keys:
        p = int.from_bytes(k.digest, "big") >> 252
        if p not in seen:
            seen[p] = k
            distinct.append(k)
    trie = RiggingTrie({k: V for k in distinct[:5]}, key_bits=4)
    for k in distinct[:5]:
        assert trie_verify(trie.root, k, trie.prove(k), key_bits=4) == Bound(V)
    with pytest.raises(TrieError):
        clash = next(k for k in keys if k not in distinct and (int.from_bytes(k.digest, "big") >> 252) ==
                     (int.from_bytes(distinct[0].digest, "big") >> 252))
        RiggingTrie({distinct[0]: V, clash: V}, key_bits=4)


key_sets = st.sets(st.integers(0, 10_000), min_size=0, max_size=25)


@settings(max_examples=60, deadline=None)
@given(key_sets, st.integers(0, 10_000))
def test_verify_matches_contents(members, probe):
    trie = RiggingTrie({h(i): h(i + 1) for i in members})
    verdict = trie_verify(trie.root, h(probe), trie.prove(h(probe)))
    assert verdict == (Bound(h(probe + 1)) if probe in members else Absent())


@settings(max_examples=60, deadline=None)
@given(key_sets, st.integers(0, 10_000), st.integers(0, 10_000), st.integers(0, 7))
def test_byte_mutation_never_false_bound(members, probe, where, bit):
    trie = RiggingTrie({h(i): h(i + 1) for i in members})
    raw = bytearray(trie.prove(h(probe)).encode())
    raw[where % len(raw)] ^= 1 << bit
    try:
        proof = decode_proof(bytes(raw))
    except EncodingError:
        return
    verdict = trie_verify(trie.root, h(probe), proof)
    if isinstance(verdict, Bound):
        assert probe in members and verdict.value == h(probe + 1)
