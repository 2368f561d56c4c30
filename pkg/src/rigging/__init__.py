"""Hash-linked twists, hitches and rigs with offline-verifiable certificates."""

from .encoding import NULL, HashRef, Twist, decode_twist, encode_twist, hash_twist
from .errors import (
    ConstructionError,
    EncodingError,
    EquivocationDetected,
    Reason,
    Rejected,
    RiggingError,
    UnknownReference,
)
from .graph import TwistStore
from .rig import (
    HalfHitchLeaf,
    LashNode,
    RigCert,
    SpliceNode,
    half_hitch_rig,
    lash,
    lashable,
    rig_height,
    rig_length,
    splice,
    spliceable,
    tetherline,
    verify_rig,
)
from .trie import RiggingTrie, trie_verify

__version__ = "0.1.0"

__all__ = [
    "ConstructionError",
    "EncodingError",
    "EquivocationDetected",
    "HalfHitchLeaf",
    "HashRef",
    "LashNode",
    "NULL",
    "Reason",
    "Rejected",
    "RigCert",
    "RiggingError",
    "RiggingTrie",
    "SpliceNode",
    "Twist",
    "TwistStore",
    "UnknownReference",
    "decode_twist",
    "encode_twist",
    "half_hitch_rig",
    "hash_twist",
    "lash",
    "lashable",
    "rig_height",
    "rig_length",
    "splice",
    "spliceable",
    "tetherline",
    "trie_verify",
    "verify_rig",
]
