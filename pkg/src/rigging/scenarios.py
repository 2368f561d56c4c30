"""Seeded generators of twist stores and rigs.

:class:`Loom` grows lines ("strands") in a store.  Every strand except the
root is fastened to a parent strand: each of its fast twists is tethered to
the parent's current head.  After a strand adds fast twist ``m`` following
fast twist ``l``, the parent publishes a hoist binding ``l`` to ``m``, and
the strand's next fast twist (the post) binds ``l`` to that hoist.  The
resulting half-hitches and hitches can be assembled into rigs with
:func:`piece_rig` and :func:`line_rig`.

Named scenarios return a :class:`Scenario` holding the store and rigs.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .encoding import NULL, HashRef, Twist
from .errors import RiggingError
from .graph import TwistStore, fast_previous, line_between
from .hitch import HalfHitchCert, HitchCert, assemble_half_hitch, extend_to_hitch
from .rig import HalfHitchLeaf, LashNode, RigCert, half_hitch_rig, lash, splice
from .trie import RiggingTrie

ANCHOR = HashRef.of(b"rigging: root strand anchor")
ROOT = "Z"


@dataclass
class HitchRecord:
    fastener: HashRef
    lead: HashRef
    meet: HashRef
    hoist: HashRef | None = None
    post: HashRef | None = None


@dataclass
class Strand:
    name: str
    parent: str | None
    head: HashRef | None = None
    fast: list[HashRef] = field(default_factory=list)


class Loom:
    """Grows fastened strands; deterministic for a given seed."""

    def __init__(self, seed: int = 0, noise: float = 0.0, store: TwistStore | None = None):
        self.rng = random.Random(seed)
        self.noise = noise
        self.store = store if store is not None else TwistStore()
        self.strands: dict[str, Strand] = {ROOT: Strand(ROOT, None)}
        self.records: dict[HashRef, HitchRecord] = {}  # keyed by lead
        self.strand_of: dict[HashRef, str] = {}
        self._pending_hoists: dict[str, dict[HashRef, HashRef]] = {}
        self._pending_posts: dict[str, dict[HashRef, HashRef]] = {}
        self._salt = 0

    # primitive appends

    def append(self, strand: str, tether: HashRef = NULL, bindings=None) -> HashRef:
        s = self.strands[strand]
        rigging = self.store.put_trie(bindings) if bindings else NULL
        t = Twist(s.head if s.head is not None else NULL, tether, rigging)
        ref = self.store.put(t)
        s.head = ref
        self.strand_of[ref] = strand
        if t.is_fast:
            s.fast.append(ref)
        return ref

    def loose(self, strand: str, n: int = 1) -> None:
        """Append ``n`` loose twists carrying junk bindings."""
        for _ in range(n):
            self._salt += 1
            key = HashRef.of(b"noise" + self._salt.to_bytes(8, "big"))
            self.append(strand, bindings={key: key} if self.rng.random() < 0.5 else None)

    def _noise(self, strand: str) -> None:
        while self.noise and self.rng.random() < self.noise:
            self.loose(strand)

    def add_strand(self, name: str, parent: str) -> None:
        self.strands[name] = Strand(name, parent)

    # fastening

    def fasten(self, strand: str, parent: str | None = None) -> HashRef:
        """Append a fast twist to ``strand`` tethered to the head of ``parent``.

        ``parent`` defaults to the strand's current parent; passing another
        strand re-fastens it there from now on.
        """
        s = self.strands[strand]
        if parent is not None:
            s.parent = parent
        self._noise(strand)
        if s.parent is None:
            tether = ANCHOR if strand == ROOT else HashRef.of(ANCHOR.digest + strand.encode())
        else:
            p = self.strands[s.parent]
            if p.head is None:
                self.fasten(s.parent)
            self._noise(s.parent)
            tether = p.head
        bindings = self._pending_posts.pop(strand, None)
        previous = s.fast[-1] if s.fast else None
        ref = self.append(strand, tether, bindings)
        if previous is not None:
            for lead, hoist in (bindings or {}).items():
                if self.records[lead].meet == previous:
                    self.records[lead].post = ref
            fastener = self.store[previous].tether
            self.records[previous] = HitchRecord(fastener, previous, ref)
            if fastener in self.strand_of:
                home = self.strand_of[fastener]
                self._pending_hoists.setdefault(home, {})[previous] = ref
        return ref

    def hoist(self, strand: str) -> HashRef | None:
        """Publish every pending binding on ``strand`` in one loose twist."""
        pending = self._pending_hoists.pop(strand, None)
        if not pending:
            return None
        self._noise(strand)
        ref = self.append(strand, bindings=pending)
        for lead in pending:
            rec = self.records[lead]
            rec.hoist = ref
            home = self.strand_of[lead]
            self._pending_posts.setdefault(home, {})[lead] = ref
        return ref

    def settle(self) -> None:
        """Publish the pending hoists of every strand."""
        for name in list(self.strands):
            self.hoist(name)

    # queries

    def half_hitch(self, lead: HashRef) -> HalfHitchCert:
        rec = self.records[lead]
        return assemble_half_hitch(self.store, rec.fastener, rec.lead, rec.meet, rec.hoist)

    def hitch(self, lead: HashRef) -> HitchCert:
        rec = self.records[lead]
        return extend_to_hitch(self.store, self.half_hitch(lead), rec.post)

    def pieces(self, strand: str) -> list[HashRef]:
        """Leads on ``strand`` whose half-hitch is complete (hoist published)."""
        return [r for r in self.strands[strand].fast if r in self.records and self.records[r].hoist]


def weave(loom: Loom, strand: str, steps: int) -> None:
    """Grow ``strand`` by ``steps`` half-hitches, hoisting each on its fastener line."""
    for _ in range(steps):
        loom.fasten(strand)
        loom.settle()
    loom.fasten(strand)
    loom.settle()


def piece_rig(loom: Loom, lead: HashRef) -> RigCert:
    """A rig whose leadline is the piece ``[lead, meet]``, its corkline on a root-level line."""
    leaf, upper = lash_pair(loom, lead)
    return leaf if upper is None else lash(leaf, upper)


def lash_pair(loom: Loom, lead: HashRef) -> tuple[HalfHitchLeaf, RigCert | None]:
    """The piece's half-hitch rig and, if its fastener is not on a root-level
    line, the rig it lashes onto: the fastener's line from ``*t(lead)`` to
    the first fast twist at or after the hoist.
    """
    store = loom.store
    rec = loom.records[lead]
    home = loom.strand_of.get(rec.fastener)
    leaf = half_hitch_rig(store, rec.fastener, rec.lead, rec.meet, rec.hoist)
    if home is None or loom.strands[home].parent is None:
        return leaf, None
    start = rec.fastener if store[rec.fastener].is_fast else fast_previous(store, rec.fastener)
    end = next(
        (r for r in loom.strands[home].fast if r != start and _precedes_or_equal(store, rec.hoist, r)),
        None,
    )
    if end is None:
        raise RiggingError("upper strand has not fastened past the hoist yet")
    return leaf, line_rig(loom, start, end)


def _precedes_or_equal(store, a, b) -> bool:
    try:
        line_between(store, a, b)
        return True
    except RiggingError:
        return False


def line_rig(loom: Loom, start: HashRef, end: HashRef) -> RigCert:
    """Splice the pieces of the line ``[start, ..., end]`` (fast endpoints) into one rig."""
    store = loom.store
    line = line_between(store, start, end)
    fast = [r for r in line if store[r].is_fast]
    pieces = [piece_rig(loom, r) for r in fast[:-1]]
    if not pieces:
        raise RiggingError("a rig needs a line of length at least 1")
    rig = pieces[-1]
    for piece in reversed(pieces[:-1]):
        rig = splice(piece, rig, store)
    return rig


# named scenarios


@dataclass
class Scenario:
    name: str
    store: TwistStore
    rigs: dict[str, RigCert]
    notes: dict[str, object] = field(default_factory=dict)


def half_hitch_scenario(seed: int = 0) -> Scenario:
    """The smallest half-hitch: fastener, lead, meet and hoist, four twists in all."""
    store = TwistStore()
    salt = random.Random(seed).randbytes(8)
    f = store.put(Twist(NULL, HashRef.of(b"anchor" + salt), NULL))
    lead = store.put(Twist(NULL, f, NULL))
    meet = store.put(Twist(lead, f, NULL))
    hoist = store.put(Twist(f, NULL, store.put_trie({lead: meet})))
    rig = half_hitch_rig(store, f, lead, meet, hoist)
    return Scenario("half-hitch", store, {"half-hitch": rig},
                    {"fastener": f, "lead": lead, "meet": meet, "hoist": hoist})


def spliced_chain_scenario(k: int = 3, seed: int = 0, noise: float = 0.3) -> Scenario:
    """A strand fastened to the root, its first ``k`` pieces spliced into one rig."""
    if k < 1:
        raise ValueError("k must be at least 1")
    loom = Loom(seed, noise)
    loom.add_strand("A", ROOT)
    loom.fasten(ROOT)
    weave(loom, "A", k)
    fast = loom.strands["A"].fast
    rig = line_rig(loom, fast[0], fast[k])
    return Scenario(f"spliced-chain({k})", loom.store, {"chain": rig}, {"loom": loom})


def lashed_scenario(k: int = 2, seed: int = 0, noise: float = 0.3) -> Scenario:
    """A tower of ``k`` strands, each fastened to the one above; the bottom piece's rig has height ``k``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    loom = Loom(seed, noise)
    loom.fasten(ROOT)
    names = [ROOT] + [f"S{i}" for i in range(1, k + 1)]
    for parent, name in zip(names, names[1:]):
        loom.add_strand(name, parent)
    bottom = names[-1]
    # two pieces on the bottom strand, then keep every strand above fastening
    # until each has moved past the hoists published on it
    loom.fasten(bottom)
    loom.fasten(bottom)
    for _ in range(k + 1):
        loom.settle()
        for name in reversed(names[1:]):
            loom.fasten(name)
    loom.settle()
    for name in names[1:]:
        loom.fasten(name)
    lead = loom.strands[bottom].fast[0]
    rig = piece_rig(loom, lead)
    return Scenario(f"lashed({k})", loom.store, {"tower": rig}, {"loom": loom})


def custody_transfer_scenario(seed: int = 0, noise: float = 0.3) -> Scenario:
    """A strand fastened to intermediate ``P`` that moves to intermediate ``Q`` mid-rig."""
    loom = Loom(seed, noise)
    loom.fasten(ROOT)
    loom.add_strand("P", ROOT)
    loom.add_strand("Q", ROOT)
    loom.add_strand("A", "P")
    loom.fasten("P")
    loom.fasten("Q")
    loom.fasten("A")
    loom.fasten("A")
    loom.settle()
    loom.fasten("A", parent="Q")
    loom.settle()
    loom.fasten("A")
    loom.settle()
    for _ in range(3):
        loom.fasten("P")
        loom.fasten("Q")
        loom.settle()
    fast = loom.strands["A"].fast
    rig = line_rig(loom, fast[0], fast[3])
    return Scenario("custody-transfer", loom.store, {"transfer": rig},
                    {"loom": loom, "intermediates": ("P", "Q")})


def double_spend_scenario(seed: int = 0, noise: float = 0.0) -> Scenario:
    """Two successors of one twist presented against one corkline.

    The honest meet is hoisted first.  The rival meet is hoisted later on
    the same topline, so its certificate can only be completed by passing
    the honest hoist's inclusion proof off as an exclusion.
    """
    loom = Loom(seed, noise)
    loom.add_strand("A", ROOT)
    loom.fasten(ROOT)
    a0 = loom.fasten("A")
    honest = loom.fasten("A")
    store = loom.store
    f = store[a0].tether
    rival = store.put(Twist(a0, f, store.put_trie({HashRef.of(b"rival payee"): a0})))
    h1 = loom.hoist(ROOT)
    loom.loose(ROOT)
    h2 = loom.append(ROOT, bindings={a0: rival})
    loom.fasten(ROOT)
    honest_rig = half_hitch_rig(store, f, a0, honest, h1)
    good = assemble_half_hitch(store, f, a0, honest, h1)
    topline = line_between(store, f, h2)
    exclusions = []
    for ref in topline[1:-1]:
        # the honest hoist binds a0, so the forger substitutes its inclusion proof
        exclusions.append(store.trie(store[ref].rigging).prove(a0))
    forged_half = HalfHitchCert(
        tuple(store[r] for r in topline),
        tuple(store[r] for r in line_between(store, a0, rival)),
        store.trie(store[h2].rigging).prove(a0),
        tuple(exclusions),
    )
    forged_rig = HalfHitchLeaf(forged_half)
    assert good.meet == honest
    return Scenario(
        "double-spend",
        store,
        {"honest": honest_rig, "rival": forged_rig},
        {"a0": a0, "honest": honest, "rival": rival},
    )


def corkline_reuse_scenario(seed: int = 0, noise: float = 0.3) -> Scenario:
    """A half-hitch whose footline lies on the corkline of the rig it is lashed to.

    The root line itself is briefly fastened to strand ``P``, so the bottom
    half-hitch's lead and meet sit on the root line, inside the corkline of
    the rig supporting ``P``.  The lash is assembled without the builder's
    checks; a verifier must refuse it.
    """
    loom = Loom(seed, noise)
    loom.fasten(ROOT)
    loom.add_strand("P", ROOT)
    loom.fasten("P")
    lead = loom.fasten(ROOT, parent="P")
    loom.fasten(ROOT)
    loom.strands[ROOT].parent = None
    for _ in range(3):
        loom.settle()
        loom.fasten("P")
    loom.settle()
    loom.fasten("P")
    store = loom.store
    leaf, upper = lash_pair(loom, lead)
    return Scenario("corkline-reuse", store, {"reuse": LashNode(leaf.half, upper), "upper": upper,
                                              "bottom": leaf}, {"loom": loom, "lead": lead})


def forked_scenario(seed: int = 0, noise: float = 0.3) -> Scenario:
    """A strand that moves from the root line to a fork of it partway through."""
    loom = Loom(seed, noise)
    z0 = loom.fasten(ROOT)
    loom.fasten(ROOT)
    loom.strands["Y"] = Strand("Y", None, head=z0)
    loom.fasten("Y")
    loom.add_strand("A", ROOT)
    weave(loom, "A", 2)
    loom.fasten("A", parent="Y")
    loom.settle()
    loom.fasten("A")
    loom.settle()
    loom.fasten("A")
    loom.settle()
    fast = loom.strands["A"].fast
    pieces = [piece_rig(loom, r) for r in fast[:4]]
    return Scenario("forked", loom.store, {f"piece{i}": p for i, p in enumerate(pieces)},
                    {"loom": loom})


SCENARIOS = {
    "half-hitch": half_hitch_scenario,
    "spliced-chain": spliced_chain_scenario,
    "lashed": lashed_scenario,
    "custody-transfer": custody_transfer_scenario,
    "double-spend": double_spend_scenario,
}

_NAME = re.compile(r"^([a-z-]+?)(?:\((\d+)\))?$")


def build_scenario(name: str, seed: int = 0, k: int | None = None) -> Scenario:
    """Build a scenario by name; ``"spliced-chain(3)"`` is ``name + k``."""
    m = _NAME.match(name.strip())
    if not m or m.group(1) not in SCENARIOS:
        raise KeyError(name)
    base, arg = m.group(1), m.group(2)
    if arg is not None:
        k = int(arg)
    fn = SCENARIOS[base]
    if base in ("spliced-chain", "lashed"):
        return fn(k if k is not None else (3 if base == "spliced-chain" else 2), seed=seed)
    if arg is not None:
        raise KeyError(name)
    return fn(seed=seed)


def trie_of(store: TwistStore, ref: HashRef) -> RiggingTrie:
    return store.trie(store[ref].rigging)


def random_pool(seed: int, max_twists: int = 12) -> TwistStore:
    """A small store mixing honest hitches with forks and repeated hoists.

    One root line (fast twists tethered off-store) and one strand fastened
    to it.  Either line may fork; hoists bind pending leads to any meet seen
    for them, so a lead with two meets gets bound twice, as a double spend
    would need.
    """
    rng = random.Random(seed)
    store = TwistStore()
    root = [store.put(Twist(NULL, ANCHOR, NULL))]
    strand: list[HashRef] = []
    pending: list[tuple[HashRef, HashRef]] = []
    hoisted: list[tuple[HashRef, HashRef]] = []

    def pick(line: list[HashRef]) -> HashRef:
        return rng.choice(line) if rng.random() < 0.25 else line[-1]

    while len(store) < max_twists:
        op = rng.choices(("fast", "hoist", "root-loose", "loose", "root-fast"), (5, 4, 2, 1, 1))[0]
        if op == "fast" or not strand:
            prev = pick(strand) if strand else NULL
            bindings = {l: h for l, h in hoisted if rng.random() < 0.7}
            t = Twist(prev, pick(root), store.put_trie(bindings) if bindings else NULL)
            ref = store.put(t)
            if ref in strand:
                continue
            if not prev.is_null:
                try:
                    pending.append((fast_previous(store, ref), ref))
                except RiggingError:
                    pass
            strand.append(ref)
        elif op == "hoist" and pending:
            chosen = {}
            for lead, meet in rng.sample(pending, k=min(len(pending), rng.randint(1, 2))):
                chosen.setdefault(lead, meet)
            ref = store.put(Twist(pick(root), NULL, store.put_trie(chosen)))
            root.append(ref)
            hoisted.extend((l, ref) for l in chosen)
        elif op == "root-fast":
            root.append(store.put(Twist(pick(root), ANCHOR, NULL)))
        elif op == "loose" and strand:
            strand.append(store.put(Twist(pick(strand), NULL, NULL)))
        else:
            root.append(store.put(Twist(pick(root), NULL, NULL)))
    return store
