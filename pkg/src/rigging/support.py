"""Relations between rigs, unique succession, and small-pool oracles.

:func:`relate` sorts a pair of rigs into aligned, disjoint or misaligned.
:func:`unique_successor` is the double-spend detector: accepted rigs whose
corklines lead to one twist must agree on every successor they show.
:func:`oracle_supportive` enumerates every rig over a small pool and relates
all accepted pairs.  :func:`forge_second_meet` tries the ways of certifying
a second meet for a half-hitch's lead and records what stopped each one.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum

from .encoding import NULL, HashRef, Twist
from .errors import (
    EquivocationDetected,
    Rejected,
    RiggingError,
    UnknownReference,
)
from .graph import TwistStore, enveloping_line, fast_previous, line_between, precedes, precedes_or_equal
from .hitch import HalfHitchCert, assemble_half_hitch, verify_half_hitch
from .rig import (
    HalfHitchLeaf,
    RigCert,
    half_hitch_rig,
    lash,
    rig_length,
    splice,
    verify_rig,
)
from .serialize import encode_rig
from .trie import Leaf, TrieProof

POOL_LIMIT = 14


class Verdict(str, Enum):
    DISJOINT = "Disjoint"
    ALIGNED = "Aligned"
    MISALIGNED = "Misaligned"


@dataclass(frozen=True)
class RigRelation:
    verdict: Verdict
    evidence: tuple[HashRef, ...] = ()
    note: str = ""


def _view(store: Mapping | None, *rigs: RigCert) -> TwistStore:
    twists = [t for r in rigs for t in r.twists.values()]
    if isinstance(store, TwistStore):
        return store.overlay(twists)
    view = TwistStore(twists)
    if store is not None:
        for t in store.values():
            view.put(t)
    return view


def relate(store: Mapping | None, r: RigCert, r2: RigCert) -> RigRelation:
    """Aligned if corklines and leadlines each admit an enveloping line;
    disjoint if the corklines do not, or the leadlines share no twist;
    misaligned otherwise.
    """
    view = _view(store, r, r2)
    cork = enveloping_line(view, [r.corkline, r2.corkline])
    if cork is None:
        return RigRelation(
            Verdict.DISJOINT, (r.corkline[-1], r2.corkline[-1]), "corklines are not aligned"
        )
    lead = enveloping_line(view, [r.leadline, r2.leadline])
    if lead is not None:
        return RigRelation(Verdict.ALIGNED, lead)
    common = set(r.leadline) & set(r2.leadline)
    if not common:
        return RigRelation(
            Verdict.DISJOINT, (r.leadline[-1], r2.leadline[-1]), "leadlines share no twist"
        )
    # evidence: the last common twist and the two successors that fork from it
    fork = max(common, key=r.leadline.index)
    i, j = r.leadline.index(fork), r2.leadline.index(fork)
    succ = tuple(
        line[k + 1] for line, k in ((r.leadline, i), (r2.leadline, j)) if k + 1 < len(line)
    )
    return RigRelation(Verdict.MISALIGNED, (fork,) + succ, "leadlines fork after a common twist")


def unique_successor(
    store: Mapping, z: HashRef, a0: HashRef, candidates: Iterable[RigCert], verified: bool = False
) -> HashRef | None:
    """The successor of ``a0`` shown by the candidates whose corklines end at or before ``z``.

    Candidates that fail verification are ignored unless ``verified`` says
    they were already accepted.  Raises :class:`EquivocationDetected` if two
    of them show different successors.
    """
    view = store if isinstance(store, TwistStore) else TwistStore(store.values())
    found: tuple[HashRef, RigCert] | None = None
    for cert in candidates:
        lead = cert.leadline
        if a0 not in lead or lead[-1] == a0:
            continue
        if not verified:
            try:
                verify_rig(cert)
            except Rejected:
                continue
        local = view.overlay(cert.twists.values())
        try:
            if not precedes_or_equal(local, cert.corkline[-1], z):
                continue
        except UnknownReference:
            continue
        a1 = lead[lead.index(a0) + 1]
        if found is None:
            found = (a1, cert)
        elif found[0] != a1:
            raise EquivocationDetected(a0, found, (a1, cert))
    return found[0] if found else None


# exhaustive enumeration over small pools


@dataclass
class OracleReport:
    rigs: list[RigCert] = field(default_factory=list)
    candidates: int = 0
    pairs: list[tuple[int, int, RigRelation]] = field(default_factory=list)
    equivocations: list[EquivocationDetected] = field(default_factory=list)

    @property
    def misaligned(self) -> list[tuple[int, int, RigRelation]]:
        return [p for p in self.pairs if p[2].verdict is Verdict.MISALIGNED]

    def lines(self) -> list[str]:
        """One line per related pair, stable across runs."""
        out = []
        for i, j, rel in self.pairs:
            ev = ",".join(e.short() for e in rel.evidence)
            out.append(f"{i} {j} {rel.verdict.value} {ev}")
        return out

    def to_json(self) -> str:
        return json.dumps(
            {
                "rigs": len(self.rigs),
                "candidates": self.candidates,
                "misaligned": len(self.misaligned),
                "equivocations": len(self.equivocations),
                "pairs": self.lines(),
            },
            indent=1,
        )


def _half_hitches(pool: TwistStore) -> list[RigCert]:
    refs = sorted(pool, key=lambda r: r.digest)
    out = []
    for lead in refs:
        t = pool[lead]
        if t.is_loose or t.tether not in pool:
            continue
        f = t.tether
        for meet in refs:
            try:
                if fast_previous(pool, meet) != lead or pool[meet].is_loose:
                    continue
            except (RiggingError, KeyError):
                continue
            for hoist in refs:
                try:
                    if not precedes(pool, f, hoist):
                        continue
                    leaf = half_hitch_rig(pool, f, lead, meet, hoist, cork_start=f)
                except (RiggingError, Rejected):
                    continue
                out.extend(_cork_variants(pool, leaf))
    return out


def _cork_variants(pool: TwistStore, leaf: HalfHitchLeaf) -> list[HalfHitchLeaf]:
    """The leaf with every corkline extension the pool allows."""
    half = leaf.half
    before = [half.fastener]
    cur = half.fastener
    while pool[cur].prev in pool:
        cur = pool[cur].prev
        before.append(cur)
    after = [r for r in pool if r == half.hoist or _safe_precedes(pool, half.hoist, r)]
    out = []
    for start in before:
        for end in sorted(after, key=lambda r: r.digest):
            prefix = line_between(pool, start, half.fastener)[:-1]
            suffix = line_between(pool, half.hoist, end)[1:]
            out.append(HalfHitchLeaf(half, tuple(pool[r] for r in prefix), tuple(pool[r] for r in suffix)))
    return out


def _safe_precedes(pool, a, b) -> bool:
    try:
        return precedes(pool, a, b)
    except UnknownReference:
        return False


def enumerate_rigs(pool: TwistStore, max_depth: int = 2, limit: int = 4000) -> tuple[list[RigCert], int]:
    """Every rig over ``pool`` built by at most ``max_depth`` rounds of splicing and lashing.

    Returns the accepted rigs (deduplicated by encoding, sorted by it) and
    the number of candidate derivations examined.
    """
    known: dict[bytes, RigCert] = {}
    candidates = 0
    frontier = []
    for leaf in _half_hitches(pool):
        candidates += 1
        key = encode_rig(leaf)
        if key not in known:
            known[key] = leaf
            frontier.append(leaf)
    leaves = list(frontier)
    for _ in range(max_depth):
        current = list(known.values())
        fresh = []
        for r0, r1 in itertools.product(current, repeat=2):
            if len(known) + len(fresh) >= limit:
                break
            if r0.leadline[-1] == r1.leadline[0]:
                candidates += 1
                try:
                    if rig_length(r0) == 1:
                        fresh.append(splice(r0, r1, pool))
                except (RiggingError, Rejected):
                    pass
        for h0, r1 in itertools.product(leaves, current):
            if len(known) + len(fresh) >= limit:
                break
            if h0.half.fastener in r1.leadline:
                candidates += 1
                try:
                    fresh.append(lash(h0, r1))
                except (RiggingError, Rejected):
                    pass
        added = False
        for r in fresh:
            key = encode_rig(r)
            if key not in known:
                known[key] = r
                added = True
        if not added:
            break
    accepted = []
    for key in sorted(known):
        try:
            verify_rig(known[key])
        except Rejected:
            continue
        accepted.append(known[key])
    return accepted, candidates


def oracle_supportive(pool: TwistStore, max_depth: int = 2, limit: int = 4000) -> OracleReport:
    """Relate every pair of rigs over ``pool`` and collect misaligned pairs and equivocations."""
    if len(pool) > POOL_LIMIT:
        raise ValueError(f"pool of {len(pool)} twists is too large to enumerate (limit {POOL_LIMIT})")
    rigs, candidates = enumerate_rigs(pool, max_depth, limit)
    report = OracleReport(rigs=rigs, candidates=candidates)
    for i, j in itertools.combinations(range(len(rigs)), 2):
        report.pairs.append((i, j, relate(pool, rigs[i], rigs[j])))
    ends = sorted({r.corkline[-1] for r in rigs}, key=lambda r: r.digest)
    leads = sorted({a for r in rigs for a in r.leadline[:-1]}, key=lambda r: r.digest)
    for z in ends:
        for a0 in leads:
            try:
                unique_successor(pool, z, a0, rigs, verified=True)
            except EquivocationDetected as exc:
                report.equivocations.append(exc)
    return report


# adversarial attempts on a half-hitch


@dataclass(frozen=True)
class Attempt:
    strategy: str
    accepted: bool
    reason: str = ""
    relation: Verdict | None = None

    @property
    def conflicting(self) -> bool:
        """An accepted second meet whose rig is not disjoint from the honest one."""
        return self.accepted and self.relation is not Verdict.DISJOINT


def _check(cert: HalfHitchCert) -> str:
    try:
        verify_half_hitch(cert)
    except Rejected as exc:
        return exc.reason.value
    return ""


def forge_second_meet(store: TwistStore, hh: HalfHitchCert, salt: bytes = b"") -> list[Attempt]:
    """Try to certify a meet other than ``hh.meet`` for the same fastener and lead.

    Works in an overlay, leaving ``store`` untouched.  Each attempt reports
    whether its certificate was accepted and, if so, how its rig relates to
    the honest one.
    """
    view = store.overlay()
    f, lead, hoist = hh.fastener, hh.lead, hh.hoist
    rival = view.put(Twist(lead, hh.footline[-1].tether, view.put_trie({HashRef.of(b"rival" + salt): lead})))
    honest_rig = HalfHitchLeaf(hh)
    out: list[Attempt] = []

    def record(strategy: str, cert: HalfHitchCert) -> None:
        reason = _check(cert)
        relation = None
        if not reason:
            relation = relate(view, honest_rig, HalfHitchLeaf(cert)).verdict
        out.append(Attempt(strategy, not reason, reason, relation))

    foot = (view[lead], view[rival])
    topline = hh.topline

    # a later hoist on the same topline
    later = view.put(Twist(hoist, NULL, view.put_trie({lead: rival})))
    try:
        assemble_half_hitch(view, f, lead, rival, later)
        out.append(Attempt("later-hoist/assemble", True))
    except Rejected as exc:
        out.append(Attempt("later-hoist/assemble", False, exc.reason.value))
    new_top = topline + (view[later],)
    inner = [view.trie(t.rigging).prove(lead) for t in new_top[1:-1]]
    later_proof = view.trie(view[later].rigging).prove(lead)
    record("later-hoist/inclusion-as-exclusion", HalfHitchCert(new_top, foot, later_proof, tuple(inner)))
    record("later-hoist/omit-exclusion", HalfHitchCert(new_top, foot, later_proof, tuple(inner[:-1])))
    record("later-hoist/foreign-exclusion",
           HalfHitchCert(new_top, foot, later_proof, tuple(inner[:-1]) + (TrieProof(),)))

    # the honest hoist, claimed to bind the lead to the rival meet
    p = hh.hoist_inclusion
    if isinstance(p.terminal, Leaf):
        forged = TrieProof(p.steps, Leaf(p.terminal.key, rival))
    else:
        forged = TrieProof(p.steps, Leaf(lead, rival))
    record("same-hoist/rewritten-leaf", HalfHitchCert(topline, foot, forged, hh.firstness_exclusions))
    record("same-hoist/honest-proof", HalfHitchCert(topline, foot, p, hh.firstness_exclusions))

    # hoists on a fork of the topline, at the fastener and partway along it
    for i in range(len(topline) - 1):
        branch = view.put(Twist(topline[i].ref, NULL, view.put_trie({lead: rival, HashRef.of(b"fork" + salt): branch_salt(i)})))
        label = "forked-corkline/at-fastener" if i == 0 else f"forked-corkline/at-{i}"
        try:
            cert = assemble_half_hitch(view, f, lead, rival, branch)
        except Rejected as exc:
            out.append(Attempt(label, False, exc.reason.value))
            continue
        record(label, cert)
    return out


def branch_salt(i: int) -> HashRef:
    return HashRef.of(b"branch" + i.to_bytes(4, "big"))
