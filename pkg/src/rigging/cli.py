"""Command-line interface: ``rigging demo|verify|check-conflict|inspect``.

Exit codes: 0 accepted / no conflict, 1 rejected, 2 input error, 3 conflict.
Nothing here opens a network connection; every command reads local files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .encoding import HashRef
from .errors import EncodingError, Rejected, RiggingError, UnknownReference
from .graph import TwistStore, fast_previous, fast_tether
from .rig import RigCert, rig_height, rig_length, verify_rig
from .scenarios import SCENARIOS, build_scenario
from .serialize import decode_rig_file, encode_rig_file
from .support import Verdict, relate

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_INPUT = 2
EXIT_CONFLICT = 3

RIG_SUFFIX = ".rig"


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "format", "text") == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _load_store(path: str) -> TwistStore:
    directory = Path(path)
    if not directory.is_dir():
        raise FileNotFoundError(f"store directory {path} does not exist")
    return TwistStore.load(directory)


def cmd_demo(args) -> int:
    try:
        scenario = build_scenario(args.scenario, seed=args.seed, k=args.k)
    except (KeyError, ValueError):
        names = ", ".join(sorted(SCENARIOS))
        print(f"unknown scenario {args.scenario!r}; choose from: {names} "
              "(spliced-chain and lashed take (k))", file=sys.stderr)
        return EXIT_INPUT
    out = Path(args.out_dir)
    scenario.store.save(out / "store")
    for name, rig in sorted(scenario.rigs.items()):
        (out / (name + RIG_SUFFIX)).write_bytes(encode_rig_file(rig))
        try:
            status = verify_rig(rig)
        except Rejected as exc:
            status = f"rejected ({exc.reason.value})"
        print(f"{name}{RIG_SUFFIX}: length {rig_length(rig)}, height {rig_height(rig)}, {status}")
    print(f"{len(scenario.store)} twists in {out / 'store'}")
    return EXIT_OK


def _read_rig(path: str, store: TwistStore) -> RigCert:
    return decode_rig_file(Path(path).read_bytes(), store)


def cmd_verify(args) -> int:
    try:
        store = _load_store(args.store)
        data = Path(args.rig).read_bytes()
    except (OSError, EncodingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        rig = decode_rig_file(data, store)
    except UnknownReference as exc:
        _emit(args, {"status": "rejected", "reason": "UnknownReference", "detail": str(exc)},
              f"rejected: UnknownReference: {exc}")
        return EXIT_REJECT
    except (EncodingError, RiggingError) as exc:
        print(f"error: corrupt rig file: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        guild = verify_rig(rig)
    except Rejected as exc:
        _emit(args, {"status": "rejected", "reason": exc.reason.value, "where": exc.where,
                     "detail": exc.detail}, f"rejected: {exc}")
        return EXIT_REJECT
    _emit(args, {"status": "accepted", "guild": guild, "length": rig_length(rig),
                 "height": rig_height(rig)}, guild)
    return EXIT_OK


def cmd_check_conflict(args) -> int:
    try:
        store = _load_store(args.store)
        rigs = [_read_rig(args.rig_a, store), _read_rig(args.rig_b, store)]
    except UnknownReference as exc:
        print(f"rejected: UnknownReference: {exc}", file=sys.stderr)
        return EXIT_REJECT
    except (OSError, EncodingError, RiggingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    status = []
    for label, rig in zip(("A", "B"), rigs):
        try:
            status.append((label, verify_rig(rig), None))
        except Rejected as exc:
            status.append((label, None, exc))
    failed = [(label, exc) for label, _, exc in status if exc is not None]
    for label, exc in failed:
        print(f"{label}: rejected: {exc}")
    if failed and not args.assume_valid:
        return EXIT_REJECT
    relation = relate(store, rigs[0], rigs[1])
    evidence = [e.hex() for e in relation.evidence]
    payload = {"verdict": relation.verdict.value, "evidence": evidence, "note": relation.note,
               "assumed_valid": [label for label, _ in failed]}
    lines = [f"{relation.verdict.value}" + (f": {relation.note}" if relation.note else "")]
    lines += [f"  {e}" for e in evidence]
    _emit(args, payload, "\n".join(lines))
    return EXIT_CONFLICT if relation.verdict is Verdict.MISALIGNED else EXIT_OK


def cmd_inspect(args) -> int:
    try:
        ref = HashRef.from_hex(args.hash)
        store = _load_store(args.store)
        t = store[ref]
    except (EncodingError, OSError, UnknownReference) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    def resolved(fn):
        try:
            return fn(store, ref).hex()
        except (RiggingError, ValueError):
            return "unresolved"

    fields = {
        "hash": ref.hex(),
        "prev": t.prev.hex(),
        "tether": t.tether.hex(),
        "rigging": t.rigging.hex(),
        "fast": t.is_fast,
        "fast_previous": resolved(fast_previous),
        "fast_tether": resolved(fast_tether) if t.is_fast else None,
    }
    if args.format == "json":
        print(json.dumps(fields, sort_keys=True))
        return EXIT_OK
    print(f"hash:    {fields['hash']}")
    print(f"prev:    {fields['prev']}")
    print("tether:  " + ("null (loose)" if t.is_loose else f"{fields['tether']} (fast)"))
    print(f"rigging: {fields['rigging']}")
    print(f"*p:      {fields['fast_previous']}")
    if t.is_fast:
        print(f"*t:      {fields['fast_tether']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rigging", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo", help="write a scenario's store and rig files")
    p.add_argument("scenario", help="half-hitch, spliced-chain(k), lashed(k), custody-transfer, double-spend")
    p.add_argument("out_dir")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("verify", help="verify a rig file against a store")
    p.add_argument("rig")
    p.add_argument("--store", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check-conflict", help="relate two rigs; exit 3 if misaligned")
    p.add_argument("rig_a")
    p.add_argument("rig_b")
    p.add_argument("--store", required=True)
    p.add_argument("--assume-valid", action="store_true",
                   help="relate the rigs even if verification fails")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_check_conflict)

    p = sub.add_parser("inspect", help="show a twist's fields")
    p.add_argument("hash")
    p.add_argument("--store", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
