"""
Command-line entry point. Every subcommand reads JSON, prints a JSON report and
exits 0 when all verdicts pass, 2 on malformed input and 3 on certification or
domain failures and failed verdicts.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from typing import Any, Dict, List, Optional

from src import operations
from src.config import CORPUS_SEED, DEFAULT_DEGREE, DEFAULT_FLOOR, DEFAULT_WINDOW, KP_WORKERS
from src.errors import KPError, SchemaError
from src.operations import Outcome
from src.report import Envelope, digest

logger = logging.getLogger(__name__)


def load_json(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise SchemaError(f"cannot read input: {e}", path) from e
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON at line {e.lineno} column {e.colno}", path) from e


class Inputs:
    """Loads the JSON inputs of one invocation and keeps a digest of each."""

    def __init__(self):
        self.digests: Dict[str, str] = {}

    def load(self, path: str) -> Any:
        data = load_json(path)
        self.digests[path] = digest(data)
        return data


# --- subcommands ---

def cmd_tau(args) -> Outcome:
    miwa = args.inputs.load(args.miwa) if args.miwa else None
    return operations.tau(args.inputs.load(args.point), args.degree, miwa, where=args.point)


def cmd_ba(args) -> Outcome:
    point = args.inputs.load(args.point)
    return operations.ba(point, args.degree, args.window, args.adjoint, args.matrix, where=args.point)


def cmd_bilinear(args) -> Outcome:
    U, U2 = args.inputs.load(args.u), args.inputs.load(args.uprime)
    return operations.bilinear(U, U2, args.degree, where=(args.u, args.uprime))


def cmd_pdo(args) -> Outcome:
    other = args.inputs.load(args.other) if args.other else None
    where = (args.op, args.other or "--other")
    return operations.pdo(args.action, args.inputs.load(args.op), args.degree, args.floor, other, where=where)


def cmd_nkp(args) -> Outcome:
    point = args.inputs.load(args.point)
    return operations.nkp(args.action, point, args.degree, args.floor, args.imax, where=args.point)


def cmd_wronskian(args) -> Outcome:
    return operations.wronskian(args.inputs.load(args.point), args.degree, where=args.point)


def cmd_krichever(args) -> Outcome:
    return operations.krichever(args.inputs.load(args.curve), (args.lo, args.hi), args.degree, where=args.curve)


def cmd_corpus(args) -> Outcome:
    return operations.corpus(args.only, args.seed, args.workers)


# --- parser ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kp", description="Exact computations for the multicomponent KP hierarchy.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tau", help="tau function of a plus-type point")
    p.add_argument("--point", required=True)
    p.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    p.add_argument("--miwa", help="JSON array t[l][j] of Miwa values")
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("ba", help="Baker-Akhiezer function")
    p.add_argument("--point", required=True)
    p.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    p.add_argument("--window", type=int, default=None, help="keep powers u^l with l >= -window")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--adjoint", action="store_true")
    group.add_argument("--matrix", action="store_true")
    p.set_defaults(func=cmd_ba)

    p = sub.add_parser("bilinear", help="residue bilinear identity for U inside U'")
    p.add_argument("--u", required=True)
    p.add_argument("--uprime", required=True)
    p.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    p.set_defaults(func=cmd_bilinear)

    p = sub.add_parser("pdo", help="pseudodifferential operator algebra")
    p.add_argument("action", choices=["compose", "adjoint", "invert"])
    p.add_argument("--op", required=True)
    p.add_argument("--other")
    p.add_argument("--floor", type=int, default=DEFAULT_FLOOR)
    p.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    p.set_defaults(func=cmd_pdo)

    p = sub.add_parser("nkp", help="Lax equations, Sato roundtrip and the bilinear lemma")
    p.add_argument("action", choices=["check", "sato", "djkm"])
    p.add_argument("--point", required=True)
    p.add_argument("--imax", type=int, default=2)
    p.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    p.add_argument("--floor", type=int, default=DEFAULT_FLOOR)
    p.set_defaults(func=cmd_nkp)

    p = sub.add_parser("wronskian", help="Wronskian embedding check")
    p.add_argument("--point", required=True)
    p.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    p.set_defaults(func=cmd_wronskian)

    p = sub.add_parser("krichever", help="Krichever pair of a rational curve with nodes")
    p.add_argument("--curve", required=True)
    p.add_argument("--lo", type=int, default=-DEFAULT_WINDOW)
    p.add_argument("--hi", type=int, default=DEFAULT_WINDOW + 1)
    p.add_argument("--degree", type=int, default=None, help="also evaluate the BA form to this degree")
    p.set_defaults(func=cmd_krichever)

    p = sub.add_parser("corpus", help="run the example catalog end to end")
    p.add_argument("--only", nargs="*")
    p.add_argument("--seed", type=int, default=CORPUS_SEED)
    p.add_argument("--workers", type=int, default=KP_WORKERS)
    p.set_defaults(func=cmd_corpus)
    return parser


def run(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    args.inputs = Inputs()
    started = time.perf_counter()
    try:
        payload, ok = args.func(args)
    except SchemaError as e:
        logger.error(f"{args.command}: {e}", exc_info=True)
        payload, code = {"error": "schema", "location": e.location, "detail": str(e)}, e.exit_code
    except KPError as e:
        logger.error(f"{args.command}: {e}", exc_info=True)
        payload = {"error": type(e).__name__, "detail": str(e), "quantity": getattr(e, "quantity", None)}
        code = e.exit_code
    else:
        code = 0 if ok else 3
    envelope = Envelope(input_digests=args.inputs.digests, timing={"seconds": round(time.perf_counter() - started, 6)})
    command = argv if argv is not None else sys.argv[1:]
    payload = {"command": command, "exit_code": code, **envelope.model_dump(), **payload}
    out.write(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
