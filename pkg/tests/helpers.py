import io
import json
from typing import Any, Dict, List, Tuple

from src.algebra import TimePoly


def s(i: int, j: int = 1, D=None, ns: str = "s") -> TimePoly:
    return TimePoly.var(ns, i, j, D)


def run_cli(argv: List[str]) -> Tuple[int, Dict[str, Any]]:
    from src.cli import run

    out = io.StringIO()
    code = run(argv, out)
    return code, json.loads(out.getvalue()) if out.getvalue() else {}
