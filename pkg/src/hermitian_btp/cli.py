"""Command-line entry point.

Exit codes: 0 when every check the command asserts passes, 1 when one fails,
2 for unreadable input, schema violations and unmet preconditions.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

import numpy as np

from . import catalog, classifier, jsonio
from .chart_lab import vaisman_pde_sweep
from .errors import BTPError, Indeterminate, InvalidParameter, NotValidated, PreconditionFailed
from .identities import btp_identities, identity_suite
from .tensor_core import DEFAULT_TOL

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class CommandResult:
    def __init__(self, data: dict, ok: bool):
        self.data = data
        self.ok = ok


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(np.real(x)), float(np.imag(x))]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _render(data: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    for k, v in data.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.extend(_render(v, indent + 1))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}:")
            for item in v:
                lines.append(f"{pad}  -")
                lines.extend(_render(item, indent + 2))
        elif isinstance(v, float):
            lines.append(f"{pad}{k}: {v:.6e}")
        else:
            lines.append(f"{pad}{k}: {v}")
    return lines


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> CommandResult:
    S = jsonio.load(args.file)
    r = S.report
    data = {
        "name": S.name, "n": S.n,
        "d2_residual": r.d2_residual,
        "worst_generator": None if r.worst_generator is None else r.worst_generator + 1,
        "integrable": r.integrable,
        "mm_max": r.g_max,
        "d2_zero": r.passed,
        "passed": r.passed and r.integrable,
    }
    return CommandResult(data, data["passed"])


def _consistency(S, rep: classifier.ClassificationReport, tol: float) -> dict[str, bool]:
    f = rep.flags
    checks = {
        "btp_direct_vs_curvature_conditions": f["btp_direct"] == f["btp_thm11"],
        "btp_and_pluriclosed_vs_bkl": (f["btp_direct"] and f["pluriclosed"]) == f["bkl"],
    }
    if rep.threefold_case not in (None, classifier.NOT_APPLICABLE):
        checks["case1_vs_bkl"] = (rep.threefold_case == classifier.CASE1) == f["bkl"]
    r = classifier.vaisman_eigenvalue_residual(S, tol)
    if r is not None:
        checks["vaisman_eigenvalues_vs_lee_parallel"] = classifier.verdict("vaisman_eigenvalues", r, tol) == f["vaisman"]
    return checks


def cmd_classify(args) -> CommandResult:
    S = jsonio.load(args.file)
    rep = classifier.classify(S, args.tol)
    checks = _consistency(S, rep, args.tol)
    data = rep.to_dict()
    data["consistency"] = checks
    return CommandResult(data, all(checks.values()))


def cmd_identities(args) -> CommandResult:
    S = jsonio.load(args.file)
    S.require_geometric()
    res = dict(identity_suite(S))
    btp = classifier.is_btp_direct(S, args.tol).flag
    if btp:
        res.update(btp_identities(S))
    worst = max(res.values(), default=0.0)
    data = {"name": S.name, "n": S.n, "btp": btp, "residuals": res, "max_residual": worst}
    return CommandResult(data, worst < args.tol)


def cmd_theorem11(args) -> CommandResult:
    S = jsonio.load(args.file)
    S.require_geometric()
    th = classifier.theorem11_conditions(S, args.tol)
    direct = classifier.is_btp_direct(S, args.tol)
    data = {
        "name": S.name,
        "conditions": th.residuals,
        "conditions_hold": th.flag,
        "btp_direct": direct.flag,
        "btp_direct_residual": direct.residual,
        "equivalent": th.flag == direct.flag,
    }
    return CommandResult(data, th.flag == direct.flag)


def cmd_threefold(args) -> CommandResult:
    S = jsonio.load(args.file)
    S.require_geometric()
    tf = classifier.threefold_case(S, args.tol)
    bkl = classifier.is_bkl(S, args.tol)[0]
    data = {
        "name": S.name,
        "case": tf.case,
        "s": tf.s, "t": tf.t,
        "abs_s": abs(tf.s), "abs_t": abs(tf.t),
        "a1": tf.a[0], "a2": tf.a[1],
        "bkl": bkl,
        "case1_matches_bkl": (tf.case == classifier.CASE1) == bkl,
    }
    return CommandResult(data, data["case1_matches_bkl"])


def _parse_param(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected k=v, got {text!r}")
    k, v = text.split("=", 1)
    try:
        val = complex(v.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"value for {k!r} is not a number: {v!r}") from None
    if val.imag == 0:
        val = val.real
        if val == int(val) and "." not in v and "e" not in v.lower():
            val = int(val)
    return k.strip(), val


def cmd_catalog(args) -> CommandResult:
    if args.action == "list":
        data = {"entries": [{"name": k, "defaults": dict(d)} for k, (_, d) in catalog.BUILDERS.items()]}
        return CommandResult(data, True)
    if not args.name:
        raise InvalidParameter("catalog emit needs an entry name")
    entry = catalog.build(args.name, **dict(args.param or []))
    return CommandResult(jsonio.to_document(entry.S), True)


def _center(text: str) -> np.ndarray:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"center must be comma-separated reals, got {text!r}") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("center needs four numbers: a_re,a_im,b_re,b_im")
    return np.array([vals[0] + 1j * vals[1], vals[2] + 1j * vals[3]])


def cmd_chart(args) -> CommandResult:
    sw = vaisman_pde_sweep(args.center, args.samples, args.seed)
    data = {
        "field": "u = -1/2 log(|z1 - a|^2 + |z2 - b|^2)",
        "center": [complex(c) for c in sw.center],
        "samples": sw.samples,
        "max_residual": sw.max_residual,
        "worst_point": None if sw.worst_point is None else [complex(c) for c in sw.worst_point],
        "passed": sw.max_residual < args.tol,
    }
    return CommandResult(data, data["passed"])


def cmd_fuzz(args) -> CommandResult:
    rng = np.random.default_rng(args.seed)
    rows = []
    failures = 0
    for m in range(args.count):
        n = args.n if args.n is not None else int(rng.integers(2, 6))
        r = args.r if args.r is not None else int(rng.integers(1, n))
        S = catalog.random_2step(int(rng.integers(2**31)), n, r)
        worst = max(identity_suite(S).values())
        try:
            agree = classifier.theorem11_conditions(S, args.tol).flag == classifier.is_btp_direct(S, args.tol).flag
            note = ""
        except Indeterminate as exc:
            agree, note = False, str(exc)
        ok = worst < args.tol and agree
        failures += not ok
        rows.append({"structure": S.name, "identity_max": worst, "theorem11_agrees": agree, "ok": ok, "note": note})
    data = {"count": args.count, "failures": failures, "results": rows}
    return CommandResult(data, failures == 0)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="decision tolerance (default 1e-9)")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="hermitian-btp", description="Torsion, curvature and classification of left-invariant Hermitian structures.")
    sub = p.add_subparsers(dest="command", required=True)

    def file_cmd(name, fn, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.add_argument("file")
        sp.set_defaults(func=fn)

    file_cmd("validate", cmd_validate, "check d^2 = 0 and integrability")
    file_cmd("classify", cmd_classify, "full classification report")
    file_cmd("identities", cmd_identities, "residual table of the universal identities")
    file_cmd("theorem11", cmd_theorem11, "curvature conditions vs direct torsion-parallel test")
    file_cmd("threefold", cmd_threefold, "case label of a non-balanced BTP threefold")

    sp = sub.add_parser("catalog", parents=[common], help="list or emit example structures")
    sp.add_argument("action", choices=["list", "emit"])
    sp.add_argument("name", nargs="?")
    sp.add_argument("--param", action="append", type=_parse_param, metavar="K=V")
    sp.set_defaults(func=cmd_catalog)

    sp = sub.add_parser("chart", parents=[common], help="pointwise checks on conformal charts")
    sp.add_argument("kind", choices=["vaisman"])
    sp.add_argument("--center", type=_center, required=True, metavar="A_RE,A_IM,B_RE,B_IM")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_chart)

    sp = sub.add_parser("fuzz", parents=[common], help="identities and curvature test on random structures")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=50)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--r", type=int, default=None)
    sp.set_defaults(func=cmd_fuzz)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad usage, 0 on --help
        return int(exc.code or 0)
    try:
        result = args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotValidated as exc:
        print(f"error: precondition failed: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Indeterminate as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except PreconditionFailed as exc:
        print(f"error: precondition failed ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BTPError, ValueError) as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_INPUT
    data = _jsonable(result.data)
    if args.json or (args.command == "catalog" and args.action == "emit"):
        print(json.dumps(data, indent=1))
    else:
        print("\n".join(_render(data)))
    return EXIT_OK if result.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
