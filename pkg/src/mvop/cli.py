"""Command dispatch and machine-readable reports.

Checks run in declaration order; every engine error becomes a failed check
carrying the error class, never a crash. The process exit status is 0 exactly
when all checks pass.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .exactalg import DecompositionError, frac
from .dsl import CheckCommand, ParseError, SpecDocument, parse_spec
from . import catalog as _catalog
from . import dwalgebra as _dw

_STATUS_PASS = "pass"
_STATUS_FAIL = "fail"
_STATUS_ERROR = "error"


def _result(name, kind, status, detail="", t0=None):
    return {
        "name": name,
        "kind": kind,
        "status": status,
        "detail": detail,
        "time_ms": round((time.monotonic() - t0) * 1000, 3) if t0 is not None else 0.0,
    }


def _flatten_report(label: str, kind: str, rep: _dw.Report, t0) -> list[dict]:
    out = []
    for c in rep.checks:
        out.append(
            _result(
                f"{label}: {c.name}",
                kind,
                _STATUS_PASS if c.ok else _STATUS_FAIL,
                c.detail,
                t0,
            )
        )
    return out


def _run_check(cmd: CheckCommand, n_max: int) -> list[dict]:
    label = cmd.label()
    t0 = time.monotonic()
    kind = cmd.kind
    vals = [a.value for a in cmd.args]
    opts = cmd.options
    try:
        if kind == "in_algebra":
            rep = _dw.verify_in_DW(vals[0], vals[1], opts.get("nmax", n_max))
            status = _STATUS_PASS if rep.ok else _STATUS_FAIL
            return [_result(label, kind, status, rep.detail, t0)]
        if kind == "symmetric":
            rep = _dw.symmetry_check(vals[0], vals[1])
            detail = "" if rep.ok else f"residual at coefficient index k in {sorted(rep.residuals)}"
            return [_result(label, kind, _STATUS_PASS if rep.ok else _STATUS_FAIL, detail, t0)]
        if kind == "darboux":
            cert = _dw.DarbouxCertificate(vals[0], vals[1], vals[2], vals[3], vals[4], n_max)
            return _flatten_report(label, kind, _dw.darboux_verify(cert), t0)
        if kind == "intertwine":
            rep = _dw.intertwiner_verify(vals[0], vals[1], vals[2], opts.get("nmax", n_max))
            detail = (
                "lambda_n = " + ", ".join(str(v) for v in rep.lambdas[: min(6, len(rep.lambdas))])
                if rep.ok
                else rep.detail
            )
            return [_result(label, kind, _STATUS_PASS if rep.ok else _STATUS_FAIL, detail, t0)]
        if kind == "search":
            basis = _dw.intertwiner_search(
                vals[0],
                vals[1],
                opts["order"],
                opts.get("slack", 0),
                opts.get("horizon"),
            )
            detail = basis.describe()
            ok = True
            if "dim" in opts:
                ok = basis.dim == opts["dim"]
                detail += f" (dim {basis.dim}, expected {opts['dim']})"
            return [_result(label, kind, _STATUS_PASS if ok else _STATUS_FAIL, detail, t0)]
        if kind == "decompose":
            try:
                p = _dw.module_decompose(vals[0], vals[1], vals[2])
                from .exactalg import poly_str

                return [_result(label, kind, _STATUS_PASS, f"p(t) = {poly_str(p)}", t0)]
            except DecompositionError as exc:
                return [_result(label, kind, _STATUS_FAIL, str(exc), t0)]
        if kind == "classify":
            got = _dw.scalar_darboux_class(vals[0], vals[1])
            ok = True
            detail = f"darboux-related: {'true' if got else 'false'}"
            if "expect" in opts:
                ok = got == opts["expect"]
            return [_result(label, kind, _STATUS_PASS if ok else _STATUS_FAIL, detail, t0)]
        if kind == "entry":
            rep = _catalog.verify_entry(vals[0], None, n_max)
            return _flatten_report(label, kind, rep, t0)
        return [_result(label, kind, _STATUS_ERROR, f"unhandled check kind {kind}", t0)]
    except Exception as exc:  # engine errors become failed checks
        return [_result(label, kind, _STATUS_ERROR, f"{type(exc).__name__}: {exc}", t0)]


def run(doc: SpecDocument, n_max: int = 8) -> dict:
    """Execute a document's checks and assemble the JSON-ready report."""
    checks: list[dict] = []
    for cmd in doc.checks:
        checks.extend(_run_check(cmd, n_max))
    ok = all(c["status"] == _STATUS_PASS for c in checks)
    return {
        "tool": "mvop",
        "version": __version__,
        "nmax": n_max,
        "ok": ok,
        "checks": checks,
    }


def _emit(report: dict, fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        text = json.dumps(report, indent=2)
    else:
        lines = []
        for c in report["checks"]:
            mark = {"pass": "PASS", "fail": "FAIL", "error": "ERROR"}[c["status"]]
            detail = f"  [{c['detail']}]" if c["detail"] else ""
            lines.append(f"{mark:5s} {c['name']}{detail}")
        lines.append(
            f"{'OK' if report['ok'] else 'FAILED'}: "
            f"{sum(1 for c in report['checks'] if c['status'] == 'pass')}"
            f"/{len(report['checks'])} checks passed (nmax={report['nmax']})"
        )
        text = "\n".join(lines)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_params(s: str | None) -> dict[str, Fraction]:
    if not s:
        return {}
    out = {}
    for piece in s.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise SystemExit(f"bad --params entry {piece!r}, expected name=value")
        k, v = piece.split("=", 1)
        out[k.strip()] = frac(v.strip())
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mvop",
        description="exact verification engine for matrix differential operators, "
        "matrix orthogonal polynomials, and Darboux transformations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--nmax", type=int, default=8, help="verification horizon (default 8)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")

    p_verify = sub.add_parser("verify", help="run the checks of a .mvop document")
    p_verify.add_argument("file")
    p_verify.add_argument("--params", default=None, help="override document parameters, k=v,...")
    add_common(p_verify)

    p_entry = sub.add_parser("entry", help="verify a catalog entry end to end")
    p_entry.add_argument("name", choices=_catalog.ENTRY_NAMES)
    p_entry.add_argument("--params", default=None, help="override entry parameters, k=v,...")
    add_common(p_entry)

    p_search = sub.add_parser("search", help="search scalar intertwiners between two weights")
    p_search.add_argument("w1", help="e.g. 'laguerre(alpha=1/2)'")
    p_search.add_argument("w2")
    p_search.add_argument("--order", type=int, required=True)
    p_search.add_argument("--slack", type=int, default=0)
    add_common(p_search)

    p_classify = sub.add_parser("classify", help="decide the Darboux class of two scalar weights")
    p_classify.add_argument("w1")
    p_classify.add_argument("w2")
    add_common(p_classify)

    args = parser.parse_args(argv)

    try:
        if args.command == "verify":
            with open(args.file, "r", encoding="utf-8") as fh:
                text = fh.read()
            doc = parse_spec(text, _parse_params(args.params))
            report = run(doc, args.nmax)
        elif args.command == "entry":
            t0 = time.monotonic()
            rep = _catalog.verify_entry(args.name, _parse_params(args.params), args.nmax)
            checks = _flatten_report(f"entry({args.name})", "entry", rep, t0)
            report = {
                "tool": "mvop",
                "version": __version__,
                "nmax": args.nmax,
                "ok": rep.ok,
                "checks": checks,
            }
        elif args.command == "search":
            text = (
                f"check search({args.w1.strip()}, {args.w2.strip()}, "
                f"order={args.order}, slack={args.slack})\n"
            )
            doc = parse_spec(text)
            report = run(doc, args.nmax)
        else:
            text = f"check classify({args.w1.strip()}, {args.w2.strip()})\n"
            doc = parse_spec(text)
            report = run(doc, args.nmax)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return 2

    _emit(report, args.format, args.out)
    return 0 if report["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
