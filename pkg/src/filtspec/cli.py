"""Command-line interface: ``filtspec {validate,pages,converge,check}``.

Exit codes: 0 on success, 1 when the input cannot be read or parsed, 2 when
the complex violates an invariant, convergence fails, or a check fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import TextIO

from filtspec import checks
from filtspec import specseq as ss
from filtspec.complex import FilteredComplex, validate
from filtspec.document import (
    DocumentError,
    convergence_record,
    page_record,
    parse_document,
)

EXIT_OK, EXIT_PARSE, EXIT_FAIL = 0, 1, 2


class _Abort(Exception):
    def __init__(self, code: int, message: str):
        self.code, self.message = code, message


def _load(path: str) -> FilteredComplex:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _Abort(EXIT_PARSE, f"error: cannot read {path}: {exc.strerror}") from exc
    try:
        return parse_document(text).to_complex()
    except DocumentError as exc:
        raise _Abort(EXIT_PARSE, f"error: {path}: {exc}") from exc


def _load_valid(path: str) -> FilteredComplex:
    fc = _load(path)
    report = validate(fc)
    if not report.ok:
        raise _Abort(EXIT_FAIL, report.describe())
    return fc


def _label(r) -> str:
    return "inf" if r == math.inf else str(int(r))


def render_page(fc: FilteredComplex, pg: ss.Page) -> str:
    """A grid of dimensions, ``p`` across and ``q`` down, then nonzero differentials."""
    lines = [f"E^{_label(pg.r)}"]
    if sum(fc.chain.dims) == 0:
        lines.append("  (empty)")
        return "\n".join(lines)
    ps = range(fc.p_min, fc.p_max + 1)
    qs = range(fc.n_max - fc.p_min, fc.n_min - fc.p_max - 1, -1)
    width = max(3, *(len(str(p)) + 1 for p in ps), *(len(str(q)) + 1 for q in qs))
    lines.append("q\\p".rjust(width) + "".join(str(p).rjust(width) for p in ps))
    for q in qs:
        cells = [
            str(pg.dim(p, q)) if fc.n_min <= p + q <= fc.n_max else "."
            for p in ps
        ]
        lines.append(str(q).rjust(width) + "".join(c.rjust(width) for c in cells))
    nonzero = pg.nonzero_differentials()
    for (p, q), m in sorted(nonzero.items()):
        lines.append(f"  d^{_label(pg.r)}: ({p},{q}) -> ({p - pg.r},{q + pg.r - 1})  rank {m.rank}")
    if pg.r != math.inf and not nonzero:
        lines.append("  no nonzero differentials")
    return "\n".join(lines)


def render_convergence(report: ss.ConvergenceReport) -> str:
    lines = ["(p,q)  E^inf  gr_pH"]
    for (p, q), (a, b) in sorted(report.pairs.items()):
        if a or b:
            lines.append(f"({p},{q})".ljust(7) + str(a).rjust(5) + str(b).rjust(7))
    for n, h in sorted(report.homology_dims.items()):
        steps = " ".join(f"p={p}:{d}" for p, d in sorted(report.filtration_dims[n].items()))
        lines.append(f"H_{n}: dim {h}; dim F_pH/im d: {steps}")
    lines.extend(f"failure: {f}" for f in report.failures)
    lines.append(f"verdict: {'true' if report.verdict else 'false'}")
    return "\n".join(lines)


def _stages(fc: FilteredComplex, max_r: int | None) -> list:
    top = ss.stabilization_index(fc)
    if max_r is not None:
        top = min(max_r, top)
    return [*range(0, top + 1), math.inf]


def cmd_validate(args, out: TextIO) -> int:
    report = validate(_load(args.path))
    out.write(report.describe() + "\n")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_pages(args, out: TextIO) -> int:
    fc = _load_valid(args.path)
    pages = [ss.page(fc, r) for r in _stages(fc, args.max_r)]
    if args.format == "machine":
        records = [page_record(pg) for pg in pages]
        records[-1]["convergence"] = convergence_record(ss.convergence_report(fc))
        # one compact record per line
        out.write("".join(json.dumps(rec, separators=(",", ":")) + "\n" for rec in records))
    else:
        out.write("\n\n".join(render_page(fc, pg) for pg in pages) + "\n")
    return EXIT_OK


def cmd_converge(args, out: TextIO) -> int:
    report = ss.convergence_report(_load_valid(args.path))
    out.write(render_convergence(report) + "\n")
    return EXIT_OK if report.verdict else EXIT_FAIL


def _tally_lines(group: str, tallies) -> list[str]:
    lines = []
    for name, t in tallies.items():
        status = "PASS" if t.failed == 0 else "FAIL"
        lines.append(f"{status}  {group:<8} {name:<22} {t.passed:>5} passed {t.failed:>5} failed")
        lines.extend(f"      {ex}" for ex in t.examples)
    return lines


def cmd_check(args, out: TextIO) -> int:
    if (args.path is None) == (not args.random):
        raise _Abort(EXIT_PARSE, "error: give either a path or --random")
    if args.random:
        lat = checks.run_lattice_suite(
            args.trials, args.seed, primes=(args.prime,) if args.prime else (2, 3, 5)
        )
        cpx = checks.run_complex_suite(
            checks.random_complexes(
                args.trials, args.seed, (args.prime,) if args.prime else (2, 3), args.max_dim, 4
            )
        )
        lines = _tally_lines("lattice", lat) + _tally_lines("complex", cpx)
        ok = checks.all_passed(lat, cpx)
    else:
        fc = _load_valid(args.path)
        cpx = checks.run_complex_suite([fc])
        lines = _tally_lines("complex", cpx)
        ok = checks.all_passed(cpx)
    out.write("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def _nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="filtspec", description="Spectral sequences of filtered complexes over F_p.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a complex document")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("pages", help="print the pages E^0 .. E^r_stab and E^inf")
    p.add_argument("path")
    p.add_argument("--max-r", type=_nonnegative, default=None, help="last finite page to print")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.set_defaults(func=cmd_pages)

    p = sub.add_parser("converge", help="compare E^inf with the graded homology")
    p.add_argument("path")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("check", help="run the invariant suite on a document or on random inputs")
    p.add_argument("path", nargs="?")
    p.add_argument("--random", action="store_true")
    p.add_argument("--trials", type=_nonnegative, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prime", type=int, default=None, help="restrict random inputs to one prime")
    p.add_argument("--max-dim", type=_nonnegative, default=10)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except _Abort as exc:
        (out if exc.code == EXIT_FAIL else err).write(exc.message + "\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
