"""Regenerate tests/golden from tests/fixtures.

Every page dimension is checked against the enumeration oracle first; nothing
is written if any of them disagree. Run from the repository root:

    python3 tests/regen_golden.py
"""

from __future__ import annotations

import io
import json
import math
import sys
from pathlib import Path

from filtspec import cli, oracle
from filtspec import specseq as ss
from filtspec.complex import validate
from filtspec.document import DocumentError, parse_document

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
GOLDEN = HERE / "golden"

# command line -> golden file suffix
COMMANDS = {
    ("validate",): "validate.txt",
    ("pages",): "pages.txt",
    ("pages", "--format", "machine"): "pages.jsonl",
    ("converge",): "converge.txt",
}


def run(args: list[str]) -> tuple[int, str]:
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(args, out=out, err=err)
    return code, out.getvalue() + err.getvalue()


def oracle_disagreements(path: Path) -> list[str]:
    try:
        fc = parse_document(path.read_text()).to_complex()
    except DocumentError:
        return []
    if not validate(fc).ok:
        return []
    bad = []
    for r in [*range(ss.stabilization_index(fc) + 1), math.inf]:
        for (p, q), e in ss.page(fc, r).entries.items():
            want = oracle.brute_page_dim(fc, p, q, r)
            if e.dim != want:
                bad.append(f"{path.name}: E^{r}_({p},{q}) = {e.dim}, oracle {want}")
    return bad


def golden_outputs() -> dict[str, str]:
    files = {}
    for path in sorted(FIXTURES.glob("*.yaml")):
        for args, suffix in COMMANDS.items():
            code, text = run([args[0], str(path.relative_to(HERE.parent)), *args[1:]])
            files[f"{path.stem}.{suffix}"] = f"exit {code}\n{text}"
    return files


def main() -> int:
    bad = [m for path in sorted(FIXTURES.glob("*.yaml")) for m in oracle_disagreements(path)]
    if bad:
        print("\n".join(bad), file=sys.stderr)
        return 1
    GOLDEN.mkdir(exist_ok=True)
    for name, text in golden_outputs().items():
        (GOLDEN / name).write_text(text)
    summary = {p.stem: "ok" for p in sorted(FIXTURES.glob("*.yaml"))}
    print(json.dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
