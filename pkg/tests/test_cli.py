import io
import json
import subprocess
import sys

import pytest

from filtspec import cli
from filtspec import specseq as ss
from filtspec.document import (
    ComplexDocument,
    DocumentError,
    document_from_complex,
    parse_document,
    serialize_document,
)

from conftest import FIXTURES, load_fixture

VALID = ["x1", "bicomplex_exact", "trivial", "zero", "random_d2"]
PARSEABLE = VALID + ["non_nested"]
GOLDEN = FIXTURES.parent / "golden"


def run(*args):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(args), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def fixture(name):
    return f"tests/fixtures/{name}.yaml"


# --- documents --------------------------------------------------------------


@pytest.mark.parametrize("name", PARSEABLE)
def test_round_trip(name):
    doc = parse_document((FIXTURES / f"{name}.yaml").read_text())
    again = parse_document(serialize_document(doc))
    assert again == doc
    assert serialize_document(again) == serialize_document(doc)


def test_document_from_complex_round_trip():
    fc = load_fixture("x1")
    doc = document_from_complex(fc)
    back = parse_document(serialize_document(doc)).to_complex()
    assert all(back.F(p, n) == fc.F(p, n) for n in fc.degrees for p in range(-1, 3))
    assert all(back.d(n) == fc.d(n) for n in fc.degrees)


def test_entries_reduced_mod_prime():
    doc = ComplexDocument.from_data(
        {"prime": 3, "min_degree": 0, "max_degree": 1, "dims": [1, 1], "boundaries": {1: [[-2]]}}
    )
    assert doc.boundaries == {1: [[1]]} and doc.filtration == {"type": "trivial"}


def test_explicit_missing_entries_are_zero():
    doc = parse_document(
        "prime: 2\nmin_degree: 0\nmax_degree: 0\ndims: [2]\n"
        "filtration: {type: explicit, p_min: 0, p_max: 1, subspaces: {0: {1: [[1, 0], [0, 1]]}}}\n"
    )
    fc = doc.to_complex()
    assert fc.F(0, 0).is_zero() and fc.F(1, 0).is_full()


BASE = {"prime": 2, "min_degree": 0, "max_degree": 1, "dims": [1, 1]}


@pytest.mark.parametrize(
    "change",
    [
        {"prime": 4},
        {"dims": [1]},
        {"dims": [1, -1]},
        {"extra": 1},
        {"boundaries": {1: [[1, 0]]}},
        {"boundaries": {0: [[1]]}},
        {"boundaries": {1: [[True]]}},
        {"filtration": {"type": "spiral"}},
        {"filtration": {"type": "trivial", "breaks": {}}},
        {"filtration": {"type": "column"}},
        {"filtration": {"type": "column", "breaks": {0: [1, 0]}}},
        {"filtration": {"type": "explicit", "p_min": 0}},
        {"filtration": {"type": "explicit", "p_min": 1, "p_max": 0}},
        {"filtration": {"type": "explicit", "p_min": 0, "p_max": 0, "subspaces": {0: {3: [[1]]}}}},
        {"filtration": {"type": "explicit", "p_min": 0, "p_max": 0, "subspaces": {0: {0: [[1, 1]]}}}},
    ],
)
def test_rejects_bad_documents(change):
    with pytest.raises(DocumentError):
        ComplexDocument.from_data({**BASE, **change}).to_complex()


def test_missing_field():
    with pytest.raises(DocumentError, match="missing"):
        ComplexDocument.from_data({"prime": 2})


def test_syntax_error_position():
    with pytest.raises(DocumentError) as info:
        parse_document((FIXTURES / "malformed.yaml").read_text())
    assert info.value.line == 5


# --- commands ---------------------------------------------------------------


def test_validate_exit_codes(repo_root):
    assert run("validate", fixture("x1"))[:2] == (0, "valid\n")
    code, out, _ = run("validate", fixture("non_nested"))
    assert code == 2 and "n=0, p=0" in out and "witness" in out
    code, _, err = run("validate", fixture("malformed"))
    assert code == 1 and "line 5" in err
    assert run("validate", fixture("unknown_field"))[0] == 1
    assert run("validate", "tests/fixtures/no_such_file.yaml")[0] == 1


def test_invalid_document_refused_by_other_commands(repo_root):
    for cmd in ("pages", "converge", "check"):
        assert run(cmd, fixture("non_nested"))[0] == 2


def test_x1_text_pages(repo_root):
    code, out, _ = run("pages", fixture("x1"), "--max-r", "2")
    assert code == 0
    blocks = out.strip().split("\n\n")
    assert [b.splitlines()[0] for b in blocks] == ["E^0", "E^1", "E^2", "E^inf"]
    assert "d^1: (1,0) -> (0,0)  rank 1" in blocks[1]
    # row q = 0 reads 1 1 on pages 0 and 1, then 0 0
    assert blocks[1].splitlines()[3].split() == ["0", "1", "1"]
    assert blocks[2].splitlines()[3].split() == ["0", "0", "0"]


def test_max_r_truncates(repo_root):
    out = run("pages", fixture("x1"), "--max-r", "0")[1]
    assert [b.splitlines()[0] for b in out.strip().split("\n\n")] == ["E^0", "E^inf"]


def test_trivial_page_one_is_homology(repo_root):
    out = run("pages", fixture("trivial"), "--format", "machine")[1]
    pages = [json.loads(line) for line in out.splitlines()]
    page1 = next(pg for pg in pages if pg["r"] == 1)
    fc = load_fixture("trivial")
    want = {n: ss.homology(fc, n).dim for n in fc.degrees}
    assert {e["q"]: e["dim"] for e in page1["entries"]} == {n: d for n, d in want.items() if d}


def test_zero_complex_is_empty(repo_root):
    out = run("pages", fixture("zero"))[1]
    assert out.count("(empty)") == 3


@pytest.mark.parametrize("name", VALID)
def test_machine_output_consistent(repo_root, name):
    code, out, _ = run("pages", fixture(name), "--format", "machine")
    assert code == 0
    pages = [json.loads(line) for line in out.splitlines()]
    assert pages[-1]["r"] == "inf"
    for pg in pages:
        dims = {(e["p"], e["q"]): e["dim"] for e in pg["entries"]}
        for e in pg["entries"]:
            assert len(e["coset_basis"]) == e["dim"]
        for d in pg["differentials"]:
            rows, cols = dims.get((d["target_p"], d["target_q"]), 0), dims.get((d["p"], d["q"]), 0)
            assert len(d["matrix"]) == rows and all(len(row) == cols for row in d["matrix"])
    conv = pages[-1]["convergence"]
    einf = {}
    for e in pages[-1]["entries"]:
        einf[e["p"] + e["q"]] = einf.get(e["p"] + e["q"], 0) + e["dim"]
    for h in conv["homology"]:
        assert einf.get(h["n"], 0) == h["dim"]


def test_converge_reports(repo_root):
    code, out, _ = run("converge", fixture("x1"))
    assert code == 0 and out.endswith("verdict: true\n")
    assert "H_1: dim 1; dim F_pH/im d: p=-1:0 p=0:1 p=1:1" in out
    assert "H_0: dim 1; dim F_pH/im d: p=-1:0 p=0:0 p=1:1" in out
    code, out, _ = run("converge", fixture("bicomplex_exact"))
    assert code == 0 and "(p,q)  E^inf  gr_pH\nH_0: dim 0" in out


def test_check_on_document(repo_root):
    code, out, _ = run("check", fixture("random_d2"))
    assert code == 0 and "FAIL" not in out and out.count("PASS") == 12


def test_check_random_is_deterministic():
    a = run("check", "--random", "--trials", "6", "--seed", "3", "--prime", "3", "--max-dim", "6")
    b = run("check", "--random", "--trials", "6", "--seed", "3", "--prime", "3", "--max-dim", "6")
    assert a == b and a[0] == 0 and "6 passed" in a[1]


def test_check_needs_one_source(repo_root):
    assert run("check")[0] == 1
    assert run("check", fixture("x1"), "--random")[0] == 1


@pytest.mark.parametrize("golden", sorted(p.name for p in GOLDEN.glob("*")))
def test_golden(repo_root, golden):
    name, _, suffix = golden.partition(".")
    args = {
        "validate.txt": ["validate"],
        "pages.txt": ["pages"],
        "pages.jsonl": ["pages", "--format", "machine"],
        "converge.txt": ["converge"],
    }[suffix]
    code, out, err = run(args[0], fixture(name), *args[1:])
    assert f"exit {code}\n{out}{err}" == (GOLDEN / golden).read_text()


def test_module_entry_point(repo_root):
    proc = subprocess.run(
        [sys.executable, "-m", "filtspec", "validate", fixture("x1")], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout == "valid\n"
