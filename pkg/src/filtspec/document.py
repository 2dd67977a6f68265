"""Reading and writing filtered complexes and page records.

Complex documents are YAML (JSON is accepted too, being a subset)::

    prime: 2
    min_degree: 0
    max_degree: 1
    dims: [2, 2]
    boundaries:            # d_n as a dim C_{n-1} x dim C_n row-major matrix
      1: [[1, 0], [0, 0]]
    filtration:
      type: explicit       # or ``trivial``, or ``column`` with ``breaks``
      p_min: 0
      p_max: 1
      subspaces:           # degree -> p -> basis rows of F_p C_n
        1: {0: [[0, 1]], 1: [[1, 0], [0, 1]]}
        0: {0: [[1, 0]], 1: [[1, 0], [0, 1]]}

A column filtration reads ``{type: column, p_min: 0, breaks: {n: [c_pmin, ...]}}``
where ``F_p C_n`` is spanned by the first ``c_p`` standard basis vectors.
Unknown keys are rejected. Explicit subspaces left out are taken as zero.
Page records are plain dictionaries ready for ``json.dumps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import yaml

from filtspec.complex import (
    ChainComplex,
    FilteredComplex,
    make_column_filtration,
    make_trivial_filtration,
)
from filtspec.lattice import Subspace, _is_prime
from filtspec import specseq as ss


class DocumentError(ValueError):
    """Malformed document; ``line``/``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


_TOP_KEYS = {"prime", "min_degree", "max_degree", "dims", "boundaries", "filtration"}
_FILT_KEYS = {
    "trivial": {"type"},
    "column": {"type", "p_min", "breaks"},
    "explicit": {"type", "p_min", "p_max", "subspaces"},
}


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise DocumentError(f"{where}: expected an integer, got {x!r}")
    return x


def _matrix(x, rows: int, cols: int, prime: int, where: str) -> list[list[int]]:
    if not isinstance(x, list):
        raise DocumentError(f"{where}: expected a list of rows")
    if rows == 0 and x == []:
        return []
    if len(x) != rows or any(not isinstance(r, list) or len(r) != cols for r in x):
        raise DocumentError(f"{where}: expected a {rows}x{cols} matrix")
    return [[_int(v, where) % prime for v in r] for r in x]


def _rows(x, cols: int, prime: int, where: str) -> list[list[int]]:
    if not isinstance(x, list) or any(not isinstance(r, list) or len(r) != cols for r in x):
        raise DocumentError(f"{where}: expected a list of length-{cols} rows")
    return [[_int(v, where) % prime for v in r] for r in x]


def _mapping(x, where: str) -> dict:
    if x is None:
        return {}
    if not isinstance(x, dict):
        raise DocumentError(f"{where}: expected a mapping")
    return x


@dataclass(frozen=True)
class ComplexDocument:
    """Canonical in-memory form of a complex document (entries reduced mod ``prime``)."""

    prime: int
    min_degree: int
    max_degree: int
    dims: tuple[int, ...]
    boundaries: dict[int, list[list[int]]]
    filtration: dict[str, Any]

    @classmethod
    def from_data(cls, data) -> ComplexDocument:
        data = _mapping(data, "document")
        unknown = set(data) - _TOP_KEYS
        if unknown:
            raise DocumentError(f"unknown field(s): {sorted(map(str, unknown))}")
        missing = {"prime", "min_degree", "max_degree", "dims"} - set(data)
        if missing:
            raise DocumentError(f"missing field(s): {sorted(missing)}")
        prime = _int(data["prime"], "prime")
        if not _is_prime(prime):
            raise DocumentError(f"prime: {prime} is not prime")
        lo, hi = _int(data["min_degree"], "min_degree"), _int(data["max_degree"], "max_degree")
        dims = data["dims"]
        if not isinstance(dims, list) or len(dims) != hi - lo + 1:
            raise DocumentError(f"dims: expected {hi - lo + 1} entries for degrees {lo}..{hi}")
        dims = tuple(_int(d, "dims") for d in dims)
        if any(d < 0 for d in dims):
            raise DocumentError("dims: negative dimension")

        def dim(n):
            return dims[n - lo] if lo <= n <= hi else 0

        boundaries = {}
        for n, m in sorted(_mapping(data.get("boundaries"), "boundaries").items(), key=lambda kv: str(kv[0])):
            n = _int(n, "boundaries key")
            if not lo < n <= hi:
                raise DocumentError(f"boundaries: d_{n} outside degrees {lo + 1}..{hi}")
            boundaries[n] = _matrix(m, dim(n - 1), dim(n), prime, f"boundaries.{n}")
        boundaries = dict(sorted(boundaries.items()))

        filt = _mapping(data.get("filtration", {"type": "trivial"}), "filtration")
        kind = filt.get("type")
        if kind not in _FILT_KEYS:
            raise DocumentError(f"filtration.type: expected one of {sorted(_FILT_KEYS)}, got {kind!r}")
        unknown = set(filt) - _FILT_KEYS[kind]
        if unknown:
            raise DocumentError(f"filtration: unknown field(s) {sorted(map(str, unknown))} for type {kind}")
        if kind == "trivial":
            canon = {"type": "trivial"}
        elif kind == "column":
            breaks = {}
            for n, seq in _mapping(filt.get("breaks"), "filtration.breaks").items():
                n = _int(n, "filtration.breaks key")
                if not lo <= n <= hi:
                    raise DocumentError(f"filtration.breaks: degree {n} outside {lo}..{hi}")
                if not isinstance(seq, list) or not seq:
                    raise DocumentError(f"filtration.breaks.{n}: expected a nonempty list")
                breaks[n] = [_int(c, f"filtration.breaks.{n}") for c in seq]
            if not breaks:
                raise DocumentError("filtration.breaks: at least one degree is required")
            canon = {
                "type": "column",
                "p_min": _int(filt.get("p_min", 0), "filtration.p_min"),
                "breaks": dict(sorted(breaks.items())),
            }
        else:
            if "p_min" not in filt or "p_max" not in filt:
                raise DocumentError("filtration: explicit type needs p_min and p_max")
            p_min = _int(filt["p_min"], "filtration.p_min")
            p_max = _int(filt["p_max"], "filtration.p_max")
            if p_min > p_max:
                raise DocumentError("filtration: p_min exceeds p_max")
            subspaces = {}
            for n, per_p in _mapping(filt.get("subspaces"), "filtration.subspaces").items():
                n = _int(n, "filtration.subspaces key")
                if not lo <= n <= hi:
                    raise DocumentError(f"filtration.subspaces: degree {n} outside {lo}..{hi}")
                inner = {}
                for p, rows in _mapping(per_p, f"filtration.subspaces.{n}").items():
                    p = _int(p, f"filtration.subspaces.{n} key")
                    if not p_min <= p <= p_max:
                        raise DocumentError(f"filtration.subspaces.{n}: index {p} outside {p_min}..{p_max}")
                    inner[p] = _rows(rows, dim(n), prime, f"filtration.subspaces.{n}.{p}")
                subspaces[n] = dict(sorted(inner.items()))
            canon = {"type": "explicit", "p_min": p_min, "p_max": p_max, "subspaces": dict(sorted(subspaces.items()))}
        return cls(prime, lo, hi, dims, boundaries, canon)

    def to_data(self) -> dict:
        return {
            "prime": self.prime,
            "min_degree": self.min_degree,
            "max_degree": self.max_degree,
            "dims": list(self.dims),
            "boundaries": {n: [list(r) for r in m] for n, m in self.boundaries.items()},
            "filtration": self.filtration,
        }

    def chain(self) -> ChainComplex:
        return ChainComplex(self.prime, self.min_degree, self.dims, self.boundaries)

    def to_complex(self) -> FilteredComplex:
        """Build the filtered complex without validating it (see :func:`filtspec.complex.validate`)."""
        chain = self.chain()
        f = self.filtration
        try:
            if f["type"] == "trivial":
                return make_trivial_filtration(chain, check=False)
            if f["type"] == "column":
                return make_column_filtration(chain, f["breaks"], f["p_min"], check=False)
        except ValueError as exc:
            raise DocumentError(f"filtration: {exc}") from exc
        filt = {}
        for n in chain.degrees:
            for p in range(f["p_min"], f["p_max"] + 1):
                rows = f["subspaces"].get(n, {}).get(p, [])
                filt[(n, p)] = Subspace(rows, self.prime, chain.dim(n)) if rows else Subspace.zero(chain.dim(n), self.prime)
        return FilteredComplex(chain, f["p_min"], f["p_max"], filt)


def parse_document(text: str) -> ComplexDocument:
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise DocumentError(str(exc.problem or exc), mark.line + 1, mark.column + 1) from exc
    except yaml.YAMLError as exc:
        raise DocumentError(str(exc)) from exc
    return ComplexDocument.from_data(data)


def serialize_document(doc: ComplexDocument) -> str:
    return yaml.safe_dump(doc.to_data(), sort_keys=False, default_flow_style=None)


def document_from_complex(fc: FilteredComplex) -> ComplexDocument:
    """An explicit-filtration document describing ``fc``."""
    subspaces = {
        n: {p: fc.filt[(n, p)].basis.tolist() for p in range(fc.p_min, fc.p_max + 1)} for n in fc.degrees
    }
    boundaries = {n: fc.d(n).matrix.tolist() for n in fc.degrees if n > fc.n_min}
    data = {
        "prime": fc.prime,
        "min_degree": fc.n_min,
        "max_degree": fc.n_max,
        "dims": list(fc.chain.dims),
        "boundaries": boundaries,
        "filtration": {"type": "explicit", "p_min": fc.p_min, "p_max": fc.p_max, "subspaces": subspaces},
    }
    return ComplexDocument.from_data(data)


# ---------------------------------------------------------------------------
# page records
# ---------------------------------------------------------------------------


def _stage_label(r) -> int | str:
    return "inf" if r == math.inf else int(r)


def page_record(pg: ss.Page) -> dict:
    """Nonzero entries with their coset bases, and the nonzero-sized differentials."""
    entries = [
        {"p": p, "q": q, "dim": e.dim, "coset_basis": e.entry.coset_basis.tolist()}
        for (p, q), e in sorted(pg.entries.items())
        if e.dim
    ]
    diffs = []
    r = pg.r
    for (p, q), m in sorted(pg.differentials.items()):
        if m.rows and m.cols:
            diffs.append({"p": p, "q": q, "target_p": p - r, "target_q": q + r - 1, "matrix": m.matrix.tolist()})
    return {"r": _stage_label(r), "entries": entries, "differentials": diffs}


def convergence_record(report: ss.ConvergenceReport) -> dict:
    return {
        "pairs": [
            {"p": p, "q": q, "e_inf": a, "graded": b}
            for (p, q), (a, b) in sorted(report.pairs.items())
            if a or b
        ],
        "homology": [{"n": n, "dim": d} for n, d in sorted(report.homology_dims.items())],
        "filtration": [
            {"n": n, "dims": [{"p": p, "dim": d} for p, d in sorted(per_p.items())]}
            for n, per_p in sorted(report.filtration_dims.items())
        ],
        "verdict": report.verdict,
    }
