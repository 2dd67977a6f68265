"""Brute-force reference semantics by explicit element enumeration.

Only meant for tiny spaces: every subspace is materialised as the set of its
vectors, and nothing here uses row reduction. Used by the test-suite to
cross-check :mod:`filtspec.lattice` and :mod:`filtspec.specseq`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from filtspec.complex import FilteredComplex
from filtspec.lattice import LinearMap, Subspace

DEFAULT_CAP = 3**6


class OracleCapExceeded(ValueError):
    pass


Vector = tuple[int, ...]


@dataclass(frozen=True)
class ElementSet:
    ambient: int
    prime: int
    elements: frozenset[Vector]

    def __post_init__(self):
        zero = (0,) * self.ambient
        if zero not in self.elements:
            raise ValueError("element set must contain 0")
        if _span_of(self.elements, self.prime, self.ambient) != self.elements:
            raise ValueError("element set is not closed under addition and scaling")

    def __len__(self):
        return len(self.elements)

    def __contains__(self, v):
        return tuple(int(x) for x in v) in self.elements

    def issubset(self, other: ElementSet) -> bool:
        return self.elements <= other.elements

    @property
    def log_size(self) -> int:
        return round(math.log(len(self.elements), self.prime))


def _add(u: Vector, v: Vector, p: int) -> Vector:
    return tuple((a + b) % p for a, b in zip(u, v))


def _scale(u: Vector, c: int, p: int) -> Vector:
    return tuple((c * a) % p for a in u)


def _span_of(elements, p: int, ambient: int) -> frozenset[Vector]:
    # grow the span one element at a time; it equals the set iff the set is closed
    acc = {(0,) * ambient}
    for v in sorted(elements):
        if v not in acc:
            acc |= {_add(x, _scale(v, c, p), p) for x in acc for c in range(1, p)}
    return frozenset(acc)


def _check_cap(prime: int, ambient: int, cap: int) -> None:
    if prime**ambient > cap:
        raise OracleCapExceeded(f"{prime}^{ambient} elements exceed the cap {cap}")


def all_vectors(ambient: int, prime: int, cap: int = DEFAULT_CAP) -> list[Vector]:
    _check_cap(prime, ambient, cap)
    return list(itertools.product(range(prime), repeat=ambient))


def enumerate_subspace(s: Subspace, cap: int = DEFAULT_CAP) -> ElementSet:
    """Every linear combination of the basis rows of ``s``."""
    _check_cap(s.prime, s.ambient, cap)
    p = s.prime
    rows = [tuple(int(x) for x in r) for r in s.basis]
    out = set()
    for coefs in itertools.product(range(p), repeat=len(rows)):
        v = (0,) * s.ambient
        for c, r in zip(coefs, rows):
            v = _add(v, _scale(r, c, p), p)
        out.add(v)
    if not rows:
        out.add((0,) * s.ambient)
    return ElementSet(s.ambient, p, frozenset(out))


def _apply(f: LinearMap, v: Vector) -> Vector:
    return tuple(int(x) for x in np.mod(f.matrix @ np.array(v, dtype=np.int64), f.prime))


def brute_sum(a: ElementSet, b: ElementSet) -> ElementSet:
    """All sums ``x + y``, built by absorbing elements of ``b`` into ``a`` one at a time."""
    p = a.prime
    acc = set(a.elements)
    for v in sorted(b.elements):
        if v not in acc:
            acc |= {_add(x, _scale(v, c, p), p) for x in acc for c in range(1, p)}
    return ElementSet(a.ambient, p, frozenset(acc))


def brute_intersect(a: ElementSet, b: ElementSet) -> ElementSet:
    return ElementSet(a.ambient, a.prime, a.elements & b.elements)


def brute_pushforward(f: LinearMap, u: ElementSet) -> ElementSet:
    return ElementSet(f.rows, f.prime, frozenset(_apply(f, v) for v in u.elements))


def brute_preimage(f: LinearMap, w: ElementSet, cap: int = DEFAULT_CAP) -> ElementSet:
    vecs = all_vectors(f.cols, f.prime, cap)
    return ElementSet(f.cols, f.prime, frozenset(v for v in vecs if _apply(f, v) in w.elements))


def brute_op(kind: str, *args, cap: int = DEFAULT_CAP) -> ElementSet:
    """Dispatch on ``kind`` in ``sum``, ``intersect``, ``preimage``, ``pushforward``.

    Subspace arguments are enumerated first; maps are passed through.
    """
    conv = [enumerate_subspace(a, cap) if isinstance(a, Subspace) else a for a in args]
    if kind == "sum":
        return brute_sum(*conv)
    if kind == "intersect":
        return brute_intersect(*conv)
    if kind == "pushforward":
        return brute_pushforward(*conv)
    if kind == "preimage":
        return brute_preimage(*conv, cap=cap)
    raise ValueError(f"unknown operation {kind!r}")


def brute_quotient_dim(z: ElementSet, b: ElementSet) -> int:
    if not b.issubset(z):
        raise ValueError("denominator is not inside numerator")
    ratio = len(z) // len(b)
    return round(math.log(ratio, z.prime))


def brute_filtration(fc: FilteredComplex, p, n: int, cap: int = DEFAULT_CAP) -> ElementSet:
    """``F_p C_n`` from the stored generators, with the window conventions."""
    amb = fc.dim(n)
    _check_cap(fc.prime, amb, cap)
    zero = ElementSet(amb, fc.prime, frozenset({(0,) * amb}))
    if not fc.n_min <= n <= fc.n_max or p < fc.p_min:
        return zero
    if p > fc.p_max:
        return ElementSet(amb, fc.prime, frozenset(all_vectors(amb, fc.prime, cap)))
    return enumerate_subspace(fc.filt[(n, int(p))], cap)


def brute_page_dim(fc: FilteredComplex, p: int, q: int, r, cap: int = DEFAULT_CAP) -> int:
    """``dim E^r_pq`` by counting cosets of explicitly enumerated ``Z^r`` and ``B^r``."""
    n = p + q
    prime = fc.prime
    fp = brute_filtration(fc, p, n, cap)
    fp1 = brute_filtration(fc, p - 1, n, cap)
    d_n, d_up = fc.d(n), fc.d(n + 1)
    if r == math.inf:
        target = ElementSet(fc.dim(n - 1), prime, frozenset({(0,) * fc.dim(n - 1)}))
        cycles = brute_preimage(d_n, target, cap)
        bounds = brute_pushforward(d_up, ElementSet(
            fc.dim(n + 1), prime, frozenset(all_vectors(fc.dim(n + 1), prime, cap))
        ))
    else:
        cycles = brute_preimage(d_n, brute_filtration(fc, p - r, n - 1, cap), cap)
        bounds = brute_pushforward(d_up, brute_filtration(fc, p + r - 1, n + 1, cap))
    z = brute_sum(fp1, brute_intersect(cycles, fp))
    b = brute_sum(fp1, brute_intersect(bounds, fp))
    return brute_quotient_dim(z, b)
