"""The spectral sequence of a finite filtered complex, computed by subspace arithmetic.

For a position ``(p, q)`` with total degree ``n = p + q`` and stage ``r``::

    Z^r_pq = F_{p-1}C_n + (F_{p-r}K_n  & F_pC_n)
    B^r_pq = F_{p-1}C_n + (F_{p+r-1}I_n & F_pC_n)
    E^r_pq = Z^r_pq / B^r_pq

where ``F_pK_n = d^{-1}(F_pC_{n-1})`` and ``F_pI_n = d(F_pC_{n+1})``. The
differential ``d^r`` goes from ``(p, q)`` to ``(p - r, q + r - 1)``. Stage
``r = math.inf`` is evaluated in closed form with ``ker d`` and ``im d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from filtspec.complex import FilteredComplex, i_filt, k_filt
from filtspec.lattice import (
    LatticeError,
    LinearMap,
    Subquotient,
    Subspace,
    butterfly,
    image,
    induced_map,
    kernel,
    solve_rows,
    subquotient,
)

__all__ = [
    "PageEntry",
    "Page",
    "TurnCheck",
    "ConvergenceReport",
    "z_group",
    "b_group",
    "page_entry",
    "differential",
    "page",
    "support",
    "turn_page_check",
    "connecting_isomorphism",
    "infinity_entry",
    "stabilization_index",
    "homology",
    "homology_filtration",
    "convergence_report",
]

INF = math.inf


class SpectralSequenceError(RuntimeError):
    """Internal invariant broken; cannot happen for a valid complex."""


def _stage(r):
    if r == INF:
        return INF
    if r < 0 or int(r) != r:
        raise ValueError(f"stage must be a nonnegative integer or inf, got {r!r}")
    return int(r)


@dataclass(frozen=True, eq=False)
class PageEntry:
    p: int
    q: int
    r: float
    entry: Subquotient

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def dim(self) -> int:
        return self.entry.dim

    @property
    def z(self) -> Subspace:
        return self.entry.z

    @property
    def b(self) -> Subspace:
        return self.entry.b


@dataclass(frozen=True, eq=False)
class Page:
    """Entries and differentials over the support rectangle at one stage.

    ``differentials[(p, q)]`` is the matrix of ``d^r`` leaving ``(p, q)``; it
    is empty for the infinite page.
    """

    r: float
    entries: dict[tuple[int, int], PageEntry]
    differentials: dict[tuple[int, int], LinearMap] = field(default_factory=dict)

    def dim(self, p: int, q: int) -> int:
        e = self.entries.get((p, q))
        return e.dim if e is not None else 0

    @property
    def total_dim(self) -> int:
        return sum(e.dim for e in self.entries.values())

    def dims(self) -> dict[tuple[int, int], int]:
        return {k: e.dim for k, e in self.entries.items()}

    def nonzero_differentials(self) -> dict[tuple[int, int], LinearMap]:
        return {k: m for k, m in self.differentials.items() if not m.is_zero()}

    def euler_characteristic(self) -> int:
        return sum((-1) ** (e.n % 2) * e.dim for e in self.entries.values())


def support(fc: FilteredComplex) -> list[tuple[int, int]]:
    """Positions ``(p, q)`` with ``p`` in ``[p_min - 1, p_max + 1]`` and ``p + q`` a degree of ``fc``."""
    return [(p, n - p) for n in fc.degrees for p in range(fc.p_min - 1, fc.p_max + 2)]


def stabilization_index(fc: FilteredComplex) -> int:
    return fc.p_max - fc.p_min + 1


def z_group(fc: FilteredComplex, p: int, q: int, r) -> Subspace:
    r = _stage(r)
    n = p + q

    def compute():
        if r == INF:
            return fc.F(p - 1, n) + (kernel(fc.d(n)) & fc.F(p, n))
        return fc.F(p - 1, n) + (k_filt(fc, p - r, n) & fc.F(p, n))

    return fc.memo(("Z", p, q, r), compute)


def b_group(fc: FilteredComplex, p: int, q: int, r) -> Subspace:
    r = _stage(r)
    n = p + q

    def compute():
        if r == INF:
            return fc.F(p - 1, n) + (image(fc.d(n + 1)) & fc.F(p, n))
        return fc.F(p - 1, n) + (i_filt(fc, p + r - 1, n) & fc.F(p, n))

    return fc.memo(("B", p, q, r), compute)


def page_entry(fc: FilteredComplex, p: int, q: int, r) -> PageEntry:
    r = _stage(r)
    fc.require_valid()
    return fc.memo(
        ("E", p, q, r),
        lambda: PageEntry(p, q, r, subquotient(z_group(fc, p, q, r), b_group(fc, p, q, r))),
    )


def infinity_entry(fc: FilteredComplex, p: int, q: int) -> PageEntry:
    return page_entry(fc, p, q, INF)


def _differential(fc: FilteredComplex, p: int, q: int, r: int, rng=None) -> LinearMap:
    n = p + q
    src = page_entry(fc, p, q, r)
    tgt = page_entry(fc, p - r, q + r - 1, r)
    if src.dim == 0 or tgt.dim == 0:
        return LinearMap.zero(tgt.dim, src.dim, fc.prime)
    lower = fc.F(p - 1, n).basis
    cycles = (k_filt(fc, p - r, n) & fc.F(p, n)).basis
    gens = np.vstack([lower, cycles])
    # write each coset representative x as a + k, a in F_{p-1}C, k a relative cycle
    try:
        y, null = solve_rows(gens, src.entry.coset_basis, fc.prime)
    except LatticeError as exc:
        raise SpectralSequenceError(f"representative outside Z^{r} at ({p}, {q})") from exc
    if rng is not None and null.shape[0]:
        y = np.mod(y + rng.integers(0, fc.prime, size=(y.shape[0], null.shape[0])) @ null, fc.prime)
    k = np.mod(y[:, lower.shape[0]:] @ cycles, fc.prime)
    try:
        cols = tgt.entry.reduce(fc.d(n).apply_rows(k))
    except LatticeError as exc:
        raise SpectralSequenceError(f"d^{r} image escapes Z^{r} at ({p - r}, {q + r - 1})") from exc
    return LinearMap(cols.T, fc.prime)


def differential(fc: FilteredComplex, p: int, q: int, r: int, rng: np.random.Generator | None = None) -> LinearMap:
    """Matrix of ``d^r: E^r_pq -> E^r_{p-r, q+r-1}`` on the coset bases.

    Passing ``rng`` picks a random decomposition of each representative
    instead of the canonical one; the result must not change.
    """
    r = _stage(r)
    if r == INF:
        raise ValueError("the differential is only defined at finite stages")
    fc.require_valid()
    if rng is not None:
        return _differential(fc, p, q, r, rng)
    return fc.memo(("d", p, q, r), lambda: _differential(fc, p, q, r))


def page(fc: FilteredComplex, r) -> Page:
    r = _stage(r)
    entries = {(p, q): page_entry(fc, p, q, r) for p, q in support(fc)}
    diffs = {}
    if r != INF:
        diffs = {(p, q): differential(fc, p, q, r) for p, q in support(fc)}
    return Page(r, entries, diffs)


@dataclass(frozen=True)
class TurnCheck:
    passed: bool
    failures: tuple[tuple[int, int, str], ...] = ()

    @property
    def witness(self):
        return self.failures[0] if self.failures else None

    def __bool__(self):
        return self.passed


def _span(rows, prime: int, ambient: int) -> Subspace:
    rows = np.asarray(rows, dtype=np.int64)
    return Subspace(rows if rows.size else np.zeros((0, ambient), dtype=np.int64), prime, ambient)


def turn_page_check(fc: FilteredComplex, r: int) -> TurnCheck:
    """Verify ``ker d^r = Z^{r+1}/B^r``, ``im d^r = B^{r+1}/B^r`` and ``ker/im = E^{r+1}`` everywhere."""
    r = _stage(r)
    prime = fc.prime
    failures = []
    for p, q in support(fc):
        n = p + q
        e = page_entry(fc, p, q, r)
        out = differential(fc, p, q, r)
        inc = differential(fc, p + r, q - r + 1, r)
        z1, b0, b1 = z_group(fc, p, q, r + 1), e.b, b_group(fc, p, q, r + 1)
        amb = fc.dim(n)

        ker = kernel(out)
        if ker.dim != z1.dim - b0.dim:
            failures.append((p, q, f"dim ker d^{r} = {ker.dim}, expected {z1.dim - b0.dim}"))
        elif _span(e.entry.lift(ker.basis), prime, amb) + b0 != z1:
            failures.append((p, q, "kernel lifts do not span Z^{r+1}"))

        im = image(inc)
        if im.dim != b1.dim - b0.dim:
            failures.append((p, q, f"rank of incoming d^{r} = {im.dim}, expected {b1.dim - b0.dim}"))
        elif _span(e.entry.lift(im.basis), prime, amb) + b0 != b1:
            failures.append((p, q, "image lifts do not span B^{r+1}"))

        nxt = page_entry(fc, p, q, r + 1)
        if ker.dim:
            to_next = LinearMap(nxt.entry.reduce(e.entry.lift(ker.basis)).T, prime)
            rank = to_next.rank
        else:
            rank = 0
        if rank != nxt.dim or ker.dim - rank != im.dim:
            failures.append((p, q, f"ker/im does not match E^{r + 1} (rank {rank}, dim {nxt.dim})"))
    return TurnCheck(not failures, tuple(failures))


def connecting_isomorphism(fc: FilteredComplex, p: int, q: int, r: int):
    """The map ``Z^r/Z^{r+1} -> B^{r+1}/B^r`` at ``(p - r, q + r - 1)`` induced by ``d``.

    Built as the butterfly isomorphism onto a quotient of relative cycles
    followed by the map ``d`` induces there. Returns ``(source, target, map)``.
    """
    r = _stage(r)
    n = p + q
    bf = butterfly(fc.F(p - 1, n), fc.F(p, n), k_filt(fc, p - r - 1, n), k_filt(fc, p - r, n))
    a2, b2 = fc.F(p - r - 1, n - 1), fc.F(p - r, n - 1)
    c2, d2 = i_filt(fc, p - 1, n - 1), i_filt(fc, p, n - 1)
    target = subquotient(a2 + (d2 & b2), a2 + (c2 & b2))
    along_d = induced_map(fc.d(n), bf.q4, target)
    return bf.q1, target, along_d @ bf.left_to_right()


def homology(fc: FilteredComplex, n: int) -> Subquotient:
    if not fc.n_min <= n <= fc.n_max:
        z = Subspace.zero(0, fc.prime)
        return subquotient(z, z)
    return subquotient(kernel(fc.d(n)), image(fc.d(n + 1)))


def homology_filtration(fc: FilteredComplex, p, n: int) -> Subspace:
    """``F_p H_n`` as the subspace ``im d + (F_p C_n & ker d)`` of ``C_n``."""
    if not fc.n_min <= n <= fc.n_max:
        return Subspace.zero(0, fc.prime)
    return image(fc.d(n + 1)) + (fc.F(p, n) & kernel(fc.d(n)))


@dataclass(frozen=True)
class ConvergenceReport:
    pairs: dict[tuple[int, int], tuple[int, int]]
    witnesses: dict[tuple[int, int], LinearMap]
    homology_dims: dict[int, int]
    filtration_dims: dict[int, dict[int, int]]  # n -> p -> dim F_pH_n / im d
    failures: tuple[str, ...]

    @property
    def verdict(self) -> bool:
        return not self.failures


def convergence_report(fc: FilteredComplex) -> ConvergenceReport:
    """Compare ``E^inf_pq`` with ``gr_p H_{p+q}`` through the butterfly isomorphism."""
    fc.require_valid()
    pairs, witnesses, failures = {}, {}, []
    for p, q in support(fc):
        n = p + q
        einf = infinity_entry(fc, p, q)
        graded = subquotient(homology_filtration(fc, p, n), homology_filtration(fc, p - 1, n))
        pairs[(p, q)] = (einf.dim, graded.dim)
        ker, im = kernel(fc.d(n)), image(fc.d(n + 1))
        bf = butterfly(fc.F(p - 1, n), fc.F(p, n), im, ker)
        if not (bf.q1.same_as(einf.entry) and bf.q4.same_as(graded)):
            failures.append(f"({p}, {q}): butterfly wings are not E^inf and gr_pH")
            continue
        try:
            w = bf.left_to_right()
        except LatticeError:
            failures.append(f"({p}, {q}): butterfly map is singular")
            continue
        witnesses[(p, q)] = w
        if einf.dim != graded.dim or not w.is_invertible():
            failures.append(f"({p}, {q}): E^inf has dim {einf.dim}, gr_pH has dim {graded.dim}")

    homology_dims, filtration_dims = {}, {}
    for n in fc.degrees:
        h = homology(fc, n)
        homology_dims[n] = h.dim
        base = h.b.dim
        filtration_dims[n] = {
            p: homology_filtration(fc, p, n).dim - base for p in range(fc.p_min - 1, fc.p_max + 1)
        }
        total = sum(pairs[(p, n - p)][0] for p in range(fc.p_min - 1, fc.p_max + 2))
        if total != h.dim:
            failures.append(f"degree {n}: sum of E^inf dims {total} != dim H_{n} = {h.dim}")
    return ConvergenceReport(pairs, witnesses, homology_dims, filtration_dims, tuple(failures))
