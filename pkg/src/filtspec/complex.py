"""Finite filtered chain complexes over a prime field.

Degrees are homological (``d_n: C_n -> C_{n-1}``) and ``d_n`` is stored as a
``dim C_{n-1} x dim C_n`` matrix acting on column vectors. A filtration is an
increasing family of subspaces ``F_p C_n`` for ``p`` in ``[p_min, p_max]``;
outside that window ``F_p C_n`` is ``0`` below and ``C_n`` above, which also
fixes the values at ``p = -inf`` and ``p = +inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from filtspec.lattice import LinearMap, Subspace, inverse, kernel, preimage, pushforward

__all__ = [
    "ChainComplex",
    "FilteredComplex",
    "Violation",
    "ValidationReport",
    "InvalidComplexError",
    "validate",
    "k_filt",
    "i_filt",
    "make_trivial_filtration",
    "make_column_filtration",
    "make_total_of_bicomplex",
    "make_random",
]

NEG_INF = -math.inf
POS_INF = math.inf


class InvalidComplexError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("invalid filtered complex:\n" + report.describe())


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """Dimensions ``dims[n - n_min]`` and boundary maps ``boundaries[n]`` for ``n`` in range.

    Missing boundary maps are zero.
    """

    prime: int
    n_min: int
    dims: tuple[int, ...]
    boundaries: Mapping[int, LinearMap]

    def __init__(self, prime: int, n_min: int, dims: Sequence[int], boundaries: Mapping[int, object] = ()):
        dims = tuple(int(x) for x in dims)
        if not dims:
            raise ValueError("a complex needs at least one degree")
        if any(x < 0 for x in dims):
            raise ValueError(f"negative dimension in {dims}")
        object.__setattr__(self, "prime", prime)
        object.__setattr__(self, "n_min", int(n_min))
        object.__setattr__(self, "dims", dims)
        maps: dict[int, LinearMap] = {}
        for n, m in dict(boundaries).items():
            n = int(n)
            if not self.n_min < n <= self.n_max:
                raise ValueError(f"boundary d_{n} lies outside degrees [{self.n_min + 1}, {self.n_max}]")
            f = m if isinstance(m, LinearMap) else LinearMap(
                np.array(m, dtype=np.int64).reshape(self.dim(n - 1), self.dim(n)), prime
            )
            if f.prime != prime:
                raise ValueError(f"d_{n} has modulus {f.prime}, complex has {prime}")
            if f.shape != (self.dim(n - 1), self.dim(n)):
                raise ValueError(f"d_{n} has shape {f.shape}, expected {(self.dim(n - 1), self.dim(n))}")
            maps[n] = f
        object.__setattr__(self, "boundaries", maps)

    @property
    def n_max(self) -> int:
        return self.n_min + len(self.dims) - 1

    @property
    def degrees(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def dim(self, n: int) -> int:
        if self.n_min <= n <= self.n_max:
            return self.dims[n - self.n_min]
        return 0

    def d(self, n: int) -> LinearMap:
        f = self.boundaries.get(n)
        if f is None:
            return LinearMap.zero(self.dim(n - 1), self.dim(n), self.prime)
        return f


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    """A chain complex with a finite increasing filtration ``filt[(n, p)] = F_p C_n``.

    Instances hash by identity and carry a private memo table for derived
    subspaces; nothing observable ever changes after construction.
    """

    chain: ChainComplex
    p_min: int
    p_max: int
    filt: Mapping[tuple[int, int], Subspace]
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.p_min > self.p_max:
            raise ValueError(f"empty filtration range [{self.p_min}, {self.p_max}]")
        filt = {}
        for n in self.chain.degrees:
            for p in range(self.p_min, self.p_max + 1):
                s = self.filt.get((n, p))
                if s is None:
                    raise ValueError(f"missing filtration subspace F_{p}C_{n}")
                if not isinstance(s, Subspace):
                    s = Subspace(s, self.prime, self.chain.dim(n))
                if s.ambient != self.chain.dim(n) or s.prime != self.prime:
                    raise ValueError(f"F_{p}C_{n} does not live in C_{n}")
                filt[(n, p)] = s
        extra = set(self.filt) - set(filt)
        if extra:
            raise ValueError(f"filtration given outside the degree/index window: {sorted(extra)}")
        object.__setattr__(self, "filt", filt)

    @property
    def prime(self) -> int:
        return self.chain.prime

    @property
    def n_min(self) -> int:
        return self.chain.n_min

    @property
    def n_max(self) -> int:
        return self.chain.n_max

    @property
    def degrees(self) -> range:
        return self.chain.degrees

    def dim(self, n: int) -> int:
        return self.chain.dim(n)

    def d(self, n: int) -> LinearMap:
        return self.chain.d(n)

    def F(self, p, n: int) -> Subspace:
        """``F_p C_n`` with the conventions ``0`` below ``p_min`` and ``C_n`` above ``p_max``."""
        amb = self.dim(n)
        if not self.n_min <= n <= self.n_max:
            return Subspace.zero(0, self.prime)
        if p < self.p_min:
            return Subspace.zero(amb, self.prime)
        if p > self.p_max:
            return Subspace.full(amb, self.prime)
        return self.filt[(n, int(p))]

    def memo(self, key, compute: Callable):
        try:
            return self._memo[key]
        except KeyError:
            value = self._memo[key] = compute()
            return value

    def require_valid(self) -> None:
        report = self.memo(("validate",), lambda: validate(self))
        if not report.ok:
            raise InvalidComplexError(report)


@dataclass(frozen=True)
class Violation:
    invariant: str  # "complex", "nesting", "compatibility" or "exhaustive"
    n: int
    p: int | None
    witness: tuple[int, ...]

    def describe(self) -> str:
        where = f"n={self.n}" if self.p is None else f"n={self.n}, p={self.p}"
        return f"{self.invariant} violated at ({where}); witness {list(self.witness)}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(v.describe() for v in self.violations)


def _vec(v) -> tuple[int, ...]:
    return tuple(int(x) for x in v)


def validate(fc: FilteredComplex) -> ValidationReport:
    """Check ``d d = 0``, nesting, compatibility and exhaustiveness; report every failure."""
    out: list[Violation] = []
    for n in fc.degrees:
        if fc.dim(n - 2) and fc.dim(n) and fc.dim(n - 1):
            dd = (fc.d(n - 1) @ fc.d(n)).matrix
            for j in np.flatnonzero(dd.any(axis=0)):
                e = np.zeros(fc.dim(n), dtype=np.int64)
                e[j] = 1
                out.append(Violation("complex", n, None, _vec(e)))
    for n in fc.degrees:
        for p in range(fc.p_min, fc.p_max):
            lo, hi = fc.F(p, n), fc.F(p + 1, n)
            for row in lo.basis:
                if not hi.contains_vector(row):
                    out.append(Violation("nesting", n, p, _vec(row)))
    for n in fc.degrees:
        d = fc.d(n)
        for p in range(fc.p_min, fc.p_max + 1):
            src, tgt = fc.F(p, n), fc.F(p, n - 1)
            if src.dim == 0:
                continue
            images = d.apply_rows(src.basis)
            if tgt.ambient:
                bad = tgt.residue(images).any(axis=1)
            else:
                bad = np.zeros(src.dim, dtype=bool)
            for i in np.flatnonzero(bad):
                out.append(Violation("compatibility", n, p, _vec(src.basis[i])))
    for n in fc.degrees:
        top = fc.F(fc.p_max, n)
        for j in range(fc.dim(n)):
            e = np.zeros(fc.dim(n), dtype=np.int64)
            e[j] = 1
            if not top.contains_vector(e):
                out.append(Violation("exhaustive", n, fc.p_max, _vec(e)))
    return ValidationReport(tuple(out))


def k_filt(fc: FilteredComplex, p, n: int) -> Subspace:
    """``F_p K_n``: chains of degree ``n`` whose boundary lies in ``F_p C_{n-1}``.

    ``p = -inf`` gives ``ker d_n``; ``p = +inf`` gives all of ``C_n``.
    """

    def compute():
        if not fc.n_min <= n <= fc.n_max:
            return Subspace.zero(0, fc.prime)
        return preimage(fc.d(n), fc.F(p, n - 1))

    return fc.memo(("K", _clamp(fc, p), n), compute)


def i_filt(fc: FilteredComplex, p, n: int) -> Subspace:
    """``F_p I_n = d(F_p C_{n+1})``; ``+inf`` gives ``im d_{n+1}``, ``-inf`` gives ``0``."""

    def compute():
        if not fc.n_min <= n <= fc.n_max:
            return Subspace.zero(0, fc.prime)
        return pushforward(fc.d(n + 1), fc.F(p, n + 1))

    return fc.memo(("I", _clamp(fc, p), n), compute)


def _clamp(fc: FilteredComplex, p):
    # indices outside the window behave like the nearest infinite one
    if p != NEG_INF and p < fc.p_min:
        return NEG_INF
    if p != POS_INF and p > fc.p_max:
        return POS_INF
    return p


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def _finish(chain: ChainComplex, p_min: int, p_max: int, filt, check: bool = True) -> FilteredComplex:
    fc = FilteredComplex(chain, p_min, p_max, filt)
    if check:
        fc.require_valid()
    return fc


def make_trivial_filtration(chain: ChainComplex, check: bool = True) -> FilteredComplex:
    """The one-step filtration ``F_0 C = C``.

    With ``check=False`` the result is returned unvalidated (used when the
    caller wants to report violations rather than raise).
    """
    filt = {(n, 0): Subspace.full(chain.dim(n), chain.prime) for n in chain.degrees}
    return _finish(chain, 0, 0, filt, check)


def make_column_filtration(
    chain: ChainComplex, breaks: Mapping[int, Sequence[int]], p_min: int = 0, check: bool = True
) -> FilteredComplex:
    """``F_p C_n`` = span of the first ``breaks[n][p - p_min]`` standard basis vectors.

    Every degree needs a nondecreasing list of the same length; degrees left
    out of ``breaks`` are treated as ``[dim C_n] * length``.
    """
    lengths = {len(v) for v in breaks.values()}
    if len(lengths) != 1:
        raise ValueError(f"breaks must all have the same length, got lengths {sorted(lengths)}")
    (length,) = lengths
    if length == 0:
        raise ValueError("breaks must be nonempty")
    filt = {}
    for n in chain.degrees:
        counts = [int(c) for c in breaks.get(n, [chain.dim(n)] * length)]
        if any(b < a for a, b in zip(counts, counts[1:])):
            raise ValueError(f"breaks for degree {n} are not monotone: {counts}")
        if counts[0] < 0 or counts[-1] > chain.dim(n):
            raise ValueError(f"breaks for degree {n} exceed 0..{chain.dim(n)}: {counts}")
        for i, c in enumerate(counts):
            eye = np.eye(chain.dim(n), dtype=np.int64)[:c]
            filt[(n, p_min + i)] = Subspace(eye, chain.prime, chain.dim(n))
    return _finish(chain, p_min, p_min + length - 1, filt, check)


def make_total_of_bicomplex(
    dims: Sequence[Sequence[int]],
    horizontal: Mapping[tuple[int, int], object],
    vertical: Mapping[tuple[int, int], object],
    prime: int = 2,
) -> FilteredComplex:
    """Total complex of a commuting double complex, filtered by columns.

    ``dims[i][j]`` is the dimension of the block ``C_{i,j}`` (column ``i``,
    row ``j``, both from 0). ``horizontal[(i, j)]: C_{i,j} -> C_{i-1,j}`` and
    ``vertical[(i, j)]: C_{i,j} -> C_{i,j-1}``; absent maps are zero. Squares
    must commute and each direction must square to zero; the builder inserts
    the sign ``(-1)^i`` on vertical maps. ``F_p`` is the sum of columns ``i <= p``.
    """
    cols = len(dims)
    rows = len(dims[0]) if cols else 0
    if cols == 0 or any(len(c) != rows for c in dims) or rows == 0:
        raise ValueError("dims must be a nonempty rectangular array")

    def block(table, key, shape):
        m = table.get(key)
        if m is None:
            return np.zeros(shape, dtype=np.int64)
        m = m.matrix if isinstance(m, LinearMap) else np.array(m, dtype=np.int64)
        if m.shape != shape:
            raise ValueError(f"map at {key} has shape {m.shape}, expected {shape}")
        return np.mod(m, prime)

    def dh(i, j):
        return block(horizontal, (i, j), (dims[i - 1][j] if i > 0 else 0, dims[i][j]))

    def dv(i, j):
        return block(vertical, (i, j), (dims[i][j - 1] if j > 0 else 0, dims[i][j]))

    for i in range(cols):
        for j in range(rows):
            if i >= 1 and j >= 1 and np.mod(dh(i, j - 1) @ dv(i, j) - dv(i - 1, j) @ dh(i, j), prime).any():
                raise ValueError(f"bicomplex square at ({i}, {j}) does not commute")
            if i >= 2 and np.mod(dh(i - 1, j) @ dh(i, j), prime).any():
                raise ValueError(f"horizontal maps do not square to zero at ({i}, {j})")
            if j >= 2 and np.mod(dv(i, j - 1) @ dv(i, j), prime).any():
                raise ValueError(f"vertical maps do not square to zero at ({i}, {j})")

    top = cols + rows - 2
    blocks = {n: [(i, n - i) for i in range(cols) if 0 <= n - i < rows] for n in range(top + 1)}

    def offsets(n):
        out, at = {}, 0
        for i, j in blocks.get(n, []):
            out[(i, j)] = at
            at += dims[i][j]
        return out, at

    tot_dims = [offsets(n)[1] for n in range(top + 1)]
    boundaries = {}
    for n in range(1, top + 1):
        src, _ = offsets(n)
        tgt, _ = offsets(n - 1)
        m = np.zeros((tot_dims[n - 1], tot_dims[n]), dtype=np.int64)
        for (i, j), s in src.items():
            w = dims[i][j]
            if i >= 1:
                t = tgt[(i - 1, j)]
                m[t : t + dims[i - 1][j], s : s + w] += dh(i, j)
            if j >= 1:
                t = tgt[(i, j - 1)]
                sign = -1 if i % 2 else 1
                m[t : t + dims[i][j - 1], s : s + w] += sign * dv(i, j)
        boundaries[n] = LinearMap(m, prime)
    chain = ChainComplex(prime, 0, tot_dims, boundaries)

    filt = {}
    for n in range(top + 1):
        off, total = offsets(n)
        for p in range(cols):
            idx = [off[(i, j)] + k for (i, j) in off if i <= p for k in range(dims[i][j])]
            filt[(n, p)] = Subspace(np.eye(total, dtype=np.int64)[idx], prime, total)
    return _finish(chain, 0, cols - 1, filt)


def _random_invertible(rng: np.random.Generator, n: int, prime: int) -> np.ndarray:
    while True:
        m = rng.integers(0, prime, size=(n, n))
        if LinearMap(m, prime).is_invertible():
            return m


def make_random(prime: int, max_dim: int, p_range: int, seed: int) -> FilteredComplex:
    """A random valid filtered complex, deterministic in ``seed``.

    Total dimension is at most ``max_dim`` and the filtration has at most
    ``p_range`` steps. The complex is built in a filtration-adapted basis
    (each basis vector gets a level, boundaries only decrease levels and are
    drawn inside the kernel of the next map) and then every degree is
    conjugated by a random invertible matrix, so the filtration subspaces are
    generally not coordinate-aligned.
    """
    rng = np.random.default_rng(seed)
    n_deg = 1 if rng.random() < 0.1 else int(rng.integers(2, 5))
    n_min = int(rng.integers(-1, 2))
    total = int(rng.integers(min(max_dim, max(1, max_dim // 3)), max_dim + 1))
    cuts = np.sort(rng.integers(0, total + 1, size=n_deg - 1))
    dims = np.diff(np.concatenate([[0], cuts, [total]])).astype(int).tolist()
    steps = int(rng.integers(1, p_range + 1))
    p_min = int(rng.integers(-1, 2))
    p_max = p_min + steps - 1

    # levels[k][i]: filtration index of basis vector i in degree n_min + k, sorted
    levels = [np.sort(rng.integers(p_min, p_max + 1, size=dk)) for dk in dims]
    sparsity = rng.uniform(0.5, 1.0)

    adapted: dict[int, np.ndarray] = {}
    for k in range(1, n_deg):
        n = n_min + k
        tgt_dim, src_dim = dims[k - 1], dims[k]
        m = np.zeros((tgt_dim, src_dim), dtype=np.int64)
        below = adapted.get(n - 1)
        for col in range(src_dim):
            # a random drop in filtration level makes longer differentials likely
            lvl = levels[k][col] - int(rng.integers(0, steps))
            allowed = np.eye(tgt_dim, dtype=np.int64)[levels[k - 1] <= lvl]
            if below is not None and allowed.size:
                # restrict to the kernel of the next map down
                space = Subspace(allowed, prime, tgt_dim)
                allowed = np.array((kernel(LinearMap(below, prime)) & space).basis)
            if allowed.shape[0] == 0 or rng.random() > sparsity:
                continue
            coef = rng.integers(0, prime, size=allowed.shape[0])
            m[:, col] = np.mod(coef @ allowed, prime)
        adapted[n] = m

    changes = [_random_invertible(rng, dk, prime) if dk else np.zeros((0, 0), dtype=np.int64) for dk in dims]
    inverses = [inverse(LinearMap(g, prime)).matrix for g in changes]
    boundaries = {}
    for k in range(1, n_deg):
        n = n_min + k
        boundaries[n] = LinearMap(changes[k - 1] @ adapted[n] @ inverses[k], prime)
    chain = ChainComplex(prime, n_min, dims, boundaries)

    filt = {}
    for k, dk in enumerate(dims):
        for p in range(p_min, p_max + 1):
            cols = changes[k][:, levels[k] <= p]
            filt[(n_min + k, p)] = Subspace(cols.T, prime, dk)
    return _finish(chain, p_min, p_max, filt)

