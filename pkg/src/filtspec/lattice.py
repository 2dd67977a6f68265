"""Exact linear algebra over a prime field and the subspace lattice.

Everything here works on finite-dimensional coordinate spaces ``F_p^n``.
Matrices are ``int64`` numpy arrays with entries in ``[0, p)``; a
:class:`LinearMap` acts on column vectors, while :class:`Subspace` bases are
stored as rows in reduced row-echelon form so that equal subspaces have
bitwise-equal representations.

Over ``F_2`` the row reduction runs on bit-packed Python integers (see
:mod:`filtspec.gf2`); results are identical to the generic routine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from filtspec import gf2

__all__ = [
    "LatticeError",
    "AmbientMismatchError",
    "InclusionError",
    "InducedMapError",
    "NotInSubspaceError",
    "LinearMap",
    "Subspace",
    "Subquotient",
    "Butterfly",
    "rref",
    "kernel",
    "image",
    "pushforward",
    "preimage",
    "subspace_sum",
    "intersect",
    "contains",
    "subquotient",
    "reduce",
    "induced_map",
    "butterfly",
    "inverse",
    "solve_rows",
]


class LatticeError(ValueError):
    pass


class AmbientMismatchError(LatticeError):
    pass


class InclusionError(LatticeError):
    pass


class NotInSubspaceError(LatticeError):
    pass


class InducedMapError(InclusionError):
    """A map fails to send numerator into numerator or denominator into denominator.

    ``generator`` is the offending basis vector of the source subspace and
    ``part`` is ``"numerator"`` or ``"denominator"``.
    """

    def __init__(self, part: str, generator: np.ndarray):
        self.part = part
        self.generator = tuple(int(x) for x in generator)
        super().__init__(f"map does not respect the {part}: generator {self.generator} escapes")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, int(p**0.5) + 1))


def _as_matrix(a, prime: int, cols: int | None = None) -> np.ndarray:
    m = np.array(a, dtype=np.int64)
    if m.ndim == 1:
        if m.size == 0 and cols is not None:
            m = m.reshape(0, cols)
        else:
            m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if cols is not None and m.shape[1] != cols:
        raise AmbientMismatchError(f"expected {cols} columns, got {m.shape[1]}")
    return np.mod(m, prime)


def _rows(x, width: int) -> np.ndarray:
    """View ``x`` as a 2-d array of row vectors of length ``width``."""
    a = np.asarray(x, dtype=np.int64)
    if a.ndim == 1:
        if a.size == width:
            return a.reshape(1, width)
        if a.size == 0:
            return a.reshape(0, width)
    elif a.ndim == 2:
        if a.shape[1] == width:
            return a
        if a.size == 0:
            return np.zeros((0, width), dtype=np.int64)
    raise AmbientMismatchError(f"expected vectors of length {width}, got shape {a.shape}")


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.ascontiguousarray(m, dtype=np.int64)
    m.setflags(write=False)
    return m


# ---------------------------------------------------------------------------
# Row reduction
# ---------------------------------------------------------------------------


def _rref_generic(m: np.ndarray, prime: int) -> tuple[np.ndarray, list[int]]:
    a = np.mod(m, prime)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), -1, prime)
        if inv != 1:
            a[r] = (a[r] * inv) % prime
        col = a[:, c].copy()
        col[r] = 0
        if col.any():
            a -= np.outer(col, a[r])
            np.mod(a, prime, out=a)
        pivots.append(c)
        r += 1
    return a, pivots


def _rref_array(m: np.ndarray, prime: int) -> tuple[np.ndarray, list[int]]:
    if prime == 2 and m.shape[1] <= gf2.MAX_PACKED_COLS:
        return gf2.rref(m)
    return _rref_generic(m, prime)


def rref(m, prime: int | None = None) -> tuple[np.ndarray, list[int], int]:
    """Reduced row-echelon form of ``m`` over ``F_prime``.

    ``m`` may be a :class:`LinearMap` (its modulus is used) or an array-like
    together with ``prime``. Returns ``(reduced, pivot_columns, rank)``; the
    reduced matrix keeps the input shape with zero rows at the bottom.
    """
    if isinstance(m, LinearMap):
        prime, arr = m.prime, m.matrix
    else:
        if prime is None:
            raise TypeError("prime is required for a bare matrix")
        arr = _as_matrix(m, prime)
    reduced, pivots = _rref_array(np.array(arr, dtype=np.int64), prime)
    return reduced, pivots, len(pivots)


def _nullspace_rows(m: np.ndarray, prime: int) -> np.ndarray:
    """Rows spanning ``{v : m v = 0}`` (not yet canonical)."""
    cols = m.shape[1]
    reduced, pivots = _rref_array(m, prime)
    free = [c for c in range(cols) if c not in set(pivots)]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        out[i, f] = 1
        for row, pc in enumerate(pivots):
            out[i, pc] = (-reduced[row, f]) % prime
    return out


def _reduce_against(basis: np.ndarray, pivots: list[int], vecs: np.ndarray, prime: int) -> np.ndarray:
    """Residues of ``vecs`` (rows) after clearing the pivot columns of an rref basis."""
    res = np.array(vecs, dtype=np.int64)
    for i, pc in enumerate(pivots):
        coef = res[:, pc]
        if coef.any():
            res -= np.outer(coef, basis[i])
            np.mod(res, prime, out=res)
    return res


def inverse(f: LinearMap) -> LinearMap:
    """Inverse of a square invertible map; raises :class:`LatticeError` otherwise."""
    n = f.rows
    if f.cols != n:
        raise LatticeError(f"cannot invert a {f.rows}x{f.cols} map")
    aug = np.hstack([f.matrix, np.eye(n, dtype=np.int64)])
    reduced, pivots = _rref_generic(aug, f.prime)
    if pivots[:n] != list(range(n)):
        raise LatticeError("map is singular")
    return LinearMap(reduced[:, n:], f.prime)


def solve_rows(gens: np.ndarray, targets: np.ndarray, prime: int) -> tuple[np.ndarray, np.ndarray]:
    """Find ``Y`` with ``Y @ gens == targets`` (mod prime), row by row.

    ``gens`` may have dependent rows. Returns ``(Y, null)`` where ``Y`` is the
    particular solution with free coefficients set to zero and the rows of
    ``null`` span ``{y : y @ gens == 0}``. Raises :class:`NotInSubspaceError`
    if some target row is not in the row space of ``gens``.
    """
    width = np.shape(targets)[-1]
    gens = _rows(gens, width)
    targets = _rows(targets, width)
    k = gens.shape[0]
    aug = np.hstack([gens.T, targets.T])
    reduced, pivots = _rref_generic(aug, prime)
    if any(pc >= k for pc in pivots):
        bad = next(pc for pc in pivots if pc >= k) - k
        raise NotInSubspaceError(f"target row {bad} is not in the span of the generators")
    y = np.zeros((targets.shape[0], k), dtype=np.int64)
    for row, pc in enumerate(pivots):
        y[:, pc] = reduced[row, k:]
    null = _nullspace_rows(gens.T, prime)
    return y, null


# ---------------------------------------------------------------------------
# Linear maps
# ---------------------------------------------------------------------------


class LinearMap:
    """A matrix over ``F_p`` acting on column vectors: shape ``codomain x domain``."""

    __slots__ = ("matrix", "prime")

    def __init__(self, matrix, prime: int, shape: tuple[int, int] | None = None):
        if not _is_prime(prime):
            raise ValueError(f"{prime} is not prime")
        m = np.array(matrix, dtype=np.int64)
        if shape is not None:
            m = m.reshape(shape)
        if m.ndim != 2:
            raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
        object.__setattr__(self, "matrix", _frozen(np.mod(m, prime)))
        object.__setattr__(self, "prime", prime)

    def __setattr__(self, name, value):
        raise AttributeError("LinearMap is immutable")

    @classmethod
    def identity(cls, n: int, prime: int) -> LinearMap:
        return cls(np.eye(n, dtype=np.int64), prime)

    @classmethod
    def zero(cls, rows: int, cols: int, prime: int) -> LinearMap:
        return cls(np.zeros((rows, cols), dtype=np.int64), prime)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def rank(self) -> int:
        return len(_rref_array(np.array(self.matrix), self.prime)[1])

    def is_zero(self) -> bool:
        return not self.matrix.any()

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank == self.rows

    def apply_rows(self, vecs) -> np.ndarray:
        """Apply the map to each row of ``vecs`` (returns rows)."""
        v = _rows(vecs, self.cols)
        return np.mod(v @ self.matrix.T, self.prime)

    def __call__(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        if v.ndim == 1:
            return self.apply_rows(v)[0]
        return self.apply_rows(v)

    def __matmul__(self, other: LinearMap) -> LinearMap:
        if other.prime != self.prime:
            raise AmbientMismatchError(f"moduli differ: {self.prime} and {other.prime}")
        if self.cols != other.rows:
            raise AmbientMismatchError(f"cannot compose {self.shape} after {other.shape}")
        return LinearMap(self.matrix @ other.matrix, self.prime)

    def __eq__(self, other):
        if not isinstance(other, LinearMap):
            return NotImplemented
        return (
            self.prime == other.prime
            and self.matrix.shape == other.matrix.shape
            and bool(np.array_equal(self.matrix, other.matrix))
        )

    def __hash__(self):
        return hash((self.prime, self.matrix.shape, self.matrix.tobytes()))

    def __repr__(self):
        return f"LinearMap({self.matrix.tolist()}, prime={self.prime})"


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------


class Subspace:
    """A subspace of ``F_p^n`` held as its canonical reduced row-echelon basis.

    Equality is structural: two instances are equal iff they are the same set.
    Operators: ``u + v`` (sum), ``u & v`` (intersection), ``v <= u`` (inclusion).
    """

    __slots__ = ("basis", "prime", "pivots")

    def __init__(self, vectors, prime: int, ambient: int | None = None):
        if not _is_prime(prime):
            raise ValueError(f"{prime} is not prime")
        m = np.array(vectors, dtype=np.int64)
        if m.size == 0:
            if ambient is None:
                raise ValueError("ambient dimension required for an empty spanning set")
            m = m.reshape(0, ambient)
        m = _as_matrix(m, prime, ambient)
        reduced, pivots = _rref_array(m, prime)
        self._set(reduced[: len(pivots)], prime, pivots)

    def _set(self, basis, prime, pivots):
        object.__setattr__(self, "basis", _frozen(basis))
        object.__setattr__(self, "prime", prime)
        object.__setattr__(self, "pivots", tuple(pivots))

    @classmethod
    def _canonical(cls, basis: np.ndarray, prime: int, pivots) -> Subspace:
        s = cls.__new__(cls)
        s._set(basis, prime, pivots)
        return s

    @classmethod
    def span(cls, vectors, prime: int, ambient: int | None = None) -> Subspace:
        return cls(vectors, prime, ambient)

    @classmethod
    def zero(cls, ambient: int, prime: int) -> Subspace:
        return cls._canonical(np.zeros((0, ambient), dtype=np.int64), prime, ())

    @classmethod
    def full(cls, ambient: int, prime: int) -> Subspace:
        return cls._canonical(np.eye(ambient, dtype=np.int64), prime, range(ambient))

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @property
    def ambient(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient

    def residue(self, vecs) -> np.ndarray:
        v = _rows(vecs, self.ambient) % self.prime
        return _reduce_against(self.basis, list(self.pivots), v, self.prime)

    def contains_vector(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64)
        if v.shape[-1] != self.ambient:
            raise AmbientMismatchError(f"vector of length {v.shape[-1]} in ambient {self.ambient}")
        return not self.residue(v).any()

    def annihilator(self) -> np.ndarray:
        """Rows ``N`` with ``N v = 0`` exactly for ``v`` in this subspace."""
        return _nullspace_rows(np.array(self.basis), self.prime)

    def _check(self, other: Subspace) -> None:
        if self.ambient != other.ambient:
            raise AmbientMismatchError(f"ambient {self.ambient} vs {other.ambient}")
        if self.prime != other.prime:
            raise AmbientMismatchError(f"modulus {self.prime} vs {other.prime}")

    def __add__(self, other: Subspace) -> Subspace:
        return subspace_sum(self, other)

    def __and__(self, other: Subspace) -> Subspace:
        return intersect(self, other)

    def __le__(self, other: Subspace) -> bool:
        return contains(other, self)

    def __ge__(self, other: Subspace) -> bool:
        return contains(self, other)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.prime == other.prime
            and self.basis.shape == other.basis.shape
            and bool(np.array_equal(self.basis, other.basis))
        )

    def __hash__(self):
        return hash((self.prime, self.basis.shape, self.basis.tobytes()))

    def __repr__(self):
        return f"Subspace({self.basis.tolist()}, prime={self.prime}, ambient={self.ambient})"


def _from_rows(rows: np.ndarray, prime: int, ambient: int) -> Subspace:
    rows = _rows(rows, ambient)
    reduced, pivots = _rref_array(rows, prime)
    return Subspace._canonical(reduced[: len(pivots)], prime, pivots)


def kernel(f: LinearMap) -> Subspace:
    return _from_rows(_nullspace_rows(np.array(f.matrix), f.prime), f.prime, f.cols)


def pushforward(f: LinearMap, u: Subspace) -> Subspace:
    if u.ambient != f.cols or u.prime != f.prime:
        raise AmbientMismatchError(f"subspace of ambient {u.ambient} pushed along a {f.shape} map")
    return _from_rows(f.apply_rows(u.basis), f.prime, f.rows)


def image(f: LinearMap) -> Subspace:
    return _from_rows(f.matrix.T, f.prime, f.rows)


def preimage(f: LinearMap, w: Subspace) -> Subspace:
    if w.ambient != f.rows or w.prime != f.prime:
        raise AmbientMismatchError(f"subspace of ambient {w.ambient} pulled back along a {f.shape} map")
    if w.is_full():
        return Subspace.full(f.cols, f.prime)
    constraint = np.mod(w.annihilator() @ f.matrix, f.prime)
    return _from_rows(_nullspace_rows(constraint, f.prime), f.prime, f.cols)


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    u._check(v)
    if v.dim == 0 or v is u:
        return u
    if u.dim == 0:
        return v
    return _from_rows(np.vstack([u.basis, v.basis]), u.prime, u.ambient)


def intersect(u: Subspace, v: Subspace) -> Subspace:
    u._check(v)
    if u.is_full() or v.is_zero():
        return v
    if v.is_full() or u.is_zero():
        return u
    stacked = np.vstack([u.annihilator(), v.annihilator()])
    return _from_rows(_nullspace_rows(stacked, u.prime), u.prime, u.ambient)


def contains(u: Subspace, v: Subspace) -> bool:
    """True iff ``v`` is a subspace of ``u``."""
    u._check(v)
    if v.dim > u.dim:
        return False
    if v.dim == 0:
        return True
    return not u.residue(v.basis).any()


# ---------------------------------------------------------------------------
# Subquotients
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Subquotient:
    """The quotient ``z / b`` of two subspaces of a common ambient space.

    ``coset_basis`` rows extend the basis of ``b`` to one of ``z``; coordinates
    on the quotient are taken with respect to those rows.
    """

    z: Subspace
    b: Subspace
    coset_basis: np.ndarray
    _coords: np.ndarray  # inverse of the z-pivot block of [coset_basis; b.basis]

    @property
    def ambient(self) -> int:
        return self.z.ambient

    @property
    def prime(self) -> int:
        return self.z.prime

    @property
    def dim(self) -> int:
        return self.coset_basis.shape[0]

    def coordinates(self, vecs) -> np.ndarray:
        """Coordinates of rows of ``vecs`` in ``z``'s basis ``[coset_basis; b.basis]``."""
        v = _rows(vecs, self.ambient) % self.prime
        if self.z.residue(v).any():
            raise NotInSubspaceError("vector is not in the numerator")
        return np.mod(v[:, list(self.z.pivots)] @ self._coords, self.prime)

    def reduce(self, v) -> np.ndarray:
        """Coordinates of the coset ``[v]`` in the coset basis."""
        v = np.asarray(v, dtype=np.int64)
        out = self.coordinates(v)[:, : self.dim]
        return out[0] if v.ndim == 1 else out

    def lift(self, coords) -> np.ndarray:
        """Representatives in the ambient space for coset coordinates (rows)."""
        c = _rows(coords, self.dim)
        return np.mod(c @ self.coset_basis, self.prime)

    def same_as(self, other: Subquotient) -> bool:
        return self.z == other.z and self.b == other.b

    def __repr__(self):
        return f"Subquotient(dim={self.dim}, z_dim={self.z.dim}, b_dim={self.b.dim}, ambient={self.ambient})"


def subquotient(z: Subspace, b: Subspace) -> Subquotient:
    z._check(b)
    if not contains(z, b):
        bad = next(row for row in b.basis if not z.contains_vector(row))
        raise InclusionError(f"denominator is not inside numerator: {tuple(int(x) for x in bad)} escapes")
    prime, n = z.prime, z.ambient
    taken: list[np.ndarray] = []
    span = b
    for row in z.basis:
        if span.dim == z.dim:
            break
        if not span.contains_vector(row):
            taken.append(row)
            span = _from_rows(np.vstack([span.basis, row]), prime, n)
    coset = np.array(taken, dtype=np.int64).reshape(len(taken), n)
    full = np.vstack([coset, b.basis])
    block = full[:, list(z.pivots)]
    coords = inverse(LinearMap(block, prime)).matrix
    return Subquotient(z, b, _frozen(coset), _frozen(coords))


def reduce(sq: Subquotient, v) -> np.ndarray:
    return sq.reduce(v)


def induced_map(f: LinearMap, source: Subquotient, target: Subquotient) -> LinearMap:
    """Matrix of the map ``source -> target`` induced by ``f`` on coset bases."""
    if f.cols != source.ambient or f.rows != target.ambient:
        raise AmbientMismatchError(
            f"map of shape {f.shape} between ambients {source.ambient} and {target.ambient}"
        )
    for part, src, tgt in (("numerator", source.z, target.z), ("denominator", source.b, target.b)):
        if src.dim == 0:
            continue
        images = f.apply_rows(src.basis)
        bad = tgt.residue(images).any(axis=1)
        if bad.any():
            raise InducedMapError(part, src.basis[int(np.flatnonzero(bad)[0])])
    if source.dim == 0 or target.dim == 0:
        return LinearMap.zero(target.dim, source.dim, f.prime)
    cols = target.reduce(f.apply_rows(source.coset_basis))
    return LinearMap(cols.T, f.prime)


# ---------------------------------------------------------------------------
# Butterfly
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Butterfly:
    """The four isomorphic subquotients attached to nested pairs ``a <= b``, ``c <= d``.

    ``q1 = (a + d&b)/(a + c&b)``, ``q2 = (b&d)/((b&c) + (a&d))``,
    ``q3 = ((a+d) & (b+c))/(a+c)``, ``q4 = (c + b&d)/(c + a&d)``.
    The three maps out of the middle term ``q2`` are induced by the identity.
    """

    q1: Subquotient
    q2: Subquotient
    q3: Subquotient
    q4: Subquotient
    q2_to_q1: LinearMap
    q2_to_q4: LinearMap
    q2_to_q3: LinearMap

    def left_to_right(self) -> LinearMap:
        """The Zassenhaus isomorphism ``q1 -> q4``."""
        return self.q2_to_q4 @ inverse(self.q2_to_q1)

    def all_invertible(self) -> bool:
        return all(m.is_invertible() for m in (self.q2_to_q1, self.q2_to_q4, self.q2_to_q3))


def butterfly(a: Subspace, b: Subspace, c: Subspace, d: Subspace) -> Butterfly:
    for x in (b, c, d):
        a._check(x)
    if not contains(b, a):
        raise InclusionError("butterfly needs a <= b")
    if not contains(d, c):
        raise InclusionError("butterfly needs c <= d")
    bd = b & d
    q1 = subquotient(a + bd, a + (c & b))
    q2 = subquotient(bd, (b & c) + (a & d))
    q3 = subquotient((a + d) & (b + c), a + c)
    q4 = subquotient(c + bd, c + (a & d))
    ident = LinearMap.identity(a.ambient, a.prime)
    return Butterfly(
        q1, q2, q3, q4,
        induced_map(ident, q2, q1),
        induced_map(ident, q2, q4),
        induced_map(ident, q2, q3),
    )
