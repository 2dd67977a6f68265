import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filtspec import gf2, oracle
from filtspec.checks import LATTICE_FAMILIES, random_between, random_map, random_sub, random_subspace
from filtspec.lattice import (
    AmbientMismatchError,
    InclusionError,
    InducedMapError,
    LinearMap,
    NotInSubspaceError,
    Subspace,
    _rref_generic,
    butterfly,
    contains,
    image,
    induced_map,
    intersect,
    inverse,
    kernel,
    preimage,
    pushforward,
    reduce,
    rref,
    subquotient,
    subspace_sum,
)


def S(rows, p, ambient=None):
    return Subspace(rows, p, ambient)


# f over F_2: e1 -> f1, e2 -> 0
F = LinearMap([[1, 0], [0, 0]], 2)


class TestRref:
    def test_identity(self):
        red, piv, rank = rref(LinearMap.identity(2, 2))
        assert red.tolist() == [[1, 0], [0, 1]] and piv == [0, 1] and rank == 2

    def test_zero(self):
        red, piv, rank = rref(LinearMap.zero(3, 2, 3))
        assert not red.any() and red.shape == (3, 2) and piv == [] and rank == 0

    def test_duplicate_rows(self):
        red, piv, rank = rref([[1, 1], [1, 1]], 2)
        assert red.tolist() == [[1, 1], [0, 0]] and piv == [0] and rank == 1

    def test_bare_matrix_needs_prime(self):
        with pytest.raises(TypeError):
            rref([[1]])

    def test_entries_are_canonical_representatives(self):
        red, _, _ = rref([[-1, 4], [2, 7]], 5)
        assert red.min() >= 0 and red.max() < 5

    def test_packed_gf2_matches_generic(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            m = rng.integers(0, 2, size=(rng.integers(0, 9), rng.integers(1, 63)))
            red, piv = gf2.rref(m)
            red2, piv2 = _rref_generic(m.astype(np.int64), 2)
            assert piv == piv2 and np.array_equal(red, red2)

    def test_wide_gf2_falls_back(self):
        m = np.zeros((2, 70), dtype=np.int64)
        m[0, 69] = m[1, 0] = 1
        _, piv, rank = rref(m, 2)
        assert piv == [0, 69] and rank == 2


class TestMaps:
    def test_kernel_examples(self):
        assert kernel(LinearMap.zero(3, 3, 2)).is_full()
        assert kernel(LinearMap.identity(2, 3)).is_zero()
        assert kernel(F) == S([[0, 1]], 2)

    def test_image_and_pushforward(self):
        assert pushforward(F, Subspace.zero(2, 2)).is_zero()
        assert image(LinearMap.identity(2, 5)).is_full()
        assert pushforward(F, S([[1, 1]], 2)) == S([[1, 0]], 2)

    def test_preimage(self):
        assert preimage(F, Subspace.full(2, 2)).is_full()
        assert preimage(F, Subspace.zero(2, 2)) == kernel(F)
        assert preimage(F, S([[1, 0]], 2)).is_full()

    def test_non_square_shapes(self):
        f = LinearMap([[1, 2, 0]], 3)  # F_3^3 -> F_3
        assert kernel(f).dim == 2 and image(f).is_full()
        assert preimage(f, Subspace.zero(1, 3)) == kernel(f)

    def test_inverse(self):
        m = LinearMap([[1, 2], [3, 4]], 5)
        assert m @ inverse(m) == LinearMap.identity(2, 5)
        with pytest.raises(Exception):
            inverse(LinearMap([[1, 1], [1, 1]], 2))

    def test_composition_checks_modulus(self):
        with pytest.raises(AmbientMismatchError):
            LinearMap.identity(2, 2) @ LinearMap.identity(2, 3)


class TestSubspaces:
    def test_coordinate_planes(self):
        u = S([[1, 0, 0], [0, 1, 0]], 2)
        v = S([[0, 1, 0], [0, 0, 1]], 2)
        assert subspace_sum(u, v).is_full()
        assert intersect(u, v) == S([[0, 1, 0]], 2)
        assert intersect(u, Subspace.full(3, 2)) == u
        assert subspace_sum(u, Subspace.zero(3, 2)) == u

    def test_f3_lines(self):
        u, v = S([[1, 1]], 3), S([[1, 2]], 3)
        assert (u + v).is_full() and (u & v).is_zero()

    def test_canonical_basis_identifies_equal_sets(self):
        a = S([[1, 1, 0], [0, 1, 1]], 3)
        b = S([[1, 2, 1], [2, 0, 1], [0, 0, 0]], 3)
        assert a == b and np.array_equal(a.basis, b.basis) and hash(a) == hash(b)

    def test_contains(self):
        u = S([[1, 0, 0], [0, 1, 0]], 2)
        assert contains(u, S([[1, 1, 0]], 2))
        assert not contains(u, S([[0, 0, 1]], 2))
        assert u >= S([[1, 1, 0]], 2)

    def test_ambient_mismatch(self):
        with pytest.raises(AmbientMismatchError):
            Subspace.full(2, 2) + Subspace.full(3, 2)
        with pytest.raises(AmbientMismatchError):
            Subspace.full(2, 2) & Subspace.full(2, 3)

    def test_zero_ambient(self):
        z = Subspace.zero(0, 2)
        assert z.dim == 0 and z.is_full() and subquotient(z, z).dim == 0

    def test_immutable(self):
        s = S([[1, 0]], 2)
        with pytest.raises(AttributeError):
            s.prime = 3
        with pytest.raises(ValueError):
            s.basis[0, 0] = 0


class TestSubquotients:
    def test_equal_pair(self):
        s = S([[1, 0]], 2)
        assert subquotient(s, s).dim == 0

    def test_full_over_zero(self):
        sq = subquotient(Subspace.full(2, 2), Subspace.zero(2, 2))
        assert sq.coset_basis.tolist() == [[1, 0], [0, 1]]

    def test_plane_over_diagonal(self):
        sq = subquotient(Subspace.full(2, 2), S([[1, 1]], 2))
        assert sq.dim == 1 and sq.coset_basis.shape == (1, 2)
        assert np.array_equal(reduce(sq, [1, 0]), reduce(sq, [0, 1]))
        assert not reduce(sq, [1, 1]).any()

    def test_reduce_basis_rows(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            z = random_subspace(rng, 5, 4)
            b = random_sub(rng, z)
            sq = subquotient(z, b)
            for row in b.basis:
                assert not reduce(sq, row).any()
            for i, row in enumerate(sq.coset_basis):
                assert reduce(sq, row).tolist() == np.eye(sq.dim, dtype=int)[i].tolist()

    def test_requires_inclusion(self):
        with pytest.raises(InclusionError):
            subquotient(S([[1, 0]], 2), S([[0, 1]], 2))

    def test_reduce_outside_numerator(self):
        sq = subquotient(S([[1, 0]], 2), Subspace.zero(2, 2))
        with pytest.raises(NotInSubspaceError):
            reduce(sq, [0, 1])


class TestInducedMap:
    def test_identity_and_zero(self):
        sq = subquotient(S([[1, 0, 0], [0, 1, 0]], 3), S([[1, 0, 0]], 3))
        assert induced_map(LinearMap.identity(3, 3), sq, sq) == LinearMap.identity(1, 3)
        assert induced_map(LinearMap.zero(3, 3, 3), sq, sq).is_zero()

    def test_projection_example(self):
        source = subquotient(Subspace.full(2, 2), Subspace.zero(2, 2))
        target = subquotient(S([[1, 0]], 2), Subspace.zero(2, 2))
        assert induced_map(F, source, target).matrix.tolist() == [[1, 0]]

    def test_not_well_defined(self):
        # the identity does not send span{e1} into 0
        source = subquotient(Subspace.full(2, 2), Subspace.zero(2, 2))
        target = subquotient(Subspace.full(2, 2), S([[1, 0]], 2))
        with pytest.raises(InducedMapError) as info:
            induced_map(LinearMap.identity(2, 2), target, source)
        assert info.value.part == "denominator"

    def test_escapes_numerator(self):
        source = subquotient(Subspace.full(2, 2), Subspace.zero(2, 2))
        target = subquotient(S([[1, 0]], 2), Subspace.zero(2, 2))
        with pytest.raises(InducedMapError) as info:
            induced_map(LinearMap.identity(2, 2), source, target)
        assert info.value.part == "numerator"


class TestButterfly:
    def test_full_over_zero(self):
        z, full = Subspace.zero(2, 2), Subspace.full(2, 2)
        bf = butterfly(z, full, z, full)
        assert [q.dim for q in (bf.q1, bf.q2, bf.q3, bf.q4)] == [2, 2, 2, 2]
        assert bf.q2_to_q1 == LinearMap.identity(2, 2)

    def test_line(self):
        z, full = Subspace.zero(2, 2), Subspace.full(2, 2)
        bf = butterfly(z, S([[1, 0]], 2), z, full)
        assert [q.dim for q in (bf.q1, bf.q2, bf.q3, bf.q4)] == [1, 1, 1, 1]

    def test_random_f3_against_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            b, d = random_subspace(rng, 3, 4), random_subspace(rng, 3, 4)
            a, c = random_sub(rng, b), random_sub(rng, d)
            bf = butterfly(a, b, c, d)
            assert bf.all_invertible()
            for q in (bf.q1, bf.q2, bf.q3, bf.q4):
                want = oracle.brute_quotient_dim(oracle.enumerate_subspace(q.z), oracle.enumerate_subspace(q.b))
                assert q.dim == want

    def test_requires_nesting(self):
        with pytest.raises(InclusionError):
            butterfly(Subspace.full(2, 2), Subspace.zero(2, 2), Subspace.zero(2, 2), Subspace.full(2, 2))


@pytest.mark.parametrize("name", list(LATTICE_FAMILIES))
def test_lattice_family_small_run(name):
    fn = LATTICE_FAMILIES[name]
    rng = np.random.default_rng(5)
    for i in range(40):
        assert fn(rng, (2, 3, 5)[i % 3], int(rng.integers(1, 6))) == []


def test_random_between_stays_between():
    rng = np.random.default_rng(2)
    for _ in range(50):
        hi = random_subspace(rng, 3, 5)
        lo = random_sub(rng, hi)
        mid = random_between(rng, lo, hi)
        assert lo <= mid <= hi


# --- property tests -------------------------------------------------------

primes = st.sampled_from([2, 3, 5])


@st.composite
def subspace_triples(draw):
    p = draw(primes)
    n = draw(st.integers(1, 5))
    rows = st.lists(st.lists(st.integers(0, p - 1), min_size=n, max_size=n), max_size=n)
    return tuple(Subspace(draw(rows), p, n) for _ in range(3))


@settings(max_examples=150, deadline=None)
@given(subspace_triples())
def test_modular_law(t):
    a, b, c = t
    a = a & b  # force a <= b
    assert (a + (b & c)) == (b & (a + c))


@settings(max_examples=150, deadline=None)
@given(subspace_triples())
def test_dimension_formula(t):
    u, v, _ = t
    assert (u + v).dim + (u & v).dim == u.dim + v.dim


@settings(max_examples=100, deadline=None)
@given(subspace_triples(), st.integers(0, 2**31 - 1))
def test_preimage_pushforward_galois(t, seed):
    u, w, _ = t
    f = random_map(np.random.default_rng(seed), u.prime, w.ambient, u.ambient)
    assert (pushforward(f, u) <= w) == (u <= preimage(f, w))
