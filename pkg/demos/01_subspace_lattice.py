"""Subspaces of F_p^n, their lattice operations, and the butterfly."""

# %%
import numpy as np

from filtspec import LinearMap, Subspace, butterfly, kernel, preimage, pushforward, subquotient

u = Subspace([[1, 0, 0], [0, 1, 0]], prime=2)
v = Subspace([[0, 1, 0], [0, 0, 1]], prime=2)
print("u + v =", (u + v).basis.tolist())
print("u & v =", (u & v).basis.tolist())

# %% Spanning sets are reduced to a canonical basis, so equal sets compare equal.
a = Subspace([[1, 1, 0], [0, 1, 1]], prime=3)
b = Subspace([[1, 2, 1], [2, 0, 1]], prime=3)
print("same subspace:", a == b, "basis", a.basis.tolist())

# %% Maps act on column vectors; the matrix is codomain x domain.
f = LinearMap([[1, 0], [0, 0]], prime=2)
print("ker f =", kernel(f).basis.tolist())
print("f(<(1,1)>) =", pushforward(f, Subspace([[1, 1]], 2)).basis.tolist())
print("f^-1(<(1,0)>) is everything:", preimage(f, Subspace([[1, 0]], 2)).is_full())

# %% The modular law holds for any a <= b and c.
rng = np.random.default_rng(0)
c = Subspace(rng.integers(0, 5, size=(2, 4)), prime=5)
big = Subspace(rng.integers(0, 5, size=(3, 4)), prime=5)
small = big & Subspace(rng.integers(0, 5, size=(2, 4)), prime=5)
print("a + (b & c) == b & (a + c):", small + (big & c) == big & (small + c))

# %% A subquotient keeps a basis of cosets, and `reduce` gives coordinates.
sq = subquotient(Subspace.full(2, 2), Subspace([[1, 1]], 2))
print("dim", sq.dim, "coords of (1,0):", sq.reduce([1, 0]), "of (0,1):", sq.reduce([0, 1]))

# %% Zassenhaus: two nested pairs give four isomorphic subquotients.
d = Subspace(rng.integers(0, 3, size=(3, 4)), prime=3)
bb = Subspace(rng.integers(0, 3, size=(3, 4)), prime=3)
aa = bb & Subspace(rng.integers(0, 3, size=(2, 4)), prime=3)
cc = d & Subspace(rng.integers(0, 3, size=(2, 4)), prime=3)
bf = butterfly(aa, bb, cc, d)
print("wing dims:", [q.dim for q in (bf.q1, bf.q2, bf.q3, bf.q4)], "maps invertible:", bf.all_invertible())
