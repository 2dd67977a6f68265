"""Building filtered complexes and checking the filtration axioms."""

# %%
from filtspec import ChainComplex, FilteredComplex, Subspace, make_column_filtration, make_random, validate
from filtspec.complex import i_filt, k_filt

# C_1 = <e1, e2> -> C_0 = <f1, f2>, d e1 = f1
chain = ChainComplex(prime=2, n_min=0, dims=[2, 2], boundaries={1: [[1, 0], [0, 0]]})

# %% A filtration by leading coordinates. F_0 holds e1 and f1.
fc = make_column_filtration(chain, breaks={0: [1, 2], 1: [1, 2]})
print(validate(fc).describe())

# %% Putting e1 in F_0 while f1 is only in F_1 breaks compatibility with d.
bad = FilteredComplex(
    chain, 0, 1,
    {
        (1, 0): Subspace([[1, 0]], 2), (1, 1): Subspace.full(2, 2),
        (0, 0): Subspace([[0, 1]], 2), (0, 1): Subspace.full(2, 2),
    },
)
print(validate(bad).describe())

# %% Relative cycles K and boundaries I for the valid one.
for p in (0, 1):
    print(f"F_{p}K_1 =", k_filt(fc, p, 1).basis.tolist(), f" F_{p}I_0 =", i_filt(fc, p, 0).basis.tolist())

# %% Random instances are valid by construction and have non-coordinate filtrations.
rnd = make_random(prime=3, max_dim=8, p_range=3, seed=5)
print("dims", rnd.chain.dims, "levels", rnd.p_min, "..", rnd.p_max, "valid:", validate(rnd).ok)
print("F_p C_n basis example:", rnd.filt[(rnd.n_min, rnd.p_min)].basis.tolist())
