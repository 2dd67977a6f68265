"""Pages of a small filtered complex, turned one at a time."""

# %%
import math

from filtspec import ChainComplex, FilteredComplex, Subspace
from filtspec import specseq as ss

# C_1 = <e1, e2>, C_0 = <f1, f2>, d e1 = f1; F_0 C_1 = <e2>, F_0 C_0 = <f1>
chain = ChainComplex(2, 0, [2, 2], {1: [[1, 0], [0, 0]]})
fc = FilteredComplex(
    chain, 0, 1,
    {
        (1, 0): Subspace([[0, 1]], 2), (1, 1): Subspace.full(2, 2),
        (0, 0): Subspace([[1, 0]], 2), (0, 1): Subspace.full(2, 2),
    },
)

# %% Dimensions at (0,1), (1,0), (0,0), (1,-1) on each page.
spots = [(0, 1), (1, 0), (0, 0), (1, -1)]
for r in (0, 1, 2, math.inf):
    pg = ss.page(fc, r)
    diffs = {k: m.matrix.tolist() for k, m in pg.nonzero_differentials().items()}
    print(f"E^{r}:", [pg.dim(p, q) for p, q in spots], "nonzero d:", diffs)

# %% d^1 from (1,0) hits (0,0); its kernel and image give the next page.
print("turn 1 -> 2 checks out:", bool(ss.turn_page_check(fc, 1)))

# %% d induces Z^1/Z^2 -> B^2/B^1 one step down; it is an isomorphism.
source, target, iso = ss.connecting_isomorphism(fc, 1, 0, 1)
print("dims", source.dim, target.dim, "matrix", iso.matrix.tolist(), "invertible:", iso.is_invertible())

# %% The filtration of homology matches E^inf.
rep = ss.convergence_report(fc)
print({k: v for k, v in rep.pairs.items() if any(v)}, "verdict:", rep.verdict)
