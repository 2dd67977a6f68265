"""A double complex, its column filtration, and a longer differential."""

# %%
import math

import numpy as np

from filtspec import make_random, make_total_of_bicomplex
from filtspec import specseq as ss

one = np.eye(1, dtype=np.int64)
# 2x2 square of identity maps; the total complex is F_2 -> F_2^2 -> F_2
fc = make_total_of_bicomplex(
    [[1, 1], [1, 1]],
    horizontal={(1, 0): one, (1, 1): one},
    vertical={(0, 1): one, (1, 1): one},
)
print("total dims", fc.chain.dims, "d_1", fc.d(1).matrix.tolist(), "d_2", fc.d(2).matrix.tolist())

# %% Columns are exact vertically, so E^1 already vanishes.
for r in (0, 1, math.inf):
    print(f"E^{r} total dim", ss.page(fc, r).total_dim)
print("homology dims", [ss.homology(fc, n).dim for n in fc.degrees])

# %% A random complex with a nonzero d^2.
rnd = make_random(2, 7, 3, seed=74)
for r in range(ss.stabilization_index(rnd) + 1):
    nz = ss.page(rnd, r).nonzero_differentials()
    print(f"r={r}: total {ss.page(rnd, r).total_dim}, nonzero d at {sorted(nz)}")
rep = ss.convergence_report(rnd)
print("H dims", rep.homology_dims, "verdict", rep.verdict)
