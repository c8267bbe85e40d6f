# %% [markdown]
# # Finite fields and implicit bipartite graphs
#
# Every graph is described by a small immutable `GraphSpec`; edges are
# computed on demand from field arithmetic, never stored.

# %%
import numpy as np

from skagraph import FieldSpec, euclidean, hamming, point_line, tensor_with_complete
from skagraph.graphs import Side, dense_biadjacency

F8 = FieldSpec.of_order(8)
print(F8.canonical, "->", F8(0b011) * F8(0b101))
F9 = FieldSpec.of_order(9)
print(F9.canonical, "generator", F9.generator)

# %% [markdown]
# Point-line incidences: point `(x0, y0)` lies on line `(a, b)` when
# `y0 = a x0 - b`.  Each point sees `q` lines and each line holds `q` points.

# %%
g = point_line(5)
line = 2 * 5 + 1  # y = 2x - 1
print("points on y = 2x - 1:", [divmod(int(p), 5) for p in np.sort(g.neighbor_block(Side.RIGHT, [line])[0])])

# %% [markdown]
# Degrees of the three families and a tensor product.

# %%
for spec in (point_line(16), euclidean(13), euclidean(11), hamming(12, 3), tensor_with_complete(point_line(4), 2)):
    J = dense_biadjacency(spec) if spec.N <= 2048 else None
    check = "" if J is None else f"  (row sums {int(J.sum(1).min())}..{int(J.sum(1).max())})"
    print(f"{spec.describe():32s} N={spec.N:5d} D={spec.degree}{check}")
