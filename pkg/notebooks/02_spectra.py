# %% [markdown]
# # Second eigenvalues, three ways
#
# Closed forms, a dense eigensolve of the full adjacency matrix, and
# matrix-free power iteration should all agree.

# %%
import math

from skagraph import euclidean, hamming_theta, numeric_spectrum, point_line
from skagraph.spectral import character_sum_spectrum, closed_form_lambda2, krawtchouk_table

for q in (4, 8, 9, 16, 32):
    g = point_line(q)
    rep = numeric_spectrum(g)
    print(f"q={q:3d}  sqrt(q)={math.sqrt(q):.6f}  {rep.method:22s} lambda2={rep.lambda2:.6f}")

# %% [markdown]
# The distance graph has no formula; its character sums give the exact
# spectrum, and the ratio to `sqrt(q)` stays bounded.

# %%
for q in (13, 29, 61, 101):
    lam2 = character_sum_spectrum(euclidean(q))[1]
    print(f"q={q:4d}  lambda2/sqrt(q) = {lam2 / math.sqrt(q):.3f}")

# %% [markdown]
# Hamming graphs have no spectral gap at all: `K_w(n) = (-1)^w C(n, w)`, so
# the all-ones-complement character reaches the degree.

# %%
for n in (8, 12, 16, 20):
    g = hamming_theta(n)
    K = krawtchouk_table(n, g.w)
    print(f"n={n:2d} w={g.w}  K_w(i) = {K[:4]}...  lambda2/lambda1 = {closed_form_lambda2(g) / g.degree:.3f}")
