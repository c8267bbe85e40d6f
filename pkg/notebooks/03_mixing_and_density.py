# %% [markdown]
# # Edge counts between subsets
#
# Exact counts against the mixing bound, then large sets where the point-line
# graph stays close to its average density while a Hamming graph does not.

# %%
import math

from skagraph import hamming_theta, point_line
from skagraph.mixing import (
    density_bound_check,
    density_threshold,
    hamming_cylinder_counterexample,
    mixing_check,
    uniform_pair,
)
from skagraph.rng import stream
from skagraph.spectral import closed_form_lambda2

g = point_line(64)
lam2 = closed_form_lambda2(g)
worst = 0.0
for i in range(500):
    rng = stream(0, "nb-mixing", i)
    a = mixing_check(g, uniform_pair(g, int(rng.integers(1, g.N)), int(rng.integers(1, g.N)), rng), lam2)
    worst = max(worst, a.deviation / a.bound)
print(f"{g.describe()}: largest deviation/bound over 500 pairs = {worst:.3f}")

# %% [markdown]
# Pairs with `|A||B| >= N^2 / D`.

# %%
side = math.ceil(math.sqrt(density_threshold(g)))
ratios = [density_bound_check(g, uniform_pair(g, side, side, stream(1, "nb-dens", i))).audit.density_ratio for i in range(200)]
print(f"point-line: max density ratio {max(ratios):.3f}")

for n in (12, 16, 20):
    pair, d = hamming_cylinder_counterexample(hamming_theta(n))
    print(f"hamming n={n}: cylinder of {pair.A.size} strings, density ratio {d.audit.density_ratio:.3f}")
