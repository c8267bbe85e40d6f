# %% [markdown]
# # Shrinking private randomness with a sample grid
#
# A `k x k` grid of random strings is a good sampler with high probability;
# running a protocol on a uniformly chosen grid cell changes its outcome
# probabilities by less than `delta`.

# %%
import math

import numpy as np

from skagraph.newman import choose_k, derandomize_protocol, parity_toy_protocol, sampling_failure_rate
from skagraph.newman import ska_validity_transfer
from skagraph.rng import stream

rng = stream(0, "nb-newman")
S = np.zeros((256, 256), dtype=bool)
S[:77] = True
for k in (50, 200, 400):
    fr = sampling_failure_rate(S, 0.1, k, 2000, rng)
    print(f"k={k:3d}: failure rate {fr.rate:.4f}  (bound {fr.bound:.4f})")

# %%
dp = derandomize_protocol(parity_toy_protocol(), 256, rng, delta=0.05)
print(dp.as_dict())

# %%
delta, k = choose_k(8, 8, 2**-4)
print(f"delta = 2^{math.log2(delta):.0f}, k = {k}, log2 k = {math.log2(k):.2f}")
print(ska_validity_transfer(q=16, s_bits=10, k=256))
