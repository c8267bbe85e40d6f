# %% [markdown]
# # One-message key agreement
#
# Alice sends a short hash of her vertex; Bob recovers it among his
# neighbors, and both hash again to get a key.  The eavesdropper audit
# enumerates every input consistent with the transcript.

# %%
from skagraph import HammingPrefixConfig, ProtocolConfig, batch_stats, point_line
from skagraph.ska import hamming_batch

cfg = ProtocolConfig(point_line(256), slack_s=2)
print(cfg.as_dict())
stats = batch_stats(cfg, 2000, seed=1, audit=True)
for k in ("success_rate", "failure_bound", "mean_payload_bits", "mean_seed_bits", "max_distance", "condition_rate"):
    print(f"{k:18s} {stats[k]}")

# %% [markdown]
# Prefix protocol on Hamming inputs: key and message lengths both grow with
# the prefix fraction.

# %%
for delta in (0.25, 0.5, 0.75):
    c = HammingPrefixConfig(64, 7, delta)
    s = hamming_batch(c, 100, seed=2)
    print(f"delta={delta}: shell {c.shell}, message {c.message_bits} bits, key {c.key_bits} bits, "
          f"agreement rate {s['success_rate']:.2f}, target {delta * 32:g}")
