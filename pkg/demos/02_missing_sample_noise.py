# %% [markdown]
# # What missing samples do to the spectrum
#
# Keeping m of n samples leaves each true peak at exactly m * A and spreads
# the rest as zero-mean noise over every other bin, with variance
# sum(A_i^2) * m (n - m) / (n - 1). The detector threshold is placed so that
# all n noise bins stay below it with probability p_fix.

# %%
import numpy as np

from sfar2d import GridDims, detection_threshold, missing_sample_variance
from sfar2d.montecarlo import RandomModelSpec, TrialConfig, coverage_experiment, variance_experiment
from sfar2d.signal_model import model_from_components

dims = GridDims(16, 16)
single = model_from_components(dims, [(1.0, 3, 5)])
rep = variance_experiment(TrialConfig(dims, single, sampling_ratio=0.25, trials=2000))
print(f"off-peak variance: empirical {rep.empirical_variance:.3f}, closed form {rep.predicted_variance:.3f}")

# %%
var = missing_sample_variance(1.0, m=16, n=64)
print(f"m=16 of 64, unit energy: variance {var:.4f}, threshold {detection_threshold(var, 64, 0.99):.4f}")

# %% [markdown]
# Coverage: how often every noise bin stays below the threshold.

# %%
d32 = GridDims(32, 32)
cfg = TrialConfig(d32, RandomModelSpec.uniform(3, 1.0, 1.0), sampling_ratio=0.25, trials=2000)
for p in (0.5, 0.9, 0.99):
    print(f"p_fix={p:<5} coverage={coverage_experiment(cfg.with_(p_fix=p)).coverage:.3f}")

# %% [markdown]
# With a single component the off-peak magnitudes come in mirror pairs
# |F(k)| = |F(2 k0 - k)|, so only half of them are independent and coverage
# lands above p_fix. Three or more components break the pairing.

# %%
one = model_from_components(d32, [(1.0, 3, 7)])
print("single component, p_fix=0.5:", coverage_experiment(TrialConfig(d32, one, 0.25, p_fix=0.5, trials=2000)).coverage)
