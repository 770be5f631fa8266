# %% [markdown]
# # One-pass recovery from 9% of the samples
#
# Twelve scatterers with amplitudes in (2, 3) on a 128 x 128 grid; only 1474
# samples are kept. One thresholding pass finds every component and the
# least-squares fit on those bins returns the exact spectrum.

# %%
import numpy as np

from sfar2d import (
    GridDims,
    NoiseParams,
    ReconParams,
    add_external_noise,
    extract,
    random_model,
    reconstruct_field,
    sfar2d_single,
    synthesize,
    uniform_support,
)

dims = GridDims(128, 128)
model = random_model(dims, 12, 2.0, 3.0, seed=42)
support = uniform_support(dims, 1474, seed=1)
clean = synthesize(model)

res = sfar2d_single(extract(clean, support))
rec = reconstruct_field(res).values
print(f"threshold {res.iterations[0].chi:.1f}, detected {len(res.support)} bins")
print("detected == truth:", res.support.as_set() == {(c.kx, c.ky) for c in model.components})
print(f"field NMSE {np.sum(np.abs(rec - clean.values) ** 2) / np.sum(np.abs(clean.values) ** 2):.2e}")

# %% [markdown]
# Same scene with complex Gaussian noise of standard deviation 0.5 per
# sample; the noise level is passed to the detector.

# %%
noisy = add_external_noise(clean, NoiseParams(0.5, seed=7))
res = sfar2d_single(extract(noisy, support), ReconParams(sigma_eps_sample=0.5))
rec = reconstruct_field(res).values
print(f"threshold {res.iterations[0].chi:.1f}, detected {len(res.support)} bins")
print(f"field NMSE {np.sum(np.abs(rec - clean.values) ** 2) / np.sum(np.abs(clean.values) ** 2):.2e}")

# %% [markdown]
# Success rate against sampling ratio:

# %%
from sfar2d.montecarlo import RandomModelSpec, TrialConfig, recovery_sweep

cfg = TrialConfig(dims, RandomModelSpec.uniform(12, 2.0, 3.0), 0.09, trials=20)
for rep in recovery_sweep(cfg, [0.005, 0.01, 0.02, 0.05, 0.09]):
    print(f"ratio {rep.ratio:<6} m={rep.m:<5} exact support in {rep.full_detection_rate:.0%} of trials, recall {rep.detection_recall:.3f}")
