# %% [markdown]
# # Sparse 2D fields and their spectra
#
# A field made of a few on-grid complex exponentials has a spectrum that is
# zero everywhere except at the component bins, where it equals n * A.

# %%
import numpy as np

from sfar2d import GridDims, full_dft, random_model, synthesize

dims = GridDims(128, 128)
model = random_model(dims, k=12, amp_min=2.0, amp_max=3.0, seed=42)
field = synthesize(model)
spec = full_dft(field).values

# %%
peaks = np.argsort(np.abs(spec).ravel())[::-1][:12]
print("largest bins      :", sorted((int(p // dims.ny), int(p % dims.ny)) for p in peaks))
print("model frequencies :", sorted((c.kx, c.ky) for c in model.components))
print("peak / (n * A)    :", [round(float(abs(spec[c.kx, c.ky]) / (dims.n * c.amplitude)), 12) for c in model.components[:3]])

off = np.ones(dims.shape, bool)
off[model.bins[:, 0], model.bins[:, 1]] = False
print(f"largest off-peak magnitude: {np.abs(spec[off]).max():.2e}")

# %% [markdown]
# `sfar2d synth configs/example1.json --out DIR` writes the same spectrum as
# `spectrum.pgm` (log magnitude) next to `spectrum.csv`.
