"""
2D DFT operators, missing-sample noise statistics and the detection threshold.

Conventions: the forward transform is the unnormalized sum

    F(kx, ky) = sum_{x,y} s(x, y) exp(-j 2 pi (kx x / nx + ky y / ny))

and the inverse carries the 1/n factor, n = nx * ny. A partial DFT sums over
the available samples only, which is the same as the full DFT of the
zero-filled grid; this is how it is computed (one FFT, no dense n x n
matrix).

When only m of n samples are kept, each off-peak bin picks up a zero-mean
disturbance with variance

    sigma^2 = E * m (n - m) / (n - 1),   E = sum_i A_i^2,

plus m * sigma_eps^2 when the samples carry external noise. The magnitudes
of noise-only bins are then Rayleigh with E|F|^2 = sigma^2, and all n of them
stay below

    chi = sigma * sqrt(-ln(1 - p_fix ** (1 / n)))

with probability ~p_fix.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DomainError, InvariantError, ShapeError
from .sampling import Measurements
from .signal_model import Field, GridDims

# Relative magnitude (to the spectrum peak) below which a bin is treated as
# round-off. Only matters when chi collapses to 0 at full sampling.
ROUNDOFF_FLOOR = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Dense complex DFT values ``values[kx, ky]``."""

    dims: GridDims
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != self.dims.shape:
            raise ShapeError(f"values shape {v.shape} does not match dims {self.dims.shape}")
        if v is self.values and v.flags.writeable:
            v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass(frozen=True)
class NoiseStats:
    energy: float
    variance: float
    m: int
    n: int


@dataclass(frozen=True)
class ThresholdParams:
    p_fix: float = 0.99

    def __post_init__(self):
        if not 0 < self.p_fix < 1:
            raise InvariantError(f"p_fix must be in (0, 1), got {self.p_fix}")


@dataclass(frozen=True)
class FrequencySupport:
    """Detected DFT bins as a (K, 2) array in row-major order."""

    dims: GridDims
    bins: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.bins, dtype=np.int64).reshape(-1, 2)
        if np.any(b < 0) or np.any(b[:, 0] >= self.dims.nx) or np.any(b[:, 1] >= self.dims.ny):
            raise InvariantError("frequency bin outside the grid")
        flat = b[:, 0] * self.dims.ny + b[:, 1]
        order = np.argsort(flat, kind="stable")
        if np.any(np.diff(flat[order]) == 0):
            raise InvariantError("duplicate frequency bins")
        b = np.ascontiguousarray(b[order])
        b.setflags(write=False)
        object.__setattr__(self, "bins", b)

    def __len__(self) -> int:
        return int(self.bins.shape[0])

    @property
    def flat_indices(self) -> np.ndarray:
        return self.bins[:, 0] * self.dims.ny + self.bins[:, 1]

    def as_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.bins}

    def union(self, other: "FrequencySupport") -> "FrequencySupport":
        if other.dims != self.dims:
            raise ShapeError("cannot merge supports on different grids")
        flat = np.union1d(self.flat_indices, other.flat_indices)
        return from_flat(self.dims, flat)

    def difference(self, other: "FrequencySupport") -> "FrequencySupport":
        flat = np.setdiff1d(self.flat_indices, other.flat_indices)
        return from_flat(self.dims, flat)


def from_flat(dims: GridDims, flat) -> FrequencySupport:
    flat = np.asarray(flat, dtype=np.int64).reshape(-1)
    return FrequencySupport(dims, np.stack([flat // dims.ny, flat % dims.ny], axis=1))


def empty_support(dims: GridDims) -> FrequencySupport:
    return FrequencySupport(dims, np.zeros((0, 2), dtype=np.int64))


def full_dft(fld: Field) -> Spectrum:
    return Spectrum(fld.dims, np.fft.fft2(fld.values))


def partial_dft(meas: Measurements) -> Spectrum:
    """DFT of the available samples only (unnormalized)."""
    return Spectrum(meas.dims, np.fft.fft2(meas.zero_filled()))


def inverse_dft(spec: Spectrum) -> Field:
    return Field(spec.dims, np.fft.ifft2(spec.values))


def estimate_energy(meas: Measurements) -> float:
    """Mean squared magnitude of the measurements, an estimate of sum A_i^2."""
    return float(np.vdot(meas.values, meas.values).real / meas.m)


def external_dft_variance(sigma_eps_sample: float, m: int) -> float:
    """Per-bin variance contributed by m noisy samples."""
    return m * float(sigma_eps_sample) ** 2


def missing_sample_variance(energy: float, m: int, n: int, sigma_eps_dft: float = 0.0) -> float:
    """Off-peak bin variance; ``sigma_eps_dft`` is already in the DFT domain."""
    if not 1 <= m <= n:
        raise DomainError(f"need 1 <= m <= n, got m={m}, n={n}")
    if energy < 0 or sigma_eps_dft < 0:
        raise DomainError("energy and external variance must be nonnegative")
    if m == n:
        dispersion = 0.0
    else:
        dispersion = energy * m * (n - m) / (n - 1)
    return dispersion + sigma_eps_dft


def noise_stats(meas: Measurements, sigma_eps_sample: float = 0.0) -> NoiseStats:
    energy = estimate_energy(meas)
    n = meas.dims.n
    var = missing_sample_variance(energy, meas.m, n, external_dft_variance(sigma_eps_sample, meas.m))
    return NoiseStats(energy=energy, variance=var, m=meas.m, n=n)


def threshold_factor(n: int, p_fix: float = 0.99) -> float:
    """sqrt(-ln(1 - p_fix**(1/n))), evaluated without cancellation."""
    ThresholdParams(p_fix)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    tail = -np.expm1(np.log(p_fix) / n)  # 1 - p_fix**(1/n)
    return float(np.sqrt(-np.log(tail)))


def detection_threshold(variance: float, n: int, params: ThresholdParams | float = ThresholdParams()) -> float:
    if not isinstance(params, ThresholdParams):
        params = ThresholdParams(float(params))
    if variance < 0:
        raise DomainError(f"variance must be >= 0, got {variance}")
    if variance == 0:
        return 0.0
    return float(np.sqrt(variance)) * threshold_factor(n, params.p_fix)


def effective_threshold(spec: Spectrum, chi: float) -> float:
    """``chi`` raised to the round-off floor of ``spec``."""
    peak = float(spec.magnitude.max(initial=0.0))
    return max(float(chi), ROUNDOFF_FLOOR * peak)


def detect_support(spec: Spectrum, chi: float, cap: int | None = None) -> FrequencySupport:
    """Bins with ``|F| > chi``; at most ``cap`` of them, largest first.

    Ties at the cap boundary go to the earlier bin in row-major order.
    """
    if chi < 0:
        raise DomainError(f"chi must be >= 0, got {chi}")
    if cap is not None and cap < 1:
        raise DomainError(f"cap must be >= 1, got {cap}")
    mag = spec.magnitude.ravel()
    flat = np.flatnonzero(mag > chi)
    if cap is not None and flat.size > cap:
        order = np.argsort(-mag[flat], kind="stable")
        flat = np.sort(flat[order[:cap]])
    return from_flat(spec.dims, flat)
