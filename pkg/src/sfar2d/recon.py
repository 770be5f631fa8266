"""
Threshold-and-least-squares reconstruction of sparse 2D spectra.

``sfar2d_single`` runs one detection pass: estimate the missing-sample noise
level from the measurements, threshold the partial DFT, and fit the detected
bins by least squares. ``sfar2d_iterative`` repeats detection on the residual
so that components hidden under the dispersion of stronger ones surface once
the strong ones are removed.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import IllConditionedError, InvariantError, OverdeterminationError, ShapeError
from .sampling import Measurements
from .signal_model import Field, exponential_atoms
from .spectral import (
    FrequencySupport,
    Spectrum,
    ThresholdParams,
    detect_support,
    detection_threshold,
    effective_threshold,
    empty_support,
    estimate_energy,
    external_dft_variance,
    inverse_dft,
    missing_sample_variance,
    partial_dft,
)

MAX_CONDITION = 1e12


@dataclass(frozen=True)
class CoefficientSet:
    """DFT-domain values on a frequency support (n * A_i for a clean component)."""

    support: FrequencySupport
    coeffs: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        if c.shape[0] != len(self.support):
            raise InvariantError(f"{c.shape[0]} coefficients for {len(self.support)} bins")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __len__(self) -> int:
        return len(self.support)

    def to_spectrum(self) -> Spectrum:
        vals = np.zeros(self.support.dims.shape, dtype=np.complex128)
        vals[self.support.bins[:, 0], self.support.bins[:, 1]] = self.coeffs
        return Spectrum(self.support.dims, vals)

    def as_dict(self) -> dict[tuple[int, int], complex]:
        return {(int(a), int(b)): complex(c) for (a, b), c in zip(self.support.bins, self.coeffs)}


@dataclass(frozen=True)
class ReconParams:
    p_fix: float = 0.99
    max_iterations: int = 10
    residual_tol: float = 1e-6
    sigma_eps_sample: float = 0.0

    def __post_init__(self):
        ThresholdParams(self.p_fix)
        if self.max_iterations < 1:
            raise InvariantError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.residual_tol < 0 or self.sigma_eps_sample < 0:
            raise InvariantError("residual_tol and sigma_eps_sample must be >= 0")


@dataclass(frozen=True)
class IterationRecord:
    detected: FrequencySupport  # bins newly detected in this pass
    chi: float
    energy: float
    variance: float
    residual_energy: float  # sum |residual|^2 after the pass


@dataclass(frozen=True)
class ReconstructionResult:
    coefficients: CoefficientSet
    spectrum: Spectrum
    iterations: tuple[IterationRecord, ...]
    converged: bool

    @property
    def support(self) -> FrequencySupport:
        return self.coefficients.support

    def to_dict(self) -> dict:
        return {
            "nx": self.spectrum.dims.nx,
            "ny": self.spectrum.dims.ny,
            "converged": self.converged,
            "bins": self.support.bins.tolist(),
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients.coeffs],
            "iterations": [
                {
                    "detected": rec.detected.bins.tolist(),
                    "chi": rec.chi,
                    "energy": rec.energy,
                    "variance": rec.variance,
                    "residual_energy": rec.residual_energy,
                }
                for rec in self.iterations
            ],
        }


def _design_matrix(meas: Measurements, freqs: FrequencySupport) -> np.ndarray:
    n = meas.dims.n
    return exponential_atoms(meas.dims, freqs.bins, meas.support.x, meas.support.y) / n


def least_squares_recover(meas: Measurements, freqs: FrequencySupport) -> CoefficientSet:
    """Fit DFT coefficients on ``freqs`` to the measurements.

    Solves min ||y - Phi c||, Phi[j, b] = exp(+j2pi(kx_b x_j/nx + ky_b y_j/ny)) / n,
    through an SVD-based solver. Raises ``IllConditionedError`` when the
    singular-value ratio exceeds 1e12.
    """
    if freqs.dims != meas.dims:
        raise ShapeError("frequency support and measurements live on different grids")
    k = len(freqs)
    if k == 0:
        return CoefficientSet(freqs, np.zeros(0, dtype=np.complex128))
    if k > meas.m:
        raise OverdeterminationError(f"{k} unknowns but only {meas.m} measurements")
    phi = _design_matrix(meas, freqs)
    coeffs, _, _, sv = np.linalg.lstsq(phi, meas.values, rcond=None)
    cond = np.inf if sv[-1] == 0 else sv[0] / sv[-1]
    if cond > MAX_CONDITION:
        raise IllConditionedError(cond)
    return CoefficientSet(freqs, coeffs)


def model_at_support(meas: Measurements, coeffs: CoefficientSet) -> np.ndarray:
    if len(coeffs) == 0:
        return np.zeros(meas.m, dtype=np.complex128)
    return _design_matrix(meas, coeffs.support) @ coeffs.coeffs


def subtract_contribution(meas: Measurements, coeffs: CoefficientSet) -> Measurements:
    if coeffs.support.dims != meas.dims:
        raise ShapeError("coefficients and measurements live on different grids")
    if len(coeffs) == 0:
        return meas
    return Measurements(meas.support, meas.values - model_at_support(meas, coeffs))


def _residual_energy(meas: Measurements) -> float:
    return float(np.vdot(meas.values, meas.values).real)


def _threshold(meas: Measurements, params: ReconParams, external: float):
    # noise power is not dispersed by missing samples; it enters through `external`
    energy = max(estimate_energy(meas) - params.sigma_eps_sample**2, 0.0)
    variance = missing_sample_variance(energy, meas.m, meas.dims.n, external)
    chi = detection_threshold(variance, meas.dims.n, params.p_fix)
    return energy, variance, chi


def _result(coeffs: CoefficientSet, records, converged: bool) -> ReconstructionResult:
    return ReconstructionResult(coeffs, coeffs.to_spectrum(), tuple(records), bool(converged))


def sfar2d_single(meas: Measurements, params: ReconParams = ReconParams()) -> ReconstructionResult:
    """One detection pass followed by a least-squares fit."""
    external = external_dft_variance(params.sigma_eps_sample, meas.m)
    energy, variance, chi = _threshold(meas, params, external)
    spec = partial_dft(meas)
    freqs = detect_support(spec, effective_threshold(spec, chi), cap=meas.m)
    coeffs = least_squares_recover(meas, freqs)
    residual = subtract_contribution(meas, coeffs)
    rec = IterationRecord(freqs, chi, energy, variance, _residual_energy(residual))
    return _result(coeffs, [rec], len(freqs) > 0)


def sfar2d_iterative(meas: Measurements, params: ReconParams = ReconParams()) -> ReconstructionResult:
    """Detect, fit and subtract until no new bins appear.

    Every pass re-fits all bins found so far against the original
    measurements, then re-estimates the noise level from what is left. The
    external-noise term of the variance is held fixed across passes.
    Stops when a pass finds nothing new, when the residual energy falls to
    ``residual_tol`` times the initial energy, or after ``max_iterations``.
    """
    external = external_dft_variance(params.sigma_eps_sample, meas.m)
    initial = _residual_energy(meas)
    support = empty_support(meas.dims)
    coeffs = CoefficientSet(support, np.zeros(0))
    residual = meas
    records = []
    converged = False
    for _ in range(params.max_iterations):
        energy, variance, chi = _threshold(residual, params, external)
        spec = partial_dft(residual)
        cap = meas.m - len(support)
        found = detect_support(spec, effective_threshold(spec, chi), cap=cap) if cap > 0 else empty_support(meas.dims)
        new = found.difference(support)
        if len(new) == 0:
            records.append(IterationRecord(new, chi, energy, variance, _residual_energy(residual)))
            converged = len(support) > 0
            break
        support = support.union(new)
        coeffs = least_squares_recover(meas, support)
        residual = subtract_contribution(meas, coeffs)
        res_e = _residual_energy(residual)
        records.append(IterationRecord(new, chi, energy, variance, res_e))
        if res_e <= params.residual_tol * initial:
            converged = True
            break
    return _result(coeffs, records, converged)


def reconstruct_field(result: ReconstructionResult) -> Field:
    return inverse_dft(result.spectrum)
