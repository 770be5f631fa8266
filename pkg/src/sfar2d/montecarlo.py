"""
Monte Carlo checks of the noise model, the threshold and end-to-end recovery.

Each trial draws from its own generator seeded by ``(master_seed, trial)``,
so a report does not depend on the order trials are evaluated in.
Aggregates are accumulated in trial-index order.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field as dc_field
from typing import Sequence, Union

import numpy as np

from .errors import InvariantError
from .recon import ReconParams, reconstruct_field, sfar2d_iterative, sfar2d_single
from .sampling import extract, samples_for_ratio, uniform_support
from .signal_model import (
    GridDims,
    NoiseParams,
    SignalModel,
    add_external_noise,
    mixed_model,
    synthesize,
)
from .spectral import (
    ThresholdParams,
    detection_threshold,
    effective_threshold,
    estimate_energy,
    external_dft_variance,
    missing_sample_variance,
    partial_dft,
)


@dataclass(frozen=True)
class RandomModelSpec:
    """Draw a fresh model per trial from groups of ``(count, amp_min, amp_max)``."""

    groups: tuple[tuple[int, float, float], ...]

    @classmethod
    def uniform(cls, k: int, amp_min: float, amp_max: float) -> "RandomModelSpec":
        return cls(((k, amp_min, amp_max),))

    def draw(self, dims: GridDims, rng: np.random.Generator) -> SignalModel:
        return mixed_model(dims, self.groups, rng)

    def to_dict(self) -> dict:
        return {"groups": [{"k": k, "amp_min": lo, "amp_max": hi} for k, lo, hi in self.groups]}


@dataclass(frozen=True)
class TrialConfig:
    dims: GridDims
    model_spec: Union[SignalModel, RandomModelSpec]
    sampling_ratio: float
    sigma_eps_sample: float = 0.0
    trials: int = 100
    master_seed: int = 0
    p_fix: float = 0.99
    variant: str = "single"
    max_iterations: int = 10

    def __post_init__(self):
        if self.trials < 1:
            raise InvariantError("trials must be >= 1")
        if not 0 < self.sampling_ratio <= 1:
            raise InvariantError(f"sampling_ratio must be in (0, 1], got {self.sampling_ratio}")
        if self.variant not in ("single", "iterative"):
            raise InvariantError(f"unknown variant {self.variant!r}")
        if isinstance(self.model_spec, SignalModel) and self.model_spec.dims != self.dims:
            raise InvariantError("fixed model dims differ from config dims")

    @property
    def m(self) -> int:
        return samples_for_ratio(self.dims, self.sampling_ratio)

    def recon_params(self) -> ReconParams:
        return ReconParams(
            p_fix=self.p_fix, max_iterations=self.max_iterations, sigma_eps_sample=self.sigma_eps_sample
        )

    def with_(self, **kw) -> "TrialConfig":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(kw)
        return TrialConfig(**d)


@dataclass
class TrialReport:
    experiment: str
    ratio: float
    m: int
    n: int
    trials: int
    empirical_variance: float = float("nan")
    predicted_variance: float = float("nan")
    coverage: float = float("nan")
    detection_precision: float = float("nan")
    detection_recall: float = float("nan")
    nmse: float = float("nan")
    full_detection_rate: float = float("nan")
    records: list[dict] = dc_field(default_factory=list)

    @property
    def variance_ratio(self) -> float:
        return self.empirical_variance / self.predicted_variance

    def summary(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "records"}
        return out

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.summary()), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.records:
            w = csv.DictWriter(buf, fieldnames=list(self.records[0].keys()), lineterminator="\n")
            w.writeheader()
            for r in self.records:
                w.writerow({k: _fmt(v) for k, v in r.items()})
        return buf.getvalue()


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def _jsonable(d):
    # NaN is not valid JSON; emit null instead
    return {k: (None if isinstance(v, float) and np.isnan(v) else v) for k, v in d.items()}


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(trial)]))


def _draw_trial(cfg: TrialConfig, trial: int):
    rng = trial_rng(cfg.master_seed, trial)
    if isinstance(cfg.model_spec, SignalModel):
        model = cfg.model_spec
    else:
        model = cfg.model_spec.draw(cfg.dims, rng)
    support = uniform_support(cfg.dims, cfg.m, rng)
    clean = synthesize(model)
    noisy = clean
    if cfg.sigma_eps_sample > 0:
        noisy = add_external_noise(clean, NoiseParams(cfg.sigma_eps_sample, int(rng.integers(2**63))))
    return model, support, clean, extract(noisy, support)


def _off_peak_mask(model: SignalModel) -> np.ndarray:
    mask = np.ones(model.dims.shape, dtype=bool)
    b = model.bins
    mask[b[:, 0], b[:, 1]] = False
    return mask


def variance_experiment(cfg: TrialConfig) -> TrialReport:
    """Pooled variance of off-peak partial-DFT values against the closed form."""
    n, m = cfg.dims.n, cfg.m
    total = 0j
    total_sq = 0.0
    count = 0
    predicted = []
    records = []
    for t in range(cfg.trials):
        model, _, _, meas = _draw_trial(cfg, t)
        vals = partial_dft(meas).values[_off_peak_mask(model)]
        s, sq = complex(vals.sum()), float(np.vdot(vals, vals).real)
        total += s
        total_sq += sq
        count += vals.size
        pred = missing_sample_variance(model.energy, m, n, external_dft_variance(cfg.sigma_eps_sample, m))
        predicted.append(pred)
        records.append({"trial": t, "mean_sq": sq / vals.size, "predicted": pred})
    mean = total / count
    emp = total_sq / count - abs(mean) ** 2
    return TrialReport(
        "variance",
        cfg.sampling_ratio,
        m,
        n,
        cfg.trials,
        empirical_variance=max(emp, 0.0),
        predicted_variance=float(np.mean(predicted)),
        records=records,
    )


def coverage_experiment(cfg: TrialConfig) -> TrialReport:
    """Fraction of trials whose off-peak magnitudes all stay below the threshold.

    The threshold is computed the way the detector computes it, from the
    energy estimated on the measurements.
    """
    n, m = cfg.dims.n, cfg.m
    params = ThresholdParams(cfg.p_fix)
    hits = 0
    records = []
    for t in range(cfg.trials):
        model, _, _, meas = _draw_trial(cfg, t)
        spec = partial_dft(meas)
        var = missing_sample_variance(estimate_energy(meas), m, n, external_dft_variance(cfg.sigma_eps_sample, m))
        chi = effective_threshold(spec, detection_threshold(var, n, params))
        peak = float(spec.magnitude[_off_peak_mask(model)].max(initial=0.0))
        ok = peak < chi or (chi == 0.0 and peak == 0.0)
        hits += ok
        records.append({"trial": t, "chi": chi, "max_off_peak": peak, "below": int(ok)})
    return TrialReport("coverage", cfg.sampling_ratio, m, n, cfg.trials, coverage=hits / cfg.trials, records=records)


def _recovery_trial(cfg: TrialConfig, t: int) -> dict:
    model, _, clean, meas = _draw_trial(cfg, t)
    run = sfar2d_iterative if cfg.variant == "iterative" else sfar2d_single
    res = run(meas, cfg.recon_params())
    truth = {(c.kx, c.ky): c.amplitude for c in model.components}
    found = res.support.as_set()
    tp = len(found & truth.keys())
    precision = tp / len(found) if found else 0.0
    recall = tp / len(truth)
    n = cfg.dims.n
    got = res.coefficients.as_dict()
    coef_err = max(abs(got[b] - n * a) / (n * a) for b, a in truth.items()) if recall == 1.0 else float("nan")
    rec = reconstruct_field(res).values
    nmse = float(np.sum(np.abs(rec - clean.values) ** 2) / np.sum(np.abs(clean.values) ** 2))
    return {
        "trial": t,
        "k": model.k,
        "detected": len(found),
        "true_positives": tp,
        "precision": precision,
        "recall": recall,
        "coef_rel_error": coef_err,
        "nmse": nmse,
        "iterations": len(res.iterations),
        "converged": int(res.converged),
        "first_pass_recall": len(res.iterations[0].detected.as_set() & truth.keys()) / len(truth),
        "last_true_iteration": _last_true_iteration(res, truth.keys()),
    }


def _last_true_iteration(res, truth) -> int:
    last = 0
    for i, rec in enumerate(res.iterations, 1):
        if rec.detected.as_set() & truth:
            last = i
    return last


def recovery_experiment(cfg: TrialConfig) -> TrialReport:
    records = [_recovery_trial(cfg, t) for t in range(cfg.trials)]
    full = [r["precision"] == 1.0 and r["recall"] == 1.0 for r in records]
    return TrialReport(
        "recovery",
        cfg.sampling_ratio,
        cfg.m,
        cfg.dims.n,
        cfg.trials,
        detection_precision=float(np.mean([r["precision"] for r in records])),
        detection_recall=float(np.mean([r["recall"] for r in records])),
        nmse=float(np.mean([r["nmse"] for r in records])),
        full_detection_rate=float(np.mean(full)),
        records=records,
    )


def recovery_sweep(cfg: TrialConfig, ratios: Sequence[float]) -> list[TrialReport]:
    """Recovery statistics at each sampling ratio; same seeds at every ratio."""
    return [recovery_experiment(cfg.with_(sampling_ratio=float(r))) for r in ratios]


def noise_floor_nmse(cfg: TrialConfig, energy: float) -> float:
    """Reference NMSE level m * sigma_eps^2 / (n * energy)."""
    return cfg.m * cfg.sigma_eps_sample ** 2 / (cfg.dims.n * energy)
