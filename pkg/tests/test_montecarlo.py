import numpy as np
import pytest

from sfar2d import GridDims, extract, partial_dft, synthesize, uniform_support
from sfar2d.montecarlo import (
    RandomModelSpec,
    TrialConfig,
    _recovery_trial,
    coverage_experiment,
    recovery_experiment,
    recovery_sweep,
    trial_rng,
    variance_experiment,
)
from sfar2d.signal_model import model_from_components
from sfar2d.spectral import missing_sample_variance

D16 = GridDims(16, 16)
D32 = GridDims(32, 32)
UNIT = model_from_components(D16, [(1.0, 3, 5)])
EX1 = RandomModelSpec.uniform(12, 2.0, 3.0)


def test_variance_single_component():
    rep = variance_experiment(TrialConfig(D16, UNIT, 0.25, trials=2000, master_seed=0))
    assert rep.m == 64
    assert rep.predicted_variance == pytest.approx(64 * 192 / 255)
    assert 0.93 <= rep.variance_ratio <= 1.07


def test_variance_full_sampling_is_zero():
    rep = variance_experiment(TrialConfig(D16, UNIT, 1.0, trials=20))
    assert rep.empirical_variance < 1e-18
    assert rep.predicted_variance == 0.0


def test_variance_additivity():
    two = model_from_components(D16, [(1.0, 1, 2), (1.0, 9, 4)])
    one = model_from_components(D16, [(np.sqrt(2.0), 6, 6)])
    r2 = variance_experiment(TrialConfig(D16, two, 0.25, trials=1000, master_seed=1))
    r1 = variance_experiment(TrialConfig(D16, one, 0.25, trials=1000, master_seed=1))
    assert r1.predicted_variance == pytest.approx(r2.predicted_variance, rel=1e-12)
    assert 0.93 <= r1.variance_ratio <= 1.07
    assert 0.93 <= r2.variance_ratio <= 1.07


def test_variance_with_external_noise():
    rep = variance_experiment(TrialConfig(D16, UNIT, 0.25, sigma_eps_sample=2.0, trials=1000, master_seed=2))
    assert rep.predicted_variance == pytest.approx(missing_sample_variance(1.0, 64, 256, 64 * 4.0))
    assert 0.93 <= rep.variance_ratio <= 1.07


def test_coverage_full_sampling():
    rep = coverage_experiment(TrialConfig(D16, UNIT, 1.0, trials=20))
    assert rep.coverage == 1.0


def test_coverage_monotone_in_p_fix():
    cfg = TrialConfig(D32, RandomModelSpec.uniform(3, 1.0, 1.0), 0.25, trials=200, master_seed=4)
    covs = [coverage_experiment(cfg.with_(p_fix=p)).coverage for p in (0.3, 0.5, 0.9, 0.99)]
    assert covs == sorted(covs)


def test_single_component_mirror_pairs():
    # one on-grid component: |F(k)| == |F(2 k0 - k)|, so only half the off-peak magnitudes are free
    dims = GridDims(32, 32)
    f = synthesize(model_from_components(dims, [(1.0, 3, 7)]))
    F = partial_dft(extract(f, uniform_support(dims, 256, 0))).values
    kx, ky = np.meshgrid(np.arange(32), np.arange(32), indexing="ij")
    mirror = F[(6 - kx) % 32, (14 - ky) % 32]
    np.testing.assert_allclose(np.abs(F), np.abs(mirror), atol=1e-9)


def test_single_component_coverage_exceeds_p_fix():
    rep = coverage_experiment(TrialConfig(D32, model_from_components(D32, [(1.0, 3, 7)]), 0.25, p_fix=0.5, trials=500))
    assert rep.coverage > 0.6


def test_recovery_full_sampling():
    rep = recovery_experiment(TrialConfig(GridDims(32, 32), RandomModelSpec.uniform(12, 2.0, 3.0), 1.0, trials=10))
    assert rep.detection_recall == 1.0 and rep.detection_precision == 1.0
    assert max(r["nmse"] for r in rep.records) < 1e-12


def test_recovery_sweep_degrades_at_tiny_ratio():
    cfg = TrialConfig(GridDims(128, 128), EX1, 0.09, trials=20, master_seed=3)
    low, mid = recovery_sweep(cfg, [0.005, 0.09])
    assert low.m == 81 and mid.m == 1474
    assert np.mean([r["recall"] < 1.0 for r in low.records]) > 0.5
    assert mid.full_detection_rate >= 0.9


def test_report_reproducible():
    cfg = TrialConfig(GridDims(32, 32), RandomModelSpec.uniform(3, 1.0, 2.0), 0.3, trials=15, master_seed=9)
    a, b = recovery_experiment(cfg), recovery_experiment(cfg)
    assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv()
    c1, c2 = coverage_experiment(cfg), coverage_experiment(cfg)
    assert c1.to_csv() == c2.to_csv()


def test_trial_order_independent():
    cfg = TrialConfig(GridDims(32, 32), RandomModelSpec.uniform(3, 1.0, 2.0), 0.3, trials=6, master_seed=9)
    forward = recovery_experiment(cfg).records
    backward = [_recovery_trial(cfg, t) for t in reversed(range(cfg.trials))][::-1]
    assert repr(forward) == repr(backward)


def test_trial_rng_streams_distinct():
    a = trial_rng(0, 1).integers(1 << 62, size=4)
    b = trial_rng(0, 2).integers(1 << 62, size=4)
    c = trial_rng(1, 1).integers(1 << 62, size=4)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)


def test_config_validation():
    with pytest.raises(ValueError):
        TrialConfig(D16, UNIT, 0.0)
    with pytest.raises(ValueError):
        TrialConfig(D16, UNIT, 0.5, trials=0)
    with pytest.raises(ValueError):
        TrialConfig(D32, UNIT, 0.5)


def test_report_json_has_no_nan():
    rep = coverage_experiment(TrialConfig(D16, UNIT, 0.5, trials=3))
    assert "NaN" not in rep.to_json()
